use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use partible::certificate::CertificateJson;
use partible::harness::{
    evaluate_certificate, hypothesis_holds, verify_closed_form_symbolic, verify_divisibility,
    verify_lemma32, verify_theorem1, verify_two_paths, GridSpec,
};
use partible::modular::odd_primes_below;
use partible::poly::int;
use partible::reduction::{schroder_certificate, verify_certificate};
use partible::sequences::{
    central_delannoy, delannoy_table, large_schroder, little_schroder, schroder_operator,
    schroder_table, SchroderFamily,
};
use partible::shift::{
    indicial_polynomial, op_degenerate_roots, op_degenerate_roots_at, op_degree, op_find_gamma,
    OperatorSpec,
};
use partible::text::{render_kpoly, render_zpoly};
use partible::Epsilon;

/// Exact power-partible reduction and Schröder congruence checks.
#[derive(Parser)]
#[command(name = "partible", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification grid.
    Verify {
        #[command(subcommand)]
        what: Verify,
    },
    /// Reduce (2k+1)^(2r+1) for the Schröder operator and print the certificate.
    Reduce {
        #[arg(long)]
        r: u32,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_sign)]
        epsilon: Epsilon,
        /// Specialize the certificate to an integer z.
        #[arg(long, allow_hyphen_values = true)]
        z: Option<i64>,
    },
    /// Check a certificate file: the exact identity, then the rebuilt sums.
    Certify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 100)]
        pmax: u64,
        #[arg(long, default_value_t = -10, allow_hyphen_values = true)]
        zmin: i64,
        #[arg(long, default_value_t = 10, allow_hyphen_values = true)]
        zmax: i64,
    },
    /// Print terms 0..=n of a sequence, one per line.
    Seq {
        #[arg(long, value_enum)]
        family: SeqFamily,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true, required_unless_present = "symbolic")]
        z: Option<i64>,
        /// Print polynomials in z instead of values.
        #[arg(long)]
        symbolic: bool,
    },
    /// Degree, indicial roots and reflection center of an operator file.
    Analyze {
        #[arg(long)]
        op: PathBuf,
        /// Also report the indicial roots at this z.
        #[arg(long, allow_hyphen_values = true)]
        z: Option<i64>,
    },
}

#[derive(Subcommand)]
enum Verify {
    /// The congruences for both Schröder families.
    Theorem1(GridArgs),
    /// The r = 0 case and the Delannoy congruences behind it.
    Lemma32(GridArgs),
    /// Closed form of the telescoped sums and their divisibility.
    Divisibility(DivisibilityArgs),
    /// Certificate reconstructions against direct sums.
    Paths(GridArgs),
}

#[derive(Args)]
struct GridArgs {
    /// Primes strictly below this bound.
    #[arg(long, default_value_t = 100)]
    pmax: u64,
    #[arg(long, default_value_t = 4)]
    rmax: u32,
    #[arg(long, default_value_t = -10, allow_hyphen_values = true)]
    zmin: i64,
    #[arg(long, default_value_t = 10, allow_hyphen_values = true)]
    zmax: i64,
    #[arg(long, value_enum, default_value = "both", allow_hyphen_values = true)]
    epsilon: SignChoice,
    /// Write the full report to this file.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct DivisibilityArgs {
    #[arg(long, default_value_t = 200)]
    nmax: usize,
    #[arg(long, default_value_t = 6)]
    smax: u32,
    #[arg(long, default_value_t = -10, allow_hyphen_values = true)]
    zmin: i64,
    #[arg(long, default_value_t = 10, allow_hyphen_values = true)]
    zmax: i64,
    #[arg(long, value_enum, default_value = "both", allow_hyphen_values = true)]
    epsilon: SignChoice,
    /// Largest n for the identity in Z[z].
    #[arg(long, default_value_t = 20)]
    symbolic_nmax: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SignChoice {
    #[value(name = "1")]
    Plus,
    #[value(name = "-1")]
    Minus,
    Both,
}

impl SignChoice {
    fn epsilons(self) -> Vec<Epsilon> {
        match self {
            SignChoice::Plus => vec![Epsilon::Plus],
            SignChoice::Minus => vec![Epsilon::Minus],
            SignChoice::Both => Epsilon::BOTH.to_vec(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SeqFamily {
    Large,
    Little,
    Delannoy,
}

fn parse_sign(s: &str) -> Result<Epsilon, String> {
    let v: i64 = s.parse().map_err(|_| format!("expected 1 or -1, got {s:?}"))?;
    Epsilon::try_from(v).map_err(|e| e.to_string())
}

fn z_values(zmin: i64, zmax: i64) -> anyhow::Result<Vec<i64>> {
    if zmin > zmax {
        bail!("--zmin {zmin} exceeds --zmax {zmax}");
    }
    Ok((zmin..=zmax).collect())
}

impl GridArgs {
    fn grid(&self) -> anyhow::Result<GridSpec> {
        z_values(self.zmin, self.zmax)?;
        Ok(GridSpec::new(self.pmax, self.rmax, self.zmin, self.zmax, self.epsilon.epsilons()))
    }
}

fn write_report(path: Option<&Path>, report: &impl serde::Serialize) -> anyhow::Result<()> {
    if let Some(path) = path {
        let text = serde_json::to_string_pretty(report)?;
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

/// `Ok(true)` on success, `Ok(false)` on a counterexample, `Err` on bad input.
fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Verify { what } => run_verify(what),
        Command::Reduce { r, epsilon, z } => {
            let cert = schroder_certificate(r, epsilon)?;
            let cert = match z {
                Some(z) => cert.specialize(z)?,
                None => cert,
            };
            let doc = CertificateJson::from_certificate(&cert, Some(&schroder_operator(epsilon)));
            println!("{}", doc.to_json_string());
            Ok(true)
        }
        Command::Certify { input, pmax, zmin, zmax } => certify(&input, pmax, z_values(zmin, zmax)?),
        Command::Seq { family, n, z, symbolic } => {
            print_sequence(family, n, z, symbolic);
            Ok(true)
        }
        Command::Analyze { op, z } => analyze(&op, z),
    }
}

fn run_verify(what: Verify) -> anyhow::Result<bool> {
    match what {
        Verify::Theorem1(args) => {
            let report = verify_theorem1(&args.grid()?)?;
            write_report(args.json.as_deref(), &report)?;
            println!(
                "{}: {} residues checked, {} failures, {} points skipped",
                verdict(report.passed()),
                report.checked,
                report.failures,
                report.skipped
            );
            for rec in report.records.iter().filter(|r| !r.pass).take(10) {
                println!("  counterexample: {rec:?}");
            }
            Ok(report.passed())
        }
        Verify::Lemma32(args) => {
            let grid = args.grid()?;
            let report = verify_lemma32(&grid.primes, &grid.epsilons, &grid.z_values)?;
            write_report(args.json.as_deref(), &report)?;
            println!(
                "{}: {} points checked, {} failures, {} points skipped",
                verdict(report.passed()),
                report.checked,
                report.failures,
                report.skipped
            );
            for rec in report.records.iter().filter(|r| !r.pass).take(10) {
                println!("  counterexample: {rec:?}");
            }
            Ok(report.passed())
        }
        Verify::Divisibility(args) => {
            let zs = z_values(args.zmin, args.zmax)?;
            let numeric = verify_divisibility(args.nmax, args.smax, &args.epsilon.epsilons(), &zs, args.seed)?;
            let symbolic = verify_closed_form_symbolic(args.symbolic_nmax, args.smax);
            write_report(args.json.as_deref(), &json!({ "numeric": numeric, "symbolic": symbolic }))?;
            let pass = numeric.passed() && symbolic.passed();
            println!(
                "{}: {} numeric, {} random-y, {} symbolic cases, {} failures",
                verdict(pass),
                numeric.checked,
                numeric.random_checked,
                symbolic.checked,
                numeric.failures.len() + symbolic.failures.len()
            );
            for f in numeric.failures.iter().chain(&symbolic.failures).take(10) {
                println!("  {f}");
            }
            Ok(pass)
        }
        Verify::Paths(args) => {
            let report = verify_two_paths(&args.grid()?)?;
            write_report(args.json.as_deref(), &report)?;
            println!(
                "{}: {} points compared, {} failures, {} internal errors, {} points skipped",
                verdict(report.passed()),
                report.checked,
                report.failures,
                report.internal_errors.len(),
                report.skipped
            );
            for e in report.internal_errors.iter().take(10) {
                println!("  {e}");
            }
            Ok(report.passed())
        }
    }
}

fn certify(input: &Path, pmax: u64, zs: Vec<i64>) -> anyhow::Result<bool> {
    let text = fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let (cert, stored) = CertificateJson::from_json_str(&text)?.to_certificate()?;
    let eps = cert.epsilon;
    let op = match (stored, eps) {
        (Some(op), _) => op,
        (None, Some(e)) if cert.family == "schroder" => schroder_operator(e),
        _ => bail!("certificate carries no operator"),
    };
    let check_op = match cert.z {
        Some(z) => op.at_z(&int(z)),
        None => op.clone(),
    };
    let identity = verify_certificate(&cert, &check_op);
    println!("identity: {}", verdict(identity));
    if !identity {
        return Ok(false);
    }

    let Some(eps) = eps.filter(|&e| op == schroder_operator(e)) else {
        println!("sums: skipped (operator is not the Schröder operator)");
        return Ok(true);
    };
    let zs = match cert.z {
        Some(z) => vec![z],
        None => zs,
    };
    let primes = odd_primes_below(pmax);
    let mut checked = 0;
    let mut failures = Vec::new();
    for &z in &zs {
        for family in SchroderFamily::BOTH {
            let table = schroder_table(family, z, pmax as usize + 2);
            for &p in primes.iter().filter(|&&p| hypothesis_holds(p, z)) {
                checked += 1;
                match evaluate_certificate(&cert, &op, family, &table, eps, z, p) {
                    Ok(ev) if ev.agrees() => {}
                    Ok(ev) => failures.push(format!("p = {p}, z = {z}: {ev:?}")),
                    Err(e) => failures.push(format!("p = {p}, z = {z}, {}: {e}", family.name())),
                }
            }
        }
    }
    println!(
        "sums: {} ({checked} points, {} failures)",
        verdict(failures.is_empty()),
        failures.len()
    );
    for f in failures.iter().take(10) {
        println!("  {f}");
    }
    Ok(failures.is_empty())
}

fn print_sequence(family: SeqFamily, n: usize, z: Option<i64>, symbolic: bool) {
    if symbolic {
        for i in 0..=n {
            let f = match family {
                SeqFamily::Large => large_schroder(i),
                SeqFamily::Little => little_schroder(i),
                SeqFamily::Delannoy => central_delannoy(i),
            };
            println!("{}", render_zpoly(&f, "z"));
        }
        return;
    }
    let z = z.expect("clap requires --z without --symbolic");
    let values = match family {
        SeqFamily::Large => schroder_table(SchroderFamily::Large, z, n.max(1)),
        SeqFamily::Little => schroder_table(SchroderFamily::Little, z, n.max(1)),
        SeqFamily::Delannoy => delannoy_table(z, n.max(1)),
    };
    for v in &values[..=n] {
        println!("{v}");
    }
}

fn analyze(path: &Path, z: Option<i64>) -> anyhow::Result<bool> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec: OperatorSpec = serde_json::from_str(&text).context("operator JSON")?;
    let op = spec.to_op()?;
    let deg = op_degree(&op);
    let roots = |r: partible::Result<std::collections::BTreeSet<u64>>| match r {
        Ok(set) => json!(set),
        Err(e) => json!(e.to_string()),
    };
    let mut out = json!({
        "order": op.order(),
        "degree": deg.degree,
        "b": deg.b.iter().map(render_kpoly).collect::<Vec<_>>(),
        "indicial_polynomial": render_kpoly(&indicial_polynomial(&deg)),
        "degenerate_roots": roots(op_degenerate_roots(&op)),
    });
    match op_find_gamma(&op) {
        Ok(info) => {
            out["power_partible"] = json!(true);
            out["gamma"] = json!(info.gamma.to_string());
        }
        Err(e) => {
            out["power_partible"] = json!(false);
            out["reason"] = json!(e.to_string());
        }
    }
    if let Some(z) = z {
        out["z"] = json!(z);
        out["degenerate_roots_at_z"] = roots(op_degenerate_roots_at(&op, &int(z)));
    }
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

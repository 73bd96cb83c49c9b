//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use partible::harness::{
    verify_closed_form_symbolic, verify_divisibility, verify_lemma32, verify_theorem1,
    verify_two_paths, weighted_sum, GridSpec,
};
use partible::modular::odd_primes_below;
use partible::poly::{int, rat};
use partible::reduction::{schroder_certificate, verify_certificate};
use partible::sequences::{eta, eta_at, large_schroder_at, little_schroder_at, schroder_operator, SchroderFamily};
use partible::shift::{op_degenerate_roots, op_degenerate_roots_at, op_degree, op_find_gamma};
use partible::{Epsilon, Error};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn z_range() -> Vec<i64> {
    (-10..=10).collect()
}

fn congruence_grid() -> Outcome {
    let report = verify_theorem1(&GridSpec::desk()).map_err(|e| e.to_string())?;
    if report.passed() && report.checked > 0 {
        Ok(format!("{} residues checked, {} points skipped", report.checked, report.skipped))
    } else {
        let bad = report.records.iter().find(|r| !r.pass);
        Err(format!("{} failures, first {bad:?}", report.failures))
    }
}

fn z_one_slice() -> Outcome {
    let grid = GridSpec::new(200, 5, 1, 1, Epsilon::BOTH.to_vec());
    let report = verify_theorem1(&grid).map_err(|e| e.to_string())?;
    // z = 1: gcd(p, 2) = 1 for every odd prime, so nothing is skipped
    if report.passed() && report.skipped == 0 && report.checked == 2 * 2 * 6 * grid.primes.len() {
        Ok(format!("{} residues checked", report.checked))
    } else {
        Err(format!("{} failures, {} skipped", report.failures, report.skipped))
    }
}

fn certificates() -> Outcome {
    for eps in Epsilon::BOTH {
        let op = schroder_operator(eps);
        for r in 0..=8 {
            let cert = schroder_certificate(r, eps).map_err(|e| format!("r = {r}: {e}"))?;
            if !verify_certificate(&cert, &op) {
                return Err(format!("r = {r}, eps = {}: identity fails", eps.value()));
            }
            let unit_residual = cert.residual.len() == 1
                && cert.residual[0].0 == 1
                && cert.residual[0].1.pow == 0
                && cert.residual[0].1.num == partible::ZPoly::constant(int(1));
            if !unit_residual {
                return Err(format!("r = {r}: residual {:?}", cert.residual));
            }
            // denominators eta^u with eta not dividing the numerator
            let eta = eta(eps);
            let pure = cert.pivot.poly == eta
                && cert.combo.iter().all(|t| {
                    t.coeff.num.is_integral()
                        && (t.coeff.pow == 0 || t.coeff.num.exact_div(&eta).is_none())
                });
            if !pure {
                return Err(format!("r = {r}: denominator is not a power of eta"));
            }
        }
    }
    Ok("r = 0..8, both signs".into())
}

fn closed_form() -> Outcome {
    let sym = verify_closed_form_symbolic(20, 4);
    if !sym.passed() {
        return Err(sym.failures[0].clone());
    }
    let num = verify_divisibility(200, 4, &Epsilon::BOTH, &z_range(), 0x5eed)
        .map_err(|e| e.to_string())?;
    if !num.passed() {
        return Err(num.failures[0].clone());
    }
    Ok(format!(
        "{} symbolic, {} numeric, {} random-y cases",
        sym.checked, num.checked, num.random_checked
    ))
}

fn delannoy() -> Outcome {
    let report = verify_lemma32(&odd_primes_below(100), &Epsilon::BOTH, &z_range())
        .map_err(|e| e.to_string())?;
    if report.passed() && report.checked > 0 {
        Ok(format!("{} points, {} skipped", report.checked, report.skipped))
    } else {
        Err(format!("{:?}", report.records.iter().find(|r| !r.pass)))
    }
}

fn operator_analysis() -> Outcome {
    for eps in Epsilon::BOTH {
        let op = schroder_operator(eps);
        let d = op_degree(&op).degree;
        if d != Some(1) {
            return Err(format!("degree {d:?}"));
        }
        let info = op_find_gamma(&op).map_err(|e| e.to_string())?;
        if info.gamma != rat(-1, 2) || !info.nondegenerate {
            return Err(format!("gamma {}", info.gamma));
        }
        if !op_degenerate_roots(&op).map_err(|e| e.to_string())?.is_empty() {
            return Err("generic operator is degenerate".into());
        }
        for z in z_range() {
            let roots = op_degenerate_roots_at(&op, &int(z));
            match (eta_at(eps, z) == 0, roots) {
                (false, Ok(r)) if r.is_empty() => {}
                (true, Err(Error::IndicialIdenticallyZero)) => {}
                (true, Ok(r)) if !r.is_empty() => {}
                (_, other) => return Err(format!("eps = {}, z = {z}: {other:?}", eps.value())),
            }
        }
    }
    Ok("d = 1, gamma = -1/2, eta = 0 flagged".into())
}

fn two_paths() -> Outcome {
    let report = verify_two_paths(&GridSpec::desk()).map_err(|e| e.to_string())?;
    if report.passed() && report.records.iter().all(|r| r.exact_match) {
        Ok(format!("{} points agree", report.checked))
    } else {
        Err(format!(
            "{} failures, errors {:?}",
            report.failures,
            report.internal_errors.first()
        ))
    }
}

fn spot_values() -> Outcome {
    let one = BigInt::from(1);
    let brute = |little: bool, m: u32| -> BigInt {
        (0..5usize)
            .map(|k| {
                let f = if little { little_schroder_at(k, &one) } else { large_schroder_at(k, &one) };
                BigInt::from(2 * k + 1).pow(m) * f
            })
            .sum()
    };
    let cases = [
        (SchroderFamily::Large, 0, 1001, brute(false, 1)),
        (SchroderFamily::Large, 1, 73961, brute(false, 3)),
        (SchroderFamily::Little, 0, 500, brute(true, 1)),
    ];
    for (family, r, want, oracle) in cases {
        let got = weighted_sum(family, r, Epsilon::Plus, 1, 5);
        if got != BigInt::from(want) || oracle != got {
            return Err(format!("{} r = {r}: {got} vs {want} (oracle {oracle})", family.name()));
        }
    }
    Ok("1001, 73961, 500".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("congruence grid p < 100, r <= 4, |z| <= 10", congruence_grid),
        ("z = 1 slice p < 200, r <= 5", z_one_slice),
        ("reduction certificates r <= 8", certificates),
        ("closed form and divisibility", closed_form),
        ("Delannoy congruences and identity", delannoy),
        ("operator analysis", operator_analysis),
        ("certificate path equals direct sums", two_paths),
        ("spot values", spot_values),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[{}] PASS {name}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[{}] FAIL {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

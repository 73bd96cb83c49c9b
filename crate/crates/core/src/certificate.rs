//! JSON form of reduction certificates.
//!
//! ```json
//! {"m": 5, "gamma": "-1/2", "unit": "2", "pivot": {"name": "eta", "definition": "-z"},
//!  "residual": [[1, "1"]], "combo": [[4, "1", "eta^1"], [2, "eta-8", "eta^2"]],
//!  "basis": "schroder", ...}
//! ```
//!
//! When the pivot is linear in `z`, numerators are written in the pivot's own
//! name so that denominators and numerators read in the same variable.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::basis::{build_basis, BasisFactor, BasisFamily, PowerFamily, SchroderBasis, SymmetricBasisPoly};
use crate::error::{Error, Result};
use crate::poly::{int, Rational, ZPoly};
use crate::reduction::{CombTerm, Pivot, ReductionCertificate, ZFrac};
use crate::shift::{Epsilon, OperatorSpec, ShiftOp};
use crate::text::{parse_rational, parse_zpoly_with, render_zpoly};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PivotJson {
    pub name: String,
    /// The pivot as a polynomial in `z`.
    pub definition: String,
}

/// `[index, numerator]` or `[index, numerator, "name^pow"]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Plain(usize, String),
    Over(usize, String, String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisEntry {
    pub degree: usize,
    pub alpha: String,
    pub linear: usize,
    #[serde(default)]
    pub quadratic: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BasisJson {
    Named(String),
    Explicit(Vec<BasisEntry>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub m: u32,
    pub gamma: String,
    #[serde(default = "default_unit")]
    pub unit: String,
    pub order: usize,
    pub degree: i64,
    pub min_basis_degree: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Epsilon>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<i64>,
    pub pivot: PivotJson,
    /// Variable the numerators are written in: the pivot name or `z`.
    pub numerator_variable: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<OperatorSpec>,
    pub basis: BasisJson,
    pub residual: Vec<Entry>,
    pub combo: Vec<Entry>,
}

fn default_unit() -> String {
    "1".into()
}

/// `(a, b)` with `pivot = a*z + b`, if the pivot is linear.
fn linear_parts(pivot: &ZPoly) -> Option<(Rational, Rational)> {
    (pivot.degree() == Some(1)).then(|| (pivot.coeff(1), pivot.coeff(0)))
}

fn render_numerator(num: &ZPoly, pivot: &Pivot, var: &str) -> String {
    match linear_parts(&pivot.poly) {
        Some((a, b)) if var != "z" => {
            // z = (pivot - b) / a
            let sub = ZPoly::linear(-(b / &a), a.recip());
            render_zpoly(&num.compose(&sub), var)
        }
        _ => render_zpoly(num, "z"),
    }
}

fn entry(index: usize, c: &ZFrac, pivot: &Pivot, var: &str) -> Entry {
    let num = render_numerator(&c.num, pivot, var);
    if c.pow == 0 {
        Entry::Plain(index, num)
    } else {
        Entry::Over(index, num, format!("{}^{}", pivot.name, c.pow))
    }
}

fn basis_entries(cert: &ReductionCertificate) -> Vec<BasisEntry> {
    cert.combo
        .iter()
        .map(|t| BasisEntry {
            degree: t.degree,
            alpha: t.basis.alpha.to_string(),
            linear: t.basis.linear_factors,
            quadratic: t.basis.quadratic_factors.iter().map(|q| q.to_string()).collect(),
        })
        .collect()
}

impl CertificateJson {
    pub fn from_certificate(cert: &ReductionCertificate, op: Option<&ShiftOp>) -> Self {
        let var = if linear_parts(&cert.pivot.poly).is_some() {
            cert.pivot.name.clone()
        } else {
            "z".to_string()
        };
        let basis = match cert.family.as_str() {
            "schroder" | "power" => BasisJson::Named(cert.family.clone()),
            _ => BasisJson::Explicit(basis_entries(cert)),
        };
        CertificateJson {
            m: cert.m,
            gamma: cert.gamma.to_string(),
            unit: cert.unit.to_string(),
            order: cert.order,
            degree: cert.degree,
            min_basis_degree: cert.min_basis_degree,
            epsilon: cert.epsilon,
            z: cert.z,
            pivot: PivotJson {
                name: cert.pivot.name.clone(),
                definition: render_zpoly(&cert.pivot.poly, "z"),
            },
            numerator_variable: var.clone(),
            operator: op.map(OperatorSpec::from_op),
            basis,
            residual: cert
                .residual
                .iter()
                .map(|(i, c)| entry(*i, c, &cert.pivot, &var))
                .collect(),
            combo: cert
                .combo
                .iter()
                .map(|t| entry(t.degree, &t.coeff, &cert.pivot, &var))
                .collect(),
        }
    }

    /// Rebuilds the certificate and the stored operator, if any.
    pub fn to_certificate(&self) -> Result<(ReductionCertificate, Option<ShiftOp>)> {
        let gamma = parse_rational(&self.gamma)?;
        let unit = parse_rational(&self.unit)?;
        let pivot_poly = parse_zpoly_with(&self.pivot.definition, &[])?;
        if pivot_poly.is_zero() {
            return Err(Error::InvalidInput("pivot must be nonzero".into()));
        }
        let pivot = Pivot {
            name: self.pivot.name.clone(),
            poly: pivot_poly,
        };
        let bindings: Vec<(&str, ZPoly)> = if self.numerator_variable == "z" {
            Vec::new()
        } else if self.numerator_variable == pivot.name {
            vec![(pivot.name.as_str(), pivot.poly.clone())]
        } else {
            return Err(Error::InvalidInput(format!(
                "unknown numerator variable {:?}",
                self.numerator_variable
            )));
        };
        let frac = |e: &Entry| -> Result<(usize, ZFrac)> {
            let (i, num, den) = match e {
                Entry::Plain(i, n) => (*i, n, None),
                Entry::Over(i, n, d) => (*i, n, Some(d)),
            };
            let num = parse_zpoly_with(num, &bindings)?;
            let pow = match den {
                None => 0,
                Some(d) => parse_pivot_power(d, &pivot.name)?,
            };
            Ok((i, ZFrac { num, pow }))
        };
        let residual = self.residual.iter().map(frac).collect::<Result<Vec<_>>>()?;
        let coeffs = self.combo.iter().map(frac).collect::<Result<Vec<_>>>()?;

        let lookup = basis_lookup(&self.basis, &gamma, self.order)?;
        let combo = coeffs
            .into_iter()
            .map(|(degree, coeff)| {
                let basis = lookup(degree).ok_or_else(|| {
                    Error::InvalidInput(format!("no basis polynomial of degree {degree}"))
                })?;
                Ok(CombTerm { degree, coeff, basis })
            })
            .collect::<Result<Vec<_>>>()?;
        let family = match &self.basis {
            BasisJson::Named(n) => n.clone(),
            BasisJson::Explicit(_) => "explicit".into(),
        };
        let op = self.operator.as_ref().map(OperatorSpec::to_op).transpose()?;
        let cert = ReductionCertificate {
            m: self.m,
            gamma,
            unit,
            order: self.order,
            degree: self.degree,
            min_basis_degree: self.min_basis_degree,
            pivot,
            residual,
            combo,
            family,
            epsilon: self.epsilon,
            z: self.z,
        };
        Ok((cert, op))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json_str(src: &str) -> Result<Self> {
        serde_json::from_str(src).map_err(|e| Error::InvalidInput(format!("certificate JSON: {e}")))
    }
}

type Lookup = Box<dyn Fn(usize) -> Option<SymmetricBasisPoly>>;

fn basis_lookup(basis: &BasisJson, gamma: &Rational, order: usize) -> Result<Lookup> {
    match basis {
        BasisJson::Named(n) if n == "schroder" => {
            if *gamma != SchroderBasis::gamma() || order != SchroderBasis::ORDER {
                return Err(Error::InvalidInput(
                    "schroder basis needs center -1/2 and order 2".into(),
                ));
            }
            Ok(Box::new(|d| SchroderBasis.basis(d)))
        }
        BasisJson::Named(n) if n == "power" => {
            let fam = PowerFamily {
                gamma: gamma.clone(),
                order,
            };
            Ok(Box::new(move |d| fam.basis(d)))
        }
        BasisJson::Named(n) => Err(Error::InvalidInput(format!("unknown basis family {n:?}"))),
        BasisJson::Explicit(entries) => {
            let polys = entries
                .iter()
                .map(|e| {
                    let alpha = parse_rational(&e.alpha)?;
                    if alpha == int(0) {
                        return Err(Error::InvalidInput("basis scale must be nonzero".into()));
                    }
                    let mut factors = vec![BasisFactor::Linear; e.linear];
                    for q in &e.quadratic {
                        factors.push(BasisFactor::Quadratic(parse_rational(q)?));
                    }
                    let b = build_basis(gamma, order, alpha, &factors);
                    if b.degree() != e.degree {
                        return Err(Error::InvalidInput(format!(
                            "basis entry declares degree {} but has degree {}",
                            e.degree,
                            b.degree()
                        )));
                    }
                    Ok(b)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Box::new(move |d| polys.iter().find(|b| b.degree() == d).cloned()))
        }
    }
}

/// `"eta^3"`, `"eta"` or `"1"`.
fn parse_pivot_power(src: &str, name: &str) -> Result<u32> {
    let s = src.trim();
    if s == "1" {
        return Ok(0);
    }
    if s == name {
        return Ok(1);
    }
    s.strip_prefix(name)
        .and_then(|rest| rest.trim_start().strip_prefix('^'))
        .and_then(|e| e.trim().parse().ok())
        .ok_or_else(|| Error::Parse {
            pos: 0,
            msg: format!("expected {name}^N, got {s:?}"),
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;
    use crate::reduction::{reduce_power, schroder_certificate, verify_certificate};
    use crate::sequences::schroder_operator;
    use crate::shift::op_find_gamma;

    #[test]
    fn m5_json_shape() {
        let cert = schroder_certificate(2, Epsilon::Plus).unwrap();
        let doc = CertificateJson::from_certificate(&cert, Some(&schroder_operator(Epsilon::Plus)));
        let v: serde_json::Value = serde_json::from_str(&doc.to_json_string()).unwrap();
        assert_eq!(v["m"], 5);
        assert_eq!(v["gamma"], "-1/2");
        assert_eq!(v["basis"], "schroder");
        assert_eq!(v["pivot"]["name"], "eta");
        assert_eq!(v["pivot"]["definition"], "-z");
        assert_eq!(v["residual"], serde_json::json!([[1, "1"]]));
        assert_eq!(v["combo"], serde_json::json!([[4, "1", "eta^1"], [2, "eta-8", "eta^2"]]));
    }

    #[test]
    fn roundtrip_schroder() {
        for eps in Epsilon::BOTH {
            let op = schroder_operator(eps);
            for r in 0..=4 {
                let cert = schroder_certificate(r, eps).unwrap();
                let doc = CertificateJson::from_certificate(&cert, Some(&op));
                let back = CertificateJson::from_json_str(&doc.to_json_string()).unwrap();
                let (cert2, op2) = back.to_certificate().unwrap();
                assert_eq!(cert2, cert);
                assert_eq!(op2.unwrap(), op);
            }
        }
    }

    #[test]
    fn roundtrip_specialized_and_power() {
        let cert = schroder_certificate(3, Epsilon::Minus).unwrap().specialize(2).unwrap();
        let doc = CertificateJson::from_certificate(&cert, None);
        assert_eq!(doc.numerator_variable, "z");
        let (back, op) = doc.to_certificate().unwrap();
        assert_eq!(back, cert);
        assert!(op.is_none());

        let op = schroder_operator(Epsilon::Plus);
        let info = op_find_gamma(&op).unwrap();
        let fam = PowerFamily { gamma: info.gamma.clone(), order: 2 };
        let cert = reduce_power(&op, &info, &fam, 5).unwrap();
        let doc = CertificateJson::from_certificate(&cert, Some(&op));
        let (back, _) = doc.to_certificate().unwrap();
        assert_eq!(back, cert);
        assert!(verify_certificate(&back, &op));
    }

    #[test]
    fn explicit_basis_roundtrip() {
        let mut cert = schroder_certificate(2, Epsilon::Plus).unwrap();
        cert.family = "explicit".into();
        let doc = CertificateJson::from_certificate(&cert, None);
        assert!(matches!(doc.basis, BasisJson::Explicit(_)));
        let (back, _) = doc.to_certificate().unwrap();
        assert_eq!(back, cert);
    }

    #[test]
    fn edited_json_fails_verification() {
        let op = schroder_operator(Epsilon::Plus);
        let cert = schroder_certificate(2, Epsilon::Plus).unwrap();
        let mut doc = CertificateJson::from_certificate(&cert, Some(&op));
        doc.combo[1] = Entry::Over(2, "eta-9".into(), "eta^2".into());
        let (bad, _) = doc.to_certificate().unwrap();
        assert!(!verify_certificate(&bad, &op));
    }

    #[test]
    fn malformed_inputs() {
        assert_eq!(parse_pivot_power("eta^3", "eta"), Ok(3));
        assert_eq!(parse_pivot_power("eta", "eta"), Ok(1));
        assert!(parse_pivot_power("z^3", "eta").is_err());
        let cert = schroder_certificate(1, Epsilon::Plus).unwrap();
        let mut doc = CertificateJson::from_certificate(&cert, None);
        doc.gamma = "1/3".into();
        assert!(doc.to_certificate().is_err());
        let mut doc = CertificateJson::from_certificate(&cert, None);
        doc.numerator_variable = "w".into();
        assert!(doc.to_certificate().is_err());
        assert!(CertificateJson::from_json_str("{").is_err());
        assert_eq!(rat(1, 2).to_string(), "1/2");
    }
}

//! Large and little Schröder polynomials and central Delannoy polynomials.
//!
//! Definitions:
//!
//! - `S_n(z) = sum_{k=0}^{n} C(n,k) C(n+k,k) z^k / (k+1)`
//! - `s_n(z) = sum_{k=1}^{n} C(n,k) C(n,k-1) z^{k-1} (z+1)^{n-k} / n`, with `s_0 = 0`
//! - `D_n(z) = sum_{k=0}^{n} C(n,k) C(n+k,k) z^k`
//!
//! Note the little Schröder convention: `s_0 = 0` (an empty sum), not 1 as in
//! some tables. `(z+1) s_n(z) = S_n(z)` then holds for `n >= 1` and both
//! families share the annihilator returned by [`schroder_operator`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{int, k, kconst, kint, rat, z, Rational, ZPoly};
use crate::shift::{Epsilon, ShiftOp};

fn binomial(n: usize, r: usize) -> BigInt {
    if r > n {
        return BigInt::zero();
    }
    let r = r.min(n - r);
    (0..r).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// `1 + 2z`
fn w() -> ZPoly {
    z().scale(&int(2)) + &ZPoly::one()
}

/// `eta = (1 - eps(1+2z)) / 2`; equals `-z` for `eps = 1` and `z + 1` for `eps = -1`.
pub fn eta(eps: Epsilon) -> ZPoly {
    (ZPoly::one() - &w().scale(&int(eps.value()))).scale(&rat(1, 2))
}

/// `eta` at an integer `z`.
pub fn eta_at(eps: Epsilon, z0: i64) -> i64 {
    match eps {
        Epsilon::Plus => -z0,
        Epsilon::Minus => z0 + 1,
    }
}

/// `(k+3) S^2 - eps(2k+3)(1+2z) S + k`, annihilating `eps^k S_k(z)` and `eps^k s_k(z)`.
pub fn schroder_operator(eps: Epsilon) -> ShiftOp {
    let a0 = k();
    let a1 = -((k() * &kint(2) + kint(3)) * &kconst(w().scale(&int(eps.value()))));
    let a2 = k() + kint(3);
    ShiftOp::new(vec![a0, a1, a2])
        .expect("nonzero leading coefficient")
        .with_epsilon(eps)
}

/// `(k+2) S^2 - (2k+3)(1+2z) S + (k+1)`, annihilating `D_k(z)`.
pub fn delannoy_operator() -> ShiftOp {
    let a0 = k() + kint(1);
    let a1 = -((k() * &kint(2) + kint(3)) * &kconst(w()));
    let a2 = k() + kint(2);
    ShiftOp::new(vec![a0, a1, a2]).expect("nonzero leading coefficient")
}

fn zpoly_int(cs: Vec<BigInt>) -> ZPoly {
    ZPoly::from_coeffs(cs.into_iter().map(Rational::from_integer).collect())
}

/// `S_n(z)` as a polynomial.
pub fn large_schroder(n: usize) -> ZPoly {
    zpoly_int(
        (0..=n)
            .map(|j| binomial(n, j) * binomial(n + j, j) / (j + 1))
            .collect(),
    )
}

/// `s_n(z)` as a polynomial.
pub fn little_schroder(n: usize) -> ZPoly {
    let z_plus_one = z() + &ZPoly::one();
    (1..=n).fold(ZPoly::zero(), |acc, j| {
        let narayana = binomial(n, j) * binomial(n, j - 1) / n;
        let term = z().pow(j as u32 - 1) * &z_plus_one.pow((n - j) as u32);
        acc + &term.scale(&Rational::from_integer(narayana))
    })
}

/// `D_n(z)` as a polynomial.
pub fn central_delannoy(n: usize) -> ZPoly {
    zpoly_int((0..=n).map(|j| binomial(n, j) * binomial(n + j, j)).collect())
}

/// `S_n(z0)` by the defining sum.
pub fn large_schroder_at(n: usize, z0: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    let mut zp = BigInt::one();
    for j in 0..=n {
        acc += binomial(n, j) * binomial(n + j, j) / (j + 1) * &zp;
        zp *= z0;
    }
    acc
}

/// `s_n(z0)` by the defining sum.
pub fn little_schroder_at(n: usize, z0: &BigInt) -> BigInt {
    let z1: BigInt = z0 + 1;
    (1..=n).fold(BigInt::zero(), |acc, j| {
        let narayana = binomial(n, j) * binomial(n, j - 1) / n;
        acc + narayana * num_traits::pow(z0.clone(), j - 1) * num_traits::pow(z1.clone(), n - j)
    })
}

/// `D_n(z0)` by the defining sum.
pub fn central_delannoy_at(n: usize, z0: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    let mut zp = BigInt::one();
    for j in 0..=n {
        acc += binomial(n, j) * binomial(n + j, j) * &zp;
        zp *= z0;
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SchroderFamily {
    Large,
    Little,
}

impl SchroderFamily {
    pub const BOTH: [SchroderFamily; 2] = [SchroderFamily::Large, SchroderFamily::Little];

    pub fn name(self) -> &'static str {
        match self {
            SchroderFamily::Large => "large",
            SchroderFamily::Little => "little",
        }
    }
}

/// Terms `0..=n` of `S_k(z0)` or `s_k(z0)` via the three-term recurrence,
/// with exact integer division at every step.
pub fn schroder_table(family: SchroderFamily, z0: i64, n: usize) -> Vec<BigInt> {
    let w = BigInt::from(2 * z0 + 1);
    let mut out = Vec::with_capacity(n + 1);
    let (f0, f1) = match family {
        SchroderFamily::Large => (BigInt::one(), BigInt::from(z0 + 1)),
        SchroderFamily::Little => (BigInt::zero(), BigInt::one()),
    };
    out.push(f0);
    out.push(f1);
    for m in 1..n {
        // (m+2) F_{m+1} = (2m+1)(1+2z) F_m - (m-1) F_{m-1}
        let num = BigInt::from(2 * m + 1) * &w * &out[m] - BigInt::from(m - 1) * &out[m - 1];
        let (q, r) = num.div_rem(&BigInt::from(m + 2));
        debug_assert!(r.is_zero(), "inexact Schröder step at {m}");
        out.push(q);
    }
    out.truncate(n + 1);
    out
}

/// Terms `0..=n` of `D_k(z0)` via `(m+1) D_{m+1} = (2m+1)(1+2z) D_m - m D_{m-1}`.
pub fn delannoy_table(z0: i64, n: usize) -> Vec<BigInt> {
    let w = BigInt::from(2 * z0 + 1);
    let mut out = vec![BigInt::one(), w.clone()];
    for m in 1..n {
        let num = BigInt::from(2 * m + 1) * &w * &out[m] - BigInt::from(m) * &out[m - 1];
        let (q, r) = num.div_rem(&BigInt::from(m + 1));
        debug_assert!(r.is_zero(), "inexact Delannoy step at {m}");
        out.push(q);
    }
    out.truncate(n + 1);
    out
}

#[derive(Clone, Debug, PartialEq)]
pub enum ZValue {
    Symbolic,
    Int(i64),
}

impl ZValue {
    fn specialize(&self, f: ZPoly) -> ZPoly {
        match self {
            ZValue::Symbolic => f,
            ZValue::Int(z0) => ZPoly::constant(f.eval(&int(*z0))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    LargeSchroder,
    LittleSchroder,
    CentralDelannoy,
    /// Operator plus its first `order` terms.
    Custom { op: ShiftOp, initials: Vec<ZPoly> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SequenceSpec {
    pub family: Family,
    pub z: ZValue,
    pub epsilon: Epsilon,
}

impl SequenceSpec {
    /// Untwisted operator and initial values.
    fn operator_and_initials(&self) -> Result<(ShiftOp, Vec<ZPoly>)> {
        let (op, initials) = match &self.family {
            Family::LargeSchroder => (
                schroder_operator(Epsilon::Plus),
                vec![large_schroder(0), large_schroder(1)],
            ),
            Family::LittleSchroder => (
                schroder_operator(Epsilon::Plus),
                vec![little_schroder(0), little_schroder(1)],
            ),
            Family::CentralDelannoy => (
                delannoy_operator(),
                vec![central_delannoy(0), central_delannoy(1)],
            ),
            Family::Custom { op, initials } => {
                if initials.len() != op.order() {
                    return Err(Error::InvalidInput(format!(
                        "operator of order {} needs {} initial values, got {}",
                        op.order(),
                        op.order(),
                        initials.len()
                    )));
                }
                (op.clone(), initials.clone())
            }
        };
        let op = match &self.z {
            ZValue::Symbolic => op,
            ZValue::Int(z0) => op.at_z(&int(*z0)),
        };
        let initials = initials.into_iter().map(|f| self.z.specialize(f)).collect();
        Ok((op, initials))
    }
}

/// Terms `0..=n` of `eps^k F_k` generated by the (twisted) recurrence.
///
/// Each step divides by `a_J(m)`; a nonzero remainder, or a non-integral
/// result when all initial values are integral, is reported as
/// `NonIntegralStep`.
pub fn seq_by_recurrence(spec: &SequenceSpec, n: usize) -> Result<Vec<ZPoly>> {
    let (op, initials) = spec.operator_and_initials()?;
    let op = op.twist(spec.epsilon);
    let order = op.order();
    let integral = initials.iter().all(|f| f.is_integral());
    let mut out: Vec<ZPoly> = initials
        .into_iter()
        .enumerate()
        .map(|(i, f)| f.scale(&int(spec.epsilon.pow(i))))
        .collect();
    let mut m = 0;
    while out.len() < n + 1 {
        let at = int(m as i64);
        let rest = (0..order).fold(ZPoly::zero(), |acc, i| {
            acc + &(op.coeff(i).eval_k(&at) * &out[m + i])
        });
        let lead = op.coeff(order).eval_k(&at);
        let next = (-rest)
            .exact_div(&lead)
            .filter(|q| !integral || q.is_integral())
            .ok_or(Error::NonIntegralStep { index: m + order })?;
        out.push(next);
        m += 1;
    }
    out.truncate(n + 1);
    Ok(out)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct IdentityReport {
    pub checked: usize,
    pub violations: Vec<String>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `(z+1) s_n(z) = S_n(z)` and `2z(2n+1) S_n(z) = D_{n+1}(z) - D_{n-1}(z)`
/// for `1 <= n <= max_n`, symbolically or at integer points.
pub fn check_identities(max_n: usize, z_values: &[ZValue]) -> IdentityReport {
    let mut report = IdentityReport::default();
    for zv in z_values {
        let large: Vec<ZPoly> = (0..=max_n).map(|n| zv.specialize(large_schroder(n))).collect();
        let little: Vec<ZPoly> = (0..=max_n).map(|n| zv.specialize(little_schroder(n))).collect();
        let del: Vec<ZPoly> = (0..=max_n + 1)
            .map(|n| zv.specialize(central_delannoy(n)))
            .collect();
        let zz = zv.specialize(z());
        let one = ZPoly::one();
        for n in 1..=max_n {
            report.checked += 2;
            if (zz.clone() + &one) * &little[n] != large[n] {
                report
                    .violations
                    .push(format!("(z+1)s_n = S_n fails at n = {n}, z = {zv:?}"));
            }
            let lhs = zz.scale(&int(2 * (2 * n as i64 + 1))) * &large[n];
            if lhs != del[n + 1].clone() - &del[n - 1] {
                report
                    .violations
                    .push(format!("Delannoy difference identity fails at n = {n}, z = {zv:?}"));
            }
        }
    }
    report
}

//! Linear recurrence operators `L = sum a_i(k) S^i` with `S F(k) = F(k+1)`.
//!
//! Covers application to sequences, the adjoint `L*(x)(k) = sum a_i(k-i) x(k-i)`,
//! the degree through the transformed coefficients `b_l(k)`, the degeneracy
//! set `R_L`, detection of the reflection center `gamma`, and telescoping
//! certificates for `L*(x) F`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, NotPartibleReason, Result};
use crate::poly::{int, kconst, poly_shift_k, KPoly, Poly, Rational, Ring, ZPoly};
use crate::text::{parse_kpoly, render_kpoly};

/// Sign weight `eps` of an `eps^k`-twisted family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub enum Epsilon {
    Minus,
    Plus,
}

impl Epsilon {
    pub const BOTH: [Epsilon; 2] = [Epsilon::Minus, Epsilon::Plus];

    pub fn value(self) -> i64 {
        match self {
            Epsilon::Minus => -1,
            Epsilon::Plus => 1,
        }
    }

    /// `eps^n`
    pub fn pow(self, n: usize) -> i64 {
        if self == Epsilon::Minus && n % 2 == 1 {
            -1
        } else {
            1
        }
    }
}

impl TryFrom<i64> for Epsilon {
    type Error = Error;

    fn try_from(v: i64) -> Result<Self> {
        match v {
            1 => Ok(Epsilon::Plus),
            -1 => Ok(Epsilon::Minus),
            _ => Err(Error::InvalidInput(format!("epsilon must be 1 or -1, got {v}"))),
        }
    }
}

impl From<Epsilon> for i64 {
    fn from(e: Epsilon) -> i64 {
        e.value()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShiftOp {
    coeffs: Vec<KPoly>,
    epsilon: Option<Epsilon>,
}

impl ShiftOp {
    /// `coeffs[i]` multiplies `S^i`; the last one must be nonzero.
    pub fn new(coeffs: Vec<KPoly>) -> Result<Self> {
        match coeffs.last() {
            Some(a) if !a.is_zero() => Ok(ShiftOp {
                coeffs,
                epsilon: None,
            }),
            _ => Err(Error::ZeroLeadingCoefficient),
        }
    }

    pub fn with_epsilon(mut self, eps: Epsilon) -> Self {
        self.epsilon = Some(eps);
        self
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[KPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &KPoly {
        &self.coeffs[i]
    }

    pub fn epsilon(&self) -> Option<Epsilon> {
        self.epsilon
    }

    /// Annihilator of `eps^k F(k)` given an annihilator of `F`: `a_i -> eps^i a_i`.
    pub fn twist(&self, eps: Epsilon) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| a.scale(&ZPoly::from_i64(eps.pow(i))))
            .collect();
        ShiftOp {
            coeffs,
            epsilon: Some(eps),
        }
    }

    /// Specializes the parameter `z`.
    pub fn at_z(&self, z0: &Rational) -> Self {
        ShiftOp {
            coeffs: self.coeffs.iter().map(|a| a.at_z(z0)).collect(),
            epsilon: self.epsilon,
        }
    }
}

/// `sum_i a_i(n) F(n+i)`.
pub fn op_apply(op: &ShiftOp, seq: &[ZPoly], n: usize) -> Result<ZPoly> {
    let last = n + op.order();
    if last >= seq.len() {
        return Err(Error::IndexOutOfRange {
            index: last,
            len: seq.len(),
        });
    }
    let at = Rational::from_integer(BigInt::from(n));
    Ok(op
        .coeffs
        .iter()
        .zip(&seq[n..=last])
        .fold(ZPoly::zero(), |acc, (a, f)| acc + &(a.eval_k(&at) * f)))
}

/// `L*(x)(k) = sum_i a_i(k-i) x(k-i)`, expanded.
pub fn op_adjoint_apply(op: &ShiftOp, x: &KPoly) -> KPoly {
    op.coeffs
        .iter()
        .enumerate()
        .fold(KPoly::zero(), |acc, (i, a)| {
            let back = -int(i as i64);
            acc + &poly_shift_k(&(a * x), &back)
        })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OpDegree {
    /// `max_l (deg b_l - l)`; `None` only if every `b_l` vanishes.
    pub degree: Option<i64>,
    /// `b_0, ..., b_J`.
    pub b: Vec<KPoly>,
}

/// `b_l(k) = sum_{j=l}^{J} C(j,l) a_{J-j}(k+j-J)` and the degree they define.
pub fn op_degree(op: &ShiftOp) -> OpDegree {
    let order = op.order();
    let b: Vec<KPoly> = (0..=order)
        .map(|l| {
            (l..=order).fold(KPoly::zero(), |acc, j| {
                let shifted = poly_shift_k(&op.coeffs[order - j], &int(j as i64 - order as i64));
                acc + &shifted.scale(&ZPoly::constant(binomial(j, l)))
            })
        })
        .collect();
    let degree = b
        .iter()
        .enumerate()
        .filter_map(|(l, bl)| bl.degree().map(|d| d as i64 - l as i64))
        .max();
    OpDegree { degree, b }
}

fn binomial(n: usize, r: usize) -> Rational {
    let mut acc = Rational::one();
    for i in 0..r {
        acc = acc * int((n - i) as i64) / int(i as i64 + 1);
    }
    acc
}

/// Indicial polynomial `sum_l [k^{d+l}] b_l(k) * s^(l falling)` in the
/// variable `s`, coefficients in `Q[z]`.
pub fn indicial_polynomial(deg: &OpDegree) -> KPoly {
    let Some(d) = deg.degree else {
        return KPoly::zero();
    };
    deg.b
        .iter()
        .enumerate()
        .fold(KPoly::zero(), |acc, (l, bl)| {
            let e = d + l as i64;
            if e < 0 {
                return acc;
            }
            let lead = bl.coeff(e as usize);
            let falling = (0..l).fold(KPoly::one(), |f, i| {
                f * &(KPoly::var() - &KPoly::from_i64(i as i64))
            });
            acc + &falling.scale(&lead)
        })
}

/// Nonnegative integer `s` at which `poly` (in `s`, coefficients in `Q[z]`)
/// vanishes identically in `z`.
fn nonnegative_integer_roots(poly: &KPoly) -> Result<BTreeSet<u64>> {
    if poly.is_zero() {
        return Err(Error::IndicialIdenticallyZero);
    }
    let g = z_coefficient_polys(poly)
        .into_iter()
        .fold(ZPoly::zero(), |g, c| g.gcd(&c));
    Ok(g.rational_roots()
        .into_iter()
        .filter(|r| r.is_integer() && !r.is_negative())
        .map(|r| u64::try_from(r.to_integer()).expect("small root"))
        .collect())
}

/// Splits `sum_e c_e(z) v^e` into the univariate polynomials `[z^t] (...)` in `v`.
fn z_coefficient_polys(poly: &KPoly) -> Vec<ZPoly> {
    let zdeg = poly.z_degree().unwrap_or(0);
    (0..=zdeg)
        .map(|t| ZPoly::from_coeffs(poly.coeffs().iter().map(|c| c.coeff(t)).collect()))
        .filter(|p| !p.is_zero())
        .collect()
}

/// `R_L`, computed from the operator exactly as given. With a symbolic
/// parameter a root must hold identically in `z`. Empty means nondegenerate.
pub fn op_degenerate_roots(op: &ShiftOp) -> Result<BTreeSet<u64>> {
    nonnegative_integer_roots(&indicial_polynomial(&op_degree(op)))
}

/// `R_L` for the specialization `z = z0` of a symbolic operator, taking the
/// generic degree and substituting into the generic indicial polynomial.
/// A specialization that kills it is reported as `IndicialIdenticallyZero`.
pub fn op_degenerate_roots_at(op: &ShiftOp, z0: &Rational) -> Result<BTreeSet<u64>> {
    let generic = indicial_polynomial(&op_degree(op));
    nonnegative_integer_roots(&generic.at_z(z0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartibleInfo {
    pub gamma: Rational,
    pub degree: i64,
    pub order: usize,
    pub nondegenerate: bool,
}

/// Finds the rational `gamma` with `a_i(gamma+k) = (-1)^d a_{J-i}(gamma-k-J)`
/// for all `i <= J/2`, treating `gamma` as an unknown.
pub fn op_find_gamma(op: &ShiftOp) -> Result<PartibleInfo> {
    let deg = op_degree(op);
    let degree = deg
        .degree
        .ok_or(Error::NotPartible(NotPartibleReason::Degenerate))?;
    match nonnegative_integer_roots(&indicial_polynomial(&deg)) {
        Ok(roots) if roots.is_empty() => {}
        _ => return Err(Error::NotPartible(NotPartibleReason::Degenerate)),
    }
    let order = op.order();
    let sign = if degree.rem_euclid(2) == 0 { 1 } else { -1 };

    // Work in Q[z][gamma][k]: gamma is the middle variable.
    type GPoly = Poly<KPoly>;
    let gamma = KPoly::var();
    let gamma_plus_k = GPoly::linear(gamma.clone(), KPoly::one());
    let gamma_minus_k_minus_j = GPoly::linear(gamma - &KPoly::from_i64(order as i64), -KPoly::one());
    let embed = |a: &KPoly| -> GPoly { a.map_coeffs(|c| kconst(c.clone())) };

    let mut conditions = Vec::new();
    for i in 0..=order / 2 {
        let lhs = embed(&op.coeffs[i]).compose(&gamma_plus_k);
        let rhs = embed(&op.coeffs[order - i])
            .compose(&gamma_minus_k_minus_j)
            .scale(&KPoly::from_i64(sign));
        let diff = lhs - &rhs;
        for c in diff.coeffs() {
            conditions.extend(z_coefficient_polys(c));
        }
    }
    if conditions.is_empty() {
        return Err(Error::AmbiguousGamma);
    }
    let g = conditions.iter().fold(ZPoly::zero(), |g, c| g.gcd(c));
    let roots = g.rational_roots();
    match roots.as_slice() {
        [] => Err(Error::NotPartible(NotPartibleReason::NoRationalCenter)),
        [gamma] => Ok(PartibleInfo {
            gamma: gamma.clone(),
            degree,
            order,
            nondegenerate: true,
        }),
        _ => Err(Error::AmbiguousGamma),
    }
}

/// The `u_i(k)` with `L*(x)(k) F(k) = Delta(-sum_i u_i(k) F(k+i))`.
#[derive(Clone, Debug, PartialEq)]
pub struct TelescopeCertificate {
    pub x: KPoly,
    pub u: Vec<KPoly>,
}

/// `u_i(k) = sum_{j=1}^{J-i} a_{i+j}(k-j) x(k-j)`, `i = 0..J-1`.
pub fn op_telescope(op: &ShiftOp, x: &KPoly) -> TelescopeCertificate {
    let order = op.order();
    let u = (0..order)
        .map(|i| {
            (1..=order - i).fold(KPoly::zero(), |acc, j| {
                acc + &poly_shift_k(&(&op.coeffs[i + j] * x), &-int(j as i64))
            })
        })
        .collect();
    TelescopeCertificate { x: x.clone(), u }
}

impl TelescopeCertificate {
    /// `sum_i u_i(n) F(n+i)`.
    pub fn boundary(&self, seq: &[ZPoly], n: usize) -> Result<ZPoly> {
        let at = Rational::from_integer(BigInt::from(n));
        self.u.iter().enumerate().try_fold(ZPoly::zero(), |acc, (i, ui)| {
            let f = seq.get(n + i).ok_or(Error::IndexOutOfRange {
                index: n + i,
                len: seq.len(),
            })?;
            Ok(acc + &(ui.eval_k(&at) * f))
        })
    }
}

/// Checks `sum_{k<n} L*(x)(k) F(k) = B(0) - B(n)` for all `n <= max_n`, where
/// `B(n) = sum_i u_i(n) F(n+i)`. Every full window of `seq` must be
/// annihilated by `op`, and `seq` needs at least `max_n + J` terms.
pub fn verify_telescope(
    cert: &TelescopeCertificate,
    op: &ShiftOp,
    seq: &[ZPoly],
    max_n: usize,
) -> Result<bool> {
    let order = op.order();
    if seq.len() < max_n + order.max(1) {
        return Err(Error::IndexOutOfRange {
            index: max_n + order.max(1) - 1,
            len: seq.len(),
        });
    }
    for n in 0..seq.len().saturating_sub(order) {
        if !op_apply(op, seq, n)?.is_zero() {
            return Err(Error::NotAnnihilated { index: n });
        }
    }
    let lhs_poly = op_adjoint_apply(op, &cert.x);
    let start = cert.boundary(seq, 0)?;
    let mut partial = ZPoly::zero();
    for n in 0..=max_n {
        if start.clone() - &cert.boundary(seq, n)? != partial {
            return Ok(false);
        }
        if n < seq.len() {
            let at = Rational::from_integer(BigInt::from(n));
            partial = partial + &(lhs_poly.eval_k(&at) * &seq[n]);
        }
    }
    Ok(true)
}

/// JSON operator description: `{"order": J, "coeffs": [...], "epsilon": 1}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct OperatorSpec {
    pub order: usize,
    pub coeffs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Epsilon>,
}

impl OperatorSpec {
    pub fn from_op(op: &ShiftOp) -> Self {
        OperatorSpec {
            order: op.order(),
            coeffs: op.coeffs.iter().map(render_kpoly).collect(),
            epsilon: op.epsilon,
        }
    }

    pub fn to_op(&self) -> Result<ShiftOp> {
        if self.coeffs.len() != self.order + 1 {
            return Err(Error::InvalidInput(format!(
                "order {} needs {} coefficients, got {}",
                self.order,
                self.order + 1,
                self.coeffs.len()
            )));
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|s| parse_kpoly(s))
            .collect::<Result<Vec<_>>>()?;
        let op = ShiftOp::new(coeffs)?;
        Ok(match self.epsilon {
            Some(e) => op.with_epsilon(e),
            None => op,
        })
    }
}

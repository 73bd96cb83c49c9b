//! Power-partible reduction.
//!
//! For a power-partible operator `L` with center `gamma`, degree `d`, and a
//! family of symmetric basis polynomials `x_j` (`deg x_j = j >= l`), every
//! power `t^m` of `t = unit * (k - gamma)` splits as
//!
//! ```text
//! t^m = sum_{i < d + l, i = m mod 2} u_i t^i  +  sum_j v_j L*(x_j)(k)
//! ```
//!
//! with `u_i`, `v_j` in `Q(z)`. The engine eliminates top-down: each step
//! cancels the leading power of the remainder with the adjoint image whose
//! degree matches it. Coefficients are kept as `num / pivot^e` with a single
//! pivot polynomial, and any leading coefficient that is not a rational
//! multiple of a pivot power is rejected.

use num_traits::{One, Zero};

use crate::basis::{check_symmetry, BasisFamily, SchroderBasis, SymmetricBasisPoly};
use crate::error::{Error, Result};
use crate::poly::{int, poly_shift_k, rat, KPoly, Rational, ZPoly};
use crate::sequences::{eta, schroder_operator};
use crate::shift::{op_adjoint_apply, op_find_gamma, Epsilon, PartibleInfo, ShiftOp};

/// Denominator polynomial shared by all coefficients of a certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct Pivot {
    pub name: String,
    pub poly: ZPoly,
}

impl Pivot {
    pub fn trivial() -> Self {
        Pivot {
            name: "delta".into(),
            poly: ZPoly::one(),
        }
    }

    fn is_trivial(&self) -> bool {
        self.poly.is_constant()
    }
}

/// `num / pivot^pow`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZFrac {
    pub num: ZPoly,
    pub pow: u32,
}

impl ZFrac {
    pub fn zero() -> Self {
        ZFrac {
            num: ZPoly::zero(),
            pow: 0,
        }
    }

    pub fn constant(c: Rational) -> Self {
        ZFrac {
            num: ZPoly::constant(c),
            pow: 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Cancels pivot factors out of the numerator.
    fn normalized(mut self, pivot: &Pivot) -> Self {
        if self.num.is_zero() {
            self.pow = 0;
            return self;
        }
        if pivot.is_trivial() {
            // a constant pivot folds into the numerator
            let inv = pivot.poly.coeff(0).recip();
            for _ in 0..self.pow {
                self.num = self.num.scale(&inv);
            }
            self.pow = 0;
            return self;
        }
        while self.pow > 0 {
            match self.num.exact_div(&pivot.poly) {
                Some(q) => {
                    self.num = q;
                    self.pow -= 1;
                }
                None => break,
            }
        }
        self
    }

    /// Numerator over `pivot^target`, for `target >= pow`.
    fn lifted(&self, pivot: &Pivot, target: u32) -> ZPoly {
        self.num.clone() * &pivot.poly.pow(target - self.pow)
    }

    /// `self - v * a`
    fn sub_scaled(&self, v: &ZFrac, a: &ZPoly, pivot: &Pivot) -> ZFrac {
        let pow = self.pow.max(v.pow);
        let num = self.lifted(pivot, pow) - &(v.lifted(pivot, pow) * a);
        ZFrac { num, pow }.normalized(pivot)
    }

    /// Value at `z = z0`; `None` if the pivot vanishes there.
    pub fn eval(&self, pivot: &Pivot, z0: &Rational) -> Option<Rational> {
        let den = pivot.poly.eval(z0);
        if self.pow > 0 && den.is_zero() {
            return None;
        }
        let mut v = self.num.eval(z0);
        for _ in 0..self.pow {
            v /= &den;
        }
        Some(v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CombTerm {
    pub degree: usize,
    pub coeff: ZFrac,
    pub basis: SymmetricBasisPoly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionCertificate {
    /// Target exponent.
    pub m: u32,
    pub gamma: Rational,
    /// `t = unit * (k - gamma)`.
    pub unit: Rational,
    /// Order `J` of the operator.
    pub order: usize,
    /// Degree `d` of the operator.
    pub degree: i64,
    /// Smallest basis degree `l`; residual exponents stay below `d + l`.
    pub min_basis_degree: usize,
    pub pivot: Pivot,
    /// `(i, u_i)`, ascending in `i`.
    pub residual: Vec<(usize, ZFrac)>,
    /// In elimination order, highest degree first.
    pub combo: Vec<CombTerm>,
    pub family: String,
    pub epsilon: Option<Epsilon>,
    /// Set when the certificate was specialized to an integer `z`.
    pub z: Option<i64>,
}

/// `t^i` as a polynomial in `k`, with `t = unit * (k - gamma)`.
pub fn t_power(unit: &Rational, gamma: &Rational, i: u32) -> KPoly {
    let t = KPoly::linear(
        ZPoly::constant(-(unit * gamma)),
        ZPoly::constant(unit.clone()),
    );
    t.pow(i)
}

/// Re-expresses a polynomial in `k` in powers of `t = unit * (k - gamma)`.
pub fn to_t_basis(f: &KPoly, unit: &Rational, gamma: &Rational) -> KPoly {
    let centered = poly_shift_k(f, gamma);
    let inv = unit.recip();
    let mut scale = Rational::one();
    let coeffs = centered
        .coeffs()
        .iter()
        .map(|c| {
            let out = c.scale(&scale);
            scale *= &inv;
            out
        })
        .collect();
    KPoly::from_coeffs(coeffs)
}

/// Writes `c = lambda * pivot^e` with `lambda` a nonzero rational.
fn split_pivot_power(c: &ZPoly, pivot: &Pivot) -> Result<(Rational, u32)> {
    if pivot.is_trivial() {
        return match c.degree() {
            Some(0) => Ok((c.coeff(0) / pivot.poly.coeff(0), 0)),
            _ => Err(Error::NonMonomialDenominator),
        };
    }
    let mut cur = c.clone();
    let mut e = 0;
    while !cur.is_constant() {
        cur = cur
            .exact_div(&pivot.poly)
            .ok_or(Error::NonMonomialDenominator)?;
        e += 1;
    }
    if cur.is_zero() {
        return Err(Error::NonMonomialDenominator);
    }
    Ok((cur.coeff(0), e))
}

#[derive(Clone, Debug)]
pub struct ReductionOptions {
    pub unit: Rational,
    /// `None` picks the monic part of the first leading coefficient.
    pub pivot: Option<Pivot>,
}

impl Default for ReductionOptions {
    fn default() -> Self {
        ReductionOptions {
            unit: Rational::one(),
            pivot: None,
        }
    }
}

/// Reduces `(k - gamma)^m`.
pub fn reduce_power(
    op: &ShiftOp,
    info: &PartibleInfo,
    family: &dyn BasisFamily,
    m: u32,
) -> Result<ReductionCertificate> {
    reduce_power_with(op, info, family, m, &ReductionOptions::default())
}

/// Reduces `t^m` with `t = opts.unit * (k - gamma)`.
pub fn reduce_power_with(
    op: &ShiftOp,
    info: &PartibleInfo,
    family: &dyn BasisFamily,
    m: u32,
    opts: &ReductionOptions,
) -> Result<ReductionCertificate> {
    if m == 0 {
        return Err(Error::InvalidInput("target exponent must be positive".into()));
    }
    if opts.unit.is_zero() {
        return Err(Error::InvalidInput("unit must be nonzero".into()));
    }
    let ell = family.min_degree();
    let floor = info.degree + ell as i64;
    let mut pivot = opts.pivot.clone();
    let mut rem: Vec<ZFrac> = vec![ZFrac::zero(); m as usize + 1];
    rem[m as usize] = ZFrac::constant(Rational::one());
    let mut combo = Vec::new();

    while let Some(top) = rem.iter().rposition(|c| !c.is_zero()) {
        if (top as i64) < floor {
            break;
        }
        let j = usize::try_from(top as i64 - info.degree).expect("top >= d + l >= d");
        let basis = family.basis(j).ok_or_else(|| {
            Error::InvalidInput(format!("basis family has no polynomial of degree {j}"))
        })?;
        let image = to_t_basis(&op_adjoint_apply(op, basis.expanded()), &opts.unit, &info.gamma);
        match image.degree() {
            Some(d) if d == top => {}
            Some(d) if d > top => {
                return Err(Error::Internal(format!(
                    "adjoint image of degree-{j} basis has degree {d}, expected {top}"
                )))
            }
            _ => return Err(Error::LeadingCoefficientVanishes { degree: j }),
        }
        if let Some(bad) = image
            .coeffs()
            .iter()
            .enumerate()
            .position(|(i, c)| !c.is_zero() && (i + top) % 2 == 1)
        {
            return Err(Error::ParityViolation {
                degree: j,
                exponent: bad,
            });
        }
        let lead = image.coeff(top);
        let piv = pivot.get_or_insert_with(|| {
            if lead.is_constant() {
                Pivot::trivial()
            } else {
                Pivot {
                    name: "delta".into(),
                    poly: lead.monic(),
                }
            }
        });
        let (lambda, e) = split_pivot_power(&lead, piv)?;
        let v = ZFrac {
            num: rem[top].num.scale(&lambda.recip()),
            pow: rem[top].pow + e,
        }
        .normalized(piv);
        for (i, c) in image.coeffs().iter().enumerate() {
            if !c.is_zero() {
                rem[i] = rem[i].sub_scaled(&v, c, piv);
            }
        }
        if !rem[top].is_zero() {
            return Err(Error::Internal(format!("failed to cancel t^{top}")));
        }
        combo.push(CombTerm {
            degree: j,
            coeff: v,
            basis,
        });
    }

    let residual: Vec<(usize, ZFrac)> = rem
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .collect();
    if let Some((i, _)) = residual.iter().find(|(i, _)| (*i + m as usize) % 2 == 1) {
        return Err(Error::Internal(format!("residual term t^{i} has the wrong parity")));
    }
    Ok(ReductionCertificate {
        m,
        gamma: info.gamma.clone(),
        unit: opts.unit.clone(),
        order: info.order,
        degree: info.degree,
        min_basis_degree: ell,
        pivot: pivot.unwrap_or_else(Pivot::trivial),
        residual,
        combo,
        family: family.name().to_string(),
        epsilon: op.epsilon(),
        z: None,
    })
}

/// Re-expands the certificate and compares with `t^m` after clearing the
/// common denominator `pivot^P`. Also rejects malformed shapes: residual
/// exponents must lie below `d + l` with the parity of `m`, and every basis
/// polynomial must be symmetric of its stated degree.
pub fn verify_certificate(cert: &ReductionCertificate, op: &ShiftOp) -> bool {
    if cert.pivot.poly.is_zero() || cert.unit.is_zero() {
        return false;
    }
    let floor = cert.degree + cert.min_basis_degree as i64;
    let shape_ok = cert
        .residual
        .iter()
        .all(|(i, _)| (*i as i64) < floor && (i + cert.m as usize).is_multiple_of(2))
        && cert.combo.iter().all(|t| {
            t.basis.degree() == t.degree
                && t.basis.expanded().degree() == Some(t.degree)
                && t.degree >= cert.min_basis_degree
                && check_symmetry(t.basis.expanded(), &cert.gamma, cert.order)
        });
    if !shape_ok {
        return false;
    }
    let top = cert
        .residual
        .iter()
        .map(|(_, c)| c.pow)
        .chain(cert.combo.iter().map(|t| t.coeff.pow))
        .max()
        .unwrap_or(0);
    let lift = |c: &ZFrac| KPoly::constant(c.lifted(&cert.pivot, top));
    let lhs = t_power(&cert.unit, &cert.gamma, cert.m) * &KPoly::constant(cert.pivot.poly.pow(top));
    let rhs = cert
        .residual
        .iter()
        .fold(KPoly::zero(), |acc, (i, c)| {
            acc + &(lift(c) * &t_power(&cert.unit, &cert.gamma, *i as u32))
        });
    let rhs = cert.combo.iter().fold(rhs, |acc, t| {
        acc + &(lift(&t.coeff) * &op_adjoint_apply(op, t.basis.expanded()))
    });
    lhs == rhs
}

impl ReductionCertificate {
    /// Evaluates every coefficient at `z = z0`.
    pub fn specialize(&self, z0: i64) -> Result<ReductionCertificate> {
        let zr = int(z0);
        let degenerate = || Error::DegenerateSpecialization {
            epsilon: self.epsilon.map_or(0, Epsilon::value),
            z: z0.to_string(),
        };
        if self.pivot.poly.eval(&zr).is_zero() {
            return Err(degenerate());
        }
        let at = |c: &ZFrac| -> Result<ZFrac> {
            Ok(ZFrac::constant(c.eval(&self.pivot, &zr).ok_or_else(degenerate)?))
        };
        let residual = self
            .residual
            .iter()
            .map(|(i, c)| Ok((*i, at(c)?)))
            .collect::<Result<Vec<_>>>()?;
        let combo = self
            .combo
            .iter()
            .map(|t| {
                Ok(CombTerm {
                    degree: t.degree,
                    coeff: at(&t.coeff)?,
                    basis: t.basis.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ReductionCertificate {
            pivot: Pivot {
                name: self.pivot.name.clone(),
                poly: ZPoly::constant(self.pivot.poly.eval(&zr)),
            },
            residual,
            combo,
            z: Some(z0),
            ..self.clone()
        })
    }

    /// Largest pivot exponent in any denominator.
    pub fn max_pivot_power(&self) -> u32 {
        self.residual
            .iter()
            .map(|(_, c)| c.pow)
            .chain(self.combo.iter().map(|t| t.coeff.pow))
            .max()
            .unwrap_or(0)
    }
}

/// `(2k+1)^{2r+1} = sum_s v_s L*(x_{2s+2}) + (2k+1)` for the Schröder operator,
/// with `x_{s+2} = 2(2k+3)^s (k+1)(k+2)` and denominators powers of
/// `eta = (1 - eps(1+2z))/2`.
///
/// Besides the exact identity this checks the shape the congruence proof
/// relies on: the residual is exactly `1 * (2k+1)` and every numerator has
/// integer coefficients.
pub fn schroder_certificate(r: u32, eps: Epsilon) -> Result<ReductionCertificate> {
    let op = schroder_operator(eps);
    let info = op_find_gamma(&op)?;
    if info.gamma != SchroderBasis::gamma() || info.degree != 1 || info.order != 2 {
        return Err(Error::Internal(format!(
            "unexpected Schröder operator data: gamma = {}, d = {}",
            info.gamma, info.degree
        )));
    }
    let opts = ReductionOptions {
        unit: int(2),
        pivot: Some(Pivot {
            name: "eta".into(),
            poly: eta(eps),
        }),
    };
    let cert = reduce_power_with(&op, &info, &SchroderBasis, 2 * r + 1, &opts)?;
    if cert.residual != vec![(1, ZFrac::constant(Rational::one()))] {
        return Err(Error::Internal(format!(
            "Schröder residual is not exactly (2k+1): {:?}",
            cert.residual
        )));
    }
    if let Some(t) = cert.combo.iter().find(|t| !t.coeff.num.is_integral()) {
        return Err(Error::Internal(format!(
            "non-integral numerator on x_{}",
            t.degree
        )));
    }
    Ok(cert)
}

/// Half-integer center of the Schröder operator, exposed for reports.
pub fn schroder_gamma() -> Rational {
    rat(-1, 2)
}

//! Polynomials symmetric under `k -> 2*gamma - J - k` up to the sign
//! `(-1)^deg`, built as products of `(k - gamma + J/2)` and
//! `(k - gamma + J/2)^2 - q`.

use num_traits::{One, Zero};

use crate::poly::{int, kconst, poly_reflect_k, poly_shift_k, KPoly, Rational, ZPoly};

#[derive(Clone, Debug, PartialEq)]
pub enum BasisFactor {
    /// `k - gamma + J/2`
    Linear,
    /// `(k - gamma + J/2)^2 - q`
    Quadratic(Rational),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricBasisPoly {
    pub alpha: Rational,
    pub linear_factors: usize,
    pub quadratic_factors: Vec<Rational>,
    expanded: KPoly,
}

impl SymmetricBasisPoly {
    pub fn expanded(&self) -> &KPoly {
        &self.expanded
    }

    pub fn degree(&self) -> usize {
        self.linear_factors + 2 * self.quadratic_factors.len()
    }
}

/// `k - gamma + J/2`
fn center_linear(gamma: &Rational, order: usize) -> KPoly {
    let shift = Rational::new((order as i64).into(), 2.into()) - gamma;
    KPoly::linear(ZPoly::constant(shift), ZPoly::one())
}

/// Expands `alpha * prod(factors)`; `alpha` must be nonzero. The result is
/// symmetric by construction and the identity is re-checked.
pub fn build_basis(
    gamma: &Rational,
    order: usize,
    alpha: Rational,
    factors: &[BasisFactor],
) -> SymmetricBasisPoly {
    assert!(!alpha.is_zero(), "basis scale must be nonzero");
    let lin = center_linear(gamma, order);
    let mut expanded = kconst(ZPoly::constant(alpha.clone()));
    let mut linear_factors = 0;
    let mut quadratic_factors = Vec::new();
    for f in factors {
        match f {
            BasisFactor::Linear => {
                expanded = expanded * &lin;
                linear_factors += 1;
            }
            BasisFactor::Quadratic(q) => {
                let quad = lin.pow(2) - &kconst(ZPoly::constant(q.clone()));
                expanded = expanded * &quad;
                quadratic_factors.push(q.clone());
            }
        }
    }
    assert!(
        check_symmetry(&expanded, gamma, order),
        "symmetric basis construction broke symmetry"
    );
    SymmetricBasisPoly {
        alpha,
        linear_factors,
        quadratic_factors,
        expanded,
    }
}

/// `x(gamma + k) = (-1)^deg(x) x(gamma - k - J)` as a polynomial identity.
pub fn check_symmetry(x: &KPoly, gamma: &Rational, order: usize) -> bool {
    let Some(deg) = x.degree() else {
        return true;
    };
    let lhs = poly_shift_k(x, gamma);
    let rhs = poly_reflect_k(x, &(gamma - int(order as i64)));
    if deg % 2 == 0 {
        lhs == rhs
    } else {
        lhs == -rhs
    }
}

/// Source of basis polynomials `x_j` of exact degree `j >= min_degree()`.
pub trait BasisFamily {
    fn name(&self) -> &str;
    fn min_degree(&self) -> usize;
    /// `None` when the family has no polynomial of this degree.
    fn basis(&self, degree: usize) -> Option<SymmetricBasisPoly>;
}

/// `x_j = (k - gamma + J/2)^j`, `j >= 0`.
#[derive(Clone, Debug)]
pub struct PowerFamily {
    pub gamma: Rational,
    pub order: usize,
}

impl BasisFamily for PowerFamily {
    fn name(&self) -> &str {
        "power"
    }

    fn min_degree(&self) -> usize {
        0
    }

    fn basis(&self, degree: usize) -> Option<SymmetricBasisPoly> {
        Some(build_basis(
            &self.gamma,
            self.order,
            Rational::one(),
            &vec![BasisFactor::Linear; degree],
        ))
    }
}

/// `x_{s+2}(k) = 2 (2k+3)^s (k+1)(k+2)`, the family whose boundary terms at
/// `n = 0` vanish for the Schröder operator (center `-1/2`, order 2).
/// As a product: `alpha = 2^{s+1}`, `s` linear factors, one quadratic with `q = 1/4`.
#[derive(Clone, Debug, Default)]
pub struct SchroderBasis;

impl SchroderBasis {
    pub const GAMMA: (i64, i64) = (-1, 2);
    pub const ORDER: usize = 2;

    pub fn gamma() -> Rational {
        Rational::new(Self::GAMMA.0.into(), Self::GAMMA.1.into())
    }
}

impl BasisFamily for SchroderBasis {
    fn name(&self) -> &str {
        "schroder"
    }

    fn min_degree(&self) -> usize {
        2
    }

    fn basis(&self, degree: usize) -> Option<SymmetricBasisPoly> {
        let s = degree.checked_sub(2)?;
        let mut factors = vec![BasisFactor::Linear; s];
        factors.push(BasisFactor::Quadratic(Rational::new(1.into(), 4.into())));
        let alpha = Rational::from_integer(num_bigint::BigInt::from(2).pow(s as u32 + 1));
        Some(build_basis(&Self::gamma(), Self::ORDER, alpha, &factors))
    }
}

/// Caller-provided basis polynomials indexed by degree.
#[derive(Clone, Debug)]
pub struct ExplicitFamily {
    pub min_degree: usize,
    pub polys: Vec<SymmetricBasisPoly>,
}

impl BasisFamily for ExplicitFamily {
    fn name(&self) -> &str {
        "explicit"
    }

    fn min_degree(&self) -> usize {
        self.min_degree
    }

    fn basis(&self, degree: usize) -> Option<SymmetricBasisPoly> {
        self.polys.iter().find(|b| b.degree() == degree).cloned()
    }
}

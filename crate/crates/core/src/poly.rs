//! Dense univariate polynomials over an exact coefficient ring.
//!
//! The whole crate works in the tower `Q[z][k]`: a [`ZPoly`] is a polynomial
//! in the parameter `z` with rational coefficients, and a [`KPoly`] is a
//! polynomial in the recurrence index `k` whose coefficients are `ZPoly`s.
//! Both are instances of the same generic [`Poly`], which also gets reused for
//! auxiliary variables (the unknown center when searching for a symmetry, the
//! indicial variable `s`).
//!
//! Representation is canonical: `coeffs[i]` is the coefficient of `x^i` and
//! the last stored coefficient is never zero. The zero polynomial has no
//! coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar. `num-rational` keeps it reduced with a positive
/// denominator, and zero as `0/1`.
pub type Rational = BigRational;

/// Polynomial in the parameter `z` over the rationals.
pub type ZPoly = Poly<Rational>;

/// Polynomial in the index `k` with `ZPoly` coefficients.
pub type KPoly = Poly<ZPoly>;

/// Commutative ring with exact equality.
pub trait Ring:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    fn from_i64(n: i64) -> Self;
}

impl Ring for Rational {
    fn from_i64(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
}

impl<C: Ring> Ring for Poly<C> {
    fn from_i64(n: i64) -> Self {
        Poly::constant(C::from_i64(n))
    }
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly<C> {
    coeffs: Vec<C>,
}

impl<C: Ring> Default for Poly<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Ring> Poly<C> {
    fn normalize(mut self) -> Self {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    /// Builds a polynomial from ascending coefficients, stripping trailing zeros.
    pub fn from_coeffs(coeffs: Vec<C>) -> Self {
        Poly { coeffs }.normalize()
    }

    pub fn constant(c: C) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The indeterminate itself.
    pub fn var() -> Self {
        Poly {
            coeffs: vec![C::zero(), C::one()],
        }
    }

    pub fn monomial(c: C, deg: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![C::zero(); deg + 1];
        coeffs[deg] = c;
        Poly { coeffs }
    }

    /// `a + b*x`
    pub fn linear(a: C, b: C) -> Self {
        Self::from_coeffs(vec![a, b])
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    /// Coefficient of `x^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> C {
        self.coeffs.get(i).cloned().unwrap_or_else(C::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&C> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a.clone() * c).collect())
    }

    pub fn map_coeffs<D: Ring>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        Poly::from_coeffs(self.coeffs.iter().map(f).collect())
    }

    /// Horner evaluation at a point of the coefficient ring.
    pub fn eval(&self, x: &C) -> C {
        self.coeffs
            .iter()
            .rev()
            .fold(C::zero(), |acc, c| acc * x + c)
    }

    /// Substitutes another polynomial for the variable: `self(g(x))`.
    pub fn compose(&self, g: &Self) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, c| acc * g + &Self::constant(c.clone()))
    }

    /// `self(x + c)`
    pub fn shift(&self, c: &C) -> Self {
        self.compose(&Self::linear(c.clone(), C::one()))
    }

    /// `self(c - x)`
    pub fn reflect(&self, c: &C) -> Self {
        self.compose(&Self::linear(c.clone(), -C::one()))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * &base;
            }
        }
        acc
    }

    /// Lifts into a polynomial ring one level up, as a constant.
    pub fn lift(&self) -> Poly<Self> {
        Poly::constant(self.clone())
    }
}

impl<C: Ring> Zero for Poly<C> {
    fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<C: Ring> One for Poly<C> {
    fn one() -> Self {
        Poly {
            coeffs: vec![C::one()],
        }
    }
}

impl<C: Ring> Neg for Poly<C> {
    type Output = Self;

    fn neg(self) -> Self {
        Poly {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl<C: Ring> Neg for &Poly<C> {
    type Output = Poly<C>;

    fn neg(self) -> Poly<C> {
        -self.clone()
    }
}

impl<'a, C: Ring> Add<&'a Poly<C>> for Poly<C> {
    type Output = Poly<C>;

    fn add(mut self, rhs: &'a Poly<C>) -> Poly<C> {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), C::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a = std::mem::replace(a, C::zero()) + b;
        }
        self.normalize()
    }
}

impl<'a, C: Ring> Sub<&'a Poly<C>> for Poly<C> {
    type Output = Poly<C>;

    fn sub(mut self, rhs: &'a Poly<C>) -> Poly<C> {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), C::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a = std::mem::replace(a, C::zero()) - b;
        }
        self.normalize()
    }
}

impl<'a, C: Ring> Mul<&'a Poly<C>> for Poly<C> {
    type Output = Poly<C>;

    fn mul(self, rhs: &'a Poly<C>) -> Poly<C> {
        &self * rhs
    }
}

impl<C: Ring> Mul<&Poly<C>> for &Poly<C> {
    type Output = Poly<C>;

    fn mul(self, rhs: &Poly<C>) -> Poly<C> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![C::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = std::mem::replace(&mut out[i + j], C::zero()) + &(a.clone() * b);
            }
        }
        Poly::from_coeffs(out)
    }
}

impl<C: Ring> Add<&Poly<C>> for &Poly<C> {
    type Output = Poly<C>;

    fn add(self, rhs: &Poly<C>) -> Poly<C> {
        self.clone() + rhs
    }
}

impl<C: Ring> Sub<&Poly<C>> for &Poly<C> {
    type Output = Poly<C>;

    fn sub(self, rhs: &Poly<C>) -> Poly<C> {
        self.clone() - rhs
    }
}

impl<C: Ring> Add for Poly<C> {
    type Output = Poly<C>;

    fn add(self, rhs: Poly<C>) -> Poly<C> {
        self + &rhs
    }
}

impl<C: Ring> Sub for Poly<C> {
    type Output = Poly<C>;

    fn sub(self, rhs: Poly<C>) -> Poly<C> {
        self - &rhs
    }
}

impl<C: Ring> Mul for Poly<C> {
    type Output = Poly<C>;

    fn mul(self, rhs: Poly<C>) -> Poly<C> {
        &self * &rhs
    }
}

// ---- Field-coefficient operations on Q[x] ----

impl Poly<Rational> {
    /// Euclidean division; `None` when dividing by zero.
    pub fn div_rem(&self, divisor: &Self) -> Option<(Self, Self)> {
        let dd = divisor.degree()?;
        let lead = divisor.leading()?.clone();
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree().filter(|&n| n >= dd) else {
            return Some((Self::zero(), self.clone()));
        };
        let mut quot = vec![Rational::zero(); nd - dd + 1];
        for shift in (0..=nd - dd).rev() {
            let c = &rem[shift + dd] / &lead;
            if c.is_zero() {
                continue;
            }
            for (i, d) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] -= &c * d;
            }
            quot[shift] = c;
        }
        Some((Self::from_coeffs(quot), Self::from_coeffs(rem)))
    }

    /// Exact quotient, `None` if the division leaves a remainder.
    pub fn exact_div(&self, divisor: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(divisor)?;
        r.is_zero().then_some(q)
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => Self::zero(),
        }
    }

    /// Monic gcd; the gcd of two zero polynomials is zero.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// True when every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// All distinct rational roots, ascending. The zero polynomial has no
    /// well-defined root set and yields an empty list.
    pub fn rational_roots(&self) -> Vec<Rational> {
        if self.is_zero() {
            return Vec::new();
        }
        // Clear denominators to get an integer polynomial.
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
            .collect();
        let low = ints.iter().position(|c| !c.is_zero()).unwrap_or(0);
        let mut roots = Vec::new();
        if low > 0 {
            roots.push(Rational::zero());
        }
        let trimmed = &ints[low..];
        if trimmed.len() > 1 {
            let a0 = trimmed[0].abs();
            let an = trimmed[trimmed.len() - 1].abs();
            let reduced = Self::from_coeffs(
                trimmed
                    .iter()
                    .map(|c| Rational::from_integer(c.clone()))
                    .collect(),
            );
            for p in divisors(&a0) {
                for q in divisors(&an) {
                    for sign in [1i64, -1] {
                        let cand = Rational::new(&p * BigInt::from(sign), q.clone());
                        if reduced.eval(&cand).is_zero() && !roots.contains(&cand) {
                            roots.push(cand);
                        }
                    }
                }
            }
        }
        roots.sort();
        roots
    }

    /// Value at an integer point, as an exact rational.
    pub fn eval_int(&self, x: &BigInt) -> Rational {
        self.eval(&Rational::from_integer(x.clone()))
    }
}

/// Positive divisors of a nonzero integer by trial division.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            let other = &n / &d;
            if other != d {
                large.push(other);
            }
            small.push(d.clone());
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

// ---- KPoly helpers ----

impl Poly<ZPoly> {
    /// Evaluates the index variable at `k`, leaving a polynomial in `z`.
    pub fn eval_k(&self, k: &Rational) -> ZPoly {
        self.eval(&ZPoly::constant(k.clone()))
    }

    /// Substitutes `z = z0`, leaving a polynomial in `k` with constant coefficients.
    pub fn at_z(&self, z0: &Rational) -> KPoly {
        self.map_coeffs(|c| ZPoly::constant(c.eval(z0)))
    }

    /// Exact value at `(k, z)`.
    pub fn eval_at(&self, k: &Rational, z: &Rational) -> Rational {
        self.eval_k(k).eval(z)
    }

    /// Degree in `z` over all coefficients.
    pub fn z_degree(&self) -> Option<usize> {
        self.coeffs.iter().filter_map(|c| c.degree()).max()
    }
}

/// The parameter `z` as a polynomial.
pub fn z() -> ZPoly {
    ZPoly::var()
}

/// The index `k` as a polynomial.
pub fn k() -> KPoly {
    KPoly::var()
}

/// A `ZPoly` lifted to a constant `KPoly`.
pub fn kconst(c: ZPoly) -> KPoly {
    KPoly::constant(c)
}

/// A rational constant as a `KPoly`.
pub fn kint(n: i64) -> KPoly {
    KPoly::from_i64(n)
}

/// `f(k + c)`, expanded.
pub fn poly_shift_k(f: &KPoly, c: &Rational) -> KPoly {
    f.shift(&ZPoly::constant(c.clone()))
}

/// `f(c - k)`, expanded.
pub fn poly_reflect_k(f: &KPoly, c: &Rational) -> KPoly {
    f.reflect(&ZPoly::constant(c.clone()))
}

/// Converts a rational known to be an integer; `None` otherwise.
pub fn rational_to_i64(r: &Rational) -> Option<i64> {
    r.is_integer().then(|| r.to_integer().to_i64()).flatten()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    fn kp(cs: &[i64]) -> KPoly {
        KPoly::from_coeffs(cs.iter().map(|&c| ZPoly::from_i64(c)).collect())
    }

    #[test]
    fn shift_examples() {
        let k2 = k().pow(2);
        assert_eq!(poly_shift_k(&k2, &int(-1)), kp(&[1, -2, 1]));
        // k+3 shifted by -2 is k+1, pointwise check at k = 0..3
        let f = k() + kint(3);
        let g = poly_shift_k(&f, &int(-2));
        assert_eq!(g, k() + kint(1));
        for n in 0..4 {
            assert_eq!(g.eval_at(&int(n), &int(0)), f.eval_at(&int(n - 2), &int(0)));
        }
        assert!(poly_shift_k(&KPoly::zero(), &int(7)).is_zero());
    }

    #[test]
    fn reflect_examples() {
        let r = poly_reflect_k(&k(), &rat(-5, 2));
        assert_eq!(r, -k() + kconst(ZPoly::constant(rat(-5, 2))));
        for n in -3..3 {
            assert_eq!(r.eval_at(&int(n), &int(0)), rat(-5, 2) - int(n));
        }
        let sq = (k().scale(&ZPoly::from_i64(2)) + kint(1)).pow(2);
        assert_eq!(poly_reflect_k(&sq, &int(-1)), sq);
        assert_eq!(poly_reflect_k(&kint(1), &int(0)), kint(1));
    }

    #[test]
    fn degree_and_canonical_zero() {
        assert_eq!(KPoly::zero().degree(), None);
        let f = kp(&[1, 2, 0]);
        assert_eq!(f.degree(), Some(1));
        assert_eq!(f.coeffs().len(), 2);
        assert!((f.clone() - &f).coeffs().is_empty());
    }

    #[test]
    fn division_and_gcd() {
        let a = ZPoly::from_coeffs(vec![int(-1), int(0), int(1)]); // z^2 - 1
        let b = ZPoly::from_coeffs(vec![int(1), int(1)]); // z + 1
        assert_eq!(a.exact_div(&b), Some(ZPoly::from_coeffs(vec![int(-1), int(1)])));
        assert_eq!(a.exact_div(&ZPoly::from_coeffs(vec![int(2), int(1)])), None);
        let c = ZPoly::from_coeffs(vec![int(3), int(1)]) * &b;
        assert_eq!(a.gcd(&c), b);
    }

    #[test]
    fn rational_roots_found() {
        // (2x+1)(x-3)x = 2x^3 - 5x^2 - 3x
        let p = ZPoly::from_coeffs(vec![int(0), int(-3), int(-5), int(2)]);
        assert_eq!(p.rational_roots(), vec![rat(-1, 2), int(0), int(3)]);
        let q = ZPoly::from_coeffs(vec![int(1), int(0), int(1)]);
        assert!(q.rational_roots().is_empty());
        assert!(ZPoly::from_i64(5).rational_roots().is_empty());
    }

    fn small_zpoly() -> impl Strategy<Value = ZPoly> {
        prop::collection::vec((-6i64..6, 1i64..4), 0..4)
            .prop_map(|cs| ZPoly::from_coeffs(cs.into_iter().map(|(n, d)| rat(n, d)).collect()))
    }

    pub(crate) fn small_kpoly() -> impl Strategy<Value = KPoly> {
        prop::collection::vec(small_zpoly(), 0..4).prop_map(KPoly::from_coeffs)
    }

    fn canonical(f: &KPoly) -> bool {
        f.leading().is_none_or(|c| !c.is_zero())
            && f.coeffs().iter().all(|c| c.leading().is_none_or(|r| !r.is_zero()))
    }

    proptest! {
        #[test]
        fn ring_axioms(a in small_kpoly(), b in small_kpoly(), c in small_kpoly()) {
            prop_assert_eq!((&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!((&a + &(-&a)).is_zero());
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!(canonical(&(&a * &b)) && canonical(&(&a - &c)));
        }

        #[test]
        fn shift_inverse(f in small_kpoly(), n in -5i64..5, d in 1i64..4) {
            let c = rat(n, d);
            let g = poly_shift_k(&f, &c);
            prop_assert!(canonical(&g));
            prop_assert_eq!(g.degree(), f.degree());
            prop_assert_eq!(poly_shift_k(&g, &-c), f);
        }

        #[test]
        fn reflect_involution(f in small_kpoly(), n in -5i64..5, d in 1i64..4) {
            let c = rat(n, d);
            prop_assert_eq!(poly_reflect_k(&poly_reflect_k(&f, &c), &c), f);
        }
    }
}

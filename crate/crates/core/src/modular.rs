//! Residue arithmetic modulo a machine-word odd prime.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{KPoly, Rational, ZPoly};

/// Deterministic Miller-Rabin; these witnesses are exact for all `n < 2^64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Odd primes strictly below `bound`.
pub fn odd_primes_below(bound: u64) -> Vec<u64> {
    (3..bound).filter(|&n| is_prime(n)).collect()
}

/// Element of `Z/pZ` for an odd prime `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ModInt {
    residue: u64,
    modulus: u64,
}

impl ModInt {
    pub fn new(value: i64, p: u64) -> Result<Self> {
        check_modulus(p)?;
        Ok(Self::raw(value.rem_euclid(p as i64) as u64, p))
    }

    pub fn from_bigint(value: &BigInt, p: u64) -> Result<Self> {
        check_modulus(p)?;
        Ok(Self::reduce(value, p))
    }

    /// Reduces a rational; fails when its denominator is divisible by `p`.
    pub fn from_rational(value: &Rational, p: u64) -> Result<Self> {
        check_modulus(p)?;
        let den = Self::reduce(value.denom(), p);
        if den.residue == 0 {
            return Err(Error::DenominatorDividesModulus { modulus: p });
        }
        Ok(Self::reduce(value.numer(), p) * den.inverse().expect("nonzero residue"))
    }

    fn reduce(value: &BigInt, p: u64) -> Self {
        let r = value.mod_floor(&BigInt::from(p));
        Self::raw(r.to_u64().expect("residue fits"), p)
    }

    fn raw(residue: u64, modulus: u64) -> Self {
        ModInt { residue, modulus }
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.residue == 0
    }

    pub fn pow(&self, e: u64) -> Self {
        Self::raw(pow_mod(self.residue, e, self.modulus), self.modulus)
    }

    /// Fermat inverse; `None` for zero.
    pub fn inverse(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.pow(self.modulus - 2))
    }
}

fn check_modulus(p: u64) -> Result<()> {
    if p % 2 == 1 && is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotOddPrime(p))
    }
}

impl fmt::Display for ModInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.residue, self.modulus)
    }
}

impl Add for ModInt {
    type Output = ModInt;

    fn add(self, rhs: ModInt) -> ModInt {
        debug_assert_eq!(self.modulus, rhs.modulus);
        let s = (self.residue as u128 + rhs.residue as u128) % self.modulus as u128;
        Self::raw(s as u64, self.modulus)
    }
}

impl Sub for ModInt {
    type Output = ModInt;

    fn sub(self, rhs: ModInt) -> ModInt {
        self + -rhs
    }
}

impl Neg for ModInt {
    type Output = ModInt;

    fn neg(self) -> ModInt {
        Self::raw((self.modulus - self.residue) % self.modulus, self.modulus)
    }
}

impl Mul for ModInt {
    type Output = ModInt;

    fn mul(self, rhs: ModInt) -> ModInt {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Self::raw(mul_mod(self.residue, rhs.residue, self.modulus), self.modulus)
    }
}

/// `f(z0) mod p` for a polynomial in `z`.
pub fn zpoly_eval_mod(f: &ZPoly, z0: i64, p: u64) -> Result<ModInt> {
    let z = ModInt::new(z0, p)?;
    f.coeffs().iter().rev().try_fold(ModInt::new(0, p)?, |acc, c| {
        Ok(acc * z + ModInt::from_rational(c, p)?)
    })
}

/// `f(k0, z0) mod p`, reducing every coefficient before evaluation.
pub fn poly_eval_mod(f: &KPoly, k0: i64, z0: i64, p: u64) -> Result<ModInt> {
    let k = ModInt::new(k0, p)?;
    f.coeffs().iter().rev().try_fold(ModInt::new(0, p)?, |acc, c| {
        Ok(acc * k + zpoly_eval_mod(c, z0, p)?)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, k, kconst, kint, rat, z, Ring};
    use proptest::prelude::*;

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..50).filter(|&n| is_prime(n)).collect();
        assert_eq!(
            small,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]
        );
        assert!(is_prime(18446744073709551557));
        assert!(!is_prime(3215031751)); // strong pseudoprime to bases 2, 3, 5, 7
        assert_eq!(ModInt::new(1, 9), Err(Error::NotOddPrime(9)));
        assert_eq!(ModInt::new(1, 2), Err(Error::NotOddPrime(2)));
    }

    #[test]
    fn eval_mod_examples() {
        let two_k_plus_one = k().scale(&ZPoly::from_i64(2)) + kint(1);
        let cube = two_k_plus_one.pow(3);
        assert_eq!(poly_eval_mod(&cube, 2, 99, 7).unwrap().residue(), 6);

        // -(2k+3)(1+2z) with epsilon = 1 at k = 1, z = 1: -15 = 0 mod 5
        let w = kconst(z().scale(&int(2)) + &ZPoly::from_i64(1));
        let a1 = -((k().scale(&ZPoly::from_i64(2)) + kint(3)) * &w);
        assert_eq!(poly_eval_mod(&a1, 1, 1, 5).unwrap().residue(), 0);
        assert_eq!(a1.eval_at(&int(1), &int(1)), int(-15));

        let bad = kconst(ZPoly::constant(rat(1, 5))) * &k();
        assert_eq!(
            poly_eval_mod(&bad, 1, 0, 5),
            Err(Error::DenominatorDividesModulus { modulus: 5 })
        );
        // same denominator is fine modulo another prime: 1/5 = 3 mod 7
        assert_eq!(poly_eval_mod(&bad, 1, 0, 7).unwrap().residue(), 3);
    }

    #[test]
    fn inverse_and_negatives() {
        let a = ModInt::new(-3, 7).unwrap();
        assert_eq!(a.residue(), 4);
        assert_eq!((a * a.inverse().unwrap()).residue(), 1);
        assert!(ModInt::new(14, 7).unwrap().inverse().is_none());
    }

    proptest! {
        #[test]
        fn eval_mod_is_multiplicative(
            f in crate::poly::tests::small_kpoly(),
            g in crate::poly::tests::small_kpoly(),
            k0 in -20i64..20,
            z0 in -20i64..20,
            pi in 0usize..6,
        ) {
            // denominators in the strategy are below 4, so these primes are safe
            let p = [5u64, 7, 11, 13, 101, 1_000_000_007][pi];
            let fg = &f * &g;
            let lhs = poly_eval_mod(&fg, k0, z0, p).unwrap();
            let rhs = poly_eval_mod(&f, k0, z0, p).unwrap() * poly_eval_mod(&g, k0, z0, p).unwrap();
            prop_assert_eq!(lhs, rhs);
            // agrees with exact evaluation followed by reduction
            let exact = fg.eval_at(&int(k0), &int(z0));
            prop_assert_eq!(lhs, ModInt::from_rational(&exact, p).unwrap());
        }
    }
}

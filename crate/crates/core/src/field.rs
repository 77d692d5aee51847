//! Prime-field arithmetic.
//!
//! A [`PrimeField`] is a small `Copy` handle carrying the modulus, and a
//! [`FieldElement`] pairs a canonical representative in `[0, q)` with the
//! field it lives in. Matrices and polynomials store raw `u64` values and use
//! the field's raw operations directly.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    modulus: u64,
}

impl PrimeField {
    /// Fermat prime 2^16 + 1.
    pub const DEFAULT_MODULUS: u64 = 65537;

    pub fn new(modulus: u64) -> Result<Self> {
        if !is_prime(modulus) {
            return Err(Error::NotPrime(modulus));
        }
        Ok(Self { modulus })
    }

    pub fn default_field() -> Self {
        Self {
            modulus: Self::DEFAULT_MODULUS,
        }
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn element(&self, value: u64) -> FieldElement {
        FieldElement {
            value: value % self.modulus,
            field: *self,
        }
    }

    /// Maps a signed integer to its residue, so `-1` becomes `q - 1`.
    pub fn from_i64(&self, value: i64) -> FieldElement {
        self.element(self.reduce_i64(value))
    }

    pub fn zero(&self) -> FieldElement {
        self.element(0)
    }

    pub fn one(&self) -> FieldElement {
        self.element(1)
    }

    /// Fails with [`Error::FieldTooSmall`] unless `q > count`, which leaves
    /// room for the evaluation points `0..count`.
    pub fn ensure_points(&self, count: usize) -> Result<()> {
        if (count as u128) >= self.modulus as u128 {
            return Err(Error::FieldTooSmall {
                modulus: self.modulus,
                needed: count,
            });
        }
        Ok(())
    }

    #[inline]
    pub fn reduce_i64(&self, value: i64) -> u64 {
        (value as i128).rem_euclid(self.modulus as i128) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a as u128 + b as u128;
        (s % self.modulus as u128) as u64
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.modulus - (b - a)
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(&self, a: u64) -> Result<u64> {
        let a = a % self.modulus;
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let (mut r0, mut r1) = (self.modulus as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let quot = r0 / r1;
            (r0, r1) = (r1, r0 - quot * r1);
            (t0, t1) = (t1, t0 - quot * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(t0.rem_euclid(self.modulus as i128) as u64)
    }

    pub fn div(&self, a: u64, b: u64) -> Result<u64> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.modulus;
        base %= self.modulus;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Σ aᵢ·bᵢ.
    pub fn dot(&self, a: &[u64], b: &[u64]) -> u64 {
        a.iter()
            .zip(b)
            .fold(0, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
    }
}

impl Default for PrimeField {
    fn default() -> Self {
        Self::default_field()
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.modulus)
    }
}

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in WITNESSES {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    field: PrimeField,
}

impl FieldElement {
    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same_field(&self, other: &Self) -> Result<PrimeField> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.modulus,
                right: other.field.modulus,
            });
        }
        Ok(self.field)
    }

    pub fn apply(self, op: FieldOp, rhs: Self) -> Result<Self> {
        let f = self.same_field(&rhs)?;
        let value = match op {
            FieldOp::Add => f.add(self.value, rhs.value),
            FieldOp::Sub => f.sub(self.value, rhs.value),
            FieldOp::Mul => f.mul(self.value, rhs.value),
            FieldOp::Div => f.div(self.value, rhs.value)?,
        };
        Ok(Self { value, field: f })
    }

    pub fn checked_add(self, rhs: Self) -> Result<Self> {
        self.apply(FieldOp::Add, rhs)
    }

    pub fn checked_sub(self, rhs: Self) -> Result<Self> {
        self.apply(FieldOp::Sub, rhs)
    }

    pub fn checked_mul(self, rhs: Self) -> Result<Self> {
        self.apply(FieldOp::Mul, rhs)
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self> {
        self.apply(FieldOp::Div, rhs)
    }

    pub fn inv(self) -> Result<Self> {
        Ok(Self {
            value: self.field.inv(self.value)?,
            field: self.field,
        })
    }

    pub fn pow(self, exp: u64) -> Self {
        Self {
            value: self.field.pow(self.value, exp),
            field: self.field,
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

// Operator impls panic on mixed fields; use `checked_*` when operands may
// come from different fields.
macro_rules! binop {
    ($trait:ident, $method:ident, $op:expr) => {
        impl $trait for FieldElement {
            type Output = FieldElement;

            fn $method(self, rhs: FieldElement) -> FieldElement {
                self.apply($op, rhs).expect("field mismatch")
            }
        }
    };
}

binop!(Add, add, FieldOp::Add);
binop!(Sub, sub, FieldOp::Sub);
binop!(Mul, mul, FieldOp::Mul);

impl Neg for FieldElement {
    type Output = FieldElement;

    fn neg(self) -> FieldElement {
        Self {
            value: self.field.neg(self.value),
            field: self.field,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    #[test]
    fn small_field_examples() {
        let f = gf(7);
        assert_eq!((f.element(3) + f.element(5)).value(), 1);
        assert_eq!((f.element(3) * f.element(5)).value(), 1);
        assert_eq!(f.element(3).inv().unwrap().value(), 5);
        let g = gf(257);
        assert_eq!((g.element(256) + g.element(1)).value(), 0);
    }

    #[test]
    fn division_by_zero() {
        let f = gf(7);
        assert_eq!(
            f.element(3).checked_div(f.zero()),
            Err(Error::DivisionByZero)
        );
        assert_eq!(f.zero().inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = gf(7).element(1);
        let b = gf(11).element(1);
        assert_eq!(
            a.apply(FieldOp::Add, b),
            Err(Error::FieldMismatch { left: 7, right: 11 })
        );
    }

    #[test]
    fn primality() {
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(9).is_err());
        assert!(PrimeField::new(65537).is_ok());
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
        let sieve: Vec<u64> = (0..200).filter(|&n| is_prime(n)).collect();
        let naive: Vec<u64> = (0..200u64)
            .filter(|&n| n >= 2 && (2..n).all(|d| n % d != 0))
            .collect();
        assert_eq!(sieve, naive);
    }

    #[test]
    fn negative_integers_map_to_residues() {
        let f = gf(7);
        assert_eq!(f.from_i64(-1).value(), 6);
        assert_eq!(f.from_i64(-15).value(), 6);
    }

    #[test]
    fn large_modulus_has_no_overflow() {
        let f = gf(18_446_744_073_709_551_557);
        let a = f.element(u64::MAX - 100);
        let inv = a.inv().unwrap();
        assert_eq!((a * inv).value(), 1);
    }

    proptest! {
        #[test]
        fn field_axioms(a in 0u64..65537, b in 0u64..65537, c in 0u64..65537) {
            let f = PrimeField::default_field();
            let (a, b, c) = (f.element(a), f.element(b), f.element(c));
            prop_assert_eq!((a + b) + c, a + (b + c));
            prop_assert_eq!((a * b) * c, a * (b * c));
            prop_assert_eq!(a * (b + c), a * b + a * c);
            prop_assert_eq!(a - b + b, a);
            if !a.is_zero() {
                prop_assert_eq!(a * a.inv().unwrap(), f.one());
                prop_assert_eq!(a.inv().unwrap(), a.pow(65535));
            }
        }
    }
}

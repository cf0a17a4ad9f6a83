//! Prime fields F_q.

use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::{Error, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The field of integers modulo a prime `q < 2^31`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    q: u32,
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self> {
        if q >= 1 << 31 || !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(PrimeField { q: q as u32 })
    }

    #[inline]
    pub fn modulus(self) -> u32 {
        self.q
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    pub fn pow(self, mut a: u32, mut e: u64) -> u32 {
        let mut r = 1 % self.q;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse; panics on zero.
    #[inline]
    pub fn inv(self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        if a == 1 {
            return 1;
        }
        self.pow(a, self.q as u64 - 2)
    }

    #[inline]
    pub fn from_i64(self, x: i64) -> u32 {
        x.rem_euclid(self.q as i64) as u32
    }

    /// Signed representative in `(-q/2, q/2]`.
    pub fn to_signed(self, a: u32) -> i64 {
        if a as u64 * 2 > self.q as u64 {
            a as i64 - self.q as i64
        } else {
            a as i64
        }
    }

    pub fn elem(self, x: i64) -> Fq {
        Fq { value: self.from_i64(x), field: self }
    }
}

/// An element of a prime field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fq {
    value: u32,
    field: PrimeField,
}

impl Fq {
    pub fn value(self) -> u32 {
        self.value
    }

    pub fn field(self) -> PrimeField {
        self.field
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Option<Fq> {
        (self.value != 0).then(|| Fq { value: self.field.inv(self.value), field: self.field })
    }
}

impl fmt::Display for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.field.q)
    }
}

impl Add for Fq {
    type Output = Fq;
    fn add(self, rhs: Fq) -> Fq {
        assert_eq!(self.field, rhs.field);
        Fq { value: self.field.add(self.value, rhs.value), field: self.field }
    }
}

impl Sub for Fq {
    type Output = Fq;
    fn sub(self, rhs: Fq) -> Fq {
        assert_eq!(self.field, rhs.field);
        Fq { value: self.field.sub(self.value, rhs.value), field: self.field }
    }
}

impl Mul for Fq {
    type Output = Fq;
    fn mul(self, rhs: Fq) -> Fq {
        assert_eq!(self.field, rhs.field);
        Fq { value: self.field.mul(self.value, rhs.value), field: self.field }
    }
}

impl Neg for Fq {
    type Output = Fq;
    fn neg(self) -> Fq {
        Fq { value: self.field.neg(self.value), field: self.field }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_composites() {
        assert!(PrimeField::new(4).is_err());
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(0).is_err());
        assert!(PrimeField::new(7).is_ok());
    }

    #[test]
    fn signed_representative() {
        let f = PrimeField::new(5).unwrap();
        assert_eq!(f.to_signed(4), -1);
        assert_eq!(f.to_signed(2), 2);
    }

    proptest! {
        #[test]
        fn field_axioms(q in prop::sample::select(vec![2u64, 3, 5, 7, 101, 65521]), a in 0u64..1_000_000, b in 0u64..1_000_000, c in 0u64..1_000_000) {
            let f = PrimeField::new(q).unwrap();
            let (a, b, c) = (f.elem(a as i64), f.elem(b as i64), f.elem(c as i64));
            prop_assert_eq!((a + b) * c, a * c + b * c);
            prop_assert_eq!(a - b + b, a);
            prop_assert_eq!(a + (-a), f.elem(0));
            if let Some(ai) = a.inv() {
                prop_assert_eq!(a * ai, f.elem(1));
            } else {
                prop_assert!(a.is_zero());
            }
        }
    }
}

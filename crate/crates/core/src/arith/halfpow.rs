use std::fmt;
use std::ops::{Mul, Neg};

use num_traits::{One, Zero};

use super::{pow_rat, valuation_rat, Rat};
use crate::error::{Error, Result};

/// `value · p^(half_exp / 2)` with `value` a p-adic unit (or zero).
///
/// Half-integral powers of `p` stay symbolic: the scalar is a rational
/// number exactly when `half_exp` is even.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HalfPowerScalar {
    prime: u64,
    value: Rat,
    half_exp: i64,
}

impl HalfPowerScalar {
    pub fn new(prime: u64, value: Rat, half_exp: i64) -> Self {
        if value.is_zero() {
            return Self { prime, value, half_exp: 0 };
        }
        let v = valuation_rat(&value, prime);
        let value = value * pow_rat(prime, -v);
        Self { prime, value, half_exp: half_exp + 2 * v }
    }

    pub fn zero(prime: u64) -> Self {
        Self::new(prime, Rat::zero(), 0)
    }

    pub fn one(prime: u64) -> Self {
        Self::new(prime, Rat::one(), 0)
    }

    pub fn from_rat(prime: u64, value: Rat) -> Self {
        Self::new(prime, value, 0)
    }

    /// `p^(e/2)`.
    pub fn half_power(prime: u64, e: i64) -> Self {
        Self::new(prime, Rat::one(), e)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn value(&self) -> &Rat {
        &self.value
    }

    pub fn half_exp(&self) -> i64 {
        self.half_exp
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.is_zero() || self.half_exp % 2 == 0
    }

    pub fn to_rational(&self) -> Option<Rat> {
        if self.is_zero() {
            Some(Rat::zero())
        } else if self.half_exp % 2 == 0 {
            Some(&self.value * pow_rat(self.prime, self.half_exp / 2))
        } else {
            None
        }
    }

    /// Sum of two scalars whose half-exponents have the same parity.
    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        assert_eq!(self.prime, rhs.prime);
        if self.is_zero() {
            return Ok(rhs.clone());
        }
        if rhs.is_zero() {
            return Ok(self.clone());
        }
        if (self.half_exp - rhs.half_exp) % 2 != 0 {
            return Err(Error::ParityOfHalfPowers(self.half_exp, rhs.half_exp));
        }
        let base = self.half_exp.min(rhs.half_exp);
        let lift = |s: &Self| &s.value * pow_rat(s.prime, (s.half_exp - base) / 2);
        Ok(Self::new(self.prime, lift(self) + lift(rhs), base))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::new(self.prime, &self.value * c, self.half_exp)
    }
}

impl Mul for &HalfPowerScalar {
    type Output = HalfPowerScalar;
    fn mul(self, rhs: &HalfPowerScalar) -> HalfPowerScalar {
        assert_eq!(self.prime, rhs.prime);
        HalfPowerScalar::new(self.prime, &self.value * &rhs.value, self.half_exp + rhs.half_exp)
    }
}

impl Neg for &HalfPowerScalar {
    type Output = HalfPowerScalar;
    fn neg(self) -> HalfPowerScalar {
        HalfPowerScalar { prime: self.prime, value: -&self.value, half_exp: self.half_exp }
    }
}

impl fmt::Display for HalfPowerScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.half_exp == 0 || self.is_zero() {
            write!(f, "{}", self.value)
        } else {
            write!(f, "{}*{}^({}/2)", self.value, self.prime, self.half_exp)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    #[test]
    fn normalisation_moves_p_content() {
        let s = HalfPowerScalar::new(2, int(-24), -23);
        assert_eq!(s.value(), &int(-3));
        assert_eq!(s.half_exp(), -17);
        assert!(!s.is_rational());
        let t = HalfPowerScalar::new(3, rat(5, 9), 1);
        assert_eq!(t.value(), &int(5));
        assert_eq!(t.half_exp(), -3);
    }

    #[test]
    fn products_and_sums() {
        let a = HalfPowerScalar::half_power(5, 1);
        let sq = &a * &a;
        assert_eq!(sq.to_rational(), Some(int(5)));
        let b = HalfPowerScalar::new(5, int(2), 3);
        let s = a.checked_add(&b).unwrap();
        // 5^(1/2) + 2·5^(3/2) = 11·5^(1/2)
        assert_eq!(s, HalfPowerScalar::new(5, int(11), 1));
        let one = HalfPowerScalar::one(5);
        assert!(matches!(one.checked_add(&a), Err(Error::ParityOfHalfPowers(0, 1))));
        assert_eq!(one.checked_add(&HalfPowerScalar::zero(5)).unwrap(), one);
    }

    #[test]
    fn cancellation_to_zero() {
        let a = HalfPowerScalar::new(2, int(3), 1);
        let s = a.checked_add(&-&a).unwrap();
        assert!(s.is_zero());
        assert!(s.is_rational());
    }
}

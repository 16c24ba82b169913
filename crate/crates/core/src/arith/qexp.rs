use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{Int, Rat};

/// A power series in `q` known exactly up to (excluding) `q^precision`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QExpansion {
    coeffs: Vec<Rat>,
}

impl QExpansion {
    pub fn new(coeffs: Vec<Rat>) -> Self {
        assert!(!coeffs.is_empty(), "precision must be positive");
        Self { coeffs }
    }

    pub fn from_integers<I: IntoIterator<Item = i64>>(it: I) -> Self {
        Self::new(it.into_iter().map(|c| Rat::from_integer(Int::from(c))).collect())
    }

    pub fn zero(precision: usize) -> Self {
        Self::new(vec![Rat::zero(); precision])
    }

    pub fn one(precision: usize) -> Self {
        let mut s = Self::zero(precision);
        s.coeffs[0] = Rat::one();
        s
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, i: usize) -> &Rat {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn truncate(&self, precision: usize) -> Self {
        assert!(precision >= 1 && precision <= self.precision());
        Self::new(self.coeffs[..precision].to_vec())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// f(q) ↦ f(q^m), keeping every coefficient that is determined.
    pub fn dilate(&self, m: usize) -> Self {
        let precision = (self.precision() - 1) * m + 1;
        let mut out = vec![Rat::zero(); precision];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i * m] = c.clone();
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.precision());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }
}

impl Add for &QExpansion {
    type Output = QExpansion;
    fn add(self, rhs: &QExpansion) -> QExpansion {
        let n = self.precision().min(rhs.precision());
        QExpansion::new((0..n).map(|i| &self.coeffs[i] + &rhs.coeffs[i]).collect())
    }
}

impl Sub for &QExpansion {
    type Output = QExpansion;
    fn sub(self, rhs: &QExpansion) -> QExpansion {
        let n = self.precision().min(rhs.precision());
        QExpansion::new((0..n).map(|i| &self.coeffs[i] - &rhs.coeffs[i]).collect())
    }
}

impl Neg for &QExpansion {
    type Output = QExpansion;
    fn neg(self) -> QExpansion {
        QExpansion::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &QExpansion {
    type Output = QExpansion;
    fn mul(self, rhs: &QExpansion) -> QExpansion {
        let n = self.precision().min(rhs.precision());
        let mut out = vec![Rat::zero(); n];
        for (i, a) in self.coeffs[..n].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs[..n - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        QExpansion::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use proptest::prelude::*;

    fn series(v: Vec<i64>) -> QExpansion {
        QExpansion::from_integers(v)
    }

    #[test]
    fn precision_is_min_of_operands() {
        let a = series(vec![1, 2, 3, 4]);
        let b = series(vec![1, 1]);
        assert_eq!((&a * &b).precision(), 2);
        assert_eq!((&a + &b).precision(), 2);
        assert_eq!((&a * &b).coeffs(), &[int(1), int(3)]);
    }

    #[test]
    fn dilation() {
        let a = series(vec![1, 2, 3]);
        assert_eq!(a.dilate(4).coeffs(), series(vec![1, 0, 0, 0, 2, 0, 0, 0, 3]).coeffs());
    }

    proptest! {
        #[test]
        fn ring_laws(
            a in proptest::collection::vec(-50i64..50, 1..12),
            b in proptest::collection::vec(-50i64..50, 1..12),
            c in proptest::collection::vec(-50i64..50, 1..12),
        ) {
            let (a, b, c) = (series(a), series(b), series(c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }
    }
}

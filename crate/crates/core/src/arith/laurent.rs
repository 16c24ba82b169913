use num_traits::Pow;

use super::{HalfPowerScalar, Int, Rat};
use crate::error::Result;

/// `u_0 + Σ_j u_j (X^j + X^{-j})` with coefficients carrying half-powers of
/// a single prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricLaurentPoly {
    prime: u64,
    constant: HalfPowerScalar,
    pairs: Vec<HalfPowerScalar>,
}

/// `P_0 .. P_upto` for `P_0 = 2`, `P_1 = a`, `P_{j+1} = a P_j - p^w P_{j-1}`.
///
/// With `a = p^{w/2}(x + x^{-1})` this gives `P_j = p^{jw/2}(x^j + x^{-j})`.
pub fn chebyshev_values(ap: &Int, p: u64, w: u32, upto: usize) -> Vec<Int> {
    let pw = Int::from(p).pow(w);
    let mut out = vec![Int::from(2), ap.clone()];
    while out.len() <= upto {
        let n = out.len();
        let next = ap * &out[n - 1] - &pw * &out[n - 2];
        out.push(next);
    }
    out.truncate(upto + 1);
    out
}

impl SymmetricLaurentPoly {
    pub fn new(prime: u64, constant: HalfPowerScalar, mut pairs: Vec<HalfPowerScalar>) -> Self {
        assert_eq!(constant.prime(), prime);
        assert!(pairs.iter().all(|c| c.prime() == prime));
        while pairs.last().is_some_and(|c| c.is_zero()) {
            pairs.pop();
        }
        Self { prime, constant, pairs }
    }

    pub fn zero(prime: u64) -> Self {
        Self::new(prime, HalfPowerScalar::zero(prime), Vec::new())
    }

    pub fn one(prime: u64) -> Self {
        Self::new(prime, HalfPowerScalar::one(prime), Vec::new())
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.pairs.is_empty()
    }

    /// Largest `j` with a nonzero coefficient of `X^j + X^{-j}`.
    pub fn degree(&self) -> usize {
        self.pairs.len()
    }

    /// Coefficient of `X^j` (equal to that of `X^{-j}`).
    pub fn coeff(&self, j: usize) -> HalfPowerScalar {
        match j {
            0 => self.constant.clone(),
            _ => self.pairs.get(j - 1).cloned().unwrap_or_else(|| HalfPowerScalar::zero(self.prime)),
        }
    }

    /// Value at the Satake point `X = α_p`, where `a(p) = p^{w/2}(α_p + α_p^{-1})`.
    /// Only `a(p)` and `p` enter; no approximation of `α_p` is formed.
    pub fn eval_chebyshev(&self, ap: &Rat, w: u32) -> Result<HalfPowerScalar> {
        assert!(ap.is_integer(), "Hecke eigenvalue must be integral");
        let pj = chebyshev_values(ap.numer(), self.prime, w, self.degree());
        let mut acc = self.constant.clone();
        for (j, u) in self.pairs.iter().enumerate() {
            let j = j + 1;
            let term = HalfPowerScalar::new(self.prime, Rat::from_integer(pj[j].clone()), -(j as i64) * w as i64);
            acc = acc.checked_add(&(u * &term))?;
        }
        Ok(acc)
    }

    /// Exact evaluation at `X = p^{e/2}` for an integer `e`.
    pub fn eval_at_half_power(&self, e: i64) -> Result<HalfPowerScalar> {
        let mut acc = self.constant.clone();
        for (j, u) in self.pairs.iter().enumerate() {
            let j = j as i64 + 1;
            let x = HalfPowerScalar::half_power(self.prime, j * e);
            let xi = HalfPowerScalar::half_power(self.prime, -j * e);
            acc = acc.checked_add(&(u * &x))?;
            acc = acc.checked_add(&(u * &xi))?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, pow_rat};
    use num_traits::Zero;
    use std::collections::BTreeMap;

    #[test]
    fn constant_one() {
        let p = SymmetricLaurentPoly::one(2);
        let v = p.eval_chebyshev(&int(-24), 11).unwrap();
        assert_eq!(v, HalfPowerScalar::one(2));
    }

    #[test]
    fn first_pair_gives_ap() {
        let p = SymmetricLaurentPoly::new(2, HalfPowerScalar::zero(2), vec![HalfPowerScalar::one(2)]);
        let v = p.eval_chebyshev(&int(-24), 23).unwrap();
        assert_eq!(v, HalfPowerScalar::new(2, int(-24), -23));
        assert_eq!(v.value(), &int(-3));
        assert_eq!(v.half_exp(), -17);
    }

    #[test]
    fn second_pair() {
        let p = 3u64;
        let w = 17u32;
        let ap = int(-3348);
        let poly = SymmetricLaurentPoly::new(
            p,
            HalfPowerScalar::zero(p),
            vec![HalfPowerScalar::zero(p), HalfPowerScalar::one(p)],
        );
        let v = poly.eval_chebyshev(&ap, w).unwrap();
        let pw = pow_rat(p, w as i64);
        let expected = (&ap * &ap - int(2) * &pw) / &pw;
        assert_eq!(v.to_rational().unwrap(), expected);
    }

    /// Laurent polynomials in X as exponent -> coefficient maps.
    fn laurent_mul(a: &BTreeMap<i64, i64>, b: &BTreeMap<i64, i64>) -> BTreeMap<i64, i64> {
        let mut out = BTreeMap::new();
        for (ea, ca) in a {
            for (eb, cb) in b {
                *out.entry(ea + eb).or_insert(0) += ca * cb;
            }
        }
        out.retain(|_, c| *c != 0);
        out
    }

    #[test]
    fn recursion_matches_symbolic_expansion() {
        // Express X^j + X^{-j} as a polynomial in s = X + X^{-1} by peeling
        // off the top power of s; then P_j(a) must be Σ c_i a^i p^{w(j-i)/2}.
        let s: BTreeMap<i64, i64> = [(1, 1), (-1, 1)].into_iter().collect();
        let mut s_pows = vec![[(0i64, 1i64)].into_iter().collect::<BTreeMap<_, _>>()];
        for i in 1..=8 {
            let next = laurent_mul(&s_pows[i - 1], &s);
            s_pows.push(next);
        }
        let (p, w) = (2u64, 11u32);
        for j in 1..=8usize {
            let mut target: BTreeMap<i64, i64> = [(j as i64, 1), (-(j as i64), 1)].into_iter().collect();
            let mut c = vec![0i64; j + 1];
            for i in (0..=j).rev() {
                let lead = *target.get(&(i as i64)).unwrap_or(&0);
                c[i] = lead;
                for (e, v) in &s_pows[i] {
                    *target.entry(*e).or_insert(0) -= lead * v;
                }
                target.retain(|_, v| *v != 0);
            }
            assert!(target.is_empty());
            for a in [-24i64, 0, 7, 252] {
                let pj = &chebyshev_values(&Int::from(a), p, w, j)[j];
                let mut expect = Rat::zero();
                for (i, ci) in c.iter().enumerate() {
                    if *ci == 0 {
                        continue;
                    }
                    assert_eq!((j - i) % 2, 0);
                    expect += int(*ci) * int(a).pow(i as i32) * pow_rat(p, (w as i64) * ((j - i) as i64) / 2);
                }
                assert_eq!(Rat::from_integer(pj.clone()), expect, "j={j} a={a}");
            }
        }
    }

    #[test]
    fn symmetric_under_inversion() {
        let p = 5u64;
        let poly = SymmetricLaurentPoly::new(
            p,
            HalfPowerScalar::new(p, int(3), 0),
            vec![HalfPowerScalar::new(p, int(2), 2), HalfPowerScalar::new(p, int(-1), 4)],
        );
        for e in [-4i64, -2, 2, 6] {
            assert_eq!(poly.eval_at_half_power(e).unwrap(), poly.eval_at_half_power(-e).unwrap());
        }
    }
}

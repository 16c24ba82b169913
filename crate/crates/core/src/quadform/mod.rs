//! Positive-definite half-integral symmetric matrices `T`, stored as the even
//! integral matrix `2T`.

mod enumerate;
mod jordan;

pub use enumerate::{enumerate_forms, gauss_reduce, signed_permutation_key, Bound};
pub use jordan::{jordan, JordanBlock, JordanSplitting};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{factorize, fundamental_part};
use crate::error::{Error, Result};

/// Determinant of a square integer matrix by fraction-free elimination.
pub fn det_bareiss(a: &[Vec<i64>]) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut m: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(swap) = (k + 1..n).find(|&i| m[i][k] != 0) else {
                return 0;
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// A positive-definite half-integral symmetric matrix `T`, held as `2T`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct HalfIntegralMatrix {
    two_t: Vec<Vec<i64>>,
}

impl HalfIntegralMatrix {
    /// Validates symmetry, even diagonal and positive definiteness of `2T`.
    pub fn new(two_t: Vec<Vec<i64>>) -> Result<Self> {
        let m = two_t.len();
        if m == 0 || two_t.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidMatrix("not a square matrix".into()));
        }
        for i in 0..m {
            if two_t[i][i] % 2 != 0 {
                return Err(Error::InvalidMatrix(format!("odd diagonal entry {}", two_t[i][i])));
            }
            for j in 0..i {
                if two_t[i][j] != two_t[j][i] {
                    return Err(Error::InvalidMatrix("not symmetric".into()));
                }
            }
        }
        for k in 1..=m {
            let minor: Vec<Vec<i64>> = two_t[..k].iter().map(|r| r[..k].to_vec()).collect();
            if det_bareiss(&minor) <= 0 {
                return Err(Error::InvalidMatrix("not positive definite".into()));
            }
        }
        Ok(Self { two_t })
    }

    pub fn size(&self) -> usize {
        self.two_t.len()
    }

    pub fn two_t(&self) -> &[Vec<i64>] {
        &self.two_t
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.two_t[i][j]
    }

    pub fn det_two_t(&self) -> i64 {
        det_bareiss(&self.two_t) as i64
    }

    pub fn trace_two_t(&self) -> i64 {
        (0..self.size()).map(|i| self.two_t[i][i]).sum()
    }

    /// `T[U] = Uᵀ T U`.
    pub fn transform(&self, u: &[Vec<i64>]) -> Result<Self> {
        let m = self.size();
        if u.len() != m || u.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidMatrix("transformation has the wrong size".into()));
        }
        let mut out = vec![vec![0i64; m]; m];
        for i in 0..m {
            for j in 0..m {
                let mut acc = 0i128;
                for k in 0..m {
                    for l in 0..m {
                        acc += u[k][i] as i128 * self.two_t[k][l] as i128 * u[l][j] as i128;
                    }
                }
                out[i][j] = i64::try_from(acc).map_err(|_| Error::InvalidMatrix("entry overflow".into()))?;
            }
        }
        Self::new(out)
    }
}

impl fmt::Display for HalfIntegralMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> =
            self.two_t.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")).collect();
        write!(f, "{}", rows.join(";"))
    }
}

/// Parses rows of `2T` written as `"a,b;b,c"`.
impl FromStr for HalfIntegralMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rows = s
            .split(';')
            .map(|row| {
                row.split(',')
                    .map(|x| x.trim().parse::<i64>().map_err(|e| Error::InvalidMatrix(format!("{x:?}: {e}"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows)
    }
}

/// Arithmetic invariants of `T` of size `m = 2n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormInvariants {
    pub det_two_t: i64,
    /// `(-1)^n det(2T)`.
    pub disc: i64,
    /// Fundamental discriminant with `disc = d f²`.
    pub d: i64,
    pub f_total: u64,
    /// `p ↦ ord_p f` for the primes dividing `f`.
    pub f_at_p: BTreeMap<u64, u32>,
    /// `D_B = det(2T)`.
    pub db: i64,
}

impl FormInvariants {
    pub fn f_at(&self, p: u64) -> u32 {
        self.f_at_p.get(&p).copied().unwrap_or(0)
    }

    /// Primes dividing `det(2T)`.
    pub fn bad_primes(&self) -> Vec<u64> {
        factorize(self.det_two_t.unsigned_abs()).into_iter().map(|(p, _)| p).collect()
    }
}

pub fn invariants(t: &HalfIntegralMatrix) -> Result<FormInvariants> {
    let m = t.size();
    if !m.is_multiple_of(2) {
        return Err(Error::InvalidMatrix(format!("size {m} is odd")));
    }
    let det = t.det_two_t();
    let disc = if (m / 2).is_multiple_of(2) { det } else { -det };
    let (d, f) = fundamental_part(disc)?;
    let f_at_p = factorize(f).into_iter().collect();
    Ok(FormInvariants { det_two_t: det, disc, d, f_total: f, f_at_p, db: det })
}

/// One factor of a unimodular matrix built by [`unimodular_from_steps`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnimodularStep {
    /// Add `c` times column `from` to column `to`.
    Shear { to: usize, from: usize, c: i64 },
    Swap(usize, usize),
    Negate(usize),
}

pub fn identity(m: usize) -> Vec<Vec<i64>> {
    (0..m).map(|i| (0..m).map(|j| i64::from(i == j)).collect()).collect()
}

pub fn unimodular_from_steps(m: usize, steps: &[UnimodularStep]) -> Vec<Vec<i64>> {
    let mut u = identity(m);
    for step in steps {
        match *step {
            UnimodularStep::Shear { to, from, c } => {
                assert_ne!(to, from);
                for row in u.iter_mut() {
                    row[to] += c * row[from];
                }
            }
            UnimodularStep::Swap(i, j) => {
                for row in u.iter_mut() {
                    row.swap(i, j);
                }
            }
            UnimodularStep::Negate(i) => {
                for row in u.iter_mut() {
                    row[i] = -row[i];
                }
            }
        }
    }
    u
}

/// A random element of `GL_m(Z)`: a product of `2m` shears with
/// `|c| ≤ entry_bound`, a permutation and sign changes.
pub fn random_unimodular(m: usize, entry_bound: i64, seed: u64) -> Vec<Vec<i64>> {
    assert!(entry_bound >= 1 && m >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut steps = Vec::new();
    if m > 1 {
        for _ in 0..2 * m {
            let to = rng.gen_range(0..m);
            let from = (to + rng.gen_range(1..m)) % m;
            let c = rng.gen_range(1..=entry_bound) * if rng.gen_bool(0.5) { 1 } else { -1 };
            steps.push(UnimodularStep::Shear { to, from, c });
        }
        for i in (1..m).rev() {
            steps.push(UnimodularStep::Swap(i, rng.gen_range(0..=i)));
        }
    }
    for i in 0..m {
        if rng.gen_bool(0.5) {
            steps.push(UnimodularStep::Negate(i));
        }
    }
    unimodular_from_steps(m, &steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{prop_assert, prop_assert_eq, prop_assume, proptest};

    fn form(s: &str) -> HalfIntegralMatrix {
        s.parse().unwrap()
    }

    #[test]
    fn parsing_and_validation() {
        assert_eq!(form("2,1;1,2").det_two_t(), 3);
        assert_eq!(form("2, 1; 1, 2").to_string(), "2,1;1,2");
        assert!(matches!("2,1;0,2".parse::<HalfIntegralMatrix>(), Err(Error::InvalidMatrix(_))));
        assert!("1,0;0,2".parse::<HalfIntegralMatrix>().is_err());
        assert!("2,2;2,2".parse::<HalfIntegralMatrix>().is_err());
        assert!("-2,0;0,-2".parse::<HalfIntegralMatrix>().is_err());
        assert!("2,x;x,2".parse::<HalfIntegralMatrix>().is_err());
    }

    #[test]
    fn invariant_examples() {
        let a = invariants(&form("2,1;1,2")).unwrap();
        assert_eq!((a.det_two_t, a.disc, a.d, a.f_total), (3, -3, -3, 1));
        let b = invariants(&form("2,0;0,2")).unwrap();
        assert_eq!((b.disc, b.d, b.f_total), (-4, -4, 1));
        let c = invariants(&form("2,0;0,8")).unwrap();
        assert_eq!((c.disc, c.d, c.f_total, c.f_at(2)), (-16, -4, 2, 1));
        let d4 = invariants(&form("2,1,0,0;1,2,0,0;0,0,2,1;0,0,1,2")).unwrap();
        assert_eq!((d4.disc, d4.d, d4.f_total), (9, 1, 3));
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        fn cofactor(a: &[Vec<i64>]) -> i128 {
            if a.len() == 1 {
                return a[0][0] as i128;
            }
            (0..a.len())
                .map(|j| {
                    let minor: Vec<Vec<i64>> =
                        a[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| *x).collect()).collect();
                    let s = if j % 2 == 0 { 1 } else { -1 };
                    s * a[0][j] as i128 * cofactor(&minor)
                })
                .sum()
        }
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=5 {
            for _ in 0..50 {
                let a: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-5..=5)).collect()).collect();
                assert_eq!(det_bareiss(&a), cofactor(&a));
            }
        }
    }

    #[test]
    fn unimodular_examples() {
        assert_eq!(unimodular_from_steps(3, &[]), identity(3));
        let shear = unimodular_from_steps(2, &[UnimodularStep::Shear { to: 1, from: 0, c: 5 }]);
        assert_eq!(shear, vec![vec![1, 5], vec![0, 1]]);
        assert_eq!(det_bareiss(&shear), 1);
        for seed in 0..200 {
            for m in [1usize, 2, 4] {
                assert_eq!(det_bareiss(&random_unimodular(m, 2, seed)).abs(), 1);
            }
        }
        assert_eq!(random_unimodular(4, 3, 11), random_unimodular(4, 3, 11));
    }

    proptest! {
        #[test]
        fn invariants_are_gl_invariant(a in 1i64..12, c in 1i64..12, b in -11i64..12, seed in 0u64..1000) {
            prop_assume!(b.abs() <= a.min(c) && 4 * a * c - b * b > 0);
            let t = HalfIntegralMatrix::new(vec![vec![2 * a, b], vec![b, 2 * c]]).unwrap();
            let u = random_unimodular(2, 2, seed);
            let tu = t.transform(&u).unwrap();
            prop_assert_eq!(invariants(&t).unwrap(), invariants(&tu).unwrap());
        }

        #[test]
        fn quaternary_discriminants_are_discriminants(seed in 0u64..500) {
            let base = form("2,1,0,0;1,2,1,0;0,1,4,1;0,0,1,6");
            let t = base.transform(&random_unimodular(4, 1, seed)).unwrap();
            let inv = invariants(&t).unwrap();
            prop_assert!(matches!(inv.disc.rem_euclid(4), 0 | 1));
            prop_assert_eq!(inv, invariants(&base).unwrap());
        }
    }
}

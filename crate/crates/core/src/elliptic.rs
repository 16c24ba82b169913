//! Level-one elliptic modular forms: Eisenstein series, Δ, and the normalized
//! eigenforms spanning the one-dimensional cusp spaces.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::arith::{bernoulli, int, is_prime, sigma, Int, QExpansion, Rat};
use crate::error::{Error, Result};

/// Weights `2κ` whose cusp space is one-dimensional.
pub const SUPPORTED_WEIGHTS: [u32; 6] = [12, 16, 18, 20, 22, 26];

pub const DEFAULT_PRECISION: usize = 64;

/// `E_k = 1 - (2k / B_k) Σ σ_{k-1}(n) q^n`.
pub fn eisenstein_qexp(k: u32, precision: usize) -> QExpansion {
    assert!(k >= 4 && k.is_multiple_of(2), "Eisenstein weight must be even and at least 4");
    let factor = -int(2 * k as i64) / bernoulli(k as usize);
    let mut coeffs = vec![Rat::zero(); precision];
    if precision > 0 {
        coeffs[0] = Rat::one();
    }
    for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
        *c = &factor * Rat::from_integer(sigma(k - 1, n as u64));
    }
    QExpansion::new(coeffs)
}

/// `Δ = q Π (1 - q^n)^24`.
pub fn delta_qexp(precision: usize) -> QExpansion {
    assert!(precision >= 1);
    // Π (1 - q^n) to precision - 1, then raise to the 24th power and shift.
    let inner = precision - 1;
    let mut eta = vec![Int::zero(); inner.max(1)];
    eta[0] = Int::one();
    for n in 1..inner {
        for i in (n..inner).rev() {
            let t = eta[i - n].clone();
            eta[i] -= t;
        }
    }
    let eta = QExpansion::new(eta.into_iter().map(Rat::from_integer).collect());
    let p24 = eta.pow(24);
    let mut coeffs = vec![Rat::zero(); precision];
    for i in 0..inner {
        coeffs[i + 1] = p24.coeff(i).clone();
    }
    QExpansion::new(coeffs)
}

/// Dimension of the space of level-one modular forms of weight `w`.
pub fn dim_modular(w: u32) -> usize {
    if w % 2 == 1 || w == 2 {
        0
    } else if w % 12 == 2 {
        (w / 12) as usize
    } else {
        (w / 12) as usize + 1
    }
}

/// Dimension of the level-one cusp space of weight `w`.
pub fn dim_cusp(w: u32) -> usize {
    match w {
        0 => 0,
        _ => dim_modular(w).saturating_sub(1),
    }
}

/// The monomials `E_4^a E_6^b` of weight `w`, a basis of the level-one forms.
pub fn modular_basis(w: u32, precision: usize) -> Vec<QExpansion> {
    let e4 = eisenstein_qexp(4, precision);
    let e6 = eisenstein_qexp(6, precision);
    let mut out = Vec::new();
    for b in 0..=w / 6 {
        let rest = w - 6 * b;
        if rest.is_multiple_of(4) {
            out.push(&e4.pow(rest / 4) * &e6.pow(b));
        }
    }
    out
}

/// A normalized Hecke eigenform of level one spanning its cusp space.
#[derive(Debug, Clone)]
pub struct EllipticEigenform {
    weight: u32,
    qexp: QExpansion,
    ap: BTreeMap<u64, Int>,
}

impl EllipticEigenform {
    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn qexp(&self) -> &QExpansion {
        &self.qexp
    }

    pub fn ap_table(&self) -> &BTreeMap<u64, Int> {
        &self.ap
    }

    /// Hecke eigenvalue at a prime inside the working precision.
    pub fn ap(&self, p: u64) -> Result<&Int> {
        self.ap.get(&p).ok_or(Error::OutOfBound { index: p, bound: self.qexp.precision() as u64 - 1 })
    }

    /// Coefficient of `q^n` as an integer.
    pub fn coeff(&self, n: usize) -> Int {
        self.qexp.coeff(n).numer().clone()
    }
}

/// The normalized eigenform of weight `two_kappa`, with `a(p)` tabulated for
/// primes below `precision`.
pub fn eigenform(two_kappa: u32, precision: usize) -> Result<EllipticEigenform> {
    let (e4, e6) = match two_kappa {
        12 => (0, 0),
        16 => (1, 0),
        18 => (0, 1),
        20 => (2, 0),
        22 => (1, 1),
        26 => (2, 1),
        w => return Err(Error::UnsupportedWeight(w as i64)),
    };
    let precision = precision.max(3);
    let mut f = delta_qexp(precision);
    let e4s = eisenstein_qexp(4, precision);
    let e6s = eisenstein_qexp(6, precision);
    for _ in 0..e4 {
        f = &f * &e4s;
    }
    for _ in 0..e6 {
        f = &f * &e6s;
    }
    debug_assert!(f.coeff(1).is_one());
    debug_assert!(f.coeffs().iter().all(|c| c.is_integer()));
    let ap = (2..precision as u64)
        .filter(|&p| is_prime(p))
        .map(|p| (p, f.coeff(p as usize).numer().clone()))
        .collect();
    Ok(EllipticEigenform { weight: two_kappa, qexp: f, ap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Int;
    use num_integer::Integer;
    use num_traits::Pow;

    #[test]
    fn eisenstein_examples() {
        assert_eq!(eisenstein_qexp(4, 3), QExpansion::from_integers([1, 240, 2160]));
        assert_eq!(eisenstein_qexp(6, 2), QExpansion::from_integers([1, -504]));
        assert_eq!(eisenstein_qexp(4, 1), QExpansion::from_integers([1]));
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_qexp(3), QExpansion::from_integers([0, 1, -24]));
        assert_eq!(delta_qexp(4), QExpansion::from_integers([0, 1, -24, 252]));
        let d = delta_qexp(12);
        assert_eq!(d.coeff(11), &int(534612));
    }

    #[test]
    fn delta_from_eisenstein() {
        let n = 100;
        let e4 = eisenstein_qexp(4, n);
        let e6 = eisenstein_qexp(6, n);
        let diff = &e4.pow(3) - &e6.pow(2);
        assert_eq!(diff, delta_qexp(n).scale(&int(1728)));
    }

    #[test]
    fn dimensions() {
        let dims: Vec<usize> = (0..=26).step_by(2).map(dim_modular).collect();
        assert_eq!(dims, vec![1, 0, 1, 1, 1, 1, 2, 1, 2, 2, 2, 2, 3, 2]);
        for w in (0..=40).step_by(2) {
            assert_eq!(modular_basis(w, 4).len(), dim_modular(w), "weight {w}");
        }
        for w in SUPPORTED_WEIGHTS {
            assert_eq!(dim_cusp(w), 1);
        }
    }

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(eigenform(12, 10).unwrap().ap(2).unwrap(), &Int::from(-24));
        assert_eq!(eigenform(18, 10).unwrap().ap(2).unwrap(), &Int::from(-528));
        for w in SUPPORTED_WEIGHTS {
            assert_eq!(eigenform(w, 10).unwrap().coeff(1), Int::from(1));
        }
        assert!(matches!(eigenform(14, 10), Err(Error::UnsupportedWeight(14))));
        assert!(matches!(eigenform(24, 10), Err(Error::UnsupportedWeight(24))));
    }

    #[test]
    fn hecke_multiplicativity() {
        let n = 200;
        for w in SUPPORTED_WEIGHTS {
            let f = eigenform(w, n).unwrap();
            for a in 1..n {
                for b in 1..n {
                    if a * b < n && a.gcd(&b) == 1 {
                        assert_eq!(f.coeff(a * b), f.coeff(a) * f.coeff(b), "weight {w}: {a}*{b}");
                    }
                }
            }
            for p in (2..n as u64).filter(|&p| is_prime(p)) {
                let p2 = (p * p) as usize;
                if p2 < n {
                    let ap = f.ap(p).unwrap();
                    assert_eq!(f.coeff(p2), ap * ap - Int::from(p).pow(w - 1));
                }
            }
        }
    }
}

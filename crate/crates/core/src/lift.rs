//! Fourier coefficients of the lift
//!
//! ```text
//! a(T) = c(|d_T|) · ∏_{p | f_T} G_p,   G_p = p^{(κ-1/2) f_p} F̃_p(T, α_p)
//! ```
//!
//! where `(-1)^n det(2T) = d_T f_T²` with `d_T` fundamental. `α_p` never
//! appears numerically: `X^j + X^{-j}` at `α_p` is `P_j(a(p)) p^{-j(2κ-1)/2}`
//! with the Hecke polynomials `P_j`, so every term is a rational multiple of
//! a half-power of `p` whose exponent must come out even.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{chebyshev_values, divisors, pow_rat, HalfPowerScalar, Poly, Rat};
use crate::elliptic::{eigenform, EllipticEigenform, DEFAULT_PRECISION};
use crate::error::{Error, Result};
use crate::kohnen::{check_eligibility, plus_space_eigenform, PlusSpaceForm};
use crate::quadform::{enumerate_forms, invariants, Bound, HalfIntegralMatrix};
use crate::report::Report;
use crate::siegel::SiegelCache;

/// Everything needed to evaluate the lift of the weight-`2κ` eigenform to
/// degree `2n`.
#[derive(Debug, Clone)]
pub struct LiftJob {
    kappa: u32,
    n: u32,
    bound: Bound,
    eigenform: EllipticEigenform,
    h: PlusSpaceForm,
    cache: Arc<SiegelCache>,
}

/// `max det(2T)` over positive forms of size `m` with `trace(2T) ≤ tr`.
fn det_ceiling(m: usize, bound: Bound) -> u64 {
    match bound {
        Bound::Det(d) => d.max(0) as u64,
        // AM-GM on the eigenvalues of 2T
        Bound::Trace(t) => (t.max(0) as u64 / m as u64 + 1).pow(m as u32),
    }
}

impl LiftJob {
    /// Sets up `f`, `h` and the Siegel cache for forms within `bound`.
    pub fn new(kappa: u32, n: u32, bound: Bound) -> Result<Self> {
        check_eligibility(kappa, n)?;
        let dmax = det_ceiling(2 * n as usize, bound).max(4);
        let precision = DEFAULT_PRECISION.max(dmax.isqrt() as usize + 2);
        let eigenform = eigenform(2 * kappa, precision)?;
        let h = plus_space_eigenform(kappa, n, dmax)?;
        Ok(Self { kappa, n, bound, eigenform, h, cache: Arc::new(SiegelCache::new()) })
    }

    /// The same job with `h` replaced by `λ h`.
    pub fn scaled(&self, lambda: &Rat) -> Self {
        Self { h: self.h.scaled(lambda), ..self.clone() }
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Siegel degree `2n`.
    pub fn degree(&self) -> usize {
        2 * self.n as usize
    }

    /// `κ + n`.
    pub fn weight(&self) -> u32 {
        self.kappa + self.n
    }

    pub fn bound(&self) -> Bound {
        self.bound
    }

    pub fn eigenform(&self) -> &EllipticEigenform {
        &self.eigenform
    }

    pub fn h(&self) -> &PlusSpaceForm {
        &self.h
    }

    pub fn cache(&self) -> &SiegelCache {
        &self.cache
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftCoefficient {
    pub t: HalfIntegralMatrix,
    pub det_two_t: i64,
    /// `(-1)^n det(2T)`.
    pub disc: i64,
    pub d: i64,
    pub f: u64,
    /// `|d|`, the index at which `c` is read.
    pub c_arg: u64,
    pub c_value: Rat,
    /// `p ↦ G_p`.
    pub local_factors: BTreeMap<u64, Rat>,
    pub value: Rat,
}

/// The terms of `G_p = p^{(κ-1/2) e} F̃_p(T, α_p)`: one per power of
/// `X + X^{-1}`, each `u_j P_j(a(p)) p^{(e - j)(2κ-1)/2}`.
pub fn local_factor_terms(job: &LiftJob, t: &HalfIntegralMatrix, p: u64) -> Result<Vec<HalfPowerScalar>> {
    let inv = invariants(t)?;
    let e = inv.f_at(p) as i64;
    let tilde = crate::siegel::normalize(&job.cache.get(t, p)?)?.poly;
    let w = 2 * job.kappa - 1;
    let ap = job.eigenform.ap(p)?;
    let pj = chebyshev_values(ap, p, w, tilde.degree());
    let lead = HalfPowerScalar::half_power(p, e * w as i64);
    let mut terms = vec![&lead * &tilde.coeff(0)];
    for (j, pj) in pj.iter().enumerate().skip(1) {
        let x = HalfPowerScalar::new(p, Rat::from_integer(pj.clone()), -(j as i64) * w as i64);
        terms.push(&(&lead * &tilde.coeff(j)) * &x);
    }
    Ok(terms)
}

/// `G_p` as a rational number; a term with an odd half-exponent is an error.
pub fn local_factor(job: &LiftJob, t: &HalfIntegralMatrix, p: u64) -> Result<Rat> {
    let mut acc = Rat::zero();
    for term in local_factor_terms(job, t, p)? {
        acc += term.to_rational().ok_or(Error::NonIntegralExponent { p, exponent: term.half_exp() })?;
    }
    Ok(acc)
}

pub fn lift_coefficient(job: &LiftJob, t: &HalfIntegralMatrix) -> Result<LiftCoefficient> {
    if t.size() != job.degree() {
        return Err(Error::InvalidMatrix(format!("size {} but the lift has degree {}", t.size(), job.degree())));
    }
    let inv = invariants(t)?;
    let c_arg = inv.d.unsigned_abs();
    let c_value = job.h.c(c_arg)?;
    let mut local_factors = BTreeMap::new();
    let mut value = c_value.clone();
    for &p in inv.f_at_p.keys() {
        let g = local_factor(job, t, p)?;
        value *= &g;
        local_factors.insert(p, g);
    }
    Ok(LiftCoefficient {
        t: t.clone(),
        det_two_t: inv.det_two_t,
        disc: inv.disc,
        d: inv.d,
        f: inv.f_total,
        c_arg,
        c_value,
        local_factors,
        value,
    })
}

fn at_form(t: &HalfIntegralMatrix, e: Error) -> Error {
    Error::AtForm { gram: t.to_string(), source: Box::new(e) }
}

/// Coefficients at every reduced form within the job's bound, ordered by
/// `det(2T)` and then lexicographically.
pub fn fourier_table(job: &LiftJob) -> Result<Vec<LiftCoefficient>> {
    let forms = enumerate_forms(job.degree(), job.bound, true);
    forms.par_iter().map(|t| lift_coefficient(job, t).map_err(|e| at_form(t, e))).collect()
}

/// The Maass relation for `n = 1`:
/// `a([a, r/2; r/2, b]) = Σ_{e | (a, r, b)} e^κ c((4ab - r²) / e²)`.
pub fn maass_check(job: &LiftJob, max_det: i64) -> Result<Report> {
    if job.n != 1 {
        return Err(Error::Invalid("the Maass relation needs n = 1".into()));
    }
    let mut report = Report::new("maass");
    let forms = enumerate_forms(2, Bound::Det(max_det), true);
    let results: Vec<Result<(Rat, Rat)>> = forms
        .par_iter()
        .map(|t| {
            let (a, r, b) = (t.entry(0, 0) / 2, t.entry(0, 1), t.entry(1, 1) / 2);
            let content = num_integer::Integer::gcd(&num_integer::Integer::gcd(&a, &r), &b) as u64;
            let disc = t.det_two_t() as u64;
            let mut expected = Rat::zero();
            for e in divisors(content) {
                expected += pow_rat(e, job.kappa as i64) * job.h.c(disc / (e * e))?;
            }
            let found = lift_coefficient(job, t)?.value;
            Ok((expected, found))
        })
        .collect();
    for (t, r) in forms.iter().zip(results) {
        let (expected, found) = r.map_err(|e| at_form(t, e))?;
        report.check(expected == found, || format!("{t}: Maass sum {expected}, lift {found}"));
    }
    Ok(report)
}

/// `a(T[U]) = a(T)` for `samples` random unimodular `U` per form.
pub fn invariance_check(job: &LiftJob, forms: &[HalfIntegralMatrix], samples: usize, seed: u64) -> Result<Report> {
    let m = job.degree();
    let mut report = Report::new("invariance");
    let results: Vec<Result<Vec<(String, Rat, Rat)>>> = forms
        .par_iter()
        .enumerate()
        .map(|(i, t)| {
            let base = lift_coefficient(job, t)?.value;
            let mut out = Vec::with_capacity(samples);
            for s in 0..samples {
                let u = crate::quadform::random_unimodular(m, 2, seed ^ ((i as u64) << 20) ^ s as u64);
                let tu = t.transform(&u)?;
                let v = lift_coefficient(job, &tu)?.value;
                out.push((tu.to_string(), base.clone(), v));
            }
            Ok(out)
        })
        .collect();
    for (t, r) in forms.iter().zip(results) {
        for (tu, a, b) in r.map_err(|e| at_form(t, e))? {
            report.check(a == b, || format!("{t} gives {a} but {tu} gives {b}"));
        }
    }
    Ok(report)
}

/// The reciprocal local factor of the standard L-function,
/// `(1 - Y) ∏_{i=1}^{2n} (1 - a(p) p^{i-n-κ} Y + p^{2i-2n-1} Y²)` in
/// `Y = p^{-s}`.
pub fn standard_l_factors(job: &LiftJob, p: u64) -> Result<Poly> {
    let ap = Rat::from_integer(job.eigenform.ap(p)?.clone());
    let n = job.n as i64;
    let k = job.kappa as i64;
    let mut acc = Poly::from_ints(&[1, -1]);
    for i in 1..=2 * n {
        let quad = Poly::new(vec![Rat::one(), -&ap * pow_rat(p, i - n - k), pow_rat(p, 2 * i - 2 * n - 1)]);
        acc = &acc * &quad;
    }
    Ok(acc)
}

/// Serializable form of a [`LiftCoefficient`], with rationals as strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoefficientRecord {
    pub gram: Vec<Vec<i64>>,
    #[serde(rename = "det2T")]
    pub det_two_t: i64,
    #[serde(rename = "D")]
    pub disc: i64,
    pub d: i64,
    pub f: u64,
    pub c_arg: u64,
    pub local_factors: BTreeMap<u64, String>,
    pub value: String,
}

impl From<&LiftCoefficient> for CoefficientRecord {
    fn from(c: &LiftCoefficient) -> Self {
        Self {
            gram: c.t.two_t().to_vec(),
            det_two_t: c.det_two_t,
            disc: c.disc,
            d: c.d,
            f: c.f,
            c_arg: c.c_arg,
            local_factors: c.local_factors.iter().map(|(p, g)| (*p, g.to_string())).collect(),
            value: c.value.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn form(s: &str) -> HalfIntegralMatrix {
        s.parse().unwrap()
    }

    #[test]
    fn examples() {
        let job = LiftJob::new(9, 1, Bound::Det(60)).unwrap();
        let a = lift_coefficient(&job, &form("2,1;1,2")).unwrap();
        assert_eq!(a.value, int(1));
        assert!(a.local_factors.is_empty());
        let b = lift_coefficient(&job, &form("2,0;0,2")).unwrap();
        assert_eq!(b.value, job.h().c(4).unwrap());
        assert_eq!(b.c_arg, 4);
    }

    #[test]
    fn eligibility() {
        assert!(matches!(LiftJob::new(7, 1, Bound::Det(10)), Err(Error::UnsupportedKappa(7))));
        assert!(matches!(LiftJob::new(9, 2, Bound::Det(10)), Err(Error::ParityMismatch { .. })));
        assert!(LiftJob::new(6, 2, Bound::Trace(8)).is_ok());
    }

    #[test]
    fn table_order_and_first_entries() {
        let job = LiftJob::new(9, 1, Bound::Det(4)).unwrap();
        let table = fourier_table(&job).unwrap();
        let dets: Vec<i64> = table.iter().map(|c| c.det_two_t).collect();
        assert_eq!(dets, vec![3, 4]);
        assert_eq!(table[0].value, job.h().c(3).unwrap());
        assert_eq!(table[1].value, job.h().c(4).unwrap());
        let empty = LiftJob::new(9, 1, Bound::Det(2)).unwrap();
        assert!(fourier_table(&empty).unwrap().is_empty());
    }

    #[test]
    fn maass_relation() {
        let job = LiftJob::new(9, 1, Bound::Det(200)).unwrap();
        let report = maass_check(&job, 200).unwrap();
        assert!(report.is_ok(), "{:?}", report.failures);
        assert!(report.cases > 100);
        // [[4,2],[2,4]] has content 2 and a two-term sum.
        let t = form("4,2;2,4");
        let expect = job.h().c(12).unwrap() + pow_rat(2, 9) * job.h().c(3).unwrap();
        assert_eq!(lift_coefficient(&job, &t).unwrap().value, expect);
    }

    #[test]
    fn scaling_h_scales_the_lift() {
        let job = LiftJob::new(11, 1, Bound::Det(80)).unwrap();
        let scaled = job.scaled(&int(7));
        for t in enumerate_forms(2, Bound::Det(80), true) {
            assert_eq!(lift_coefficient(&scaled, &t).unwrap().value, int(7) * lift_coefficient(&job, &t).unwrap().value);
        }
    }

    #[test]
    fn rational_terms_everywhere() {
        for (kappa, n, bound) in [(9, 1, Bound::Det(150)), (6, 2, Bound::Trace(10)), (8, 2, Bound::Trace(10))] {
            let job = LiftJob::new(kappa, n, bound).unwrap();
            for t in enumerate_forms(2 * n as usize, bound, true) {
                for p in invariants(&t).unwrap().f_at_p.keys() {
                    for term in local_factor_terms(&job, &t, *p).unwrap() {
                        assert!(term.is_rational(), "{t} at {p}: {term}");
                    }
                }
            }
        }
    }

    #[test]
    fn standard_factor_shape() {
        let job = LiftJob::new(9, 1, Bound::Det(10)).unwrap();
        let f = standard_l_factors(&job, 2).unwrap();
        assert_eq!(f.degree(), Some(5));
        assert_eq!(f.coeff(0), int(1));
        // (1 - Y) is a factor
        assert!(f.eval(&int(1)).is_zero());
        // the Y coefficient is -1 - a(2)(2^{-9} + 2^{-8})
        assert_eq!(f.coeff(1), int(-1) + int(528) * (pow_rat(2, -9) + pow_rat(2, -8)));
        let job4 = LiftJob::new(6, 2, Bound::Trace(8)).unwrap();
        assert_eq!(standard_l_factors(&job4, 3).unwrap().degree(), Some(9));
    }
}

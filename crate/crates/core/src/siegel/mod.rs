//! Local Siegel series `F_p(T, X)` and the normalized `F̃_p(T, X)`.
//!
//! `F_p` is computed from the local densities `α_p(H_k, T) = γ_p(T, p^{-k})
//! F_p(T, p^{-k})`, where the density is expanded over the superlattices of
//! `Z_p^m` on which `T` stays half-integral:
//!
//! ```text
//! α_p(H_k, T) = Σ_G p^{v(det G)(m + 1 - 2k)} · d_p(H_k, T[G^{-1}])
//! ```
//!
//! and each primitive density `d_p` only depends on `T[G^{-1}]` modulo `p`,
//! where it is a polynomial in `p^k`. The result is divided by `γ_p` exactly;
//! integrality, the constant term, the degree and the functional equation are
//! all asserted.

mod density;
pub mod fp;

pub use density::{
    density_candidates, density_profile, gamma_factor, local_density, oracle_polynomial, stable_depth_bound,
    stable_profile,
    DensityProfile, LocalDensity, OracleOptions, OracleWitness, FEASIBILITY_GUARD,
};

use std::collections::HashMap;
use std::sync::RwLock;

use num_traits::{One, Zero};

use crate::arith::{int, kronecker, pow_rat, HalfPowerScalar, Int, Poly, Rat, SymmetricLaurentPoly};
use crate::error::{Error, Result};
use crate::quadform::{invariants, jordan, FormInvariants, HalfIntegralMatrix, JordanSplitting};
use fp::{count_primitive, FpQuadForm};

/// `F_p(T, X) = Σ b_i X^i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiegelPoly {
    pub prime: u64,
    pub gram: HalfIntegralMatrix,
    pub invariants: FormInvariants,
    pub jordan: JordanSplitting,
    pub coeffs: Vec<Int>,
    /// `2 ord_p f_T`.
    pub deg_intent: usize,
    pub oracle: Option<OracleWitness>,
}

impl SiegelPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        Poly::new(self.coeffs.iter().cloned().map(Rat::from_integer).collect()).eval(x)
    }
}

/// `F̃_p(T, X) = X^{-e} F_p(T, p^{-(2n+1)/2} X)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedSeries {
    pub poly: SymmetricLaurentPoly,
}

fn rat_mod(x: &Rat, p: i64) -> i64 {
    let pm = Int::from(p);
    let num = ((x.numer() % &pm) + &pm) % &pm;
    let den = ((x.denom() % &pm) + &pm) % &pm;
    let num: i64 = num.try_into().expect("small residue");
    let den: i64 = den.try_into().expect("small residue");
    num * fp::inv_mod(den, p) % p
}

fn p_integral(x: &Rat, p: u64) -> bool {
    x.is_zero() || (x.denom() % Int::from(p)).is_zero().then_some(()).is_none()
}

/// Gram matrices `(2T)[G^{-1}]` of the superlattices with index `p^v` on
/// which the form is still even, as `(v, gram)`.
pub fn superlattices(t: &HalfIntegralMatrix, p: u64) -> Vec<(u32, Vec<Vec<Rat>>)> {
    let m = t.size();
    let vmax = crate::arith::valuation(t.det_two_t(), p) / 2;
    let s: Vec<Vec<Rat>> = t.two_t().iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
    let mut out = Vec::new();
    let mut exps = vec![0u32; m];
    loop {
        let v: u32 = exps.iter().sum();
        if v <= vmax {
            collect_hnf(&s, p, &exps, &mut out);
        }
        // next exponent vector with sum ≤ vmax
        let mut i = 0;
        loop {
            if i == m {
                return out;
            }
            exps[i] += 1;
            if exps.iter().sum::<u32>() <= vmax {
                break;
            }
            exps[i] = 0;
            i += 1;
        }
    }
}

fn collect_hnf(s: &[Vec<Rat>], p: u64, exps: &[u32], out: &mut Vec<(u32, Vec<Vec<Rat>>)>) {
    let m = s.len();
    let above: Vec<(usize, usize)> = (0..m).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    let limits: Vec<u64> = above.iter().map(|&(_, j)| p.pow(exps[j])).collect();
    let mut vals = vec![0u64; above.len()];
    loop {
        let mut g = vec![vec![Rat::zero(); m]; m];
        for i in 0..m {
            g[i][i] = pow_rat(p, exps[i] as i64);
        }
        for (&(i, j), &x) in above.iter().zip(&vals) {
            g[i][j] = int(x as i64);
        }
        let gi = upper_inverse(&g);
        let sp = congruence(s, &gi);
        let even = (0..m).all(|i| p != 2 || p_integral(&(&sp[i][i] / int(2)), p));
        if even && sp.iter().flatten().all(|x| p_integral(x, p)) {
            out.push((exps.iter().sum(), sp));
        }
        let mut i = 0;
        loop {
            if i == vals.len() {
                return;
            }
            vals[i] += 1;
            if vals[i] < limits[i] {
                break;
            }
            vals[i] = 0;
            i += 1;
        }
    }
}

fn upper_inverse(g: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let m = g.len();
    let mut inv = vec![vec![Rat::zero(); m]; m];
    for j in 0..m {
        inv[j][j] = Rat::one() / &g[j][j];
        for i in (0..j).rev() {
            let mut acc = Rat::zero();
            for k in i + 1..=j {
                acc += &g[i][k] * &inv[k][j];
            }
            inv[i][j] = -acc / &g[i][i];
        }
    }
    inv
}

/// `Hᵀ S H`.
fn congruence(s: &[Vec<Rat>], h: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let m = s.len();
    let sh: Vec<Vec<Rat>> =
        (0..m).map(|i| (0..m).map(|j| (0..m).map(|k| &s[i][k] * &h[k][j]).sum()).collect()).collect();
    (0..m).map(|i| (0..m).map(|j| (0..m).map(|k| &h[k][i] * &sh[k][j]).sum()).collect()).collect()
}

fn reduce_mod_p(gram: &[Vec<Rat>], p: u64) -> FpQuadForm {
    let p = p as i64;
    let m = gram.len();
    let q = (0..m).map(|i| rat_mod(&(&gram[i][i] / int(2)), p)).collect();
    let b = (0..m).map(|i| (0..m).map(|j| rat_mod(&gram[i][j], p)).collect()).collect();
    FpQuadForm::new(p, q, b)
}

/// `α_p(H_k, T)` as a polynomial in `X = p^{-k}`.
pub fn density_polynomial(t: &HalfIntegralMatrix, p: u64) -> Poly {
    let m = t.size();
    let mut cache: HashMap<FpQuadForm, Poly> = HashMap::new();
    let mut alpha = Poly::zero();
    let base = pow_rat(p, (m * (m + 1) / 2) as i64);
    for (v, gram) in superlattices(t, p) {
        let form = reduce_mod_p(&gram, p);
        let prim = cache.entry(form.clone()).or_insert_with(|| count_primitive(&form)).clone();
        // X^{2m} N(1/X) shifted by X^{2v}
        let mut coeffs = vec![Rat::zero(); 2 * m + 2 * v as usize + 1];
        for (i, c) in prim.coeffs().iter().enumerate() {
            coeffs[2 * m - i + 2 * v as usize] = c.clone();
        }
        let term = Poly::new(coeffs).scale(&(&base * pow_rat(p, v as i64 * (m as i64 + 1))));
        alpha = &alpha + &term;
    }
    alpha
}

fn siegel_error(p: u64, t: &HalfIntegralMatrix, msg: impl std::fmt::Display) -> Error {
    Error::SiegelSeries { p, msg: format!("{t}: {msg}") }
}

/// `F_p(T, X)` with integrality, `b_0 = 1`, degree `2 ord_p f_T` and the
/// functional equation verified.
pub fn siegel_poly(t: &HalfIntegralMatrix, p: u64) -> Result<SiegelPoly> {
    let inv = invariants(t)?;
    let n = t.size() / 2;
    let deg_intent = 2 * inv.f_at(p) as usize;
    let js = jordan(t, p);
    let coeffs = if t.det_two_t() % p as i64 != 0 {
        vec![Int::one()]
    } else {
        let alpha = density_polynomial(t, p);
        let xi = kronecker(inv.d, p as i64);
        let (num, den) = gamma_factor(p, n, xi);
        let (f, rem) = (&alpha * &den).div_rem(&num);
        if !rem.is_zero() {
            return Err(siegel_error(p, t, "density is not divisible by γ"));
        }
        if f.coeffs().iter().any(|c| !c.is_integer()) {
            return Err(siegel_error(p, t, "non-integral coefficient"));
        }
        f.coeffs().iter().map(|c| c.numer().clone()).collect()
    };
    let poly = SiegelPoly { prime: p, gram: t.clone(), invariants: inv, jordan: js, coeffs, deg_intent, oracle: None };
    if poly.coeffs.first() != Some(&Int::one()) {
        return Err(siegel_error(p, t, "constant term is not 1"));
    }
    if poly.degree() != deg_intent {
        return Err(siegel_error(p, t, format!("degree {} but expected {deg_intent}", poly.degree())));
    }
    normalize(&poly)?;
    Ok(poly)
}

/// `siegel_poly` confirmed against the density oracle; any disagreement is
/// an error.
pub fn siegel_poly_checked(t: &HalfIntegralMatrix, p: u64, opts: OracleOptions) -> Result<SiegelPoly> {
    let mut poly = siegel_poly(t, p)?;
    let witness = oracle_polynomial(t, p, opts)?;
    let ours: Vec<Rat> = poly.coeffs.iter().cloned().map(Rat::from_integer).collect();
    if Poly::new(witness.coeffs.clone()) != Poly::new(ours) {
        return Err(siegel_error(
            p,
            t,
            format!(
                "oracle gives {:?}",
                witness.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>()
            ),
        ));
    }
    poly.oracle = Some(witness);
    Ok(poly)
}

/// `F̃_p`, failing if `F_p` does not satisfy the functional equation
/// `b_{e+j} = p^{j(2n+1)} b_{e-j}`.
pub fn normalize(f: &SiegelPoly) -> Result<NormalizedSeries> {
    let p = f.prime;
    let n = f.gram.size() as i64 / 2;
    if !f.degree().is_multiple_of(2) {
        return Err(siegel_error(p, &f.gram, "odd degree"));
    }
    let e = f.degree() / 2;
    let w = 2 * n + 1;
    let term = |i: usize| HalfPowerScalar::new(p, Rat::from_integer(f.coeffs[i].clone()), -(i as i64) * w);
    for j in 1..=e {
        if term(e + j) != term(e - j) {
            return Err(siegel_error(p, &f.gram, format!("functional equation fails at j = {j}")));
        }
    }
    let pairs = (1..=e).map(|j| term(e + j)).collect();
    Ok(NormalizedSeries { poly: SymmetricLaurentPoly::new(p, term(e), pairs) })
}

/// `F̃_p(T, X)` directly.
pub fn siegel_tilde(t: &HalfIntegralMatrix, p: u64) -> Result<SymmetricLaurentPoly> {
    Ok(normalize(&siegel_poly(t, p)?)?.poly)
}

/// Read-mostly store of Siegel polynomials keyed by `(2T, p)`.
#[derive(Debug, Default)]
pub struct SiegelCache {
    map: RwLock<HashMap<(Vec<Vec<i64>>, u64), SiegelPoly>>,
}

impl SiegelCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, t: &HalfIntegralMatrix, p: u64) -> Result<SiegelPoly> {
        let key = (t.two_t().to_vec(), p);
        if let Some(f) = self.map.read().expect("cache lock").get(&key) {
            return Ok(f.clone());
        }
        let f = siegel_poly(t, p)?;
        self.map.write().expect("cache lock").insert(key, f.clone());
        Ok(f)
    }

    pub fn insert(&self, f: SiegelPoly) {
        self.map.write().expect("cache lock").insert((f.gram.two_t().to_vec(), f.prime), f);
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// For binary `T = [a, r/2; r/2, b]`:
/// `F̃_p(T, X) = Σ_{i ≤ ord_p gcd(a, r, b)} p^{i/2} Ψ_p(D / p^{2i}, X)`
/// with `D = -det(2T)`.
pub fn rank_two_closed_form(t: &HalfIntegralMatrix, p: u64) -> Result<SymmetricLaurentPoly> {
    if t.size() != 2 {
        return Err(Error::InvalidMatrix("closed form needs a binary form".into()));
    }
    let (a, r, b) = (t.entry(0, 0) / 2, t.entry(0, 1), t.entry(1, 1) / 2);
    let content = num_integer::Integer::gcd(&num_integer::Integer::gcd(&a, &r), &b);
    let ap = crate::arith::valuation(content, p);
    let disc = -t.det_two_t();
    let mut acc: Option<SymmetricLaurentPoly> = None;
    for i in 0..=ap {
        let tp = disc / (p as i64).pow(2 * i);
        let psi = crate::kohnen::psi_poly(tp, p, 1)?.poly;
        let scale = HalfPowerScalar::half_power(p, i as i64);
        let scaled = scale_laurent(&psi, &scale);
        acc = Some(match acc {
            None => scaled,
            Some(s) => add_laurent(&s, &scaled)?,
        });
    }
    Ok(acc.expect("at least one term"))
}

fn scale_laurent(f: &SymmetricLaurentPoly, c: &HalfPowerScalar) -> SymmetricLaurentPoly {
    let p = f.prime();
    let pairs = (1..=f.degree()).map(|j| &f.coeff(j) * c).collect();
    SymmetricLaurentPoly::new(p, &f.coeff(0) * c, pairs)
}

fn add_laurent(f: &SymmetricLaurentPoly, g: &SymmetricLaurentPoly) -> Result<SymmetricLaurentPoly> {
    let p = f.prime();
    let d = f.degree().max(g.degree());
    let pairs = (1..=d).map(|j| f.coeff(j).checked_add(&g.coeff(j))).collect::<Result<Vec<_>>>()?;
    Ok(SymmetricLaurentPoly::new(p, f.coeff(0).checked_add(&g.coeff(0))?, pairs))
}

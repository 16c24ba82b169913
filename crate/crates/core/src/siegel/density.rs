//! Local representation densities `α_p(H_k, T)` by direct counting modulo
//! `p^e`, independent of any structure theory of the Siegel series.
//!
//! For fixed depth `e`, the finite Fourier transform over symmetric `Y` gives
//!
//! ```text
//! α_e(k) = Σ_Y c(ψ_Y(T)) / φ(p^e) · (|ker_{p^e} Ŷ| / p^{em})^k
//! ```
//!
//! with `c` the Ramanujan sum modulo `p^e`. Only `Y` with
//! `ψ_Y(T) ≡ 0 mod p^{e-1}` contribute, which is solved for one coordinate.
//! Terms are grouped by kernel size, so a single sweep yields `α_e(k)` for
//! every `k`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::arith::{int, pow_rat, Poly, Rat};
use crate::error::{Error, Result};
use crate::quadform::{invariants, jordan, HalfIntegralMatrix};

/// Largest number of symmetric matrices a single depth may visit.
pub const FEASIBILITY_GUARD: u128 = 1 << 36;

const MAX_DIM: usize = 4;

/// `α_e(k) = Σ_j weights[j] / φ(p^e) · p^{(j - e m) k}` at a fixed depth `e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityProfile {
    pub prime: u64,
    pub depth: u32,
    pub size: usize,
    pub weights: BTreeMap<u32, i128>,
}

impl DensityProfile {
    pub fn at(&self, k: u32) -> Rat {
        let q = (self.prime as i128).pow(self.depth);
        let phi = int((q - q / self.prime as i128) as i64);
        let em = (self.depth as usize * self.size) as i64;
        let mut acc = Rat::zero();
        for (&j, &w) in &self.weights {
            acc += Rat::from_integer(w.into()) * pow_rat(self.prime, (j as i64 - em) * k as i64);
        }
        acc / phi
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalDensity {
    pub value: Rat,
    /// Depth at which the density was read off.
    pub depth: u32,
    /// Whether the next depth was computed and agreed.
    pub confirmed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOptions {
    pub max_depth: u32,
    pub guard: u128,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { max_depth: 12, guard: FEASIBILITY_GUARD }
    }
}

struct Setup {
    p: i64,
    e: u32,
    q: i64,
    m: usize,
    coords: Vec<(usize, usize)>,
    coeff: Vec<i64>,
    /// Coordinate solved from the congruence, with the valuation of its coefficient.
    pivot: Option<(usize, u32)>,
    val: Vec<u32>,
    inv: Vec<i64>,
}

impl Setup {
    fn new(t: &HalfIntegralMatrix, p: u64, e: u32) -> Self {
        let m = t.size();
        assert!(m <= MAX_DIM);
        let p = p as i64;
        let q = p.pow(e);
        let coords: Vec<(usize, usize)> = (0..m).flat_map(|i| (i..m).map(move |j| (i, j))).collect();
        let coeff: Vec<i64> = coords
            .iter()
            .map(|&(i, j)| if i == j { t.entry(i, i) / 2 } else { t.entry(i, j) }.rem_euclid(q))
            .collect();
        let mut val = vec![e; q as usize];
        let mut inv = vec![0i64; q as usize];
        for x in 1..q {
            let mut v = 0;
            let mut y = x;
            while y % p == 0 {
                y /= p;
                v += 1;
            }
            val[x as usize] = v;
            if v == 0 {
                inv[x as usize] = crate::siegel::fp::inv_mod(x, q);
            }
        }
        let pivot = coeff
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0)
            .map(|(c, &a)| (c, val[a as usize]))
            .min_by_key(|&(_, v)| v)
            .filter(|&(_, v)| e >= 1 && v < e - 1);
        Setup { p, e, q, m, coords, coeff, pivot, val, inv }
    }

    fn candidates(&self) -> u128 {
        let q = self.q as u128;
        let n = self.coords.len() as u32;
        match self.pivot {
            None => q.pow(n),
            Some((_, v)) => q.pow(n - 1) * (self.p as u128).pow(v + 1),
        }
    }

    /// `Σ_i min(v(s_i), e)` over the elementary divisors of `Ŷ` mod `p^e`.
    fn log_kernel(&self, y: &[i64]) -> u32 {
        let m = self.m;
        let q = self.q;
        let mut a = [[0i64; MAX_DIM]; MAX_DIM];
        for (&(i, j), &v) in self.coords.iter().zip(y) {
            a[i][j] = v;
            a[j][i] = v;
        }
        // A nonzero determinant mod p^e already carries every elementary
        // divisor below p^e.
        let det = det_small(&a, m).rem_euclid(q);
        if det != 0 {
            return self.val[det as usize];
        }
        let mut total = 0;
        for s in 0..m {
            let mut best = (self.e, s, s);
            for i in s..m {
                for j in s..m {
                    let v = self.val[a[i][j] as usize];
                    if v < best.0 {
                        best = (v, i, j);
                    }
                }
            }
            let (v, bi, bj) = best;
            if v >= self.e {
                total += self.e * (m - s) as u32;
                break;
            }
            total += v;
            a.swap(s, bi);
            for row in a.iter_mut().take(m) {
                row.swap(s, bj);
            }
            let pv = self.p.pow(v);
            let u_inv = self.inv[(a[s][s] / pv) as usize];
            for r in s + 1..m {
                if a[r][s] != 0 {
                    let f = (a[r][s] / pv) * u_inv % q;
                    for c in s..m {
                        a[r][c] = (a[r][c] - f * a[s][c]).rem_euclid(q);
                    }
                }
            }
            for c in s + 1..m {
                if a[s][c] != 0 {
                    let f = (a[s][c] / pv) * u_inv % q;
                    for r in s..m {
                        a[r][c] = (a[r][c] - f * a[r][s]).rem_euclid(q);
                    }
                }
            }
        }
        total
    }

    fn weight(&self, psi: i64) -> i128 {
        let q = self.q as i128;
        let psi = psi.rem_euclid(self.q);
        if psi == 0 {
            q - q / self.p as i128
        } else if self.val[psi as usize] + 1 >= self.e {
            -(q / self.p as i128)
        } else {
            0
        }
    }

    /// Sum over `Y` whose free coordinates before `lead` vanish and whose
    /// `lead` coordinate is `p^v`. Scaling by a unit changes neither the
    /// kernel nor the Ramanujan weight, so each such `Y` stands for
    /// `φ(p^e) / p^v` matrices. With `lead = None` every free coordinate is
    /// zero.
    fn sweep(&self, lead: Option<(usize, u32)>) -> Vec<i128> {
        let n = self.coords.len();
        let mut acc = vec![0i128; self.e as usize * self.m + 1];
        let free: Vec<usize> = (0..n).filter(|&c| Some(c) != self.pivot.map(|x| x.0)).collect();
        let mut y = vec![0i64; n];
        let q = self.q as i128;
        let (tail, mult) = match lead {
            Some((i, v)) => {
                y[free[i]] = self.p.pow(v);
                (&free[i + 1..], (q - q / self.p as i128) / (self.p as i128).pow(v))
            }
            None => (&free[free.len()..], 1),
        };
        let count = (self.q as u128).pow(tail.len() as u32);
        for _ in 0..count {
            let rest: i64 = free.iter().map(|&c| self.coeff[c] * y[c]).sum::<i64>().rem_euclid(self.q);
            match self.pivot {
                None => {
                    let w = self.weight(rest);
                    if w != 0 {
                        acc[self.log_kernel(&y) as usize] += w * mult;
                    }
                }
                Some((c0, v)) => {
                    let a = self.coeff[c0];
                    let pv = self.p.pow(v);
                    let modulus = self.p.pow(self.e - 1 - v);
                    let unit_inv = self.inv[(a / pv) as usize] % modulus;
                    let y0 = (-(rest / pv) * unit_inv).rem_euclid(modulus);
                    for j in 0..self.p.pow(v + 1) {
                        y[c0] = y0 + modulus * j;
                        let w = self.weight(a * y[c0] + rest);
                        acc[self.log_kernel(&y) as usize] += w * mult;
                    }
                }
            }
            for &c in tail {
                y[c] += 1;
                if y[c] < self.q {
                    break;
                }
                y[c] = 0;
            }
        }
        acc
    }
}

fn det_small(a: &[[i64; MAX_DIM]; MAX_DIM], m: usize) -> i64 {
    let d2 = |r0: usize, r1: usize, c0: usize, c1: usize| a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0];
    match m {
        1 => a[0][0],
        2 => d2(0, 1, 0, 1),
        3 => a[0][0] * d2(1, 2, 1, 2) - a[0][1] * d2(1, 2, 0, 2) + a[0][2] * d2(1, 2, 0, 1),
        4 => {
            // Laplace expansion along the first two rows.
            d2(0, 1, 0, 1) * d2(2, 3, 2, 3) - d2(0, 1, 0, 2) * d2(2, 3, 1, 3) + d2(0, 1, 0, 3) * d2(2, 3, 1, 2)
                + d2(0, 1, 1, 2) * d2(2, 3, 0, 3)
                - d2(0, 1, 1, 3) * d2(2, 3, 0, 2)
                + d2(0, 1, 2, 3) * d2(2, 3, 0, 1)
        }
        _ => unreachable!("size checked on construction"),
    }
}

/// Number of symmetric matrices visited at depth `e`.
pub fn density_candidates(t: &HalfIntegralMatrix, p: u64, e: u32) -> u128 {
    Setup::new(t, p, e).candidates()
}

/// The exact depth-`e` density as a function of `k`.
pub fn density_profile(t: &HalfIntegralMatrix, p: u64, e: u32, guard: u128) -> Result<DensityProfile> {
    assert!(e >= 1);
    if t.size() > MAX_DIM {
        return Err(Error::Invalid(format!("density oracle supports size ≤ {MAX_DIM}")));
    }
    let setup = Setup::new(t, p, e);
    let candidates = setup.candidates();
    if candidates > guard {
        return Err(Error::Infeasible { candidates });
    }
    let free = setup.coords.len() - usize::from(setup.pivot.is_some());
    let mut leads: Vec<Option<(usize, u32)>> = vec![None];
    leads.extend((0..free).flat_map(|i| (0..e).map(move |v| Some((i, v)))));
    let total = leads
        .into_par_iter()
        .map(|lead| setup.sweep(lead))
        .reduce(|| vec![0i128; e as usize * setup.m + 1], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect());
    let weights = total.into_iter().enumerate().filter(|(_, w)| *w != 0).map(|(j, w)| (j as u32, w)).collect();
    Ok(DensityProfile { prime: p, depth: e, size: t.size(), weights })
}

/// First depth from which `α_e` is constant: one past the top Jordan scale
/// of `2T`, and one more at `p = 2`.
pub fn stable_depth_bound(t: &HalfIntegralMatrix, p: u64) -> u32 {
    let top = jordan(t, p).scales().into_iter().max().unwrap_or(0);
    top + 1 + u32::from(p == 2)
}

/// The profile at the stable depth bound, checked against the next depth
/// when that is within the guard. Should the two disagree, deeper profiles
/// are computed until two consecutive ones agree at every `k` in `ks`.
pub fn stable_profile(t: &HalfIntegralMatrix, p: u64, ks: &[u32], opts: OracleOptions) -> Result<(DensityProfile, bool)> {
    let e0 = stable_depth_bound(t, p);
    let mut prev = density_profile(t, p, e0, opts.guard)?;
    for e in e0 + 1..=opts.max_depth.max(e0) + 1 {
        let next = match density_profile(t, p, e, opts.guard) {
            Ok(next) => next,
            Err(Error::Infeasible { .. }) if e == e0 + 1 => return Ok((prev, false)),
            Err(err) => return Err(err),
        };
        if ks.iter().all(|&k| prev.at(k) == next.at(k)) {
            return Ok((prev, true));
        }
        prev = next;
    }
    Err(Error::NoStabilization { p, depth: opts.max_depth })
}

/// `α_p(H_k, T)` with the depth at which it stabilized.
pub fn local_density(t: &HalfIntegralMatrix, p: u64, k: u32, opts: OracleOptions) -> Result<LocalDensity> {
    let (prof, confirmed) = stable_profile(t, p, &[k], opts)?;
    Ok(LocalDensity { value: prof.at(k), depth: prof.depth, confirmed })
}

/// `γ_p(T, X)` as numerator and denominator polynomials in `X`.
pub fn gamma_factor(p: u64, n: usize, xi: i8) -> (Poly, Poly) {
    let mut num = Poly::from_ints(&[1, -1]);
    for i in 1..=n {
        let c = -pow_rat(p, 2 * i as i64);
        num = &num * &Poly::new(vec![Rat::one(), Rat::zero(), c]);
    }
    let den = Poly::new(vec![Rat::one(), -int(xi as i64) * pow_rat(p, n as i64)]);
    (num, den)
}

/// Stabilized densities at `k = n+1, …` interpolated into `F_p(T, X)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleWitness {
    pub ks: Vec<u32>,
    pub densities: Vec<Rat>,
    pub depth: u32,
    pub confirmed: bool,
    /// Interpolated coefficients of `F_p(T, X)`, lowest degree first.
    pub coeffs: Vec<Rat>,
}

fn lagrange(points: &[(Rat, Rat)]) -> Poly {
    let mut out = Poly::zero();
    for (i, (xi, yi)) in points.iter().enumerate() {
        let mut basis = Poly::one();
        let mut denom = Rat::one();
        for (j, (xj, _)) in points.iter().enumerate() {
            if i != j {
                basis = &basis * &Poly::new(vec![-xj.clone(), Rat::one()]);
                denom *= xi - xj;
            }
        }
        out = &out + &basis.scale(&(yi / denom));
    }
    out
}

/// Recovers `F_p(T, X)` from densities alone: `deg + 2` evaluation points
/// `X = p^{-k}`, one more than the expected degree requires.
pub fn oracle_polynomial(t: &HalfIntegralMatrix, p: u64, opts: OracleOptions) -> Result<OracleWitness> {
    let inv = invariants(t)?;
    let n = t.size() / 2;
    let deg = 2 * inv.f_at(p) as usize;
    let ks: Vec<u32> = (0..deg as u32 + 2).map(|i| n as u32 + 1 + i).collect();
    let (prof, confirmed) = stable_profile(t, p, &ks, opts)?;
    let xi = crate::arith::kronecker(inv.d, p as i64);
    let (num, den) = gamma_factor(p, n, xi);
    let densities: Vec<Rat> = ks.iter().map(|&k| prof.at(k)).collect();
    let points: Vec<(Rat, Rat)> = ks
        .iter()
        .zip(&densities)
        .map(|(&k, a)| {
            let x = pow_rat(p, -(k as i64));
            let gamma = num.eval(&x) / den.eval(&x);
            (x, a / gamma)
        })
        .collect();
    let poly = lagrange(&points);
    Ok(OracleWitness { ks, densities, depth: prof.depth, confirmed, coeffs: poly.coeffs().to_vec() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(s: &str) -> HalfIntegralMatrix {
        s.parse().unwrap()
    }

    /// `p^{e(m(m+1)/2 - 2km)} #{X mod p^e : H_k[X] ≡ T}` by enumerating `X`.
    fn flat_density(t: &HalfIntegralMatrix, p: i64, e: u32, k: usize) -> Rat {
        let m = t.size();
        let q = p.pow(e);
        let rows = 2 * k;
        let n = rows * m;
        let mut x = vec![0i64; n];
        let mut count = 0i64;
        let qh = |v: &[i64]| -> i64 { (0..k).map(|l| v[2 * l] * v[2 * l + 1]).sum::<i64>() };
        for _ in 0..q.pow(n as u32) {
            let cols: Vec<Vec<i64>> = (0..m).map(|c| (0..rows).map(|r| x[r * m + c]).collect()).collect();
            let mut ok = true;
            for i in 0..m {
                if (qh(&cols[i]) - t.entry(i, i) / 2).rem_euclid(q) != 0 {
                    ok = false;
                }
                for j in i + 1..m {
                    let b: i64 = (0..k).map(|l| cols[i][2 * l] * cols[j][2 * l + 1] + cols[j][2 * l] * cols[i][2 * l + 1]).sum();
                    if (b - t.entry(i, j)).rem_euclid(q) != 0 {
                        ok = false;
                    }
                }
            }
            if ok {
                count += 1;
            }
            for c in x.iter_mut() {
                *c += 1;
                if *c < q {
                    break;
                }
                *c = 0;
            }
        }
        let expo = e as i64 * ((m * (m + 1) / 2) as i64 - (2 * k * m) as i64);
        int(count) * pow_rat(p as u64, expo)
    }

    #[test]
    fn fourier_sum_matches_flat_count() {
        let cases = [("2,1;1,2", 2, 1, 1), ("2,1;1,2", 2, 2, 2), ("2,0;0,8", 2, 3, 1), ("2,0;0,2", 3, 1, 2), ("4,2;2,6", 2, 2, 2), ("2,0;0,6", 3, 2, 1)];
        for (s, p, e, k) in cases {
            let t = form(s);
            let prof = density_profile(&t, p as u64, e, FEASIBILITY_GUARD).unwrap();
            assert_eq!(prof.at(k as u32), flat_density(&t, p, e, k), "{s} p={p} e={e} k={k}");
        }
    }

    #[test]
    fn unimodular_density_is_gamma() {
        // p ∤ det(2T): α = (1 - p^{-k})(1 + ξ p^{1-k})
        let t = form("2,1;1,2");
        for (p, xi) in [(2u64, -1i64), (5, -1), (7, 1)] {
            for k in 2..5u32 {
                let d = local_density(&t, p, k, OracleOptions::default()).unwrap();
                let x = pow_rat(p, -(k as i64));
                let expect = (Rat::one() - &x) * (Rat::one() + int(xi) * int(p as i64) * &x);
                assert_eq!(d.value, expect, "p={p} k={k}");
                assert_eq!(d.depth, 1 + u32::from(p == 2));
                assert!(d.confirmed);
            }
        }
    }

    #[test]
    fn guard_is_enforced() {
        let t = form("2,0;0,8");
        assert!(matches!(density_profile(&t, 2, 9, 1 << 16), Err(Error::Infeasible { .. })));
        assert!(density_candidates(&t, 2, 3) < 1 << 12);
    }

    #[test]
    fn oracle_polynomial_for_small_forms() {
        let w = oracle_polynomial(&form("2,0;0,8"), 2, OracleOptions::default()).unwrap();
        assert_eq!(w.coeffs, vec![int(1), int(0), int(8)]);
        let w = oracle_polynomial(&form("2,1;1,2"), 3, OracleOptions::default()).unwrap();
        assert_eq!(w.coeffs, vec![int(1)]);
    }

    /// Profiles beyond the bound never change.
    #[test]
    fn depth_bound_is_stable() {
        for t in crate::quadform::enumerate_forms(2, crate::quadform::Bound::Det(60), true) {
            for p in [2u64, 3, 5] {
                if t.det_two_t() % p as i64 != 0 {
                    continue;
                }
                let e0 = stable_depth_bound(&t, p);
                if density_candidates(&t, p, e0 + 2) > 1 << 22 {
                    continue;
                }
                let a = density_profile(&t, p, e0, FEASIBILITY_GUARD).unwrap();
                for e in [e0 + 1, e0 + 2] {
                    let b = density_profile(&t, p, e, FEASIBILITY_GUARD).unwrap();
                    assert!((1..7).all(|k| a.at(k) == b.at(k)), "{t} p={p} e={e}");
                }
            }
        }
    }
}

//! The half-integral-weight eigenform `h` whose coefficients feed the lift,
//! realized through index-one Jacobi forms, and the local factors `Ψ_p`.
//!
//! An index-one Jacobi form is stored by its coefficients `C(D)`, which is
//! the same data as a form in the Kohnen plus space. Holomorphic forms of
//! even weight `k` are supported on `D ≡ 0, 3 mod 4`; skew-holomorphic forms
//! of odd weight on `D ≡ 0, 1 mod 4`. Both families are free over the
//! level-one forms (acting through `q ↦ q^4`) on two Eisenstein-type
//! generators.

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::arith::{
    cohen_h, fundamental_part, kronecker, valuation, HalfPowerScalar, QExpansion, Rat, SymmetricLaurentPoly,
};
use crate::elliptic::{dim_cusp, dim_modular, modular_basis, EllipticEigenform};
use crate::error::{Error, Result};
use crate::report::Report;

/// `κ` values whose eigenform space is one-dimensional.
pub const SUPPORTED_KAPPA: [u32; 6] = [6, 8, 9, 10, 11, 13];

/// Below this many coefficients the dimension count is not trusted.
const MIN_WORKING_BOUND: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacobiKind {
    Holomorphic,
    SkewHolomorphic,
}

impl JacobiKind {
    pub fn for_weight(k: u32) -> Self {
        if k.is_multiple_of(2) {
            JacobiKind::Holomorphic
        } else {
            JacobiKind::SkewHolomorphic
        }
    }

    /// Whether `C(D)` may be nonzero.
    pub fn supports(self, d: u64) -> bool {
        match self {
            JacobiKind::Holomorphic => matches!(d % 4, 0 | 3),
            JacobiKind::SkewHolomorphic => matches!(d % 4, 0 | 1),
        }
    }
}

/// Index-one Jacobi form given by `C(D)` for `0 ≤ D ≤ bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobiForm {
    weight: u32,
    kind: JacobiKind,
    coeffs: Vec<Rat>,
}

impl JacobiForm {
    fn new(weight: u32, coeffs: Vec<Rat>) -> Self {
        let kind = JacobiKind::for_weight(weight);
        debug_assert!(coeffs.iter().enumerate().all(|(d, c)| c.is_zero() || kind.supports(d as u64)));
        Self { weight, kind, coeffs }
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn kind(&self) -> JacobiKind {
        self.kind
    }

    pub fn bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `C(D)`; zero for negative `D`.
    pub fn coeff(&self, d: i64) -> Result<Rat> {
        if d < 0 {
            return Ok(Rat::zero());
        }
        self.coeffs
            .get(d as usize)
            .cloned()
            .ok_or(Error::OutOfBound { index: d as u64, bound: self.bound() as u64 })
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_cusp(&self) -> bool {
        self.coeffs[0].is_zero()
    }

    /// Product with an elliptic form `g` of weight `w`:
    /// `C'(D) = Σ_m g(m) C(D - 4m)`.
    pub fn times_elliptic(&self, g: &QExpansion, w: u32) -> JacobiForm {
        let n = self.coeffs.len();
        let mut out = vec![Rat::zero(); n];
        for (m, gm) in g.coeffs().iter().enumerate().take_while(|(m, _)| 4 * m < n) {
            if gm.is_zero() {
                continue;
            }
            for d in 4 * m..n {
                let c = &self.coeffs[d - 4 * m];
                if !c.is_zero() {
                    out[d] += gm * c;
                }
            }
        }
        JacobiForm::new(self.weight + w, out)
    }

    fn truncate(&self, bound: usize) -> JacobiForm {
        JacobiForm::new(self.weight, self.coeffs[..=bound].to_vec())
    }
}

/// The Eisenstein-type generator of weight `k`.
///
/// For `k = 4, 6` these are the Eisenstein series `E_{k,1}` with
/// `C(D) = H(k-1, D) / H(k-1, 0)`. The odd weights `k = 1, 3` give the
/// skew-holomorphic generators (the theta series and `H(2, ·)`).
pub fn jacobi_eisenstein(k: u32, bound: usize) -> Result<JacobiForm> {
    let coeffs = match k {
        1 => (0..=bound as u64)
            .map(|d| {
                let r = d.isqrt();
                match (d, r * r == d) {
                    (0, _) => Rat::one(),
                    (_, true) => Rat::from_integer(2.into()),
                    _ => Rat::zero(),
                }
            })
            .collect(),
        3 | 4 | 6 => {
            let h0 = cohen_h(k - 1, 0);
            (0..=bound as u64).map(|d| cohen_h(k - 1, d) / &h0).collect()
        }
        _ => return Err(Error::UnsupportedWeight(k as i64)),
    };
    Ok(JacobiForm::new(k, coeffs))
}

/// Reduced row echelon form; returns the nonzero rows.
fn row_reduce(mut rows: Vec<Vec<Rat>>) -> Vec<Vec<Rat>> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = Rat::one() / &rows[rank][col];
        for x in rows[rank].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rows.truncate(rank);
    rows
}

/// Basis of the cusp forms of weight `k`, built from
/// `M_{k-4}·E_{4,1} ⊕ M_{k-6}·E_{6,1}` (even `k`) or the skew analogue on the
/// weight-1 and weight-3 generators (odd `k`). The dimension is checked
/// against that of the level-one cusp forms of weight `2k - 2`.
pub fn jacobi_cusp_space(k: u32, bound: usize) -> Result<Vec<JacobiForm>> {
    if k < 2 {
        return Ok(Vec::new());
    }
    let work = bound.max(MIN_WORKING_BOUND);
    let gens: &[u32] = if k.is_multiple_of(2) { &[4, 6] } else { &[1, 3] };
    let mut rows = Vec::new();
    for &g in gens {
        if g > k {
            continue;
        }
        let base = jacobi_eisenstein(g, work)?;
        for m in modular_basis(k - g, work / 4 + 1) {
            rows.push(base.times_elliptic(&m, k - g).coeffs);
        }
    }
    let echelon = row_reduce(rows);
    let elliptic_weight = 2 * k - 2;
    if echelon.len() != dim_modular(elliptic_weight) {
        return Err(Error::DimensionMismatch {
            weight: k as i64,
            found: echelon.len(),
            expected: dim_modular(elliptic_weight),
        });
    }
    let cusp: Vec<JacobiForm> = echelon
        .into_iter()
        .filter(|r| r[0].is_zero())
        .map(|r| JacobiForm::new(k, r).truncate(bound))
        .collect();
    if cusp.len() != dim_cusp(elliptic_weight) {
        return Err(Error::DimensionMismatch { weight: k as i64, found: cusp.len(), expected: dim_cusp(elliptic_weight) });
    }
    Ok(cusp)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Normalization {
    /// First nonzero coefficient equal to 1.
    FirstNonzero,
    /// `λ` times the default normalization.
    Scaled(Rat),
}

/// The plus-space eigenform `h` of weight `κ + 1/2`, as `t ↦ c(t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlusSpaceForm {
    kappa: u32,
    sign: i8,
    coeffs: Vec<Rat>,
    normalization: Normalization,
}

impl PlusSpaceForm {
    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    /// `(-1)^n`, equal to `(-1)^κ`.
    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn bound(&self) -> u64 {
        self.coeffs.len() as u64 - 1
    }

    pub fn normalization(&self) -> &Normalization {
        &self.normalization
    }

    /// Whether `sign · t ≡ 0, 1 mod 4`.
    pub fn in_support(&self, t: u64) -> bool {
        (self.sign as i64 * t as i64).rem_euclid(4) <= 1
    }

    pub fn c(&self, t: u64) -> Result<Rat> {
        self.coeffs.get(t as usize).cloned().ok_or(Error::OutOfBound { index: t, bound: self.bound() })
    }

    /// `(t, c(t))` for `1 ≤ t ≤ bound`.
    pub fn table(&self) -> impl Iterator<Item = (u64, &Rat)> {
        self.coeffs.iter().enumerate().skip(1).map(|(t, c)| (t as u64, c))
    }

    pub fn scaled(&self, lambda: &Rat) -> PlusSpaceForm {
        let base = match &self.normalization {
            Normalization::FirstNonzero => Rat::one(),
            Normalization::Scaled(l) => l.clone(),
        };
        PlusSpaceForm {
            kappa: self.kappa,
            sign: self.sign,
            coeffs: self.coeffs.iter().map(|c| c * lambda).collect(),
            normalization: Normalization::Scaled(base * lambda),
        }
    }
}

/// Checks the supported `κ` and the parity condition `κ + n` even.
pub fn check_eligibility(kappa: u32, n: u32) -> Result<()> {
    if !SUPPORTED_KAPPA.contains(&kappa) {
        return Err(Error::UnsupportedKappa(kappa as i64));
    }
    if !(kappa + n).is_multiple_of(2) {
        return Err(Error::ParityMismatch { kappa: kappa as i64, n: n as i64 });
    }
    Ok(())
}

/// The eigenform `h` attached to the weight-`2κ` eigenform, with
/// coefficients up to `bound`, normalized so the first nonzero one is 1.
pub fn plus_space_eigenform(kappa: u32, n: u32, bound: u64) -> Result<PlusSpaceForm> {
    check_eligibility(kappa, n)?;
    let mut space = jacobi_cusp_space(kappa + 1, bound as usize)?;
    let form = space.pop().expect("dimension checked");
    let lead = form.coeffs.iter().find(|c| !c.is_zero()).cloned().ok_or_else(|| {
        Error::Invalid(format!("cusp form of weight {} vanishes up to {bound}", kappa + 1))
    })?;
    let coeffs = form.coeffs.iter().map(|c| c / &lead).collect();
    let sign = if n.is_multiple_of(2) { 1 } else { -1 };
    Ok(PlusSpaceForm { kappa, sign, coeffs, normalization: Normalization::FirstNonzero })
}

/// `Ψ_p(t', X)` with its exponent `f_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiPoly {
    pub prime: u64,
    pub t: i64,
    pub f_exp: i64,
    pub poly: SymmetricLaurentPoly,
}

/// Discriminant of `Q(√t)` (1 when `t` is a square).
pub fn field_discriminant(t: i64) -> i64 {
    assert!(t != 0);
    let mut s = t.signum();
    for (p, e) in crate::arith::factorize(t.unsigned_abs()) {
        if e % 2 == 1 {
            s *= p as i64;
        }
    }
    if s.rem_euclid(4) == 1 {
        s
    } else {
        4 * s
    }
}

/// `f_p^t = (ord_p t - ord_p 𝔡^t) / 2`; negative exactly when `p = 2` and
/// `t ≢ 0, 1 mod 4`.
pub fn f_exponent(t: i64, p: u64) -> i64 {
    let d = field_discriminant(t);
    (valuation(t, p) as i64 - valuation(d, p) as i64) / 2
}

/// `Ψ_p(t, X) = U_f(X) - χ(p) p^{-1/2} U_{f-1}(X)` with
/// `U_f = (X^{f+1} - X^{-f-1}) / (X - X^{-1})`, and `Ψ = 0` when `f < 0`.
/// The argument is `t' = sign · t`.
pub fn psi_poly(t: i64, p: u64, sign: i8) -> Result<PsiPoly> {
    let tp = sign as i64 * t;
    if tp == 0 {
        return Err(Error::Invalid("Ψ is undefined at t = 0".into()));
    }
    let f = f_exponent(tp, p);
    if f < 0 {
        return Ok(PsiPoly { prime: p, t: tp, f_exp: f, poly: SymmetricLaurentPoly::zero(p) });
    }
    let chi = kronecker(field_discriminant(tp), p as i64);
    let second = HalfPowerScalar::new(p, Rat::from_integer((-chi).into()), -1);
    let coeff = |j: i64| {
        if (f - j) % 2 == 0 {
            HalfPowerScalar::one(p)
        } else {
            second.clone()
        }
    };
    let pairs = (1..=f).map(coeff).collect();
    let poly = SymmetricLaurentPoly::new(p, coeff(0), pairs);
    Ok(PsiPoly { prime: p, t: tp, f_exp: f, poly })
}

/// `p^{(κ-1/2) f} Ψ_p(t', α_p)` for the Satake parameter of `f` at `p`.
pub fn psi_factor(t: i64, p: u64, sign: i8, f: &EllipticEigenform) -> Result<HalfPowerScalar> {
    let psi = psi_poly(t, p, sign)?;
    let w = f.weight() - 1;
    let ap = Rat::from_integer(f.ap(p)?.clone());
    let val = psi.poly.eval_chebyshev(&ap, w)?;
    Ok(&val * &HalfPowerScalar::half_power(p, w as i64 * psi.f_exp))
}

/// `c(|d|) · ∏_{p | f} p^{(κ-1/2) f_p} Ψ_p(t', α_p)` for `t' = sign · t = d f²`.
pub fn predicted_coefficient(h: &PlusSpaceForm, f: &EllipticEigenform, t: u64) -> Result<Rat> {
    let tp = h.sign as i64 * t as i64;
    let (d, cond) = fundamental_part(tp)?;
    let mut value = h.c(d.unsigned_abs())?;
    for (p, _) in crate::arith::factorize(cond) {
        let g = psi_factor(t as i64, p, h.sign, f)?;
        let r = g.to_rational().ok_or(Error::NonIntegralExponent { p, exponent: g.half_exp() })?;
        value *= r;
    }
    Ok(value)
}

/// Verifies `c(t) = c(|d|) f_t^{κ-1/2} ∏ Ψ_p(t', α_p)` for all `t ≤ bound`
/// in the support, and `c(t) = 0` outside it.
pub fn shimura_consistency(h: &PlusSpaceForm, f: &EllipticEigenform, bound: u64) -> Result<Report> {
    if f.weight() != 2 * h.kappa {
        return Err(Error::Invalid(format!("eigenform weight {} does not match κ = {}", f.weight(), h.kappa)));
    }
    let bound = bound.min(h.bound());
    let checks: Vec<(u64, Result<(Rat, Rat)>)> = (1..=bound)
        .into_par_iter()
        .map(|t| {
            let found = h.c(t).expect("inside bound");
            if !h.in_support(t) {
                return (t, Ok((Rat::zero(), found)));
            }
            (t, predicted_coefficient(h, f, t).map(|e| (e, found)))
        })
        .collect();
    let mut report = Report::new("shimura");
    for (t, r) in checks {
        let (expected, found) = r?;
        report.check(expected == found, || format!("t = {t}: expected {expected}, found {found}"));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use crate::elliptic::eigenform;

    #[test]
    fn eisenstein_examples() {
        let e4 = jacobi_eisenstein(4, 12).unwrap();
        assert_eq!(e4.coeff(0).unwrap(), int(1));
        assert_eq!(e4.coeff(3).unwrap(), cohen_h(3, 3) / cohen_h(3, 0));
        // E_{4,1} = 1 + (ζ^2 + 56ζ + 126 + 56ζ^{-1} + ζ^{-2}) q + ...
        assert_eq!(e4.coeff(3).unwrap(), int(56));
        assert_eq!(e4.coeff(4).unwrap(), int(126));
        let e6 = jacobi_eisenstein(6, 12).unwrap();
        assert!(e6.coeff(2).unwrap().is_zero());
        assert_eq!(e6.coeff(3).unwrap(), int(-88));
        assert_eq!(e6.coeff(4).unwrap(), int(-330));
        assert!(jacobi_eisenstein(5, 4).is_err());
    }

    #[test]
    fn cusp_space_dimensions() {
        for (k, dim) in [(7, 1), (8, 0), (9, 1), (10, 1), (11, 1), (12, 1), (14, 1), (13, 2)] {
            assert_eq!(jacobi_cusp_space(k, 40).unwrap().len(), dim, "k = {k}");
        }
    }

    #[test]
    fn phi_10_1_coefficients() {
        // φ_{10,1} = (E_6 E_{4,1} - E_4 E_{6,1}) / 144, with c(1, 1) = -1 at D = 3.
        let f = &jacobi_cusp_space(10, 20).unwrap()[0];
        let scale = f.coeff(3).unwrap();
        let g: Vec<Rat> = (0..=20).map(|d| f.coeff(d).unwrap() / &scale).collect();
        assert_eq!(g[3], int(1));
        assert_eq!(g[4], int(-2));
        assert_eq!(g[7], int(-16));
        assert_eq!(g[8], int(36));
    }

    #[test]
    fn plus_space_supports_and_normalization() {
        let h = plus_space_eigenform(9, 1, 60).unwrap();
        assert_eq!(h.sign(), -1);
        assert_eq!(h.c(3).unwrap(), int(1));
        assert!(h.c(1).unwrap().is_zero() && h.c(2).unwrap().is_zero());
        for (t, c) in h.table() {
            if !matches!(t % 4, 0 | 3) {
                assert!(c.is_zero(), "t = {t}");
            }
        }
        let h6 = plus_space_eigenform(6, 2, 60).unwrap();
        assert_eq!(h6.sign(), 1);
        let expect = [(1, 1), (4, -56), (5, 120), (8, -240), (9, 9), (12, 1440)];
        for (t, c) in expect {
            assert_eq!(h6.c(t).unwrap(), int(c), "t = {t}");
        }
        for (t, c) in h6.table() {
            if !matches!(t % 4, 0 | 1) {
                assert!(c.is_zero(), "t = {t}");
            }
        }
    }

    #[test]
    fn eligibility() {
        assert!(matches!(plus_space_eigenform(7, 1, 10), Err(Error::UnsupportedKappa(7))));
        assert!(matches!(plus_space_eigenform(9, 2, 10), Err(Error::ParityMismatch { .. })));
        assert!(matches!(plus_space_eigenform(6, 1, 10), Err(Error::ParityMismatch { .. })));
    }

    #[test]
    fn psi_examples() {
        let one = psi_poly(3, 5, -1).unwrap();
        assert_eq!(one.f_exp, 0);
        assert_eq!(one.poly, SymmetricLaurentPoly::one(5));
        // -3 · 2 ≡ 2 mod 4 has f_2 = -1.
        let zero = psi_poly(6, 2, -1).unwrap();
        assert_eq!(zero.f_exp, -1);
        assert!(zero.poly.is_zero());
        // t' = -12 = -3 · 2²: f_2 = 1, χ_{-3}(2) = -1.
        let lin = psi_poly(12, 2, -1).unwrap();
        assert_eq!(lin.f_exp, 1);
        assert_eq!(lin.poly.coeff(1), HalfPowerScalar::one(2));
        assert_eq!(lin.poly.coeff(0), HalfPowerScalar::new(2, int(1), -1));
        assert!(psi_poly(0, 2, 1).is_err());
    }

    #[test]
    fn psi_parity_bookkeeping() {
        for p in [2u64, 3, 5, 7] {
            for t in 1..300i64 {
                for sign in [-1i8, 1] {
                    let psi = psi_poly(t, p, sign).unwrap();
                    if psi.f_exp < 0 {
                        assert!(psi.poly.is_zero());
                        continue;
                    }
                    assert_eq!(psi.poly.degree() as i64, psi.f_exp);
                    let c0 = psi.poly.coeff(0);
                    if !c0.is_zero() {
                        assert_eq!(c0.half_exp().rem_euclid(2), psi.f_exp % 2, "t={t} p={p}");
                    }
                }
            }
        }
    }

    #[test]
    fn hecke_relation_at_two() {
        let kappa = 9u32;
        let h = plus_space_eigenform(kappa, 1, 60).unwrap();
        let f = eigenform(18, 30).unwrap();
        let a2 = Rat::from_integer(f.ap(2).unwrap().clone());
        let expect = h.c(3).unwrap() * (a2 + int(2).pow(kappa as i32 - 1));
        assert_eq!(h.c(12).unwrap(), expect);
        assert_eq!(predicted_coefficient(&h, &f, 12).unwrap(), expect);
        assert_eq!(predicted_coefficient(&h, &f, 48).unwrap(), h.c(48).unwrap());
    }

    #[test]
    fn shimura_consistency_small() {
        for kappa in SUPPORTED_KAPPA {
            let n = if kappa % 2 == 0 { 2 } else { 1 };
            let h = plus_space_eigenform(kappa, n, 120).unwrap();
            let f = eigenform(2 * kappa, 40).unwrap();
            let report = shimura_consistency(&h, &f, 120).unwrap();
            assert!(report.is_ok(), "κ = {kappa}: {:?}", report.failures);
            assert_eq!(report.cases, 120);
        }
    }

    #[test]
    fn square_class_well_defined() {
        let h = plus_space_eigenform(11, 1, 200).unwrap();
        let f = eigenform(22, 40).unwrap();
        for t in 1..=200u64 {
            if !h.in_support(t) {
                continue;
            }
            let (d, cond) = fundamental_part(-(t as i64)).unwrap();
            let mut g = Rat::one();
            for (p, _) in crate::arith::factorize(cond) {
                g *= psi_factor(t as i64, p, -1, &f).unwrap().to_rational().unwrap();
            }
            if !g.is_zero() {
                assert_eq!(h.c(t).unwrap() / g, h.c(d.unsigned_abs()).unwrap(), "t = {t}");
            }
        }
    }

    #[test]
    fn scaling() {
        let h = plus_space_eigenform(6, 2, 20).unwrap();
        let h7 = h.scaled(&int(7));
        assert_eq!(h7.c(4).unwrap(), int(-392));
        assert_eq!(h7.normalization(), &Normalization::Scaled(int(7)));
    }
}

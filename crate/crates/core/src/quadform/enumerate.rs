use std::collections::BTreeSet;

use super::HalfIntegralMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// `det(2T) ≤ bound`.
    Det(i64),
    /// `trace(2T) ≤ bound`.
    Trace(i64),
}

/// Gauss-reduced representative `(a, b, c)` of the binary form
/// `a x² + b xy + c y²` (that is, `2T = [[2a, b], [b, 2c]]`):
/// `|b| ≤ a ≤ c`, and `b ≥ 0` when `|b| = a` or `a = c`.
pub fn gauss_reduce(mut a: i64, mut b: i64, mut c: i64) -> (i64, i64, i64) {
    assert!(a > 0 && 4 * a * c - b * b > 0);
    loop {
        if b.abs() > a {
            // x ↦ x - k y
            let k = (b + a).div_euclid(2 * a);
            c += a * k * k - b * k;
            b -= 2 * a * k;
        } else if a > c {
            std::mem::swap(&mut a, &mut c);
            b = -b;
        } else {
            break;
        }
    }
    if b < 0 && (-b == a || a == c) {
        b = -b;
    }
    (a, b, c)
}

fn binary(a: i64, b: i64, c: i64) -> HalfIntegralMatrix {
    HalfIntegralMatrix::new(vec![vec![2 * a, b], vec![b, 2 * c]]).expect("positive definite")
}

fn reduced_binary(bound: Bound) -> Vec<HalfIntegralMatrix> {
    let mut out = Vec::new();
    let fits = |a: i64, b: i64, c: i64| match bound {
        Bound::Det(d) => 4 * a * c - b * b <= d,
        Bound::Trace(t) => 2 * a + 2 * c <= t,
    };
    let mut a = 1;
    // The smallest det and trace for given a are 3a² and 4a.
    while fits(a, a, a) || fits(a, 0, a) {
        for b in -a..=a {
            let mut c = a;
            while fits(a, b, c) {
                if !(b < 0 && (-b == a || a == c)) {
                    out.push(binary(a, b, c));
                }
                c += 1;
            }
        }
        a += 1;
    }
    out
}

fn all_by_trace(m: usize, bound: i64) -> Vec<HalfIntegralMatrix> {
    fn diagonals(m: usize, budget: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if prefix.len() == m {
            out.push(prefix.clone());
            return;
        }
        let remaining = (m - prefix.len() - 1) as i64;
        let mut x = 2;
        while x + 2 * remaining <= budget {
            prefix.push(x);
            diagonals(m, budget - x, prefix, out);
            prefix.pop();
            x += 2;
        }
    }
    let mut diags = Vec::new();
    diagonals(m, bound, &mut Vec::new(), &mut diags);
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for diag in diags {
        let mut mat = vec![vec![0i64; m]; m];
        for i in 0..m {
            mat[i][i] = diag[i];
        }
        fill(&pairs, 0, &mut mat, &mut out);
    }
    out
}

fn fill(pairs: &[(usize, usize)], at: usize, mat: &mut Vec<Vec<i64>>, out: &mut Vec<HalfIntegralMatrix>) {
    if at == pairs.len() {
        if let Ok(t) = HalfIntegralMatrix::new(mat.clone()) {
            out.push(t);
        }
        return;
    }
    let (i, j) = pairs[at];
    let lim = mat[i][i] * mat[j][j];
    let mut b = 0i64;
    while (b + 1) * (b + 1) < lim {
        b += 1;
    }
    for x in -b..=b {
        mat[i][j] = x;
        mat[j][i] = x;
        fill(pairs, at + 1, mat, out);
    }
    mat[i][j] = 0;
    mat[j][i] = 0;
}

/// Canonical representative of `T` under simultaneous signed permutations of
/// rows and columns (the lexicographically smallest image).
pub fn signed_permutation_key(t: &HalfIntegralMatrix) -> Vec<Vec<i64>> {
    let m = t.size();
    let mut perm: Vec<usize> = (0..m).collect();
    let mut best: Option<Vec<Vec<i64>>> = None;
    loop {
        for signs in 0u32..(1 << m) {
            let s = |i: usize| if signs >> i & 1 == 1 { -1 } else { 1 };
            let cand: Vec<Vec<i64>> =
                (0..m).map(|i| (0..m).map(|j| s(i) * s(j) * t.entry(perm[i], perm[j])).collect()).collect();
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.expect("nonempty")
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("successor exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Positive-definite `T` of size `m` within the bound, ordered by
/// `det(2T)` and then lexicographically on `2T`.
///
/// With `reduced`, binary forms are Gauss-reduced representatives and
/// quaternary forms are deduplicated up to signed permutations; without it,
/// every matrix is listed (only a trace bound makes that finite).
pub fn enumerate_forms(m: usize, bound: Bound, reduced: bool) -> Vec<HalfIntegralMatrix> {
    try_enumerate_forms(m, bound, reduced).expect("finite enumeration request")
}

pub fn try_enumerate_forms(m: usize, bound: Bound, reduced: bool) -> Result<Vec<HalfIntegralMatrix>> {
    let mut forms = match (m, bound, reduced) {
        (2, _, true) => reduced_binary(bound),
        (_, Bound::Trace(t), false) => all_by_trace(m, t),
        (_, Bound::Trace(t), true) => {
            let mut seen = BTreeSet::new();
            all_by_trace(m, t).into_iter().filter(|f| seen.insert(signed_permutation_key(f))).collect()
        }
        (_, Bound::Det(_), _) => {
            return Err(Error::Invalid(format!("a determinant bound needs reduction, unavailable for size {m}")))
        }
    };
    forms.sort_by_cached_key(|f| (f.det_two_t(), f.two_t().to_vec()));
    Ok(forms)
}

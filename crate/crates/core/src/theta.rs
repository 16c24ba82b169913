//! Theta series coefficients of `E8 ⊕ E8` and `D16⁺` up to degree 4.
//!
//! Both lattices live in `(1/2)Z^16` with the standard inner product, so
//! vectors are stored with doubled coordinates and inner products are
//! integer sums divided by 4. Short vectors are enumerated in basis
//! coordinates by Fincke–Pohst over an exact rational `LDLᵀ` of the Gram
//! matrix.

use std::collections::BTreeMap;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadform::{det_bareiss, HalfIntegralMatrix};

const DIM: usize = 16;

/// Largest vector norm [`short_vectors`] will enumerate.
pub const MAX_NORM: i64 = 8;

type Q = Ratio<i128>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LatticeName {
    E8,
    E8E8,
    D16Plus,
}

impl std::fmt::Display for LatticeName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LatticeName::E8 => "e8",
            LatticeName::E8E8 => "e8e8",
            LatticeName::D16Plus => "d16p",
        })
    }
}

impl std::str::FromStr for LatticeName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e8" => Ok(LatticeName::E8),
            "e8e8" => Ok(LatticeName::E8E8),
            "d16p" | "d16+" => Ok(LatticeName::D16Plus),
            _ => Err(Error::Invalid(format!("unknown lattice {s:?}"))),
        }
    }
}

/// An even unimodular lattice with a basis in doubled coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvenLattice {
    name: LatticeName,
    /// Rows are basis vectors, coordinates multiplied by 2.
    basis: Vec<[i8; DIM]>,
    gram: Vec<Vec<i64>>,
}

fn doubled(v: &[i8]) -> [i8; DIM] {
    let mut out = [0i8; DIM];
    out[..v.len()].copy_from_slice(v);
    out
}

/// `2(e_j - e_i)`.
fn diff(i: usize, j: usize) -> [i8; DIM] {
    let mut v = [0i8; DIM];
    v[j] = 2;
    v[i] = -2;
    v
}

fn e8_basis(offset: usize) -> Vec<[i8; DIM]> {
    let mut out = Vec::with_capacity(8);
    let mut a1 = [0i8; DIM];
    for (k, c) in [1, -1, -1, -1, -1, -1, -1, 1].into_iter().enumerate() {
        a1[offset + k] = c;
    }
    out.push(a1);
    let mut a2 = [0i8; DIM];
    a2[offset] = 2;
    a2[offset + 1] = 2;
    out.push(a2);
    for k in 0..6 {
        out.push(diff(offset + k, offset + k + 1));
    }
    out
}

fn d16_plus_basis() -> Vec<[i8; DIM]> {
    let mut out: Vec<[i8; DIM]> = (0..14).map(|k| diff(k, k + 1)).collect();
    let mut s = [0i8; DIM];
    s[0] = 2;
    s[1] = 2;
    out.push(s);
    out.push(doubled(&[1; DIM]));
    out
}

fn dot(a: &[i8; DIM], b: &[i8; DIM]) -> i64 {
    let s: i32 = a.iter().zip(b).map(|(&x, &y)| x as i32 * y as i32).sum();
    (s / 4) as i64
}

impl EvenLattice {
    pub fn new(name: LatticeName) -> Result<Self> {
        let basis = match name {
            LatticeName::E8 => e8_basis(0),
            LatticeName::E8E8 => {
                let mut b = e8_basis(0);
                b.extend(e8_basis(8));
                b
            }
            LatticeName::D16Plus => d16_plus_basis(),
        };
        let gram: Vec<Vec<i64>> = basis.iter().map(|u| basis.iter().map(|v| dot(u, v)).collect()).collect();
        let lattice = Self { name, basis, gram };
        lattice.validate()?;
        Ok(lattice)
    }

    pub fn e8e8() -> Self {
        Self::new(LatticeName::E8E8).expect("valid construction")
    }

    pub fn d16_plus() -> Self {
        Self::new(LatticeName::D16Plus).expect("valid construction")
    }

    pub fn e8() -> Self {
        Self::new(LatticeName::E8).expect("valid construction")
    }

    /// Integral, even and unimodular Gram matrix; basis vectors in `(1/2)Z`.
    fn validate(&self) -> Result<()> {
        for (i, row) in self.gram.iter().enumerate() {
            for (j, &g) in row.iter().enumerate() {
                let exact: i32 = self.basis[i].iter().zip(&self.basis[j]).map(|(&x, &y)| x as i32 * y as i32).sum();
                if exact % 4 != 0 || g != (exact / 4) as i64 {
                    return Err(Error::Invalid(format!("{}: non-integral inner product", self.name)));
                }
            }
            if row[i] % 2 != 0 {
                return Err(Error::Invalid(format!("{}: odd diagonal", self.name)));
            }
        }
        let det = det_bareiss(&self.gram);
        if det != 1 {
            return Err(Error::Invalid(format!("{}: Gram determinant {det}", self.name)));
        }
        Ok(())
    }

    pub fn name(&self) -> LatticeName {
        self.name
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    /// Coordinate blocks of the model: each block is `{x ∈ Z^k ∪ (Z+½)^k : Σ x even}`.
    fn blocks(&self) -> Vec<std::ops::Range<usize>> {
        match self.name {
            LatticeName::E8 => vec![0..8],
            LatticeName::E8E8 => vec![0..8, 8..16],
            LatticeName::D16Plus => vec![0..16],
        }
    }

    /// Membership of a doubled ambient vector.
    pub fn contains(&self, v: &[i8; DIM]) -> bool {
        let used: usize = self.blocks().iter().map(|b| b.len()).sum();
        if v[used..].iter().any(|&c| c != 0) {
            return false;
        }
        self.blocks().into_iter().all(|b| {
            let block = &v[b];
            let parity = block[0].rem_euclid(2);
            let sum: i32 = block.iter().map(|&c| c as i32).sum();
            block.iter().all(|c| c.rem_euclid(2) == parity) && sum % 4 == 0
        })
    }

    /// Invariant separating the orbits of the group generated by coordinate
    /// permutations and even sign changes within a block (and, for
    /// `E8 ⊕ E8`, the swap of the two blocks). Both preserve the lattice.
    pub fn orbit_key(&self, v: &[i8; DIM]) -> Vec<i8> {
        let mut keys: Vec<Vec<i8>> = self
            .blocks()
            .into_iter()
            .map(|b| {
                let block = &v[b];
                let mut key: Vec<i8> = block.iter().map(|c| c.abs()).collect();
                key.sort_unstable();
                let negatives = block.iter().filter(|&&c| c < 0).count() as i8;
                key.push(if block.contains(&0) { 0 } else { 1 + negatives % 2 });
                key
            })
            .collect();
        keys.sort();
        keys.concat()
    }

    /// Coordinates of `Σ x_i b_i` in the ambient space, doubled.
    pub fn embed(&self, x: &[i64]) -> [i8; DIM] {
        let mut v = [0i64; DIM];
        for (c, b) in x.iter().zip(&self.basis) {
            for k in 0..DIM {
                v[k] += c * b[k] as i64;
            }
        }
        v.map(|c| i8::try_from(c).expect("short vector coordinates are small"))
    }
}

/// `Gram = Uᵀ diag(q) U` with `U` unit upper triangular; returns `(q, U)`.
fn ldl(gram: &[Vec<i64>]) -> (Vec<Q>, Vec<Vec<Q>>) {
    let n = gram.len();
    let mut a: Vec<Vec<Q>> = gram.iter().map(|r| r.iter().map(|&x| Q::from_integer(x as i128)).collect()).collect();
    let mut q = vec![Q::zero(); n];
    let mut u = vec![vec![Q::zero(); n]; n];
    for i in 0..n {
        q[i] = a[i][i];
        assert!(q[i].is_positive(), "Gram matrix must be positive definite");
        u[i][i] = Q::one();
        for j in i + 1..n {
            u[i][j] = a[i][j] / q[i];
        }
        for j in i + 1..n {
            for k in i + 1..n {
                let delta = u[i][j] * a[i][k];
                a[j][k] -= delta;
            }
        }
    }
    (q, u)
}

/// Integers `x` with `(x + c)² ≤ s`, as an inclusive range.
fn integer_window(c: Q, s: Q) -> Option<(i64, i64)> {
    if s.is_negative() {
        return None;
    }
    // sqrt(s) < r + 1
    let r = (s.floor().to_integer() as u128).isqrt() as i128;
    let inside = |x: i128| {
        let y = Q::from_integer(x) + c;
        y * y <= s
    };
    let mut lo = (-c).floor().to_integer() - r - 1;
    let mut hi = (-c).ceil().to_integer() + r + 1;
    while lo <= hi && !inside(lo) {
        lo += 1;
    }
    while hi >= lo && !inside(hi) {
        hi -= 1;
    }
    (lo <= hi).then_some((lo as i64, hi as i64))
}

/// All nonzero vectors of norm at most `bound`, grouped by norm, in basis
/// coordinates. Norm 0 maps to the zero vector alone.
pub fn short_vectors(lattice: &EvenLattice, bound: i64) -> Result<BTreeMap<i64, Vec<Vec<i64>>>> {
    if bound > MAX_NORM {
        return Err(Error::NormBound { needed: bound, bound: MAX_NORM });
    }
    let n = lattice.rank();
    let (q, u) = ldl(&lattice.gram);
    let mut out: BTreeMap<i64, Vec<Vec<i64>>> = BTreeMap::new();
    out.insert(0, vec![vec![0; n]]);
    if bound < 2 {
        return Ok(out);
    }
    // The last coordinate is enumerated in parallel.
    let c_last = Q::zero();
    let Some((lo, hi)) = integer_window(c_last, Q::from_integer(bound as i128) / q[n - 1]) else {
        return Ok(out);
    };
    let chunks: Vec<Vec<Vec<i64>>> = (lo..=hi)
        .into_par_iter()
        .map(|xn| {
            let mut found = Vec::new();
            let mut x = vec![0i64; n];
            x[n - 1] = xn;
            let y = Q::from_integer(xn as i128);
            let rest = Q::from_integer(bound as i128) - q[n - 1] * y * y;
            descend(&q, &u, n - 1, rest, &mut x, &mut found);
            found
        })
        .collect();
    for v in chunks.into_iter().flatten() {
        if v.iter().all(|&c| c == 0) {
            continue;
        }
        let norm = quad(&lattice.gram, &v);
        out.entry(norm).or_default().push(v);
    }
    for list in out.values_mut() {
        list.sort();
    }
    Ok(out)
}

fn descend(q: &[Q], u: &[Vec<Q>], level: usize, rest: Q, x: &mut Vec<i64>, found: &mut Vec<Vec<i64>>) {
    if level == 0 {
        found.push(x.clone());
        return;
    }
    let i = level - 1;
    let mut c = Q::zero();
    for (j, xj) in x.iter().enumerate().skip(i + 1) {
        if *xj != 0 {
            c += u[i][j] * Q::from_integer(*xj as i128);
        }
    }
    let Some((lo, hi)) = integer_window(c, rest / q[i]) else {
        return;
    };
    for xi in lo..=hi {
        x[i] = xi;
        let y = Q::from_integer(xi as i128) + c;
        descend(q, u, i, rest - q[i] * y * y, x, found);
    }
    x[i] = 0;
}

fn quad(gram: &[Vec<i64>], x: &[i64]) -> i64 {
    let mut s = 0;
    for (i, row) in gram.iter().enumerate() {
        for (j, g) in row.iter().enumerate() {
            s += x[i] * g * x[j];
        }
    }
    s
}

/// Short vectors of one lattice in doubled ambient coordinates, by norm.
#[derive(Debug, Clone)]
pub struct ThetaCounter {
    lattice: EvenLattice,
    bound: i64,
    by_norm: BTreeMap<i64, Vec<[i8; DIM]>>,
}

/// Which order the tuple search visits the entries of `T` in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchOrder {
    /// Larger norms first.
    NormDescending,
    /// The reverse of [`SearchOrder::NormDescending`].
    NormAscending,
}

impl ThetaCounter {
    pub fn new(lattice: EvenLattice, bound: i64) -> Result<Self> {
        let vectors = short_vectors(&lattice, bound)?;
        let by_norm = vectors.into_iter().map(|(k, vs)| (k, vs.iter().map(|v| lattice.embed(v)).collect())).collect();
        Ok(Self { lattice, bound, by_norm })
    }

    pub fn lattice(&self) -> &EvenLattice {
        &self.lattice
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn count_of_norm(&self, norm: i64) -> usize {
        self.by_norm.get(&norm).map_or(0, Vec::len)
    }

    /// `#{(x_1..x_g) : (x_i, x_j) = gram_ij}` for any symmetric integer
    /// `gram`, singular ones included.
    ///
    /// The first vector runs over orbit representatives of the signed
    /// coordinate permutations preserving the lattice, weighted by orbit
    /// size; later vectors are filtered ahead of time and the last one is
    /// counted rather than enumerated.
    pub fn count_gram(&self, gram: &[Vec<i64>], order: SearchOrder) -> Result<u64> {
        let g = gram.len();
        if g == 0 {
            return Ok(1);
        }
        if let Some(&bad) = (0..g).map(|i| &gram[i][i]).find(|&&x| x > self.bound) {
            return Err(Error::NormBound { needed: bad, bound: self.bound });
        }
        if (0..g).any(|i| gram[i][i] < 0 || gram[i][i] % 2 != 0) {
            return Ok(0);
        }
        let mut idx: Vec<usize> = (0..g).collect();
        idx.sort_by_key(|&i| (std::cmp::Reverse(gram[i][i]), i));
        if order == SearchOrder::NormAscending {
            idx.reverse();
        }
        let g2: Vec<Vec<i64>> = idx.iter().map(|&i| idx.iter().map(|&j| gram[i][j]).collect()).collect();
        let lists: Vec<&[[i8; DIM]]> = g2.iter().enumerate().map(|(i, r)| self.list(r[i])).collect();
        let mut orbits: BTreeMap<Vec<i8>, (&[i8; DIM], u64)> = BTreeMap::new();
        for x in lists[0] {
            orbits.entry(self.lattice.orbit_key(x)).or_insert((x, 0)).1 += 1;
        }
        let total = orbits
            .into_par_iter()
            .map(|(_, (x0, size))| {
                let rest: Vec<Vec<&[i8; DIM]>> =
                    (1..g).map(|j| lists[j].iter().filter(|y| dot(x0, y) == g2[0][j]).collect()).collect();
                size * extend(&g2, 1, &rest)
            })
            .sum();
        Ok(total)
    }

    fn list(&self, norm: i64) -> &[[i8; DIM]] {
        self.by_norm.get(&norm).map_or(&[], Vec::as_slice)
    }

    pub fn theta_coefficient(&self, t: &HalfIntegralMatrix) -> Result<u64> {
        if t.size() > 4 {
            return Err(Error::InvalidMatrix("theta coefficients are available up to degree 4".into()));
        }
        self.count_gram(t.two_t(), SearchOrder::NormDescending)
    }
}

/// Tuples completing a prefix of length `level`, given the candidates for
/// each remaining position already filtered against the prefix.
fn extend(gram: &[Vec<i64>], level: usize, rest: &[Vec<&[i8; DIM]>]) -> u64 {
    match rest.len() {
        0 => 1,
        1 => rest[0].len() as u64,
        _ => {
            let mut total = 0;
            for y in &rest[0] {
                let next: Vec<Vec<&[i8; DIM]>> = rest[1..]
                    .iter()
                    .enumerate()
                    .map(|(k, list)| list.iter().copied().filter(|z| dot(y, z) == gram[level][level + 1 + k]).collect())
                    .collect();
                if next.iter().all(|l| !l.is_empty()) {
                    total += extend(gram, level + 1, &next);
                }
            }
            total
        }
    }
}

/// Counters for both rank-16 lattices sharing one norm bound.
#[derive(Debug, Clone)]
pub struct SchottkyOracle {
    pub e8e8: ThetaCounter,
    pub d16p: ThetaCounter,
}

impl SchottkyOracle {
    pub fn new(bound: i64) -> Result<Self> {
        Ok(Self { e8e8: ThetaCounter::new(EvenLattice::e8e8(), bound)?, d16p: ThetaCounter::new(EvenLattice::d16_plus(), bound)? })
    }

    /// `θ_{E8⊕E8}(T) - θ_{D16⁺}(T)`.
    pub fn schottky_coefficient(&self, t: &HalfIntegralMatrix) -> Result<i64> {
        let a = self.e8e8.theta_coefficient(t)? as i64;
        let b = self.d16p.theta_coefficient(t)? as i64;
        Ok(a - b)
    }

    /// The difference counted twice, with opposite search orders; a mismatch
    /// is an error.
    pub fn schottky_coefficient_checked(&self, t: &HalfIntegralMatrix) -> Result<i64> {
        let once = self.schottky_coefficient(t)?;
        let a = self.e8e8.count_gram(t.two_t(), SearchOrder::NormAscending)? as i64;
        let b = self.d16p.count_gram(t.two_t(), SearchOrder::NormAscending)? as i64;
        if a - b != once {
            return Err(Error::Invalid(format!("{t}: search orders disagree ({once} vs {})", a - b)));
        }
        Ok(once)
    }
}

/// `θ_{E8⊕E8}(T)` as `Σ_{T_1 + T_2 = T} θ_{E8}(T_1) θ_{E8}(T_2)` over
/// positive semidefinite `T_1`, `T_2`, for `T` of size at most 2.
pub fn e8_convolution(e8: &ThetaCounter, gram: &[Vec<i64>]) -> Result<u64> {
    let g = gram.len();
    let psd = |m: &[Vec<i64>]| match m.len() {
        1 => m[0][0] >= 0,
        2 => m[0][0] >= 0 && m[1][1] >= 0 && m[0][0] * m[1][1] >= m[0][1] * m[0][1],
        _ => unreachable!(),
    };
    let mut total = 0;
    match g {
        1 => {
            for a in (0..=gram[0][0]).step_by(2) {
                let t1 = vec![vec![a]];
                let t2 = vec![vec![gram[0][0] - a]];
                total += e8.count_gram(&t1, SearchOrder::NormDescending)? * e8.count_gram(&t2, SearchOrder::NormDescending)?;
            }
        }
        2 => {
            for a in (0..=gram[0][0]).step_by(2) {
                for c in (0..=gram[1][1]).step_by(2) {
                    let r = (a * c).isqrt() + 1;
                    for b in -r..=r {
                        let t1 = vec![vec![a, b], vec![b, c]];
                        let t2 = vec![vec![gram[0][0] - a, gram[0][1] - b], vec![gram[0][1] - b, gram[1][1] - c]];
                        if psd(&t1) && psd(&t2) {
                            total += e8.count_gram(&t1, SearchOrder::NormDescending)?
                                * e8.count_gram(&t2, SearchOrder::NormDescending)?;
                        }
                    }
                }
            }
        }
        _ => return Err(Error::InvalidMatrix("convolution check handles sizes 1 and 2".into())),
    }
    Ok(total)
}

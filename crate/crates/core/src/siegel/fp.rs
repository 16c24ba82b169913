//! Quadratic forms over `F_p` and the number of isometric embeddings into
//! the hyperbolic space `H_k`, as polynomials in `Y = p^k`.

use num_traits::{One, Zero};

use crate::arith::{int, kronecker, pow_rat, Int, Poly, Rat};

pub(crate) fn inv_mod(a: i64, p: i64) -> i64 {
    let (mut r0, mut r1) = (a.rem_euclid(p), p);
    let (mut s0, mut s1) = (1i64, 0i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    assert_eq!(r0, 1, "{a} is not invertible mod {p}");
    s0.rem_euclid(p)
}

/// A quadratic form on `F_p^d`: `q[i] = Q(e_i)` and `b[i][j] = B(e_i, e_j)`
/// for the polar form `B(x, y) = Q(x + y) - Q(x) - Q(y)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpQuadForm {
    pub p: i64,
    pub q: Vec<i64>,
    pub b: Vec<Vec<i64>>,
}

impl FpQuadForm {
    /// Builds the form from `Q(e_i)` and the off-diagonal polar values; the
    /// diagonal of `b` is recomputed as `2 Q(e_i)`.
    pub fn new(p: i64, q: Vec<i64>, b: Vec<Vec<i64>>) -> Self {
        let q: Vec<i64> = q.into_iter().map(|x| x.rem_euclid(p)).collect();
        let mut b: Vec<Vec<i64>> = b.into_iter().map(|r| r.into_iter().map(|x| x.rem_euclid(p)).collect()).collect();
        for (i, qi) in q.iter().enumerate() {
            b[i][i] = 2 * qi % p;
        }
        Self { p, q, b }
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn value(&self, v: &[i64]) -> i64 {
        let d = self.dim();
        let mut acc = 0i64;
        for i in 0..d {
            acc += v[i] * v[i] % self.p * self.q[i];
            for j in i + 1..d {
                acc += v[i] * v[j] % self.p * self.b[i][j];
            }
            acc %= self.p;
        }
        acc.rem_euclid(self.p)
    }

    pub fn polar(&self, v: &[i64], w: &[i64]) -> i64 {
        let d = self.dim();
        let mut acc = 0i64;
        for i in 0..d {
            for j in 0..d {
                acc = (acc + v[i] * self.b[i][j] % self.p * w[j]) % self.p;
            }
        }
        acc.rem_euclid(self.p)
    }

    /// The form in the basis given by the columns of `basis`.
    pub fn restrict(&self, basis: &[Vec<i64>]) -> FpQuadForm {
        let r = basis.len();
        let q = basis.iter().map(|v| self.value(v)).collect();
        let b = (0..r).map(|i| (0..r).map(|j| self.polar(&basis[i], &basis[j])).collect()).collect();
        FpQuadForm { p: self.p, q, b }
    }

    /// Orthogonal sum with the zero form of dimension `s`.
    pub fn plus_zero(&self, s: usize) -> FpQuadForm {
        let d = self.dim() + s;
        let mut q = self.q.clone();
        q.resize(d, 0);
        let mut b = vec![vec![0; d]; d];
        for i in 0..self.dim() {
            b[i][..self.dim()].copy_from_slice(&self.b[i]);
        }
        FpQuadForm { p: self.p, q, b }
    }

    /// Basis of `{v : Q(v) = 0, B(v, ·) = 0}` followed by a complement.
    /// Returns `(complement, radical)`.
    pub fn radical_split(&self) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
        let p = self.p;
        let d = self.dim();
        let bilinear_rad = kernel_mod_p(&self.b, p);
        let radical = if p == 2 {
            // Q is additive on the bilinear radical, so its zero set there is
            // the kernel of a linear functional.
            let vals: Vec<i64> = bilinear_rad.iter().map(|v| self.value(v)).collect();
            match vals.iter().position(|&x| x != 0) {
                None => bilinear_rad,
                Some(piv) => bilinear_rad
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != piv)
                    .map(|(i, v)| {
                        if vals[i] == 0 {
                            v.clone()
                        } else {
                            v.iter().zip(&bilinear_rad[piv]).map(|(a, b)| (a + b) % 2).collect()
                        }
                    })
                    .collect(),
            }
        } else {
            bilinear_rad
        };
        let complement = complete_basis(&radical, d, p);
        (complement, radical)
    }
}

/// Row echelon rank of a matrix over `F_p`.
pub(crate) fn rank_mod_p(m: &[Vec<i64>], p: i64) -> usize {
    let mut a: Vec<Vec<i64>> = m.iter().map(|r| r.iter().map(|x| x.rem_euclid(p)).collect()).collect();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&i| a[i][c] != 0) else { continue };
        a.swap(rank, piv);
        let inv = inv_mod(a[rank][c], p);
        for i in rank + 1..rows {
            if a[i][c] != 0 {
                let f = a[i][c] * inv % p;
                for j in c..cols {
                    a[i][j] = (a[i][j] - f * a[rank][j]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Basis of the right kernel of a square matrix over `F_p`.
pub(crate) fn kernel_mod_p(m: &[Vec<i64>], p: i64) -> Vec<Vec<i64>> {
    let n = m.len();
    let mut a: Vec<Vec<i64>> = m.iter().map(|r| r.iter().map(|x| x.rem_euclid(p)).collect()).collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..n {
        let Some(piv) = (rank..n).find(|&i| a[i][c] != 0) else { continue };
        a.swap(rank, piv);
        let inv = inv_mod(a[rank][c], p);
        for x in a[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..n {
            if i != rank && a[i][c] != 0 {
                let f = a[i][c];
                for j in 0..n {
                    a[i][j] = (a[i][j] - f * a[rank][j]).rem_euclid(p);
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![0i64; n];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = (-a[r][free]).rem_euclid(p);
            }
            v
        })
        .collect()
}

/// Extends independent vectors to a basis of `F_p^d` by unit vectors and
/// returns only the added vectors.
fn complete_basis(vs: &[Vec<i64>], d: usize, p: i64) -> Vec<Vec<i64>> {
    let mut current: Vec<Vec<i64>> = vs.to_vec();
    let mut added = Vec::new();
    for i in 0..d {
        let mut e = vec![0i64; d];
        e[i] = 1;
        current.push(e.clone());
        if rank_mod_p(&current, p) == current.len() {
            added.push(e);
        } else {
            current.pop();
        }
    }
    added
}

/// Gaussian binomial coefficient `[s, j]_p`.
pub(crate) fn gaussian_binomial(s: u32, j: u32, p: u64) -> Int {
    if j > s {
        return Int::zero();
    }
    let p = Int::from(p);
    let mut num = Int::one();
    let mut den = Int::one();
    for i in 0..j {
        num *= p.pow(s - i) - 1u32;
        den *= p.pow(i + 1) - 1u32;
    }
    num / den
}

/// `#{X ∈ M_{2k×d}(F_p) : Q_H ∘ X = Q}` as a polynomial in `Y = p^k`,
/// by the finite Fourier transform over the dual space of quadratic forms.
pub fn count_all_gauss(form: &FpQuadForm) -> Poly {
    let p = form.p;
    let d = form.dim();
    let coords: Vec<(usize, usize)> = (0..d).flat_map(|i| (i..d).map(move |j| (i, j))).collect();
    let coeff: Vec<i64> = coords.iter().map(|&(i, j)| if i == j { form.q[i] } else { form.b[i][j] }).collect();
    let total = (p as u64).pow(coords.len() as u32);
    // weight[r] accumulates (p·[ψ = 0] - 1) over Y with rank Ŷ = r
    let mut weight = vec![0i64; d + 1];
    let mut y = vec![0i64; coords.len()];
    let mut mat = vec![vec![0i64; d]; d];
    for _ in 0..total {
        let psi = y.iter().zip(&coeff).map(|(a, b)| a * b).sum::<i64>().rem_euclid(p);
        for (&(i, j), &v) in coords.iter().zip(&y) {
            mat[i][j] = v;
            mat[j][i] = v;
        }
        let r = rank_mod_p(&mat, p);
        weight[r] += if psi == 0 { p - 1 } else { -1 };
        for c in y.iter_mut() {
            *c += 1;
            if *c < p {
                break;
            }
            *c = 0;
        }
    }
    let norm = pow_rat(p as u64, -((d * (d + 1) / 2) as i64)) / int(p - 1);
    let mut coeffs = vec![Rat::zero(); 2 * d + 1];
    for (r, w) in weight.into_iter().enumerate() {
        coeffs[2 * d - r] += int(w) * &norm;
    }
    Poly::new(coeffs)
}

/// Number of injective `X` with `Q_H ∘ X = Q`, from the full counts of
/// `Q' ⊥ 0^j` by Möbius inversion over subspaces of the radical.
pub fn count_primitive_gauss(form: &FpQuadForm) -> Poly {
    let p = form.p;
    let (complement, radical) = form.radical_split();
    let core = form.restrict(&complement);
    let s = radical.len();
    let mut prim: Vec<Poly> = Vec::with_capacity(s + 1);
    for j in 0..=s {
        let mut acc = count_all_gauss(&core.plus_zero(j));
        for i in 1..=j {
            let g = Rat::from_integer(gaussian_binomial(j as u32, i as u32, p as u64));
            acc = &acc - &prim[j - i].scale(&g);
        }
        prim.push(acc);
    }
    prim.pop().expect("nonempty")
}

/// Orthogonal basis of a form over `F_p`, `p` odd: returns the values
/// `Q(e_i)` of a diagonalizing basis (zeros for the radical).
pub fn diagonalize_odd(form: &FpQuadForm) -> Vec<i64> {
    let p = form.p;
    assert!(p != 2);
    let d = form.dim();
    // Work with the Gram matrix B = 2Q.
    let mut g = form.b.clone();
    let mut out = Vec::with_capacity(d);
    let mut active: Vec<usize> = (0..d).collect();
    while !active.is_empty() {
        let piv = active.iter().copied().find(|&i| g[i][i] != 0);
        let piv = match piv {
            Some(i) => i,
            None => {
                let pair = active.iter().flat_map(|&i| active.iter().map(move |&j| (i, j))).find(|&(i, j)| g[i][j] != 0);
                match pair {
                    None => {
                        out.extend(std::iter::repeat_n(0, active.len()));
                        break;
                    }
                    Some((i, j)) => {
                        // e_i ← e_i + e_j
                        for r in 0..d {
                            g[r][i] = (g[r][i] + g[r][j]) % p;
                        }
                        for c in 0..d {
                            g[i][c] = (g[i][c] + g[j][c]) % p;
                        }
                        i
                    }
                }
            }
        };
        let inv = inv_mod(g[piv][piv], p);
        for &j in active.iter().filter(|&&j| j != piv) {
            let f = g[piv][j] * inv % p;
            if f == 0 {
                continue;
            }
            for r in 0..d {
                g[r][j] = (g[r][j] - f * g[r][piv]).rem_euclid(p);
            }
            for c in 0..d {
                g[j][c] = (g[j][c] - f * g[piv][c]).rem_euclid(p);
            }
        }
        out.push(g[piv][piv] * inv_mod(2, p) % p);
        active.retain(|&j| j != piv);
    }
    out
}

fn legendre(a: i64, p: i64) -> i64 {
    kronecker(a, p) as i64
}

/// Injective isometric embeddings of a form over `F_p` (`p` odd) into `H_k`,
/// counted vector by vector, as a polynomial in `Y = p^k`.
pub fn count_primitive_geometric(form: &FpQuadForm) -> Poly {
    let p = form.p;
    let pu = p as u64;
    let diag = diagonalize_odd(form);
    let units: Vec<i64> = diag.iter().copied().filter(|&u| u != 0).collect();
    let r = units.len();
    let s = diag.len() - r;
    let y = |c: Rat, e: usize| Poly::monomial(c, e);
    let mut acc = Poly::one();
    let mut prod = 1i64;
    for (idx, &u) in units.iter().enumerate() {
        let i = idx + 1;
        let factor = if i % 2 == 1 {
            // complement of dimension 2k - (i - 1), even
            let eps = legendre(if (i - 1) / 2 % 2 == 0 { prod } else { -prod }, p);
            &y(pow_rat(pu, -(i as i64)), 2) - &y(int(eps) * pow_rat(pu, -((i as i64 + 1) / 2)), 1)
        } else {
            let prod_i = prod * u % p;
            let chi = legendre(if (i / 2) % 2 == 0 { prod_i } else { -prod_i }, p);
            &y(pow_rat(pu, -(i as i64)), 2) + &y(int(chi) * pow_rat(pu, -(i as i64 / 2)), 1)
        };
        acc = &acc * &factor;
        prod = prod * u % p;
    }
    let eps = legendre(if (r / 2).is_multiple_of(2) { prod } else { -prod }, p);
    for j in 0..s {
        let top = (r + 2 * j + 1) as i64;
        let mut singular = &y(pow_rat(pu, -top), 2) - &Poly::one();
        if r.is_multiple_of(2) {
            let h = (r / 2 + j) as i64;
            let lin = int(eps) * (pow_rat(pu, -h) - pow_rat(pu, -h - 1));
            singular = &singular + &y(lin, 1);
        }
        acc = (&acc * &singular).scale(&pow_rat(pu, j as i64));
    }
    acc
}

/// Injective embeddings, choosing the method by the characteristic.
pub fn count_primitive(form: &FpQuadForm) -> Poly {
    if form.p == 2 {
        count_primitive_gauss(form)
    } else {
        count_primitive_geometric(form)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_form(p: i64, d: usize, rng: &mut ChaCha8Rng) -> FpQuadForm {
        let q: Vec<i64> = (0..d).map(|_| rng.gen_range(0..p)).collect();
        let mut b = vec![vec![0i64; d]; d];
        for i in 0..d {
            b[i][i] = 2 * q[i] % p;
            for j in i + 1..d {
                let x = rng.gen_range(0..p);
                b[i][j] = x;
                b[j][i] = x;
            }
        }
        FpQuadForm { p, q, b }
    }

    /// Literal count of injective `X` over `F_p` for `H_k` with small `k`.
    fn brute_primitive(form: &FpQuadForm, k: usize) -> i64 {
        let p = form.p;
        let d = form.dim();
        let n = 2 * k;
        let total = (p as u64).pow((n * d) as u32);
        let mut x = vec![0i64; n * d];
        let mut count = 0;
        for _ in 0..total {
            let col = |c: usize| -> Vec<i64> { (0..n).map(|r| x[r * d + c]).collect() };
            let qh = |v: &[i64]| -> i64 { (0..k).map(|l| v[2 * l] * v[2 * l + 1]).sum::<i64>().rem_euclid(p) };
            let cols: Vec<Vec<i64>> = (0..d).map(col).collect();
            let mut ok = true;
            'outer: for i in 0..d {
                if qh(&cols[i]) != form.q[i] {
                    ok = false;
                    break;
                }
                for j in i + 1..d {
                    let sum: Vec<i64> = cols[i].iter().zip(&cols[j]).map(|(a, b)| (a + b) % p).collect();
                    let bij = (qh(&sum) - qh(&cols[i]) - qh(&cols[j])).rem_euclid(p);
                    if bij != form.b[i][j] {
                        ok = false;
                        break 'outer;
                    }
                }
            }
            if ok {
                let mat: Vec<Vec<i64>> = (0..n).map(|r| (0..d).map(|c| x[r * d + c]).collect()).collect();
                if rank_mod_p(&mat, p) == d {
                    count += 1;
                }
            }
            for c in x.iter_mut() {
                *c += 1;
                if *c < p {
                    break;
                }
                *c = 0;
            }
        }
        count
    }

    fn eval_at(poly: &Poly, p: i64, k: u32) -> Rat {
        poly.eval(&Rat::from_integer(Int::from(p).pow(k)))
    }

    #[test]
    fn gauss_binomials() {
        assert_eq!(gaussian_binomial(2, 1, 2), Int::from(3));
        assert_eq!(gaussian_binomial(4, 2, 2), Int::from(35));
        assert_eq!(gaussian_binomial(3, 0, 5), Int::from(1));
    }

    #[test]
    fn primitive_counts_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (p, d, k) in [(2i64, 1usize, 2usize), (2, 2, 2), (3, 1, 2), (3, 2, 2), (2, 2, 3), (5, 1, 2)] {
            for _ in 0..6 {
                let f = random_form(p, d, &mut rng);
                let expect = int(brute_primitive(&f, k));
                assert_eq!(eval_at(&count_primitive_gauss(&f), p, k as u32), expect, "{f:?} k={k}");
                if p != 2 {
                    assert_eq!(eval_at(&count_primitive_geometric(&f), p, k as u32), expect, "{f:?} k={k}");
                }
            }
        }
    }

    #[test]
    fn geometric_matches_gauss() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (p, d, trials) in [(3i64, 2usize, 40), (3, 3, 40), (3, 4, 12), (5, 2, 40), (5, 3, 10), (7, 2, 20)] {
            for _ in 0..trials {
                let f = random_form(p, d, &mut rng);
                assert_eq!(count_primitive_geometric(&f), count_primitive_gauss(&f), "{f:?}");
            }
        }
    }

    #[test]
    fn zero_forms_and_degenerate_cases() {
        for p in [2i64, 3] {
            let z = FpQuadForm { p, q: vec![0, 0], b: vec![vec![0, 0], vec![0, 0]] };
            assert_eq!(count_primitive_gauss(&z), count_primitive(&z));
            // pairs of independent orthogonal singular vectors in H_3
            let k = 3;
            assert_eq!(eval_at(&count_primitive_gauss(&z), p, k), int(brute_primitive(&z, k as usize)));
        }
    }
}

use num_traits::{One, Zero};

use super::HalfIntegralMatrix;
use crate::arith::{pow_rat, valuation_rat, Rat};

/// `p^scale · gram` with `gram` unimodular over `Z_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JordanBlock {
    pub scale: u32,
    pub gram: Vec<Vec<Rat>>,
}

impl JordanBlock {
    pub fn size(&self) -> usize {
        self.gram.len()
    }

    /// For `p = 2`: a 2×2 block, or 1×1 block with even entry, is of even type.
    pub fn is_even_type(&self) -> bool {
        self.gram.len() == 2
    }
}

/// Orthogonal splitting of `2T` over `Z_p`, together with a transformation
/// `U ∈ GL_m(Z_(p))` such that `Uᵀ (2T) U` is the block diagonal matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JordanSplitting {
    pub prime: u64,
    pub blocks: Vec<JordanBlock>,
    pub transform: Vec<Vec<Rat>>,
}

impl JordanSplitting {
    pub fn scales(&self) -> Vec<u32> {
        self.blocks.iter().flat_map(|b| std::iter::repeat_n(b.scale, b.size())).collect()
    }

    /// The block diagonal matrix `⊥ p^scale · gram`.
    pub fn assembled(&self) -> Vec<Vec<Rat>> {
        let m: usize = self.blocks.iter().map(|b| b.size()).sum();
        let mut out = vec![vec![Rat::zero(); m]; m];
        let mut at = 0;
        for b in &self.blocks {
            let s = pow_rat(self.prime, b.scale as i64);
            for i in 0..b.size() {
                for j in 0..b.size() {
                    out[at + i][at + j] = &b.gram[i][j] * &s;
                }
            }
            at += b.size();
        }
        out
    }

    /// `Σ size · scale + ord_p det(gram)` over the blocks.
    pub fn det_valuation(&self) -> i64 {
        self.blocks
            .iter()
            .map(|b| {
                let det = match b.size() {
                    1 => b.gram[0][0].clone(),
                    _ => &b.gram[0][0] * &b.gram[1][1] - &b.gram[0][1] * &b.gram[1][0],
                };
                b.size() as i64 * b.scale as i64 + valuation_rat(&det, self.prime)
            })
            .sum()
    }
}

struct Work {
    p: u64,
    s: Vec<Vec<Rat>>,
    u: Vec<Vec<Rat>>,
}

impl Work {
    fn val(&self, i: usize, j: usize) -> Option<i64> {
        let x = &self.s[i][j];
        (!x.is_zero()).then(|| valuation_rat(x, self.p))
    }

    /// Basis change `e_j ← e_j + c·e_k`.
    fn add_col(&mut self, j: usize, k: usize, c: &Rat) {
        if c.is_zero() {
            return;
        }
        let m = self.s.len();
        for r in 0..m {
            let t = &self.s[r][k] * c;
            self.s[r][j] += t;
        }
        for r in 0..m {
            let t = &self.s[k][r] * c;
            self.s[j][r] += t;
        }
        for r in 0..m {
            let t = &self.u[r][k] * c;
            self.u[r][j] += t;
        }
    }

    fn swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.s.swap(i, j);
        for row in self.s.iter_mut() {
            row.swap(i, j);
        }
        for row in self.u.iter_mut() {
            row.swap(i, j);
        }
    }
}

/// Jordan splitting of `2T` at `p`. Size-one blocks are preferred whenever a
/// diagonal entry attains the minimal valuation.
pub fn jordan(t: &HalfIntegralMatrix, p: u64) -> JordanSplitting {
    let m = t.size();
    let s = t.two_t().iter().map(|r| r.iter().map(|&x| Rat::from_integer(x.into())).collect()).collect();
    let u = (0..m).map(|i| (0..m).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect()).collect();
    let mut w = Work { p, s, u };
    let mut blocks = Vec::new();
    let mut start = 0;
    while start < m {
        let v = (start..m)
            .flat_map(|i| (start..m).map(move |j| (i, j)))
            .filter_map(|(i, j)| w.val(i, j))
            .min()
            .expect("nondegenerate form");
        if let Some(i) = (start..m).find(|&i| w.val(i, i) == Some(v)) {
            w.swap(start, i);
            for j in start + 1..m {
                let c = -&w.s[start][j] / &w.s[start][start];
                w.add_col(j, start, &c);
            }
            let scale = pow_rat(p, -v);
            blocks.push(JordanBlock { scale: v as u32, gram: vec![vec![&w.s[start][start] * &scale]] });
            start += 1;
            continue;
        }
        let (i, j) = (start..m)
            .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
            .find(|&(i, j)| w.val(i, j) == Some(v))
            .expect("minimal valuation is attained");
        if p != 2 {
            // e_i + e_j has norm of valuation v when the diagonal does not.
            w.add_col(i, j, &Rat::one());
            continue;
        }
        w.swap(start, i);
        w.swap(start + 1, j);
        let (a, b, d) = (w.s[start][start].clone(), w.s[start][start + 1].clone(), w.s[start + 1][start + 1].clone());
        let det = &a * &d - &b * &b;
        for k in start + 2..m {
            let (x, y) = (w.s[start][k].clone(), w.s[start + 1][k].clone());
            let c1 = -(&d * &x - &b * &y) / &det;
            let c2 = -(&a * &y - &b * &x) / &det;
            w.add_col(k, start, &c1);
            w.add_col(k, start + 1, &c2);
        }
        let scale = pow_rat(p, -v);
        let gram = vec![vec![&a * &scale, &b * &scale], vec![&b * &scale, &d * &scale]];
        blocks.push(JordanBlock { scale: v as u32, gram });
        start += 2;
    }
    JordanSplitting { prime: p, blocks, transform: w.u }
}

//! Exact scalar arithmetic and the classical special values everything else
//! is built from.

mod halfpow;
mod laurent;
mod poly;
mod qexp;

pub use halfpow::HalfPowerScalar;
pub use laurent::{chebyshev_values, SymmetricLaurentPoly};
pub use poly::Poly;
pub use qexp::QExpansion;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

/// `p^e` as an exact rational; `e` may be negative.
pub fn pow_rat(p: u64, e: i64) -> Rat {
    let base = Int::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Rat::from_integer(base)
    } else {
        Rat::new(Int::one(), base)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&k| is_prime(k)).collect()
}

/// Prime factorisation of `n > 0` by trial division.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: i64, p: u64) -> u32 {
    assert!(n != 0, "valuation of zero");
    let p = p as i64;
    let mut n = n;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

pub fn valuation_big(n: &Int, p: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    let p = Int::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// Valuation of a nonzero rational.
pub fn valuation_rat(x: &Rat, p: u64) -> i64 {
    valuation_big(x.numer(), p) as i64 - valuation_big(x.denom(), p) as i64
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds: Vec<u64> = (1..).take_while(|d| d * d <= n).filter(|d| n.is_multiple_of(*d)).collect();
    let mut hi: Vec<u64> = ds.iter().rev().map(|d| n / d).filter(|&q| q * q != n).collect();
    ds.append(&mut hi);
    ds
}

pub fn mobius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// σ_k(n) = Σ_{d | n} d^k.
pub fn sigma(k: u32, n: u64) -> Int {
    divisors(n).into_iter().map(|d| Int::from(d).pow(k)).sum()
}

pub fn binomial(n: u64, k: u64) -> Int {
    if k > n {
        return Int::zero();
    }
    let mut acc = Int::one();
    for i in 0..k {
        acc = acc * Int::from(n - i) / Int::from(i + 1);
    }
    acc
}

/// Bernoulli numbers `B_0..=B_n` with `B_1 = -1/2`.
pub fn bernoulli_numbers(n: usize) -> Vec<Rat> {
    let mut b: Vec<Rat> = Vec::with_capacity(n + 1);
    b.push(Rat::one());
    for k in 1..=n {
        // Σ_{j<=k} C(k+1, j) B_j = 0
        let s: Rat = (0..k)
            .map(|j| Rat::from_integer(binomial(k as u64 + 1, j as u64)) * &b[j])
            .sum();
        b.push(-s / Rat::from_integer(Int::from(k + 1)));
    }
    b
}

pub fn bernoulli(k: usize) -> Rat {
    bernoulli_numbers(k).pop().unwrap()
}

/// ζ(1 - 2r) = -B_{2r} / (2r).
pub fn zeta_neg(r: u32) -> Rat {
    assert!(r >= 1);
    let r2 = 2 * r as usize;
    -bernoulli(r2) / int(r2 as i64)
}

/// Kronecker symbol (D / m).
pub fn kronecker(d: i64, m: i64) -> i8 {
    if m == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    let mut result: i8 = 1;
    let mut m = m;
    if m < 0 {
        m = -m;
        if d < 0 {
            result = -result;
        }
    }
    let v = m.trailing_zeros();
    if v > 0 {
        if d % 2 == 0 {
            return 0;
        }
        if v % 2 == 1 {
            let r = d.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        m >>= v;
    }
    // Jacobi symbol (d / m) for odd m > 0
    let mut a = d.rem_euclid(m);
    let mut n = m;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

fn squarefree_split(n: i64) -> (i64, u64) {
    // n = s * g^2 with s squarefree (sign carried by s)
    let mut s: i64 = n.signum();
    let mut g: u64 = 1;
    for (p, e) in factorize(n.unsigned_abs()) {
        g *= p.pow(e / 2);
        if e % 2 == 1 {
            s *= p as i64;
        }
    }
    (s, g)
}

/// Whether `d` is 1 or the discriminant of a quadratic field.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 1 {
        return true;
    }
    if d == 0 {
        return false;
    }
    let (s, g) = squarefree_split(d);
    match d.rem_euclid(4) {
        1 => g == 1,
        0 => {
            let m = d / 4;
            let r = m.rem_euclid(4);
            (r == 2 || r == 3) && squarefree_split(m).1 == 1 && s == m
        }
        _ => false,
    }
}

/// Writes a discriminant as `d · f²` with `d` fundamental (possibly 1).
pub fn fundamental_part(disc: i64) -> Result<(i64, u64)> {
    if disc == 0 || !matches!(disc.rem_euclid(4), 0 | 1) {
        return Err(Error::NotDiscriminant(disc));
    }
    let (s, g) = squarefree_split(disc);
    if s.rem_euclid(4) == 1 {
        Ok((s, g))
    } else {
        debug_assert!(g % 2 == 0);
        Ok((4 * s, g / 2))
    }
}

/// Generalised Bernoulli number B_{r, χ_d} via the character sum over
/// residues `1..=|d|`.
pub fn generalized_bernoulli(r: u32, d: i64) -> Rat {
    let f = d.unsigned_abs();
    let b = bernoulli_numbers(r as usize);
    // S_i = Σ_{a=1}^{f} χ(a) a^i
    let chi: Vec<i8> = (1..=f).map(|a| kronecker(d, a as i64)).collect();
    let power_sum = |i: u32| -> Int {
        chi.iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(a, &c)| Int::from(c) * Int::from(a as u64 + 1).pow(i))
            .sum()
    };
    // f^{r-1} Σ_a χ(a) B_r(a/f) = Σ_j C(r,j) B_j f^{j-1} S_{r-j}
    (0..=r)
        .map(|j| {
            Rat::from_integer(binomial(r as u64, j as u64) * power_sum(r - j))
                * &b[j as usize]
                * pow_rat(f, j as i64 - 1)
        })
        .sum()
}

/// L(1 - r, χ_d) = -B_{r,χ_d} / r for a fundamental discriminant `d`.
pub fn dirichlet_l_neg(r: u32, d: i64) -> Rat {
    assert!(r >= 1);
    -generalized_bernoulli(r, d) / int(r as i64)
}

/// Cohen's function H(r, N).
pub fn cohen_h(r: u32, n: u64) -> Rat {
    assert!(r >= 1);
    if n == 0 {
        return zeta_neg(r);
    }
    let disc = if r.is_multiple_of(2) { n as i64 } else { -(n as i64) };
    let Ok((d, f)) = fundamental_part(disc) else {
        return Rat::zero();
    };
    let inner: Int = divisors(f)
        .into_iter()
        .map(|e| {
            let mu = mobius(e);
            let chi = kronecker(d, e as i64) as i64;
            Int::from(mu * chi) * Int::from(e).pow(r - 1) * sigma(2 * r - 1, f / e)
        })
        .sum();
    dirichlet_l_neg(r, d) * Rat::from_integer(inner)
}

pub fn to_i64(x: &Int) -> Option<i64> {
    x.to_i64()
}

pub fn is_integral(x: &Rat) -> bool {
    x.denom().is_one()
}

pub fn abs_rat(x: &Rat) -> Rat {
    x.abs()
}

use std::sync::OnceLock;

use proptest::prelude::*;

use ikeda_core::arith::{rat, HalfPowerScalar, Rat};
use ikeda_core::lift::{lift_coefficient, LiftJob};
use ikeda_core::quadform::{gauss_reduce, random_unimodular, Bound, HalfIntegralMatrix};
use ikeda_core::siegel::siegel_poly;
use ikeda_core::theta::{SchottkyOracle, SearchOrder};

fn binary(a: i64, b: i64, c: i64) -> HalfIntegralMatrix {
    HalfIntegralMatrix::new(vec![vec![2 * a, b], vec![b, 2 * c]]).unwrap()
}

/// Positive definite `a x² + b xy + c y²` with `4ac - b² ≤ 400`.
fn binary_form() -> impl Strategy<Value = HalfIntegralMatrix> {
    (1i64..=10, 1i64..=10, -10i64..=10)
        .prop_filter("positive definite", |&(a, c, b)| 4 * a * c - b * b > 0 && 4 * a * c - b * b <= 400)
        .prop_map(|(a, c, b)| binary(a, b, c))
}

fn saito_kurokawa() -> &'static LiftJob {
    static JOB: OnceLock<LiftJob> = OnceLock::new();
    JOB.get_or_init(|| LiftJob::new(9, 1, Bound::Det(400)).unwrap())
}

fn theta() -> &'static SchottkyOracle {
    static ORACLE: OnceLock<SchottkyOracle> = OnceLock::new();
    ORACLE.get_or_init(|| SchottkyOracle::new(4).unwrap())
}

fn half_power() -> impl Strategy<Value = HalfPowerScalar> {
    (-50i64..50, 1i64..20, -9i64..9).prop_map(|(n, d, e)| HalfPowerScalar::new(3, rat(n, d), e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn siegel_poly_is_gl_invariant(t in binary_form(), seed in any::<u64>()) {
        let moved = t.transform(&random_unimodular(2, 3, seed)).unwrap();
        for p in [2, 3, 5, 7] {
            prop_assert_eq!(siegel_poly(&t, p).unwrap().coeffs, siegel_poly(&moved, p).unwrap().coeffs);
        }
    }

    #[test]
    fn reduction_preserves_the_lift(t in binary_form(), seed in any::<u64>()) {
        let job = saito_kurokawa();
        let (a, b, c) = (t.entry(0, 0) / 2, t.entry(0, 1), t.entry(1, 1) / 2);
        let (ra, rb, rc) = gauss_reduce(a, b, c);
        let moved = t.transform(&random_unimodular(2, 4, seed)).unwrap();
        let value = lift_coefficient(job, &t).unwrap().value;
        prop_assert_eq!(&lift_coefficient(job, &binary(ra, rb, rc)).unwrap().value, &value);
        prop_assert_eq!(&lift_coefficient(job, &moved).unwrap().value, &value);
    }

    #[test]
    fn lift_is_linear_in_h(t in binary_form(), n in -20i64..20, d in 1i64..20) {
        prop_assume!(n != 0);
        let job = saito_kurokawa();
        let lambda = rat(n, d);
        let scaled = job.scaled(&lambda);
        let a = lift_coefficient(job, &t).unwrap().value;
        prop_assert_eq!(lift_coefficient(&scaled, &t).unwrap().value, a * lambda);
    }

    #[test]
    fn theta_counts_ignore_signed_permutations(
        (x, y, z) in (1i64..=2, 1i64..=2, -2i64..=2)
            .prop_filter("positive definite", |&(x, y, z)| 4 * x * y - z * z > 0),
        swap in any::<bool>(),
        flip in any::<bool>(),
    ) {
        let gram = vec![vec![2 * x, z], vec![z, 2 * y]];
        let (i, j) = if swap { (1, 0) } else { (0, 1) };
        let s = if flip { -1 } else { 1 };
        let moved = vec![vec![gram[i][i], s * gram[i][j]], vec![s * gram[j][i], gram[j][j]]];
        for counter in [&theta().e8e8, &theta().d16p] {
            let base = counter.count_gram(&gram, SearchOrder::NormDescending).unwrap();
            prop_assert_eq!(counter.count_gram(&moved, SearchOrder::NormAscending).unwrap(), base);
        }
    }

    #[test]
    fn half_powers_multiply_like_numbers(a in half_power(), b in half_power(), c in half_power()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        if let (Some(x), Some(y)) = (a.to_rational(), b.to_rational()) {
            prop_assert_eq!((&a * &b).to_rational(), Some(x * y));
        }
        let sq = &a * &a;
        prop_assert!(sq.is_rational());
        let value: Rat = a.value().clone();
        prop_assert_eq!(sq.to_rational().unwrap(), &value * &value * ikeda_core::arith::pow_rat(3, a.half_exp()));
    }

    #[test]
    fn half_power_sums_respect_parity(a in half_power(), b in half_power()) {
        let same = a.is_zero() || b.is_zero() || (a.half_exp() - b.half_exp()) % 2 == 0;
        let sum = a.checked_add(&b);
        prop_assert_eq!(sum.is_ok(), same);
        if let (Ok(s), Some(x), Some(y)) = (sum, a.to_rational(), b.to_rational()) {
            prop_assert_eq!(s.to_rational(), Some(x + y));
        }
    }
}

//! Proportion statistics: Wilson and Newcombe score intervals, the
//! two-proportion chi-square test with an exact-test fallback, and the
//! special functions they need. Kernels are generic over the float type;
//! the rest of the crate instantiates them at [`crate::Real`].

use num_traits::{Float, FromPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Floating-point scalar the numeric kernels run on.
pub trait Scalar: Float + FromPrimitive + core::fmt::Debug {}
impl<T> Scalar for T where T: Float + FromPrimitive + core::fmt::Debug {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("sample size must be at least 1")]
    EmptySample,
    #[error("hit count {k} exceeds sample size {n}")]
    CountExceedsSize { k: u64, n: u64 },
    #[error("confidence level must lie strictly between 0 and 1")]
    BadConfidence,
}

fn c<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("constant representable in scalar type")
}

fn from_count<T: Scalar>(n: u64) -> T {
    T::from_u64(n).expect("count representable in scalar type")
}

/// Natural log of the gamma function (Lanczos, g = 7, 9 terms), with the
/// reflection formula below 0.5. Relative accuracy is ~1e-13 in f64.
pub fn ln_gamma<T: Scalar>(z: T) -> T {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let half = c::<T>(0.5);
    if z < half {
        // ln Γ(z) = ln(π / sin(πz)) − ln Γ(1 − z)
        let pi = c::<T>(core::f64::consts::PI);
        return (pi / (pi * z).sin()).ln() - ln_gamma(T::one() - z);
    }
    let z = z - T::one();
    let g = c::<T>(7.0);
    let mut x = c::<T>(COEF[0]);
    for (i, &coef) in COEF.iter().enumerate().skip(1) {
        x = x + c::<T>(coef) / (z + from_count(i as u64));
    }
    let t = z + g + half;
    let sqrt_two_pi = c::<T>(2.506_628_274_631_000_5);
    (z + half) * t.ln() - t + (sqrt_two_pi * x).ln()
}

/// Regularized upper incomplete gamma Q(a, x) = Γ(a, x)/Γ(a), via the power
/// series for x < a + 1 and a modified Lentz continued fraction otherwise.
pub fn gamma_q<T: Scalar>(a: T, x: T) -> T {
    assert!(a > T::zero() && x >= T::zero(), "gamma_q domain");
    if x == T::zero() {
        return T::one();
    }
    let ln_front = a * x.ln() - x - ln_gamma(a);
    let eps = T::epsilon() * c::<T>(2.0);
    if x < a + T::one() {
        // series for P(a, x); Q = 1 − P
        let mut term = T::one() / a;
        let mut sum = term;
        let mut denom = a;
        for _ in 0..500 {
            denom = denom + T::one();
            term = term * x / denom;
            sum = sum + term;
            if term.abs() < sum.abs() * eps {
                break;
            }
        }
        T::one() - sum * ln_front.exp()
    } else {
        let tiny = c::<T>(1e-300);
        let mut b = x + T::one() - a;
        let mut cc = T::one() / tiny;
        let mut d = T::one() / b;
        let mut h = d;
        for i in 1..500 {
            let an = -from_count::<T>(i) * (from_count::<T>(i) - a);
            b = b + c::<T>(2.0);
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            cc = b + an / cc;
            if cc.abs() < tiny {
                cc = tiny;
            }
            d = T::one() / d;
            let del = d * cc;
            h = h * del;
            if (del - T::one()).abs() < eps {
                break;
            }
        }
        ln_front.exp() * h
    }
}

/// Complementary error function, via Q(1/2, x²).
pub fn erfc<T: Scalar>(x: T) -> T {
    if x < T::zero() {
        c::<T>(2.0) - erfc(-x)
    } else {
        gamma_q(c::<T>(0.5), x * x)
    }
}

/// Standard normal CDF.
pub fn normal_cdf<T: Scalar>(x: T) -> T {
    let sqrt2 = c::<T>(core::f64::consts::SQRT_2);
    c::<T>(0.5) * erfc(-x / sqrt2)
}

/// Standard normal quantile. Acklam's rational initial estimate polished
/// with one Halley step against [`normal_cdf`], good to ~1e-15 in f64.
pub fn normal_quantile<T: Scalar>(p: T) -> Result<T, StatsError> {
    if !(p > T::zero() && p < T::one()) {
        return Err(StatsError::BadConfidence);
    }
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    let p_low = c::<T>(0.02425);
    let one = T::one();
    let half = c::<T>(0.5);
    let tail = |q: T| {
        // q = sqrt(-2 ln(tail mass)); valid for either tail
        (((((c::<T>(C[0]) * q + c::<T>(C[1])) * q + c::<T>(C[2])) * q + c::<T>(C[3])) * q
            + c::<T>(C[4]))
            * q
            + c::<T>(C[5]))
            / ((((c::<T>(D[0]) * q + c::<T>(D[1])) * q + c::<T>(D[2])) * q + c::<T>(D[3])) * q
                + one)
    };
    let mut x = if p < p_low {
        let q = (-c::<T>(2.0) * p.ln()).sqrt();
        tail(q)
    } else if p <= one - p_low {
        let q = p - half;
        let r = q * q;
        (((((c::<T>(A[0]) * r + c::<T>(A[1])) * r + c::<T>(A[2])) * r + c::<T>(A[3])) * r
            + c::<T>(A[4]))
            * r
            + c::<T>(A[5]))
            * q
            / (((((c::<T>(B[0]) * r + c::<T>(B[1])) * r + c::<T>(B[2])) * r + c::<T>(B[3])) * r
                + c::<T>(B[4]))
                * r
                + one)
    } else {
        let q = (-c::<T>(2.0) * (one - p).ln()).sqrt();
        -tail(q)
    };
    // Halley refinement
    let e = normal_cdf(x) - p;
    let sqrt_two_pi = c::<T>(2.506_628_274_631_000_5);
    let u = e * sqrt_two_pi * (x * x * half).exp();
    x = x - u / (one + x * u * half);
    Ok(x)
}

fn check_sample(k: u64, n: u64) -> Result<(), StatsError> {
    if n == 0 {
        return Err(StatsError::EmptySample);
    }
    if k > n {
        return Err(StatsError::CountExceedsSize { k, n });
    }
    Ok(())
}

/// Wilson score interval for a binomial proportion. The k = 0 and k = n
/// boundaries return exactly 0 and 1 rather than the rounded closed form.
pub fn wilson_interval<T: Scalar>(k: u64, n: u64, confidence: T) -> Result<(T, T), StatsError> {
    check_sample(k, n)?;
    if !(confidence > T::zero() && confidence < T::one()) {
        return Err(StatsError::BadConfidence);
    }
    let one = T::one();
    let two = c::<T>(2.0);
    let z = normal_quantile((one + confidence) / two)?;
    let nf = from_count::<T>(n);
    let p = from_count::<T>(k) / nf;
    let z2 = z * z;
    let denom = one + z2 / nf;
    let center = p + z2 / (two * nf);
    let half_width = z * (p * (one - p) / nf + z2 / (c::<T>(4.0) * nf * nf)).sqrt();
    let lo = if k == 0 {
        T::zero()
    } else {
        ((center - half_width) / denom).max(T::zero())
    };
    let hi = if k == n {
        one
    } else {
        ((center + half_width) / denom).min(one)
    };
    Ok((lo, hi))
}

/// Newcombe hybrid score interval for the difference of proportions
/// d = k1/n1 − k2/n2, built from the per-proportion Wilson bounds.
pub fn newcombe_interval<T: Scalar>(
    k1: u64,
    n1: u64,
    k2: u64,
    n2: u64,
    confidence: T,
) -> Result<(T, T), StatsError> {
    let (l1, u1) = wilson_interval(k1, n1, confidence)?;
    let (l2, u2) = wilson_interval(k2, n2, confidence)?;
    let p1 = from_count::<T>(k1) / from_count::<T>(n1);
    let p2 = from_count::<T>(k2) / from_count::<T>(n2);
    let d = p1 - p2;
    let lo = d - ((p1 - l1) * (p1 - l1) + (u2 - p2) * (u2 - p2)).sqrt();
    let hi = d + ((u1 - p1) * (u1 - p1) + (p2 - l2) * (p2 - l2)).sqrt();
    Ok((lo, hi))
}

/// Which test produced a two-proportion p-value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    ChiSquare1Df,
    FisherExact,
}

impl core::fmt::Display for TestKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TestKind::ChiSquare1Df => write!(f, "chi_square_1df"),
            TestKind::FisherExact => write!(f, "fisher_exact"),
        }
    }
}

/// Result of [`two_proportion_test`]. `statistic` is the chi-square value
/// when that branch ran and None for the exact test, which has no statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoProportionTest<T> {
    pub statistic: Option<T>,
    pub p_value: T,
    pub test: TestKind,
}

/// Pearson chi-square statistic (1 df, no continuity correction) and its
/// upper-tail p-value for the 2×2 table (k1, n1−k1 / k2, n2−k2).
/// Degenerate margins (all hits or no hits) give statistic 0, p = 1.
pub fn chi_square_1df<T: Scalar>(k1: u64, n1: u64, k2: u64, n2: u64) -> Result<(T, T), StatsError> {
    check_sample(k1, n1)?;
    check_sample(k2, n2)?;
    let (a, b, cc, d) = (k1, n1 - k1, k2, n2 - k2);
    let col1 = a + cc;
    let col2 = b + d;
    if col1 == 0 || col2 == 0 {
        return Ok((T::zero(), T::one()));
    }
    let total = from_count::<T>(n1 + n2);
    let diff = from_count::<T>(a) * from_count::<T>(d) - from_count::<T>(b) * from_count::<T>(cc);
    let denom = from_count::<T>(n1)
        * from_count::<T>(n2)
        * from_count::<T>(col1)
        * from_count::<T>(col2);
    let stat = total * diff * diff / denom;
    let p = gamma_q(c::<T>(0.5), stat / c::<T>(2.0));
    Ok((stat, p.min(T::one()).max(T::zero())))
}

/// Two-sided Fisher exact p-value under the "sum all tables at most as
/// probable as the observed one" convention, computed in log space. The
/// ≤ comparison carries a 1e-7 relative tolerance so ties between
/// symmetric tables are not lost to rounding.
pub fn fisher_exact_p<T: Scalar>(k1: u64, n1: u64, k2: u64, n2: u64) -> Result<T, StatsError> {
    check_sample(k1, n1)?;
    check_sample(k2, n2)?;
    let col1 = k1 + k2;
    let total = n1 + n2;
    let lo = col1.saturating_sub(n2);
    let hi = col1.min(n1);
    let ln_pmf = |k: u64| -> T {
        ln_choose::<T>(n1, k) + ln_choose::<T>(n2, col1 - k) - ln_choose::<T>(total, col1)
    };
    let ln_obs = ln_pmf(k1);
    let tol = c::<T>(1e-7_f64.ln_1p());
    let mut p = T::zero();
    for k in lo..=hi {
        let ln_pk = ln_pmf(k);
        if ln_pk <= ln_obs + tol {
            p = p + ln_pk.exp();
        }
    }
    Ok(p.min(T::one()))
}

fn ln_choose<T: Scalar>(n: u64, k: u64) -> T {
    debug_assert!(k <= n);
    ln_gamma(from_count::<T>(n + 1))
        - ln_gamma(from_count::<T>(k + 1))
        - ln_gamma(from_count::<T>(n - k + 1))
}

/// Two-proportion test: Pearson chi-square (1 df, no continuity correction)
/// when every expected cell of the 2×2 table is at least 5, otherwise the
/// two-sided Fisher exact test.
pub fn two_proportion_test<T: Scalar>(
    k1: u64,
    n1: u64,
    k2: u64,
    n2: u64,
) -> Result<TwoProportionTest<T>, StatsError> {
    check_sample(k1, n1)?;
    check_sample(k2, n2)?;
    if expected_cells_at_least(k1, n1, k2, n2, 5.0) {
        let (stat, p) = chi_square_1df(k1, n1, k2, n2)?;
        Ok(TwoProportionTest {
            statistic: Some(stat),
            p_value: p,
            test: TestKind::ChiSquare1Df,
        })
    } else {
        Ok(TwoProportionTest {
            statistic: None,
            p_value: fisher_exact_p(k1, n1, k2, n2)?,
            test: TestKind::FisherExact,
        })
    }
}

/// True when every expected cell count of the 2×2 table reaches `floor`.
pub fn expected_cells_at_least(k1: u64, n1: u64, k2: u64, n2: u64, floor: f64) -> bool {
    let total = (n1 + n2) as f64;
    let rows = [n1 as f64, n2 as f64];
    let cols = [(k1 + k2) as f64, (n1 - k1 + n2 - k2) as f64];
    rows.iter()
        .all(|r| cols.iter().all(|col| r * col / total >= floor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ln_gamma_matches_factorials() {
        let mut ln_fact = 0.0_f64;
        for n in 1..=60u64 {
            ln_fact += (n as f64).ln();
            assert_abs_diff_eq!(ln_gamma((n + 1) as f64), ln_fact, epsilon = 1e-10);
        }
        assert_abs_diff_eq!(
            ln_gamma(0.5_f64),
            core::f64::consts::PI.sqrt().ln(),
            epsilon = 1e-13
        );
    }

    #[test]
    fn normal_quantile_reference_points() {
        assert_abs_diff_eq!(
            normal_quantile(0.95_f64).unwrap(),
            1.6448536269514722,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            normal_quantile(0.975_f64).unwrap(),
            1.959963984540054,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            normal_quantile(0.995_f64).unwrap(),
            2.5758293035489004,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(normal_quantile(0.5_f64).unwrap(), 0.0, epsilon = 1e-15);
        let x = normal_quantile(0.123_f64).unwrap();
        assert_abs_diff_eq!(normal_cdf(x), 0.123, epsilon = 1e-13);
    }

    #[test]
    fn wilson_reference_values() {
        let (lo, hi) = wilson_interval::<f64>(5, 10, 0.95).unwrap();
        assert_abs_diff_eq!(lo, 0.236593090512564, epsilon = 1e-9);
        assert_abs_diff_eq!(hi, 0.763406909487436, epsilon = 1e-9);
        let (lo, hi) = wilson_interval::<f64>(1, 33, 0.95).unwrap();
        assert_abs_diff_eq!(lo, 0.0053694105368718315, epsilon = 1e-9);
        assert_abs_diff_eq!(hi, 0.1531872538211892, epsilon = 1e-9);
        let (lo, hi) = wilson_interval::<f64>(17, 20, 0.95).unwrap();
        assert_abs_diff_eq!(lo, 0.639581135259243, epsilon = 1e-9);
        assert_abs_diff_eq!(hi, 0.9476312541037835, epsilon = 1e-9);
        let (lo, hi) = wilson_interval::<f64>(123, 4567, 0.95).unwrap();
        assert_abs_diff_eq!(lo, 0.022620022313028024, epsilon = 1e-9);
        assert_abs_diff_eq!(hi, 0.03203981681540124, epsilon = 1e-9);
    }

    #[test]
    fn wilson_boundaries_are_exact() {
        let (lo, hi) = wilson_interval::<f64>(0, 10, 0.95).unwrap();
        assert_eq!(lo, 0.0);
        assert_abs_diff_eq!(hi, 0.2775327998628892, epsilon = 1e-9);
        let (lo, hi) = wilson_interval::<f64>(10, 10, 0.95).unwrap();
        assert_abs_diff_eq!(lo, 0.7224672001371106, epsilon = 1e-9);
        assert_eq!(hi, 1.0);
    }

    #[test]
    fn newcombe_reference_values() {
        let cases: [(u64, u64, u64, u64, f64, f64); 4] = [
            (10, 100, 20, 100, -0.19947387007806955, -0.00014902511855761913),
            (5, 10, 1, 12, 0.03907078383791357, 0.688826729327743),
            (0, 50, 3, 50, -0.1621709168883817, 0.021496383126533),
            (123, 4567, 88, 3210, -0.008065758460398243, 0.006741892911484156),
        ];
        for (k1, n1, k2, n2, lo_exp, hi_exp) in cases {
            let (lo, hi) = newcombe_interval::<f64>(k1, n1, k2, n2, 0.95).unwrap();
            assert_abs_diff_eq!(lo, lo_exp, epsilon = 1e-9);
            assert_abs_diff_eq!(hi, hi_exp, epsilon = 1e-9);
        }
    }

    #[test]
    fn newcombe_identical_samples_symmetric() {
        let (lo, hi) = newcombe_interval::<f64>(5, 10, 5, 10, 0.95).unwrap();
        assert_eq!(lo, -hi);
        assert!(lo < 0.0 && hi > 0.0);
    }

    #[test]
    fn chi_square_reference_values() {
        let (stat, p) = chi_square_1df::<f64>(10, 100, 20, 100).unwrap();
        assert_abs_diff_eq!(stat, 3.9215686274509807, epsilon = 1e-10);
        assert_abs_diff_eq!(p, 0.04767038065616147, epsilon = 1e-10);
        let (stat, p) = chi_square_1df::<f64>(40, 100, 20, 100).unwrap();
        assert_abs_diff_eq!(stat, 9.523809523809524, epsilon = 1e-10);
        assert_abs_diff_eq!(p, 0.0020282311484520824, epsilon = 1e-10);
        let (stat, p) = chi_square_1df::<f64>(50, 1000, 50, 1000).unwrap();
        assert_eq!(stat, 0.0);
        assert_eq!(p, 1.0);
    }

    #[test]
    fn fisher_reference_values() {
        let cases: [(u64, u64, u64, u64, f64); 4] = [
            (0, 5, 5, 5, 0.007936507936507938),
            (3, 10, 9, 10, 0.019766611097880443),
            (25, 100, 25, 100, 1.0),
            (12, 500, 3, 500, 0.03383001196539725),
        ];
        for (k1, n1, k2, n2, expected) in cases {
            let p: f64 = fisher_exact_p(k1, n1, k2, n2).unwrap();
            assert_abs_diff_eq!(p, expected, epsilon = 1e-9);
        }
    }

    #[test]
    fn branch_selection_follows_expected_cells() {
        let t: TwoProportionTest<f64> = two_proportion_test(10, 100, 20, 100).unwrap();
        assert_eq!(t.test, TestKind::ChiSquare1Df);
        assert!(t.statistic.is_some());
        let t: TwoProportionTest<f64> = two_proportion_test(0, 5, 5, 5).unwrap();
        assert_eq!(t.test, TestKind::FisherExact);
        assert_eq!(t.statistic, None);
        assert_abs_diff_eq!(t.p_value, 2.0 / 252.0, epsilon = 1e-9);
    }

    #[test]
    fn argument_errors() {
        assert_eq!(
            two_proportion_test::<f64>(0, 0, 1, 2).unwrap_err(),
            StatsError::EmptySample
        );
        assert_eq!(
            two_proportion_test::<f64>(3, 2, 1, 2).unwrap_err(),
            StatsError::CountExceedsSize { k: 3, n: 2 }
        );
        assert!(wilson_interval::<f64>(1, 2, 1.0).is_err());
        assert!(normal_quantile::<f64>(0.0).is_err());
    }

    #[test]
    fn works_at_f32() {
        let (lo, hi) = wilson_interval::<f32>(5, 10, 0.95).unwrap();
        assert!((lo - 0.23659).abs() < 1e-4 && (hi - 0.76341).abs() < 1e-4);
        let t: TwoProportionTest<f32> = two_proportion_test(10, 100, 20, 100).unwrap();
        assert!((t.p_value - 0.047_670).abs() < 1e-4);
    }
}

//! Rank statistics shared by the cascade comparison and AUC.

use statrs::distribution::{ContinuousCDF, Normal};
use statrs::statistics::{Data, OrderStatistics, RankTieBreaker};

/// Average (mid) ranks of `values`, 1-based.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut data = Data::new(values.to_vec());
    data.ranks(RankTieBreaker::Average)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankSumTest {
    /// U statistic of the first sample.
    pub u: f64,
    /// Standard normal score of `u` (0 when the variance vanishes).
    pub z: f64,
    /// Two-sided p-value.
    pub p_value: f64,
}

/// Two-sided Mann-Whitney test, normal approximation with tie correction and
/// no continuity correction.
pub fn mann_whitney(x: &[f64], y: &[f64]) -> RankSumTest {
    let (n1, n2) = (x.len() as f64, y.len() as f64);
    let joined: Vec<f64> = x.iter().chain(y).copied().collect();
    let ranks = average_ranks(&joined);
    let r1: f64 = ranks[..x.len()].iter().sum();
    let u = r1 - n1 * (n1 + 1.0) / 2.0;

    let n = n1 + n2;
    let mut sorted = joined;
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let mean = n1 * n2 / 2.0;
    let var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if !(var > 0.0) {
        return RankSumTest { u, z: 0.0, p_value: 1.0 };
    }
    let z = (u - mean) / var.sqrt();
    let normal = Normal::standard();
    let p = (2.0 * normal.cdf(-z.abs())).min(1.0);
    RankSumTest { u, z, p_value: p }
}

/// Area under the ROC curve of `scores` against binary `positive` flags,
/// via the rank-sum identity. `None` when either class is absent.
pub fn auc(scores: &[f64], positive: &[bool]) -> Option<f64> {
    let pos: Vec<f64> = scores.iter().zip(positive).filter(|(_, &p)| p).map(|(s, _)| *s).collect();
    let neg: Vec<f64> = scores.iter().zip(positive).filter(|(_, &p)| !p).map(|(s, _)| *s).collect();
    if pos.is_empty() || neg.is_empty() {
        return None;
    }
    let t = mann_whitney(&pos, &neg);
    Some(t.u / (pos.len() * neg.len()) as f64)
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ranks_with_ties() {
        assert_eq!(average_ranks(&[1.0, 2.0, 2.0, 4.0]), vec![1.0, 2.5, 2.5, 4.0]);
    }

    #[test]
    fn separated_samples() {
        let t = mann_whitney(&[10.0, 11.0, 12.0], &[1.0, 2.0, 3.0]);
        assert_eq!(t.u, 9.0);
        // z = (9 - 4.5) / sqrt(9 * 7 / 12)
        let z = 4.5 / (63.0f64 / 12.0).sqrt();
        assert!((t.z - z).abs() < 1e-12);
        assert!((t.p_value - 0.0495346).abs() < 1e-6);
    }

    #[test]
    fn matches_scipy_reference() {
        // scipy.stats.mannwhitneyu(x, y, use_continuity=False, method="asymptotic")
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y = [6.0, 7.0, 8.0, 9.0, 10.0];
        let t = mann_whitney(&x, &y);
        assert_eq!(t.u, 0.0);
        assert!((t.p_value - 0.0090234).abs() < 1e-6, "{}", t.p_value);
        // ties
        let t = mann_whitney(&[1.0, 2.0, 2.0, 3.0], &[2.0, 3.0, 3.0, 4.0]);
        assert_eq!(t.u, 3.0);
        assert!((t.p_value - 0.1291550).abs() < 1e-6, "{}", t.p_value);
    }

    #[test]
    fn constant_samples_have_unit_p() {
        let t = mann_whitney(&[1.0; 4], &[1.0; 3]);
        assert_eq!(t.p_value, 1.0);
    }

    #[test]
    fn auc_reference() {
        assert_eq!(auc(&[0.9, 0.8, 0.1], &[true, true, false]), Some(1.0));
        assert_eq!(auc(&[0.5, 0.5], &[true, false]), Some(0.5));
        assert_eq!(auc(&[0.1, 0.4, 0.35, 0.8], &[false, false, true, true]), Some(0.75));
        assert_eq!(auc(&[0.1], &[true]), None);
    }

    proptest! {
        #[test]
        fn swapping_groups_preserves_p(
            x in prop::collection::vec(0u8..20, 1..15),
            y in prop::collection::vec(0u8..20, 1..15),
        ) {
            let x: Vec<f64> = x.into_iter().map(f64::from).collect();
            let y: Vec<f64> = y.into_iter().map(f64::from).collect();
            let a = mann_whitney(&x, &y);
            let b = mann_whitney(&y, &x);
            prop_assert!((a.p_value - b.p_value).abs() < 1e-12);
            prop_assert!((a.z + b.z).abs() < 1e-9);
            prop_assert!((a.u + b.u - (x.len() * y.len()) as f64).abs() < 1e-9);
        }
    }
}

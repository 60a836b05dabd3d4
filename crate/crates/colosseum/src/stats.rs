//! Interval estimates and goodness-of-fit helpers.

use num_traits::Float;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn c<T: Float>(x: f64) -> T {
    T::from(x).expect("representable constant")
}

/// Wilson score interval for `successes / trials` at normal quantile `z`.
pub fn wilson_interval<T: Float>(successes: u64, trials: u64, z: T) -> (T, T) {
    if trials == 0 {
        return (T::zero(), T::one());
    }
    let n = c::<T>(trials as f64);
    let phat = c::<T>(successes as f64) / n;
    let z2 = z * z;
    let denom = T::one() + z2 / n;
    let centre = (phat + z2 / (c::<T>(2.0) * n)) / denom;
    let half = z * ((phat * (T::one() - phat) / n + z2 / (c::<T>(4.0) * n * n)).sqrt()) / denom;
    ((centre - half).max(T::zero()), (centre + half).min(T::one()))
}

/// 95% Wilson interval.
pub fn wilson95<T: Float>(successes: u64, trials: u64) -> (T, T) {
    wilson_interval(successes, trials, c::<T>(1.959_963_984_540_054))
}

/// Standard deviation of a binomial proportion estimate.
pub fn binomial_sigma<T: Float>(p: T, trials: u64) -> T {
    (p * (T::one() - p) / c::<T>(trials as f64)).sqrt()
}

/// Pearson chi-square statistic of observed counts against expected
/// probabilities; returns `(statistic, p_value)`.
pub fn chi_square(observed: &[u64], expected_probs: &[f64]) -> (f64, f64) {
    let total: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&o, &p) in observed.iter().zip(expected_probs) {
        if p <= 0.0 {
            continue;
        }
        let e = p * total as f64;
        stat += (o as f64 - e).powi(2) / e;
        cells += 1;
    }
    let dof = (cells.max(2) - 1) as f64;
    let dist = ChiSquared::new(dof).expect("positive degrees of freedom");
    (stat, 1.0 - dist.cdf(stat))
}

/// Total-variation distance between two probability vectors.
pub fn tv_distance<T: Float>(a: &[T], b: &[T]) -> T {
    let s = a
        .iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + (*x - *y).abs());
    s / c::<T>(2.0)
}

/// Normalizes counts to frequencies.
pub fn frequencies<T: Float>(counts: &[u64]) -> Vec<T> {
    let total: u64 = counts.iter().sum();
    counts
        .iter()
        .map(|&k| c::<T>(k as f64) / c::<T>(total.max(1) as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_contains_estimate() {
        let (lo, hi) = wilson95::<f64>(50, 100);
        assert!(lo < 0.5 && hi > 0.5);
        let (lo, hi) = wilson95::<f64>(100, 100);
        assert!(lo > 0.96 && hi == 1.0);
    }

    #[test]
    fn chi_square_accepts_exact_fit() {
        let (stat, pv) = chi_square(&[250, 250, 250, 250], &[0.25; 4]);
        assert_eq!(stat, 0.0);
        assert!(pv > 0.99);
    }

    #[test]
    fn tv_of_identical_is_zero() {
        assert_eq!(tv_distance(&[0.5f32, 0.5], &[0.5, 0.5]), 0.0);
    }
}

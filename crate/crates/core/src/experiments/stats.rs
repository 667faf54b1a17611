//! Summary statistics for Monte Carlo samples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kolmogorov-Smirnov distance `sup |F_hat - F|` of a sample to a CDF.
/// At every distinct sample point both the left and the right limit of
/// the empirical CDF are compared, so ties are handled exactly.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Empty);
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let m = xs.len() as f64;
    let mut best: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let mut j = i;
        while j < xs.len() && xs[j] == xs[i] {
            j += 1;
        }
        let f = cdf(xs[i]);
        best = best.max((f - i as f64 / m).abs()).max((j as f64 / m - f).abs());
        i = j;
    }
    Ok(best)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (0 for fewer than two points).
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let mu = mean(xs);
    xs.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Standard error of the mean.
pub fn sem(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Pearson correlation; NaN when either sample is constant.
pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    let (mx, my) = (mean(xs), mean(ys));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for a binomial proportion at normal quantile `z`.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<usize>,
    pub below: usize,
    pub above: usize,
}

impl Histogram {
    pub fn new(xs: &[f64], lo: f64, hi: f64, bins: usize) -> Self {
        let mut counts = vec![0; bins];
        let (mut below, mut above) = (0, 0);
        let width = (hi - lo) / bins as f64;
        for &x in xs {
            if x < lo {
                below += 1;
            } else if x >= hi {
                above += 1;
            } else {
                let k = (((x - lo) / width) as usize).min(bins - 1);
                counts[k] += 1;
            }
        }
        Self {
            lo,
            hi,
            counts,
            below,
            above,
        }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum::<usize>() + self.below + self.above
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    #[test]
    fn ks_single_point() {
        let d = ks_distance(&[0.5], |x| x.clamp(0.0, 1.0)).unwrap();
        assert!((d - 0.5).abs() < 1e-15);
        assert!(matches!(ks_distance(&[], |x| x), Err(Error::Empty)));
    }

    #[test]
    fn ks_with_ties() {
        // three copies of 0.5: the empirical CDF jumps 0 -> 1 there
        let d = ks_distance(&[0.5, 0.5, 0.5], |x| x.clamp(0.0, 1.0)).unwrap();
        assert!((d - 0.5).abs() < 1e-15);
        // 0.2, 0.2, 0.9 against uniform: jumps to 2/3 at 0.2 (gap 0.4667)
        let d = ks_distance(&[0.9, 0.2, 0.2], |x| x.clamp(0.0, 1.0)).unwrap();
        assert!((d - (2.0 / 3.0 - 0.2)).abs() < 1e-15);
    }

    #[test]
    fn ks_of_own_distribution_is_small() {
        let mut rng = crate::sampler::rng_from_seed(3);
        let xs: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
        let d = ks_distance(&xs, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(d <= 1.63 / 100.0, "{d}");
    }

    #[test]
    fn moments() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&xs), 2.5);
        assert!((variance(&xs) - 5.0 / 3.0).abs() < 1e-15);
        assert!((correlation(&xs, &[2.0, 4.0, 6.0, 8.0]) - 1.0).abs() < 1e-15);
        assert!((correlation(&xs, &[-1.0, -2.0, -3.0, -4.0]) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn wilson_brackets_the_proportion() {
        let (lo, hi) = wilson_interval(276, 400, Z95);
        assert!(lo < 0.69 && 0.69 < hi);
        // statsmodels proportion_confint(276, 400, method="wilson")
        assert!((lo - 0.643_049_046_352_087).abs() < 1e-9, "{lo}");
        assert!((hi - 0.733_336_281_800_880_2).abs() < 1e-9, "{hi}");
        assert_eq!(wilson_interval(0, 0, 1.96), (0.0, 1.0));
        let (lo, _) = wilson_interval(0, 10, 1.96);
        assert_eq!(lo, 0.0);
    }

    #[test]
    fn histogram_counts_everything() {
        let h = Histogram::new(&[-5.0, 0.0, 0.1, 0.99, 1.0, 7.0], 0.0, 1.0, 10);
        assert_eq!(h.below, 1);
        assert_eq!(h.above, 2);
        assert_eq!(h.counts[0], 1);
        assert_eq!(h.counts[1], 1);
        assert_eq!(h.counts[9], 1);
        assert_eq!(h.total(), 6);
    }
}

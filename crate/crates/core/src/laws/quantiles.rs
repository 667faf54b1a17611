//! Kesten-McKay tail mass and classical eigenvalue locations.
//!
//! With `x = 2 cos(theta)` the tail mass becomes
//! `int_0^theta 4 sin^2(s) / (2 pi (1 + 1/(d-1) - 4 cos^2(s)/d)) ds`,
//! a smooth integrand that the 64-node Gauss-Legendre rule integrates to
//! machine precision.

use super::quadrature::integrate;
use crate::error::{Error, Result};

fn theta_density(d: usize, theta: f64) -> f64 {
    let df = d as f64;
    let (s, c) = theta.sin_cos();
    4.0 * s * s / (2.0 * std::f64::consts::PI * (1.0 + 1.0 / (df - 1.0) - 4.0 * c * c / df))
}

fn tail_mass_theta(d: usize, theta: f64) -> f64 {
    integrate(|s| theta_density(d, s), 0.0, theta)
}

/// `int_x^2 rho_d(y) dy`.
pub fn km_tail_mass(d: usize, x: f64) -> f64 {
    if x >= 2.0 {
        return 0.0;
    }
    if x <= -2.0 {
        return 1.0;
    }
    tail_mass_theta(d, (x / 2.0).acos())
}

const CACHE_POINTS: usize = 512;

/// Solves `tail_mass(theta) = p` with a bracket from a cached 512-point
/// table, then safeguarded Newton steps (falling back to bisection).
struct TailInverter {
    d: usize,
    thetas: Vec<f64>,
    masses: Vec<f64>,
}

impl TailInverter {
    fn new(d: usize) -> Self {
        let thetas: Vec<f64> = (0..=CACHE_POINTS)
            .map(|k| std::f64::consts::PI * k as f64 / CACHE_POINTS as f64)
            .collect();
        let mut masses = Vec::with_capacity(thetas.len());
        let mut acc = 0.0;
        masses.push(0.0);
        for w in thetas.windows(2) {
            acc += integrate(|s| theta_density(d, s), w[0], w[1]);
            masses.push(acc);
        }
        Self { d, thetas, masses }
    }

    fn solve(&self, p: f64) -> Result<f64> {
        let k = self.masses.partition_point(|&m| m < p).clamp(1, CACHE_POINTS);
        let (mut lo, mut hi) = (self.thetas[k - 1], self.thetas[k]);
        let (start, base) = (self.thetas[k - 1], self.masses[k - 1]);
        let f = |t: f64| base + integrate(|s| theta_density(self.d, s), start, t) - p;
        let mut theta = 0.5 * (lo + hi);
        for _ in 0..200 {
            let r = f(theta);
            if r.abs() <= 1e-14 {
                return Ok(theta);
            }
            if r > 0.0 {
                hi = theta;
            } else {
                lo = theta;
            }
            let slope = theta_density(self.d, theta);
            let newton = theta - r / slope;
            theta = if slope > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo < 1e-15 {
                return Ok(theta);
            }
        }
        Err(Error::NoConvergence(format!("quantile p = {p}")))
    }
}

/// Classical locations for the `n - 1` nontrivial eigenvalues, returned in
/// decreasing order as `[gamma_2, ..., gamma_N]`. `gamma_i` is the point
/// whose upper tail mass is `(i - 3/2) / (N - 1)`, the midpoint quantile of
/// the `(i-1)`-th largest of `N - 1` points.
pub fn classical_locations(d: usize, n: usize) -> Result<Vec<f64>> {
    if n < 3 || d < 3 {
        return Err(Error::BadParams(format!(
            "classical locations need n >= 3 and d >= 3 (n={n}, d={d})"
        )));
    }
    let inv = TailInverter::new(d);
    let m = (n - 1) as f64;
    (2..=n)
        .map(|i| {
            let p = (i as f64 - 1.5) / m;
            inv.solve(p).map(|theta| 2.0 * theta.cos())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws::km_density;

    #[test]
    fn density_integrates_to_one() {
        for d in [3, 4, 10] {
            assert!((km_tail_mass(d, -2.0 + 1e-300) - 1.0).abs() < 1e-12);
            assert!((tail_mass_theta(d, std::f64::consts::PI) - 1.0).abs() < 1e-10);
            assert!((km_tail_mass(d, 0.0) - 0.5).abs() < 1e-12);
        }
    }

    /// Independent route: composite Simpson in x on the raw density,
    /// after splitting off the square-root endpoint.
    fn simpson_tail(d: usize, x: f64) -> f64 {
        let m = 200_000;
        let h = (2.0 - x) / m as f64;
        let mut s = km_density(d, x) + km_density(d, 2.0);
        for k in 1..m {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            s += w * km_density(d, x + k as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn tail_mass_matches_simpson() {
        for d in [3, 7] {
            for x in [-1.5, 0.3, 1.9] {
                assert!((km_tail_mass(d, x) - simpson_tail(d, x)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn locations_invert_the_tail_mass() {
        for (d, n) in [(3, 100), (4, 51), (10, 400)] {
            let g = classical_locations(d, n).unwrap();
            assert_eq!(g.len(), n - 1);
            for (k, gamma) in g.iter().enumerate() {
                let i = k + 2;
                let p = (i as f64 - 1.5) / (n - 1) as f64;
                assert!((km_tail_mass(d, *gamma) - p).abs() <= 1e-12);
            }
            assert!(g.windows(2).all(|w| w[0] > w[1]));
            // gamma_i + gamma_{N+2-i} = 0
            for i in 2..=n {
                let j = n + 2 - i;
                assert!((g[i - 2] + g[j - 2]).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn middle_location_is_zero_for_even_n() {
        let n = 100;
        let g = classical_locations(3, n).unwrap();
        // i = N/2 + 1 sits at tail mass exactly 1/2
        assert!(g[n / 2 + 1 - 2].abs() < 1e-12);
    }

    #[test]
    fn top_locations_near_edge_expansion() {
        // upper tail mass ~ (2A/(3 pi)) (2 - x)^{3/2} near the edge
        let (d, n) = (3, 100);
        let a = crate::laws::edge_constant(d);
        let g = classical_locations(d, n).unwrap();
        for (k, p) in [(0, 0.5 / 99.0), (1, 1.5 / 99.0)] {
            let approx = 2.0 - (3.0 * std::f64::consts::PI * p / (2.0 * a)).powf(2.0 / 3.0);
            assert!((g[k] - approx).abs() < 1.5e-2, "{} vs {approx}", g[k]);
        }
    }

    #[test]
    fn top_locations_pinned() {
        // 30-digit adaptive quadrature of the density plus a secant root
        // solve, done offline
        let g = classical_locations(3, 100).unwrap();
        assert!((g[0] - 1.972_828_030_593_846_8).abs() < 1e-12, "{}", g[0]);
        assert!((g[1] - 1.938_387_892_746_503).abs() < 1e-12, "{}", g[1]);
    }
}

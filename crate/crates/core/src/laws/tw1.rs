//! Tracy-Widom (beta = 1) distribution function.
//!
//! `F1` is tabulated on `[-10, 6]` with step `0.02` in the embedded asset
//! `tw1_v1.csv` and interpolated with a monotone (Fritsch-Carlson) cubic.
//! Outside the grid the standard tail asymptotics are used, with their
//! constants matched to the table endpoints:
//!
//! * `ln F1(s) = -|s|^3/24 - |s|^{3/2}/(3 sqrt 2) - ln|s| / 16 + c` as `s -> -inf`,
//! * `1 - F1(s) = C exp(-2 s^{3/2} / 3) s^{-3/2}` as `s -> +inf`.

use std::sync::OnceLock;

use crate::error::{Error, Result};

const ASSET: &str = include_str!("../../assets/tw1_v1.csv");

#[derive(Clone, Debug)]
pub struct Tw1Table {
    pub grid: Vec<f64>,
    pub cdf: Vec<f64>,
    slopes: Vec<f64>,
    left_c: f64,
    right_c: f64,
}

fn left_exponent(s: f64) -> f64 {
    let a = s.abs();
    -a.powi(3) / 24.0 - a.powf(1.5) / (3.0 * 2f64.sqrt()) - a.ln() / 16.0
}

fn right_shape(s: f64) -> f64 {
    (-2.0 / 3.0 * s.powf(1.5)).exp() * s.powf(-0.75)
}

impl Tw1Table {
    /// Parses `s,F1` rows; lines starting with `#` and the header are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut grid = Vec::new();
        let mut cdf = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with('s') {
                continue;
            }
            let bad = || Error::Parse(format!("tw1 table line {}: {line:?}", lineno + 1));
            let (a, b) = line.split_once(',').ok_or_else(bad)?;
            grid.push(a.trim().parse::<f64>().map_err(|_| bad())?);
            cdf.push(b.trim().parse::<f64>().map_err(|_| bad())?);
        }
        Self::from_values(grid, cdf)
    }

    pub fn from_values(grid: Vec<f64>, cdf: Vec<f64>) -> Result<Self> {
        if grid.len() < 3 || grid.len() != cdf.len() {
            return Err(Error::Parse("tw1 table needs at least 3 matching rows".into()));
        }
        if !grid.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::Parse("tw1 grid must be strictly ascending".into()));
        }
        if !cdf.windows(2).all(|w| w[1] > w[0]) || cdf[0] <= 0.0 || cdf[cdf.len() - 1] >= 1.0 {
            return Err(Error::Parse("tw1 values must increase strictly inside (0, 1)".into()));
        }
        let slopes = fritsch_carlson(&grid, &cdf);
        let (s0, s1) = (grid[0], grid[grid.len() - 1]);
        let left_c = cdf[0].ln() - left_exponent(s0);
        let right_c = (1.0 - cdf[cdf.len() - 1]) / right_shape(s1);
        Ok(Self {
            grid,
            cdf,
            slopes,
            left_c,
            right_c,
        })
    }

    /// The embedded table.
    pub fn embedded() -> &'static Tw1Table {
        static TABLE: OnceLock<Tw1Table> = OnceLock::new();
        TABLE.get_or_init(|| Tw1Table::parse(ASSET).expect("embedded tw1 table is valid"))
    }

    pub fn cdf(&self, s: f64) -> f64 {
        let n = self.grid.len();
        if s.is_nan() {
            return f64::NAN;
        }
        if s < self.grid[0] {
            return (left_exponent(s) + self.left_c).exp();
        }
        if s > self.grid[n - 1] {
            return 1.0 - self.right_c * right_shape(s);
        }
        let k = self.grid.partition_point(|&g| g <= s).clamp(1, n - 1) - 1;
        let (x0, x1) = (self.grid[k], self.grid[k + 1]);
        let h = x1 - x0;
        let u = (s - x0) / h;
        let (h00, h10, h01, h11) = hermite_basis(u);
        h00 * self.cdf[k] + h10 * h * self.slopes[k] + h01 * self.cdf[k + 1] + h11 * h * self.slopes[k + 1]
    }

    /// `E[s] = int_0^inf (1 - F) - int_-inf^0 F`, by Simpson's rule on the
    /// interpolant over `[-14, 10]`; the mass beyond is below `1e-40`.
    pub fn mean(&self) -> f64 {
        let simpson = |f: &dyn Fn(f64) -> f64, a: f64, b: f64, m: usize| {
            let h = (b - a) / m as f64;
            let mut acc = f(a) + f(b);
            for k in 1..m {
                acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h);
            }
            acc * h / 3.0
        };
        let upper = simpson(&|s| 1.0 - self.cdf(s), 0.0, 10.0, 20_000);
        let lower = simpson(&|s| self.cdf(s), -14.0, 0.0, 28_000);
        upper - lower
    }
}

fn hermite_basis(u: f64) -> (f64, f64, f64, f64) {
    let u2 = u * u;
    let u3 = u2 * u;
    (
        2.0 * u3 - 3.0 * u2 + 1.0,
        u3 - 2.0 * u2 + u,
        -2.0 * u3 + 3.0 * u2,
        u3 - u2,
    )
}

fn fritsch_carlson(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / (x[k + 1] - x[k])).collect();
    let mut m = vec![0.0; n];
    m[0] = delta[0];
    m[n - 1] = delta[n - 2];
    for k in 1..n - 1 {
        m[k] = if delta[k - 1] * delta[k] <= 0.0 {
            0.0
        } else {
            0.5 * (delta[k - 1] + delta[k])
        };
    }
    for k in 0..n - 1 {
        if delta[k] == 0.0 {
            m[k] = 0.0;
            m[k + 1] = 0.0;
            continue;
        }
        let a = m[k] / delta[k];
        let b = m[k + 1] / delta[k];
        let r = a * a + b * b;
        if r > 9.0 {
            let tau = 3.0 / r.sqrt();
            m[k] = tau * a * delta[k];
            m[k + 1] = tau * b * delta[k];
        }
    }
    m
}

/// `F1(s)` from the embedded table.
pub fn tw1_cdf(s: f64) -> f64 {
    Tw1Table::embedded().cdf(s)
}

pub fn tw1_mean() -> f64 {
    Tw1Table::embedded().mean()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_shape() {
        let t = Tw1Table::embedded();
        assert_eq!(t.grid.len(), 801);
        assert_eq!(t.grid[0], -10.0);
        assert_eq!(t.grid[800], 6.0);
        assert!(t.cdf[0] < 1e-6);
        assert!(t.cdf[800] > 1.0 - 1e-5);
    }

    #[test]
    fn tail_shapes_fit_the_table() {
        // the tail models must track the table's own decay well inside it
        let t = Tw1Table::embedded();
        let at = |s: f64| t.grid.iter().position(|&g| (g - s).abs() < 1e-9).unwrap();
        let (i5, i6) = (at(5.0), at(6.0));
        let table = (1.0 - t.cdf[i5]) / (1.0 - t.cdf[i6]);
        let model = right_shape(5.0) / right_shape(6.0);
        assert!((table / model - 1.0).abs() < 0.05, "{table} vs {model}");
        let (j9, j10) = (at(-9.0), at(-10.0));
        let table = (t.cdf[j9] / t.cdf[j10]).ln();
        let model = left_exponent(-9.0) - left_exponent(-10.0);
        assert!((table / model - 1.0).abs() < 1e-3, "{table} vs {model}");
    }

    #[test]
    fn mass_below_zero() {
        let f0 = tw1_cdf(0.0);
        assert!((0.828..=0.836).contains(&f0), "{f0}");
    }

    #[test]
    fn monotone_everywhere_including_tails() {
        let mut prev = 0.0;
        for k in 0..=4000 {
            let s = -14.0 + 0.005 * k as f64;
            let f = tw1_cdf(s);
            assert!(f >= prev && (0.0..=1.0).contains(&f), "s={s}");
            prev = f;
        }
        assert!(tw1_cdf(-10.0) < 1e-6 && tw1_cdf(6.0) > 1.0 - 1e-5);
        // tails connect continuously to the table
        let t = Tw1Table::embedded();
        assert!((t.cdf(-10.0 - 1e-12) / t.cdf[0] - 1.0).abs() < 1e-9);
        assert!(((1.0 - t.cdf(6.0 + 1e-12)) / (1.0 - t.cdf[800]) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mean_value() {
        let m = tw1_mean();
        assert!((m + 1.2065).abs() < 1e-3, "{m}");
    }

    #[test]
    fn monotone_interpolation_of_a_step_like_sample() {
        let x = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let y = vec![0.01, 0.02, 0.9, 0.91, 0.99];
        let t = Tw1Table::from_values(x, y).unwrap();
        let mut prev = 0.0;
        for k in 0..=400 {
            let v = t.cdf(k as f64 * 0.01);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(Tw1Table::parse("s,F1\n0,0.1\n1,0.05\n2,0.3\n").is_err());
        assert!(Tw1Table::parse("s,F1\n0,0.1\nx,y\n").is_err());
    }
}

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};

use super::seed::rng_from_seed;
use crate::error::{Error, Result};

/// GOE projected onto symmetric matrices with vanishing row sums.
#[derive(Clone, Debug)]
pub struct ConstrainedGoeMatrix {
    pub n: usize,
    pub entries: DMatrix<f64>,
}

impl ConstrainedGoeMatrix {
    pub fn max_row_sum(&self) -> f64 {
        self.entries.row_iter().map(|r| r.sum().abs()).fold(0.0, f64::max)
    }
}

/// Exact covariance `E[Z_ij Z_kl]` of the constrained GOE.
pub fn constrained_goe_covariance(n: usize, i: usize, j: usize, k: usize, l: usize) -> f64 {
    let nf = n as f64;
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    ((delta(i, k) - 1.0 / nf) * (delta(j, l) - 1.0 / nf) + (delta(i, l) - 1.0 / nf) * (delta(j, k) - 1.0 / nf)) / nf
}

/// A GOE matrix: symmetric, off-diagonal variance `1/n`, diagonal `2/n`.
pub fn sample_goe(n: usize, seed: u64) -> Result<DMatrix<f64>> {
    if n < 1 {
        return Err(Error::BadParams("GOE needs n >= 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    let nf = n as f64;
    let off = (1.0 / nf).sqrt();
    let diag = (2.0 / nf).sqrt();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let x: f64 = StandardNormal.sample(&mut rng);
            let v = if i == j { diag * x } else { off * x };
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m)
}

/// Draws `M` from the GOE and returns `Z_ij = M_ij - g_i - g_j` with
/// `g_i = (r_i - S / 2n) / n`, `r_i` the row sums and `S` the total sum.
pub fn sample_constrained_goe(n: usize, seed: u64) -> Result<ConstrainedGoeMatrix> {
    if n < 2 {
        return Err(Error::BadParams(format!("constrained GOE needs n >= 2, got {n}")));
    }
    let nf = n as f64;
    let mut m = sample_goe(n, seed)?;
    let rows: Vec<f64> = m.row_iter().map(|r| r.sum()).collect();
    let total: f64 = rows.iter().sum();
    let g: Vec<f64> = rows.iter().map(|r| (r - total / (2.0 * nf)) / nf).collect();
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] -= g[i] + g[j];
        }
    }
    // restore exact symmetry lost to rounding in g_i + g_j vs g_j + g_i
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(ConstrainedGoeMatrix { n, entries: m })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_vanish_and_symmetric() {
        for n in [2, 5, 50] {
            let z = sample_constrained_goe(n, 9).unwrap();
            assert!(z.max_row_sum() <= 1e-12 * n as f64);
            assert_eq!(z.entries, z.entries.transpose());
        }
        assert!(sample_constrained_goe(1, 0).is_err());
    }

    #[test]
    fn covariance_formula_values() {
        assert!((constrained_goe_covariance(10, 0, 1, 0, 1) - 0.082).abs() < 1e-15);
        assert!((constrained_goe_covariance(10, 0, 1, 0, 2) + 0.008).abs() < 1e-15);
    }
}

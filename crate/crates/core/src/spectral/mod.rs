//! Normalized adjacency operators, eigensolvers, resolvents and the
//! exact identities they satisfy.

mod eigen;
mod identities;
mod lanczos;
mod resolvent;
mod woodbury;

use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::RegularGraph;

pub use identities::{row_sum_residual, schur_residual, ward_residual, IdentityResiduals};
pub use lanczos::{extreme_eigs, ExtremeEigs};
pub use resolvent::{
    green_entry, q_statistic, q_statistic_from, resolvent, resolvent_of_matrix, stieltjes, stieltjes_derivative,
    GreenEntries, ResolventSlice, SpectralResolvent,
};
pub use woodbury::{woodbury_suite, WoodburyReport};

/// Default largest `n` for dense factorizations.
pub const DEFAULT_DENSE_CAP: usize = 6000;

/// `H = A / sqrt(d - 1)`, applied matrix-free or densified on request.
#[derive(Clone, Debug)]
pub struct NormalizedAdjacency {
    graph: RegularGraph,
    scale: f64,
}

pub fn normalized_adjacency(g: &RegularGraph) -> NormalizedAdjacency {
    NormalizedAdjacency {
        graph: g.clone(),
        scale: 1.0 / ((g.d() - 1) as f64).sqrt(),
    }
}

impl NormalizedAdjacency {
    pub fn graph(&self) -> &RegularGraph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `d / sqrt(d - 1)`, the eigenvalue of the constant vector.
    pub fn trivial_eigenvalue(&self) -> f64 {
        self.graph.d() as f64 * self.scale
    }

    /// `y = H x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (v, yv) in y.iter_mut().enumerate() {
            *yv = self.scale * self.graph.neighbors(v).iter().map(|&w| x[w]).sum::<f64>();
        }
    }

    /// Row-major dense copy.
    pub fn dense_rows(&self) -> Vec<f64> {
        let n = self.n();
        let mut a = vec![0.0; n * n];
        for v in 0..n {
            for &w in self.graph.neighbors(v) {
                a[v * n + w] = self.scale;
            }
        }
        a
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_row_slice(n, n, &self.dense_rows())
    }
}

/// Eigenvalues in descending order, with optional orthonormal eigenvectors
/// (column `i` belongs to `eigenvalues[i]`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub eigenvectors: Option<DMatrix<f64>>,
    /// `max_i ||H u_i - lambda_i u_i||`, when vectors were requested.
    pub residual: Option<f64>,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Writes `index,lambda` rows, indices starting at 1.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "index,lambda")?;
        for (i, l) in self.eigenvalues.iter().enumerate() {
            writeln!(w, "{},{:.17e}", i + 1, l)?;
        }
        Ok(())
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::DenseCapExceeded { n, cap });
    }
    Ok(())
}

/// All eigenvalues of `H` (dense cap `DEFAULT_DENSE_CAP`).
pub fn full_spectrum(h: &NormalizedAdjacency, want_vectors: bool) -> Result<SpectralDecomposition> {
    full_spectrum_capped(h, want_vectors, DEFAULT_DENSE_CAP)
}

pub fn full_spectrum_capped(h: &NormalizedAdjacency, want_vectors: bool, cap: usize) -> Result<SpectralDecomposition> {
    let n = h.n();
    check_cap(n, cap)?;
    let (eigenvalues, rows) = eigen::symmetric_eigen_rows(h.dense_rows(), n, want_vectors)?;
    let Some(rows) = rows else {
        return Ok(SpectralDecomposition {
            eigenvalues,
            eigenvectors: None,
            residual: None,
        });
    };
    let mut residual: f64 = 0.0;
    let mut hu = vec![0.0; n];
    for (i, lambda) in eigenvalues.iter().enumerate() {
        let u = &rows[i * n..(i + 1) * n];
        h.apply(u, &mut hu);
        let r: f64 = hu.iter().zip(u).map(|(a, b)| (a - lambda * b).powi(2)).sum();
        residual = residual.max(r.sqrt());
    }
    // rows are eigenvectors; a column-major matrix built from them as
    // columns is exactly the row-major buffer read column-wise
    let vectors = DMatrix::from_column_slice(n, n, &rows);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors: Some(vectors),
        residual: Some(residual),
    })
}

/// Eigen-decomposition of an arbitrary dense symmetric matrix (only the
/// lower triangle is read).
pub fn symmetric_eigen(a: &DMatrix<f64>, want_vectors: bool) -> Result<SpectralDecomposition> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::BadParams("matrix must be square".into()));
    }
    check_cap(n, DEFAULT_DENSE_CAP)?;
    let rows = transpose_rows(a.as_slice(), n);
    let (eigenvalues, vecs) = eigen::symmetric_eigen_rows(rows, n, want_vectors)?;
    let Some(vecs) = vecs else {
        return Ok(SpectralDecomposition {
            eigenvalues,
            eigenvectors: None,
            residual: None,
        });
    };
    let u = DMatrix::from_column_slice(n, n, &vecs);
    let au = a * &u;
    let mut residual: f64 = 0.0;
    for (i, lambda) in eigenvalues.iter().enumerate() {
        let r = (au.column(i) - u.column(i) * *lambda).norm();
        residual = residual.max(r);
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors: Some(u),
        residual: Some(residual),
    })
}

fn transpose_rows(col_major: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for c in 0..n {
        for r in 0..n {
            out[r * n + c] = col_major[c * n + r];
        }
    }
    out
}

/// `max ||u_alpha||_inf^2` over all eigenvectors except the first (the
/// trivial one for a connected regular graph).
pub fn delocalization(spec: &SpectralDecomposition) -> Result<f64> {
    let u = spec.eigenvectors.as_ref().ok_or(Error::VectorsMissing)?;
    Ok(u.column_iter()
        .skip(1)
        .map(|c| c.iter().fold(0.0f64, |m, x| m.max(x * x)))
        .fold(0.0, f64::max))
}

/// `(sum lambda, sum lambda^2)` for trace identity checks.
pub fn trace_moments(spec: &SpectralDecomposition) -> (f64, f64) {
    let s1 = spec.eigenvalues.iter().sum();
    let s2 = spec.eigenvalues.iter().map(|l| l * l).sum();
    (s1, s2)
}

/// Ramanujan property `max(lambda_2, |lambda_N|) <= 2` for the normalized
/// spectrum.
pub fn is_ramanujan(lambda_2: f64, lambda_n: f64) -> bool {
    lambda_2.max(lambda_n.abs()) <= 2.0
}

pub(crate) fn complex_identity(n: usize) -> DMatrix<Complex64> {
    DMatrix::identity(n, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{k4, petersen};
    use crate::sampler::{sample_regular, SamplerConfig};

    #[test]
    fn operator_basics() {
        let h = normalized_adjacency(&k4());
        let s = 1.0 / 2f64.sqrt();
        let m = h.dense();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m[(i, j)], if i == j { 0.0 } else { s });
            }
        }
        let mut y = vec![0.0; 4];
        h.apply(&[1.0; 4], &mut y);
        assert!(y.iter().all(|v| (v - 3.0 / 2f64.sqrt()).abs() < 1e-15));
        let g = sample_regular(3, 10, &SamplerConfig::default(), 0).unwrap();
        let tr: f64 = normalized_adjacency(&g).dense().iter().map(|x| x * x).sum();
        assert!((tr - 15.0).abs() < 1e-12);
    }

    #[test]
    fn known_spectra() {
        let r2 = 2f64.sqrt();
        let s = full_spectrum(&normalized_adjacency(&k4()), true).unwrap();
        let expect = [3.0 / r2, -1.0 / r2, -1.0 / r2, -1.0 / r2];
        for (a, b) in s.eigenvalues.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(s.residual.unwrap() < 1e-12);
        let p = full_spectrum(&normalized_adjacency(&petersen()), false).unwrap();
        let mut expect = vec![3.0 / r2];
        expect.extend([1.0 / r2; 5]);
        expect.extend([-2.0 / r2; 4]);
        for (a, b) in p.eigenvalues.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_identities_on_random_graph() {
        let g = sample_regular(3, 500, &SamplerConfig::default(), 5).unwrap();
        let s = full_spectrum(&normalized_adjacency(&g), false).unwrap();
        let (s1, s2) = trace_moments(&s);
        assert!(s1.abs() < 1e-8);
        assert!((s2 / 750.0 - 1.0).abs() < 1e-10);
        assert!((s.eigenvalues[0] - 3.0 / 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn vectors_orthonormal_and_delocalized() {
        let g = sample_regular(3, 200, &SamplerConfig::default(), 8).unwrap();
        let s = full_spectrum(&normalized_adjacency(&g), true).unwrap();
        let u = s.eigenvectors.as_ref().unwrap();
        let gram = u.transpose() * u;
        assert!((gram - DMatrix::identity(200, 200)).amax() < 1e-10);
        assert!(s.residual.unwrap() < 1e-10);
        // trivial vector is constant
        let first = u.column(0);
        assert!(first.iter().all(|x| (x * x - 1.0 / 200.0).abs() < 1e-12));
        let deloc = delocalization(&s).unwrap();
        assert!(deloc > 1.0 / 200.0 && deloc < 1.0);
        let bare = full_spectrum(&normalized_adjacency(&g), false).unwrap();
        assert!(matches!(delocalization(&bare), Err(Error::VectorsMissing)));
    }

    #[test]
    fn dense_cap_enforced() {
        let g = sample_regular(3, 50, &SamplerConfig::default(), 1).unwrap();
        assert!(matches!(
            full_spectrum_capped(&normalized_adjacency(&g), false, 40),
            Err(Error::DenseCapExceeded { n: 50, cap: 40 })
        ));
    }

    #[test]
    fn generic_dense_matches_operator_route() {
        let g = sample_regular(4, 60, &SamplerConfig::default(), 2).unwrap();
        let h = normalized_adjacency(&g);
        let a = full_spectrum(&h, false).unwrap();
        let b = symmetric_eigen(&h.dense(), true).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(b.residual.unwrap() < 1e-12);
    }

    #[test]
    fn csv_export() {
        let s = full_spectrum(&normalized_adjacency(&k4()), false).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "index,lambda");
        assert_eq!(lines.len(), 5);
        let first: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
        assert!((first - 3.0 / 2f64.sqrt()).abs() < 1e-15);
    }
}

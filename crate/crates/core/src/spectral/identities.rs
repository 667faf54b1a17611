//! Exact resolvent identities used as numerical checks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::resolvent::{resolvent, GreenEntries, ResolventSlice};
use super::NormalizedAdjacency;
use crate::error::Result;

/// `max_i |sum_j |G_ij|^2 - Im G_ii / eta|`.
pub fn ward_residual(r: &ResolventSlice) -> f64 {
    let eta = r.z.im;
    let m = r.kept.len();
    (0..m)
        .map(|i| {
            let s: f64 = r.g.row(i).iter().map(|x| x.norm_sqr()).sum();
            (s - r.g[(i, i)].im / eta).abs()
        })
        .fold(0.0, f64::max)
}

/// `max_{i,j != k} |G^{(k)}_ij - (G_ij - G_ik G_kj / G_kk)|`.
pub fn schur_residual(h: &NormalizedAdjacency, z: Complex64, k: usize) -> Result<f64> {
    let full = resolvent(h, z, &[])?;
    let minor = resolvent(h, z, &[k])?;
    let gkk = full.entry(k, k);
    let mut worst: f64 = 0.0;
    for &i in &minor.kept {
        for &j in &minor.kept {
            let expect = full.entry(i, j) - full.entry(i, k) * full.entry(k, j) / gkk;
            worst = worst.max((minor.entry(i, j) - expect).norm());
        }
    }
    Ok(worst)
}

/// `max_y |sum_x G_xy - 1 / (d / sqrt(d-1) - z)|`, forced by the constant
/// eigenvector. Only meaningful when nothing was removed.
pub fn row_sum_residual(h: &NormalizedAdjacency, r: &ResolventSlice) -> f64 {
    let target = 1.0 / (h.trivial_eigenvalue() - r.z);
    r.g.column_iter()
        .map(|col| (col.sum() - target).norm())
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityResiduals {
    pub inverse: f64,
    pub symmetry: f64,
    pub ward: f64,
    pub schur: f64,
    pub row_sum: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        [self.inverse, self.symmetry, self.ward, self.schur, self.row_sum]
            .into_iter()
            .fold(0.0, f64::max)
    }

    /// All single-resolvent identities at `z`, the Schur check removing `k`.
    pub fn compute(h: &NormalizedAdjacency, z: Complex64, k: usize) -> Result<Self> {
        let r = resolvent(h, z, &[])?;
        Ok(Self {
            inverse: r.inverse_residual(h),
            symmetry: r.symmetry_residual(),
            ward: ward_residual(&r),
            schur: schur_residual(h, z, k)?,
            row_sum: row_sum_residual(h, &r),
        })
    }
}

//! Woodbury expansion of the resolvent under a local resampling.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{check_cap, complex_identity, symmetric_eigen, DEFAULT_DENSE_CAP};
use crate::error::{Error, Result};
use crate::graph::{ball, induced_ball, RegularGraph};
use crate::green_tree::{p_extension, ExtensionWeightSpec, WeightConvention};
use crate::laws::m_sc_unchecked;
use crate::resampling::{apply_resampling, AdmissibleSet, ResamplingData};

/// Radius of the neighborhood of the switched forest on which the local
/// extensions `L` and `L~` live.
pub const F_BALL_RADIUS: usize = 2;

/// Eigenvalues of the restricted difference below this count as zero.
const RANK_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WoodburyReport {
    pub rank: usize,
    /// Vertices touched by the switches.
    pub support: Vec<usize>,
    /// `max |A^{-1} - B^{-1} - A^{-1}(B - A)B^{-1}|` for `A = H - z`, `B = H~ - z`.
    pub resolvent_residual: f64,
    /// `max |G~ - G + G U (I + V^T G U)^{-1} V^T G|`.
    pub woodbury_residual: f64,
    /// `max |F - (-U (I + V^T L U)^{-1} V^T)|` with `F` built from `L~`.
    pub f_matrix_residual: f64,
    /// `max |L~^{-1} - L^{-1} - U V^T|` on the ball.
    pub inverse_difference_residual: f64,
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.norm()))
}

fn shifted(g: &RegularGraph, z: Complex64) -> DMatrix<Complex64> {
    let n = g.n();
    let s = 1.0 / ((g.d() - 1) as f64).sqrt();
    let mut a = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for v in 0..n {
        a[(v, v)] = -z;
        for &w in g.neighbors(v) {
            a[(v, w)] = Complex64::new(s, 0.0);
        }
    }
    a
}

fn inverse(a: DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    a.lu().try_inverse().ok_or(Error::SingularSystem)
}

/// `U V^T` factorization of a symmetric difference supported on `support`:
/// `U = Q diag(lambda)`, `V = Q` from the eigen-decomposition of the
/// restricted block, embedded into `n` rows.
fn low_rank(diff: &DMatrix<f64>, support: &[usize], n: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let k = support.len();
    let block = DMatrix::from_fn(k, k, |i, j| diff[(support[i], support[j])]);
    let spec = symmetric_eigen(&block, true)?;
    let q = spec.eigenvectors.expect("vectors requested");
    let keep: Vec<usize> = (0..k).filter(|&i| spec.eigenvalues[i].abs() > RANK_TOL).collect();
    let mut u = DMatrix::zeros(n, keep.len());
    let mut v = DMatrix::zeros(n, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        for (r, &x) in support.iter().enumerate() {
            u[(x, c)] = q[(r, i)] * spec.eigenvalues[i];
            v[(x, c)] = q[(r, i)];
        }
    }
    Ok((u, v))
}

fn complexify(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn woodbury_suite(g: &RegularGraph, s: &ResamplingData, w: &AdmissibleSet, z: Complex64) -> Result<WoodburyReport> {
    woodbury_suite_with_radius(g, s, w, z, F_BALL_RADIUS)
}

pub fn woodbury_suite_with_radius(
    g: &RegularGraph,
    s: &ResamplingData,
    w: &AdmissibleSet,
    z: Complex64,
    radius: usize,
) -> Result<WoodburyReport> {
    let n = g.n();
    check_cap(n, DEFAULT_DENSE_CAP)?;
    if !(z.im > 0.0) {
        return Err(Error::BadParams(format!("Woodbury suite needs Im z > 0, got {z}")));
    }
    let gt = apply_resampling(g, s, w)?;
    if gt == *g {
        return Err(Error::NoSwitchApplied);
    }
    let a = shifted(g, z);
    let b = shifted(&gt, z);
    let diff_c = &b - &a;
    let diff = diff_c.map(|x| x.re);
    let mut support: Vec<usize> = (0..n).filter(|&i| (0..n).any(|j| diff[(i, j)] != 0.0)).collect();
    support.sort_unstable();
    let (u, v) = low_rank(&diff, &support, n)?;
    let rank = u.ncols();
    let (uc, vc) = (complexify(&u), complexify(&v));

    let green = inverse(a)?;
    let green_t = inverse(b)?;
    let resolvent_residual = max_abs(&(&green - &green_t - &green * &diff_c * &green_t));

    let vt = vc.transpose();
    let core = inverse(complex_identity(rank) + &vt * &green * &uc)?;
    let woodbury = &green * &uc * core * &vt * &green;
    let woodbury_residual = max_abs(&(&green_t - &green + woodbury));

    // local extensions on the radius-R neighborhood of the ball around
    // the center together with the switched edges
    let mut centers = s.ball.clone();
    for alpha in w.indices() {
        let (l, a) = s.boundary[alpha];
        let (b, c) = s.proposals[alpha];
        centers.extend([l, a, b, c]);
    }
    centers.sort_unstable();
    centers.dedup();
    let nb = ball(g, &centers, radius)?;
    let nb_t = induced_ball(&gt, &centers, radius, nb.vertices.clone());
    if nb.inner_degrees() != nb_t.inner_degrees() {
        return Err(Error::InternalInconsistency(
            "switch changed degrees inside the ball".into(),
        ));
    }
    let spec = ExtensionWeightSpec {
        delta: m_sc_unchecked(z),
        convention: WeightConvention::DegreeDeficit,
        w: z,
    };
    let d = g.d();
    let l = p_extension(&nb, d, &spec, &[])?.p;
    let lt = p_extension(&nb_t, d, &spec, &[])?.p;
    let verts = &nb.vertices;
    let k = verts.len();
    let restrict = |m: &DMatrix<Complex64>| DMatrix::from_fn(k, m.ncols(), |i, j| m[(verts[i], j)]);
    let ub = restrict(&uc);
    let vb = restrict(&vc);
    let xi = DMatrix::from_fn(k, k, |i, j| -diff_c[(verts[i], verts[j])]);

    let f_direct = &xi + &xi * &lt * &xi;
    let f_woodbury = -(&ub * inverse(complex_identity(rank) + vb.transpose() * &l * &ub)? * vb.transpose());
    let f_matrix_residual = max_abs(&(f_direct - f_woodbury));

    let inv_l = inverse(l)?;
    let inv_lt = inverse(lt)?;
    let inverse_difference_residual = max_abs(&(inv_lt - inv_l + xi));

    Ok(WoodburyReport {
        rank,
        support,
        resolvent_residual,
        woodbury_residual,
        f_matrix_residual,
        inverse_difference_residual,
    })
}

//! Resolvents `G(z) = (H - z)^{-1}`, their minors, and statistics built
//! from them.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{
    check_cap, complex_identity, full_spectrum, NormalizedAdjacency, SpectralDecomposition, DEFAULT_DENSE_CAP,
};
use crate::error::{Error, Result};
use crate::graph::RegularGraph;

/// Read access to Green's function entries by original vertex index.
pub trait GreenEntries {
    fn z(&self) -> Complex64;
    fn entry(&self, i: usize, j: usize) -> Complex64;
}

/// A dense resolvent of `H^{(X)}`, the operator with the vertices of `X`
/// deleted.
#[derive(Clone, Debug)]
pub struct ResolventSlice {
    pub z: Complex64,
    pub removed: Vec<usize>,
    /// Original index of each row of `g`.
    pub kept: Vec<usize>,
    pub g: DMatrix<Complex64>,
    position: HashMap<usize, usize>,
}

impl ResolventSlice {
    pub fn position(&self, v: usize) -> Option<usize> {
        self.position.get(&v).copied()
    }

    /// `max |((H^{(X)} - z) G - I)_{ij}|`.
    pub fn inverse_residual(&self, h: &NormalizedAdjacency) -> f64 {
        let m = shifted_minor(h, self.z, &self.kept);
        let r = m * &self.g - complex_identity(self.kept.len());
        r.iter().fold(0.0, |acc, x| acc.max(x.norm()))
    }

    /// `max |G_ij - G_ji|`.
    pub fn symmetry_residual(&self) -> f64 {
        (&self.g - self.g.transpose())
            .iter()
            .fold(0.0, |acc, x| acc.max(x.norm()))
    }

    /// `(1 / |kept|) Tr G`.
    pub fn normalized_trace(&self) -> Complex64 {
        self.g.trace() / self.kept.len() as f64
    }
}

impl GreenEntries for ResolventSlice {
    fn z(&self) -> Complex64 {
        self.z
    }

    fn entry(&self, i: usize, j: usize) -> Complex64 {
        let (a, b) = (self.position[&i], self.position[&j]);
        self.g[(a, b)]
    }
}

fn shifted_minor(h: &NormalizedAdjacency, z: Complex64, kept: &[usize]) -> DMatrix<Complex64> {
    let pos: HashMap<usize, usize> = kept.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let m = kept.len();
    let mut a = DMatrix::<Complex64>::from_element(m, m, Complex64::new(0.0, 0.0));
    let s = Complex64::new(h.scale(), 0.0);
    for (r, &v) in kept.iter().enumerate() {
        a[(r, r)] = -z;
        for w in h.graph().neighbors(v) {
            if let Some(&c) = pos.get(w) {
                a[(r, c)] = s;
            }
        }
    }
    a
}

fn invert(a: DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    a.lu().try_inverse().ok_or(Error::SingularSystem)
}

/// Dense resolvent of `H^{(X)}` at `z` by LU with partial pivoting.
pub fn resolvent(h: &NormalizedAdjacency, z: Complex64, removed: &[usize]) -> Result<ResolventSlice> {
    let n = h.n();
    check_cap(n, DEFAULT_DENSE_CAP)?;
    for &v in removed {
        h.graph().check_vertex(v)?;
    }
    if z.im == 0.0 {
        return Err(Error::BadParams(format!("resolvent needs Im z != 0, got {z}")));
    }
    let mut removed: Vec<usize> = removed.to_vec();
    removed.sort_unstable();
    removed.dedup();
    let kept: Vec<usize> = (0..n).filter(|v| removed.binary_search(v).is_err()).collect();
    let g = invert(shifted_minor(h, z, &kept))?;
    let position = kept.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    Ok(ResolventSlice {
        z,
        removed,
        kept,
        g,
        position,
    })
}

/// `(A - z)^{-1}` for a dense real symmetric `A`.
pub fn resolvent_of_matrix(a: &DMatrix<f64>, z: Complex64) -> Result<DMatrix<Complex64>> {
    let n = a.nrows();
    check_cap(n, DEFAULT_DENSE_CAP)?;
    let mut m = a.map(|x| Complex64::new(x, 0.0));
    for i in 0..n {
        m[(i, i)] -= z;
    }
    invert(m)
}

/// Entries of `G(z) = sum_a u_a u_a^T / (lambda_a - z)` from an
/// eigen-decomposition; each entry costs O(n).
pub struct SpectralResolvent<'a> {
    z: Complex64,
    weights: Vec<Complex64>,
    spec: &'a SpectralDecomposition,
}

impl<'a> SpectralResolvent<'a> {
    pub fn new(spec: &'a SpectralDecomposition, z: Complex64) -> Result<Self> {
        if spec.eigenvectors.is_none() {
            return Err(Error::VectorsMissing);
        }
        let weights = spec.eigenvalues.iter().map(|l| 1.0 / (l - z)).collect();
        Ok(Self { z, weights, spec })
    }
}

impl GreenEntries for SpectralResolvent<'_> {
    fn z(&self) -> Complex64 {
        self.z
    }

    fn entry(&self, i: usize, j: usize) -> Complex64 {
        let u = self.spec.eigenvectors.as_ref().expect("checked in new");
        let (ri, rj) = (u.row(i), u.row(j));
        ri.iter()
            .zip(rj.iter())
            .zip(&self.weights)
            .map(|((a, b), w)| w * (a * b))
            .sum()
    }
}

pub fn green_entry(spec: &SpectralDecomposition, z: Complex64, i: usize, j: usize) -> Result<Complex64> {
    Ok(SpectralResolvent::new(spec, z)?.entry(i, j))
}

/// `m_N(z) = (1/N) sum 1 / (lambda_i - z)`.
pub fn stieltjes(eigenvalues: &[f64], z: Complex64) -> Complex64 {
    eigenvalues.iter().map(|l| 1.0 / (l - z)).sum::<Complex64>() / eigenvalues.len() as f64
}

/// `d m_N / dz = (1/N) sum (lambda_i - z)^{-2}`.
pub fn stieltjes_derivative(eigenvalues: &[f64], z: Complex64) -> Complex64 {
    eigenvalues
        .iter()
        .map(|l| {
            let w = 1.0 / (l - z);
            w * w
        })
        .sum::<Complex64>()
        / eigenvalues.len() as f64
}

/// `Q = (1 / N d) sum_{i ~ j} G^{(i)}_{jj}` over ordered adjacent pairs,
/// with `G^{(i)}_{jj} = G_jj - G_ij^2 / G_ii`.
pub fn q_statistic_from<G: GreenEntries>(g: &RegularGraph, green: &G) -> Complex64 {
    let (n, d) = (g.n(), g.d());
    let diag: Vec<Complex64> = (0..n).map(|v| green.entry(v, v)).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for &j in g.neighbors(i) {
            let gij = green.entry(i, j);
            acc += diag[j] - gij * gij / diag[i];
        }
    }
    acc / (n * d) as f64
}

/// `Q(z)` from one dense resolvent (`n <= 400`) or from the
/// eigen-decomposition.
pub fn q_statistic(h: &NormalizedAdjacency, z: Complex64) -> Result<Complex64> {
    if h.n() <= 400 {
        let slice = resolvent(h, z, &[])?;
        Ok(q_statistic_from(h.graph(), &slice))
    } else {
        let spec = full_spectrum(h, true)?;
        Ok(q_statistic_from(h.graph(), &SpectralResolvent::new(&spec, z)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{k4, petersen};
    use crate::spectral::normalized_adjacency;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn direct_and_spectral_agree() {
        for g in [k4(), petersen()] {
            let h = normalized_adjacency(&g);
            let spec = full_spectrum(&h, true).unwrap();
            for z in [c(0.0, 1.0), c(0.5, 0.5), c(2.0, 0.1)] {
                let r = resolvent(&h, z, &[]).unwrap();
                assert!(r.inverse_residual(&h) < 1e-12);
                assert!(r.symmetry_residual() < 1e-12);
                let sr = SpectralResolvent::new(&spec, z).unwrap();
                for i in 0..g.n() {
                    for j in 0..g.n() {
                        assert!((r.entry(i, j) - sr.entry(i, j)).norm() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn stieltjes_values() {
        assert!((stieltjes(&[0.0], c(0.0, 1.0)) - c(0.0, 1.0)).norm() < 1e-15);
        let h = normalized_adjacency(&k4());
        let spec = full_spectrum(&h, false).unwrap();
        let z = c(0.0, 2.0);
        let r = resolvent(&h, z, &[]).unwrap();
        let m = stieltjes(&spec.eigenvalues, z);
        assert!((m - r.normalized_trace()).norm() < 1e-10);
        assert!(m.im > 0.0);
        assert!((stieltjes(&spec.eigenvalues, z.conj()) - m.conj()).norm() < 1e-15);
        // derivative against a central difference
        let hh = 1e-5;
        let fd = (stieltjes(&spec.eigenvalues, z + hh) - stieltjes(&spec.eigenvalues, z - hh)) / (2.0 * hh);
        assert!((stieltjes_derivative(&spec.eigenvalues, z) - fd).norm() < 1e-8);
    }

    #[test]
    fn q_matches_explicit_minors_on_k4() {
        let g = k4();
        let h = normalized_adjacency(&g);
        let z = c(0.0, 2.0);
        let q = q_statistic(&h, z).unwrap();
        let mut acc = c(0.0, 0.0);
        for i in 0..4 {
            let minor = resolvent(&h, z, &[i]).unwrap();
            for &j in g.neighbors(i) {
                acc += minor.entry(j, j);
            }
        }
        assert!((q - acc / 12.0).norm() < 1e-9);
    }

    #[test]
    fn removed_vertices_are_dropped() {
        let h = normalized_adjacency(&petersen());
        let r = resolvent(&h, c(0.1, 0.3), &[3, 0, 3]).unwrap();
        assert_eq!(r.removed, vec![0, 3]);
        assert_eq!(r.kept.len(), 8);
        assert!(r.position(3).is_none());
        assert!(r.inverse_residual(&h) < 1e-12);
        assert!(resolvent(&h, c(0.1, 0.0), &[]).is_err());
        assert!(resolvent(&h, c(0.1, 1.0), &[10]).is_err());
    }
}

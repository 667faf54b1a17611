//! Comparison of a sampled graph's resolvent with the local laws.

use num_complex::Complex64;
use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use super::{p_extension, ExtensionWeightSpec, WeightConvention};
use crate::error::{Error, Result};
use crate::graph::{ball, RegularGraph};
use crate::laws::{free_conv_m, m_d_unchecked, m_sc_unchecked};
use crate::sampler::{rng_from_seed, sample_constrained_goe, splitmix64};
use crate::spectral::{
    normalized_adjacency, q_statistic_from, stieltjes, symmetric_eigen, GreenEntries, SpectralResolvent,
};

/// Pairs compared against the tree extension when `n` is large.
pub const SAMPLED_PAIRS: usize = 200;
/// Below this size every coincident and adjacent pair is compared.
pub const ALL_PAIRS_UP_TO: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalLawConfig {
    pub z: Complex64,
    pub t: f64,
    /// Radius of the balls `B_R({i, j})` used for `P`.
    pub radius: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalLawReport {
    pub d: usize,
    pub n: usize,
    pub z: Complex64,
    pub t: f64,
    pub radius: usize,
    pub seed: u64,
    /// `z + t m_d(z, t)`.
    pub z_t: Complex64,
    pub m_n: Complex64,
    pub m_err: f64,
    pub q: Complex64,
    pub q_err: f64,
    pub max_tree_err: f64,
    /// The compared pairs, `(i, i)` or adjacent `(i, j)`, for replay.
    pub pairs: Vec<(usize, usize)>,
}

/// Compares `G(z, t)` of `H(t) = H + sqrt(t) Z` with `P_ij` on balls,
/// `Q_t` with `m_sc(z_t)` and `m_t` with `m_d(z_t)`. `Z` and the pair
/// sample are drawn from `seed`.
pub fn local_law_report(g: &RegularGraph, cfg: &LocalLawConfig) -> Result<LocalLawReport> {
    let mut out = local_law_grid(g, &[cfg.z], cfg.t, cfg.radius, cfg.seed)?;
    Ok(out.remove(0))
}

/// `local_law_report` at several spectral parameters, sharing one
/// eigen-decomposition of `H(t)` and one pair sample.
pub fn local_law_grid(
    g: &RegularGraph,
    zs: &[Complex64],
    t: f64,
    radius: usize,
    seed: u64,
) -> Result<Vec<LocalLawReport>> {
    if let Some(z) = zs.iter().find(|z| !(z.im > 0.0)) {
        return Err(Error::BadParams(format!("local law needs Im z > 0, got {z}")));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::BadParams(format!("time must be >= 0, got {t}")));
    }
    let (d, n) = (g.d(), g.n());
    let mut dense = normalized_adjacency(g).dense();
    if t > 0.0 {
        let zmat = sample_constrained_goe(n, splitmix64(seed ^ 0x5a5a))?;
        dense += zmat.entries * t.sqrt();
    }
    let spec = symmetric_eigen(&dense, true)?;
    let pairs = pick_pairs(g, seed);
    let balls = pairs
        .iter()
        .map(|&(i, j)| ball(g, &[i, j], radius))
        .collect::<Result<Vec<_>>>()?;

    let mut out = Vec::with_capacity(zs.len());
    for &z in zs {
        let green = SpectralResolvent::new(&spec, z)?;
        let z_t = if t > 0.0 { free_conv_m(d, z, t)?.z_t } else { z };
        let m_n = stieltjes(&spec.eigenvalues, z);
        let q = q_statistic_from(g, &green);
        let weights = ExtensionWeightSpec {
            delta: m_sc_unchecked(z_t),
            convention: WeightConvention::DegreeDeficit,
            w: z_t,
        };
        let mut max_tree_err: f64 = 0.0;
        for (&(i, j), b) in pairs.iter().zip(&balls) {
            let p = p_extension(b, d, &weights, &[])?;
            let pij = p.entry(i, j).expect("pair lies in its own ball");
            max_tree_err = max_tree_err.max((green.entry(i, j) - pij).norm());
        }
        out.push(LocalLawReport {
            d,
            n,
            z,
            t,
            radius,
            seed,
            z_t,
            m_n,
            m_err: (m_n - m_d_unchecked(d, z_t)).norm(),
            q,
            q_err: (q - m_sc_unchecked(z_t)).norm(),
            max_tree_err,
            pairs: pairs.clone(),
        });
    }
    Ok(out)
}

/// All coincident and adjacent pairs for small graphs; otherwise
/// `SAMPLED_PAIRS` of them, half of each kind.
fn pick_pairs(g: &RegularGraph, seed: u64) -> Vec<(usize, usize)> {
    let n = g.n();
    if n <= ALL_PAIRS_UP_TO {
        let mut out: Vec<_> = (0..n).map(|i| (i, i)).collect();
        out.extend(g.edges());
        return out;
    }
    let mut rng = rng_from_seed(seed);
    let half = SAMPLED_PAIRS / 2;
    let mut out: Vec<_> = sample(&mut rng, n, half).into_iter().map(|i| (i, i)).collect();
    let edges = g.edges();
    out.extend(sample(&mut rng, edges.len(), half).into_iter().map(|k| edges[k]));
    out
}

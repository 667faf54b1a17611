//! Statistical check that `(G, T_S(G))` is an exchangeable pair when `G`
//! is uniform.
//!
//! Labeled states do not recur often enough at any useful size, so each
//! graph is reduced to an isomorphism-invariant summary relative to the
//! center (distance profile from `o`, triangles at `o`, total triangles,
//! total 4-cycles). Exchangeability of the graphs implies exchangeability
//! of the summaries, so the joint counts `C[x][y]` and `C[y][x]` must agree
//! up to binomial noise.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{admissible_set, apply_resampling, propose_resampling, switch_for};
use crate::error::{Error, Result};
use crate::graph::{bfs_within, RegularGraph};
use crate::sampler::{sample_regular, splitmix64, SamplerConfig, SeedStream};

/// Which kernel to run. `SkipAdmissibility` switches every pair whose
/// switch is simple at the moment it is applied; it is not symmetric and
/// exists to show that the test can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelVariant {
    Faithful,
    SkipAdmissibility,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReversibilityReport {
    pub variant: KernelVariant,
    pub trials: usize,
    pub distinct_states: usize,
    pub pairs_tested: usize,
    /// Largest `|K(x, y) - K(y, x)|` among tested pairs, as frequencies.
    pub max_asymmetry: f64,
    /// Standard error of that difference.
    pub sem: f64,
    /// Largest `|C_xy - C_yx| / sqrt(C_xy + C_yx)` among tested pairs.
    pub max_z: f64,
    pub pass: bool,
}

const PAIRS_TESTED: usize = 50;
const MIN_PAIR_COUNT: u64 = 30;
const Z_LIMIT: f64 = 4.0;

fn triangles_and_squares(g: &RegularGraph, o: usize) -> (usize, usize, usize) {
    let n = g.n();
    let mut tri = 0;
    let mut tri_o = 0;
    for (u, v) in g.edges() {
        let common = g.neighbors(u).iter().filter(|w| g.has_edge(**w, v)).count();
        tri += common;
        if u == o || v == o {
            tri_o += common;
        }
    }
    let mut squares = 0;
    for u in 0..n {
        for w in u + 1..n {
            let c = g.neighbors(u).iter().filter(|x| g.has_edge(**x, w)).count();
            squares += c * c.saturating_sub(1) / 2;
        }
    }
    (tri / 3, tri_o / 2, squares / 2)
}

/// The invariant summary of `g` seen from `o`.
pub fn lumped_state(g: &RegularGraph, o: usize) -> Vec<usize> {
    let dist = bfs_within(g, &[o], g.n(), |_| false);
    let max = dist.values().copied().max().unwrap_or(0);
    let mut profile = vec![0; max + 1];
    for d in dist.values() {
        profile[*d] += 1;
    }
    let (tri, tri_o, squares) = triangles_and_squares(g, o);
    let mut key = vec![tri, tri_o, squares, g.n() - dist.len()];
    key.extend(profile);
    key
}

fn kernel_step(
    g: &RegularGraph,
    ell: usize,
    r_param: usize,
    seed: u64,
    variant: KernelVariant,
) -> Result<RegularGraph> {
    let s = propose_resampling(g, 0, ell, seed)?;
    match variant {
        KernelVariant::Faithful => {
            let w = admissible_set(g, &s, r_param)?;
            apply_resampling(g, &s, &w)
        }
        KernelVariant::SkipAdmissibility => {
            let mut out = g.clone();
            for alpha in 0..s.mu {
                let sw = switch_for(&s, alpha);
                if sw.check(&out).is_ok() {
                    sw.apply_in_place(&mut out);
                }
            }
            Ok(out)
        }
    }
}

/// One step of the chosen kernel from `g` with center `0`.
pub fn kernel_sample(
    g: &RegularGraph,
    ell: usize,
    r_param: usize,
    seed: u64,
    variant: KernelVariant,
) -> Result<RegularGraph> {
    kernel_step(g, ell, r_param, seed, variant)
}

/// Monte Carlo symmetry test of the resampling kernel at center `0`.
pub fn reversibility_estimate(
    d: usize,
    n: usize,
    ell: usize,
    r_param: usize,
    trials: usize,
    seed: u64,
) -> Result<ReversibilityReport> {
    reversibility_estimate_with(d, n, ell, r_param, trials, seed, KernelVariant::Faithful)
}

pub fn reversibility_estimate_with(
    d: usize,
    n: usize,
    ell: usize,
    r_param: usize,
    trials: usize,
    seed: u64,
    variant: KernelVariant,
) -> Result<ReversibilityReport> {
    if trials == 0 {
        return Err(Error::BadParams("trials must be >= 1".into()));
    }
    if n > 16 || n <= d {
        return Err(Error::BadParams(format!(
            "exchangeability needs recurring states: n = {n} is out of range for d = {d}"
        )));
    }
    let cfg = SamplerConfig::for_degree(d);
    let stream = SeedStream::new(seed);
    const CHUNK: usize = 4096;
    let chunks = trials.div_ceil(CHUNK);
    let partial: Vec<Result<HashMap<(Vec<usize>, Vec<usize>), u64>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut counts = HashMap::new();
            for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                let s = stream.derive(t as u64);
                let g = sample_regular(d, n, &cfg, s)?;
                let h = kernel_step(&g, ell, r_param, splitmix64(s), variant)?;
                *counts.entry((lumped_state(&g, 0), lumped_state(&h, 0))).or_insert(0) += 1;
            }
            Ok(counts)
        })
        .collect();
    let mut joint: BTreeMap<(Vec<usize>, Vec<usize>), u64> = BTreeMap::new();
    for p in partial {
        for (k, v) in p? {
            *joint.entry(k).or_insert(0) += v;
        }
    }
    let mut states: Vec<&Vec<usize>> = joint.keys().flat_map(|(x, y)| [x, y]).collect();
    states.sort();
    states.dedup();
    let distinct_states = states.len();
    // unordered off-diagonal pairs with (forward, backward) counts
    let mut unordered: BTreeMap<(&Vec<usize>, &Vec<usize>), (u64, u64)> = BTreeMap::new();
    for ((x, y), &c) in &joint {
        if x < y {
            unordered.entry((x, y)).or_default().0 += c;
        } else if x > y {
            unordered.entry((y, x)).or_default().1 += c;
        }
    }
    let mut pairs: Vec<(u64, u64, u64)> = unordered.values().map(|&(f, b)| (f + b, f, b)).collect();
    pairs.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let tested: Vec<_> = pairs
        .into_iter()
        .filter(|p| p.0 >= MIN_PAIR_COUNT)
        .take(PAIRS_TESTED)
        .collect();
    let tf = trials as f64;
    let (mut max_z, mut max_asym, mut sem) = (0.0f64, 0.0f64, 0.0f64);
    for &(total, fwd, back) in &tested {
        let diff = fwd.abs_diff(back) as f64;
        let z = diff / (total as f64).sqrt();
        if z > max_z {
            max_z = z;
        }
        if diff / tf > max_asym {
            max_asym = diff / tf;
            sem = (total as f64).sqrt() / tf;
        }
    }
    Ok(ReversibilityReport {
        variant,
        trials,
        distinct_states,
        pairs_tested: tested.len(),
        max_asymmetry: max_asym,
        sem,
        max_z,
        pass: max_z <= Z_LIMIT,
    })
}

//! Simple switchings and local resampling around a ball.
//!
//! For a ball `T = B_ell(o)` every boundary edge `{l, a}` (`l` inside,
//! `a` outside) is paired with an independent uniform oriented edge
//! `(b, c)` of the graph with `T` deleted. Pair `alpha` is switched,
//! `{l, a}, {b, c} -> {l, c}, {a, b}`, when it is admissible: the
//! `R/4`-neighborhood of `{a, b, c}` plus the new edge `{a, b}` is a tree,
//! and `{a, b, c}` is further than `R/4` from every other triple.

mod exchange;

use serde::{Deserialize, Serialize};

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graph::{bfs_within, excess_of, RegularGraph};
use crate::sampler::rng_from_seed;

pub use exchange::{
    kernel_sample, lumped_state, reversibility_estimate, reversibility_estimate_with, KernelVariant,
    ReversibilityReport,
};

/// Replace `{v1, v2}, {v3, v4}` by `{v1, v4}, {v2, v3}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimpleSwitch {
    pub v1: usize,
    pub v2: usize,
    pub v3: usize,
    pub v4: usize,
}

impl SimpleSwitch {
    pub fn new(first: (usize, usize), second: (usize, usize)) -> Self {
        Self {
            v1: first.0,
            v2: first.1,
            v3: second.0,
            v4: second.1,
        }
    }

    /// The switch undoing this one.
    pub fn reversed(&self) -> Self {
        Self {
            v1: self.v1,
            v2: self.v4,
            v3: self.v3,
            v4: self.v2,
        }
    }

    fn check(&self, g: &RegularGraph) -> Result<()> {
        let vs = [self.v1, self.v2, self.v3, self.v4];
        for &v in &vs {
            g.check_vertex(v)?;
        }
        for i in 0..4 {
            for j in i + 1..4 {
                if vs[i] == vs[j] {
                    return Err(Error::VerticesNotDistinct);
                }
            }
        }
        for (u, v) in [(self.v1, self.v2), (self.v3, self.v4)] {
            if !g.has_edge(u, v) {
                return Err(Error::EdgeMissing { u, v });
            }
        }
        for (u, v) in [(self.v1, self.v4), (self.v2, self.v3)] {
            if g.has_edge(u, v) {
                return Err(Error::WouldCreateMultiEdge { u, v });
            }
        }
        Ok(())
    }

    fn apply_in_place(&self, g: &mut RegularGraph) {
        g.replace_neighbor(self.v1, self.v2, self.v4);
        g.replace_neighbor(self.v2, self.v1, self.v3);
        g.replace_neighbor(self.v3, self.v4, self.v2);
        g.replace_neighbor(self.v4, self.v3, self.v1);
    }
}

pub fn simple_switch(g: &RegularGraph, s: SimpleSwitch) -> Result<RegularGraph> {
    s.check(g)?;
    let mut out = g.clone();
    s.apply_in_place(&mut out);
    Ok(out)
}

/// Sorted vertices of `B_ell(o)`.
pub fn ball_vertices(g: &RegularGraph, o: usize, ell: usize) -> Result<Vec<usize>> {
    g.check_vertex(o)?;
    let mut v: Vec<usize> = bfs_within(g, &[o], ell, |_| false).into_keys().collect();
    v.sort_unstable();
    Ok(v)
}

/// Oriented boundary edges `(l, a)` of `B_ell(o)`, `l` inside, sorted.
pub fn boundary_edges(g: &RegularGraph, o: usize, ell: usize) -> Result<Vec<(usize, usize)>> {
    let inside = ball_vertices(g, o, ell)?;
    Ok(boundary_of(g, &inside))
}

fn boundary_of(g: &RegularGraph, inside: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for &l in inside {
        for &a in g.neighbors(l) {
            if inside.binary_search(&a).is_err() {
                out.push((l, a));
            }
        }
    }
    out.sort_unstable();
    out
}

/// Resampling data around `o`: boundary edges and one proposal per
/// boundary edge. Serializes to JSON for replay.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResamplingData {
    pub center: usize,
    /// Optional neighbor of the center for minor-based checks.
    pub aux: Option<usize>,
    pub ell: usize,
    pub mu: usize,
    /// Sorted vertex set of the ball.
    pub ball: Vec<usize>,
    /// `(l_alpha, a_alpha)`.
    pub boundary: Vec<(usize, usize)>,
    /// `(b_alpha, c_alpha)`.
    pub proposals: Vec<(usize, usize)>,
}

impl ResamplingData {
    fn inside(&self, v: usize) -> bool {
        self.ball.binary_search(&v).is_ok()
    }

    /// `(a, b, c)` for index `alpha`.
    pub fn triple(&self, alpha: usize) -> (usize, usize, usize) {
        let (_, a) = self.boundary[alpha];
        let (b, c) = self.proposals[alpha];
        (a, b, c)
    }
}

/// Oriented edges `(u, v)` with both ends outside `ball`, ordered so index
/// `2k` and `2k+1` are the two orientations of the `k`-th edge.
fn outside_oriented(g: &RegularGraph, ball: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (u, v) in g.edges() {
        if ball.binary_search(&u).is_err() && ball.binary_search(&v).is_err() {
            out.push((u, v));
            out.push((v, u));
        }
    }
    out
}

pub fn propose_resampling(g: &RegularGraph, o: usize, ell: usize, seed: u64) -> Result<ResamplingData> {
    let ball = ball_vertices(g, o, ell)?;
    let boundary = boundary_of(g, &ball);
    let candidates = outside_oriented(g, &ball);
    if candidates.is_empty() {
        return Err(Error::NoEdgesOutside);
    }
    let mut rng = rng_from_seed(seed);
    let proposals = (0..boundary.len())
        .map(|_| candidates[rng.random_range(0..candidates.len())])
        .collect();
    Ok(ResamplingData {
        center: o,
        aux: None,
        ell,
        mu: boundary.len(),
        ball,
        boundary,
        proposals,
    })
}

fn check_data(g: &RegularGraph, s: &ResamplingData) -> Result<()> {
    if s.boundary.len() != s.mu || s.proposals.len() != s.mu {
        return Err(Error::BadParams("resampling data lengths differ from mu".into()));
    }
    for &(u, v) in s.boundary.iter().chain(&s.proposals) {
        g.check_vertex(u)?;
        g.check_vertex(v)?;
    }
    Ok(())
}

/// The indicator `I_alpha` with integer radius `R / 4`.
pub fn admissibility(g: &RegularGraph, s: &ResamplingData, alpha: usize, r_param: usize) -> Result<bool> {
    check_data(g, s)?;
    if alpha >= s.mu {
        return Err(Error::BadIndex {
            index: alpha,
            size: s.mu,
        });
    }
    Ok(admissible_unchecked(g, s, alpha, r_param / 4))
}

fn admissible_unchecked(g: &RegularGraph, s: &ResamplingData, alpha: usize, radius: usize) -> bool {
    let (a, b, c) = s.triple(alpha);
    let blocked = |v: usize| s.inside(v);
    let reached = bfs_within(g, &[a, b, c], radius, blocked);
    // condition 1: the neighborhood plus {a, b} is a tree
    let mut verts: Vec<usize> = reached.keys().copied().collect();
    verts.sort_unstable();
    let idx = |v: usize| verts.binary_search(&v).unwrap();
    let mut edges = Vec::new();
    for &u in &verts {
        for &v in g.neighbors(u) {
            if u < v && verts.binary_search(&v).is_ok() {
                edges.push((idx(u), idx(v)));
            }
        }
    }
    edges.push((idx(a), idx(b)));
    let report = excess_of(verts.len(), &edges);
    if report.excess != 0 || report.components != 1 {
        return false;
    }
    // condition 2: every other triple is further than `radius`
    for beta in 0..s.mu {
        if beta == alpha {
            continue;
        }
        let (x, y, w) = s.triple(beta);
        if [x, y, w].iter().any(|v| reached.contains_key(v)) {
            return false;
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibleSet {
    pub flags: Vec<bool>,
    pub r_param: usize,
}

impl AdmissibleSet {
    pub fn count(&self) -> usize {
        self.flags.iter().filter(|f| **f).count()
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.flags.len()).filter(|&i| self.flags[i]).collect()
    }
}

pub fn admissible_set(g: &RegularGraph, s: &ResamplingData, r_param: usize) -> Result<AdmissibleSet> {
    check_data(g, s)?;
    let flags = (0..s.mu)
        .map(|alpha| admissible_unchecked(g, s, alpha, r_param / 4))
        .collect();
    Ok(AdmissibleSet { flags, r_param })
}

/// With `(v1, v2, v3, v4) = (l, a, b, c)` the switch yields `{l, c}, {a, b}`.
pub(crate) fn switch_for(s: &ResamplingData, alpha: usize) -> SimpleSwitch {
    SimpleSwitch::new(s.boundary[alpha], s.proposals[alpha])
}

/// `T_S(G)`: performs every admissible switch. A switch that would break
/// simplicity is reported as an internal inconsistency.
pub fn apply_resampling(g: &RegularGraph, s: &ResamplingData, w: &AdmissibleSet) -> Result<RegularGraph> {
    check_data(g, s)?;
    if w.flags.len() != s.mu {
        return Err(Error::BadParams("admissible set does not match the data".into()));
    }
    let mut out = g.clone();
    for alpha in w.indices() {
        let sw = switch_for(s, alpha);
        sw.check(&out)
            .map_err(|e| Error::InternalInconsistency(format!("admissible switch {alpha} is not simple: {e}")))?;
        sw.apply_in_place(&mut out);
    }
    Ok(out)
}

/// Resamples with the indicators evaluated at `r_param`; returns the new
/// graph, the data and the admissible set.
pub fn resample(
    g: &RegularGraph,
    o: usize,
    ell: usize,
    r_param: usize,
    seed: u64,
) -> Result<(RegularGraph, ResamplingData, AdmissibleSet)> {
    let s = propose_resampling(g, o, ell, seed)?;
    let w = admissible_set(g, &s, r_param)?;
    let out = apply_resampling(g, &s, &w)?;
    Ok((out, s, w))
}

/// Data `T(S)` for the switched graph: a switched pair `(l, a), (b, c)`
/// becomes `(l, c), (b, a)`, so switching it again restores `{l, a}, {b, c}`.
pub fn reversed_data(s: &ResamplingData, w: &AdmissibleSet) -> ResamplingData {
    let mut out = s.clone();
    for alpha in w.indices() {
        let (l, a) = s.boundary[alpha];
        let (b, c) = s.proposals[alpha];
        out.boundary[alpha] = (l, c);
        out.proposals[alpha] = (b, a);
    }
    out
}

/// Default `R = floor(log_{d-1}(n) / 4) * 4`, so `R / 4 >= 1` once
/// `n >= (d-1)^4`. Computed in integers to avoid rounding at exact powers.
pub fn default_r_param(d: usize, n: usize) -> usize {
    if d < 3 {
        return 0;
    }
    let step = (d - 1).pow(4);
    let (mut q, mut reach) = (0, step);
    while reach <= n {
        q += 1;
        reach = reach.saturating_mul(step);
    }
    q * 4
}

#[cfg(test)]
mod tests;

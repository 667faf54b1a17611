use std::collections::HashSet;

use super::*;
use crate::graph::fixtures::{cube, petersen};
use crate::graph::{ball, build_graph, excess};
use crate::sampler::{sample_regular, SamplerConfig};

fn cycle_with_diameters() -> RegularGraph {
    let mut edges: Vec<(usize, usize)> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
    edges.extend([(0, 3), (1, 4), (2, 5)]);
    build_graph(3, 6, &edges).unwrap()
}

fn edge_set(g: &RegularGraph) -> HashSet<(usize, usize)> {
    g.edges().into_iter().collect()
}

#[test]
fn switch_preserves_degrees_and_inverts() {
    let g = cycle_with_diameters();
    let s = SimpleSwitch::new((0, 1), (3, 4));
    let h = simple_switch(&g, s).unwrap();
    h.validate().unwrap();
    assert_eq!(h.edge_count(), g.edge_count());
    assert!(h.has_edge(0, 4) && h.has_edge(1, 3));
    assert!(!h.has_edge(0, 1) && !h.has_edge(3, 4));
    let diff: HashSet<_> = edge_set(&g).symmetric_difference(&edge_set(&h)).copied().collect();
    assert_eq!(diff.len(), 4);
    assert_eq!(simple_switch(&h, s.reversed()).unwrap(), g);
}

#[test]
fn switch_errors() {
    let g = cycle_with_diameters();
    assert!(matches!(
        simple_switch(&g, SimpleSwitch::new((0, 1), (2, 3))),
        Err(Error::WouldCreateMultiEdge { u: 0, v: 3 })
    ));
    assert!(matches!(
        simple_switch(&g, SimpleSwitch::new((0, 1), (1, 2))),
        Err(Error::VerticesNotDistinct)
    ));
    assert!(matches!(
        simple_switch(&g, SimpleSwitch::new((0, 2), (3, 4))),
        Err(Error::EdgeMissing { u: 0, v: 2 })
    ));
}

#[test]
fn boundary_counts() {
    assert_eq!(boundary_edges(&cube(), 0, 1).unwrap().len(), 6);
    let p = petersen();
    let b0 = boundary_edges(&p, 4, 0).unwrap();
    assert_eq!(b0, p.neighbors(4).iter().map(|&a| (4, a)).collect::<Vec<_>>());
    assert!(boundary_edges(&p, 10, 0).is_err());
    // tree-like vertices have d (d-1)^ell boundary edges
    let g = sample_regular(3, 2000, &SamplerConfig::default(), 4).unwrap();
    let mut checked = 0;
    for o in 0..50 {
        for ell in 0..3 {
            if excess(&ball(&g, &[o], ell + 1).unwrap()).excess == 0 {
                assert_eq!(boundary_edges(&g, o, ell).unwrap().len(), 3 * 2usize.pow(ell as u32));
                checked += 1;
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn proposals_outside_and_deterministic() {
    let g = sample_regular(3, 1000, &SamplerConfig::default(), 2).unwrap();
    let s = propose_resampling(&g, 5, 2, 99).unwrap();
    assert_eq!(s, propose_resampling(&g, 5, 2, 99).unwrap());
    assert_eq!(s.mu, boundary_edges(&g, 5, 2).unwrap().len());
    assert_eq!(s.proposals.len(), s.mu);
    for &(b, c) in &s.proposals {
        assert!(g.has_edge(b, c));
        assert!(!s.ball.contains(&b) && !s.ball.contains(&c));
    }
    for &(l, a) in &s.boundary {
        assert!(s.ball.contains(&l) && !s.ball.contains(&a));
    }
    let json = serde_json::to_string(&s).unwrap();
    let back: ResamplingData = serde_json::from_str(&json).unwrap();
    assert_eq!(back, s);
}

#[test]
fn proposal_marginal_is_uniform() {
    // Petersen, ell = 0: 12 outside edges, 24 orientations
    let g = petersen();
    let cells = outside_oriented(&g, &[0]);
    assert_eq!(cells.len(), 24);
    let draws = 100_000;
    let mut counts = [0u64; 24];
    for seed in 0..draws {
        let s = propose_resampling(&g, 0, 0, seed).unwrap();
        let k = cells.iter().position(|e| *e == s.proposals[0]).unwrap();
        counts[k] += 1;
    }
    let expect = draws as f64 / 24.0;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
    // 0.999 quantile of chi-square with 23 degrees of freedom
    assert!(chi2 < 49.728, "{chi2}");
}

fn data_with(g: &RegularGraph, o: usize, ell: usize, proposals: Vec<(usize, usize)>) -> ResamplingData {
    let mut s = propose_resampling(g, o, ell, 0).unwrap();
    s.proposals = proposals;
    s
}

#[test]
fn shared_vertices_kill_both() {
    let g = sample_regular(3, 500, &SamplerConfig::default(), 7).unwrap();
    let s0 = propose_resampling(&g, 0, 1, 3).unwrap();
    let mut props = s0.proposals.clone();
    props[1] = props[0];
    let s = data_with(&g, 0, 1, props);
    assert!(!admissibility(&g, &s, 0, 4).unwrap());
    assert!(!admissibility(&g, &s, 1, 4).unwrap());
    assert!(admissibility(&g, &s, s.mu, 4).is_err());
}

#[test]
fn cycle_near_proposal_is_inadmissible() {
    // proposal edge on a triangle: the new edge {a, b} closes nothing, but
    // the radius-1 neighborhood of {b, c} already contains the triangle
    let g = sample_regular(3, 400, &SamplerConfig::default(), 11).unwrap();
    let tri = g
        .edges()
        .into_iter()
        .find(|&(u, v)| u > 20 && v > 20 && g.neighbors(u).iter().any(|w| g.has_edge(*w, v)));
    let Some((b, c)) = tri else {
        return;
    };
    let s0 = propose_resampling(&g, 0, 0, 1).unwrap();
    let mut props = s0.proposals.clone();
    props[0] = (b, c);
    let s = data_with(&g, 0, 0, props);
    assert!(!admissibility(&g, &s, 0, 4).unwrap());
}

/// Picks proposal edges far from the ball, from each other and from any
/// short cycle.
fn far_proposals(g: &RegularGraph, s: &ResamplingData, sep: usize) -> Vec<(usize, usize)> {
    let mut taken: Vec<usize> = s.ball.clone();
    taken.extend(s.boundary.iter().map(|e| e.1));
    let mut out = Vec::new();
    for (b, c) in g.edges() {
        if out.len() == s.mu {
            break;
        }
        let near = bfs_within(g, &[b, c], sep, |_| false);
        if taken.iter().any(|v| near.contains_key(v)) {
            continue;
        }
        if excess(&ball(g, &[b, c], sep).unwrap()).excess > 0 {
            continue;
        }
        out.push((b, c));
        taken.extend([b, c]);
    }
    out
}

#[test]
fn far_apart_tree_like_proposals_are_all_admissible() {
    let g = sample_regular(3, 2000, &SamplerConfig::default(), 12).unwrap();
    let o = (0..g.n())
        .find(|&o| excess(&ball(&g, &[o], 4).unwrap()).excess == 0)
        .unwrap();
    let s0 = propose_resampling(&g, o, 1, 0).unwrap();
    let props = far_proposals(&g, &s0, 3);
    let s = data_with(&g, o, 1, props);
    let w = admissible_set(&g, &s, 4).unwrap();
    assert!(w.flags.iter().all(|f| *f), "{w:?}");
    for alpha in 0..s.mu {
        assert_eq!(w.flags[alpha], admissibility(&g, &s, alpha, 4).unwrap());
    }
    let h = apply_resampling(&g, &s, &w).unwrap();
    h.validate().unwrap();
    let diff = edge_set(&g).symmetric_difference(&edge_set(&h)).count();
    assert_eq!(diff, 4 * s.mu);
}

#[test]
fn empty_admissible_set_is_identity() {
    let g = sample_regular(3, 300, &SamplerConfig::default(), 5).unwrap();
    let s0 = propose_resampling(&g, 0, 1, 0).unwrap();
    let same = vec![s0.proposals[0]; s0.mu];
    let s = data_with(&g, 0, 1, same);
    let w = admissible_set(&g, &s, 4).unwrap();
    assert_eq!(w.count(), 0);
    assert_eq!(apply_resampling(&g, &s, &w).unwrap(), g);
}

#[test]
fn single_switch_changes_two_edges() {
    let g = sample_regular(3, 2000, &SamplerConfig::default(), 13).unwrap();
    let s0 = propose_resampling(&g, 0, 1, 0).unwrap();
    let props = far_proposals(&g, &s0, 2);
    let s = data_with(&g, 0, 1, props);
    let mut w = admissible_set(&g, &s, 4).unwrap();
    let first = w.indices()[0];
    for (i, f) in w.flags.iter_mut().enumerate() {
        *f = *f && i == first;
    }
    let h = apply_resampling(&g, &s, &w).unwrap();
    let removed = edge_set(&g).difference(&edge_set(&h)).count();
    assert_eq!(removed, 2);
}

#[test]
fn full_resampling_and_reversal() {
    for seed in 0..20 {
        let g = sample_regular(3, 1000, &SamplerConfig::default(), seed).unwrap();
        let (h, s, w) = resample(&g, 3, 2, 8, seed + 100).unwrap();
        h.validate().unwrap();
        let diff = edge_set(&g).symmetric_difference(&edge_set(&h)).count();
        assert_eq!(diff, 4 * w.count());
        let back = reversed_data(&s, &w);
        let w2 = admissible_set(&h, &back, 8).unwrap();
        assert_eq!(w2, w);
        assert_eq!(apply_resampling(&h, &back, &w2).unwrap(), g);
    }
}

#[test]
fn small_radius_reversal_on_tiny_graphs() {
    // R / 4 = 0 on 8 vertices: admissibility reduces to disjoint triples
    // with no extra edge among {a, b, c}
    for seed in 0..300 {
        let g = sample_regular(3, 8, &SamplerConfig::default(), seed).unwrap();
        let (h, s, w) = resample(&g, 0, 0, 0, seed).unwrap();
        h.validate().unwrap();
        let back = reversed_data(&s, &w);
        let w2 = admissible_set(&h, &back, 0).unwrap();
        assert_eq!(w2, w);
        assert_eq!(apply_resampling(&h, &back, &w2).unwrap(), g);
    }
}

#[test]
fn default_radius() {
    assert_eq!(default_r_param(3, 8), 0);
    assert_eq!(default_r_param(3, 16), 4);
    assert_eq!(default_r_param(3, 1000), 8);
    assert_eq!(default_r_param(4, 81), 4);
}

#[test]
fn single_state_is_trivially_symmetric() {
    let r = reversibility_estimate(3, 4, 0, 0, 2000, 1).unwrap();
    assert_eq!(r.distinct_states, 1);
    assert_eq!(r.pairs_tested, 0);
    assert!(r.pass);
    assert!(reversibility_estimate(3, 40, 0, 0, 10, 1).is_err());
}

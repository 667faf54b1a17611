//! Sampling random d-regular graphs and constrained GOE matrices.
//!
//! Two graph samplers are provided:
//!
//! * `PairingRejection`: the configuration model. Stubs are matched
//!   uniformly and the matching is rejected as soon as it produces a loop
//!   or a repeated edge. Conditioned on acceptance the output is exactly
//!   uniform over simple d-regular graphs. Acceptance decays like
//!   `exp(-(d^2 - 1) / 4)`, so this is the default only for `d <= 5`.
//! * `SwitchChain`: double-edge swaps started from a circulant graph. Each
//!   step picks two uniformly random oriented edges `(a, b)`, `(c, e)` and
//!   replaces them by `{a, e}`, `{c, b}` unless that breaks simplicity.
//!   The chain is symmetric, hence its stationary law is uniform; after a
//!   finite burn-in the output is only approximately uniform.

mod goe;
mod seed;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{fixtures::circulant, RegularGraph};

pub use goe::{constrained_goe_covariance, sample_constrained_goe, sample_goe, ConstrainedGoeMatrix};
pub use seed::{derive_seed, rng_from_seed, splitmix64, Rng, SeedStream, RNG_ALGORITHM};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMethod {
    PairingRejection,
    SwitchChain,
}

impl std::str::FromStr for SamplingMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pairing" | "pairing_rejection" => Ok(Self::PairingRejection),
            "switch" | "switch_chain" => Ok(Self::SwitchChain),
            other => Err(Error::BadParams(format!("unknown sampling method {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub method: SamplingMethod,
    pub max_rejections: usize,
    /// Switch-chain steps are `burn_in_multiplier * n d ln(n d)`.
    pub burn_in_multiplier: f64,
}

impl SamplerConfig {
    /// Pairing model for `d <= 5`, switch chain above.
    pub fn for_degree(d: usize) -> Self {
        let method = if d <= 5 {
            SamplingMethod::PairingRejection
        } else {
            SamplingMethod::SwitchChain
        };
        Self {
            method,
            ..Self::default()
        }
    }

    pub fn with_method(mut self, method: SamplingMethod) -> Self {
        self.method = method;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.max_rejections < 1 {
            return Err(Error::BadParams("max_rejections must be >= 1".into()));
        }
        if !(self.burn_in_multiplier > 0.0) {
            return Err(Error::BadParams("burn_in_multiplier must be > 0".into()));
        }
        Ok(())
    }
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            method: SamplingMethod::PairingRejection,
            max_rejections: 100_000,
            burn_in_multiplier: 10.0,
        }
    }
}

/// What a sampler did, for experiment provenance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleInfo {
    pub method: SamplingMethod,
    pub seed: u64,
    /// Rejected pairings (pairing model).
    pub rejections: usize,
    /// Proposed swaps (switch chain).
    pub switch_steps: usize,
    pub accepted_switches: usize,
}

fn check_params(d: usize, n: usize) -> Result<()> {
    if d < 3 {
        return Err(Error::BadParams(format!("degree must be >= 3, got {d}")));
    }
    if n <= d {
        return Err(Error::BadParams(format!("need n > d (n={n}, d={d})")));
    }
    if !(n * d).is_multiple_of(2) {
        return Err(Error::BadParams(format!("n*d must be even (n={n}, d={d})")));
    }
    Ok(())
}

pub fn sample_regular(d: usize, n: usize, cfg: &SamplerConfig, seed: u64) -> Result<RegularGraph> {
    sample_regular_with_info(d, n, cfg, seed).map(|(g, _)| g)
}

pub fn sample_regular_with_info(
    d: usize,
    n: usize,
    cfg: &SamplerConfig,
    seed: u64,
) -> Result<(RegularGraph, SampleInfo)> {
    check_params(d, n)?;
    cfg.validate()?;
    let mut rng = rng_from_seed(seed);
    let mut info = SampleInfo {
        method: cfg.method,
        seed,
        rejections: 0,
        switch_steps: 0,
        accepted_switches: 0,
    };
    let g = match cfg.method {
        SamplingMethod::PairingRejection => {
            let (g, rejections) = pairing_rejection(d, n, cfg.max_rejections, &mut rng)?;
            info.rejections = rejections;
            g
        }
        SamplingMethod::SwitchChain => {
            let nd = (n * d) as f64;
            let steps = (cfg.burn_in_multiplier * nd * nd.ln()).ceil() as usize;
            let (g, accepted) = switch_chain(circulant(d, n), steps, &mut rng);
            info.switch_steps = steps;
            info.accepted_switches = accepted;
            g
        }
    };
    Ok((g, info))
}

/// One attempt of the configuration model; `None` on a loop or repeated edge.
fn pairing_attempt(d: usize, n: usize, stubs: &mut [usize], rng: &mut Rng) -> Option<Vec<Vec<usize>>> {
    let mut rows: Vec<Vec<usize>> = vec![Vec::with_capacity(d); n];
    let total = stubs.len();
    let mut i = 0;
    while i < total {
        // pair stubs[i] with a uniform stub among the unpaired tail
        let j = rng.random_range(i + 1..total);
        stubs.swap(i + 1, j);
        let (u, v) = (stubs[i], stubs[i + 1]);
        if u == v || rows[u].contains(&v) {
            return None;
        }
        rows[u].push(v);
        rows[v].push(u);
        i += 2;
    }
    Some(rows)
}

fn pairing_rejection(d: usize, n: usize, max_rejections: usize, rng: &mut Rng) -> Result<(RegularGraph, usize)> {
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    for attempt in 0..max_rejections {
        if let Some(rows) = pairing_attempt(d, n, &mut stubs, rng) {
            return Ok((RegularGraph::from_rows_unchecked(d, rows), attempt));
        }
    }
    Err(Error::RejectionBudgetExceeded {
        attempts: max_rejections,
    })
}

/// Runs `steps` proposals of the double-edge-swap chain; returns the final
/// graph and the number of accepted swaps.
pub fn switch_chain(start: RegularGraph, steps: usize, rng: &mut Rng) -> (RegularGraph, usize) {
    let d = start.d();
    let mut edges = start.edges();
    let mut rows: Vec<Vec<usize>> = (0..start.n()).map(|v| start.neighbors(v).to_vec()).collect();
    let m = edges.len();
    let mut accepted = 0;
    for _ in 0..steps {
        let i = rng.random_range(0..m);
        let j = rng.random_range(0..m);
        if i == j {
            continue;
        }
        let (mut a, mut b) = edges[i];
        if rng.random::<bool>() {
            std::mem::swap(&mut a, &mut b);
        }
        let (mut c, mut e) = edges[j];
        if rng.random::<bool>() {
            std::mem::swap(&mut c, &mut e);
        }
        // {a,b},{c,e} -> {a,e},{c,b}
        if a == c || a == e || b == c || b == e {
            continue;
        }
        if rows[a].contains(&e) || rows[c].contains(&b) {
            continue;
        }
        replace(&mut rows[a], b, e);
        replace(&mut rows[b], a, c);
        replace(&mut rows[c], e, b);
        replace(&mut rows[e], c, a);
        edges[i] = (a.min(e), a.max(e));
        edges[j] = (c.min(b), c.max(b));
        accepted += 1;
    }
    (RegularGraph::from_rows_unchecked(d, rows), accepted)
}

fn replace(row: &mut [usize], old: usize, new: usize) {
    let pos = row.iter().position(|&x| x == old).expect("neighbor present");
    row[pos] = new;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::k4;

    #[test]
    fn k4_is_the_only_cubic_graph_on_four_vertices() {
        for seed in 0..20 {
            for method in [SamplingMethod::PairingRejection, SamplingMethod::SwitchChain] {
                let cfg = SamplerConfig::default().with_method(method);
                assert_eq!(sample_regular(3, 4, &cfg, seed).unwrap(), k4());
            }
        }
    }

    #[test]
    fn outputs_validate() {
        for (d, n) in [(3, 50), (4, 31 * 2), (5, 40), (7, 30)] {
            let cfg = SamplerConfig::for_degree(d);
            let g = sample_regular(d, n, &cfg, 3).unwrap();
            g.validate().unwrap();
        }
    }

    #[test]
    fn pairing_budget_exhausts_for_large_degree() {
        let cfg = SamplerConfig {
            max_rejections: 2_000,
            ..SamplerConfig::default()
        };
        assert!(matches!(
            sample_regular(8, 100, &cfg, 1),
            Err(Error::RejectionBudgetExceeded { .. })
        ));
        let g = sample_regular(8, 100, &SamplerConfig::for_degree(8), 1).unwrap();
        g.validate().unwrap();
    }

    #[test]
    fn bad_params() {
        let cfg = SamplerConfig::default();
        assert!(sample_regular(2, 10, &cfg, 0).is_err());
        assert!(sample_regular(3, 3, &cfg, 0).is_err());
        assert!(sample_regular(3, 7, &cfg, 0).is_err());
        let bad = SamplerConfig {
            max_rejections: 0,
            ..cfg
        };
        assert!(sample_regular(3, 8, &bad, 0).is_err());
    }

    #[test]
    fn same_seed_same_graph() {
        let cfg = SamplerConfig::default();
        assert_eq!(
            sample_regular(3, 200, &cfg, 77).unwrap(),
            sample_regular(3, 200, &cfg, 77).unwrap()
        );
        assert_ne!(
            sample_regular(3, 200, &cfg, 77).unwrap(),
            sample_regular(3, 200, &cfg, 78).unwrap()
        );
    }
}

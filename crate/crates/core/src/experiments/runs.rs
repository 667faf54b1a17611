use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::stats::{correlation, ks_distance, mean, sem, variance, wilson_interval, Histogram, Z95};
use super::{run_trials, values, ExperimentConfig, Provenance, Summary, SummaryReport, TrialRecord};
use crate::error::{Error, Result};
use crate::graph::RegularGraph;
use crate::green_tree::local_law_grid;
use crate::laws::{classical_locations, edge_constant, edge_location, free_conv_m, m_d_unchecked, tw1_cdf, tw1_mean};
use crate::sampler::{sample_constrained_goe, sample_goe, sample_regular, SeedStream};
use crate::spectral::{
    extreme_eigs, full_spectrum_capped, is_ramanujan, normalized_adjacency, stieltjes, stieltjes_derivative,
    symmetric_eigen,
};

/// Pass thresholds. The asymptotic statements carry unquantified
/// constants, so these are finite-size bands, stored next to the
/// asymptotic targets in every report.
pub struct Thresholds;

impl Thresholds {
    pub const RIGIDITY_MAX: f64 = 15.0;
    pub const RIGIDITY_FRACTION: f64 = 0.9;
    pub const EDGE_KS: f64 = 0.2;
    pub const EDGE_MEAN_LO: f64 = -2.2;
    pub const EDGE_MEAN_HI: f64 = -0.2;
    pub const RAMANUJAN_LO: f64 = 0.52;
    pub const RAMANUJAN_HI: f64 = 0.88;
    pub const RAMANUJAN_TARGET: f64 = 0.69;
    pub const TRIVIAL_EIG: f64 = 1e-10;
    pub const STIELTJES_ERR: f64 = 0.05;
    pub const LOCAL_M: f64 = 0.05;
    pub const LOCAL_Q: f64 = 0.05;
    pub const LOCAL_TREE: f64 = 0.1;
    pub const LOCAL_FRACTION: f64 = 0.9;
    pub const LOOP_SEMS: f64 = 3.0;
    pub const MIN_EDGE_TRIALS: usize = 100;
}

fn sub_seed(seed: u64, k: u64) -> u64 {
    SeedStream::new(seed).derive(k)
}

fn sample_graph(cfg: &ExperimentConfig, seed: u64) -> Result<RegularGraph> {
    sample_regular(cfg.d, cfg.n, &cfg.sampler(), sub_seed(seed, 0))
}

fn report(
    name: &str,
    cfg: &ExperimentConfig,
    trials: Vec<TrialRecord>,
    summary: Summary,
    sampled_graphs: bool,
    tolerances: BTreeMap<String, f64>,
) -> SummaryReport {
    let mut provenance = Provenance::new(cfg, sampled_graphs.then(|| cfg.sampler()));
    provenance.tolerances = tolerances;
    SummaryReport {
        experiment: name.to_string(),
        params: cfg.clone(),
        seed: cfg.seed,
        trials,
        summary,
        provenance,
    }
}

fn lanczos_tolerances() -> BTreeMap<String, f64> {
    values([("lanczos_ritz_residual", 1e-10)])
}

fn fraction(flags: &[f64]) -> f64 {
    flags.iter().filter(|&&f| f > 0.5).count() as f64 / flags.len() as f64
}

fn column(trials: &[TrialRecord], key: &str) -> Vec<f64> {
    trials.iter().map(|t| t.values[key]).collect()
}

/// Per trial: `max_{2 <= i <= N} N^{2/3} min(i, N-i+1)^{1/3} |lambda_i - gamma_i|`
/// and its argmax; `lambda_1` is checked separately.
pub fn rigidity_experiment(cfg: &ExperimentConfig) -> Result<SummaryReport> {
    cfg.validate()?;
    let (d, n) = (cfg.d, cfg.n);
    let gamma = classical_locations(d, n)?;
    let nf = n as f64;
    let trivial = d as f64 / ((d - 1) as f64).sqrt();
    let trials = run_trials(cfg, |_, seed| {
        let g = sample_graph(cfg, seed)?;
        let spec = full_spectrum_capped(&normalized_adjacency(&g), false, cfg.dense_cap)?;
        let lam = &spec.eigenvalues;
        let (mut best, mut arg) = (0.0f64, 2usize);
        let mut bulk: f64 = 0.0;
        for i in 2..=n {
            let dev = (lam[i - 1] - gamma[i - 2]).abs();
            let s = nf.powf(2.0 / 3.0) * (i.min(n - i + 1) as f64).cbrt() * dev;
            if s > best {
                best = s;
                arg = i;
            }
            if 4 * i >= n && 4 * i <= 3 * n {
                bulk = bulk.max(dev);
            }
        }
        Ok(values([
            ("max_scaled_deviation", best),
            ("argmax_index", arg as f64),
            ("bulk_deviation_over_n_pow", bulk * nf / nf.powf(0.1)),
            ("lambda1_deviation", (lam[0] - trivial).abs()),
            ("within", if best <= Thresholds::RIGIDITY_MAX { 1.0 } else { 0.0 }),
        ]))
    })?;
    let scaled = column(&trials, "max_scaled_deviation");
    let frac = fraction(&column(&trials, "within"));
    let l1 = column(&trials, "lambda1_deviation").into_iter().fold(0.0, f64::max);
    let summary = Summary {
        metrics: values([
            ("fraction_within", frac),
            ("mean_max_scaled_deviation", mean(&scaled)),
            ("variance_max_scaled_deviation", variance(&scaled)),
            ("max_lambda1_deviation", l1),
        ]),
        thresholds: values([
            ("max_scaled_deviation", Thresholds::RIGIDITY_MAX),
            ("required_fraction", Thresholds::RIGIDITY_FRACTION),
        ]),
        histogram: Some(Histogram::new(&scaled, 0.0, 30.0, 30)),
        pass: frac >= Thresholds::RIGIDITY_FRACTION && l1 <= Thresholds::TRIVIAL_EIG,
    };
    Ok(report("rigidity", cfg, trials, summary, true, BTreeMap::new()))
}

/// `(A N)^{2/3} (lambda_2 - 2)` and `(A N)^{2/3} (-lambda_N - 2)` against
/// the Tracy-Widom (beta = 1) law.
pub fn edge_universality_experiment(cfg: &ExperimentConfig) -> Result<SummaryReport> {
    cfg.validate()?;
    if cfg.trials < Thresholds::MIN_EDGE_TRIALS {
        return Err(Error::BadParams(format!(
            "edge statistics need at least {} trials",
            Thresholds::MIN_EDGE_TRIALS
        )));
    }
    let scale = (edge_constant(cfg.d) * cfg.n as f64).powf(2.0 / 3.0);
    let trials = run_trials(cfg, |_, seed| {
        let g = sample_graph(cfg, seed)?;
        let e = extreme_eigs(&normalized_adjacency(&g), 1, sub_seed(seed, 1))?;
        let (l2, ln) = (e.top[0], e.bottom[0]);
        Ok(values([
            ("lambda_2", l2),
            ("lambda_n", ln),
            ("rescaled_lambda_2", scale * (l2 - 2.0)),
            ("rescaled_neg_lambda_n", scale * (-ln - 2.0)),
        ]))
    })?;
    let s2 = column(&trials, "rescaled_lambda_2");
    let sn = column(&trials, "rescaled_neg_lambda_n");
    let ks2 = ks_distance(&s2, tw1_cdf)?;
    let ksn = ks_distance(&sn, tw1_cdf)?;
    let (m2, mn) = (mean(&s2), mean(&sn));
    let in_band = |m: f64| (Thresholds::EDGE_MEAN_LO..=Thresholds::EDGE_MEAN_HI).contains(&m);
    let summary = Summary {
        metrics: values([
            ("ks_lambda_2", ks2),
            ("ks_neg_lambda_n", ksn),
            ("mean_lambda_2", m2),
            ("mean_neg_lambda_n", mn),
            ("variance_lambda_2", variance(&s2)),
            ("variance_neg_lambda_n", variance(&sn)),
            ("correlation", correlation(&s2, &sn)),
        ]),
        thresholds: values([
            ("ks_max", Thresholds::EDGE_KS),
            ("mean_lo", Thresholds::EDGE_MEAN_LO),
            ("mean_hi", Thresholds::EDGE_MEAN_HI),
            ("tw1_mean_target", tw1_mean()),
        ]),
        histogram: Some(Histogram::new(&s2, -6.0, 4.0, 40)),
        pass: ks2 <= Thresholds::EDGE_KS && ksn <= Thresholds::EDGE_KS && in_band(m2) && in_band(mn),
    };
    Ok(report(
        "edge_universality",
        cfg,
        trials,
        summary,
        true,
        lanczos_tolerances(),
    ))
}

/// Fraction of sampled graphs with `max(lambda_2, |lambda_N|) <= 2` and
/// its 95% Wilson interval.
pub fn ramanujan_fraction(cfg: &ExperimentConfig) -> Result<SummaryReport> {
    cfg.validate()?;
    if cfg.trials < Thresholds::MIN_EDGE_TRIALS {
        return Err(Error::BadParams(format!(
            "the Ramanujan fraction needs at least {} trials",
            Thresholds::MIN_EDGE_TRIALS
        )));
    }
    let trials = run_trials(cfg, |_, seed| {
        let g = sample_graph(cfg, seed)?;
        let e = extreme_eigs(&normalized_adjacency(&g), 1, sub_seed(seed, 1))?;
        let (l2, ln) = (e.top[0], e.bottom[0]);
        let ok = is_ramanujan(l2, ln);
        Ok(values([
            ("lambda_2", l2),
            ("lambda_n", ln),
            ("ramanujan", if ok { 1.0 } else { 0.0 }),
        ]))
    })?;
    let flags = column(&trials, "ramanujan");
    let hits = flags.iter().filter(|&&f| f > 0.5).count();
    let frac = hits as f64 / flags.len() as f64;
    let (lo, hi) = wilson_interval(hits, flags.len(), Z95);
    let summary = Summary {
        metrics: values([("fraction", frac), ("ci95_lo", lo), ("ci95_hi", hi)]),
        thresholds: values([
            ("fraction_lo", Thresholds::RAMANUJAN_LO),
            ("fraction_hi", Thresholds::RAMANUJAN_HI),
            ("asymptotic_target", Thresholds::RAMANUJAN_TARGET),
        ]),
        histogram: None,
        pass: (Thresholds::RAMANUJAN_LO..=Thresholds::RAMANUJAN_HI).contains(&frac),
    };
    Ok(report(
        "ramanujan_fraction",
        cfg,
        trials,
        summary,
        true,
        lanczos_tolerances(),
    ))
}

/// Spectrum of `H(t) = H + sqrt(t) Z`: the trivial eigenvalue, the
/// Stieltjes transform against `m_d(z_t)` on the z grid, the largest
/// nontrivial eigenvalue against `E_t`, and eigenvector delocalization.
pub fn gaussian_divisible_experiment(cfg: &ExperimentConfig) -> Result<SummaryReport> {
    cfg.validate()?;
    let (d, n, t) = (cfg.d, cfg.n, cfg.t);
    if n > cfg.dense_cap {
        return Err(Error::DenseCapExceeded { n, cap: cfg.dense_cap });
    }
    let trivial = d as f64 / ((d - 1) as f64).sqrt();
    let edge = if t > 0.0 { edge_location(d, t)?.e_t } else { 2.0 };
    let targets: Vec<Complex64> = cfg
        .z_grid
        .iter()
        .map(|&z| {
            Ok(if t > 0.0 {
                m_d_unchecked(d, free_conv_m(d, z, t)?.z_t)
            } else {
                m_d_unchecked(d, z)
            })
        })
        .collect::<Result<_>>()?;
    let trials = run_trials(cfg, |_, seed| {
        let g = sample_graph(cfg, seed)?;
        let mut h = normalized_adjacency(&g).dense();
        if t > 0.0 {
            h += sample_constrained_goe(n, sub_seed(seed, 2))?.entries * t.sqrt();
        }
        let spec = symmetric_eigen(&h, true)?;
        let lam = &spec.eigenvalues;
        let k = (0..n)
            .min_by(|&a, &b| (lam[a] - trivial).abs().total_cmp(&(lam[b] - trivial).abs()))
            .expect("n >= 1");
        let top = (0..n)
            .filter(|&i| i != k)
            .map(|i| lam[i])
            .fold(f64::NEG_INFINITY, f64::max);
        let m_err = cfg
            .z_grid
            .iter()
            .zip(&targets)
            .map(|(&z, &m)| (stieltjes(lam, z) - m).norm())
            .fold(0.0, f64::max);
        let u = spec.eigenvectors.as_ref().expect("vectors requested");
        let deloc = u
            .column_iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, c)| c.iter().fold(0.0f64, |m, x| m.max(x * x)))
            .fold(0.0, f64::max);
        Ok(values([
            ("trivial_deviation", (lam[k] - trivial).abs()),
            ("trivial_is_largest", if k == 0 { 1.0 } else { 0.0 }),
            ("top_nontrivial", top),
            ("edge_gap", top - edge),
            ("max_stieltjes_error", m_err),
            ("delocalization", deloc),
        ]))
    })?;
    let triv = column(&trials, "trivial_deviation").into_iter().fold(0.0, f64::max);
    let merr = column(&trials, "max_stieltjes_error").into_iter().fold(0.0, f64::max);
    let gaps = column(&trials, "edge_gap");
    let summary = Summary {
        metrics: values([
            ("max_trivial_deviation", triv),
            ("max_stieltjes_error", merr),
            ("mean_edge_gap", mean(&gaps)),
            ("edge_location", edge),
            (
                "max_delocalization",
                column(&trials, "delocalization").into_iter().fold(0.0, f64::max),
            ),
        ]),
        thresholds: values([
            ("trivial_deviation", Thresholds::TRIVIAL_EIG),
            ("stieltjes_error", Thresholds::STIELTJES_ERR),
        ]),
        histogram: None,
        pass: triv <= Thresholds::TRIVIAL_EIG && merr <= Thresholds::STIELTJES_ERR,
    };
    Ok(report(
        "gaussian_divisible",
        cfg,
        trials,
        summary,
        true,
        BTreeMap::new(),
    ))
}

/// Local-law errors on the z grid. A trial passes when every grid point
/// meets all three bands.
pub fn local_law_experiment(cfg: &ExperimentConfig) -> Result<SummaryReport> {
    cfg.validate()?;
    if cfg.n > cfg.dense_cap {
        return Err(Error::DenseCapExceeded {
            n: cfg.n,
            cap: cfg.dense_cap,
        });
    }
    let trials = run_trials(cfg, |_, seed| {
        let g = sample_graph(cfg, seed)?;
        let reps = local_law_grid(&g, &cfg.z_grid, cfg.t, cfg.radius, sub_seed(seed, 3))?;
        let worst = |f: fn(&crate::green_tree::LocalLawReport) -> f64| reps.iter().map(f).fold(0.0, f64::max);
        let (m, q, tree) = (worst(|r| r.m_err), worst(|r| r.q_err), worst(|r| r.max_tree_err));
        let ok = m <= Thresholds::LOCAL_M && q <= Thresholds::LOCAL_Q && tree <= Thresholds::LOCAL_TREE;
        Ok(values([
            ("m_err", m),
            ("q_err", q),
            ("max_tree_err", tree),
            ("within", if ok { 1.0 } else { 0.0 }),
        ]))
    })?;
    let frac = fraction(&column(&trials, "within"));
    let max_of = |k: &str| column(&trials, k).into_iter().fold(0.0, f64::max);
    let summary = Summary {
        metrics: values([
            ("fraction_within", frac),
            ("max_m_err", max_of("m_err")),
            ("max_q_err", max_of("q_err")),
            ("max_tree_err", max_of("max_tree_err")),
        ]),
        thresholds: values([
            ("m_err", Thresholds::LOCAL_M),
            ("q_err", Thresholds::LOCAL_Q),
            ("tree_err", Thresholds::LOCAL_TREE),
            ("required_fraction", Thresholds::LOCAL_FRACTION),
        ]),
        histogram: None,
        pass: frac >= Thresholds::LOCAL_FRACTION,
    };
    Ok(report("local_law", cfg, trials, summary, true, BTreeMap::new()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopEnsemble {
    /// `s^2 + z s + 1 + s' / N` for the GOE.
    Goe,
    /// `(m_N - m_d)^2 + 2 A sqrt(z - 2) (m_N - m_d) + m_N' / N` for the
    /// normalized adjacency of a random regular graph.
    RrgEdge,
}

impl std::str::FromStr for LoopEnsemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "goe" => Ok(Self::Goe),
            "rrg_edge" | "rrg-edge" => Ok(Self::RrgEdge),
            other => Err(Error::BadParams(format!("unknown ensemble {other:?}"))),
        }
    }
}

/// The first-order loop-equation bracket evaluated on one spectrum.
pub fn loop_bracket(ensemble: LoopEnsemble, d: usize, eigenvalues: &[f64], z: Complex64) -> Complex64 {
    let n = eigenvalues.len() as f64;
    let s = stieltjes(eigenvalues, z);
    let ds = stieltjes_derivative(eigenvalues, z);
    match ensemble {
        LoopEnsemble::Goe => s * s + z * s + 1.0 + ds / n,
        LoopEnsemble::RrgEdge => {
            let diff = s - m_d_unchecked(d, z);
            diff * diff + 2.0 * edge_constant(d) * (z - 2.0).sqrt() * diff + ds / n
        }
    }
}

/// Monte Carlo mean of the loop bracket with its standard error
/// `sqrt((var Re + var Im) / trials)`. The GOE bracket has mean zero
/// exactly; the graph bracket is compared with `N^{-2/3}`.
pub fn loop_equation_check(cfg: &ExperimentConfig, ensemble: LoopEnsemble, z: Complex64) -> Result<SummaryReport> {
    cfg.validate()?;
    if !(z.im > 0.0) {
        return Err(Error::BadParams(format!("loop equations need Im z > 0, got {z}")));
    }
    if ensemble == LoopEnsemble::RrgEdge && cfg.n > cfg.dense_cap {
        return Err(Error::DenseCapExceeded {
            n: cfg.n,
            cap: cfg.dense_cap,
        });
    }
    let trials = run_trials(cfg, |_, seed| {
        let lam = match ensemble {
            LoopEnsemble::Goe => symmetric_eigen(&sample_goe(cfg.n, sub_seed(seed, 4))?, false)?.eigenvalues,
            LoopEnsemble::RrgEdge => {
                let g = sample_graph(cfg, seed)?;
                full_spectrum_capped(&normalized_adjacency(&g), false, cfg.dense_cap)?.eigenvalues
            }
        };
        let b = loop_bracket(ensemble, cfg.d, &lam, z);
        Ok(values([("bracket_re", b.re), ("bracket_im", b.im)]))
    })?;
    let re = column(&trials, "bracket_re");
    let im = column(&trials, "bracket_im");
    let est = Complex64::new(mean(&re), mean(&im));
    let err = (sem(&re).powi(2) + sem(&im).powi(2)).sqrt();
    let scale = (cfg.n as f64).powf(-2.0 / 3.0);
    let pass = match ensemble {
        LoopEnsemble::Goe => est.norm() <= Thresholds::LOOP_SEMS * err,
        LoopEnsemble::RrgEdge => est.norm() <= scale,
    };
    let summary = Summary {
        metrics: values([
            ("estimate_re", est.re),
            ("estimate_im", est.im),
            ("estimate_abs", est.norm()),
            ("sem", err),
            ("abs_over_sem", est.norm() / err),
            ("n_pow_minus_two_thirds", scale),
        ]),
        thresholds: values([("sems", Thresholds::LOOP_SEMS)]),
        histogram: None,
        pass,
    };
    let name = match ensemble {
        LoopEnsemble::Goe => "loop_equation_goe",
        LoopEnsemble::RrgEdge => "loop_equation_rrg_edge",
    };
    Ok(report(
        name,
        cfg,
        trials,
        summary,
        ensemble == LoopEnsemble::RrgEdge,
        BTreeMap::new(),
    ))
}

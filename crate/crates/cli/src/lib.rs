//! `ramanujan-lab`: sample graphs, compute spectra and run the
//! experiments from the command line.
//!
//! Exit codes: 0 success with every threshold met, 1 a threshold failed,
//! 2 usage or runtime error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use ramanujan_core::experiments::{
    edge_universality_experiment, local_law_experiment, loop_equation_check, ramanujan_fraction, rigidity_experiment,
    ExperimentConfig, LoopEnsemble, ReportFormat, SummaryReport,
};
use ramanujan_core::graph::{read_rrg1, write_rrg1};
use ramanujan_core::laws::{edge_location, free_conv_m};
use ramanujan_core::resampling::{default_r_param, resample};
use ramanujan_core::sampler::{sample_regular, SamplerConfig, SamplingMethod};
use ramanujan_core::spectral::{full_spectrum, normalized_adjacency, woodbury_suite, IdentityResiduals};
use ramanujan_core::{Complex64, Error, RegularGraph};

/// Residual bound for the exact identities.
const IDENTITY_TOL: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(name = "ramanujan-lab", version, about = "Spectra of random d-regular graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a random d-regular graph and write it in RRG1 format.
    Sample(Opts),
    /// Normalized spectrum of a graph (CSV `index,lambda` by default).
    Spectrum(Opts),
    /// Eigenvalue rigidity against the classical locations.
    Rigidity(Opts),
    /// Edge statistics of lambda_2 and lambda_N against Tracy-Widom.
    Edge(Opts),
    /// Fraction of Ramanujan graphs.
    Ramanujan(Opts),
    /// Local laws for the resolvent at one spectral parameter.
    Locallaw(Opts),
    /// Local resampling around vertex 0 plus the Woodbury identities.
    Switch(Opts),
    /// Free convolution with a semicircle: fixed point and spectral edge.
    Freeconv(Opts),
    /// First-order loop equations (`--method goe` or `--method rrg_edge`).
    Loopcheck(Opts),
    /// Exact resolvent identities on one graph.
    Identities(Opts),
}

#[derive(Args, Debug, Default, Clone)]
struct Opts {
    /// Degree.
    #[arg(long)]
    d: Option<usize>,
    /// Number of vertices.
    #[arg(long)]
    n: Option<usize>,
    /// Monte Carlo trials.
    #[arg(long)]
    trials: Option<usize>,
    /// Master seed; determines all randomness.
    #[arg(long)]
    seed: Option<u64>,
    /// Resampling radius.
    #[arg(long)]
    ell: Option<usize>,
    /// Ball radius for local extensions (locallaw) or admissibility
    /// radius (switch).
    #[arg(long)]
    radius: Option<usize>,
    /// Gaussian-divisible time.
    #[arg(long)]
    t: Option<f64>,
    /// Real part of the spectral parameter.
    #[arg(long, allow_hyphen_values = true)]
    z_re: Option<f64>,
    /// Imaginary part of the spectral parameter.
    #[arg(long)]
    z_im: Option<f64>,
    /// Input graph in RRG1 format.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Output file (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// `json` or `csv`.
    #[arg(long)]
    format: Option<String>,
    /// Worker threads for trial parallelism; results do not depend on it.
    #[arg(long)]
    jobs: Option<usize>,
    /// Graph sampler (`pairing` or `switch`); for loopcheck the ensemble
    /// (`goe` or `rrg_edge`).
    #[arg(long)]
    method: Option<String>,
    /// JSON file with default values for any of the flags above; flags
    /// given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Keys accepted in a `--config` file.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    d: Option<usize>,
    n: Option<usize>,
    trials: Option<usize>,
    seed: Option<u64>,
    ell: Option<usize>,
    radius: Option<usize>,
    t: Option<f64>,
    z_re: Option<f64>,
    z_im: Option<f64>,
    #[serde(rename = "in")]
    input: Option<PathBuf>,
    out: Option<PathBuf>,
    format: Option<String>,
    jobs: Option<usize>,
    method: Option<String>,
}

/// Flags after merging the config file, with the values actually used.
#[derive(Serialize, Debug, Clone)]
struct Resolved {
    command: String,
    d: usize,
    n: usize,
    trials: usize,
    seed: u64,
    ell: usize,
    radius: Option<usize>,
    t: f64,
    z_re: Option<f64>,
    z_im: Option<f64>,
    input: Option<PathBuf>,
    out: Option<PathBuf>,
    format: Option<String>,
    jobs: Option<usize>,
    method: Option<String>,
}

enum Failure {
    Usage(String),
    Threshold(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn merge(name: &str, o: Opts) -> std::result::Result<Resolved, Failure> {
    let file = match &o.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            serde_json::from_str::<FileConfig>(&text)
                .map_err(|e| Failure::Usage(format!("bad config {}: {e}", p.display())))?
        }
        None => FileConfig::default(),
    };
    Ok(Resolved {
        command: name.to_string(),
        d: o.d.or(file.d).unwrap_or(3),
        n: o.n.or(file.n).unwrap_or(100),
        trials: o.trials.or(file.trials).unwrap_or(100),
        seed: o.seed.or(file.seed).unwrap_or(0),
        ell: o.ell.or(file.ell).unwrap_or(1),
        radius: o.radius.or(file.radius),
        t: o.t.or(file.t).unwrap_or(0.0),
        z_re: o.z_re.or(file.z_re),
        z_im: o.z_im.or(file.z_im),
        input: o.input.or(file.input),
        out: o.out.or(file.out),
        format: o.format.or(file.format),
        jobs: o.jobs.or(file.jobs),
        method: o.method.or(file.method),
    })
}

impl Resolved {
    fn z(&self, re: f64, im: f64) -> Complex64 {
        Complex64::new(self.z_re.unwrap_or(re), self.z_im.unwrap_or(im))
    }

    fn format(&self, default: ReportFormat) -> std::result::Result<ReportFormat, Failure> {
        match &self.format {
            Some(f) => Ok(f.parse()?),
            None => Ok(default),
        }
    }

    fn sampling_method(&self) -> std::result::Result<SamplingMethod, Failure> {
        match &self.method {
            Some(m) => Ok(m.parse()?),
            None => Ok(SamplerConfig::for_degree(self.d).method),
        }
    }

    fn experiment(&self) -> std::result::Result<ExperimentConfig, Failure> {
        let mut cfg = ExperimentConfig::new(self.d, self.n, self.trials, self.seed);
        cfg.ell = self.ell;
        cfg.t = self.t;
        if let Some(r) = self.radius {
            cfg.radius = r;
        }
        cfg.z_grid = vec![self.z(0.0, 1.0)];
        cfg.validate()?;
        Ok(cfg)
    }

    fn graph(&self) -> std::result::Result<RegularGraph, Failure> {
        match &self.input {
            Some(p) => Ok(read_rrg1(BufReader::new(File::open(p)?))?),
            None => {
                let cfg = SamplerConfig::for_degree(self.d).with_method(self.sampling_method()?);
                Ok(sample_regular(self.d, self.n, &cfg, self.seed)?)
            }
        }
    }
}

fn output(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Outcome {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn emit_json<T: Serialize>(r: &Resolved, value: &T) -> Outcome {
    let doc = serde_json::json!({ "config": r, "result": value });
    let text = serde_json::to_string_pretty(&doc)?;
    output(r.out.as_deref(), |w| writeln!(w, "{text}"))
}

fn emit_report(r: &Resolved, report: &SummaryReport) -> Outcome {
    match r.format(ReportFormat::Json)? {
        ReportFormat::Json => {
            // embed the resolved flags next to the report
            let mut value = serde_json::to_value(report)?;
            value["cli"] = serde_json::to_value(r)?;
            let text = serde_json::to_string_pretty(&value)?;
            output(r.out.as_deref(), |w| writeln!(w, "{text}"))?;
        }
        ReportFormat::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            output(r.out.as_deref(), |w| w.write_all(&buf))?;
        }
    }
    if report.summary.pass {
        Ok(())
    } else {
        Err(Failure::Threshold(format!("{}: thresholds not met", report.experiment)))
    }
}

fn execute(command: Command) -> Outcome {
    let (name, opts) = match command {
        Command::Sample(o) => ("sample", o),
        Command::Spectrum(o) => ("spectrum", o),
        Command::Rigidity(o) => ("rigidity", o),
        Command::Edge(o) => ("edge", o),
        Command::Ramanujan(o) => ("ramanujan", o),
        Command::Locallaw(o) => ("locallaw", o),
        Command::Switch(o) => ("switch", o),
        Command::Freeconv(o) => ("freeconv", o),
        Command::Loopcheck(o) => ("loopcheck", o),
        Command::Identities(o) => ("identities", o),
    };
    let r = merge(name, opts)?;
    let jobs = r.jobs.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    pool.install(|| dispatch(&r))
}

fn dispatch(r: &Resolved) -> Outcome {
    match r.command.as_str() {
        "sample" => {
            if r.format.is_some() {
                return Err(Failure::Usage("sample always writes RRG1; drop --format".into()));
            }
            let g = r.graph()?;
            let mut buf = Vec::new();
            write_rrg1(&g, &mut buf)?;
            output(r.out.as_deref(), |w| w.write_all(&buf))
        }
        "spectrum" => {
            let g = r.graph()?;
            let spec = full_spectrum(&normalized_adjacency(&g), false)?;
            match r.format(ReportFormat::Csv)? {
                ReportFormat::Csv => {
                    let mut buf = Vec::new();
                    spec.write_csv(&mut buf)?;
                    output(r.out.as_deref(), |w| w.write_all(&buf))
                }
                ReportFormat::Json => emit_json(r, &spec),
            }
        }
        "rigidity" => emit_report(r, &rigidity_experiment(&r.experiment()?)?),
        "edge" => emit_report(r, &edge_universality_experiment(&r.experiment()?)?),
        "ramanujan" => emit_report(r, &ramanujan_fraction(&r.experiment()?)?),
        "locallaw" => emit_report(r, &local_law_experiment(&r.experiment()?)?),
        "loopcheck" => {
            let ensemble: LoopEnsemble = r.method.as_deref().unwrap_or("goe").parse()?;
            let z = match ensemble {
                LoopEnsemble::Goe => r.z(0.5, 0.5),
                LoopEnsemble::RrgEdge => r.z(2.0, (r.n as f64).powf(-2.0 / 3.0)),
            };
            let mut cfg = ExperimentConfig::new(r.d, r.n, r.trials, r.seed);
            cfg.z_grid = vec![z];
            emit_report(r, &loop_equation_check(&cfg, ensemble, z)?)
        }
        "freeconv" => {
            let z = r.z(0.0, 1.0);
            let point = free_conv_m(r.d, z, r.t)?;
            let edge = if r.t > 0.0 {
                Some(edge_location(r.d, r.t)?)
            } else {
                None
            };
            let residual = point.residual();
            emit_json(
                r,
                &serde_json::json!({ "point": point, "residual": residual, "edge": edge }),
            )
        }
        "identities" => {
            let g = r.graph()?;
            let z = r.z(0.0, 1.0);
            let res = IdentityResiduals::compute(&normalized_adjacency(&g), z, 0)?;
            emit_json(r, &res)?;
            if res.max() <= IDENTITY_TOL {
                Ok(())
            } else {
                Err(Failure::Threshold(format!(
                    "identity residual {:e} above {IDENTITY_TOL:e}",
                    res.max()
                )))
            }
        }
        "switch" => {
            let g = r.graph()?;
            let r_param = r.radius.unwrap_or_else(|| default_r_param(g.d(), g.n()));
            let (switched, data, set) = resample(&g, 0, r.ell, r_param, r.seed)?;
            let z = r.z(0.0, 1.0);
            let woodbury = if set.count() > 0 {
                Some(woodbury_suite(&g, &data, &set, z)?)
            } else {
                None
            };
            let mut graph = Vec::new();
            write_rrg1(&switched, &mut graph)?;
            emit_json(
                r,
                &serde_json::json!({
                    "data": data,
                    "admissible": set,
                    "switched": set.count(),
                    "woodbury": woodbury,
                    "graph_rrg1": String::from_utf8(graph).expect("ascii"),
                }),
            )?;
            let worst = woodbury
                .map(|w| w.resolvent_residual.max(w.woodbury_residual).max(w.f_matrix_residual))
                .unwrap_or(0.0);
            if worst <= IDENTITY_TOL {
                Ok(())
            } else {
                Err(Failure::Threshold(format!(
                    "Woodbury residual {worst:e} above {IDENTITY_TOL:e}"
                )))
            }
        }
        other => Err(Failure::Usage(format!("unknown command {other}"))),
    }
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(Failure::Threshold(msg)) => {
            eprintln!("ramanujan-lab: {msg}");
            1
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("ramanujan-lab: {msg}");
            2
        }
    }
}

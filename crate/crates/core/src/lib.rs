//! Numerical laboratory for the spectra of random d-regular graphs.
//!
//! The crate covers the whole pipeline from sampling a graph to comparing
//! its extreme eigenvalues with the Tracy-Widom law:
//!
//! * [`graph`]: simple d-regular graphs, balls, excess, the `RRG1` format.
//! * [`sampler`]: pairing-model and switch-chain samplers, constrained GOE
//!   matrices, reproducible seed streams.
//! * [`resampling`]: simple switchings and local resampling around a ball.
//! * [`spectral`]: normalized adjacency, dense and Lanczos eigensolvers,
//!   resolvents, Stieltjes transforms and exact resolvent identities.
//! * [`laws`]: semicircle and Kesten-McKay transforms, classical
//!   eigenvalue locations, free convolution with a semicircle, and the
//!   Tracy-Widom (beta = 1) distribution.
//! * [`green_tree`]: tree Green's functions, weighted ball extensions and
//!   the truncated-tree recursions.
//! * [`experiments`]: seeded Monte Carlo experiments and summary reports.

pub mod error;
pub mod experiments;
pub mod graph;
pub mod green_tree;
pub mod laws;
pub mod resampling;
pub mod sampler;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{
    ball, build_graph, excess, graph_distance, omega_bar_report, Ball, Distance, ExcessReport, RegularGraph,
};
pub use num_complex::Complex64;

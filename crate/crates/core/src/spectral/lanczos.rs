//! Lanczos iteration with full reorthogonalization for the extreme
//! nontrivial eigenvalues of `H`. The constant vector is projected out of
//! every Krylov vector, so the trivial eigenvalue never appears.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::eigen::tql;
use super::{full_spectrum, NormalizedAdjacency};
use crate::error::{Error, Result};
use crate::sampler::rng_from_seed;

const MAX_ITER: usize = 400;
const RITZ_TOL: f64 = 1e-10;
const CHECK_EVERY: usize = 10;
/// Below this size the dense solver is used directly.
const DENSE_BELOW: usize = 300;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremeEigs {
    /// `lambda_2 >= lambda_3 >= ...`
    pub top: Vec<f64>,
    /// `lambda_N <= lambda_{N-1} <= ...`
    pub bottom: Vec<f64>,
    /// Krylov dimension used (0 for the dense path).
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn remove_mean(v: &mut [f64]) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= mean);
}

struct Ritz {
    values: Vec<f64>,
    /// rows: eigenvectors of the Lanczos tridiagonal, ordered as `values`
    vectors: Vec<f64>,
    residuals: Vec<f64>,
}

fn ritz(alpha: &[f64], beta: &[f64]) -> Result<Ritz> {
    let m = alpha.len();
    let mut d = alpha.to_vec();
    let mut off = vec![0.0; m];
    off[1..m].copy_from_slice(&beta[..m - 1]);
    let mut vt = vec![0.0; m * m];
    for i in 0..m {
        vt[i * m + i] = 1.0;
    }
    tql(&mut d, &mut off, Some(&mut vt))?;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]));
    let last = beta[m - 1].abs();
    let mut vectors = Vec::with_capacity(m * m);
    for &i in &order {
        vectors.extend_from_slice(&vt[i * m..(i + 1) * m]);
    }
    Ok(Ritz {
        values: order.iter().map(|&i| d[i]).collect(),
        residuals: order.iter().map(|&i| last * vt[i * m + m - 1].abs()).collect(),
        vectors,
    })
}

struct Run {
    ritz: Ritz,
    basis: Vec<Vec<f64>>,
    converged: bool,
}

fn lanczos_run(h: &NormalizedAdjacency, start: Vec<f64>, k: usize) -> Result<Run> {
    let n = h.n();
    let mut q = start;
    remove_mean(&mut q);
    let norm = dot(&q, &q).sqrt();
    if norm == 0.0 {
        return Err(Error::NoConvergence("Lanczos start vector is constant".into()));
    }
    q.iter_mut().for_each(|x| *x /= norm);
    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let limit = MAX_ITER.min(n - 1);
    loop {
        let j = basis.len() - 1;
        h.apply(&basis[j], &mut w);
        let a = dot(&basis[j], &w);
        alpha.push(a);
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                axpy(-c, v, &mut w);
            }
            remove_mean(&mut w);
        }
        let b = dot(&w, &w).sqrt();
        beta.push(b);
        let m = alpha.len();
        let invariant = b <= 1e-12;
        if invariant || m == limit || (m >= 2 * k + 2 && m % CHECK_EVERY == 0) {
            let r = ritz(&alpha, &beta)?;
            let wanted = wanted_indices(m, k);
            let done = invariant || wanted.iter().all(|&i| r.residuals[i] <= RITZ_TOL);
            if done || m == limit {
                return Ok(Run {
                    ritz: r,
                    basis,
                    converged: done,
                });
            }
        }
        let next: Vec<f64> = w.iter().map(|x| x / b).collect();
        basis.push(next);
    }
}

fn wanted_indices(m: usize, k: usize) -> Vec<usize> {
    let k = k.min(m);
    let mut idx: Vec<usize> = (0..k).collect();
    idx.extend((m - k..m).filter(|i| *i >= k));
    idx
}

/// The `k` largest and `k` smallest nontrivial eigenvalues of `H`.
///
/// Lanczos runs up to 400 steps and restarts once from the sum of the
/// wanted Ritz vectors. Ritz residuals must fall below `1e-10`. Graphs
/// with fewer than 300 vertices go through the dense solver.
pub fn extreme_eigs(h: &NormalizedAdjacency, k: usize, seed: u64) -> Result<ExtremeEigs> {
    if k < 1 {
        return Err(Error::BadParams("extreme_eigs needs k >= 1".into()));
    }
    let n = h.n();
    if n < DENSE_BELOW || 2 * k + 2 > n / 2 {
        let s = full_spectrum(h, false)?;
        let nontrivial = &s.eigenvalues[1..];
        let kk = k.min(nontrivial.len());
        return Ok(ExtremeEigs {
            top: nontrivial[..kk].to_vec(),
            bottom: nontrivial.iter().rev().take(kk).copied().collect(),
            iterations: 0,
        });
    }
    let mut rng = rng_from_seed(seed);
    let start: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let mut run = lanczos_run(h, start, k)?;
    let mut iterations = run.basis.len();
    if !run.converged {
        let m = run.ritz.values.len();
        let mut restart = vec![0.0; n];
        for i in wanted_indices(m, k) {
            let s = &run.ritz.vectors[i * m..(i + 1) * m];
            for (coef, v) in s.iter().zip(&run.basis) {
                axpy(*coef, v, &mut restart);
            }
        }
        run = lanczos_run(h, restart, k)?;
        iterations += run.basis.len();
        if !run.converged {
            return Err(Error::NoConvergence(format!(
                "Lanczos: Ritz residuals above {RITZ_TOL:e} after restart"
            )));
        }
    }
    let vals = &run.ritz.values;
    let m = vals.len();
    let kk = k.min(m);
    Ok(ExtremeEigs {
        top: vals[..kk].to_vec(),
        bottom: vals.iter().rev().take(kk).copied().collect(),
        iterations,
    })
}

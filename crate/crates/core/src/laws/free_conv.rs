//! Free convolution of the Kesten-McKay law with a semicircle of variance `t`.
//!
//! The Stieltjes transform `m = m_d(z, t)` is the solution with `Im m > 0` of
//! `m = m_d(z + t m)`. Its right edge is `E_t = xi_t - t m_d(xi_t)` where
//! `xi_t > 2` solves `m_d'(xi_t) = 1 / t`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{edge_constant, m_d_unchecked};
use crate::error::{Error, Result};

const MAX_ITER: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeConvolutionPoint {
    pub d: usize,
    pub z: Complex64,
    pub t: f64,
    pub m: Complex64,
    pub z_t: Complex64,
}

impl FreeConvolutionPoint {
    /// `|m - m_d(z_t)|`.
    pub fn residual(&self) -> f64 {
        (self.m - m_d_unchecked(self.d, self.z_t)).norm()
    }
}

fn m_d_prime(d: usize, z: Complex64) -> Complex64 {
    let c = d as f64 / (d as f64 - 1.0);
    let ms = super::m_sc_unchecked(z);
    let md = m_d_unchecked(d, z);
    md * md * (1.0 + c * ms * ms / (1.0 - ms * ms))
}

/// Newton iteration on `F(m) = m - m_d(z + t m)` started at `m_d(z)`. A step
/// is halved while it would increase `|F|` or push `z + t m` off the upper
/// half-plane.
pub fn free_conv_m(d: usize, z: Complex64, t: f64) -> Result<FreeConvolutionPoint> {
    if d < 3 {
        return Err(Error::BadParams(format!("degree must be >= 3, got {d}")));
    }
    if !(z.im > 0.0) {
        return Err(Error::BadParams(format!("free convolution needs Im z > 0, got {z}")));
    }
    if !(t >= 0.0) {
        return Err(Error::BadParams(format!("t must be >= 0, got {t}")));
    }
    let point = |m: Complex64| FreeConvolutionPoint {
        d,
        z,
        t,
        m,
        z_t: z + t * m,
    };
    let mut m = m_d_unchecked(d, z);
    if t == 0.0 {
        return Ok(point(m));
    }
    let f = |m: Complex64| m - m_d_unchecked(d, z + t * m);
    let mut r = f(m).norm();
    for _ in 0..MAX_ITER {
        if r <= 1e-14 {
            return Ok(point(m));
        }
        let fm = f(m);
        let jac = 1.0 - t * m_d_prime(d, z + t * m);
        let step = fm / jac;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand = m - lambda * step;
            if (z + t * cand).im > 0.0 && cand.im > 0.0 {
                let rc = f(cand).norm();
                if rc < r {
                    m = cand;
                    r = rc;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            // no decrease possible at working precision
            break;
        }
    }
    if r <= 1e-12 {
        Ok(point(m))
    } else {
        Err(Error::NoConvergence(format!(
            "free convolution at z = {z}, t = {t}: residual {r:e}"
        )))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeData {
    pub d: usize,
    pub t: f64,
    pub xi_t: f64,
    pub e_t: f64,
    pub edge_constant: f64,
}

fn m_d_real(d: usize, x: f64) -> f64 {
    m_d_unchecked(d, Complex64::new(x, 0.0)).re
}

fn m_d_prime_real(d: usize, x: f64) -> f64 {
    m_d_prime(d, Complex64::new(x, 0.0)).re
}

/// Right edge of the free convolution. `m_d'` decreases from `+inf` at `2`
/// so the root is bracketed by bisection in `u = sqrt(xi - 2)`, which keeps
/// the square-root singularity from slowing convergence.
pub fn edge_location(d: usize, t: f64) -> Result<EdgeData> {
    if d < 3 {
        return Err(Error::BadParams(format!("degree must be >= 3, got {d}")));
    }
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::BadParams(format!("edge location needs 0 < t <= 1, got {t}")));
    }
    let target = 1.0 / t;
    let g = |u: f64| m_d_prime_real(d, 2.0 + u * u) - target;
    let mut lo = 0.0;
    let mut hi = (10.0 * t).sqrt();
    if g(hi) > 0.0 {
        return Err(Error::NoRoot(format!(
            "m_d' = 1/t has no root in (2, 2 + 10t], t = {t}"
        )));
    }
    // g(0+) = +inf
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u = 0.5 * (lo + hi);
    let xi = 2.0 + u * u;
    Ok(EdgeData {
        d,
        t,
        xi_t: xi,
        e_t: xi - t * m_d_real(d, xi),
        edge_constant: edge_constant(d),
    })
}

//! Closed-form limit laws.
//!
//! Branch convention for all Stieltjes transforms: `sqrt(z^2 - 4)` is taken
//! as `sqrt(z - 2) * sqrt(z + 2)` with principal roots, which is analytic
//! off `[-2, 2]` and behaves like `z` at infinity. This picks `Im m > 0` on
//! the upper half-plane and `|m| < 1` on the real axis outside the support.

mod free_conv;
pub mod quadrature;
mod quantiles;
mod tw1;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use free_conv::{edge_location, free_conv_m, EdgeData, FreeConvolutionPoint};
pub use quantiles::{classical_locations, km_tail_mass};
pub use tw1::{tw1_cdf, tw1_mean, Tw1Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    UpperHalfPlane,
    LowerHalfPlane,
    RealOutsideSupport,
}

/// A spectral parameter off the support `[-2, 2]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralParameter {
    pub z: Complex64,
    pub region: Region,
}

impl SpectralParameter {
    pub fn new(z: Complex64) -> Result<Self> {
        let region = if z.im > 0.0 {
            Region::UpperHalfPlane
        } else if z.im < 0.0 {
            Region::LowerHalfPlane
        } else if z.re.abs() > 2.0 {
            Region::RealOutsideSupport
        } else {
            return Err(Error::OnSupport);
        };
        Ok(Self { z, region })
    }

    pub fn eta(&self) -> f64 {
        self.z.im
    }
}

#[inline]
fn sqrt_z2_minus_4(z: Complex64) -> Complex64 {
    (z - 2.0).sqrt() * (z + 2.0).sqrt()
}

/// Semicircle Stieltjes transform: the root of `m^2 + z m + 1 = 0` on the
/// physical branch. Evaluated as `-2 / (z + sqrt(z^2 - 4))` to avoid
/// cancellation at large `|z|`.
pub fn m_sc(z: Complex64) -> Result<Complex64> {
    SpectralParameter::new(z)?;
    Ok(m_sc_unchecked(z))
}

#[inline]
pub(crate) fn m_sc_unchecked(z: Complex64) -> Complex64 {
    -2.0 / (z + sqrt_z2_minus_4(z))
}

/// Kesten-McKay Stieltjes transform `1 / (-z - d/(d-1) m_sc(z))`.
pub fn m_d(d: usize, z: Complex64) -> Result<Complex64> {
    SpectralParameter::new(z)?;
    Ok(m_d_unchecked(d, z))
}

#[inline]
pub(crate) fn m_d_unchecked(d: usize, z: Complex64) -> Complex64 {
    let c = d as f64 / (d as f64 - 1.0);
    1.0 / (-z - c * m_sc_unchecked(z))
}

/// Second closed form `(d-1)(-(d-2) z + d sqrt(z^2-4)) / (2 (d^2 - (d-1) z^2))`,
/// kept as an independent route for consistency checks.
pub fn m_d_closed_form(d: usize, z: Complex64) -> Result<Complex64> {
    SpectralParameter::new(z)?;
    let df = d as f64;
    let num = (df - 1.0) * (-(df - 2.0) * z + df * sqrt_z2_minus_4(z));
    Ok(num / (2.0 * (df * df - (df - 1.0) * z * z)))
}

/// `d m_sc / dz = m_sc^2 / (1 - m_sc^2)`.
pub fn m_sc_derivative(z: Complex64) -> Result<Complex64> {
    let m = m_sc(z)?;
    Ok(m * m / (1.0 - m * m))
}

/// `d m_d / dz = m_d^2 (1 + d/(d-1) m_sc')`.
pub fn m_d_derivative(d: usize, z: Complex64) -> Result<Complex64> {
    let md = m_d(d, z)?;
    let c = d as f64 / (d as f64 - 1.0);
    Ok(md * md * (1.0 + c * m_sc_derivative(z)?))
}

/// Kesten-McKay density.
pub fn km_density(d: usize, x: f64) -> f64 {
    if x.abs() >= 2.0 {
        return 0.0;
    }
    let df = d as f64;
    (4.0 - x * x).sqrt() / (2.0 * std::f64::consts::PI) / (1.0 + 1.0 / (df - 1.0) - x * x / df)
}

/// Square-root edge constant `d(d-1)/(d-2)^2`.
pub fn edge_constant(d: usize) -> f64 {
    let df = d as f64;
    df * (df - 1.0) / ((df - 2.0) * (df - 2.0))
}

//! Modified Bohr-Sommerfeld quantization of the regular periodic orbits.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::PhysParams;
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemiclassicalLevel {
    pub n: usize,
    #[serde(rename = "A_n")]
    pub amplitude: f64,
    #[serde(rename = "E_n")]
    pub energy: f64,
}

fn check_regular(amplitude: f64, params: &PhysParams) -> Result<()> {
    if !(amplitude >= 0.0) {
        return Err(Error::InvalidParameter(format!("amplitude must be >= 0, got {amplitude}")));
    }
    if params.k() > 0.0 && amplitude >= params.regular_amplitude_bound() {
        return Err(Error::Irregular { amplitude, bound: params.regular_amplitude_bound() });
    }
    Ok(())
}

/// `p dx / (omega A^2 dphi)` along the orbit of amplitude `A`:
/// `(cos phi - c/2 cos^2 phi)(cos phi - c) / (1 - c cos phi)^2` with `c = kA/3omega`.
pub fn action_integrand(phi: f64, amplitude: f64, params: &PhysParams) -> Result<f64> {
    check_regular(amplitude, params)?;
    Ok(integrand(phi, params.k() * amplitude / (3.0 * params.omega())))
}

fn integrand(phi: f64, c: f64) -> f64 {
    let cp = phi.cos();
    let den = 1.0 - c * cp;
    (cp - 0.5 * c * cp * cp) * (cp - c) / (den * den)
}

/// Loop integral of `p dx` over one regular orbit, by 128-node
/// Gauss-Legendre quadrature in the phase. Equals `pi A^2 omega`.
pub fn action_integral(amplitude: f64, params: &PhysParams) -> Result<f64> {
    check_regular(amplitude, params)?;
    let c = params.k() * amplitude / (3.0 * params.omega());
    let w = params.omega();
    Ok(w * amplitude * amplitude * quad::gauss_legendre(0.0, 2.0 * PI, |phi| integrand(phi, c)))
}

/// `A_n = sqrt(2 (n + 1/2) hbar / omega)`.
pub fn quantized_amplitude(n: usize, params: &PhysParams) -> f64 {
    (2.0 * (n as f64 + 0.5) * params.hbar() / params.omega()).sqrt()
}

/// Largest `n` with `A_n < 3 omega / k`, or `None` if even the ground level
/// sits on a singular orbit.
pub fn regular_level_count(params: &PhysParams) -> Result<Option<usize>> {
    params.require_nonlinear()?;
    let bound = params.regular_amplitude_bound();
    let w = params.omega();
    let x = 4.5 * w * w * w / (params.hbar() * params.k() * params.k());
    let mut n = ((x - 0.5).ceil() - 1.0).max(0.0) as usize;
    // settle floating-point ties against the defining strict inequality
    while quantized_amplitude(n + 1, params) < bound {
        n += 1;
    }
    loop {
        if quantized_amplitude(n, params) < bound {
            return Ok(Some(n));
        }
        if n == 0 {
            return Ok(None);
        }
        n -= 1;
    }
}

pub fn semiclassical_spectrum(params: &PhysParams) -> Result<Vec<SemiclassicalLevel>> {
    let Some(top) = regular_level_count(params)? else {
        return Ok(Vec::new());
    };
    Ok((0..=top)
        .map(|n| SemiclassicalLevel {
            n,
            amplitude: quantized_amplitude(n, params),
            energy: (n as f64 + 0.5) * params.hbar() * params.omega(),
        })
        .collect())
}

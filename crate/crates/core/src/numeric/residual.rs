//! Pointwise residuals of eigenfunctions against the transformed
//! momentum-space Schrodinger equation
//!
//! ```text
//! -(hbar^2 omega^2 / 2) s Phi'' - hbar^2 k^2 / (24 omega^2 s) Phi + (9 omega^4 / 2k^2)(sqrt(s) - 1)^2 Phi = E Phi
//! ```
//!
//! with `s = 1 - 2kp/3omega^2`. Past `p_star` the root is continued as
//! `sqrt(s) = i sqrt(-s)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::{EigenState, Sector};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::PhysParams;

/// Coefficients `(c2, c0)` of the operator `c2 f'' + c0 f` at `p`.
pub fn transformed_hamiltonian_coefficients(p: f64, params: &PhysParams) -> Result<(f64, Complex64)> {
    params.require_nonlinear()?;
    let s = params.deformation(p);
    if s == 0.0 {
        return Err(Error::SingularPoint(p));
    }
    let (w, k, hb) = (params.omega(), params.k(), params.hbar());
    let c2 = -0.5 * hb * hb * w * w * s;
    let mass = -hb * hb * k * k / (24.0 * w * w * s);
    let u = if s > 0.0 {
        Complex64::new(params.potential(p)?, 0.0)
    } else {
        // (i yt - 1)^2 = 1 - yt^2 - 2i yt with yt^2 = -s
        let yt = (-s).sqrt();
        let w2 = w * w;
        4.5 * w2 * w2 / (k * k) * Complex64::new(1.0 - yt * yt, -2.0 * yt)
    };
    Ok((c2, u + mass))
}

/// `H f` at `p` given `f(p)` and `f''(p)`.
pub fn apply_transformed_hamiltonian(
    value: Complex64,
    second_derivative: Complex64,
    p: f64,
    params: &PhysParams,
) -> Result<Complex64> {
    let (c2, c0) = transformed_hamiltonian_coefficients(p, params)?;
    Ok(c2 * second_derivative + c0 * value)
}

/// Five-point central second difference.
pub fn second_difference<F: Fn(f64) -> Complex64>(f: &F, p: f64, h: f64) -> Complex64 {
    let (m2, m1, c, p1, p2) = (f(p - 2.0 * h), f(p - h), f(p), f(p + h), f(p + 2.0 * h));
    (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h)
}

/// Finite-difference weights for derivatives `0..=M` at `x0` over arbitrary
/// nodes (Fornberg's recursion).
pub fn fd_weights<const K: usize, const M: usize>(x0: f64, nodes: &[f64; K]) -> [[f64; K]; M] {
    let mut c = [[0.0; K]; M];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..K {
        let mn = i.min(M - 1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] *= c4 / c3;
        }
        c1 = c2;
    }
    c
}

/// Second derivative in `p` from five-point differences in
/// `t = ln|p - p0|`, which resolves the algebraic branch behaviour at `p0`
/// with a step proportional to the distance from it. Weights are built on
/// the nodes as rounded in `p`, so their placement error does not enter.
pub fn log_second_difference<F: Fn(f64) -> Complex64>(f: &F, p: f64, p0: f64, ht: f64) -> Complex64 {
    let d = p - p0;
    let mut ps = [0.0; 5];
    let mut ts = [0.0; 5];
    for (j, (pj, tj)) in ps.iter_mut().zip(ts.iter_mut()).enumerate() {
        *pj = if j == 2 { p } else { p0 + d * ((j as f64 - 2.0) * ht).exp() };
        *tj = ((*pj - p0) / d).ln();
    }
    let w = fd_weights::<5, 3>(0.0, &ts);
    let (mut ft, mut ftt) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for j in 0..5 {
        let v = f(ps[j]);
        ft += w[1][j] * v;
        ftt += w[2][j] * v;
    }
    (ftt - ft) / (d * d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualConfig {
    /// Half-width of the excluded band around `p_star`, as a fraction of `p_star`.
    pub guard_band: f64,
    /// Largest finite-difference step in `p`; `None` uses `step_fraction`
    /// of [`level_scale`].
    pub fd_step: Option<f64>,
    pub step_fraction: f64,
    /// Step in `ln|p - p_star|`, bounding the step near `p_star`.
    pub log_step: f64,
    /// Points where `|Phi| < tail_cutoff * max |Phi|` are dropped.
    pub tail_cutoff: f64,
}

impl Default for ResidualConfig {
    fn default() -> Self {
        Self {
            guard_band: 1e-3,
            fd_step: None,
            step_fraction: 1e-2,
            log_step: 5e-3,
            tail_cutoff: 1e-12,
        }
    }
}

/// Length over which low levels of `sector` vary in `p`: the oscillator
/// width `sqrt(hbar omega)` in the bound sector, and a quarter of the
/// phase wavelength `2 p_star / a^{3/4}` in the broken sector.
pub fn level_scale(sector: Sector, params: &PhysParams) -> Result<f64> {
    let width = (params.hbar() * params.omega()).sqrt();
    Ok(match sector {
        Sector::Bound => width,
        Sector::Broken => {
            let s = params.scaled_params(0.0)?;
            let wavelength = 2.0 * params.p_star() / (s.sqrt_a * s.sqrt_a.sqrt());
            width.min(0.25 * wavelength)
        }
    })
}

impl ResidualConfig {
    fn base_step(&self, sector: Sector, params: &PhysParams) -> f64 {
        match self.fd_step {
            Some(h) => h,
            None => self.step_fraction * level_scale(sector, params).unwrap_or(1.0),
        }
    }

    /// Step in `ln|p - p_star|` used at `p`.
    pub fn step_at(&self, p: f64, sector: Sector, params: &PhysParams) -> f64 {
        let dist = (p - params.p_star()).abs();
        self.log_step.min(self.base_step(sector, params) / dist)
    }

    /// Second derivative of `f` at `p`.
    pub fn second_derivative<F: Fn(f64) -> Complex64>(
        &self,
        f: &F,
        p: f64,
        sector: Sector,
        params: &PhysParams,
    ) -> Complex64 {
        log_second_difference(f, p, params.p_star(), self.step_at(p, sector, params))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub n: usize,
    pub sector: Sector,
    #[serde(rename = "E")]
    pub energy: f64,
    /// Points actually tested, after guard-band and tail filtering.
    #[serde(skip)]
    pub grid: Vec<f64>,
    /// `max |H Phi - E Phi| / max |E Phi|` over the tested points.
    pub residual_norm: f64,
    pub grid_size: usize,
    pub guard_band: f64,
}

/// Relative residual of `state` (at its stored energy) on `grid`.
pub fn residual_norm(state: &EigenState, grid: &[f64], params: &PhysParams) -> Result<ResidualReport> {
    residual_norm_with(state, grid, params, &ResidualConfig::default(), Execution::default())
}

pub fn residual_norm_with(
    state: &EigenState,
    grid: &[f64],
    params: &PhysParams,
    config: &ResidualConfig,
    exec: Execution,
) -> Result<ResidualReport> {
    let f = |p: f64| state.amplitude(p);
    residual_of_fn(&f, state.n, state.sector, state.energy, grid, params, config, exec)
}

/// Residual of an arbitrary amplitude `f` treated as a level of `sector`.
#[allow(clippy::too_many_arguments)]
pub fn residual_of_fn<F>(
    f: &F,
    n: usize,
    sector: Sector,
    energy: f64,
    grid: &[f64],
    params: &PhysParams,
    config: &ResidualConfig,
    exec: Execution,
) -> Result<ResidualReport>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    if grid.len() < 3 {
        return Err(Error::DegenerateGrid("fewer than three points"));
    }
    let p_star = params.p_star();
    let inside = |p: f64| match sector {
        Sector::Bound => p < p_star,
        Sector::Broken => p > p_star,
    };
    if grid.iter().any(|&p| !p.is_finite() || !inside(p)) {
        return Err(Error::DegenerateGrid("grid leaves the state's sector"));
    }
    let band = config.guard_band * p_star;
    let values = exec.map(grid, |&p| f(p));
    let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(Error::ZeroAmplitude);
    }
    let kept: Vec<(f64, Complex64)> = grid
        .iter()
        .zip(&values)
        .filter(|(&p, v)| (p - p_star).abs() >= band && v.norm() >= config.tail_cutoff * peak)
        .map(|(&p, &v)| (p, v))
        .collect();
    if kept.len() < 3 {
        return Err(Error::DegenerateGrid("fewer than three points survive filtering"));
    }
    let residuals = exec.try_map(&kept, |&(p, v)| {
        let d2 = config.second_derivative(f, p, sector, params);
        apply_transformed_hamiltonian(v, d2, p, params).map(|hv| (hv - energy * v).norm())
    })?;
    let num = residuals.iter().copied().fold(0.0, f64::max);
    let den = kept.iter().map(|(_, v)| (energy * v).norm()).fold(0.0, f64::max);
    if den == 0.0 {
        return Err(Error::ZeroAmplitude);
    }
    Ok(ResidualReport {
        n,
        sector,
        energy,
        grid_size: kept.len(),
        grid: kept.into_iter().map(|(p, _)| p).collect(),
        residual_norm: num / den,
        guard_band: config.guard_band,
    })
}

/// Uniform grid covering the support of level `n` of `sector`, stopping at
/// the guard band around `p_star` and where the Gaussian envelope has
/// decayed far below the tail cutoff.
pub fn default_grid(n: usize, sector: Sector, points: usize, params: &PhysParams, config: &ResidualConfig) -> Result<Vec<f64>> {
    let s = params.scaled_params(0.0)?;
    let a_quarter = s.sqrt_a.sqrt();
    let reach = (((2 * n + 1) as f64).sqrt() + 6.0) / a_quarter;
    let p_star = params.p_star();
    let band = config.guard_band * p_star;
    let (lo, hi) = match sector {
        Sector::Bound => {
            let y = 1.0 + reach;
            (p_star * (1.0 - y) * (1.0 + y), p_star - band)
        }
        Sector::Broken => (p_star + band, p_star * (1.0 + reach * reach)),
    };
    if points < 3 {
        return Err(Error::DegenerateGrid("fewer than three points"));
    }
    Ok((0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect())
}

//! Closed-form quantum solution in momentum space.
//!
//! Bound sector (`p <= p_star`): with `y = sqrt(1 - 2kp/3omega^2)` and
//! `z = a^{1/4} (y - 1)`,
//!
//! ```text
//! Phi_n(p) = N y^{1/2} exp(-(sqrt(a)/2)(y^2 - 2y)) H_n(z),   E_n = (n + 1/2) hbar omega
//! ```
//!
//! Broken sector (`p > p_star`): with `yt = sqrt(2kp/3omega^2 - 1)` and
//! `z = a^{1/4} (yt + i)`,
//!
//! ```text
//! Phi_n(p) = N yt^{1/2} exp(-(sqrt(a)/2)(yt^2 + 2i yt)) H_n(z),  E_n = -(n + 1/2) hbar omega
//! ```
//!
//! Amplitudes are assembled in log space; `exp(sqrt(a)/2)` overflows long
//! before the harmonic limit is reached.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::{hermite, hermite_real};
use crate::model::PhysParams;
use crate::quad;

/// Highest level accepted by [`normalize_bound`].
pub const NORMALIZATION_MAX_LEVEL: usize = 10;

const QUAD_REL_TOL: f64 = 1e-13;

/// von Roos exponents `(alpha, beta, gamma)` and the similarity exponent `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderingParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub d: f64,
}

impl Default for OrderingParams {
    fn default() -> Self {
        Self {
            alpha: -0.25,
            beta: -0.5,
            gamma: -0.25,
            d: -0.5,
        }
    }
}

impl OrderingParams {
    /// Accepts only orderings reducible to the Hermite equation with a
    /// bounded transformed eigenfunction.
    pub fn new(alpha: f64, beta: f64, gamma: f64, d: f64) -> Result<Self> {
        let o = Self { alpha, beta, gamma, d };
        if (alpha + beta + gamma + 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "ordering needs alpha + beta + gamma = -1, got {}",
                alpha + beta + gamma
            )));
        }
        if (o.mass_term() + 0.25).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "ordering needs 4 alpha (alpha + beta + 1) = -1/4, got {}",
                o.mass_term()
            )));
        }
        if !(d < -0.25) {
            return Err(Error::InvalidParameter(format!("similarity exponent needs d < -1/4, got {d}")));
        }
        Ok(o)
    }

    /// `4 alpha (alpha + beta + 1)`, the coefficient of `1/y^2` in the
    /// y-equation of the symmetric-ordered problem.
    pub fn mass_term(&self) -> f64 {
        4.0 * self.alpha * (self.alpha + self.beta + 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Bound,
    Broken,
}

impl Sector {
    pub fn as_str(self) -> &'static str {
        match self {
            Sector::Bound => "bound",
            Sector::Broken => "broken",
        }
    }
}

impl std::str::FromStr for Sector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bound" => Ok(Sector::Bound),
            "broken" => Ok(Sector::Broken),
            other => Err(Error::InvalidParameter(format!("unknown sector '{other}'"))),
        }
    }
}

/// Coordinates of the substitution chain `p -> y -> z` and the intermediate
/// functions `psi(y)`, `phi(y)`, `chi(z)` of the reduction to the Hermite
/// equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubstitutionFrame {
    params: PhysParams,
    pub a: f64,
    pub sqrt_a: f64,
    pub a_quarter: f64,
    pub p_star: f64,
}

impl SubstitutionFrame {
    pub fn new(params: &PhysParams) -> Result<Self> {
        let s = params.scaled_params(0.0)?;
        Ok(Self {
            params: *params,
            a: s.a,
            sqrt_a: s.sqrt_a,
            a_quarter: s.sqrt_a.sqrt(),
            p_star: params.p_star(),
        })
    }

    pub fn params(&self) -> &PhysParams {
        &self.params
    }

    fn momentum_scale(&self) -> f64 {
        1.5 * self.params.omega() * self.params.omega() / self.params.k()
    }

    pub fn p_to_y(&self, p: f64) -> Result<f64> {
        if p > self.p_star {
            return Err(Error::Domain { p, p_star: self.p_star });
        }
        Ok(self.params.deformation(p).max(0.0).sqrt())
    }

    pub fn y_to_p(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            return Err(Error::Coordinate { what: "y", value: y });
        }
        Ok(self.momentum_scale() * (1.0 - y) * (1.0 + y))
    }

    pub fn p_to_ytilde(&self, p: f64) -> Result<f64> {
        if p < self.p_star {
            return Err(Error::Domain { p, p_star: self.p_star });
        }
        Ok((-self.params.deformation(p)).max(0.0).sqrt())
    }

    pub fn ytilde_to_p(&self, yt: f64) -> Result<f64> {
        if !(yt >= 0.0) {
            return Err(Error::Coordinate { what: "y_tilde", value: yt });
        }
        Ok(self.momentum_scale() * (1.0 + yt * yt))
    }

    /// `y - 1` for `p <= p_star`, without cancellation near `p = 0`.
    pub fn y_minus_one(&self, p: f64) -> Result<f64> {
        let y = self.p_to_y(p)?;
        Ok(-(p / self.momentum_scale()) / (1.0 + y))
    }

    /// `dp/dy = -(3 omega^2 / k) y`.
    pub fn dp_dy(&self, y: f64) -> f64 {
        -2.0 * self.momentum_scale() * y
    }

    pub fn z_bound(&self, y: f64) -> f64 {
        self.a_quarter * (y - 1.0)
    }

    pub fn z_broken(&self, yt: f64) -> Complex64 {
        self.a_quarter * Complex64::new(yt, 1.0)
    }

    /// `chi(z) = H_n(z)`.
    pub fn chi(&self, n: usize, z: Complex64) -> Complex64 {
        hermite(n, z)
    }

    /// `phi(y) = y^{-1/2} chi(z)`.
    pub fn phi(&self, n: usize, y: f64) -> f64 {
        hermite_real(n, self.z_bound(y)) / y.sqrt()
    }

    /// `psi(y) = exp(-(sqrt(a)/2) y^2 + sqrt(a) y) phi(y)`: the
    /// symmetric-ordering eigenfunction in `y`, singular at `y = 0`.
    pub fn psi(&self, n: usize, y: f64) -> f64 {
        (-0.5 * self.sqrt_a * y * y + self.sqrt_a * y).exp() * self.phi(n, y)
    }

    /// `y psi(y)`: the transformed (bounded) eigenfunction in `y`.
    pub fn transformed(&self, n: usize, y: f64) -> f64 {
        y * self.psi(n, y)
    }
}

pub fn p_to_y(p: f64, params: &PhysParams) -> Result<f64> {
    SubstitutionFrame::new(params)?.p_to_y(p)
}

pub fn y_to_p(y: f64, params: &PhysParams) -> Result<f64> {
    SubstitutionFrame::new(params)?.y_to_p(y)
}

pub fn p_to_ytilde(p: f64, params: &PhysParams) -> Result<f64> {
    SubstitutionFrame::new(params)?.p_to_ytilde(p)
}

pub fn bound_energy(n: usize, params: &PhysParams) -> f64 {
    (n as f64 + 0.5) * params.hbar() * params.omega()
}

pub fn broken_energy(n: usize, params: &PhysParams) -> f64 {
    -bound_energy(n, params)
}

/// Sign and log-modulus of the bound eigenfunction with unit constant, or
/// `None` where it vanishes (on and beyond `p_star`, and at Hermite zeros).
pub fn ln_bound_amplitude(frame: &SubstitutionFrame, n: usize, p: f64) -> Option<(f64, f64)> {
    if p >= frame.p_star {
        return None;
    }
    let y = frame.p_to_y(p).ok()?;
    let ym1 = frame.y_minus_one(p).ok()?;
    let h = hermite_real(n, frame.a_quarter * ym1);
    if h == 0.0 || y == 0.0 {
        return None;
    }
    // -(sqrt(a)/2)(y^2 - 2y) = -(sqrt(a)/2)(y - 1)^2 + sqrt(a)/2
    let ln = 0.5 * y.ln() - 0.5 * frame.sqrt_a * ym1 * ym1 + 0.5 * frame.sqrt_a + h.abs().ln();
    Some((h.signum(), ln))
}

/// Bound-sector eigenfunction with normalization constant `norm`; zero for `p >= p_star`.
pub fn bound_wavefunction(n: usize, p: f64, params: &PhysParams, norm: f64) -> Result<f64> {
    let frame = SubstitutionFrame::new(params)?;
    Ok(match ln_bound_amplitude(&frame, n, p) {
        Some((sign, ln)) => norm * sign * ln.exp(),
        None => 0.0,
    })
}

/// Eigenfunction of the symmetric-ordered Hamiltonian before the similarity
/// transform; it carries `y^{-1/2}` and diverges at `p_star`.
pub fn symmetric_ordering_wavefunction(n: usize, p: f64, params: &PhysParams, norm: f64) -> Result<f64> {
    let frame = SubstitutionFrame::new(params)?;
    if p == frame.p_star {
        return Err(Error::BoundarySingularity(p));
    }
    if p > frame.p_star {
        return Ok(0.0);
    }
    let y = frame.p_to_y(p)?;
    if y == 0.0 {
        return Err(Error::BoundarySingularity(p));
    }
    Ok(match ln_bound_amplitude(&frame, n, p) {
        Some((sign, ln)) => norm * sign * (ln - y.ln()).exp(),
        None => 0.0,
    })
}

/// Sign-free log-modulus and phase of the broken-sector eigenfunction with
/// unit constant, or `None` for `p <= p_star`.
pub fn ln_broken_amplitude(frame: &SubstitutionFrame, n: usize, p: f64) -> Option<(f64, f64)> {
    if p <= frame.p_star {
        return None;
    }
    let yt = frame.p_to_ytilde(p).ok()?;
    if yt == 0.0 {
        return None;
    }
    let h = hermite(n, frame.z_broken(yt));
    if h.norm() == 0.0 {
        return None;
    }
    let ln = 0.5 * yt.ln() - 0.5 * frame.sqrt_a * yt * yt + h.norm().ln();
    let phase = -frame.sqrt_a * yt + h.arg();
    Some((ln, phase))
}

/// Broken-sector eigenfunction with constant `norm`; zero for `p <= p_star`.
pub fn broken_wavefunction(n: usize, p: f64, params: &PhysParams, norm: f64) -> Result<Complex64> {
    let frame = SubstitutionFrame::new(params)?;
    Ok(match ln_broken_amplitude(&frame, n, p) {
        Some((ln, phase)) => norm * Complex64::from_polar(ln.exp(), phase),
        None => Complex64::new(0.0, 0.0),
    })
}

/// Log of the constant giving the broken eigenfunction unit sup-norm on a
/// reference grid of 2000 points in `yt`.
pub fn broken_reference_ln_norm(frame: &SubstitutionFrame, n: usize) -> f64 {
    let width = ((2 * n + 1) as f64).sqrt() + 8.0;
    let yt_max = width / frame.a_quarter;
    let p_of = |yt: f64| frame.momentum_scale() * (1.0 + yt * yt);
    let peak = (1..=2000)
        .filter_map(|j| ln_broken_amplitude(frame, n, p_of(yt_max * j as f64 / 2000.0)))
        .map(|(ln, _)| ln)
        .fold(f64::NEG_INFINITY, f64::max);
    -peak
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Unit-normalized harmonic-oscillator momentum eigenfunction,
/// `(2^n sqrt(pi) n! sqrt(hbar omega))^{-1/2} exp(-p^2/2hbar omega) H_n(p/sqrt(hbar omega))`.
pub fn harmonic_limit_wavefunction(n: usize, p: f64, params: &PhysParams) -> f64 {
    let s = (params.hbar() * params.omega()).sqrt();
    let c = 2f64.powi(n as i32) * PI.sqrt() * factorial(n) * s;
    let u = p / s;
    (-0.5 * u * u).exp() * hermite_real(n, u) / c.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationResult {
    pub n: usize,
    /// Constant from quadrature; underflows to 0 for very small `k`.
    pub numeric_value: f64,
    pub ln_numeric_value: f64,
    /// Closed-form constant, reported for comparison only.
    pub closed_form_value: f64,
    /// Unnormalized `int_0^{p_star} |Phi_n|^2 dp`.
    pub g_a: f64,
    /// Unnormalized `int_{-inf}^0 |Phi_n|^2 dp` by quadrature.
    pub left_integral: f64,
    /// The closed-form left-half value implied by the reported normalization
    /// relation, `sqrt(hbar omega) e^{X} 2^{n-1} sqrt(pi) n! (1 + X)`,
    /// `X = 9 omega^3 / (k^2 hbar)`.
    pub closed_form_left_integral: f64,
}

/// Normalizes the bound eigenfunction by quadrature in the scaled variable
/// `xi = a^{1/4}(y - 1)`; the half-lines `p < 0` and `0 < p < p_star` map to
/// `xi > 0` and `-a^{1/4} < xi < 0`.
pub fn normalize_bound(n: usize, params: &PhysParams) -> Result<NormalizationResult> {
    if n > NORMALIZATION_MAX_LEVEL {
        return Err(Error::InvalidParameter(format!(
            "normalization supports n <= {NORMALIZATION_MAX_LEVEL}, got {n}"
        )));
    }
    let frame = SubstitutionFrame::new(params)?;
    let jac = 2.0 * frame.momentum_scale() / frame.a_quarter;
    // |Phi|^2 |dp/dy| dy without the e^{sqrt(a)} factor
    let integrand = |xi: f64| {
        let y = 1.0 + xi / frame.a_quarter;
        let h = hermite_real(n, xi);
        y * y * (-xi * xi).exp() * h * h * jac
    };
    let xi_max = ((2 * n + 1) as f64).sqrt() + 12.0;
    let left = quad::adaptive(0.0, xi_max, QUAD_REL_TOL, integrand)?.value;
    let right = quad::adaptive((-frame.a_quarter).max(-xi_max), 0.0, QUAD_REL_TOL, integrand)?.value;
    let ln_total = frame.sqrt_a + (left + right).ln();
    let lift = frame.sqrt_a.exp();
    let g_a = right * lift;
    Ok(NormalizationResult {
        n,
        numeric_value: (-0.5 * ln_total).exp(),
        ln_numeric_value: -0.5 * ln_total,
        closed_form_value: closed_form_norm_constant(n, params, g_a)?,
        g_a,
        left_integral: left * lift,
        closed_form_left_integral: closed_form_left_integral(n, params),
    })
}

fn closed_form_x(params: &PhysParams) -> f64 {
    9.0 * params.omega().powi(3) / (params.k() * params.k() * params.hbar())
}

pub fn closed_form_left_integral(n: usize, params: &PhysParams) -> f64 {
    let x = closed_form_x(params);
    (params.hbar() * params.omega()).sqrt()
        * x.exp()
        * 2f64.powi(n as i32 - 1)
        * PI.sqrt()
        * factorial(n)
        * (1.0 + x)
}

/// The closed-form normalization constant, taking the tail
/// integral `g(a)` as input.
pub fn closed_form_norm_constant(n: usize, params: &PhysParams, g_a: f64) -> Result<f64> {
    params.require_nonlinear()?;
    let x = closed_form_x(params);
    let den = (params.hbar() * params.omega()).sqrt()
        * (2f64.powi(n as i32 - 1) * PI.sqrt() * factorial(n) * (1.0 + x) + g_a);
    let radicand = (-x).exp() / den;
    if !(den > 0.0) || radicand < 0.0 {
        return Err(Error::NegativeRadicand(radicand));
    }
    Ok(radicand.sqrt())
}

/// A single quantum level with its amplitude evaluator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenState {
    pub n: usize,
    pub sector: Sector,
    pub energy: f64,
    /// Log of the normalization constant; zero means unit constant.
    pub ln_norm: f64,
    frame: SubstitutionFrame,
}

impl EigenState {
    /// Bound level normalized to unit probability by quadrature.
    pub fn bound(n: usize, params: &PhysParams) -> Result<Self> {
        let norm = normalize_bound(n, params)?;
        Ok(Self { ln_norm: norm.ln_numeric_value, ..Self::bound_unnormalized(n, params)? })
    }

    pub fn bound_unnormalized(n: usize, params: &PhysParams) -> Result<Self> {
        Ok(Self {
            n,
            sector: Sector::Bound,
            energy: bound_energy(n, params),
            ln_norm: 0.0,
            frame: SubstitutionFrame::new(params)?,
        })
    }

    /// Broken level scaled to unit sup-norm on the reference grid.
    pub fn broken(n: usize, params: &PhysParams) -> Result<Self> {
        let frame = SubstitutionFrame::new(params)?;
        Ok(Self {
            n,
            sector: Sector::Broken,
            energy: broken_energy(n, params),
            ln_norm: broken_reference_ln_norm(&frame, n),
            frame,
        })
    }

    pub fn new(n: usize, sector: Sector, params: &PhysParams) -> Result<Self> {
        match sector {
            Sector::Bound => Self::bound(n, params),
            Sector::Broken => Self::broken(n, params),
        }
    }

    /// Replaces the constant by a positive `norm`.
    pub fn with_norm(self, norm: f64) -> Self {
        Self { ln_norm: norm.ln(), ..self }
    }

    pub fn with_energy(self, energy: f64) -> Self {
        Self { energy, ..self }
    }

    /// Bound-sector constant; broken-sector constants are a free scale.
    pub fn norm_constant(&self) -> Option<f64> {
        (self.sector == Sector::Bound).then(|| self.ln_norm.exp())
    }

    pub fn params(&self) -> &PhysParams {
        self.frame.params()
    }

    pub fn frame(&self) -> &SubstitutionFrame {
        &self.frame
    }

    pub fn p_star(&self) -> f64 {
        self.frame.p_star
    }

    /// True where the state is supported.
    pub fn in_sector(&self, p: f64) -> bool {
        match self.sector {
            Sector::Bound => p <= self.frame.p_star,
            Sector::Broken => p >= self.frame.p_star,
        }
    }

    pub fn amplitude(&self, p: f64) -> Complex64 {
        match self.sector {
            Sector::Bound => match ln_bound_amplitude(&self.frame, self.n, p) {
                Some((sign, ln)) => Complex64::new(sign * (ln + self.ln_norm).exp(), 0.0),
                None => Complex64::new(0.0, 0.0),
            },
            Sector::Broken => match ln_broken_amplitude(&self.frame, self.n, p) {
                Some((ln, phase)) => Complex64::from_polar((ln + self.ln_norm).exp(), phase),
                None => Complex64::new(0.0, 0.0),
            },
        }
    }
}

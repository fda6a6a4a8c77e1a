//! Classical dynamics: numerical orbits, the closed-form periodic solution,
//! period measurement and phase-portrait contours.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ClassicalState, PhysParams};
use crate::ode::{rk4_step, Rkf45};

/// Relative energy drift tolerated along an integrated orbit.
pub const ENERGY_DRIFT_TOL: f64 = 1e-8;

/// Half-width of the excluded window around a singular phase.
pub const SINGULAR_PHASE_WINDOW: f64 = 1e-9;

const MAX_STEPS: u64 = 200_000_000;

/// Amplitude `A` and phase `delta` of a closed-form orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitParams {
    pub amplitude: f64,
    pub delta: f64,
}

impl OrbitParams {
    pub fn new(amplitude: f64, delta: f64) -> Result<Self> {
        if !(amplitude.is_finite() && amplitude >= 0.0) {
            return Err(Error::InvalidParameter(format!("amplitude must be >= 0, got {amplitude}")));
        }
        if !delta.is_finite() {
            return Err(Error::InvalidParameter("phase must be finite".into()));
        }
        Ok(Self { amplitude, delta })
    }

    /// `A < 3 omega / k`; every orbit is regular in the harmonic case.
    pub fn is_regular(&self, params: &PhysParams) -> bool {
        params.k() == 0.0 || self.amplitude < params.regular_amplitude_bound()
    }

    fn ratio(&self, params: &PhysParams) -> f64 {
        params.k() * self.amplitude / (3.0 * params.omega())
    }

    /// State at `t = 0`, the usual seed for [`integrate_orbit`].
    pub fn initial_state(&self, params: &PhysParams) -> Result<ClassicalState> {
        Ok(ClassicalState::new(
            exact_position(self, 0.0, params)?,
            exact_velocity(self, 0.0, params)?,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub integrator: String,
    pub step: f64,
    pub period: Option<f64>,
    /// `max |H - H0| / max(|H0|, 1)` over the run.
    pub energy_drift: f64,
}

/// Time-sampled orbit with the momentum and energy recorded at each sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ClassicalState>,
    pub momenta: Vec<f64>,
    pub energies: Vec<f64>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    /// The equilibrium at the origin, recorded as a single sample at `t = 0`.
    pub fn rest(params: &PhysParams) -> Result<Self> {
        Self::from_samples(vec![0.0], vec![ClassicalState::new(0.0, 0.0)], "fixed-point", 0.0, params)
    }

    fn from_samples(
        times: Vec<f64>,
        states: Vec<ClassicalState>,
        integrator: &str,
        step: f64,
        params: &PhysParams,
    ) -> Result<Self> {
        let momenta = states
            .iter()
            .map(|s| params.conjugate_momentum(*s))
            .collect::<Result<Vec<_>>>()?;
        let energies = states
            .iter()
            .zip(&momenta)
            .map(|(s, &p)| params.hamiltonian(s.x, p))
            .collect::<Result<Vec<_>>>()?;
        let e0 = energies[0];
        let energy_drift = energies.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max) / e0.abs().max(1.0);
        if energy_drift > ENERGY_DRIFT_TOL {
            log::warn!("{integrator}: relative energy drift {energy_drift:e} exceeds {ENERGY_DRIFT_TOL:e}");
        }
        let mut traj = Self {
            times,
            states,
            momenta,
            energies,
            meta: TrajectoryMeta {
                integrator: integrator.to_string(),
                step,
                period: None,
                energy_drift,
            },
        };
        traj.meta.period = measure_period(&traj).ok();
        Ok(traj)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Right-hand side `(xdot, -k x xdot - (k^2/9) x^3 - omega^2 x)`.
pub fn vector_field(state: ClassicalState, params: &PhysParams) -> (f64, f64) {
    let ClassicalState { x, xdot } = state;
    let k = params.k();
    let w2 = params.omega() * params.omega();
    (xdot, -k * x * xdot - k * k / 9.0 * x * x * x - w2 * x)
}

/// Divergence of the flow, `-k x`.
pub fn divergence(state: ClassicalState, params: &PhysParams) -> f64 {
    -params.k() * state.x
}

/// Step `10^-3 * 2 pi / omega`.
pub fn default_dt(params: &PhysParams) -> f64 {
    1e-3 * 2.0 * PI / params.omega()
}

/// Fixed-step RK4 from `initial` over `[0, t_end]`. The step is shrunk
/// slightly so that an integer number of steps lands on `t_end`.
pub fn integrate_orbit(initial: ClassicalState, t_end: f64, dt: f64, params: &PhysParams) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) || !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter(format!("need dt > 0 and t_end > 0, got dt={dt}, t_end={t_end}")));
    }
    let steps = (t_end / dt).ceil();
    if steps > MAX_STEPS as f64 {
        return Err(Error::StepOverflow { steps: steps as u64, limit: MAX_STEPS });
    }
    let n = steps as usize;
    let h = t_end / n as f64;
    let rhs = |_t: f64, y: &[f64; 2]| {
        let (a, b) = vector_field(ClassicalState::new(y[0], y[1]), params);
        [a, b]
    };
    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    let mut y = [initial.x, initial.xdot];
    times.push(0.0);
    states.push(initial);
    for i in 0..n {
        y = rk4_step(&rhs, i as f64 * h, &y, h);
        times.push((i + 1) as f64 * h);
        states.push(ClassicalState::new(y[0], y[1]));
    }
    Trajectory::from_samples(times, states, "rk4", h, params)
}

/// Adaptive RKF45 alternative to [`integrate_orbit`], sampled every `sample_dt`.
pub fn integrate_orbit_adaptive(
    initial: ClassicalState,
    t_end: f64,
    sample_dt: f64,
    rel_tol: f64,
    params: &PhysParams,
) -> Result<Trajectory> {
    if !(sample_dt > 0.0) || !(t_end > 0.0) || !(rel_tol > 0.0) {
        return Err(Error::InvalidParameter("need sample_dt, t_end, rel_tol > 0".into()));
    }
    let n = (t_end / sample_dt).ceil() as usize;
    let h = t_end / n as f64;
    let solver = Rkf45 { initial_step: Some(h), abs_tol: rel_tol * 1e-3, ..Rkf45::with_rel_tol(rel_tol) };
    let rhs = |_t: f64, y: &[f64; 2]| {
        let (a, b) = vector_field(ClassicalState::new(y[0], y[1]), params);
        [a, b]
    };
    let mut times = vec![0.0];
    let mut states = vec![initial];
    let mut y = [initial.x, initial.xdot];
    for i in 0..n {
        let (t0, t1) = (i as f64 * h, (i + 1) as f64 * h);
        y = solver.integrate(rhs, t0, y, t1, |_, _| {})?;
        times.push(t1);
        states.push(ClassicalState::new(y[0], y[1]));
    }
    Trajectory::from_samples(times, states, "rkf45", h, params)
}

fn check_singular_phase(orbit: &OrbitParams, t: f64, params: &PhysParams) -> Result<()> {
    if orbit.is_regular(params) {
        return Ok(());
    }
    let c = orbit.ratio(params);
    let singular = (1.0 / c).acos();
    let phase = params.omega() * t + orbit.delta;
    for s in [singular, -singular] {
        let d = (phase - s).rem_euclid(2.0 * PI);
        if d.min(2.0 * PI - d) < SINGULAR_PHASE_WINDOW {
            return Err(Error::SingularPhase { t });
        }
    }
    Ok(())
}

/// `x(t) = A sin(omega t + delta) / (1 - (kA/3omega) cos(omega t + delta))`.
pub fn exact_position(orbit: &OrbitParams, t: f64, params: &PhysParams) -> Result<f64> {
    check_singular_phase(orbit, t, params)?;
    let phase = params.omega() * t + orbit.delta;
    let c = orbit.ratio(params);
    Ok(orbit.amplitude * phase.sin() / (1.0 - c * phase.cos()))
}

/// Analytic time derivative of [`exact_position`],
/// `A omega (cos phi - c) / (1 - c cos phi)^2`.
pub fn exact_velocity(orbit: &OrbitParams, t: f64, params: &PhysParams) -> Result<f64> {
    check_singular_phase(orbit, t, params)?;
    let phase = params.omega() * t + orbit.delta;
    let c = orbit.ratio(params);
    let den = 1.0 - c * phase.cos();
    Ok(orbit.amplitude * params.omega() * (phase.cos() - c) / (den * den))
}

/// `p(t) = A omega cos(phi) (1 - (kA/6omega) cos(phi))`; bounded for every `A`.
pub fn exact_momentum(orbit: &OrbitParams, t: f64, params: &PhysParams) -> f64 {
    let phase = params.omega() * t + orbit.delta;
    let c = phase.cos();
    orbit.amplitude * params.omega() * c * (1.0 - 0.5 * orbit.ratio(params) * c)
}

pub fn orbit_energy(orbit: &OrbitParams, params: &PhysParams) -> f64 {
    0.5 * orbit.amplitude * orbit.amplitude * params.omega() * params.omega()
}

/// Momenta where `U(p) = E`. Above the separatrix energy the lower root in
/// `y` leaves the real branch and the upper end is pinned at `p_star`.
pub fn turning_points(energy: f64, params: &PhysParams) -> Result<(f64, f64)> {
    params.require_nonlinear()?;
    if !(energy >= 0.0) {
        return Err(Error::InvalidParameter(format!("energy must be >= 0, got {energy}")));
    }
    let w2 = params.omega() * params.omega();
    let r = params.k() * (2.0 * energy).sqrt() / (3.0 * w2);
    let scale = 1.5 * w2 / params.k();
    // 1 - y^2 factored as (1 - y)(1 + y) at y = 1 -+ r
    let p_lo = -scale * r * (2.0 + r);
    let p_hi = if r < 1.0 { scale * r * (2.0 - r) } else { params.p_star() };
    Ok((p_lo, p_hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourPoint {
    pub p: f64,
    pub x_plus: f64,
    pub x_minus: f64,
}

/// Level set `H(x, p) = E` as two branches `x = +-sqrt(2 m(p) (E - U(p)))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseContour {
    pub energy: f64,
    /// Ordered by increasing `p`.
    pub points: Vec<ContourPoint>,
    pub p_range: (f64, f64),
    /// True when `E` is at or above the separatrix and the curve runs off to
    /// `|x| -> infinity` as `p -> p_star`.
    pub open: bool,
}

/// Samples the contour uniformly in `y = sqrt(1 - 2kp/3omega^2)` between the
/// turning points. Open contours are cut at `y = 1e-6 * y_max` instead of `y = 0`.
pub fn phase_contour(energy: f64, n_points: usize, params: &PhysParams) -> Result<PhaseContour> {
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(Error::InvalidParameter(format!("contour energy must be > 0, got {energy}")));
    }
    if n_points < 2 {
        return Err(Error::InvalidParameter("contour needs at least two points".into()));
    }
    let p_range = turning_points(energy, params)?;
    let w2 = params.omega() * params.omega();
    let r = params.k() * (2.0 * energy).sqrt() / (3.0 * w2);
    let open = r >= 1.0;
    let y_hi = 1.0 + r;
    let y_lo = if open { 1e-6 * y_hi } else { 1.0 - r };
    let scale = 1.5 * w2 / params.k();
    let mut points = Vec::with_capacity(n_points);
    for j in 0..n_points {
        let last = j + 1 == n_points;
        let y = if last { y_lo } else { y_hi + (y_lo - y_hi) * j as f64 / (n_points - 1) as f64 };
        let p = if j == 0 {
            p_range.0
        } else if last && !open {
            p_range.1
        } else {
            scale * (1.0 - y) * (1.0 + y)
        };
        let turning = j == 0 || (last && !open);
        let x = if turning {
            0.0
        } else {
            let u = params.potential(p)?;
            (2.0 * (energy - u) / params.stiffness(p)).max(0.0).sqrt()
        };
        points.push(ContourPoint { p, x_plus: x, x_minus: -x });
    }
    Ok(PhaseContour { energy, points, p_range, open })
}

/// Mean spacing of upward zero crossings of `x`. Crossing times come from the
/// cubic Hermite interpolant built on `(x, xdot)` at the bracketing samples.
pub fn measure_period(traj: &Trajectory) -> Result<f64> {
    let crossings = upward_crossings(traj);
    if crossings.len() < 2 {
        return Err(Error::InsufficientCrossings(crossings.len()));
    }
    Ok((crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64)
}

pub fn upward_crossings(traj: &Trajectory) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 0..traj.len().saturating_sub(1) {
        let (s0, s1) = (traj.states[i], traj.states[i + 1]);
        if s0.x <= 0.0 && s1.x > 0.0 {
            let (t0, t1) = (traj.times[i], traj.times[i + 1]);
            out.push(hermite_root(t0, t1, s0, s1));
        }
    }
    out
}

fn hermite_root(t0: f64, t1: f64, s0: ClassicalState, s1: ClassicalState) -> f64 {
    let h = t1 - t0;
    let eval = |s: f64| {
        let (s2, s3) = (s * s, s * s * s);
        (2.0 * s3 - 3.0 * s2 + 1.0) * s0.x
            + (s3 - 2.0 * s2 + s) * h * s0.xdot
            + (-2.0 * s3 + 3.0 * s2) * s1.x
            + (s3 - s2) * h * s1.xdot
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if eval(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    t0 + 0.5 * (lo + hi) * h
}

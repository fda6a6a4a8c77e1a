//! Self-verification suites run by `lienard verify`. Each check compares a
//! computed quantity with an independent reference and a fixed tolerance.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::{self, EigenState, Sector};
use crate::classical::{self, OrbitParams};
use crate::error::Result;
use crate::exec::Execution;
use crate::hermite;
use crate::model::{ClassicalState, PhysParams};
use crate::numeric::{self, ResidualConfig, ShootingConfig};
use crate::semiclassical;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Classical,
    Semiclassical,
    Quantum,
    All,
}

impl Suite {
    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Classical => "classical",
            Suite::Semiclassical => "semiclassical",
            Suite::Quantum => "quantum",
            Suite::All => "all",
        }
    }

    fn parts(self) -> &'static [Suite] {
        match self {
            Suite::All => &[Suite::Classical, Suite::Semiclassical, Suite::Quantum],
            Suite::Classical => &[Suite::Classical],
            Suite::Semiclassical => &[Suite::Semiclassical],
            Suite::Quantum => &[Suite::Quantum],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "classical" => Ok(Suite::Classical),
            "semiclassical" => Ok(Suite::Semiclassical),
            "quantum" => Ok(Suite::Quantum),
            "all" => Ok(Suite::All),
            _ => Err(format!("unknown suite {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    /// Worst observed deviation (or the measured value for lower bounds).
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Outcome of one comparison.
enum Bound {
    AtMost(f64),
    AtLeast(f64),
}

struct Spec {
    suite: Suite,
    name: &'static str,
    run: fn() -> Result<(f64, Bound, String)>,
}

fn evaluate(spec: &Spec) -> Check {
    match (spec.run)() {
        Ok((value, bound, detail)) => {
            let (passed, tolerance) = match bound {
                Bound::AtMost(t) => (value <= t, t),
                Bound::AtLeast(t) => (value >= t, t),
            };
            Check { suite: spec.suite, name: spec.name.to_string(), passed, value, tolerance, detail }
        }
        Err(e) => Check {
            suite: spec.suite,
            name: spec.name.to_string(),
            passed: false,
            value: f64::NAN,
            tolerance: f64::NAN,
            detail: format!("error: {e}"),
        },
    }
}

pub fn run_suite(suite: Suite, exec: Execution) -> VerifyReport {
    let specs: Vec<&Spec> = suite
        .parts()
        .iter()
        .flat_map(|s| CHECKS.iter().filter(move |c| c.suite == *s))
        .collect();
    let checks = exec.map(&specs, |s| evaluate(s));
    VerifyReport { suite, passed: checks.iter().all(|c| c.passed), checks }
}

fn unit() -> PhysParams {
    PhysParams::default()
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

const CHECKS: &[Spec] = &[
    Spec { suite: Suite::Classical, name: "rk4 matches closed-form orbit", run: orbit_fidelity },
    Spec { suite: Suite::Classical, name: "rk4 energy drift", run: energy_drift },
    Spec { suite: Suite::Classical, name: "isochronous period", run: isochronicity },
    Spec { suite: Suite::Classical, name: "closed form solves the equation of motion", run: ode_residual },
    Spec { suite: Suite::Classical, name: "momentum map along exact orbit", run: momentum_map },
    Spec { suite: Suite::Classical, name: "turning points", run: turning_points },
    Spec { suite: Suite::Classical, name: "phase contours lie on their level set", run: contour_level },
    Spec { suite: Suite::Classical, name: "legendre transform consistency", run: legendre },
    Spec { suite: Suite::Classical, name: "hamiltonian even in x", run: parity },
    Spec { suite: Suite::Classical, name: "harmonic limit of the hamiltonian", run: hamiltonian_limit },
    Spec { suite: Suite::Semiclassical, name: "action integral equals pi A^2 omega", run: action_identity },
    Spec { suite: Suite::Semiclassical, name: "loop integral along exact orbit", run: loop_integral },
    Spec { suite: Suite::Semiclassical, name: "semiclassical levels", run: semiclassical_levels },
    Spec { suite: Suite::Quantum, name: "shooting spectrum", run: shooting_spectrum },
    Spec { suite: Suite::Quantum, name: "eigenfunction residuals", run: residuals },
    Spec { suite: Suite::Quantum, name: "detuned residual", run: detuned_residual },
    Spec { suite: Suite::Quantum, name: "guard band independence", run: guard_band },
    Spec { suite: Suite::Quantum, name: "normalization", run: normalization },
    Spec { suite: Suite::Quantum, name: "gaussian-moment norm oracle", run: norm_oracle },
    Spec { suite: Suite::Quantum, name: "harmonic limit of eigenfunctions", run: wavefunction_limit },
    Spec { suite: Suite::Quantum, name: "hermite derivative identity", run: hermite_identity },
    Spec { suite: Suite::Quantum, name: "bound amplitudes real", run: bound_real },
    Spec { suite: Suite::Quantum, name: "broken amplitudes not real", run: broken_complex },
    Spec { suite: Suite::Quantum, name: "node law", run: node_law },
    Spec { suite: Suite::Quantum, name: "shooting shape recovery", run: shape_recovery },
];

const AMPLITUDES: [f64; 4] = [0.5, 1.0, 2.0, 2.9];

fn rk4_orbit(a: f64) -> Result<(OrbitParams, classical::Trajectory)> {
    let p = unit();
    let orbit = OrbitParams::new(a, 0.0)?;
    let traj = classical::integrate_orbit(orbit.initial_state(&p)?, 20.0 * PI, 1e-3, &p)?;
    Ok((orbit, traj))
}

fn orbit_fidelity() -> Result<(f64, Bound, String)> {
    let p = unit();
    let mut worst = 0.0f64;
    for a in AMPLITUDES {
        let (orbit, traj) = rk4_orbit(a)?;
        for (t, s) in traj.times.iter().zip(&traj.states) {
            worst = worst.max((s.x - classical::exact_position(&orbit, *t, &p)?).abs());
        }
    }
    Ok((worst, Bound::AtMost(1e-6), "A in {0.5, 1, 2, 2.9}, 10 periods, dt 1e-3".into()))
}

fn energy_drift() -> Result<(f64, Bound, String)> {
    let mut worst = 0.0f64;
    for a in AMPLITUDES {
        worst = worst.max(rk4_orbit(a)?.1.meta.energy_drift);
    }
    Ok((worst, Bound::AtMost(1e-8), "relative drift over 10 periods".into()))
}

fn isochronicity() -> Result<(f64, Bound, String)> {
    let mut worst = 0.0f64;
    for a in [0.1, 0.5, 1.0, 2.0, 2.9] {
        let traj = rk4_orbit(a)?.1;
        worst = worst.max((classical::measure_period(&traj)? - 2.0 * PI).abs());
    }
    Ok((worst, Bound::AtMost(1e-6), "|T - 2 pi| over A in {0.1, ..., 2.9}".into()))
}

fn ode_residual() -> Result<(f64, Bound, String)> {
    let p = unit();
    let h = 1e-4;
    let mut worst = 0.0f64;
    for a in AMPLITUDES {
        let orbit = OrbitParams::new(a, 0.4)?;
        for i in 0..200 {
            let t = 0.05 + i as f64 * 2.0 * PI / 200.0;
            let x = |s: f64| classical::exact_position(&orbit, s, &p);
            let (m2, m1, c, p1, p2) = (x(t - 2.0 * h)?, x(t - h)?, x(t)?, x(t + h)?, x(t + 2.0 * h)?);
            let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
            let d2 = (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h);
            let r = d2 + c * d1 + c * c * c / 9.0 + c;
            worst = worst.max(r.abs() / (1.0 + c.abs().powi(3)));
        }
    }
    Ok((worst, Bound::AtMost(1e-6), "5-point differences, h = 1e-4, 200 times per orbit".into()))
}

fn momentum_map() -> Result<(f64, Bound, String)> {
    let p = unit();
    let mut worst = 0.0f64;
    for a in AMPLITUDES {
        let orbit = OrbitParams::new(a, 0.3)?;
        for i in 0..100 {
            let t = i as f64 * 0.0628;
            let s = ClassicalState::new(
                classical::exact_position(&orbit, t, &p)?,
                classical::exact_velocity(&orbit, t, &p)?,
            );
            let want = classical::exact_momentum(&orbit, t, &p);
            let got = p.conjugate_momentum(s)?;
            worst = worst.max((got - want).abs() / want.abs().max(1e-300).max(1.0));
        }
    }
    Ok((worst, Bound::AtMost(1e-8), "relative".into()))
}

fn turning_points() -> Result<(f64, Bound, String)> {
    let p = unit();
    let (a, b) = classical::turning_points(0.5, &p)?;
    let (c, d) = classical::turning_points(4.5, &p)?;
    let err = max_of([(a + 7.0 / 6.0).abs(), (b - 5.0 / 6.0).abs(), (c + 4.5).abs(), (d - 1.5).abs()].into_iter());
    Ok((err, Bound::AtMost(1e-12), "E = 0.5 and 4.5 at omega = k = 1".into()))
}

fn contour_level() -> Result<(f64, Bound, String)> {
    let p = unit();
    let mut worst = 0.0f64;
    for e in [0.5, 1.0, 2.0, 3.0, 4.5] {
        let c = classical::phase_contour(e, 400, &p)?;
        for pt in &c.points {
            for x in [pt.x_plus, pt.x_minus] {
                worst = worst.max((p.hamiltonian(x, pt.p)? - e).abs() / e.max(1.0));
            }
        }
    }
    Ok((worst, Bound::AtMost(1e-10), "E in {0.5, 1, 2, 3, 4.5}".into()))
}

fn legendre() -> Result<(f64, Bound, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let p = PhysParams::new(rng.random_range(0.5..2.0), rng.random_range(0.1..2.0), 1.0)?;
        let s = ClassicalState::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        // the branch D = 3 omega^2 + k (xdot + k x^2/3) > 0 connected to the origin
        if 3.0 * p.omega().powi(2) + p.k() * (s.xdot + p.k() * s.x * s.x / 3.0) <= 0.0 {
            continue;
        }
        let mom = p.conjugate_momentum(s)?;
        let h = p.hamiltonian(s.x, mom)?;
        let l = s.xdot * mom - p.lagrangian(s)?;
        worst = worst.max((h - l).abs() / h.abs().max(1.0));
    }
    Ok((worst, Bound::AtMost(1e-12), "relative, 500 random states".into()))
}

fn parity() -> Result<(f64, Bound, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let p = unit();
    let mut mismatches = 0.0;
    for _ in 0..1000 {
        let x: f64 = rng.random_range(-10.0..10.0);
        let q: f64 = rng.random_range(-50.0..1.5);
        if p.hamiltonian(x, q)?.to_bits() != p.hamiltonian(-x, q)?.to_bits() {
            mismatches += 1.0;
        }
    }
    Ok((mismatches, Bound::AtMost(0.0), "bitwise mismatches in 1000 samples".into()))
}

fn hamiltonian_limit() -> Result<(f64, Bound, String)> {
    let p = PhysParams::new(1.0, 1e-6, 1.0)?;
    let mut worst = 0.0f64;
    for i in 0..=40 {
        for j in 0..=40 {
            let x = -2.0 + 0.1 * i as f64;
            let q = -2.0 + 0.1 * j as f64;
            worst = worst.max((p.hamiltonian(x, q)? - 0.5 * (q * q + x * x)).abs());
        }
    }
    Ok((worst, Bound::AtMost(1e-4), "k = 1e-6 on [-2, 2]^2".into()))
}

fn action_identity() -> Result<(f64, Bound, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = PhysParams::new(rng.random_range(0.3..3.0), rng.random_range(0.05..3.0), 1.0)?;
        let a = rng.random_range(0.0..0.99) * p.regular_amplitude_bound();
        let want = PI * a * a * p.omega();
        let got = semiclassical::action_integral(a, &p)?;
        worst = worst.max((got - want).abs() / want.max(1.0));
    }
    Ok((worst, Bound::AtMost(1e-10), "20 random regular orbits".into()))
}

fn loop_integral() -> Result<(f64, Bound, String)> {
    let p = unit();
    let mut worst = 0.0f64;
    for a in [0.5, 1.0, 2.0] {
        let orbit = OrbitParams::new(a, 0.0)?;
        let mut err = None;
        let direct = crate::quad::composite(0.0, 2.0 * PI, 16, |t| {
            let v = classical::exact_velocity(&orbit, t, &p);
            match v {
                Ok(v) => classical::exact_momentum(&orbit, t, &p) * v,
                Err(e) => {
                    err = Some(e);
                    0.0
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        let quad = semiclassical::action_integral(a, &p)?;
        worst = worst.max((direct - quad).abs() / quad);
    }
    Ok((worst, Bound::AtMost(1e-8), "time quadrature of p dx/dt".into()))
}

fn semiclassical_levels() -> Result<(f64, Bound, String)> {
    let p = unit();
    let levels = semiclassical::semiclassical_spectrum(&p)?;
    let top = levels.last().map(|l| l.n);
    let mut err = if top == Some(3) { 0.0 } else { 1.0 };
    for l in &levels {
        err += (l.energy - analytic::bound_energy(l.n, &p)).abs();
    }
    Ok((err, Bound::AtMost(0.0), format!("N = {top:?}")))
}

fn shooting_spectrum() -> Result<(f64, Bound, String)> {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (w, k) in [(1.0, 1.0), (2.0, 1.0), (1.0, 0.5)] {
        let p = PhysParams::new(w, k, 1.0)?;
        let e = numeric::numeric_spectrum(4, &ShootingConfig::default(), &p, Execution::default())?;
        for (n, v) in e.iter().enumerate() {
            let want = analytic::bound_energy(n, &p);
            worst = worst.max((v - want).abs() / want);
        }
    }
    Ok((worst, Bound::AtMost(1e-6), format!("relative, n <= 4, {:.2?}", start.elapsed())))
}

fn residuals() -> Result<(f64, Bound, String)> {
    let p = unit();
    let cfg = ResidualConfig::default();
    let mut worst = 0.0f64;
    for (sector, top) in [(Sector::Bound, 5), (Sector::Broken, 3)] {
        for n in 0..=top {
            let s = EigenState::new(n, sector, &p)?;
            let grid = numeric::default_grid(n, sector, 400, &p, &cfg)?;
            worst = worst.max(numeric::residual_norm(&s, &grid, &p)?.residual_norm);
        }
    }
    Ok((worst, Bound::AtMost(1e-8), "bound n <= 5, broken n <= 3".into()))
}

fn ground_grid() -> Vec<f64> {
    (0..200).map(|i| -5.0 + 6.4 * i as f64 / 199.0).collect()
}

fn detuned_residual() -> Result<(f64, Bound, String)> {
    let p = unit();
    let s = EigenState::bound(0, &p)?;
    let r = numeric::residual_norm(&s.with_energy(s.energy + 0.1), &ground_grid(), &p)?;
    Ok((r.residual_norm, Bound::AtLeast(1e-2), "ground state at E0 + 0.1".into()))
}

fn guard_band() -> Result<(f64, Bound, String)> {
    let p = unit();
    let base = ResidualConfig::default();
    let wide = ResidualConfig { guard_band: 2.0 * base.guard_band, ..base };
    let mut worst = 0.0f64;
    for (sector, n) in [(Sector::Bound, 0), (Sector::Bound, 3), (Sector::Broken, 1)] {
        let s = EigenState::new(n, sector, &p)?;
        let grid = numeric::default_grid(n, sector, 400, &p, &base)?;
        let a = numeric::residual_norm_with(&s, &grid, &p, &base, Execution::Sequential)?;
        let b = numeric::residual_norm_with(&s, &grid, &p, &wide, Execution::Sequential)?;
        worst = worst.max((a.residual_norm - b.residual_norm).abs());
    }
    Ok((worst, Bound::AtMost(1e-9), "guard band 1e-3 vs 2e-3".into()))
}

fn normalization() -> Result<(f64, Bound, String)> {
    let p = unit();
    let mut worst = 0.0f64;
    for n in 0..=3 {
        let s = EigenState::bound(n, &p)?;
        worst = worst.max((numeric::quadrature_norm(&s, &p)? - 1.0).abs());
    }
    Ok((worst, Bound::AtMost(1e-8), "n = 0..3".into()))
}

fn norm_oracle() -> Result<(f64, Bound, String)> {
    let p = unit();
    let s = EigenState::bound_unnormalized(0, &p)?;
    let q = numeric::quadrature_norm_converged(&s, &p)?;
    let oracle = 9f64.exp() * (19.0 * PI.sqrt() / 36.0 + 1.0 / 3.0);
    Ok(((q.outer - oracle).abs() / oracle, Bound::AtMost(1e-6), "p < 0 half, n = 0".into()))
}

fn wavefunction_limit() -> Result<(f64, Bound, String)> {
    let p = PhysParams::new(1.0, 1e-3, 1.0)?;
    let mut worst = 0.0f64;
    for n in 0..=1 {
        let s = EigenState::bound(n, &p)?;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        for i in 0..=1000 {
            let q = -5.0 + 0.01 * i as f64;
            let d = s.amplitude(q).re - sign * analytic::harmonic_limit_wavefunction(n, q, &p);
            worst = worst.max(d.abs());
        }
    }
    Ok((worst, Bound::AtMost(1e-3), "k = 1e-3, n = 0, 1, p in [-5, 5]".into()))
}

fn hermite_identity() -> Result<(f64, Bound, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for i in 0..50 {
        let z = if i % 2 == 0 {
            Complex64::new(rng.random_range(-3.0..3.0), 0.0)
        } else {
            Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0))
        };
        for n in 1..=10 {
            let h = |m: usize| hermite::hermite(m, z);
            let scale = h(n + 1).norm().max(z.norm() * h(n).norm()).max(1.0);
            let rec = h(n + 1) - (2.0 * z * h(n) - 2.0 * n as f64 * h(n - 1));
            let d1 = hermite::hermite_derivative(n, z);
            let d2 = if n >= 2 { 4.0 * (n * (n - 1)) as f64 * h(n - 2) } else { Complex64::new(0.0, 0.0) };
            let der = d2 - 2.0 * z * d1 + 2.0 * n as f64 * h(n);
            worst = worst.max(rec.norm() / scale).max(der.norm() / scale);
        }
    }
    Ok((worst, Bound::AtMost(1e-10), "recurrence and Hermite equation, 50 points, n <= 10".into()))
}

fn bound_real() -> Result<(f64, Bound, String)> {
    let p = unit();
    let mut worst = 0.0f64;
    for n in 0..=5 {
        let s = EigenState::bound(n, &p)?;
        for i in 0..100 {
            worst = worst.max(s.amplitude(-6.0 + 0.075 * i as f64).im.abs());
        }
    }
    Ok((worst, Bound::AtMost(0.0), "largest imaginary part".into()))
}

fn broken_complex() -> Result<(f64, Bound, String)> {
    let p = unit();
    let mut real_points = 0.0;
    for n in 0..=3 {
        let s = EigenState::broken(n, &p)?;
        for i in 0..20 {
            let v = s.amplitude(1.6 + 0.17 * i as f64);
            if v.im.abs() <= 1e-12 * v.norm() {
                real_points += 1.0;
            }
        }
    }
    Ok((real_points, Bound::AtMost(0.0), "real-valued samples among 80".into()))
}

fn node_law() -> Result<(f64, Bound, String)> {
    let p = unit();
    let mut wrong = 0.0;
    for n in 0..=4 {
        if numeric::shoot_bound_state(n, &ShootingConfig::default(), &p)?.nodes != n {
            wrong += 1.0;
        }
    }
    Ok((wrong, Bound::AtMost(0.0), "levels with the wrong zero count, n <= 4".into()))
}

fn shape_recovery() -> Result<(f64, Bound, String)> {
    let p = unit();
    let s = numeric::shoot_bound_state(0, &ShootingConfig::default(), &p)?;
    let ys: Vec<f64> = (0..=290).map(|i| 0.1 + 0.01 * i as f64).collect();
    let got = s.sample(&ys)?;
    let exact = |y: f64| -> Result<f64> { analytic::bound_wavefunction(0, analytic::y_to_p(y, &p)?, &p, 1.0) };
    let at_one = s.sample(&[1.0])?[0];
    let scale = exact(1.0)? / at_one;
    let mut worst = 0.0f64;
    let mut peak = 0.0f64;
    for (y, g) in ys.iter().zip(&got) {
        let e = exact(*y)?;
        peak = peak.max(e.abs());
        worst = worst.max((g * scale - e).abs());
    }
    Ok((worst / peak, Bound::AtMost(1e-6), "relative sup norm on y in [0.1, 3]".into()))
}

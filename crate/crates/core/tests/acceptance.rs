//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Reference values are computed here
//! from closed forms, independently of the library's own evaluators.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::factorial::factorial;

use lienard::analytic::{self, EigenState, Sector};
use lienard::classical;
use lienard::numeric::{self, ResidualConfig, ShootingConfig};
use lienard::{hermite, semiclassical, ClassicalState, Execution, PhysParams};

const SPECTRUM_REL_TOL: f64 = 1e-6;
const SPECTRUM_TIME_LIMIT: Duration = Duration::from_secs(10);
const ACTION_REL_TOL: f64 = 1e-10;
const ORBIT_TOL: f64 = 1e-6;
const DRIFT_TOL: f64 = 1e-8;
const PERIOD_TOL: f64 = 1e-6;
const RESIDUAL_TOL: f64 = 1e-8;
const DETUNED_MIN: f64 = 1e-2;
const NORM_TOL: f64 = 1e-8;
const NORM_ORACLE_REL_TOL: f64 = 1e-6;
const HARMONIC_WAVE_TOL: f64 = 1e-3;
const HARMONIC_MAP_TOL: f64 = 1e-4;
const CONTOUR_TOL: f64 = 1e-10;
const TURNING_TOL: f64 = 1e-12;
const HERMITE_TOL: f64 = 1e-10;
const LEGENDRE_TOL: f64 = 1e-12;

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn params(w: f64, k: f64, h: f64) -> PhysParams {
    PhysParams::new(w, k, h).expect("valid parameters")
}

/// `x(t) = A sin(wt + d) / (1 - (kA/3w) cos(wt + d))`.
fn orbit_oracle(a: f64, w: f64, k: f64, t: f64) -> f64 {
    let phase = w * t;
    a * phase.sin() / (1.0 - k * a / (3.0 * w) * phase.cos())
}

/// `H = w^2 s x^2 / 2 + (9 w^4 / 2k^2)(sqrt(s) - 1)^2` with `s = 1 - 2kp/3w^2`.
fn hamiltonian_oracle(x: f64, p: f64, w: f64, k: f64) -> f64 {
    let w2 = w * w;
    let s = 1.0 - 2.0 * k * p / (3.0 * w2);
    0.5 * w2 * s * x * x + 4.5 * w2 * w2 / (k * k) * (s.sqrt() - 1.0).powi(2)
}

/// Roots of `U(p) = E`: `sqrt(s) = 1 -+ sqrt(2E) k / 3w^2`.
fn turning_oracle(e: f64, w: f64, k: f64) -> (f64, f64) {
    let w2 = w * w;
    let r = k * (2.0 * e).sqrt() / (3.0 * w2);
    let p = |y: f64| 1.5 * w2 / k * (1.0 - y * y);
    (p(1.0 + r), p(1.0 - r))
}

/// Harmonic-oscillator momentum eigenfunction.
fn harmonic_oracle(n: usize, p: f64, w: f64, hbar: f64) -> f64 {
    let xi = p / (hbar * w).sqrt();
    let h = match n {
        0 => 1.0,
        1 => 2.0 * xi,
        _ => unreachable!(),
    };
    let c = 1.0 / ((PI * hbar * w).sqrt() * 2f64.powi(n as i32) * factorial(n as u64)).sqrt();
    c * h * (-0.5 * xi * xi).exp()
}

fn explicit_hermite(n: usize, z: Complex64) -> Complex64 {
    // H_n(z) = n! sum_m (-1)^m (2z)^(n-2m) / (m! (n-2m)!)
    (0..=n / 2)
        .map(|m| {
            let c = (-1f64).powi(m as i32) * factorial(n as u64) / (factorial(m as u64) * factorial((n - 2 * m) as u64));
            c * (2.0 * z).powi((n - 2 * m) as i32)
        })
        .sum()
}

fn simpson(a: f64, b: f64, m: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / m as f64;
    let inner: f64 = (1..m).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (w, k) in [(1.0, 1.0), (2.0, 1.0), (1.0, 0.5)] {
        let p = params(w, k, 1.0);
        let energies = match numeric::numeric_spectrum(4, &ShootingConfig::default(), &p, Execution::default()) {
            Ok(e) => e,
            Err(e) => return (false, format!("({w},{k},1): {e}")),
        };
        for (n, e) in energies.iter().enumerate() {
            let want = (n as f64 + 0.5) * w;
            worst = worst.max(((e - want) / want).abs());
        }
    }
    let elapsed = start.elapsed();
    (
        worst <= SPECTRUM_REL_TOL && elapsed < SPECTRUM_TIME_LIMIT,
        format!("max rel error {worst:.2e} (tol {SPECTRUM_REL_TOL:.0e}), {:.2}s (limit 10s)", elapsed.as_secs_f64()),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (w, k) = (rng.random_range(0.2..3.0), rng.random_range(0.05..3.0));
        let a = rng.random_range(0.01..0.99) * 3.0 * w / k;
        let want = PI * a * a * w;
        match semiclassical::action_integral(a, &params(w, k, 1.0)) {
            Ok(got) => worst = worst.max(((got - want) / want).abs()),
            Err(e) => return (false, format!("A={a}: {e}")),
        }
    }
    let p = params(1.0, 1.0, 1.0);
    // largest n with A_n^2 = (2n + 1) hbar / w below (3w/k)^2
    let top = (0..).take_while(|&n| (2 * n + 1) as f64 * p.hbar() / p.omega() < (3.0 * p.omega() / p.k()).powi(2)).last();
    let levels = semiclassical::semiclassical_spectrum(&p).unwrap_or_default();
    let exact = levels.iter().all(|l| l.energy == (l.n as f64 + 0.5) * p.hbar() * p.omega());
    let got_top = levels.last().map(|l| l.n);
    (
        worst <= ACTION_REL_TOL && exact && got_top == top && top == Some(3),
        format!("action rel error {worst:.2e} (tol {ACTION_REL_TOL:.0e}) over 20 orbits; N = {got_top:?} (expected {top:?}); levels exact: {exact}"),
    )
}

/// First-order interpolated upward zero crossings.
fn crossings(times: &[f64], xs: &[f64]) -> Vec<f64> {
    (1..xs.len())
        .filter(|&i| xs[i - 1] < 0.0 && xs[i] >= 0.0)
        .map(|i| times[i - 1] + (times[i] - times[i - 1]) * xs[i - 1] / (xs[i - 1] - xs[i]))
        .collect()
}

fn criterion_3() -> Outcome {
    let (w, k) = (1.0, 1.0);
    let p = params(w, k, 1.0);
    let (mut pos, mut drift, mut period) = (0.0f64, 0.0f64, 0.0f64);
    for a in [0.5, 1.0, 2.0, 2.9] {
        let init = ClassicalState::new(0.0, a * w / (1.0 - k * a / (3.0 * w)));
        let traj = match classical::integrate_orbit(init, 20.0 * PI / w, 1e-3, &p) {
            Ok(t) => t,
            Err(e) => return (false, format!("A={a}: {e}")),
        };
        let xs: Vec<f64> = traj.states.iter().map(|s| s.x).collect();
        for (t, x) in traj.times.iter().zip(&xs) {
            pos = pos.max((x - orbit_oracle(a, w, k, *t)).abs());
        }
        let h0 = 0.5 * a * a * w * w;
        for (s, mom) in traj.states.iter().zip(&traj.momenta) {
            drift = drift.max((hamiltonian_oracle(s.x, *mom, w, k) - h0).abs() / h0);
        }
        let c = crossings(&traj.times, &xs);
        let measured = (c[c.len() - 1] - c[0]) / (c.len() - 1) as f64;
        period = period.max((measured - 2.0 * PI / w).abs());
    }
    (
        pos <= ORBIT_TOL && drift <= DRIFT_TOL && period <= PERIOD_TOL,
        format!(
            "position {pos:.2e} (tol {ORBIT_TOL:.0e}), energy drift {drift:.2e} (tol {DRIFT_TOL:.0e}), period {period:.2e} (tol {PERIOD_TOL:.0e})"
        ),
    )
}

fn criterion_4() -> Outcome {
    let p = params(1.0, 1.0, 1.0);
    let cfg = ResidualConfig::default();
    let mut worst = 0.0f64;
    for (sector, top) in [(Sector::Bound, 5), (Sector::Broken, 3)] {
        for n in 0..=top {
            let r = EigenState::new(n, sector, &p)
                .and_then(|s| numeric::residual_norm(&s, &numeric::default_grid(n, sector, 400, &p, &cfg)?, &p));
            match r {
                Ok(r) => worst = worst.max(r.residual_norm),
                Err(e) => return (false, format!("{sector:?} n={n}: {e}")),
            }
        }
    }
    let detuned = EigenState::bound(0, &p).and_then(|s| {
        let grid = numeric::default_grid(0, Sector::Bound, 400, &p, &cfg)?;
        numeric::residual_norm(&s.with_energy(0.5 + 0.1), &grid, &p)
    });
    let detuned = match detuned {
        Ok(r) => r.residual_norm,
        Err(e) => return (false, format!("detuned: {e}")),
    };
    (
        worst <= RESIDUAL_TOL && detuned >= DETUNED_MIN,
        format!("max residual {worst:.2e} (tol {RESIDUAL_TOL:.0e}); detuned {detuned:.2e} (min {DETUNED_MIN:.0e})"),
    )
}

fn criterion_5() -> Outcome {
    let p = params(1.0, 1.0, 1.0);
    let mut worst = 0.0f64;
    for n in 0..=3 {
        match EigenState::bound(n, &p).and_then(|s| numeric::quadrature_norm(&s, &p)) {
            Ok(v) => worst = worst.max((v - 1.0).abs()),
            Err(e) => return (false, format!("n={n}: {e}")),
        }
    }
    let oracle = 9f64.exp() * (19.0 * PI.sqrt() / 36.0 + 1.0 / 3.0);
    // same integral by Simpson in t = y - 1: 3 e^9 (1 + t)^2 exp(-9 t^2) on [0, 8]
    let direct = simpson(0.0, 8.0, 4000, |t| 3.0 * 9f64.exp() * (1.0 + t).powi(2) * (-9.0 * t * t).exp());
    let left = match EigenState::bound_unnormalized(0, &p).and_then(|s| numeric::quadrature_norm_converged(&s, &p)) {
        Ok(q) => q.outer,
        Err(e) => return (false, format!("left half: {e}")),
    };
    let rel = ((left - oracle) / oracle).abs();
    let check = ((direct - oracle) / oracle).abs();
    let closed = analytic::closed_form_left_integral(0, &p);
    (
        worst <= NORM_TOL && rel <= NORM_ORACLE_REL_TOL && check <= NORM_ORACLE_REL_TOL,
        format!(
            "norms within {worst:.2e} of 1 (tol {NORM_TOL:.0e}); left half {left:.10e} vs oracle {oracle:.10e} rel {rel:.2e} \
             (tol {NORM_ORACLE_REL_TOL:.0e}); closed-form constant evaluates to {closed:.6e} (reported only)"
        ),
    )
}

fn criterion_6() -> Outcome {
    let p = params(1.0, 1e-3, 1.0);
    let mut wave = 0.0f64;
    for n in 0..=1 {
        let s = match EigenState::bound(n, &p) {
            Ok(s) => s,
            Err(e) => return (false, format!("n={n}: {e}")),
        };
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        for i in 0..=2000 {
            let q = -5.0 + 10.0 * i as f64 / 2000.0;
            wave = wave.max((s.amplitude(q).re - sign * harmonic_oracle(n, q, 1.0, 1.0)).abs());
        }
    }
    let near = params(1.0, 1e-6, 1.0);
    let mut map = 0.0f64;
    for i in 0..=40 {
        for j in 0..=40 {
            let (x, q) = (-2.0 + 0.1 * i as f64, -2.0 + 0.1 * j as f64);
            map = map.max((near.hamiltonian(x, q).unwrap_or(f64::INFINITY) - 0.5 * (q * q + x * x)).abs());
        }
    }
    (
        wave <= HARMONIC_WAVE_TOL && map <= HARMONIC_MAP_TOL,
        format!("eigenfunctions {wave:.2e} (tol {HARMONIC_WAVE_TOL:.0e}); hamiltonian at k=1e-6 {map:.2e} (tol {HARMONIC_MAP_TOL:.0e})"),
    )
}

fn criterion_7() -> Outcome {
    let p = params(1.0, 1.0, 1.0);
    let mut level = 0.0f64;
    for e in [0.5, 1.0, 2.0, 3.0, 4.0, 4.5] {
        let c = match classical::phase_contour(e, 400, &p) {
            Ok(c) => c,
            Err(err) => return (false, format!("E={e}: {err}")),
        };
        for pt in &c.points {
            for x in [pt.x_plus, pt.x_minus] {
                level = level.max((p.hamiltonian(x, pt.p).unwrap_or(f64::INFINITY) - e).abs());
            }
        }
    }
    let mut turning = 0.0f64;
    for (e, want) in [(0.5, (-7.0 / 6.0, 5.0 / 6.0)), (4.5, (-4.5, 1.5))] {
        let derived = turning_oracle(e, 1.0, 1.0);
        let got = classical::turning_points(e, &p).unwrap_or((f64::NAN, f64::NAN));
        for d in [got.0 - want.0, got.1 - want.1, derived.0 - want.0, derived.1 - want.1] {
            turning = if d.is_nan() { f64::INFINITY } else { turning.max(d.abs()) };
        }
    }
    (
        level <= CONTOUR_TOL && turning <= TURNING_TOL,
        format!("contour |H - E| {level:.2e} (tol {CONTOUR_TOL:.0e}); turning points {turning:.2e} (tol {TURNING_TOL:.0e})"),
    )
}

fn count_sign_changes(values: &[f64]) -> usize {
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut last = 0.0;
    let mut count = 0;
    for &v in values.iter().filter(|v| v.abs() > 1e-9 * peak) {
        if last * v < 0.0 {
            count += 1;
        }
        last = v;
    }
    count
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut herm = 0.0f64;
    for _ in 0..100 {
        let z = Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        for n in 0..=10 {
            let want = explicit_hermite(n, z);
            let scale = want.norm().max(1.0);
            herm = herm.max((hermite::hermite(n, z) - want).norm() / scale);
            let dwant = if n == 0 { Complex64::new(0.0, 0.0) } else { 2.0 * n as f64 * explicit_hermite(n - 1, z) };
            herm = herm.max((hermite::hermite_derivative(n, z) - dwant).norm() / dwant.norm().max(1.0));
        }
    }

    let mut legendre = 0.0f64;
    let mut parity_ok = true;
    for _ in 0..1000 {
        let (w, k) = (rng.random_range(0.5..2.0), rng.random_range(0.1..2.0));
        let p = params(w, k, 1.0);
        let (x, v) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let d = 3.0 * w * w + k * v + k * k * x * x / 3.0;
        if d <= 0.0 {
            continue;
        }
        // closed-form Lagrangian and momentum
        let l = 13.5 * w.powi(6) / (k * k * d) + 1.5 * w * w * v / k - 4.5 * w.powi(4) / (k * k);
        let mom = 1.5 * w * w / k - 13.5 * w.powi(6) / (k * d * d);
        let s = ClassicalState::new(x, v);
        let (lib_l, lib_p) = (p.lagrangian(s).unwrap_or(f64::NAN), p.conjugate_momentum(s).unwrap_or(f64::NAN));
        let h = p.hamiltonian(x, lib_p).unwrap_or(f64::NAN);
        let scale = h.abs().max(1.0);
        legendre = legendre.max((h - (v * lib_p - lib_l)).abs() / scale);
        if ((lib_l - l).abs() > 1e-9 * l.abs().max(1.0)) || ((lib_p - mom).abs() > 1e-9 * mom.abs().max(1.0)) {
            legendre = f64::INFINITY;
        }
        let q = rng.random_range(-10.0..p.p_star());
        let big = rng.random_range(-100.0..100.0);
        parity_ok &= p.hamiltonian(big, q).ok().map(f64::to_bits) == p.hamiltonian(-big, q).ok().map(f64::to_bits);
    }

    let mut sectors_ok = true;
    let mut nodes_ok = true;
    for (w, k) in [(1.0, 1.0), (2.0, 1.0), (1.0, 0.5)] {
        let p = params(w, k, 1.0);
        let grid = numeric::default_grid(6, Sector::Bound, 4000, &p, &ResidualConfig::default()).unwrap_or_default();
        for n in 0..=4 {
            let (Ok(b), Ok(r)) = (EigenState::bound(n, &p), EigenState::broken(n, &p)) else {
                return (false, format!("({w},{k}) n={n}: state construction failed"));
            };
            for i in 1..40 {
                let below = p.p_star() * (1.0 - 0.2 * i as f64);
                let above = p.p_star() * (1.0 + 0.05 * i as f64);
                sectors_ok &= b.amplitude(below).im == 0.0;
                let v = r.amplitude(above);
                sectors_ok &= v.norm() == 0.0 || v.im.abs() > 1e-12 * v.norm();
            }
            let values: Vec<f64> = grid.iter().map(|&q| b.amplitude(q).re).collect();
            nodes_ok &= count_sign_changes(&values) == n;
            nodes_ok &= numeric::shoot_bound_state(n, &ShootingConfig::default(), &p).map(|s| s.nodes) == Ok(n);
        }
    }
    (
        herm <= HERMITE_TOL && legendre <= LEGENDRE_TOL && parity_ok && sectors_ok && nodes_ok,
        format!(
            "hermite {herm:.2e} (tol {HERMITE_TOL:.0e}); legendre {legendre:.2e} (tol {LEGENDRE_TOL:.0e}); \
             parity bit-exact: {parity_ok}; bound real / broken non-real: {sectors_ok}; node law n <= 4: {nodes_ok}"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("spectrum reproduction by shooting", criterion_1),
        ("semiclassical action identity", criterion_2),
        ("classical closed-form fidelity", criterion_3),
        ("eigenfunction residuals", criterion_4),
        ("normalization", criterion_5),
        ("harmonic limit", criterion_6),
        ("phase portrait", criterion_7),
        ("property suites", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (ok, detail) = run();
        failed += usize::from(!ok);
        println!("{} criterion {}: {name}: {detail}", if ok { "PASS" } else { "FAIL" }, i + 1);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion/criteria failed");
        ExitCode::FAILURE
    }
}

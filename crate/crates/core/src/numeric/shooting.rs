//! Shooting eigensolver for the bound sector in the coordinate
//! `y = sqrt(1 - 2kp/3omega^2)`, where the transformed eigenfunction obeys
//!
//! ```text
//! Phi'' - Phi'/y + (E_t + 3/(4y^2) - a (y - 1)^2) Phi = 0
//! ```
//!
//! with `E_t = 18 omega^2 E / (hbar^2 k^2)` and `a = 81 omega^6 / (hbar^2 k^4)`.
//! The singular point `y = 0` has exponents `1/2` and `3/2`; every solution
//! has the form `Phi = y^{1/2} u(y)` with `u` analytic, and
//! `u'' + (E_t - a (y - 1)^2) u = 0` continues it through `y = 0`. The
//! solver selects the solution whose continuation decays for `y -> -inf`,
//! which fixes both Frobenius coefficients `c0 = u(0)` and `c1 = u'(0)`.

use serde::{Deserialize, Serialize};

use crate::analytic::EigenState;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::PhysParams;
use crate::ode::Rkf45;
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingConfig {
    /// Offset from `y = 0` where the Frobenius series hands over to the ODE.
    pub y_start: f64,
    /// Outer truncation; `None` uses `1 + max(12, sqrt(2n+1) + 8) a^{-1/4}`.
    pub y_max: Option<f64>,
    pub ode_rel_tol: f64,
    /// Absolute tolerance on `E_t / sqrt(a)`.
    pub bisect_tol: f64,
    /// Highest level the bracket search will look for.
    pub max_nodes: usize,
    /// Fixed bracket `[lo, hi]` in units of `E_t / sqrt(a)`; `None` searches.
    pub search_window: Option<(f64, f64)>,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self {
            y_start: 1e-4,
            y_max: None,
            ode_rel_tol: 1e-10,
            bisect_tol: 1e-10,
            max_nodes: 64,
            search_window: None,
        }
    }
}

impl ShootingConfig {
    fn validate(&self) -> Result<()> {
        if !(self.y_start > 0.0 && self.y_start < 1.0) {
            return Err(Error::InvalidParameter(format!("y_start must lie in (0, 1), got {}", self.y_start)));
        }
        if let Some(y) = self.y_max {
            if !(y > 1.0 && y.is_finite()) {
                return Err(Error::InvalidParameter(format!("y_max must exceed 1, got {y}")));
            }
        }
        if !(self.ode_rel_tol > 0.0 && self.bisect_tol > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        Ok(())
    }

    fn y_max_for(&self, n: usize, a: f64) -> f64 {
        self.y_max
            .unwrap_or_else(|| 1.0 + (((2 * n + 1) as f64).sqrt() + 8.0).max(12.0) / a.powf(0.25))
    }
}

/// `Phi''` from the bound-sector equation.
pub fn y_ode_rhs(y: f64, phi: f64, dphi: f64, e_tilde: f64, a: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::Coordinate { what: "y", value: y });
    }
    let d = y - 1.0;
    Ok(dphi / y - (e_tilde + 0.75 / (y * y) - a * d * d) * phi)
}

/// Taylor coefficients of `u = y^{-1/2} Phi` about `y = 0` from
/// `j (j - 1) c_j = (a - E_t) c_{j-2} - 2a c_{j-3} + a c_{j-4}`.
pub fn frobenius_coefficients(c0: f64, c1: f64, e_tilde: f64, a: f64, terms: usize) -> Vec<f64> {
    let mut c = vec![0.0; terms.max(2)];
    c[0] = c0;
    c[1] = c1;
    for j in 2..c.len() {
        let jf = j as f64;
        let mut s = (a - e_tilde) * c[j - 2];
        if j >= 3 {
            s -= 2.0 * a * c[j - 3];
        }
        if j >= 4 {
            s += a * c[j - 4];
        }
        c[j] = s / (jf * (jf - 1.0));
    }
    c
}

/// `(Phi, Phi')` of `y^{1/2} sum c_j y^j`.
fn frobenius_eval(c: &[f64], y: f64) -> (f64, f64) {
    let (mut u, mut du) = (0.0, 0.0);
    for (j, &cj) in c.iter().enumerate().rev() {
        u = u * y + cj;
        if j > 0 {
            du = du * y + j as f64 * cj;
        }
    }
    let r = y.sqrt();
    (r * u, r * du + 0.5 * u / r)
}

/// Integration state shared by every evaluation at one trial energy.
#[derive(Debug, Clone, Copy)]
struct Problem {
    e_tilde: f64,
    a: f64,
    y_start: f64,
    y_max: f64,
    solver: Rkf45,
}

const FROBENIUS_TERMS: usize = 40;

impl Problem {
    fn rhs(&self) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + '_ {
        move |y, s| {
            let d = y - 1.0;
            [s[1], s[1] / y - (self.e_tilde + 0.75 / (y * y) - self.a * d * d) * s[0]]
        }
    }

    /// `(u(0), u'(0))` of the solution decaying to the left, and the sign
    /// changes of `u` on the way.
    fn left_continuation(&self) -> Result<((f64, f64), usize)> {
        let sa = self.a.sqrt();
        let reach = 14.0 / sa.sqrt();
        let y_l = (1.0 - reach).min(0.0);
        if y_l == 0.0 {
            return Ok(((1.0, sa), 0));
        }
        let (et, a) = (self.e_tilde, self.a);
        let f = move |y: f64, s: &[f64; 2]| {
            let d = y - 1.0;
            [s[1], -(et - a * d * d) * s[0]]
        };
        let mut nodes = 0;
        let mut last = 1.0;
        let end = self.solver.integrate(f, y_l, [1.0, -sa * (y_l - 1.0)], 0.0, |_, s| {
            if s[0] != 0.0 {
                if s[0].signum() != last {
                    nodes += 1;
                }
                last = s[0].signum();
            }
        })?;
        Ok(((end[0], end[1]), nodes))
    }

    /// Left solution at `y = 1` with its node count on `(-inf, 1]`.
    fn shoot_left(&self) -> Result<([f64; 2], usize, (f64, f64))> {
        let ((c0, c1), mut nodes) = self.left_continuation()?;
        let c = frobenius_coefficients(c0, c1, self.e_tilde, self.a, FROBENIUS_TERMS);
        let (v, d) = frobenius_eval(&c, self.y_start);
        let mut last = if c0 != 0.0 { c0.signum() } else { v.signum() };
        if v != 0.0 && v.signum() != last {
            nodes += 1;
            last = v.signum();
        }
        let end = self.solver.integrate(self.rhs(), self.y_start, [v, d], 1.0, |_, s| {
            if s[0] != 0.0 {
                if s[0].signum() != last {
                    nodes += 1;
                }
                last = s[0].signum();
            }
        })?;
        Ok((end, nodes, (c0, c1)))
    }

    fn right_seed(&self) -> [f64; 2] {
        let y = self.y_max;
        [1.0, 0.5 / y - self.a.sqrt() * (y - 1.0)]
    }

    /// Right solution at `y = 1` with its node count on `[1, y_max]`.
    fn shoot_right(&self) -> Result<([f64; 2], usize)> {
        let mut nodes = 0;
        let mut last = 1.0;
        let end = self.solver.integrate(self.rhs(), self.y_max, self.right_seed(), 1.0, |y, s| {
            if y > 1.0 && s[0] != 0.0 {
                if s[0].signum() != last {
                    nodes += 1;
                }
                last = s[0].signum();
            }
        })?;
        Ok((end, nodes))
    }

    /// Sign changes of the left solution continued all the way to `y_max`.
    fn sturm_count(&self) -> Result<usize> {
        let (at_one, mut nodes, _) = self.shoot_left()?;
        let mut last = at_one[0].signum();
        self.solver.integrate(self.rhs(), 1.0, at_one, self.y_max, |_, s| {
            if s[0] != 0.0 {
                if s[0].signum() != last {
                    nodes += 1;
                }
                last = s[0].signum();
            }
        })?;
        Ok(nodes)
    }

    /// Samples of the left and right solutions at every accepted step, with
    /// their end states at `y = 1`. Left samples for `y < 0` carry `u`.
    fn trace(&self) -> Result<Trace> {
        let mut left = Vec::new();
        let sa = self.a.sqrt();
        let y_l = (1.0 - 14.0 / sa.sqrt()).min(0.0);
        let (c0, c1) = if y_l == 0.0 {
            (1.0, sa)
        } else {
            let (et, a) = (self.e_tilde, self.a);
            let f = move |y: f64, s: &[f64; 2]| {
                let d = y - 1.0;
                [s[1], -(et - a * d * d) * s[0]]
            };
            let end = self.solver.integrate(f, y_l, [1.0, -sa * (y_l - 1.0)], 0.0, |y, s| {
                if y < 0.0 {
                    left.push((y, s[0]));
                }
            })?;
            (end[0], end[1])
        };
        let c = frobenius_coefficients(c0, c1, self.e_tilde, self.a, FROBENIUS_TERMS);
        let (v, d) = frobenius_eval(&c, self.y_start);
        let l = self.solver.integrate(self.rhs(), self.y_start, [v, d], 1.0, |y, s| left.push((y, s[0])))?;
        let mut right = Vec::new();
        let r = self.solver.integrate(self.rhs(), self.y_max, self.right_seed(), 1.0, |y, s| right.push((y, s[0])))?;
        right.reverse();
        Ok(Trace { left, left_end: l, right, right_end: r, seed: (c0, c1) })
    }

    /// Normalized Wronskian of the left and right solutions at `y = 1`.
    fn mismatch(&self) -> Result<f64> {
        let (l, _, _) = self.shoot_left()?;
        let (r, _) = self.shoot_right()?;
        let w = l[0] * r[1] - l[1] * r[0];
        Ok(w / (l[0].hypot(l[1]) * r[0].hypot(r[1])))
    }
}

struct Trace {
    left: Vec<(f64, f64)>,
    left_end: [f64; 2],
    right: Vec<(f64, f64)>,
    right_end: [f64; 2],
    /// Frobenius data `(c0, c1)` at `y = 0`.
    seed: (f64, f64),
}

/// A converged bound level with the data needed to re-evaluate its
/// eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingSolution {
    pub n: usize,
    pub energy: f64,
    pub e_tilde: f64,
    /// Interior zeros of the matched eigenfunction in `(0, y_max)`.
    pub nodes: usize,
    pub y_max: f64,
    c0: f64,
    c1: f64,
    /// Factor applied to the right solution so it joins the left one at `y = 1`.
    right_scale: f64,
    problem_a: f64,
    y_start: f64,
    solver: Rkf45,
}

impl ShootingSolution {
    fn problem(&self) -> Problem {
        Problem {
            e_tilde: self.e_tilde,
            a: self.problem_a,
            y_start: self.y_start,
            y_max: self.y_max,
            solver: self.solver,
        }
    }

    /// Values of the eigenfunction at `ys`, each in `(0, y_max]`, with the
    /// scale fixed by `Phi(y) = y^{1/2}(c0 + ...)` near the origin.
    pub fn sample(&self, ys: &[f64]) -> Result<Vec<f64>> {
        let pr = self.problem();
        let mut out = vec![0.0; ys.len()];
        let mut order: Vec<usize> = (0..ys.len()).collect();
        order.sort_by(|&i, &j| ys[i].total_cmp(&ys[j]));
        let c = frobenius_coefficients(self.c0, self.c1, self.e_tilde, self.problem_a, FROBENIUS_TERMS);
        let (v0, d0) = frobenius_eval(&c, self.y_start);
        let mut at = self.y_start;
        let mut state = [v0, d0];
        let mut right: Vec<usize> = Vec::new();
        for &i in &order {
            let y = ys[i];
            if !(y > 0.0 && y <= self.y_max) {
                return Err(Error::Coordinate { what: "y", value: y });
            }
            if y <= self.y_start {
                out[i] = frobenius_eval(&c, y).0;
            } else if y <= 1.0 {
                state = pr.solver.integrate(pr.rhs(), at, state, y, |_, _| {})?;
                at = y;
                out[i] = state[0];
            } else {
                right.push(i);
            }
        }
        let mut at = self.y_max;
        let mut state = pr.right_seed();
        for &i in right.iter().rev() {
            let y = ys[i];
            state = pr.solver.integrate(pr.rhs(), at, state, y, |_, _| {})?;
            at = y;
            out[i] = self.right_scale * state[0];
        }
        Ok(out)
    }
}

fn problem_for(n: usize, e_tilde: f64, config: &ShootingConfig, params: &PhysParams) -> Result<Problem> {
    let s = params.scaled_params(0.0)?;
    Ok(Problem {
        e_tilde,
        a: s.a,
        y_start: config.y_start,
        y_max: config.y_max_for(n, s.a),
        solver: Rkf45::with_rel_tol(config.ode_rel_tol),
    })
}

/// Converged level `n_target` with its eigenfunction data.
pub fn shoot_bound_state(n_target: usize, config: &ShootingConfig, params: &PhysParams) -> Result<ShootingSolution> {
    config.validate()?;
    params.require_nonlinear()?;
    let sqrt_a = params.scaled_params(0.0)?.sqrt_a;
    let count = |x: f64| problem_for(n_target, x * sqrt_a, config, params)?.sturm_count();
    let n = n_target;
    let (mut lo, mut hi) = match config.search_window {
        Some((lo, hi)) => {
            if !(lo < hi) || count(lo)? > n || count(hi)? <= n {
                return Err(Error::BracketFailure { n, lo, hi });
            }
            (lo, hi)
        }
        None => {
            if n > config.max_nodes {
                return Err(Error::BracketFailure { n, lo: 0.0, hi: f64::INFINITY });
            }
            let mut hi = 2.0;
            let ceiling = 4.0 * (config.max_nodes as f64 + 1.0);
            while count(hi)? <= n {
                hi *= 2.0;
                if hi > ceiling {
                    return Err(Error::BracketFailure { n, lo: 0.0, hi });
                }
            }
            (0.0, hi)
        }
    };
    // isolate level n by node count, then refine on the Wronskian
    loop {
        let (cl, ch) = (count(lo)?, count(hi)?);
        if cl == n && ch == n + 1 {
            break;
        }
        if hi - lo < config.bisect_tol {
            return Err(Error::BracketFailure { n, lo, hi });
        }
        let mid = 0.5 * (lo + hi);
        if count(mid)? <= n {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let w = |x: f64| problem_for(n, x * sqrt_a, config, params)?.mismatch();
    let (mut wl, wh) = (w(lo)?, w(hi)?);
    if wl.signum() == wh.signum() {
        return Err(Error::BracketFailure { n, lo, hi });
    }
    while hi - lo > config.bisect_tol {
        let mid = 0.5 * (lo + hi);
        let wm = w(mid)?;
        if wm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if wm.signum() == wl.signum() {
            lo = mid;
            wl = wm;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    let pr = problem_for(n, x * sqrt_a, config, params)?;
    let Trace { left, left_end: l, right, right_end: r, seed: (c0, c1) } = pr.trace()?;
    let right_scale = (l[0] * r[0] + l[1] * r[1]) / (r[0] * r[0] + r[1] * r[1]);
    let joined: Vec<(f64, f64)> = left
        .into_iter()
        .chain(right.into_iter().map(|(y, v)| (y, right_scale * v)))
        .collect();
    let total = sign_changes(joined.iter().copied());
    let nodes = sign_changes(joined.iter().copied().filter(|&(y, _)| y > 0.0));
    if total != n {
        return Err(Error::NodeCountMismatch { expected: n, found: total });
    }
    let hb = params.hbar();
    let k = params.k();
    let w = params.omega();
    Ok(ShootingSolution {
        n,
        energy: x * sqrt_a * hb * hb * k * k / (18.0 * w * w),
        e_tilde: x * sqrt_a,
        nodes,
        y_max: pr.y_max,
        c0,
        c1,
        right_scale,
        problem_a: pr.a,
        y_start: pr.y_start,
        solver: pr.solver,
    })
}

/// Sign changes along samples ordered in `y`, ignoring values negligible
/// against the largest one.
fn sign_changes(samples: impl Iterator<Item = (f64, f64)> + Clone) -> usize {
    let peak = samples.clone().map(|(_, v)| v.abs()).fold(0.0, f64::max);
    let floor = 1e-9 * peak;
    let mut count = 0;
    let mut last = 0.0;
    for (_, v) in samples {
        if v.abs() <= floor {
            continue;
        }
        if last != 0.0 && v.signum() != last {
            count += 1;
        }
        last = v.signum();
    }
    count
}

/// Energy of bound level `n_target`.
pub fn shoot_bound_eigenvalue(n_target: usize, config: &ShootingConfig, params: &PhysParams) -> Result<f64> {
    shoot_bound_state(n_target, config, params).map(|s| s.energy)
}

/// Bound energies for `n = 0..=n_max`.
pub fn numeric_spectrum(n_max: usize, config: &ShootingConfig, params: &PhysParams, exec: Execution) -> Result<Vec<f64>> {
    let levels: Vec<usize> = (0..=n_max).collect();
    exec.try_map(&levels, |&n| shoot_bound_eigenvalue(n, config, params))
}

/// `int |Phi(p)|^2 dp` over the bound sector, by adaptive Gauss-Legendre
/// quadrature in `y` split at `y = 1`.
pub fn quadrature_norm(state: &EigenState, params: &PhysParams) -> Result<f64> {
    quadrature_norm_converged(state, params).map(|c| c.value)
}

/// Parts of the bound-state norm integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormQuadrature {
    pub value: f64,
    /// Contribution of `0 < p < p_star`, i.e. `0 < y < 1`.
    pub inner: f64,
    /// Contribution of `p < 0`, i.e. `y > 1`.
    pub outer: f64,
    pub panels: usize,
    /// Summed change of the last panel doubling.
    pub last_change: f64,
}

pub fn quadrature_norm_converged(state: &EigenState, params: &PhysParams) -> Result<NormQuadrature> {
    if state.sector != crate::analytic::Sector::Bound {
        return Err(Error::InvalidParameter("quadrature norm is defined for bound states".into()));
    }
    let frame = crate::analytic::SubstitutionFrame::new(params)?;
    let reach = (((2 * state.n + 1) as f64).sqrt() + 12.0) / frame.a_quarter;
    let density = |y: f64| {
        if y <= 0.0 {
            return 0.0;
        }
        let p = frame.y_to_p(y).unwrap_or(f64::NAN);
        state.amplitude(p).norm_sqr() * frame.dp_dy(y).abs()
    };
    const REL_TOL: f64 = 1e-13;
    let inner = quad::adaptive(0.0, 1.0, REL_TOL, density)?;
    let outer = quad::adaptive(1.0, 1.0 + reach, REL_TOL, density)?;
    Ok(NormQuadrature {
        value: inner.value + outer.value,
        inner: inner.value,
        outer: outer.value,
        panels: inner.panels.max(outer.panels),
        last_change: inner.last_change + outer.last_change,
    })
}

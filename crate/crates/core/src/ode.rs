//! Explicit Runge-Kutta integrators for small first-order systems.

use crate::error::{Error, Result};

/// One classical fourth-order Runge-Kutta step.
pub fn rk4_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], h: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k1));
    let k3 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k2));
    let k4 = f(t + h, &axpy(y, h, &k3));
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, k: &[f64; N]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += h * k[i];
    }
    out
}

/// Runge-Kutta-Fehlberg 4(5) with local extrapolation (the fifth-order
/// solution is propagated).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rkf45 {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    /// Initial step; `None` picks `|t1 - t0| / 100`.
    pub initial_step: Option<f64>,
    /// Upper bound on `|h|`; `None` leaves it unbounded.
    pub max_step: Option<f64>,
}

impl Default for Rkf45 {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_steps: 1_000_000,
            initial_step: None,
            max_step: None,
        }
    }
}

const C: [f64; 6] = [0.0, 0.25, 0.375, 12.0 / 13.0, 1.0, 0.5];
const A: [[f64; 5]; 6] = [
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [0.25, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0],
    [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0],
    [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0],
    [-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0],
];
const B4: [f64; 6] = [25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -0.2, 0.0];
const B5: [f64; 6] = [
    16.0 / 135.0,
    0.0,
    6656.0 / 12825.0,
    28561.0 / 56430.0,
    -9.0 / 50.0,
    2.0 / 55.0,
];

impl Rkf45 {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self { rel_tol, ..Self::default() }
    }

    /// Integrates from `t0` to `t1` (either direction), calling `observer`
    /// with the initial point and after every accepted step. Returns the
    /// state at `t1`.
    pub fn integrate<const N: usize, F, O>(
        &self,
        f: F,
        t0: f64,
        y0: [f64; N],
        t1: f64,
        mut observer: O,
    ) -> Result<[f64; N]>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
        O: FnMut(f64, &[f64; N]),
    {
        let span = t1 - t0;
        observer(t0, &y0);
        if span == 0.0 {
            return Ok(y0);
        }
        let dir = span.signum();
        let mut h = self.initial_step.unwrap_or(span.abs() / 100.0).min(span.abs());
        if let Some(hmax) = self.max_step {
            h = h.min(hmax);
        }
        let h_floor = 1e-14 * (t0.abs().max(t1.abs()).max(1e-300));
        let (mut t, mut y) = (t0, y0);
        let mut steps = 0usize;
        while dir * (t1 - t) > 0.0 {
            if steps >= self.max_steps {
                return Err(Error::StepOverflow {
                    steps: steps as u64,
                    limit: self.max_steps as u64,
                });
            }
            steps += 1;
            let last = h >= dir * (t1 - t);
            if last {
                h = dir * (t1 - t);
            }
            let (y5, err) = self.trial(&f, t, &y, dir * h);
            if !err.is_finite() {
                h *= 0.1;
                if h < h_floor {
                    return Err(Error::StepUnderflow(t));
                }
                continue;
            }
            if err <= 1.0 {
                t = if last { t1 } else { t + dir * h };
                y = y5;
                observer(t, &y);
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err > 1.0 || !last {
                h *= factor;
                if let Some(hmax) = self.max_step {
                    h = h.min(hmax);
                }
                if h < h_floor {
                    return Err(Error::StepUnderflow(t));
                }
            }
        }
        Ok(y)
    }

    fn trial<const N: usize, F>(&self, f: &F, t: f64, y: &[f64; N], h: f64) -> ([f64; N], f64)
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let mut k = [[0.0; N]; 6];
        for s in 0..6 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(s) {
                for i in 0..N {
                    ys[i] += h * A[s][j] * kj[i];
                }
            }
            k[s] = f(t + C[s] * h, &ys);
        }
        let mut y5 = *y;
        let mut err_max: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 0..N {
            let (mut d4, mut d5) = (0.0, 0.0);
            for s in 0..6 {
                d4 += B4[s] * k[s][i];
                d5 += B5[s] * k[s][i];
            }
            y5[i] += h * d5;
            err_max = err_max.max((h * (d5 - d4)).abs());
            scale = scale.max(y[i].abs()).max(y5[i].abs());
        }
        let tol = self.abs_tol + self.rel_tol * scale;
        let err = if tol > 0.0 { err_max / tol } else if err_max == 0.0 { 0.0 } else { f64::INFINITY };
        (y5, err)
    }
}

//! Gauss-Legendre quadrature on finite intervals.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};

pub const DEFAULT_NODES: usize = 128;

fn rule_128() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(DEFAULT_NODES).unwrap()))
}

/// Single-panel 128-node Gauss-Legendre rule.
pub fn gauss_legendre<F: FnMut(f64) -> f64>(a: f64, b: f64, f: F) -> f64 {
    rule_128().integrate(a, b, f)
}

/// 128-node rule applied on `panels` equal sub-intervals.
pub fn composite<F: FnMut(f64) -> f64>(a: f64, b: f64, panels: usize, mut f: F) -> f64 {
    let panels = panels.max(1);
    let w = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + i as f64 * w;
            let hi = if i + 1 == panels { b } else { lo + w };
            rule_128().integrate(lo, hi, &mut f)
        })
        .sum()
}

/// Result of a panel-doubling integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Converged {
    pub value: f64,
    pub panels: usize,
    /// `|I(2n) - I(n)|` at termination.
    pub last_change: f64,
}

/// Doubles the panel count until successive estimates agree to
/// `rel_tol * |I|` (plus a tiny absolute floor).
pub fn adaptive<F: FnMut(f64) -> f64>(a: f64, b: f64, rel_tol: f64, mut f: F) -> Result<Converged> {
    const MAX_PANELS: usize = 1 << 12;
    let mut panels = 1;
    let mut prev = composite(a, b, panels, &mut f);
    loop {
        panels *= 2;
        let cur = composite(a, b, panels, &mut f);
        let change = (cur - prev).abs();
        if change <= rel_tol * cur.abs() + f64::MIN_POSITIVE {
            return Ok(Converged { value: cur, panels, last_change: change });
        }
        if panels >= MAX_PANELS || !cur.is_finite() {
            return Err(Error::QuadratureNonConvergence(change));
        }
        prev = cur;
    }
}

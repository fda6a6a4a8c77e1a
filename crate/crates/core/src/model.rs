//! Physical parameters and the closed-form scalar maps of the oscillator
//! `x'' + k x x' + (k^2/9) x^3 + omega^2 x = 0`.
//!
//! The Hamiltonian is written in the momentum-dependent-mass form
//! `H = x^2 / (2 m(p)) + U(p)`, valid on the real branch `p <= p_star`
//! with `p_star = 3 omega^2 / (2k)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nonlinearity `k`, angular frequency `omega` and reduced Planck constant `hbar`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    k: f64,
    omega: f64,
    hbar: f64,
}

impl Default for PhysParams {
    fn default() -> Self {
        Self {
            k: 1.0,
            omega: 1.0,
            hbar: 1.0,
        }
    }
}

/// Position and velocity of the classical oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClassicalState {
    pub x: f64,
    pub xdot: f64,
}

impl ClassicalState {
    pub fn new(x: f64, xdot: f64) -> Self {
        Self { x, xdot }
    }
}

/// Dimensionless constants of the transformed eigenproblem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledSpectralParams {
    /// `18 omega^2 E / (hbar^2 k^2)`
    pub e_tilde: f64,
    /// `3^4 omega^6 / (hbar^2 k^4)`
    pub a: f64,
    pub sqrt_a: f64,
}

impl PhysParams {
    /// Argument order follows the `(omega, k, hbar)` convention used in the
    /// CLI and reports. `k = 0` is accepted here; the maps that degenerate at
    /// `k = 0` reject it individually.
    pub fn new(omega: f64, k: f64, hbar: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidParameter(format!("omega must be > 0, got {omega}")));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParameter(format!("hbar must be > 0, got {hbar}")));
        }
        if !(k.is_finite() && k >= 0.0) {
            return Err(Error::InvalidParameter(format!("k must be >= 0, got {k}")));
        }
        Ok(Self { k, omega, hbar })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub(crate) fn require_nonlinear(&self) -> Result<()> {
        if self.k > 0.0 {
            Ok(())
        } else {
            Err(Error::DegenerateParameter("k = 0 has no finite threshold or scaled spectrum"))
        }
    }

    /// Momentum threshold `3 omega^2 / (2k)` where the mass diverges.
    /// Infinite in the harmonic case `k = 0`.
    pub fn p_star(&self) -> f64 {
        1.5 * self.omega * self.omega / self.k
    }

    /// Largest amplitude of a regular orbit, `3 omega / k`.
    pub fn regular_amplitude_bound(&self) -> f64 {
        3.0 * self.omega / self.k
    }

    /// Energy `9 omega^4 / (2 k^2)` of the orbit separating regular from singular motion.
    pub fn separatrix_energy(&self) -> f64 {
        let w2 = self.omega * self.omega;
        4.5 * w2 * w2 / (self.k * self.k)
    }

    /// `1 - 2kp / (3 omega^2)`, the square of the bound-sector coordinate `y`.
    pub fn deformation(&self, p: f64) -> f64 {
        if self.k == 0.0 {
            return 1.0;
        }
        // exact difference near p_star keeps the relative accuracy of small s
        let ps = self.p_star();
        (ps - p) / ps
    }

    /// `m(p) = 1 / (omega^2 (1 - 2kp/3omega^2))`, finite only below `p_star`.
    pub fn mass_profile(&self, p: f64) -> Result<f64> {
        self.require_nonlinear()?;
        if p >= self.p_star() {
            return Err(Error::Domain { p, p_star: self.p_star() });
        }
        Ok(1.0 / self.stiffness(p))
    }

    /// `f(p) = omega^2 (1 - 2kp/3omega^2)`; negative past `p_star`.
    pub fn stiffness(&self, p: f64) -> f64 {
        self.omega * self.omega * self.deformation(p)
    }

    /// `U(p) = (9 omega^4 / 2k^2) (sqrt(1 - 2kp/3omega^2) - 1)^2` on the real branch.
    pub fn potential(&self, p: f64) -> Result<f64> {
        self.require_nonlinear()?;
        if p > self.p_star() {
            return Err(Error::Domain { p, p_star: self.p_star() });
        }
        // sqrt(s) - 1 = (s - 1)/(sqrt(s) + 1) turns U into 2p^2/(1 + y)^2, free of
        // the 1/k^2 cancellation.
        let y = self.deformation(p).max(0.0).sqrt();
        Ok(2.0 * p * p / ((1.0 + y) * (1.0 + y)))
    }

    pub fn hamiltonian(&self, x: f64, p: f64) -> Result<f64> {
        let u = self.potential(p)?;
        Ok(0.5 * self.stiffness(p) * x * x + u)
    }

    /// Unsimplified bracket form of the Hamiltonian, used as a cross-check of
    /// [`PhysParams::hamiltonian`].
    pub fn hamiltonian_expanded(&self, x: f64, p: f64) -> Result<f64> {
        self.require_nonlinear()?;
        if p > self.p_star() {
            return Err(Error::Domain { p, p_star: self.p_star() });
        }
        let (k, w2) = (self.k, self.omega * self.omega);
        let s = self.deformation(p);
        let bracket = 2.0 - 2.0 * k * p / (3.0 * w2) - 2.0 * s.sqrt() + k * k * x * x * s / (9.0 * w2);
        Ok(4.5 * w2 * w2 / (k * k) * bracket)
    }

    fn denominator(&self, state: ClassicalState) -> Result<(f64, f64)> {
        self.require_nonlinear()?;
        let ClassicalState { x, xdot } = state;
        let k = self.k;
        // q = xdot + k x^2 / 3, so that D = 3 omega^2 + k q
        let q = xdot + k * x * x / 3.0;
        let d = 3.0 * self.omega * self.omega + k * q;
        if d == 0.0 || !d.is_finite() {
            return Err(Error::SingularDenominator { x, xdot });
        }
        Ok((q, d))
    }

    /// `L = (27 omega^6/2k^2)/D + (3 omega^2/2k) xdot - 9 omega^4/2k^2` with
    /// `D = k xdot + (k^2/3) x^2 + 3 omega^2`, evaluated as
    /// `(3 omega^2/2)(xdot q - omega^2 x^2)/D`.
    pub fn lagrangian(&self, state: ClassicalState) -> Result<f64> {
        let (q, d) = self.denominator(state)?;
        let w2 = self.omega * self.omega;
        Ok(1.5 * w2 * (state.xdot * q - w2 * state.x * state.x) / d)
    }

    /// `p = dL/dxdot = -27 omega^6 / (2k D^2) + 3 omega^2 / 2k`.
    pub fn conjugate_momentum(&self, state: ClassicalState) -> Result<f64> {
        let (q, d) = self.denominator(state)?;
        let w2 = self.omega * self.omega;
        // (3w^2/2k)(1 - 9w^4/D^2) with D - 3w^2 = k q factored out
        Ok(1.5 * w2 * q * (d + 3.0 * w2) / (d * d))
    }

    pub fn scaled_params(&self, energy: f64) -> Result<ScaledSpectralParams> {
        self.require_nonlinear()?;
        let (k, w, hb) = (self.k, self.omega, self.hbar);
        let sqrt_a = 9.0 * w * w * w / (hb * k * k);
        Ok(ScaledSpectralParams {
            e_tilde: 18.0 * w * w * energy / (hb * hb * k * k),
            a: sqrt_a * sqrt_a,
            sqrt_a,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit() -> PhysParams {
        PhysParams::default()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(PhysParams::new(0.0, 1.0, 1.0).is_err());
        assert!(PhysParams::new(1.0, -1.0, 1.0).is_err());
        assert!(PhysParams::new(1.0, 1.0, 0.0).is_err());
        assert!(PhysParams::new(1.0, 0.0, 1.0).is_ok());
    }

    #[test]
    fn mass_profile_values() {
        let p = unit();
        assert_eq!(p.mass_profile(0.0).unwrap(), 1.0);
        assert_relative_eq!(p.mass_profile(5.0 / 6.0).unwrap(), 2.25, max_relative = 1e-15);
        let w2 = PhysParams::new(2.0, 1.0, 1.0).unwrap();
        assert_eq!(w2.mass_profile(0.0).unwrap(), 0.25);
        assert!(matches!(p.mass_profile(1.5), Err(Error::Domain { .. })));
        assert!(matches!(p.mass_profile(2.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn k_zero_is_degenerate_for_maps() {
        let h = PhysParams::new(1.0, 0.0, 1.0).unwrap();
        assert!(matches!(h.mass_profile(0.0), Err(Error::DegenerateParameter(_))));
        assert!(matches!(h.potential(0.0), Err(Error::DegenerateParameter(_))));
        assert!(matches!(h.scaled_params(1.0), Err(Error::DegenerateParameter(_))));
    }

    #[test]
    fn stiffness_values() {
        let p = unit();
        assert_eq!(p.stiffness(0.0), 1.0);
        assert_eq!(p.stiffness(1.5), 0.0);
        assert_relative_eq!(p.stiffness(5.0 / 6.0), 4.0 / 9.0, max_relative = 1e-15);
        assert!(p.stiffness(2.0) < 0.0);
    }

    #[test]
    fn potential_values() {
        let p = unit();
        assert_eq!(p.potential(0.0).unwrap(), 0.0);
        assert_relative_eq!(p.potential(5.0 / 6.0).unwrap(), 0.5, max_relative = 1e-14);
        assert_relative_eq!(p.potential(-7.0 / 6.0).unwrap(), 0.5, max_relative = 1e-14);
        assert_relative_eq!(p.potential(1.5).unwrap(), 4.5, max_relative = 1e-15);
        assert!(p.potential(1.6).is_err());
    }

    #[test]
    fn hamiltonian_values() {
        let p = unit();
        assert_relative_eq!(p.hamiltonian(0.0, 5.0 / 6.0).unwrap(), 0.5, max_relative = 1e-14);
        assert_eq!(p.hamiltonian(1.0, 0.0).unwrap(), 0.5);
        assert_eq!(p.hamiltonian(-1.0, 0.0).unwrap(), 0.5);
        assert!(p.hamiltonian(0.0, 2.0).is_err());
    }

    #[test]
    fn hamiltonian_matches_expanded_form() {
        let p = PhysParams::new(1.3, 0.7, 1.0).unwrap();
        for &(x, mom) in &[(0.3, -2.0), (1.7, 0.4), (-2.2, 1.1), (0.0, -5.0)] {
            let a = p.hamiltonian(x, mom).unwrap();
            let b = p.hamiltonian_expanded(x, mom).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
    }

    #[test]
    fn lagrangian_values() {
        let p = unit();
        assert_eq!(p.lagrangian(ClassicalState::new(0.0, 0.0)).unwrap(), 0.0);
        assert_relative_eq!(
            p.lagrangian(ClassicalState::new(0.0, 1.5)).unwrap(),
            0.75,
            max_relative = 1e-15
        );
        assert!(matches!(
            p.lagrangian(ClassicalState::new(0.0, -3.0)),
            Err(Error::SingularDenominator { .. })
        ));
    }

    #[test]
    fn lagrangian_matches_unsimplified_form() {
        let p = PhysParams::new(1.2, 0.8, 1.0).unwrap();
        let (k, w) = (p.k(), p.omega());
        for &(x, xd) in &[(0.5, 0.3), (-1.0, 2.0), (2.0, -0.7)] {
            let d = k * xd + k * k * x * x / 3.0 + 3.0 * w * w;
            let direct = 27.0 * w.powi(6) / (2.0 * k * k) / d + 1.5 * w * w / k * xd
                - 4.5 * w.powi(4) / (k * k);
            let l = p.lagrangian(ClassicalState::new(x, xd)).unwrap();
            assert_relative_eq!(l, direct, max_relative = 1e-12);
        }
    }

    #[test]
    fn conjugate_momentum_values() {
        let p = unit();
        assert_eq!(p.conjugate_momentum(ClassicalState::new(0.0, 0.0)).unwrap(), 0.0);
        assert_relative_eq!(
            p.conjugate_momentum(ClassicalState::new(0.0, 1.5)).unwrap(),
            5.0 / 6.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            p.conjugate_momentum(ClassicalState::new(0.0, 1.0)).unwrap(),
            21.0 / 32.0,
            max_relative = 1e-15
        );
        assert!(p.conjugate_momentum(ClassicalState::new(0.0, -3.0)).is_err());
    }

    #[test]
    fn scaled_params_values() {
        let p = unit();
        let s = p.scaled_params(0.5).unwrap();
        assert_eq!(s.e_tilde, 9.0);
        assert_eq!(s.a, 81.0);
        assert_eq!(s.sqrt_a, 9.0);
        assert_eq!(p.scaled_params(0.0).unwrap().e_tilde, 0.0);
        let s1 = p.scaled_params(1.5).unwrap();
        assert_eq!(s1.e_tilde, 27.0);
        assert_eq!(s1.e_tilde, 3.0 * s1.sqrt_a);
    }
}

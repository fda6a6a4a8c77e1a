//! Classical, semiclassical and quantum treatment of the PT-symmetric
//! Lienard-type oscillator `x'' + k x x' + (k^2/9) x^3 + omega^2 x = 0`.
//!
//! The crate is organized bottom-up:
//!
//! * [`model`]: parameters and the closed-form Hamiltonian, Lagrangian and
//!   momentum maps;
//! * [`classical`]: numerical and exact orbits, periods, phase portraits;
//! * [`semiclassical`]: the action integral and the quantized amplitudes;
//! * [`analytic`]: the closed-form momentum-space eigenfunctions;
//! * [`numeric`]: residual checks and an independent shooting eigensolver;
//! * [`io`]: the CSV/JSON artifact formats;
//! * [`verify`]: aggregated verification suites.
//!
//! Sweeps run on rayon when the `parallel` feature is enabled (the default);
//! see [`exec::Execution`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod classical;
pub mod error;
pub mod exec;
pub mod hermite;
pub mod io;
pub mod model;
pub mod numeric;
pub mod ode;
pub mod quad;
pub mod semiclassical;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Execution;
pub use model::{ClassicalState, PhysParams, ScaledSpectralParams};

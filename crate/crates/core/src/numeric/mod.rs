//! Independent numerical checks of the closed-form quantum solution.

pub mod residual;
pub mod shooting;

pub use residual::*;
pub use shooting::*;

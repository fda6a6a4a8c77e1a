use thiserror::Error;

/// Failures raised by the model, integrators and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate parameters: {0}")]
    DegenerateParameter(&'static str),

    #[error("momentum {p} outside the admissible domain (threshold {p_star})")]
    Domain { p: f64, p_star: f64 },

    #[error("coordinate {value} outside the domain of {what}")]
    Coordinate { what: &'static str, value: f64 },

    #[error("singular denominator k*xdot + k^2 x^2/3 + 3 omega^2 at (x={x}, xdot={xdot})")]
    SingularDenominator { x: f64, xdot: f64 },

    #[error("orbit hits its singular phase at t={t}")]
    SingularPhase { t: f64 },

    #[error("amplitude {amplitude} is not a regular orbit (bound {bound})")]
    Irregular { amplitude: f64, bound: f64 },

    #[error("wavefunction is singular at the boundary p={0}")]
    BoundarySingularity(f64),

    #[error("operator is singular at p={0}")]
    SingularPoint(f64),

    #[error("integration would need {steps} steps (limit {limit})")]
    StepOverflow { steps: u64, limit: u64 },

    #[error("adaptive integrator step size underflow at t={0}")]
    StepUnderflow(f64),

    #[error("fewer than two upward zero crossings ({0} found)")]
    InsufficientCrossings(usize),

    #[error("quadrature did not converge (last change {0:e})")]
    QuadratureNonConvergence(f64),

    #[error("negative radicand {0} in closed-form normalization constant")]
    NegativeRadicand(f64),

    #[error("no eigenvalue bracket for level {n} in [{lo}, {hi}]")]
    BracketFailure { n: usize, lo: f64, hi: f64 },

    #[error("level {expected} converged with {found} nodes")]
    NodeCountMismatch { expected: usize, found: usize },

    #[error("degenerate grid: {0}")]
    DegenerateGrid(&'static str),

    #[error("state vanishes on the whole grid")]
    ZeroAmplitude,
}

pub type Result<T> = std::result::Result<T, Error>;

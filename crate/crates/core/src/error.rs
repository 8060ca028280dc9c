use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Fock truncation n_max = {n_max} leaves Poisson tail weight {tail:e} (must be < 1e-12)")]
    TruncationInsufficient { n_max: usize, tail: f64 },

    #[error("degenerate Ξ-type spectrum at n = {n}: eta = {eta:e}, x3 = {x3:e}")]
    DegenerateSpectrum { n: usize, eta: f64, x3: f64 },

    #[error("integrator did not converge: step-halving difference {achieved:e} exceeds {tolerance:e}")]
    NonConvergence { achieved: f64, tolerance: f64 },

    #[error("displacement lost norm {loss:e} to truncation")]
    TruncationLoss { loss: f64 },

    #[error("Hermitian eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:e})")]
    EigenNoConvergence { sweeps: usize, off: f64 },

    #[error("Cardano cubic ill-conditioned: rho1^2 - 3 rho2 = {0:e}")]
    IllConditioned(f64),

    #[error("Mandel parameter undefined: mean photon number {0:e}")]
    UndefinedMandel(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

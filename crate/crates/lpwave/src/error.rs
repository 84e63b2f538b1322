use thiserror::Error;

/// Errors produced by grid construction, transforms, and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} is not a power of two (>= 16)")]
    GridSize(usize),

    #[error("grid length {0} must be positive and finite")]
    GridLength(f64),

    #[error("fields are bound to different grids")]
    GridMismatch,

    #[error("field contains non-finite samples")]
    NonFiniteField,

    #[error("multiplier symbol is non-finite at xi = {0}")]
    NonFiniteSymbol(f64),

    #[error("spectrum violates Hermitian symmetry (relative deviation {0:.3e})")]
    Asymmetry(f64),

    #[error("inverse transform left an imaginary residue of relative size {0:.3e}")]
    ImaginaryResidue(f64),

    #[error("invalid Lebesgue exponent p = {0}; need p >= 1 or infinity")]
    InvalidExponent(f64),

    #[error("dealias fraction {0} lies outside (0, 1]")]
    DealiasFraction(f64),

    #[error("block index {j} exceeds the largest resolvable block {j_max}")]
    BlockOutOfBand { j: i32, j_max: i32 },

    #[error("grid too coarse: {0}")]
    Resolution(String),

    #[error("frequency {freq:.3} exceeds the usable band {limit:.3}")]
    FrequencyOutOfBand { freq: f64, limit: f64 },

    #[error("truncation tail energy {measured:.3e} exceeds the budget {budget:.3e}")]
    TailEnergy { measured: f64, budget: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("time step {dt:.3e} violates the CFL bound {limit:.3e}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("solution blew up at t = {t:.6e}: {reason}")]
    BlowUp { t: f64, reason: String },

    #[error("step budget of {0} steps exceeded before reaching the target time")]
    MaxSteps(usize),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("subsystem dims {dims:?} do not factor a matrix of dim {dim}")]
    InconsistentDims { dims: Vec<usize>, dim: usize },

    #[error("invalid subsystem selection: {0}")]
    InvalidKeep(String),

    #[error("matrix is not Hermitian (max |a - a^dagger| = {violation:e})")]
    NotHermitian { violation: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("{name} = {value} is outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("amplitudes are not normalized: alpha^2 + beta^2 + delta^2 = {norm}")]
    NotNormalized { norm: f64 },

    #[error("selective operation passed to apply_channel; use apply_selective for post-selected operators")]
    SelectiveNotChannel,

    #[error("Kraus operators are not complete (deviation {deviation:e})")]
    Incomplete { deviation: f64 },

    #[error("operator is not a contraction (op^dagger op exceeds I by {excess:e})")]
    NotContraction { excess: f64 },

    #[error("outcome has vanishing probability ({probability:e})")]
    VanishingProbability { probability: f64 },

    #[error("closed form requires symmetric parameters (d1 = d2, p = q, p_r = q_r)")]
    AsymmetricParameters,

    #[error("no correction Z^a X^b restores the input for outcome ({m}, {n})")]
    NoCorrection { m: usize, n: usize },

    #[error("correction for outcome ({m}, {n}) is ambiguous ({count} candidates)")]
    AmbiguousCorrection { m: usize, n: usize, count: usize },

    #[error("coherence factor needs a balanced input state")]
    UnbalancedInput,

    #[error("output not in symmetric family (off-diagonal spread {spread:e})")]
    NotSymmetricFamily { spread: f64 },

    #[error("estimation bound diverges (det F = {det:e})")]
    BoundDiverges { det: f64 },

    #[error("{0} diverges at this parameter point")]
    Divergence(&'static str),

    #[error("{0} is not defined for this scheme")]
    UnsupportedScheme(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {detail}")]
    DimensionMismatch { op: &'static str, detail: String },

    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("Kraus operators are not trace preserving (defect {defect:.3e})")]
    NotTracePreserving { defect: f64 },

    #[error("matrix is not an isometry (defect {defect:.3e})")]
    NotIsometry { defect: f64 },

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("cannot parse Pauli string {input:?}: {reason}")]
    ParsePauli { input: String, reason: String },

    #[error("invalid basis label {0:?}")]
    BasisLabel(String),

    #[error("{what}: residual {residual:.3e} exceeds tolerance {tol:.1e}")]
    ResidualTooLarge {
        what: String,
        residual: f64,
        tol: f64,
    },

    #[error("linear system is rank deficient ({rank} of {unknowns} unknowns determined); dilation is not minimal")]
    RankDeficient { rank: usize, unknowns: usize },

    #[error("non-Pauli dynamics: leakage {leakage:.3e} exceeds tolerance {tol:.1e}")]
    NonPauliDynamics { leakage: f64, tol: f64 },

    #[error("operators do not commute (commutator norm {norm:.3e})")]
    NonCommuting { norm: f64 },

    #[error("subspace is not invariant under the Hamiltonian (defect {defect:.3e})")]
    NonInvariantSubspace { defect: f64 },

    #[error("target probability {value} at t = {t} lies outside [0, 1]")]
    TargetOutOfRange { t: f64, value: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

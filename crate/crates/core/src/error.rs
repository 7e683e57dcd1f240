use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed circuit document: {0}")]
    Malformed(String),

    #[error("unknown gate type `{0}`")]
    UnknownGate(String),

    #[error("qubit index {index} out of range for {qubits} qubit(s)")]
    QubitOutOfRange { index: i64, qubits: usize },

    #[error("control and target coincide on qubit {0}")]
    ControlEqualsTarget(usize),

    #[error("parameter `{0}` appears in more than one gate")]
    DuplicateParameter(String),

    #[error("symmetry parameter `{0}` does not appear in the gate list")]
    UnknownSymmetryParam(String),

    #[error("invalid Pauli word `{0}`")]
    InvalidPauliWord(String),

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("invalid bitstring `{0}`")]
    InvalidBitstring(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("parameter assignment has {got} values but the roster has {expected}")]
    RosterMismatch { expected: usize, got: usize },

    #[error("parameter value at position {0} is not finite")]
    NonFinite(usize),

    #[error("parameter index {index} out of range (roster size {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid parameter subset: {0}")]
    InvalidSubset(String),

    #[error("parameter `{0}` has a multi-term generator; the ancilla protocol needs single Pauli strings")]
    MultiTermGenerator(String),

    #[error("shot count must be at least 1")]
    ZeroShots,

    #[error("circuit declares no symmetry parameters")]
    MissingSymmetry,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid sector: {0}")]
    InvalidSector(String),

    #[error("Gram matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("sample set is empty")]
    EmptySampleSet,

    #[error("no density certificate available: {0}")]
    MissingDensityBound(String),

    #[error("metric is singular on most of the parameter domain; reduce the circuit first")]
    SingularMetric,

    #[error("state does not lie in the requested sector (residual {0:e})")]
    OutsideSector(f64),
}

impl Error {
    /// Whether the error stems from invalid input rather than a numerical failure.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::NotPsd(_) | Error::SingularMetric | Error::OutsideSector(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Broad failure class, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed input text.
    Usage,
    /// A structural, range, or sizing constraint was violated.
    Constraint,
    /// A simulation produced something the construction guarantees cannot happen.
    Internal,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for a {num_qubits}-qubit register file")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("basis index {index} out of range for {num_qubits} qubits")]
    BasisOutOfRange { index: u64, num_qubits: usize },

    #[error("gate acts on qubit {0} more than once")]
    RepeatedQubit(usize),

    #[error("rotation angle {0} is not finite")]
    NonFiniteAngle(f64),

    #[error("{requested} qubits exceeds the simulator cap of {cap}")]
    QubitCap { requested: usize, cap: usize },

    #[error("circuit has {circuit} qubits but the state has {state}")]
    QubitCountMismatch { circuit: usize, state: usize },

    #[error("duplicate register name `{0}`")]
    DuplicateRegister(String),

    #[error("register `{0}` overlaps register `{1}`")]
    RegisterOverlap(String, String),

    #[error("register `{0}` must have width >= 1")]
    EmptyRegister(String),

    #[error("register `{name}` does not fit: it ends at qubit {end} but the circuit has {num_qubits}")]
    RegisterOutOfRange { name: String, end: usize, num_qubits: usize },

    #[error("width mismatch: {0}")]
    WidthMismatch(String),

    #[error("value {value} is not representable in {width} bits")]
    ValueOutOfRange { value: i64, width: u32 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("width plan violated: {reason} (need {required} accumulator bits, plan has {available})")]
    WidthPlan {
        reason: String,
        required: u32,
        available: u32,
    },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("readout of `{register}` is not deterministic: best outcome has probability {probability}")]
    NonDeterministic { register: String, probability: f64 },

    #[error("result disagrees with the classical oracle: {0}")]
    OracleMismatch(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parse { .. } => ErrorClass::Usage,
            Error::NonDeterministic { .. } | Error::OracleMismatch(_) => ErrorClass::Internal,
            _ => ErrorClass::Constraint,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

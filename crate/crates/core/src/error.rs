use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    UnsupportedAlgebra(String),
    NonHermitian { index: usize },
    LinearlyDependent,
    NotClosed { b: usize, c: usize, residual: f64 },
    DimensionMismatch { expected: usize, found: usize },
    Inconsistent { residual: f64 },
    InfeasibleConstraints { residual: f64 },
    PipelineUnavailable(String),
    InvalidScenario(String),
    SingularFit,
    Infeasible { first_violation_time: Option<f64> },
    NoFeasibleTime { t_high: f64 },
    NonFinite { time: f64 },
    AmbiguousBranch { indices: Vec<usize> },
    DegenerateInvariant { time: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnsupportedAlgebra(name) => write!(f, "unsupported algebra `{name}`"),
            Error::NonHermitian { index } => write!(f, "generator {} is not Hermitian", index + 1),
            Error::LinearlyDependent => write!(f, "generators are linearly dependent"),
            Error::NotClosed { b, c, residual } => write!(
                f,
                "commutator [T{}, T{}] leaves the generator span (residual {residual:e})",
                b + 1,
                c + 1
            ),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::Inconsistent { residual } => {
                write!(f, "inconsistent system: null-space residual {residual:e}")
            }
            Error::InfeasibleConstraints { residual } => {
                write!(f, "fixed components cannot be met (residual {residual:e})")
            }
            Error::PipelineUnavailable(why) => write!(f, "no design pipeline: {why}"),
            Error::InvalidScenario(why) => write!(f, "invalid scenario: {why}"),
            Error::SingularFit => write!(f, "singular polynomial fit"),
            Error::Infeasible { first_violation_time: Some(t) } => {
                write!(f, "infeasible: square-root argument negative at t = {t}")
            }
            Error::Infeasible { first_violation_time: None } => write!(f, "infeasible"),
            Error::NoFeasibleTime { t_high } => {
                write!(f, "no feasible final time in range (t_high = {t_high} is infeasible)")
            }
            Error::NonFinite { time } => write!(f, "non-finite Hamiltonian sample at t = {time}"),
            Error::AmbiguousBranch { indices } => {
                let one_based: Vec<usize> = indices.iter().map(|i| i + 1).collect();
                write!(f, "ambiguous branch: degenerate eigenvalues at branches {one_based:?}")
            }
            Error::DegenerateInvariant { time } => {
                write!(f, "degenerate invariant spectrum at t = {time}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

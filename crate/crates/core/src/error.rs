use std::fmt;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax { expected: Vec<String>, found: String },
    UnknownIdentifier(String),
    UnknownFunction(String),
    Arity {
        func: &'static str,
        expected: usize,
        found: usize,
    },
    BadNumber(String),
    UnexpectedChar(char),
}

/// Expression syntax error; `offset` is a byte offset into the source text.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("at offset {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax { expected, found } => {
                write!(f, "syntax error: expected one of [{}], found {found}", expected.join(", "))
            }
            ParseErrorKind::UnknownIdentifier(name) => write!(f, "unknown identifier '{name}'"),
            ParseErrorKind::UnknownFunction(name) => write!(f, "unknown function '{name}'"),
            ParseErrorKind::Arity {
                func,
                expected,
                found,
            } => write!(f, "{func} takes {expected} argument(s), got {found}"),
            ParseErrorKind::BadNumber(text) => write!(f, "malformed number '{text}'"),
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character '{c}'"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalErrorKind {
    LnNonPositive,
    DivisionByZero,
    SqrtNegative,
    NegativeBaseFractionalPower,
    NonDifferentiable,
    NonFinite,
    UnboundSymbol,
}

impl fmt::Display for EvalErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvalErrorKind::LnNonPositive => "logarithm of a non-positive value",
            EvalErrorKind::DivisionByZero => "division by zero",
            EvalErrorKind::SqrtNegative => "square root of a negative value",
            EvalErrorKind::NegativeBaseFractionalPower => {
                "non-integer power of a non-positive base"
            }
            EvalErrorKind::NonDifferentiable => "not twice differentiable at this point",
            EvalErrorKind::NonFinite => "non-finite result",
            EvalErrorKind::UnboundSymbol => "symbol has no binding",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{kind} in `{subexpr}`")]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub subexpr: String,
}

/// Failures while reading a model document.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("malformed document{}: {message}", offset.map(|o| format!(" at byte offset {o}")).unwrap_or_default())]
    Document {
        message: String,
        offset: Option<usize>,
    },
    #[error("{location}: {source}")]
    Expression {
        location: String,
        #[source]
        source: ParseError,
    },
    #[error("missing [{0}] section")]
    MissingSection(&'static str),
    #[error("{location}: expected {expected}, found {found}")]
    Shape {
        location: String,
        expected: String,
        found: String,
    },
    #[error("unknown key '{0}'")]
    UnknownKey(String),
    #[error("{0}")]
    Invalid(String),
    #[error("reference point check failed: {0}")]
    Reference(#[source] Box<MathError>),
}

/// Failures of the numeric pipeline at a point.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum MathError {
    #[error("{location}: {source}")]
    Domain {
        location: String,
        #[source]
        source: EvalError,
    },
    #[error("singular symmetric metric (det = {det:e}, scale = {scale:e})")]
    SingularMetric { det: f64, scale: f64 },
    #[error("variance mismatch: {0}")]
    Variance(String),
    #[error("index slot {slot} out of range for rank {rank}")]
    SlotOutOfRange { slot: usize, rank: usize },
    #[error("unsupported tensor rank {0}")]
    UnsupportedRank(usize),
    #[error("conformal factor 1 - xi*phi^2 vanishes")]
    ConformalSingularity,
    #[error("frame vector is not timelike (norm^2 = {0:e})")]
    NotTimelike(f64),
    #[error("radicand is negative at t = {t} (value {value:e})")]
    NegativeRadicand { t: f64, value: f64 },
    #[error("vanishing denominator at t = {t}")]
    VanishingDenominator { t: f64 },
    #[error("fixed-point iteration did not converge (residual {residual:e} after {iterations} iterations)")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("{0}")]
    Invalid(String),
}

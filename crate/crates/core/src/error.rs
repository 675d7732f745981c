//! Error types for the symbolic layer.

use crate::atom::Atom;
use crate::expr::Expr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExprError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown symbol `{name}` at byte {pos}; known symbols: {known}")]
    UnknownSymbol {
        pos: usize,
        name: String,
        known: String,
    },
    #[error("missing assignment for atom `{atom}` during evaluation")]
    MissingAssignment { atom: Atom },
    #[error("missing function model for `{name}` during evaluation")]
    MissingModel { name: String },
    #[error("division is only supported by a nonzero single-term divisor")]
    BadDivision,
    #[error("inconsistent explicit bindings for {dep}: binding of `{atom}` disagrees with the derivative of the base binding")]
    InconsistentBinding { dep: String, atom: Atom },
    #[error("jet order {found} of `{dep}` exceeds the supported order {max}")]
    JetOrderTooHigh { dep: String, found: u32, max: u32 },
    #[error("invalid json expression: {0}")]
    Json(String),
}

#[derive(Debug, Error)]
pub enum SelfAdjointError {
    #[error("determining system is inconsistent: it forces the substitution to vanish")]
    Inconsistent,
    #[error("determining system is outside the ansatz library: {0}")]
    OutsideAnsatz(String),
    #[error("substitution verification failed; residual: {residual}")]
    VerificationFailed { residual: Expr },
    #[error("the zero substitution is not admissible")]
    ZeroSubstitution,
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Debug, Error)]
pub enum ConsLawError {
    #[error("divergence is not a multiple of the equation; residual: {residual}")]
    NoMultiplier { residual: Expr },
    #[error("component count {found} does not match equation dimensionality {expected}")]
    ComponentCount { found: usize, expected: usize },
    #[error(transparent)]
    SelfAdjoint(#[from] SelfAdjointError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Debug, Error)]
pub enum EquationError {
    #[error("equation has no `u_t` term, cannot derive the solved form")]
    NoTimeDerivative,
    #[error("the `u_t` coefficient must be a nonzero rational constant")]
    NonConstantTimeCoefficient,
    #[error("equation must not contain jets of v")]
    ContainsAdjointVariable,
    #[error("equation file: {0}")]
    File(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

//! Symbolic toolkit for nonlinear self-adjointness and conservation laws of
//! anisotropic nonlinear heat equations.
//!
//! The crate provides, bottom up:
//!
//! - a canonical jet-space polynomial engine with exact rational coefficients
//!   ([`expr`], [`atom`]), parsing ([`parse`]), plain/LaTeX emission
//!   ([`format`]), JSON trees ([`jsonio`]) and numeric evaluation ([`eval`]);
//! - equations as values with solved forms and tower relations
//!   ([`equation`]);
//! - the formal Lagrangian, Euler operator and adjoint equations ([`euler`]);
//! - determining systems for self-adjointness substitutions, their solution
//!   over the supported ansatz families, and verification with the multiplier
//!   ([`selfadjoint`]);
//! - conserved vectors from point symmetries: construction, equivalence
//!   reduction, triviality tests, multiplier extraction and nontrivial bases
//!   ([`conslaw`]).
//!
//! Expressions are immutable values after construction; every operation is a
//! pure function, so values can be shared and sent across threads freely.

pub mod atom;
pub mod conslaw;
pub mod equation;
pub mod error;
pub mod euler;
pub mod eval;
pub mod expr;
pub mod format;
pub mod jsonio;
pub mod linalg;
pub mod parse;
pub mod selfadjoint;

pub use atom::{Atom, ClosureKind, Dep, FuncName, JetIndex, Var};
pub use equation::{parse_equation_file, DifferentialEquation};
pub use error::{ConsLawError, EquationError, ExprError, SelfAdjointError};
pub use expr::{equivalent, Expr, Monomial};
pub use parse::{parse, parse_with, ParseContext};

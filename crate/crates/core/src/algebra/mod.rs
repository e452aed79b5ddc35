//! Exact coefficient fields and sparse homogeneous polynomial arithmetic.

pub mod gaussian;
pub mod hompoly;
pub mod linalg;
mod modgcd;
pub mod monomial;
pub mod mpoly;
pub mod parse;
pub mod ratfunc;
pub mod scalar;
pub mod upoly;

pub use gaussian::Gaussian;
pub use hompoly::{HomPoly, PolyLiteral, TermLiteral};
pub use monomial::{binomial, enumerate_monomials, ExponentTuple};
pub use mpoly::{MPoly, MRat};
pub use parse::ParseError;
pub use ratfunc::RatFunc;
pub use scalar::{Scalar, Variant};
pub use upoly::Poly;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: u32, right: u32 },
    #[error("expected {expected} variables, found {found}")]
    VariableCount { expected: usize, found: usize },
    #[error("parameter value {at} is a pole of coefficient {coefficient} of monomial {exponent}")]
    Pole {
        at: String,
        exponent: ExponentTuple,
        coefficient: String,
    },
    #[error("polynomial literal has no terms; variable count cannot be inferred")]
    EmptyLiteral,
    #[error("bad coefficient '{text}': {source}")]
    Coefficient {
        text: String,
        #[source]
        source: ParseError,
    },
}

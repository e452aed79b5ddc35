//! Value distribution for entire curves in one variable: characteristic and
//! counting functions, Jensen's formula, Wronskians and the Second Main
//! Theorem harness.

pub mod counting;
pub mod curve;
pub mod exppoly;
pub mod quadrature;
pub mod smt;
pub mod wronskian;
pub mod zeros;

use thiserror::Error;

use crate::algebra::ParseError;
use crate::bounds::BoundsError;
use crate::resultant::ResultantError;

pub use counting::{counting_function, jensen_check, JensenReport};
pub use curve::{CurveLiteral, EntireCurve};
pub use exppoly::{ExpPoly, MeroFn};
pub use smt::{
    defect_estimate, log_derivative_diagnostic, radius_grid, smt_verify, SmtOptions, SmtReport,
};
pub use wronskian::{admissible_derivative_set, divisor_bound_check, wronskian, AdmissibleSet};
pub use zeros::{zeros_in_disk, Divisor, DivisorPoint};

#[derive(Debug, Error)]
pub enum NevanlinnaError {
    #[error("function is identically zero")]
    IdenticallyZero,
    #[error("invalid radius {0}")]
    BadRadius(f64),
    #[error("empty or invalid radius grid")]
    EmptyGrid,
    #[error("quadrature did not converge (achieved error {achieved:e})")]
    Quadrature { achieved: f64 },
    #[error("zero on or too close to a contour near radius {0}")]
    ContourZero(f64),
    #[error("winding number {winding} at radius {radius} but {found} zeros located")]
    WindingMismatch { radius: f64, winding: i64, found: i64 },
    #[error("divisor computed to radius {have}, needed {need}")]
    DivisorRadius { have: f64, need: f64 },
    #[error("functions are linearly dependent (Wronskian vanishes identically)")]
    DependentInputs,
    #[error("expected a polynomial")]
    NotPolynomial,
    #[error("expected a constant exponent, got '{0}'")]
    NotConstant(String),
    #[error("a curve needs at least two components, got {0}")]
    TooFewComponents(usize),
    #[error("curve lives in P^{curve} but target in P^{target}")]
    DimensionMismatch { curve: usize, target: usize },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("family is not admissible: subset {failing_subset:?} has identically vanishing resultant")]
    NotAdmissible { failing_subset: Vec<usize> },
    #[error("curve is algebraically degenerate in degree {degree}")]
    Degenerate { degree: u32 },
    #[error("target {0} vanishes identically on the curve")]
    TargetVanishes(usize),
    #[error("{found} truncation levels given for {expected} targets")]
    LevelCount { expected: usize, found: usize },
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Resultant(#[from] ResultantError),
}

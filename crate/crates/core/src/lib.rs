//! Exact algebra, resultants, graded filtrations, truncation bounds and
//! numerical Nevanlinna functionals for entire curves and families of
//! moving hypersurfaces.

pub mod algebra;
pub mod bounds;
pub mod filtration;
pub mod io;
pub mod nevanlinna;
pub mod random;
pub mod resultant;
pub mod selftest;

/// Crate version, embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

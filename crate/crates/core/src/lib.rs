pub mod analyzer;
pub mod error;
pub mod frequency;
pub mod scalar;
pub mod series;
pub mod solver;
pub mod verifier;

pub use error::{Error, Result};
pub use scalar::{DoubleDouble, Precision, Real};
pub use series::{MultiIndex, Sign, TruncatedSeries, VariableRoles};

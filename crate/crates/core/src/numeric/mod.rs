//! Hand-written numerical building blocks.

pub mod cauchy;
pub mod ode;
pub mod quad;
pub mod root;
pub mod scalar;
pub mod series;

pub use scalar::{Point, Scalar};
pub use series::Series;

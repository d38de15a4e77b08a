//! Exact-arithmetic tools for simultaneous approximation to successive powers
//! of a real number.

pub mod battery;
pub mod bounds;
pub mod certify;
pub mod dyadic;
pub mod error;
pub mod exponents;
pub mod lattice;
pub mod linalg;
pub mod minimal_points;
pub mod poly;
pub mod real_field;
pub mod reference;

pub use error::{Error, Result};

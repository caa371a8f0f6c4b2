//! Numerical laboratory for multiplication tuples on Bergman spaces induced
//! by proper holomorphic maps.

pub mod algebra;
pub mod cli;
pub mod deck;
pub mod domains;
pub mod error;
pub mod groups;
pub mod maps;
pub mod operators;
pub mod roots;
pub mod spaces;

pub use error::{LabError, Result};
pub use num_complex::Complex64;

//! Semi-Latin squares, their underlying block designs, and the isomorph-free
//! classification of uniform semi-Latin squares.

pub mod algebra;
pub mod classify;
pub mod design;
pub mod error;
pub mod fixtures;
pub mod isomorph;
pub mod sls;

pub use error::{Error, Result};

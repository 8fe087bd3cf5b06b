//! Classical buckling loads and modes of axially compressed cylindrical
//! shells, together with numerical checks of the Korn-type scaling laws that
//! govern them.

pub mod ansatz;
pub mod error;
pub mod fields;
pub mod fixedbc;
pub mod koiter;
pub mod korn;
pub mod material;
pub mod rect;
pub mod scaling;

pub use error::{Error, Result};

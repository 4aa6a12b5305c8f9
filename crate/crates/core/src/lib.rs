//! Exact arithmetic for Dieudonne modules and F-isocrystals over finite fields.

pub mod counting;
pub mod deformation;
pub mod dieudonne;
pub mod error;
pub mod fields;
pub mod isocrystal;
pub mod json;
pub mod matrix;
pub mod modp;
pub mod parser;
pub mod supersingular;
pub mod witt;

pub use error::{Error, Result};

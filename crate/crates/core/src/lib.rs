pub mod bounds;
pub mod classes;
pub mod complexity;
pub mod config;
pub mod coupling;
pub mod enumerate;
pub mod error;
pub mod numeric;
pub mod sampling;
pub mod signs;

pub use error::{Error, Result};

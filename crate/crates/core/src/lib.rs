pub mod adjoints;
pub mod biortho;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod fermion;
pub mod fixtures;
pub mod linalg;
pub mod report;
pub mod symmetry;
pub mod tolerance;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use tolerance::ToleranceConfig;

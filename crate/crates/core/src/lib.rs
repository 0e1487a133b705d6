pub mod coderivative;
pub mod constraints;
pub mod domination;
pub mod efficiency;
pub mod error;
pub mod geometry;
pub mod oracle;
pub mod problem;
pub mod report;
pub mod scalar;
pub mod serde_scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub mod error;
pub mod family;
pub mod field;
pub mod algebra;
pub mod burnside;
pub mod linalg;
pub mod modstruct;
pub mod quat;
pub mod report;

pub use error::{Error, Result};
pub use field::{FieldDescriptor, FieldElement, Quaternion, Scalar};
pub use linalg::{ExactMatrix, Polynomial, Subspace};

//! Exact linear algebra over a [`FieldDescriptor`](crate::FieldDescriptor).

mod echelon;
pub mod factor;
mod matrix;
mod poly;

pub use echelon::{EchelonBasis, Subspace};
pub use factor::{is_triangularizable_single, splits_with_roots, Splitting};
pub use matrix::ExactMatrix;
pub use poly::Polynomial;

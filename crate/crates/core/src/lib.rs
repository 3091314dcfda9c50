//! Exact verification engine for GL(3) quantum matrix group solutions.

pub mod catalog;
pub mod conditions;
pub mod linalg;
pub mod modp;
pub mod poincare;
pub mod report;
pub mod rmatrix;
pub mod scalar;
pub mod tensor;

//! Numerical laboratory for weak-type (1,1) estimates of Calderón–Zygmund
//! operators: Whitney decompositions, good/bad splits with measure-prescribed
//! cancellation sets, the Hilbert transform on step functions and `A_p`
//! weight analytics.

pub mod decomposition;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod operators;
pub mod stepfn;
pub mod weights;

pub use error::{Error, Result};

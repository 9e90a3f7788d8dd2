//! Calderón–Zygmund kernels, the Hilbert transform on step functions and
//! densities, kernel-axiom audits and the mean-zero tail estimate.

mod apply;
mod axioms;
mod density;
mod field;
mod gauss;
mod kernel;
mod lemma1;
mod superlevel;

pub use apply::{apply, apply_at, NEAR_CELLS};
pub use axioms::{kernel_axiom_report, AxiomReport};
pub use density::{hilbert_exact, JumpDensity, Lattice};
pub use field::{weighted_field, weighted_density, Field, HilbertField, PowerField, Singularity};
pub use kernel::{CzKernel, HilbertKernel};
pub use lemma1::{lemma1_tail, TailEstimate};
pub use superlevel::{superlevel_set, EvalWindow, Sampler};

//! Cubes, dyadic cubes, exact box unions and the Whitney decomposition.

mod box_union;
mod cube;
mod lemma2;
mod whitney;

pub use box_union::{dyadic_level_of, BoxUnion, IntervalSet, SetOp, SlabSet};
pub use cube::{Aabb, Cube, DyadicCube, MAX_DIM};
pub use lemma2::{cube_union, lemma2_check, lemma2_dilation_witness, Lemma2Check, WitnessTriple};
pub use whitney::{
    default_floor, dist_to_complement, whitney, ComplementDistance, WhitneyAudit, WhitneyCube,
    WhitneyDecomposition, DEFAULT_FLOOR_DEPTH_1D, DEFAULT_FLOOR_DEPTH_2D,
};

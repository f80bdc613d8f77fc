//! Simulation oracle for the formula layers.
//!
//! Points are sampled exactly, faces and hull membership are decided by
//! small linear programs, and metric projections onto cones come from
//! nonnegative least squares.

pub mod linalg;
pub mod lp;
pub mod nnls;
pub mod predicates;
pub mod sampler;
pub mod stats;

pub use lp::cone_is_full_space;
pub use predicates::{hull_contains, is_face, FaceMode};
pub use sampler::{sample_beta_point, BetaPointSampler, RngSpec};
pub use stats::{
    chunks, cone_chunk, estimate_cone_statistics, estimate_polytope_statistics, estimate_solid_angle, polytope_chunk, ConePlan,
    Estimate, PolyPlan, Tally,
};

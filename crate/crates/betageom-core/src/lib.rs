//! Exact expectations for random beta polytopes and beta cones.
//!
//! Points are drawn from the beta law on the unit ball, with density
//! proportional to `(1 - |x|^2)^beta`. The law is uniform on the sphere
//! when `beta = -1`. Every expectation reduces to finite sums of the
//! [`theta`](quantities::theta) function. That function is a product of
//! two one-dimensional integrals, which are evaluated by trapezoidal
//! quadrature on the real line.
//!
//! The [`montecarlo`] module is an independent simulation oracle for
//! the same quantities.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod cone;
pub mod error;
pub mod montecarlo;
pub mod multiset;
pub mod polytope;
pub mod quadrature;
pub mod quantities;
pub mod special;
pub mod subsets;
pub mod terms;

pub use error::{Error, Result};
pub use multiset::GammaMultiset;
pub use quadrature::{QuadConfig, QuadResult};

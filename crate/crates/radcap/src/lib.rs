//! Exact variational p-capacities of annuli for radial weights on `R^n`, estimation of the
//! exponent sets of the ball-measure profile, and empirical checks of capacity bounds.
//!
//! Radii are carried as natural logarithms ([`Radius`]) so that scale ladders can reach
//! magnitudes far below the smallest `f64`.

// `!(a < b)` is deliberate throughout: NaN must fall on the rejecting side.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod bounds;
pub mod capacity;
pub mod error;
pub mod exec;
pub mod exponents;
pub mod numerics;
pub mod measure;
pub mod radius;
pub mod weights;

pub use error::{Error, Result};
pub use numerics::LogScalar;
pub use radius::Radius;

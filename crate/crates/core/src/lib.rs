//! Radial weighted model manifolds: curvature and comparison checks, a
//! shooting solver for the weighted Lane-Emden and Liouville equations,
//! Pohozaev monitors, the explicit positive-curvature construction, and
//! P-function identities.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod check;
pub mod construction;
pub mod error;
pub mod geometry;
pub mod lane_emden;
pub mod pfunction;
pub mod radial;

pub use check::Check;
pub use error::{Error, Result};
pub use geometry::{ManifoldKind, ModelManifold, VirtualDim};
pub use lane_emden::{Nonlinearity, SolutionProfile, Status};
pub use radial::{make_grid, GridResidual, RadialEval, RadialFunction, RadialGrid, Spacing};

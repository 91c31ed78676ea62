//! Embedding of finite integer lattices onto smooth manifolds in R^n.
//!
//! Each lattice point `q` is assigned a continuous position `zeta(q)`. The
//! positions are found by minimizing, point by point, an alignment term
//! between `zeta(q)` and its footpoint on the manifold, a reinforcement term,
//! a penalty keeping a smoothed indicator of the manifold close to one, and
//! an optional curvature penalty.

pub mod diff;
pub mod error;
pub mod fields;
pub mod lattice;
pub mod manifold;
pub mod objective;
pub mod optimizer;
pub mod reduce;

pub use error::{Error, Result};
pub use fields::{ActivationField, Fields, Region, ReinforcementField};
pub use lattice::{
    embed, generate_box_lattice, grid_distance, is_adjacent, join, meet, ContinuousPoint, Lattice,
    LatticePoint,
};
pub use manifold::{Footpoint, Manifold, TangentNormalSplit};
pub use objective::{ObjectiveBreakdown, ObjectiveParams};
pub use optimizer::{EmbeddingState, OptimizationReport, StepControl, StopCriteria, Termination};

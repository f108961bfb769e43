//! Edge-differentially-private defective graph coloring.
//!
//! Two private mechanisms are provided in [`coloring`]: a single sequential
//! pass of exponential-mechanism resampling ([`coloring::color_unctr`]) and a
//! noisy-threshold controlled resampling ([`coloring::color_control`]). Both
//! start from a uniformly random coloring over a palette sized from a
//! Laplace-noised maximum degree. Around them sit the graph substrate
//! ([`graph`]), the privacy primitives ([`mech`]), defect measurement and
//! theoretical bounds ([`metrics`]), a Monte-Carlo privacy auditor
//! ([`audit`]) and the experiment harness ([`harness`]).

pub mod audit;
pub mod coloring;
mod error;
pub mod graph;
pub mod harness;
pub mod mech;
pub mod metrics;

pub use crate::coloring::{AlgoParams, Coloring, ControlOutcome, OrderingMode, UnctrOutcome};
pub use crate::error::{Error, Result};
pub use crate::graph::{Graph, IdRemap, VertexOrdering};
pub use crate::mech::{MechanismSpec, PrivacyBudget, RandomSource};
pub use crate::metrics::DefectReport;

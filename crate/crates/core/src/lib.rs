//! Opinion dynamics under the generalized Friedkin–Johnsen model and
//! selection of stooges that push the equilibrium's mean squared error or
//! polarization up or down.
//!
//! ```
//! use asch::graph::{gen_gnp, sample_opinions, OpinionDistribution, OpinionInstance};
//! use asch::selection::{greedy_lazy, Direction, GreedyConfig, Objective};
//!
//! let g = gen_gnp(60, 0.1, 1).unwrap();
//! let s = sample_opinions(60, &OpinionDistribution::default(), 1).unwrap();
//! let inst = OpinionInstance::uniform(&g, 0.5, s).unwrap();
//! let picked = greedy_lazy(&inst, 3, Objective::Mse, Direction::Maximize, &GreedyConfig::default()).unwrap();
//! assert!(picked.final_objective() >= picked.initial_objective);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod selection;

pub use dynamics::EquilibriumResult;
pub use error::{Error, Result};
pub use graph::{InfluenceMatrix, NodeId, OpinionInstance, UndirectedGraph};
pub use metrics::MetricReport;
pub use selection::{Direction, Objective, SelectionResult, StoogeAssignment};

//! Exact partial representation extension for unit circular-arc graphs.
//!
//! - [`arith`]: exact rationals and rationals with an infinitesimal.
//! - [`model`]: graphs, domains, representations and their validators.
//! - [`solver`]: complete search deciding whether pinned arcs extend.
//! - [`reduction`]: 3-Partition instances, the arc-graph construction built
//!   from them, and a brute-force partition oracle.
//! - [`render`]: SVG drawings of instances and witnesses.
//! - [`cli`]: the `uca-repext` command line.

pub mod arith;
pub mod cli;
pub mod model;
pub mod reduction;
pub mod render;
pub mod solver;

//! Diversity maximization under matroid constraints through composable
//! coresets: matroid oracles, diversity objectives, farthest-first
//! clustering, sequential/streaming/partitioned coreset constructions,
//! final solvers and brute-force reference oracles.

pub mod clustering;
pub mod coreset;
pub mod dataset;
pub mod diversity;
pub mod error;
pub mod io;
mod matching;
pub mod matroid;
pub mod oracle;
pub mod point;
pub mod run;
pub mod solvers;
pub mod synth;

pub use dataset::{diameter, Dataset, PointIdx};
pub use diversity::{DiversityKind, Solution};
pub use error::{Error, Result};
pub use matching::maximum_matching;
pub use matroid::{Constraint, Matroid, MatroidKind};
pub use point::{distance, MetricKind, Point};

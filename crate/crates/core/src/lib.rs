//! Concealing a target community from GNN-based clustering.
//!
//! The crate generates featurized LFR benchmarks, perturbs them with DICE and
//! the feature-guided FCom-DICE variant, clusters with a DMoN-style graph
//! network trained from scratch, and evaluates concealment (M1, M2),
//! structural preservation (element-centric similarity, modularity) and the
//! aggregate statistics of parameter sweeps.

pub mod error;
pub mod experiment;
pub mod graph;
pub mod dmon;
pub mod lfr;
pub mod metrics;
pub mod perturb;
pub mod plots;
pub mod records;
pub mod seeding;
pub mod stats;

pub use error::{Error, Result};

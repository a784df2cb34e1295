//! MaOEDA-IR: an improved regularity-model estimation-of-distribution algorithm
//! for many-objective optimization.
//!
//! The crate is organized around the pipeline stages:
//! - [`problems`]: DTLZ1-4 and their minus variants, true-front samplers, bounds
//! - [`refvecs`]: Das-Dennis reference vectors, hyperplane mapping, association
//! - [`reduction`]: PCSEA corner search and PCA decision-space reduction
//! - [`regmodel`]: per-reference-vector regularity sub-models and sampling
//! - [`evolution`]: the main loop, diversity repair, offspring generation, selection
//! - [`metrics`]: IGD, exact and Monte Carlo hypervolume, rank-sum comparison
//! - [`harness`]: experiment plans, budgets, CSV/JSON reporting

pub mod error;
pub mod evolution;
pub mod harness;
pub mod metrics;
pub mod problems;
pub mod reduction;
pub mod refvecs;
pub mod regmodel;
pub mod rng;

pub use error::{Error, Result};

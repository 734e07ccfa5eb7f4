//! Voter-model dynamics and their dual coalescing random walks on rank-one
//! random graphs.
//!
//! The crate has five layers:
//!
//! * [`netgen`]: samplers for sparse rank-one graphs (soft norm, multigraph,
//!   hard cap, Erdos-Renyi) plus component, diameter and degree-tail analysis.
//! * [`dynamics`]: event-driven simulation of the degree-weighted voter model,
//!   coalescing walker systems, pair meetings, and subset-observed walks.
//! * [`chain`]: exact finite-state machinery for the same processes: generator
//!   matrices, relaxation and total-variation mixing times, conductance and
//!   Cheeger bounds, hitting/meeting-time solves.
//! * [`theory`]: closed-form predictors: survival fraction of the giant,
//!   integral criterion for uniform supercriticality, consensus-time scaling
//!   exponents, mean-field order, degree-tail index.
//! * [`harness`]: experiment configs, replica sweeps over N, weighted
//!   exponent fits, CSV/JSON/SVG emission, and the self-check suite.
//!
//! Every sampler is seeded and deterministic: one (config, seed) pair produces
//! byte-identical output files. Thread count only affects wall-clock time,
//! never results; set `VOTERLAB_THREADS` to pin it.

pub mod chain;
pub mod dynamics;
pub mod harness;
pub mod netgen;
pub mod theory;

mod rng;
mod stats;
mod weighted;

pub use rng::{derive_seed, mix64};

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Parameter validation failed (range, NaN, size).
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    /// Operation needs a connected graph or chain and got a disconnected one.
    #[error("graph or chain is not connected: {0}")]
    Disconnected(String),
    /// The two vertices live in different components.
    #[error("vertices {0} and {1} are in different components")]
    CrossComponent(usize, usize),
    /// A generator matrix fails the detailed-balance check.
    #[error("chain is not reversible: {0}")]
    NonReversible(String),
    /// Problem size exceeds the dense-solver cap.
    #[error("problem size {size} exceeds cap {cap} for {what}")]
    TooLarge {
        what: &'static str,
        size: usize,
        cap: usize,
    },
    /// Degree-tail regression could not run.
    #[error("degree tail fit failed: {0}")]
    TailFit(String),
    /// Regression design matrix is singular or underdetermined.
    #[error("exponent fit failed: {0}")]
    DegenerateFit(String),
    /// A proved inequality failed numerically; indicates a bug.
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
    /// Numerical routine failed to converge.
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

//! Simulation and exact analysis of two dual set-valued processes on
//! regular graphs:
//!
//! * **COBRA** (coalescing-branching random walk): every currently active
//!   vertex pushes to `k` random neighbours, chosen with replacement, and
//!   received tokens coalesce. The quantity of interest is the cover time,
//!   the first round by which every vertex has been active at least once.
//! * **BIPS** (biased infection with persistent source): every non-source
//!   vertex re-samples `k` neighbours each round and is infected exactly
//!   when it sampled an infected one; the source stays infected forever.
//!   The quantity of interest is the infection time.
//!
//! The two processes are dual under time reversal: the probability that a
//! COBRA walk started from `C` has not hit `v` by round `t` equals the
//! probability that the BIPS infection started at `v` is still disjoint
//! from `C` at round `t`. The [`exact`] module verifies this identity to
//! floating-point precision on small graphs; the [`process`] module runs
//! Monte Carlo trials at scale; the [`experiments`] module checks the
//! spectral cover-time and infection-time bounds empirically.

pub mod cli;
pub mod exact;
pub mod experiments;
pub mod graphs;
pub mod process;
pub mod rng;
pub mod spectral;

use thiserror::Error;

/// Errors shared across the graph, spectral, process and exact layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not regular: vertex {vertex} has degree {degree}, expected {expected}")]
    NotRegular {
        vertex: usize,
        degree: usize,
        expected: usize,
    },

    #[error("not simple: {0}")]
    NotSimple(String),

    #[error("malformed graph file (line {line}): {message}")]
    Malformed { line: usize, message: String },

    #[error("graph is disconnected")]
    Disconnected,

    #[error("retry budget of {0} restarts exhausted")]
    RetryBudgetExhausted(usize),

    #[error("eigenvalue iteration did not converge within {0} iterations")]
    NonConvergence(usize),

    #[error("vector length {got} does not match vertex count {expected}")]
    LengthMismatch { got: usize, expected: usize },

    #[error("vertex set is empty")]
    EmptyVertexSet,

    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("source vertex {0} is not in the infected set")]
    SourceNotInfected(usize),

    #[error("exact state-space cap exceeded: n = {n} is larger than {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("distribution is not a probability vector: {0}")]
    BadDistribution(String),

    #[error("no records to summarize")]
    NoRecords,

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Simulation lab for fair k-set selection by a screener who evaluates
//! candidates one at a time in a given order.
//!
//! The pieces, bottom up:
//! - [`domain`]: candidates, screening orders, selections, problem parameters.
//! - [`sampling`]: random instances and rank statistics.
//! - [`fatigue`]: error models for a tiring screener.
//! - [`search`]: the examination (best-k) and cascade (good-k) procedures and
//!   the utilities they optimize.
//! - [`oracle`]: brute-force reference solvers for small pools.
//! - [`metrics`] and [`harness`]: Monte Carlo comparison against the best-k
//!   baseline.
//! - [`config`], [`output`] and [`cli`]: experiment files, CSV, command line.

pub mod cli;
pub mod config;
pub mod domain;
pub mod error;
pub mod fatigue;
pub mod harness;
pub mod metrics;
pub mod oracle;
pub mod output;
pub mod rng;
pub mod sampling;
pub mod search;

pub use domain::{quota_targets, Candidate, CandidateId, CandidatePool, ProblemParams, ScreeningOrder, Selection};
pub use error::{Error, Result};
pub use fatigue::{FatigueKind, FatigueModel};
pub use harness::{
    figure_suite, run_one, run_sweep, run_sweep_with_threads, AggregateResult, CellResult, FigureConfig, OrderModel,
    Problem, Screener, Sweep, SweepConfig, SweepParam,
};
pub use metrics::RunMetrics;
pub use rng::RngStream;
pub use sampling::ScoreDistribution;
pub use search::{cascade_search, examination_search, SearchOutcome};

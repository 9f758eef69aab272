//! Particle swarm optimization with pluggable coefficient schemes and
//! neighbourhood topologies, plus the benchmark harness used to compare them.

pub mod benchmarks;
pub mod coefficients;
pub mod config;
pub mod engine;
mod error;
pub mod exec;
pub mod harness;
pub mod initialization;
pub mod metrics;
pub mod output;
mod params;
pub mod topology;

pub use benchmarks::{BenchmarkProblem, ProblemKind};
pub use coefficients::{CoefficientScheme, ResolvedCoefficients, SchemeSpec};
pub use engine::{run, ClassicalRule, RunRecord, RunSettings, SwarmState, VelocityRule};
pub use error::{Error, Result};
pub use exec::Execution;
pub use harness::{paper_grid, run_experiment, run_grid, ExperimentConfig, ExperimentReport};
pub use topology::{NeighbourSet, Topology};

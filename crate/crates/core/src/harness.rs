//! Experiments: batches of seeded runs, grids of experiments and the reports
//! they produce.
//!
//! Every experiment owns one RNG stream, seeded once from its config and
//! consumed continuously by its runs in order. Runs inside an experiment are
//! therefore sequential; a grid runs its experiments concurrently. Output
//! does not depend on the number of threads.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::benchmarks::{BenchmarkProblem, ProblemKind};
use crate::coefficients::{CoefficientScheme, SchemeSpec};
use crate::engine::{run, CheckpointRecord, RunSettings};
use crate::error::{Error, Result};
use crate::exec::{with_threads, Execution};
use crate::initialization::DEFAULT_LHS_CANDIDATES;
use crate::metrics::{summarize, RunSummary, DEFAULT_T_REF, SUCCESS_THRESHOLD};
use crate::topology::Topology;

pub const DEFAULT_SWARM_SIZE: usize = 50;
pub const DEFAULT_STEPS: usize = 10_000;
pub const DEFAULT_RUNS: usize = 25;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_HISTORY_STRIDE: usize = 10;
/// Intermediate reporting step.
pub const INTERMEDIATE_CHECKPOINT: usize = 1000;

/// Dimensionalities of the benchmark grid.
pub const GRID_DIMS: [usize; 3] = [2, 10, 30];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub dims: usize,
    pub topology: Topology,
    pub scheme: SchemeSpec,
    pub swarm_size: usize,
    pub steps: usize,
    pub runs: usize,
    pub seed: u64,
    /// `None` reports at `{1000, steps}`, dropping 1000 when it is past the
    /// end of the run.
    pub checkpoints: Option<Vec<usize>>,
    pub t_ref: usize,
    pub lhs_candidates: usize,
    /// Keep every `history_stride`-th step of each run's error history (the
    /// last step is always kept). 0 keeps none.
    pub history_stride: usize,
}

impl ExperimentConfig {
    /// An experiment with every knob at its default.
    pub fn new(problem: ProblemKind, dims: usize, topology: Topology, scheme: SchemeSpec) -> Self {
        Self {
            problem,
            dims,
            topology,
            scheme,
            swarm_size: DEFAULT_SWARM_SIZE,
            steps: DEFAULT_STEPS,
            runs: DEFAULT_RUNS,
            seed: DEFAULT_SEED,
            checkpoints: None,
            t_ref: DEFAULT_T_REF,
            lhs_candidates: DEFAULT_LHS_CANDIDATES,
            history_stride: DEFAULT_HISTORY_STRIDE,
        }
    }

    /// Sorted, deduplicated reporting steps.
    pub fn resolved_checkpoints(&self) -> Vec<usize> {
        let mut c = match &self.checkpoints {
            Some(c) => c.clone(),
            None => [INTERMEDIATE_CHECKPOINT, self.steps]
                .into_iter()
                .filter(|&c| c <= self.steps)
                .collect(),
        };
        c.sort_unstable();
        c.dedup();
        c
    }

    pub fn problem_instance(&self) -> Result<BenchmarkProblem> {
        BenchmarkProblem::new(self.problem, self.dims)
    }

    pub fn run_settings(&self) -> Result<RunSettings> {
        let settings = RunSettings {
            problem: self.problem_instance()?,
            topology: self.topology,
            scheme: self.scheme,
            swarm_size: self.swarm_size,
            steps: self.steps,
            checkpoints: self.resolved_checkpoints(),
            t_ref: self.t_ref,
            lhs_candidates: self.lhs_candidates,
        };
        settings.validate()?;
        Ok(settings)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::domain("an experiment needs at least one run"));
        }
        let checkpoints = self.resolved_checkpoints();
        if checkpoints.is_empty() {
            return Err(Error::domain("no checkpoints to report"));
        }
        if self.steps > 0 && checkpoints.contains(&0) {
            return Err(Error::domain("checkpoint 0 is only allowed for zero-step runs"));
        }
        self.run_settings().map(drop)
    }

    /// Short human-readable label, e.g. `C-PSO-1 RING nn = 2`.
    pub fn label(&self) -> String {
        format!("{} {}", self.scheme.label(), self.topology.label())
    }

    /// Thinned history steps kept for each run.
    pub fn history_steps(&self) -> Vec<usize> {
        if self.history_stride == 0 {
            return Vec::new();
        }
        let mut steps: Vec<usize> = (0..=self.steps).step_by(self.history_stride).collect();
        if steps.last() != Some(&self.steps) {
            steps.push(self.steps);
        }
        steps
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointSummary {
    pub step: usize,
    pub summary: RunSummary,
}

/// What a report keeps of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub checkpoints: Vec<CheckpointRecord>,
    /// Errors at [`ExperimentConfig::history_steps`].
    pub history: Vec<f64>,
    pub final_gbest: Vec<f64>,
}

impl RunReport {
    pub fn final_record(&self) -> &CheckpointRecord {
        self.checkpoints.last().expect("validated configs report at least one checkpoint")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub checkpoints: Vec<CheckpointSummary>,
    pub runs: Vec<RunReport>,
    /// Mean best conflict over the runs at every step, `steps + 1` entries.
    pub curve: Vec<f64>,
}

impl ExperimentReport {
    pub fn summary_at(&self, step: usize) -> Option<&RunSummary> {
        self.checkpoints.iter().find(|c| c.step == step).map(|c| &c.summary)
    }

    pub fn final_summary(&self) -> &RunSummary {
        &self.checkpoints.last().expect("at least one checkpoint").summary
    }

    /// Final errors of every run, in run order.
    pub fn final_errors(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.final_record().error).collect()
    }
}

/// Runs every repetition of `cfg` and assembles its report.
pub fn run_experiment(cfg: &ExperimentConfig, exec: Execution) -> Result<ExperimentReport> {
    cfg.validate()?;
    let settings = cfg.run_settings()?;
    let problem = &settings.problem;
    let history_steps = cfg.history_steps();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut curve = vec![0.0; cfg.steps + 1];
    let mut runs = Vec::with_capacity(cfg.runs);
    for k in 0..cfg.runs {
        let record = run(&settings, &mut rng, exec)?;
        for (acc, e) in curve.iter_mut().zip(&record.errors) {
            *acc += e + problem.optimum_conflict();
        }
        log::debug!("{} run {k}: final error {:e}", cfg.label(), record.final_error());
        runs.push(RunReport {
            history: history_steps.iter().map(|&s| record.errors[s]).collect(),
            checkpoints: record.checkpoints,
            final_gbest: record.final_gbest,
        });
    }
    for c in &mut curve {
        *c /= cfg.runs as f64;
    }
    let checkpoints = settings
        .checkpoints
        .iter()
        .enumerate()
        .map(|(idx, &step)| {
            let errors: Vec<f64> = runs.iter().map(|r| r.checkpoints[idx].error).collect();
            let pb_mes: Vec<f64> = runs.iter().map(|r| r.checkpoints[idx].pb_me).collect();
            Ok(CheckpointSummary {
                step,
                summary: summarize(&errors, &pb_mes, SUCCESS_THRESHOLD)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentReport {
        config: cfg.clone(),
        checkpoints,
        runs,
        curve,
    })
}

/// Outcome of one grid entry together with its wall-clock time.
#[derive(Debug)]
pub struct GridOutcome {
    pub result: Result<ExperimentReport>,
    pub elapsed: Duration,
}

/// Runs every experiment of `grid`, concurrently when `exec` is parallel,
/// on `threads` workers (`None` for the default pool). Results keep the
/// input order; a failing experiment does not stop the others.
pub fn run_grid_timed(grid: &[ExperimentConfig], exec: Execution, threads: Option<usize>) -> Vec<GridOutcome> {
    let total = grid.len();
    let done = std::sync::atomic::AtomicUsize::new(0);
    with_threads(threads, || {
        exec.map(grid, |cfg| {
            let start = Instant::now();
            let result = run_experiment(cfg, exec);
            let elapsed = start.elapsed();
            let k = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
            match &result {
                Ok(_) => log::info!(
                    "[{k}/{total}] {} {}D {} done in {:.1}s",
                    cfg.problem,
                    cfg.dims,
                    cfg.label(),
                    elapsed.as_secs_f64()
                ),
                Err(e) => log::error!("[{k}/{total}] {} {}D {} failed: {e}", cfg.problem, cfg.dims, cfg.label()),
            }
            GridOutcome { result, elapsed }
        })
    })
}

pub fn run_grid(grid: &[ExperimentConfig], exec: Execution, threads: Option<usize>) -> Vec<Result<ExperimentReport>> {
    run_grid_timed(grid, exec, threads).into_iter().map(|o| o.result).collect()
}

/// Scheme order of the comparison tables.
pub const GRID_SCHEMES: [SchemeSpec; 4] = [
    SchemeSpec::Single(CoefficientScheme::PSO_RRR2_1),
    SchemeSpec::Single(CoefficientScheme::PSO_RRR1_1),
    SchemeSpec::Single(CoefficientScheme::C_PSO_1),
    SchemeSpec::MultiSwarm,
];

/// Topology order of the comparison tables for a swarm of `m`.
pub fn grid_topologies(m: usize) -> [Topology; 5] {
    [
        Topology::Global,
        Topology::Ring { nn: 2 },
        Topology::DynamicRing { nni: 2, nnf: m - 1 },
        Topology::Wheel { hub: 0 },
        Topology::Random,
    ]
}

/// The full factorial comparison: 5 functions x 3 dimensionalities x
/// 4 schemes x 5 topologies, all on the same seed.
pub fn paper_grid(seed: u64) -> Vec<ExperimentConfig> {
    let mut grid = Vec::with_capacity(300);
    for problem in ProblemKind::ALL {
        for dims in GRID_DIMS {
            for scheme in GRID_SCHEMES {
                for topology in grid_topologies(DEFAULT_SWARM_SIZE) {
                    let mut cfg = ExperimentConfig::new(problem, dims, topology, scheme);
                    cfg.seed = seed;
                    grid.push(cfg);
                }
            }
        }
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(problem: ProblemKind, dims: usize) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(problem, dims, Topology::Ring { nn: 2 }, SchemeSpec::MultiSwarm);
        cfg.swarm_size = 10;
        cfg.steps = 60;
        cfg.runs = 4;
        cfg.lhs_candidates = 8;
        cfg.checkpoints = Some(vec![20, 60]);
        cfg.t_ref = 5;
        cfg.history_stride = 25;
        cfg
    }

    #[test]
    fn default_checkpoints() {
        let mut cfg = ExperimentConfig::new(ProblemKind::Sphere, 2, Topology::Global, SchemeSpec::MultiSwarm);
        assert_eq!(cfg.resolved_checkpoints(), vec![1000, 10_000]);
        cfg.steps = 500;
        assert_eq!(cfg.resolved_checkpoints(), vec![500]);
        cfg.steps = 1000;
        assert_eq!(cfg.resolved_checkpoints(), vec![1000]);
        cfg.steps = 0;
        assert_eq!(cfg.resolved_checkpoints(), vec![0]);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn validation() {
        let mut cfg = small(ProblemKind::Sphere, 2);
        assert!(cfg.validate().is_ok());
        cfg.runs = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = small(ProblemKind::Sphere, 2);
        cfg.checkpoints = Some(vec![0, 60]);
        assert!(cfg.validate().is_err());
        cfg.checkpoints = Some(vec![]);
        assert!(cfg.validate().is_err());
        cfg.checkpoints = Some(vec![61]);
        assert!(cfg.validate().is_err());
        let mut cfg = small(ProblemKind::Sphere, 0);
        assert!(cfg.validate().is_err());
        cfg.dims = 2;
        cfg.swarm_size = 2;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn history_steps_keep_the_end() {
        let cfg = small(ProblemKind::Sphere, 2);
        assert_eq!(cfg.history_steps(), vec![0, 25, 50, 60]);
        let mut c = cfg.clone();
        c.history_stride = 30;
        assert_eq!(c.history_steps(), vec![0, 30, 60]);
        c.history_stride = 0;
        assert!(c.history_steps().is_empty());
    }

    #[test]
    fn single_run_collapses_statistics() {
        let mut cfg = small(ProblemKind::Rastrigin, 2);
        cfg.runs = 1;
        let r = run_experiment(&cfg, Execution::Sequential).unwrap();
        let s = r.final_summary();
        assert_eq!(s.best, s.median);
        assert_eq!(s.best, s.mean);
        assert_eq!(s.best, s.worst);
    }

    #[test]
    fn report_is_consistent() {
        let cfg = small(ProblemKind::Griewank, 3);
        let r = run_experiment(&cfg, Execution::Sequential).unwrap();
        assert_eq!(r.curve.len(), 61);
        assert!(r.curve.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(r.runs.len(), 4);
        let errors = r.final_errors();
        let pb: Vec<f64> = r.runs.iter().map(|x| x.final_record().pb_me).collect();
        assert_eq!(*r.final_summary(), summarize(&errors, &pb, SUCCESS_THRESHOLD).unwrap());
        for run in &r.runs {
            assert_eq!(*run.history.last().unwrap(), run.final_record().error);
        }
        let first: f64 = r.runs.iter().map(|x| x.history[0]).sum::<f64>() / 4.0;
        assert!((r.curve[0] - first).abs() <= 1e-12 * first.abs());
    }

    #[test]
    fn deterministic() {
        let cfg = small(ProblemKind::Rosenbrock, 4);
        let a = run_experiment(&cfg, Execution::Sequential).unwrap();
        let b = run_experiment(&cfg, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn grid_order_and_failures() {
        let mut bad = small(ProblemKind::Sphere, 2);
        bad.runs = 0;
        let grid = vec![small(ProblemKind::Sphere, 2), bad, small(ProblemKind::SchafferF6, 2)];
        let out = run_grid(&grid, Execution::Parallel, Some(3));
        assert_eq!(out.len(), 3);
        assert_eq!(out[0].as_ref().unwrap().config, grid[0]);
        assert!(out[1].is_err());
        assert_eq!(out[2].as_ref().unwrap().config, grid[2]);
        let seq = run_grid(&grid, Execution::Sequential, None);
        assert_eq!(seq[2].as_ref().unwrap(), out[2].as_ref().unwrap());
        assert_eq!(run_grid(&grid[..1], Execution::Parallel, None).len(), 1);
    }

    #[test]
    fn full_grid_shape() {
        let grid = paper_grid(7);
        assert_eq!(grid.len(), 300);
        assert!(grid.iter().all(|c| c.seed == 7 && c.validate().is_ok()));
        let ms = grid.iter().filter(|c| c.scheme == SchemeSpec::MultiSwarm).count();
        assert_eq!(ms, 75);
        assert_eq!(grid[2].topology, Topology::DynamicRing { nni: 2, nnf: 49 });
    }
}

//! Swarm state, the synchronous update step and single runs.
//!
//! One step, for every particle `i` and component `j`, all from the bests
//! of the previous step:
//!
//! ```text
//! v' = w v + phi_i (pbest_i - x) + phi_s (lbest_i - x)
//! x' = x + v'
//! ```
//!
//! Only after every particle has moved are the new positions evaluated.
//! Positions outside the bounds are not evaluated at all; the particle keeps
//! moving but its personal best stays put.
//!
//! RNG consumption order within a step is particle-major: the particle's
//! neighbourhood draws (random topology only), then for each component
//! `phi_i` followed by `phi_s`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::benchmarks::BenchmarkProblem;
use crate::coefficients::{ResolvedCoefficients, SchemeSpec};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::initialization::{evaluate_if_feasible, init_blocks, init_swarm, InitConfig};
use crate::metrics::{clustering_term, inverse_widths, PbMeTracker};
use crate::topology::{lbest_index, NeighbourScratch, Topology};

/// Source of the inertia weight and the per-component acceleration draws.
pub trait VelocityRule {
    fn inertia(&self) -> f64;
    /// Draws `(phi_i, phi_s)` for one component.
    fn sample_phi<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64);
}

impl VelocityRule for ResolvedCoefficients {
    #[inline]
    fn inertia(&self) -> f64 {
        self.w()
    }

    #[inline]
    fn sample_phi<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        ResolvedCoefficients::sample_phi(self, rng)
    }
}

/// The classical update: `phi_i = iw U(0,1)`, `phi_s = sw U(0,1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalRule {
    pub w: f64,
    pub iw: f64,
    pub sw: f64,
}

impl VelocityRule for ClassicalRule {
    fn inertia(&self) -> f64 {
        self.w
    }

    #[inline]
    fn sample_phi<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let u1: f64 = rng.gen();
        let u2: f64 = rng.gen();
        (self.iw * u1, self.sw * u2)
    }
}

/// Positions, velocities and memories of one swarm.
#[derive(Debug, Clone)]
pub struct SwarmState {
    t: usize,
    n: usize,
    positions: Vec<f64>,
    velocities: Vec<f64>,
    pbest: Vec<f64>,
    pbest_conflict: Vec<f64>,
    tags: Vec<u8>,
    gbest: usize,
    scratch: Scratch,
}

#[derive(Debug, Clone, Default)]
struct Scratch {
    neighbours: Vec<usize>,
    random: NeighbourScratch,
}

impl PartialEq for SwarmState {
    fn eq(&self, other: &Self) -> bool {
        self.t == other.t
            && self.n == other.n
            && self.positions == other.positions
            && self.velocities == other.velocities
            && self.pbest == other.pbest
            && self.pbest_conflict == other.pbest_conflict
            && self.tags == other.tags
            && self.gbest == other.gbest
    }
}

impl SwarmState {
    /// Assembles a state at step 0 from row-major `m x n` arrays.
    pub fn from_parts(
        n: usize,
        positions: Vec<f64>,
        velocities: Vec<f64>,
        pbest: Vec<f64>,
        pbest_conflict: Vec<f64>,
        tags: Vec<u8>,
    ) -> Result<Self> {
        let m = pbest_conflict.len();
        if n == 0 || m == 0 {
            return Err(Error::Empty("swarm"));
        }
        for (_name, len) in [("positions", positions.len()), ("velocities", velocities.len()), ("pbest", pbest.len())] {
            if len != m * n {
                return Err(Error::DimensionMismatch { expected: m * n, got: len });
            }
        }
        if tags.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: tags.len() });
        }
        let mut state = Self {
            t: 0,
            n,
            positions,
            velocities,
            pbest,
            pbest_conflict,
            tags,
            gbest: 0,
            scratch: Scratch {
                neighbours: Vec::with_capacity(m),
                random: NeighbourScratch::new(m),
            },
        };
        state.refresh_gbest();
        Ok(state)
    }

    /// Stacks independently initialized blocks into one swarm.
    pub fn concat(blocks: Vec<SwarmState>) -> Result<Self> {
        let n = blocks.first().ok_or(Error::Empty("swarm blocks"))?.n;
        if blocks.iter().any(|b| b.n != n) {
            return Err(Error::Format("blocks of different dimensionality".into()));
        }
        let mut parts = (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for b in blocks {
            parts.0.extend(b.positions);
            parts.1.extend(b.velocities);
            parts.2.extend(b.pbest);
            parts.3.extend(b.pbest_conflict);
            parts.4.extend(b.tags);
        }
        Self::from_parts(n, parts.0, parts.1, parts.2, parts.3, parts.4)
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn swarm_size(&self) -> usize {
        self.pbest_conflict.len()
    }

    pub fn dims(&self) -> usize {
        self.n
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn position(&self, i: usize) -> &[f64] {
        &self.positions[i * self.n..(i + 1) * self.n]
    }

    pub fn velocities(&self) -> &[f64] {
        &self.velocities
    }

    pub fn velocity(&self, i: usize) -> &[f64] {
        &self.velocities[i * self.n..(i + 1) * self.n]
    }

    pub fn pbest_positions(&self) -> &[f64] {
        &self.pbest
    }

    pub fn pbest(&self, i: usize) -> &[f64] {
        &self.pbest[i * self.n..(i + 1) * self.n]
    }

    pub fn pbest_conflict(&self) -> &[f64] {
        &self.pbest_conflict
    }

    pub fn tags(&self) -> &[u8] {
        &self.tags
    }

    pub fn gbest_index(&self) -> usize {
        self.gbest
    }

    pub fn gbest_conflict(&self) -> f64 {
        self.pbest_conflict[self.gbest]
    }

    pub fn gbest_position(&self) -> &[f64] {
        self.pbest(self.gbest)
    }

    fn refresh_gbest(&mut self) {
        self.gbest = (0..self.pbest_conflict.len())
            .reduce(|best, k| if self.pbest_conflict[k] < self.pbest_conflict[best] { k } else { best })
            .unwrap_or(0);
    }

    /// Advances the swarm by one synchronous step. `rules[tag]` supplies the
    /// coefficients of every particle carrying `tag`.
    pub fn step<V: VelocityRule, R: Rng + ?Sized>(
        &mut self,
        topology: &Topology,
        problem: &BenchmarkProblem,
        rules: &[V],
        total_steps: usize,
        rng: &mut R,
    ) {
        let m = self.swarm_size();
        let n = self.n;
        let t = self.t;
        for i in 0..m {
            let lbest = match topology {
                Topology::Global => self.gbest,
                _ => {
                    topology.fill(
                        i,
                        t,
                        total_steps,
                        m,
                        rng,
                        &mut self.scratch.random,
                        &mut self.scratch.neighbours,
                    );
                    lbest_index(&self.pbest_conflict, &self.scratch.neighbours)
                }
            };
            let rule = &rules[self.tags[i] as usize];
            let w = rule.inertia();
            let own = i * n;
            let social = lbest * n;
            for j in 0..n {
                let (phi_i, phi_s) = rule.sample_phi(rng);
                let x = self.positions[own + j];
                let v = w * self.velocities[own + j]
                    + phi_i * (self.pbest[own + j] - x)
                    + phi_s * (self.pbest[social + j] - x);
                self.velocities[own + j] = v;
                self.positions[own + j] = x + v;
            }
        }
        for i in 0..m {
            let x = &self.positions[i * n..(i + 1) * n];
            let f = evaluate_if_feasible(problem, x);
            if f < self.pbest_conflict[i] {
                self.pbest_conflict[i] = f;
                self.pbest[i * n..(i + 1) * n].copy_from_slice(x);
            }
        }
        self.refresh_gbest();
        self.t += 1;
    }
}

/// Sizes of `k` contiguous blocks splitting `m` particles as evenly as
/// possible, larger blocks first.
pub fn block_sizes(m: usize, k: usize) -> Vec<usize> {
    (0..k).map(|b| m / k + usize::from(b < m % k)).collect()
}

/// Per-particle scheme tags for the multi-swarm: three contiguous blocks.
pub fn multi_swarm_assign(m: usize) -> Result<Vec<u8>> {
    if m < 3 {
        return Err(Error::domain(format!("multi-swarm needs at least 3 particles, got {m}")));
    }
    Ok(block_sizes(m, 3)
        .into_iter()
        .enumerate()
        .flat_map(|(tag, size)| std::iter::repeat_n(tag as u8, size))
        .collect())
}

/// Everything one run needs besides its RNG.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    pub problem: BenchmarkProblem,
    pub topology: Topology,
    pub scheme: SchemeSpec,
    pub swarm_size: usize,
    pub steps: usize,
    /// Steps at which the error and pb_me are reported, in `[0, steps]`.
    pub checkpoints: Vec<usize>,
    pub t_ref: usize,
    pub lhs_candidates: usize,
}

impl RunSettings {
    pub fn validate(&self) -> Result<()> {
        InitConfig {
            swarm_size: self.swarm_size,
            lhs_candidates: self.lhs_candidates,
        }
        .validate()?;
        self.topology.validate(self.swarm_size)?;
        for scheme in self.scheme.schemes() {
            scheme.resolve()?;
        }
        if self.t_ref == 0 {
            return Err(Error::domain("t_ref must be at least 1"));
        }
        if let Some(&c) = self.checkpoints.iter().find(|&&c| c > self.steps) {
            return Err(Error::domain(format!("checkpoint {c} beyond the run length {}", self.steps)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckpointRecord {
    pub step: usize,
    pub error: f64,
    pub pb_me: f64,
}

/// Outcome of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    /// Best error after initialization and after every step: `steps + 1`
    /// entries.
    pub errors: Vec<f64>,
    pub checkpoints: Vec<CheckpointRecord>,
    pub final_gbest: Vec<f64>,
}

impl RunRecord {
    pub fn final_error(&self) -> f64 {
        *self.errors.last().expect("a run always records its initialization")
    }

    pub fn checkpoint(&self, step: usize) -> Option<&CheckpointRecord> {
        self.checkpoints.iter().find(|c| c.step == step)
    }
}

/// Builds the initial swarm and the per-tag coefficients for `settings`.
pub fn prepare<R: Rng + ?Sized>(
    settings: &RunSettings,
    rng: &mut R,
    exec: Execution,
) -> Result<(SwarmState, Vec<ResolvedCoefficients>)> {
    let rules = settings
        .scheme
        .schemes()
        .iter()
        .map(|s| s.resolve())
        .collect::<Result<Vec<_>>>()?;
    let swarm = match settings.scheme {
        SchemeSpec::Single(_) => init_swarm(
            &InitConfig {
                swarm_size: settings.swarm_size,
                lhs_candidates: settings.lhs_candidates,
            },
            &settings.problem,
            rng,
            exec,
        )?,
        SchemeSpec::MultiSwarm => init_blocks(
            &block_sizes(settings.swarm_size, 3),
            settings.lhs_candidates,
            &settings.problem,
            rng,
            exec,
        )?,
    };
    Ok((swarm, rules))
}

/// Executes one complete run.
pub fn run<R: Rng + ?Sized>(settings: &RunSettings, rng: &mut R, exec: Execution) -> Result<RunRecord> {
    settings.validate()?;
    let (mut swarm, rules) = prepare(settings, rng, exec)?;
    let problem = &settings.problem;
    let inv_width = inverse_widths(problem.lower(), problem.upper())?;
    let mut tracker = PbMeTracker::new(settings.t_ref);
    let mut errors = Vec::with_capacity(settings.steps + 1);
    let mut checkpoints = Vec::with_capacity(settings.checkpoints.len());

    let mut observe = |swarm: &SwarmState, errors: &mut Vec<f64>| {
        errors.push(problem.error_of(swarm.gbest_conflict()));
        tracker.push(clustering_term(swarm.positions(), swarm.gbest_position(), &inv_width));
        if settings.checkpoints.contains(&swarm.t()) {
            checkpoints.push(CheckpointRecord {
                step: swarm.t(),
                error: problem.error_of(swarm.gbest_conflict()),
                pb_me: tracker.value(),
            });
        }
    };

    observe(&swarm, &mut errors);
    for _ in 0..settings.steps {
        swarm.step(&settings.topology, problem, &rules, settings.steps, rng);
        observe(&swarm, &mut errors);
    }
    Ok(RunRecord {
        errors,
        checkpoints,
        final_gbest: swarm.gbest_position().to_vec(),
    })
}

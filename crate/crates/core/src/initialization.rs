//! Swarm initialization.
//!
//! Positions come from the best of many Latin hypercube samples (largest
//! minimum inter-particle distance). Each personal best starts at a fixed
//! per-axis offset of `(upper - lower) / (2m)` with a random sign, and the
//! better of the pair becomes the personal best. Velocities start at zero.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::benchmarks::BenchmarkProblem;
use crate::engine::SwarmState;
use crate::error::{Error, Result};
use crate::exec::Execution;

/// Default number of Latin hypercube candidates.
pub const DEFAULT_LHS_CANDIDATES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InitConfig {
    pub swarm_size: usize,
    pub lhs_candidates: usize,
}

impl InitConfig {
    pub fn new(swarm_size: usize) -> Self {
        Self {
            swarm_size,
            lhs_candidates: DEFAULT_LHS_CANDIDATES,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.swarm_size < 3 {
            return Err(Error::domain(format!("swarm size must be at least 3, got {}", self.swarm_size)));
        }
        if self.lhs_candidates == 0 {
            return Err(Error::domain("need at least one LHS candidate"));
        }
        Ok(())
    }
}

/// Row-major `rows x cols` matrix of points.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl PointSet {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Format("ragged point rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Smallest squared Euclidean distance between two distinct rows;
    /// infinite for a single row.
    pub fn min_pairwise_distance_sq(&self) -> f64 {
        let mut best = f64::INFINITY;
        for a in 0..self.rows {
            let ra = self.row(a);
            for b in a + 1..self.rows {
                let d: f64 = ra
                    .iter()
                    .zip(self.row(b))
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum();
                if d < best {
                    best = d;
                }
            }
        }
        best
    }

    fn scale_into(&mut self, lower: &[f64], upper: &[f64]) {
        for row in self.data.chunks_mut(self.cols) {
            for (v, (lo, hi)) in row.iter_mut().zip(lower.iter().zip(upper)) {
                *v = lo + *v * (hi - lo);
            }
        }
    }
}

/// One Latin hypercube sample of `m` points in the unit cube.
///
/// Column by column: a random permutation of the `m` strata, then one
/// uniform offset per row inside its stratum.
pub fn latin_hypercube<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> PointSet {
    let mut data = vec![0.0; m * n];
    let mut strata: Vec<usize> = (0..m).collect();
    let width = 1.0 / m as f64;
    for j in 0..n {
        strata.shuffle(rng);
        for (k, &stratum) in strata.iter().enumerate() {
            let u: f64 = rng.gen();
            data[k * n + j] = (stratum as f64 + u) * width;
        }
    }
    PointSet { rows: m, cols: n, data }
}

/// Index of the candidate with the largest minimum pairwise distance; the
/// first one wins ties.
pub fn maximin_select(candidates: &[PointSet], exec: Execution) -> Result<usize> {
    if candidates.is_empty() {
        return Err(Error::Empty("maximin candidates"));
    }
    let scores = exec.map(candidates, PointSet::min_pairwise_distance_sq);
    let mut best = 0;
    for (k, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = k;
        }
    }
    Ok(best)
}

/// Maximin-selected LHS positions scaled to the problem bounds.
pub fn maximin_positions<R: Rng + ?Sized>(
    cfg: &InitConfig,
    problem: &BenchmarkProblem,
    rng: &mut R,
    exec: Execution,
) -> Result<PointSet> {
    if cfg.swarm_size == 0 || cfg.lhs_candidates == 0 {
        return Err(Error::domain("need at least one particle and one LHS candidate"));
    }
    let n = problem.dims();
    let mut candidates: Vec<PointSet> = (0..cfg.lhs_candidates)
        .map(|_| {
            let mut c = latin_hypercube(cfg.swarm_size, n, rng);
            c.scale_into(problem.lower(), problem.upper());
            c
        })
        .collect();
    let best = maximin_select(&candidates, exec)?;
    Ok(candidates.swap_remove(best))
}

/// Builds an initial swarm; every particle carries scheme tag 0.
pub fn init_swarm<R: Rng + ?Sized>(
    cfg: &InitConfig,
    problem: &BenchmarkProblem,
    rng: &mut R,
    exec: Execution,
) -> Result<SwarmState> {
    cfg.validate()?;
    init_block(cfg, problem, 0, rng, exec)
}

/// Builds one swarm out of independently initialized blocks; block `k` has
/// `sizes[k]` particles tagged `k`.
pub fn init_blocks<R: Rng + ?Sized>(
    sizes: &[usize],
    lhs_candidates: usize,
    problem: &BenchmarkProblem,
    rng: &mut R,
    exec: Execution,
) -> Result<SwarmState> {
    let mut blocks = Vec::with_capacity(sizes.len());
    for (tag, &size) in sizes.iter().enumerate() {
        let cfg = InitConfig {
            swarm_size: size,
            lhs_candidates,
        };
        blocks.push(init_block(&cfg, problem, tag as u8, rng, exec)?);
    }
    SwarmState::concat(blocks)
}

fn init_block<R: Rng + ?Sized>(
    cfg: &InitConfig,
    problem: &BenchmarkProblem,
    tag: u8,
    rng: &mut R,
    exec: Execution,
) -> Result<SwarmState> {
    let m = cfg.swarm_size;
    let n = problem.dims();
    let mut positions = maximin_positions(cfg, problem, rng, exec)?.into_vec();
    let mut pbest = positions.clone();
    for i in 0..m {
        for j in 0..n {
            let step = (problem.upper()[j] - problem.lower()[j]) / (2 * m) as f64;
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            pbest[i * n + j] += sign * step;
        }
    }
    let mut pbest_conflict = vec![0.0; m];
    for i in 0..m {
        let p = &positions[i * n..(i + 1) * n];
        let q = &pbest[i * n..(i + 1) * n];
        let fp = evaluate_if_feasible(problem, p);
        let fq = evaluate_if_feasible(problem, q);
        if fp < fq {
            let range = i * n..(i + 1) * n;
            positions[range.clone()].swap_with_slice(&mut pbest[range]);
            pbest_conflict[i] = fp;
        } else {
            pbest_conflict[i] = fq;
        }
    }
    SwarmState::from_parts(n, positions, vec![0.0; m * n], pbest, pbest_conflict, vec![tag; m])
}

/// Conflict at `x`, or `+inf` when `x` lies outside the bounds.
pub(crate) fn evaluate_if_feasible(problem: &BenchmarkProblem, x: &[f64]) -> f64 {
    if problem.is_feasible(x) {
        problem.kind().evaluate(x)
    } else {
        f64::INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::ProblemKind;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_point_lhs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = latin_hypercube(1, 3, &mut rng);
        assert_eq!(p.rows(), 1);
        assert!(p.row(0).iter().all(|v| (0.0..1.0).contains(v)));
    }

    #[test]
    fn lhs_strata_are_a_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let p = latin_hypercube(4, 2, &mut rng);
            for j in 0..2 {
                let mut strata: Vec<usize> = (0..4).map(|k| (p.row(k)[j] * 4.0).floor() as usize).collect();
                strata.sort_unstable();
                assert_eq!(strata, vec![0, 1, 2, 3]);
            }
        }
    }

    #[test]
    fn lhs_column_means() {
        // each column mean of an m-point LHS has variance 1 / (12 m^3)
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (m, draws) = (5usize, 4000);
        let mut total = 0.0;
        for _ in 0..draws {
            let p = latin_hypercube(m, 1, &mut rng);
            total += p.as_slice().iter().sum::<f64>() / m as f64;
        }
        let mean = total / draws as f64;
        let sigma = (1.0 / (12.0 * (m as f64).powi(3)) / draws as f64).sqrt();
        assert!((mean - 0.5).abs() < 3.0 * sigma, "{mean}");
    }

    #[test]
    fn maximin_trivial_cases() {
        let a = PointSet::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(maximin_select(std::slice::from_ref(&a), Execution::Sequential).unwrap(), 0);
        let coincident = PointSet::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert_eq!(maximin_select(&[coincident, a.clone()], Execution::Parallel).unwrap(), 1);
        assert_eq!(maximin_select(&[a.clone(), a], Execution::Sequential).unwrap(), 0);
        assert!(matches!(maximin_select(&[], Execution::Sequential), Err(Error::Empty(_))));
    }

    #[test]
    fn init_offsets_and_swap() {
        let problem = BenchmarkProblem::new(ProblemKind::Sphere, 3).unwrap();
        let cfg = InitConfig { swarm_size: 50, lhs_candidates: 20 };
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = init_swarm(&cfg, &problem, &mut rng, Execution::Sequential).unwrap();
        assert_eq!(s.swarm_size(), 50);
        assert!(s.velocities().iter().all(|&v| v == 0.0));
        for i in 0..50 {
            for j in 0..3 {
                let d = (s.position(i)[j] - s.pbest(i)[j]).abs();
                assert!((d - 2.0).abs() < 1e-12, "offset {d}");
            }
            let fx = evaluate_if_feasible(&problem, s.position(i));
            assert!(s.pbest_conflict()[i] <= fx);
        }
    }

    #[test]
    fn init_is_reproducible() {
        let problem = BenchmarkProblem::new(ProblemKind::Griewank, 4).unwrap();
        let cfg = InitConfig { swarm_size: 10, lhs_candidates: 30 };
        let a = init_swarm(&cfg, &problem, &mut ChaCha8Rng::seed_from_u64(5), Execution::Sequential).unwrap();
        let b = init_swarm(&cfg, &problem, &mut ChaCha8Rng::seed_from_u64(5), Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn infeasible_offset_never_becomes_pbest() {
        // a narrow box makes offsets leave it often
        let problem = BenchmarkProblem::with_bounds(ProblemKind::Sphere, vec![0.0; 2], vec![1.0; 2]).unwrap();
        let cfg = InitConfig { swarm_size: 3, lhs_candidates: 5 };
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let s = init_swarm(&cfg, &problem, &mut rng, Execution::Sequential).unwrap();
            for i in 0..3 {
                assert!(problem.is_feasible(s.pbest(i)));
                assert!(s.pbest_conflict()[i].is_finite());
            }
        }
    }

    #[test]
    fn config_validation() {
        assert!(InitConfig { swarm_size: 2, lhs_candidates: 1 }.validate().is_err());
        assert!(InitConfig { swarm_size: 3, lhs_candidates: 0 }.validate().is_err());
    }
}

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swarmtopo::engine::{ClassicalRule, SwarmState};
use swarmtopo::initialization::{init_swarm, InitConfig};
use swarmtopo::{BenchmarkProblem, CoefficientScheme, Execution, ProblemKind, Topology};

/// Direct transcription of the windowed clustering sum, written without
/// reference to the library code.
pub fn pb_me_oracle(window: &[(Vec<Vec<f64>>, Vec<f64>)], lower: &[f64], upper: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (particles, g) in window {
        let m = particles.len();
        let n = g.len();
        let mut s = 0.0;
        for x in particles {
            for j in 0..n {
                let d = (x[j] - g[j]) / (upper[j] - lower[j]);
                s += d * d;
            }
        }
        acc += (s / (m as f64 * n as f64)).sqrt();
    }
    acc / window.len() as f64
}

/// Random window of at most `max_len` steps with `m <= 5`, `n <= 3`.
/// Steps of `(particle positions, gbest)`.
pub type Window = Vec<(Vec<Vec<f64>>, Vec<f64>)>;

pub fn random_window(rng: &mut ChaCha8Rng) -> (Window, Vec<f64>, Vec<f64>) {
    let m = rng.gen_range(1..=5);
    let n = rng.gen_range(1..=3);
    let len = rng.gen_range(1..=4);
    let lower: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..0.0)).collect();
    let upper: Vec<f64> = lower.iter().map(|l| l + rng.gen_range(0.5..20.0)).collect();
    let point = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..n).map(|j| rng.gen_range(lower[j]..upper[j])).collect() };
    let window = (0..len)
        .map(|_| ((0..m).map(|_| point(rng)).collect(), point(rng)))
        .collect();
    (window, lower, upper)
}

/// A freshly initialized swarm plus the classical rule equivalent to
/// `scheme`'s resolved coefficients.
pub fn classical_pair(seed: u64, kind: ProblemKind, dims: usize, m: usize) -> (SwarmState, BenchmarkProblem) {
    let problem = BenchmarkProblem::new(kind, dims).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = InitConfig { swarm_size: m, lhs_candidates: 5 };
    (init_swarm(&cfg, &problem, &mut rng, Execution::Sequential).unwrap(), problem)
}

pub fn classical_of(scheme: CoefficientScheme) -> ClassicalRule {
    let rc = scheme.resolve().unwrap();
    assert_eq!(rc.phi_min(), 0.0);
    ClassicalRule {
        w: rc.w(),
        iw: rc.ip() * rc.phi_max(),
        sw: rc.sp() * rc.phi_max(),
    }
}

pub fn all_topologies(m: usize) -> Vec<Topology> {
    vec![
        Topology::Global,
        Topology::Ring { nn: 2 },
        Topology::DynamicRing { nni: 2, nnf: m - 1 },
        Topology::Wheel { hub: 0 },
        Topology::Random,
    ]
}

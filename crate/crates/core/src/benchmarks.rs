//! Benchmark conflict functions.
//!
//! All five have their global optimum at conflict 0.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProblemKind {
    Sphere,
    Rosenbrock,
    Rastrigin,
    Griewank,
    SchafferF6,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 5] = [
        Self::Sphere,
        Self::Rosenbrock,
        Self::Rastrigin,
        Self::Griewank,
        Self::SchafferF6,
    ];

    /// Conventional symmetric feasible interval `[-r, r]`.
    pub fn default_half_width(self) -> f64 {
        match self {
            Self::Sphere | Self::SchafferF6 => 100.0,
            Self::Rosenbrock => 30.0,
            Self::Rastrigin => 5.12,
            Self::Griewank => 600.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Sphere => "sphere",
            Self::Rosenbrock => "rosenbrock",
            Self::Rastrigin => "rastrigin",
            Self::Griewank => "griewank",
            Self::SchafferF6 => "schaffer-f6",
        }
    }

    /// Upper-case heading used in statistics tables.
    pub fn heading(self) -> &'static str {
        match self {
            Self::Sphere => "SPHERE",
            Self::Rosenbrock => "ROSENBROCK",
            Self::Rastrigin => "RASTRIGIN",
            Self::Griewank => "GRIEWANK",
            Self::SchafferF6 => "SCHAFFER F6",
        }
    }

    /// Evaluates the function. The caller guarantees `x` is non-empty.
    pub fn evaluate(self, x: &[f64]) -> f64 {
        match self {
            Self::Sphere => x.iter().map(|v| v * v).sum(),
            Self::Rosenbrock => x
                .windows(2)
                .map(|w| {
                    let a = w[1] - w[0] * w[0];
                    let b = 1.0 - w[0];
                    100.0 * a * a + b * b
                })
                .sum(),
            Self::Rastrigin => {
                10.0 * x.len() as f64
                    + x.iter().map(|v| v * v - 10.0 * (2.0 * PI * v).cos()).sum::<f64>()
            }
            Self::Griewank => {
                let sum: f64 = x.iter().map(|v| v * v).sum::<f64>() / 4000.0;
                let prod: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(j, v)| (v / ((j + 1) as f64).sqrt()).cos())
                    .product();
                1.0 + sum - prod
            }
            Self::SchafferF6 => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                let s = r2.sqrt().sin();
                let d = 1.0 + 0.001 * r2;
                0.5 + (s * s - 0.5) / (d * d)
            }
        }
    }

    /// A known global minimiser in `n` dimensions.
    pub fn optimizer(self, n: usize) -> Vec<f64> {
        match self {
            Self::Rosenbrock => vec![1.0; n],
            _ => vec![0.0; n],
        }
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sphere" => Ok(Self::Sphere),
            "rosenbrock" => Ok(Self::Rosenbrock),
            "rastrigin" => Ok(Self::Rastrigin),
            "griewank" => Ok(Self::Griewank),
            "schaffer-f6" | "schaffer_f6" | "schaffer" => Ok(Self::SchafferF6),
            other => Err(Error::config(format!("unknown problem {other:?}"))),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A problem instance: function, dimensionality and per-coordinate bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkProblem {
    kind: ProblemKind,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BenchmarkProblem {
    /// `kind` in `dims` dimensions on its conventional feasible box.
    pub fn new(kind: ProblemKind, dims: usize) -> Result<Self> {
        let r = kind.default_half_width();
        Self::with_bounds(kind, vec![-r; dims], vec![r; dims])
    }

    pub fn with_bounds(kind: ProblemKind, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::domain("problem needs at least one dimension"));
        }
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if let Some(j) = (0..lower.len()).find(|&j| lower[j].partial_cmp(&upper[j]) != Some(std::cmp::Ordering::Less)) {
            return Err(Error::domain(format!(
                "bounds of coordinate {j} are empty: [{}, {}]",
                lower[j], upper[j]
            )));
        }
        Ok(Self { kind, lower, upper })
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn dims(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn optimum_conflict(&self) -> f64 {
        0.0
    }

    pub fn conflict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                got: x.len(),
            });
        }
        Ok(self.kind.evaluate(x))
    }

    pub fn error_of(&self, conflict: f64) -> f64 {
        conflict - self.optimum_conflict()
    }

    /// Whether every coordinate of `x` lies in its closed interval.
    #[inline]
    pub fn is_feasible(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }
}

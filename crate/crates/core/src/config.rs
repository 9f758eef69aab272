//! Experiment files.
//!
//! ```toml
//! format = 1
//!
//! [defaults]            # optional; applies to every experiment
//! swarm_size = 50
//! steps = 10000
//! runs = 25
//! seed = 1
//! t_ref = 100
//! lhs_candidates = 1000
//! checkpoints = [1000, 10000]
//! history_stride = 10
//!
//! [[experiment]]
//! problem = "rastrigin"
//! dims = 10
//! topology = "ring-dynamic:nni=2,nnf=m-1"
//! scheme = "c-pso-1"
//! runs = 10             # any default may be overridden per experiment
//! ```
//!
//! `problem`, `dims`, `topology` and `scheme` may also sit in `[defaults]`.

use serde::Deserialize;

use crate::benchmarks::ProblemKind;
use crate::coefficients::SchemeSpec;
use crate::error::{Error, Result};
use crate::harness::{ExperimentConfig, GRID_DIMS, GRID_SCHEMES};
use crate::output::FORMAT_VERSION;
use crate::topology::Topology;

/// Optional settings; later layers override earlier ones.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub problem: Option<String>,
    pub dims: Option<usize>,
    pub topology: Option<String>,
    pub scheme: Option<String>,
    pub swarm_size: Option<usize>,
    pub steps: Option<usize>,
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub checkpoints: Option<Vec<usize>>,
    pub t_ref: Option<usize>,
    pub lhs_candidates: Option<usize>,
    pub history_stride: Option<usize>,
}

macro_rules! layer {
    ($base:ident, $top:ident; $($field:ident),*) => {
        Overrides { $($field: $top.$field.clone().or_else(|| $base.$field.clone())),* }
    };
}

impl Overrides {
    /// `self` with every field set in `top` replaced.
    pub fn layered(&self, top: &Overrides) -> Overrides {
        let base = self;
        layer!(base, top; problem, dims, topology, scheme, swarm_size, steps, runs, seed,
               checkpoints, t_ref, lhs_candidates, history_stride)
    }

    /// Builds a complete config; anything unset takes its default.
    pub fn build(&self) -> Result<ExperimentConfig> {
        let problem: ProblemKind = self
            .problem
            .as_deref()
            .ok_or_else(|| Error::config("no problem given"))?
            .parse()?;
        let dims = self.dims.ok_or_else(|| Error::config("no dimensionality given"))?;
        let scheme: SchemeSpec = self
            .scheme
            .as_deref()
            .ok_or_else(|| Error::config("no scheme given"))?
            .parse()?;
        let placeholder = ExperimentConfig::new(problem, dims, Topology::Global, scheme);
        let swarm_size = self.swarm_size.unwrap_or(placeholder.swarm_size);
        let topology = Topology::parse(
            self.topology
                .as_deref()
                .ok_or_else(|| Error::config("no topology given"))?,
            swarm_size,
        )?;
        let cfg = ExperimentConfig {
            topology,
            swarm_size,
            steps: self.steps.unwrap_or(placeholder.steps),
            runs: self.runs.unwrap_or(placeholder.runs),
            seed: self.seed.unwrap_or(placeholder.seed),
            checkpoints: self.checkpoints.clone(),
            t_ref: self.t_ref.unwrap_or(placeholder.t_ref),
            lhs_candidates: self.lhs_candidates.unwrap_or(placeholder.lhs_candidates),
            history_stride: self.history_stride.unwrap_or(placeholder.history_stride),
            ..placeholder
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl From<&ExperimentConfig> for Overrides {
    fn from(c: &ExperimentConfig) -> Self {
        Self {
            problem: Some(c.problem.name().to_string()),
            dims: Some(c.dims),
            topology: Some(c.topology.to_string()),
            scheme: Some(c.scheme.to_string()),
            swarm_size: Some(c.swarm_size),
            steps: Some(c.steps),
            runs: Some(c.runs),
            seed: Some(c.seed),
            checkpoints: c.checkpoints.clone(),
            t_ref: Some(c.t_ref),
            lhs_candidates: Some(c.lhs_candidates),
            history_stride: Some(c.history_stride),
        }
    }
}

/// The full factorial comparison as unresolved entries, so that a different
/// swarm size still ends the dynamic ring at `m - 1`. Same order as
/// [`crate::harness::paper_grid`].
pub fn paper_grid_entries() -> Vec<Overrides> {
    const TOPOLOGIES: [&str; 5] = ["global", "ring:nn=2", "ring-dynamic:nni=2,nnf=m-1", "wheel", "random"];
    let mut entries = Vec::with_capacity(300);
    for problem in ProblemKind::ALL {
        for dims in GRID_DIMS {
            for scheme in GRID_SCHEMES {
                for topology in TOPOLOGIES {
                    entries.push(Overrides {
                        problem: Some(problem.name().to_string()),
                        dims: Some(dims),
                        topology: Some(topology.to_string()),
                        scheme: Some(scheme.to_string()),
                        ..Default::default()
                    });
                }
            }
        }
    }
    entries
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    format: u32,
    #[serde(default)]
    defaults: Overrides,
    #[serde(default)]
    experiment: Vec<Overrides>,
}

/// Parses an experiment file. `cli` overrides every experiment in it.
pub fn parse_config(text: &str, cli: &Overrides) -> Result<Vec<ExperimentConfig>> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
    if file.format != FORMAT_VERSION {
        return Err(Error::config(format!(
            "unsupported config format {} (expected {FORMAT_VERSION})",
            file.format
        )));
    }
    if file.experiment.is_empty() {
        return Err(Error::config("the file lists no [[experiment]]"));
    }
    file.experiment
        .iter()
        .enumerate()
        .map(|(k, e)| {
            file.defaults
                .layered(e)
                .layered(cli)
                .build()
                .map_err(|err| Error::config(format!("experiment {}: {err}", k + 1)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::CoefficientScheme;

    const SAMPLE: &str = r#"
format = 1

[defaults]
steps = 200
runs = 3
seed = 9

[[experiment]]
problem = "sphere"
dims = 2
topology = "global"
scheme = "c-pso-1"

[[experiment]]
problem = "griewank"
dims = 10
topology = "ring-dynamic:nni=2,nnf=m-1"
scheme = "ms"
swarm_size = 20
runs = 5
checkpoints = [50, 200]
"#;

    #[test]
    fn parses_and_layers() {
        let cfgs = parse_config(SAMPLE, &Overrides::default()).unwrap();
        assert_eq!(cfgs.len(), 2);
        assert_eq!(cfgs[0].scheme, SchemeSpec::Single(CoefficientScheme::C_PSO_1));
        assert_eq!((cfgs[0].steps, cfgs[0].runs, cfgs[0].seed), (200, 3, 9));
        assert_eq!(cfgs[0].swarm_size, 50);
        assert_eq!(cfgs[1].topology, Topology::DynamicRing { nni: 2, nnf: 19 });
        assert_eq!(cfgs[1].runs, 5);
        assert_eq!(cfgs[1].resolved_checkpoints(), vec![50, 200]);
    }

    #[test]
    fn cli_wins() {
        let cli = Overrides {
            seed: Some(4),
            runs: Some(1),
            ..Default::default()
        };
        let cfgs = parse_config(SAMPLE, &cli).unwrap();
        assert!(cfgs.iter().all(|c| c.seed == 4 && c.runs == 1));
    }

    #[test]
    fn config_round_trips_through_overrides() {
        for cfg in parse_config(SAMPLE, &Overrides::default()).unwrap() {
            assert_eq!(Overrides::from(&cfg).build().unwrap(), cfg);
        }
    }

    #[test]
    fn preset_matches_library_grid() {
        let seed = Overrides { seed: Some(3), ..Default::default() };
        let built: Vec<ExperimentConfig> = paper_grid_entries()
            .iter()
            .map(|e| e.layered(&seed).build().unwrap())
            .collect();
        assert_eq!(built, crate::harness::paper_grid(3));
        let small = Overrides { swarm_size: Some(10), ..Default::default() };
        let cfg = paper_grid_entries()[2].layered(&small).build().unwrap();
        assert_eq!(cfg.topology, Topology::DynamicRing { nni: 2, nnf: 9 });
    }

    #[test]
    fn rejects_bad_files() {
        assert!(parse_config("format = 2\n[[experiment]]\n", &Overrides::default()).is_err());
        assert!(parse_config("format = 1\n", &Overrides::default()).is_err());
        let unknown = SAMPLE.replace("runs = 3", "rnus = 3");
        assert!(parse_config(&unknown, &Overrides::default()).is_err());
        let missing = "format = 1\n[[experiment]]\nproblem = \"sphere\"\ndims = 2\nscheme = \"ms\"\n";
        let err = parse_config(missing, &Overrides::default()).unwrap_err();
        assert!(err.to_string().contains("topology"), "{err}");
        let invalid = SAMPLE.replace("swarm_size = 20", "swarm_size = 2");
        assert!(parse_config(&invalid, &Overrides::default()).is_err());
    }
}

//! Statistics tables, convergence-curve files and result bundles.
//!
//! A bundle directory holds, for every (problem, dims) group of a grid:
//!
//! - `table_<problem>_<dims>d.tsv`: one row per scheme, topology and
//!   checkpoint
//! - `curves_<problem>_<dims>d.tsv`: one column per experiment, one row per
//!   step
//! - `reports_<problem>_<dims>d.json`: the full reports
//!
//! plus `manifest.json`, which echoes every experiment config. Wall-clock
//! timings go to `timings.json`, outside the bundle proper, so that reruns
//! compare byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::benchmarks::ProblemKind;
use crate::coefficients::{CoefficientScheme, SchemeSpec};
use crate::error::{Error, Result};
use crate::harness::{ExperimentConfig, ExperimentReport};
use crate::metrics::RunSummary;
use crate::topology::Topology;

/// Version of the bundle layout and of the config file syntax.
pub const FORMAT_VERSION: u32 = 1;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const TIMINGS_FILE: &str = "timings.json";

const HEADER: [&str; 9] = [
    "SCHEME",
    "TOPOLOGY",
    "STEPS",
    "BEST",
    "MEDIAN",
    "MEAN",
    "WORST",
    "MEAN_PB_ME",
    "SUCCESS",
];

/// Scientific notation with three significant digits and a signed two-digit
/// exponent: `3.21E-08`, `0.00E+00`.
pub fn format_sci(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.2E}");
    let (mantissa, exp) = s.split_once('E').expect("E format always has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}E{sign}{:02}", exp.abs())
}

/// Success percentage: an integer when exact, one decimal otherwise.
pub fn format_success(rate: f64) -> String {
    if rate.fract() == 0.0 {
        format!("{rate:.0}")
    } else {
        format!("{rate:.1}")
    }
}

/// One parsed or rendered table row.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub scheme: String,
    pub topology: String,
    pub steps: usize,
    pub best: f64,
    pub median: f64,
    pub mean: f64,
    pub worst: f64,
    pub mean_pb_me: f64,
    /// Present only at each experiment's final checkpoint.
    pub success: Option<f64>,
}

fn scheme_rank(s: &SchemeSpec) -> usize {
    match s {
        SchemeSpec::Single(CoefficientScheme::PSO_RRR2_1) => 0,
        SchemeSpec::Single(CoefficientScheme::PSO_RRR1_1) => 1,
        SchemeSpec::Single(CoefficientScheme::C_PSO_1) => 2,
        SchemeSpec::MultiSwarm => 3,
        SchemeSpec::Single(_) => 4,
    }
}

fn topology_rank(t: &Topology) -> usize {
    match t {
        Topology::Global => 0,
        Topology::Ring { .. } => 1,
        Topology::DynamicRing { .. } => 2,
        Topology::Wheel { .. } => 3,
        Topology::Random => 4,
    }
}

/// Orders reports by scheme, then topology, keeping input order otherwise.
fn table_order<'a>(reports: &[&'a ExperimentReport]) -> Vec<&'a ExperimentReport> {
    let mut sorted = reports.to_vec();
    sorted.sort_by_key(|r| (scheme_rank(&r.config.scheme), topology_rank(&r.config.topology)));
    sorted
}

/// Rows of the statistics table: grouped by scheme, then topology, then
/// checkpoint from the last step down.
pub fn table_rows(reports: &[&ExperimentReport]) -> Vec<TableRow> {
    let mut rows = Vec::new();
    for r in table_order(reports) {
        let last = r.checkpoints.len() - 1;
        for (k, c) in r.checkpoints.iter().enumerate().rev() {
            let s: &RunSummary = &c.summary;
            rows.push(TableRow {
                scheme: r.config.scheme.label(),
                topology: r.config.topology.label(),
                steps: c.step,
                best: s.best,
                median: s.median,
                mean: s.mean,
                worst: s.worst,
                mean_pb_me: s.mean_pb_me,
                success: (k == last).then_some(s.success_rate),
            });
        }
    }
    rows
}

/// Renders a tab-separated statistics table. Lines starting with `#` are
/// comments.
pub fn render_table(reports: &[&ExperimentReport]) -> String {
    let mut out = String::new();
    if let Some(first) = reports.first() {
        let c = &first.config;
        let same_group = reports
            .iter()
            .all(|r| r.config.problem == c.problem && r.config.dims == c.dims);
        if same_group {
            let _ = writeln!(out, "# {} {}D, {} runs", c.problem.heading(), c.dims, c.runs);
        }
    }
    out.push_str(&HEADER.join("\t"));
    out.push('\n');
    for row in table_rows(reports) {
        let cells = [
            row.scheme,
            row.topology,
            row.steps.to_string(),
            format_sci(row.best),
            format_sci(row.median),
            format_sci(row.mean),
            format_sci(row.worst),
            format_sci(row.mean_pb_me),
            row.success.map_or_else(|| "-".to_string(), format_success),
        ];
        out.push_str(&cells.join("\t"));
        out.push('\n');
    }
    out
}

/// Parses the output of [`render_table`].
pub fn parse_table(text: &str) -> Result<Vec<TableRow>> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, h)) if h.split('\t').eq(HEADER) => {}
        _ => return Err(Error::Format("missing table header".into())),
    }
    let num = |v: &str, line: usize| -> Result<f64> {
        v.parse()
            .map_err(|_| Error::Format(format!("line {}: bad number {v:?}", line + 1)))
    };
    lines
        .map(|(line, l)| {
            let cells: Vec<&str> = l.split('\t').collect();
            if cells.len() != HEADER.len() {
                return Err(Error::Format(format!(
                    "line {}: expected {} cells, found {}",
                    line + 1,
                    HEADER.len(),
                    cells.len()
                )));
            }
            Ok(TableRow {
                scheme: cells[0].to_string(),
                topology: cells[1].to_string(),
                steps: cells[2]
                    .parse()
                    .map_err(|_| Error::Format(format!("line {}: bad step count", line + 1)))?,
                best: num(cells[3], line)?,
                median: num(cells[4], line)?,
                mean: num(cells[5], line)?,
                worst: num(cells[6], line)?,
                mean_pb_me: num(cells[7], line)?,
                success: match cells[8] {
                    "-" => None,
                    v => Some(num(v, line)?),
                },
            })
        })
        .collect()
}

/// Tab-separated convergence curves, one column per report, keeping every
/// `stride`-th step and the last one.
pub fn render_curves(reports: &[&ExperimentReport], stride: usize) -> String {
    let stride = stride.max(1);
    let reports = table_order(reports);
    let mut out = String::from("STEP");
    for r in &reports {
        out.push('\t');
        out.push_str(&r.config.label());
    }
    out.push('\n');
    let len = reports.iter().map(|r| r.curve.len()).max().unwrap_or(0);
    let mut steps: Vec<usize> = (0..len).step_by(stride).collect();
    if len > 0 && steps.last() != Some(&(len - 1)) {
        steps.push(len - 1);
    }
    for t in steps {
        let _ = write!(out, "{t}");
        for r in &reports {
            out.push('\t');
            if let Some(v) = r.curve.get(t) {
                let _ = write!(out, "{v:e}");
            }
        }
        out.push('\n');
    }
    out
}

/// Reports grouped by (problem, dims), groups in order of first appearance.
pub fn group_reports(reports: &[ExperimentReport]) -> Vec<((ProblemKind, usize), Vec<&ExperimentReport>)> {
    let mut groups: Vec<((ProblemKind, usize), Vec<&ExperimentReport>)> = Vec::new();
    for r in reports {
        let key = (r.config.problem, r.config.dims);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(r),
            None => groups.push((key, vec![r])),
        }
    }
    groups
}

pub fn group_stem(problem: ProblemKind, dims: usize) -> String {
    format!("{}_{dims}d", problem.name())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedExperiment {
    pub index: usize,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub generator: String,
    pub experiments: Vec<ExperimentConfig>,
    pub failures: Vec<FailedExperiment>,
    pub files: Vec<String>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = read(path)?;
        let manifest: Manifest = serde_json::from_str(&text)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        if manifest.format_version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "{}: unsupported format version {}",
                path.display(),
                manifest.format_version
            )));
        }
        Ok(manifest)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub index: usize,
    pub label: String,
    pub seconds: f64,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(io_err(path))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(io_err(path))
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes a bundle for `experiments`, whose outcomes are `results` in the
/// same order. Returns the paths written.
pub fn write_bundle(
    dir: &Path,
    experiments: &[ExperimentConfig],
    results: &[std::result::Result<ExperimentReport, String>],
    curve_stride: usize,
) -> Result<Vec<PathBuf>> {
    if experiments.len() != results.len() {
        return Err(Error::DimensionMismatch {
            expected: experiments.len(),
            got: results.len(),
        });
    }
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let reports: Vec<ExperimentReport> = results.iter().filter_map(|r| r.as_ref().ok().cloned()).collect();
    let failures = results
        .iter()
        .enumerate()
        .filter_map(|(index, r)| r.as_ref().err().map(|e| FailedExperiment { index, error: e.clone() }))
        .collect();
    let mut files = Vec::new();
    let mut written = Vec::new();
    for ((problem, dims), group) in group_reports(&reports) {
        let stem = group_stem(problem, dims);
        let entries = [
            (format!("table_{stem}.tsv"), render_table(&group)),
            (format!("curves_{stem}.tsv"), render_curves(&group, curve_stride)),
            (format!("reports_{stem}.json"), to_json(&group)?),
        ];
        for (name, contents) in entries {
            let path = dir.join(&name);
            write(&path, &contents)?;
            files.push(name);
            written.push(path);
        }
    }
    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        generator: format!("swarmtopo {}", env!("CARGO_PKG_VERSION")),
        experiments: experiments.to_vec(),
        failures,
        files,
    };
    let path = dir.join(MANIFEST_FILE);
    write(&path, &to_json(&manifest)?)?;
    written.push(path);
    Ok(written)
}

pub fn write_timings(dir: &Path, timings: &[Timing]) -> Result<PathBuf> {
    let path = dir.join(TIMINGS_FILE);
    write(&path, &to_json(&timings)?)?;
    Ok(path)
}

/// Loads reports from a bundle directory or from a single reports file.
pub fn load_reports(path: &Path) -> Result<Vec<ExperimentReport>> {
    if path.is_dir() {
        let manifest = Manifest::load(&path.join(MANIFEST_FILE))?;
        let mut reports = Vec::new();
        for name in manifest.files.iter().filter(|f| f.starts_with("reports_")) {
            reports.extend(load_reports(&path.join(name))?);
        }
        return Ok(reports);
    }
    serde_json::from_str(&read(path)?).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

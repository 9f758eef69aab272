use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use swarmtopo::config::{paper_grid_entries, parse_config, Overrides};
use swarmtopo::harness::{run_grid_timed, ExperimentConfig, ExperimentReport};
use swarmtopo::output::{
    group_reports, group_stem, load_reports, render_curves, render_table, write_bundle, write_timings, Manifest,
    Timing, MANIFEST_FILE,
};
use swarmtopo::Execution;

/// Particle swarm experiments over coefficient schemes and topologies.
#[derive(Debug, Parser)]
#[command(name = "swarmtopo", version)]
struct Cli {
    /// Only log warnings and errors.
    #[arg(short, long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one experiment described by flags or a config file.
    Run(RunArgs),
    /// Run many experiments: a config file, a bundle manifest, or `paper-grid`.
    Grid(GridArgs),
    /// Re-render statistics tables from stored reports.
    Table(ExportArgs),
    /// Export convergence curves from stored reports.
    Curves(CurvesArgs),
}

#[derive(Debug, Args)]
struct ExperimentFlags {
    /// sphere, rosenbrock, rastrigin, griewank or schaffer-f6.
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    dims: Option<usize>,
    /// global, ring:nn=2, ring-dynamic:nni=2,nnf=m-1, wheel[:hub=0] or random.
    #[arg(long)]
    topology: Option<String>,
    /// c-pso-1, pso-rrr1-1, pso-rrr2-1, multi-swarm, or a parameterised form
    /// such as pso-rrr2:aw=2.4,ip=0.5.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    swarm_size: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Averaging window of the position-based mean error, in steps.
    #[arg(long)]
    t_ref: Option<usize>,
    #[arg(long)]
    lhs_candidates: Option<usize>,
    /// Comma-separated reporting steps (default: 1000 and the last step).
    #[arg(long, value_delimiter = ',')]
    checkpoints: Option<Vec<usize>>,
    /// Keep every n-th step of each run's error history in the reports.
    #[arg(long)]
    history_stride: Option<usize>,
}

impl ExperimentFlags {
    fn overrides(&self) -> Overrides {
        Overrides {
            problem: self.problem.clone(),
            dims: self.dims,
            topology: self.topology.clone(),
            scheme: self.scheme.clone(),
            swarm_size: self.swarm_size,
            steps: self.steps,
            runs: self.runs,
            seed: self.seed,
            checkpoints: self.checkpoints.clone(),
            t_ref: self.t_ref,
            lhs_candidates: self.lhs_candidates,
            history_stride: self.history_stride,
        }
    }
}

#[derive(Debug, Args)]
struct ExecFlags {
    /// Directory for the output bundle.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, env = "SWARM_TOPO_THREADS")]
    threads: Option<usize>,
    /// Keep every n-th step in the curves files.
    #[arg(long, default_value_t = 1)]
    curve_stride: usize,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Experiment file holding exactly one experiment.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    experiment: ExperimentFlags,
    #[command(flatten)]
    exec: ExecFlags,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// `paper-grid`, an experiment file, or a bundle (directory or manifest).
    source: String,
    #[command(flatten)]
    experiment: ExperimentFlags,
    #[command(flatten)]
    exec: ExecFlags,
}

#[derive(Debug, Args)]
struct ExportArgs {
    /// Bundle directory or reports file.
    input: PathBuf,
    /// Write one file per problem group here instead of printing.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CurvesArgs {
    #[command(flatten)]
    export: ExportArgs,
    /// Keep every n-th step.
    #[arg(long, default_value_t = 1)]
    stride: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Run(args) => {
            let flags = args.experiment.overrides();
            let configs = match &args.config {
                Some(path) => {
                    let configs = parse_config(&read(path)?, &flags)?;
                    if configs.len() != 1 {
                        bail!("{} lists {} experiments; use `grid` for more than one", path.display(), configs.len());
                    }
                    configs
                }
                None => vec![flags.build()?],
            };
            execute(&configs, &args.exec, true)
        }
        Command::Grid(args) => {
            let flags = args.experiment.overrides();
            let configs = grid_configs(&args.source, &flags)?;
            if args.exec.out_dir.is_none() {
                bail!("grid needs --out-dir");
            }
            execute(&configs, &args.exec, false)
        }
        Command::Table(args) => {
            export(&args, "table", render_table)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Curves(args) => {
            export(&args.export, "curves", |group| render_curves(group, args.stride))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn grid_configs(source: &str, flags: &Overrides) -> Result<Vec<ExperimentConfig>> {
    if source == "paper-grid" {
        return paper_grid_entries()
            .iter()
            .map(|e| Ok(e.layered(flags).build()?))
            .collect();
    }
    let path = Path::new(source);
    let manifest = if path.is_dir() {
        Some(path.join(MANIFEST_FILE))
    } else if path.extension().is_some_and(|e| e == "json") {
        Some(path.to_path_buf())
    } else {
        None
    };
    match manifest {
        Some(m) => Manifest::load(&m)?
            .experiments
            .iter()
            .map(|c| Ok(Overrides::from(c).layered(flags).build()?))
            .collect(),
        None => Ok(parse_config(&read(path)?, flags)?),
    }
}

fn execute(configs: &[ExperimentConfig], exec: &ExecFlags, print_tables: bool) -> Result<ExitCode> {
    let outcomes = run_grid_timed(configs, Execution::Parallel, exec.threads);
    let timings: Vec<Timing> = outcomes
        .iter()
        .enumerate()
        .map(|(index, o)| Timing {
            index,
            label: format!("{} {}D {}", configs[index].problem, configs[index].dims, configs[index].label()),
            seconds: o.elapsed.as_secs_f64(),
        })
        .collect();
    let results: Vec<std::result::Result<ExperimentReport, String>> = outcomes
        .into_iter()
        .map(|o| o.result.map_err(|e| e.to_string()))
        .collect();
    let failures = results.iter().filter(|r| r.is_err()).count();
    for (k, r) in results.iter().enumerate() {
        if let Err(e) = r {
            eprintln!("experiment {} ({}) failed: {e}", k + 1, configs[k].label());
        }
    }
    if print_tables {
        let reports: Vec<ExperimentReport> = results.iter().filter_map(|r| r.as_ref().ok().cloned()).collect();
        for (_, group) in group_reports(&reports) {
            print!("{}", render_table(&group));
        }
    }
    if let Some(dir) = &exec.out_dir {
        let written = write_bundle(dir, configs, &results, exec.curve_stride)?;
        write_timings(dir, &timings)?;
        log::info!("wrote {} files to {}", written.len() + 1, dir.display());
    }
    if failures > 0 {
        eprintln!("{failures} of {} experiments failed", configs.len());
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn export(args: &ExportArgs, prefix: &str, render: impl Fn(&[&ExperimentReport]) -> String) -> Result<()> {
    let reports = load_reports(&args.input)?;
    if reports.is_empty() {
        bail!("{} holds no reports", args.input.display());
    }
    let groups = group_reports(&reports);
    match &args.out_dir {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            for ((problem, dims), group) in &groups {
                let path = dir.join(format!("{prefix}_{}.tsv", group_stem(*problem, *dims)));
                fs::write(&path, render(group)).with_context(|| format!("cannot write {}", path.display()))?;
                println!("{}", path.display());
            }
        }
        None => {
            for (k, (_, group)) in groups.iter().enumerate() {
                if k > 0 {
                    println!();
                }
                print!("{}", render(group));
            }
        }
    }
    Ok(())
}

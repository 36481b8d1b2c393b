use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use vts_bench::output::{write_csv, write_summary, write_traces};
use vts_bench::suite::episode_map;
use vts_bench::{run_suite, Ablation, BenchError, EnvKind, PlannerKind, SuiteConfig};

#[derive(Parser)]
#[command(name = "bench", about = "Run seeded planner benchmark suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one suite and write per-episode CSV and a JSON summary.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON suite configuration; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    env: Option<EnvKind>,
    #[arg(long, value_enum)]
    planner: Option<PlannerKind>,
    #[arg(long, value_enum)]
    ablation: Option<Ablation>,
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long)]
    episodes: Option<usize>,
    #[arg(long)]
    base_seed: Option<u64>,
    /// JSON map file replacing the built-in layout.
    #[arg(long)]
    map: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Directory for per-episode JSON traces and SVG plots.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Record the planner's root statistics for every step (written to the trace directory).
    #[arg(long)]
    tree_diag: bool,
    /// Zero all wall-clock fields so outputs are byte-reproducible.
    #[arg(long)]
    no_timing: bool,
    /// Planner iterations per step.
    #[arg(long)]
    iterations: Option<usize>,
    /// Dark-region observation noise for Light-Dark.
    #[arg(long)]
    dark_std: Option<f64>,
    /// Dark-region noise of the world in the mismatch ablation.
    #[arg(long)]
    test_dark_std: Option<f64>,
    /// Print the resolved configuration as JSON and exit.
    #[arg(long)]
    print_config: bool,
}

impl RunArgs {
    fn resolve(&self) -> Result<SuiteConfig, BenchError> {
        let mut cfg = match &self.config {
            Some(path) => SuiteConfig::from_json(&std::fs::read_to_string(path)?)?,
            None => SuiteConfig::default(),
        };
        macro_rules! set {
            ($field:ident) => {
                if let Some(v) = self.$field.clone() {
                    cfg.$field = v;
                }
            };
        }
        set!(env);
        set!(planner);
        set!(ablation);
        set!(seeds);
        set!(episodes);
        set!(base_seed);
        if self.map.is_some() {
            cfg.map = self.map.clone();
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        if self.summary.is_some() {
            cfg.summary = self.summary.clone();
        }
        if self.trace.is_some() {
            cfg.trace = self.trace.clone();
        }
        cfg.tree_diag |= self.tree_diag;
        if self.no_timing {
            cfg.timing = false;
        }
        if let Some(n) = self.iterations {
            cfg.pft.iterations = n;
        }
        if let Some(s) = self.dark_std {
            cfg.lightdark.dark_std = s;
        }
        if let Some(s) = self.test_dark_std {
            cfg.lightdark.test_dark_std = s;
        }
        Ok(cfg)
    }
}

fn run(args: &RunArgs) -> Result<(), BenchError> {
    let cfg = args.resolve()?;
    if args.print_config {
        println!("{}", serde_json::to_string_pretty(&cfg)?);
        return Ok(());
    }
    info!("running {} with {}", cfg.scenario(), cfg.planner_name());
    let output = run_suite(&cfg)?;

    match &cfg.out {
        Some(path) => write_csv(&output.records, BufWriter::new(File::create(path)?))?,
        None => write_csv(&output.records, std::io::stdout().lock())?,
    }
    match &cfg.summary {
        Some(path) => write_summary(&output.summary, BufWriter::new(File::create(path)?))?,
        None => write_summary(&output.summary, std::io::stderr().lock())?,
    }
    if let Some(dir) = &cfg.trace {
        write_traces(dir, &output.records, |r| Ok(episode_map(&cfg, r)?))?;
    }
    let s = &output.summary;
    eprintln!(
        "{} / {}: success {:.3} ± {:.3}, reward {:.2} ± {:.2}, steps {:.2}, particle distance {:.4}",
        s.scenario,
        s.planner,
        s.success_rate.mean,
        s.success_rate.std_error,
        s.reward.mean,
        s.reward.std_error,
        s.steps.mean,
        s.particle_distance.mean
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let Command::Run(args) = cli.command;
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

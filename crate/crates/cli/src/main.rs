use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use figure_eight::config::RunConfig;
use figure_eight::export::read_config;
use figure_eight::{Error, PotentialKind, PotentialSpec, Result};

mod commands;

/// Shooting, continuation and analysis of figure-eight three-body orbits.
#[derive(Parser, Debug)]
#[command(name = "fig8", author, version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalArgs {
    /// Run configuration: a config JSON or any output file carrying provenance.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,

    /// Pair potential: `lj`, `lj:B,A`, `homogeneous:A`, or a JSON object.
    #[arg(long, global = true)]
    potential: Option<String>,

    /// Newton tolerance on the normalized residuals.
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[arg(long, global = true)]
    rel_tol: Option<f64>,

    #[arg(long, global = true)]
    abs_tol: Option<f64>,

    /// Worker threads for grid scans.
    #[arg(long, short, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Residual grid in the (y0, v) plane and the seeds found in it.
    Scan(ScanArgs),
    /// Newton solve from a seed triple; writes the record and the orbit.
    Solve(SolveArgs),
    /// Continue a solution along its family.
    Continue(ContinueArgs),
    /// Collision counts and diagnostics for a record or orbit file.
    Analyze(AnalyzeArgs),
    /// Run the acceptance suite and print the pass/fail table.
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long)]
    y0_min: Option<f64>,
    #[arg(long)]
    y0_max: Option<f64>,
    #[arg(long)]
    v_min: Option<f64>,
    #[arg(long)]
    v_max: Option<f64>,
    /// Points along both axes; overridden per axis by --n-y0 and --n-v.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    n_y0: Option<usize>,
    #[arg(long)]
    n_v: Option<usize>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long, allow_negative_numbers = true)]
    x0: f64,
    #[arg(long, allow_negative_numbers = true)]
    y0: f64,
    #[arg(long, allow_negative_numbers = true)]
    v: f64,
    /// Stem of the output files.
    #[arg(long, default_value = "solution")]
    name: String,
    /// Samples per period in the orbit CSV.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DirectionArg {
    Both,
    Increasing,
    Decreasing,
}

#[derive(Args, Debug)]
struct ContinueArgs {
    /// Solution record JSON or orbit CSV.
    record: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    direction: DirectionArg,
    /// Steps per direction.
    #[arg(long)]
    steps: Option<usize>,
    /// Initial arclength step.
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    x0_min: Option<f64>,
    #[arg(long)]
    x0_max: Option<f64>,
    /// Series label; defaults to the record's label or the file stem.
    #[arg(long)]
    label: Option<String>,
    /// Skip locating special points.
    #[arg(long)]
    no_specials: bool,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// Solution record JSON or orbit CSV.
    input: PathBuf,
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    /// Fast subset of the criteria.
    #[arg(long)]
    quick: bool,
    /// Only these criteria.
    #[arg(long, value_delimiter = ',')]
    criteria: Vec<u32>,
    /// Fail on documented deviations too.
    #[arg(long)]
    strict: bool,
}

fn parse_potential(text: &str) -> Result<PotentialSpec> {
    let bad = || Error::Config(format!("cannot parse potential {text:?}"));
    if text.trim_start().starts_with('{') {
        return serde_json::from_str(text).map_err(|e| Error::Config(format!("potential: {e}")));
    }
    let (name, args) = text.split_once(':').unwrap_or((text, ""));
    let nums: Vec<f64> = if args.is_empty() {
        Vec::new()
    } else {
        args.split(',').map(|a| a.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?
    };
    let kind = match (name, nums.as_slice()) {
        ("lj", []) => PotentialKind::LennardJones { b: 12.0, a: 6.0 },
        ("lj", [b, a]) => PotentialKind::LennardJones { b: *b, a: *a },
        ("homogeneous", [a]) => PotentialKind::Homogeneous { a: *a },
        ("morse", [a, r0]) => PotentialKind::Morse { a: *a, r0: *r0 },
        ("buckingham", []) => PotentialKind::Buckingham,
        ("screened_coulomb", [a]) => PotentialKind::ScreenedCoulomb { a: *a },
        _ => return Err(bad()),
    };
    PotentialSpec::new(kind)
}

/// Config file first, then global flags.
fn base_config(g: &GlobalArgs) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(path) => read_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &g.out {
        cfg.output_dir = out.clone();
    }
    if let Some(p) = &g.potential {
        cfg.potential = parse_potential(p)?;
    }
    if let Some(t) = g.tol {
        cfg.solver.tol = t;
    }
    if let Some(t) = g.rel_tol {
        cfg.integrator.rel_tol = t;
    }
    if let Some(t) = g.abs_tol {
        cfg.integrator.abs_tol = t;
    }
    if g.jobs.is_some() {
        cfg.jobs = g.jobs;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut cfg = base_config(&cli.global)?;
    match cli.command {
        Command::Scan(a) => {
            let s = &mut cfg.scan;
            s.x0 = a.x0.unwrap_or(s.x0);
            s.y0_range = (a.y0_min.unwrap_or(s.y0_range.0), a.y0_max.unwrap_or(s.y0_range.1));
            s.v_range = (a.v_min.unwrap_or(s.v_range.0), a.v_max.unwrap_or(s.v_range.1));
            if let Some(n) = a.n {
                s.n_y0 = n;
                s.n_v = n;
            }
            s.n_y0 = a.n_y0.unwrap_or(s.n_y0);
            s.n_v = a.n_v.unwrap_or(s.n_v);
            setup(&cfg)?;
            commands::scan(&cfg)
        }
        Command::Solve(a) => {
            cfg.orbit.n_samples = a.samples.unwrap_or(cfg.orbit.n_samples);
            cfg.solver.max_iter = a.max_iter.unwrap_or(cfg.solver.max_iter);
            setup(&cfg)?;
            commands::solve(&cfg, (a.x0, a.y0, a.v), &a.name)
        }
        Command::Continue(a) => {
            let c = &mut cfg.continuation;
            c.n_steps = a.steps.unwrap_or(c.n_steps);
            c.step = a.step.unwrap_or(c.step);
            if a.x0_min.is_some() || a.x0_max.is_some() {
                let (lo, hi) = c.x0_range.unwrap_or((0.0, f64::MAX));
                c.x0_range = Some((a.x0_min.unwrap_or(lo), a.x0_max.unwrap_or(hi)));
            }
            setup(&cfg)?;
            let directions = match a.direction {
                DirectionArg::Both => commands::Directions::Both,
                DirectionArg::Increasing => commands::Directions::One(figure_eight::continuation::Direction::Increasing),
                DirectionArg::Decreasing => commands::Directions::One(figure_eight::continuation::Direction::Decreasing),
            };
            commands::continue_series(&cfg, &a.record, directions, a.label.as_deref(), !a.no_specials)
        }
        Command::Analyze(a) => {
            cfg.orbit.n_samples = a.samples.unwrap_or(cfg.orbit.n_samples);
            setup(&cfg)?;
            commands::analyze(&cfg, &a.input, cli.global.config.is_some())
        }
        Command::Reproduce(a) => {
            setup(&cfg)?;
            commands::reproduce(&cfg, a.quick, &a.criteria, a.strict)
        }
    }
}

fn setup(cfg: &RunConfig) -> Result<()> {
    cfg.validate()?;
    if let Some(n) = cfg.jobs {
        // Fails only if a pool was already installed, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    std::fs::create_dir_all(&cfg.output_dir)?;
    Ok(())
}

fn exit_code(err: &Error) -> u8 {
    if err.is_integration_failure() {
        return 3;
    }
    match err.root_cause() {
        Error::Divergence { .. } | Error::SingularJacobian { .. } | Error::NotFound(_) => 2,
        Error::Io(_) | Error::Csv(_) => 4,
        _ => 5,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 5 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

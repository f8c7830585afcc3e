use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fracphase::harness::convergence::{kernel_convergence, self_convergence, ConvergenceStudy, MeshFamily};
use fracphase::harness::presets::preset;
use fracphase::harness::sweep::{sweep_matrices, write_sweep_csv, SweepMesh, SweepMode};
use fracphase::harness::{run, RunConfig};
use fracphase::Result;

#[derive(Parser)]
#[command(name = "fracphase", version, about = "Time-fractional phase-field solver and energy-law checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and check every applicable energy law.
    Run(RunArgs),
    /// Check the kernel matrices for P1-P3, Q1-Q2 and positive definiteness.
    SweepMatrices(SweepArgs),
    /// Estimate an observed order of convergence.
    Convergence(ConvergenceArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// Config file (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in preset; a `preset` key in the config file takes precedence.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    nsteps: Option<String>,
    /// `N` or `NxM`.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Any other `key=value` override; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

impl ConfigArgs {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = match &self.preset {
            Some(name) => preset(name)?,
            None => RunConfig::default(),
        };
        if let Some(path) = &self.config {
            cfg.apply_str(&std::fs::read_to_string(path)?)?;
        }
        let flags = [
            ("model", &self.model),
            ("alpha", &self.alpha),
            ("scheme", &self.scheme),
            ("dt", &self.dt),
            ("nsteps", &self.nsteps),
            ("grid", &self.grid),
            ("seed", &self.seed),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                cfg.set(k, v)?;
            }
        }
        for kv in &self.sets {
            let (k, v) = kv.split_once('=').ok_or_else(|| fracphase::Error::Config {
                key: kv.clone(),
                msg: "expected KEY=VALUE".into(),
            })?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Output directory for energy.csv, summary.txt and snapshots.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 50)]
    nmax: usize,
    /// Comma-separated fractional orders.
    #[arg(long, default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9", value_delimiter = ',')]
    alpha: Vec<f64>,
    /// `uniform`, `graded:<r>` or `random:<seed>`; repeatable.
    #[arg(long, default_value = "uniform")]
    mesh: Vec<SweepMesh>,
    /// Derive all orders of nested families from the largest matrix.
    #[arg(long)]
    nested: bool,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StudyKind {
    /// L1 derivative of t^3 against the exact Caputo derivative.
    Kernel,
    /// Temporal self-convergence of a configured run.
    Scheme,
}

#[derive(Args)]
struct ConvergenceArgs {
    #[arg(long, value_enum, default_value = "kernel")]
    kind: StudyKind,
    #[command(flatten)]
    config: ConfigArgs,
    /// Kernel study: first step size.
    #[arg(long, default_value_t = 0.1)]
    dt0: f64,
    /// Kernel study: number of halvings.
    #[arg(long, default_value_t = 4)]
    halvings: usize,
    /// Final time of the study.
    #[arg(long, default_value_t = 1.0)]
    t_end: f64,
    /// Scheme study: step counts (at least three).
    #[arg(long, value_delimiter = ',', default_value = "10,20,40,80")]
    steps: Vec<usize>,
    /// Scheme study: graded meshes with this exponent instead of uniform ones.
    #[arg(long)]
    graded: Option<f64>,
    /// Fail unless the observed order lies within `tol` of this value.
    #[arg(long)]
    expect: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    tol: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::SweepMatrices(args) => cmd_sweep(args),
        Command::Convergence(args) => cmd_convergence(args),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<bool> {
    let mut cfg = args.config.load()?;
    if let Some(out) = args.out {
        cfg.out = Some(out);
    }
    let outcome = run(&cfg)?;
    print!("{}", outcome.summary());
    Ok(outcome.passed())
}

fn cmd_sweep(args: SweepArgs) -> Result<bool> {
    let mode = if args.nested { SweepMode::Nested } else { SweepMode::Exact };
    let rows = sweep_matrices(args.nmax, &args.alpha, &args.mesh, mode)?;
    match &args.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_sweep_csv(&rows, &mut w)?;
            w.flush()?;
        }
        None => write_sweep_csv(&rows, io::stdout().lock())?,
    }
    let failed = rows.iter().filter(|r| !r.passed()).count();
    eprintln!("{} rows, {} failed", rows.len(), failed);
    Ok(failed == 0)
}

fn cmd_convergence(args: ConvergenceArgs) -> Result<bool> {
    let study: ConvergenceStudy = match args.kind {
        StudyKind::Kernel => {
            let cfg = args.config.load()?;
            kernel_convergence(cfg.alpha, args.dt0, args.halvings, args.t_end)?
        }
        StudyKind::Scheme => {
            let cfg = args.config.load()?;
            let family = match args.graded {
                Some(r) => MeshFamily::Graded(r),
                None => MeshFamily::Uniform,
            };
            self_convergence(&cfg, args.t_end, &args.steps, family)?
        }
    };
    println!("step,error");
    for (h, e) in study.steps.iter().zip(&study.errors) {
        println!("{h:.6e},{e:.6e}");
    }
    println!("order {:.4}", study.order);
    Ok(match args.expect {
        Some(p) => (study.order - p).abs() <= args.tol,
        None => true,
    })
}

mod commands;
mod gen;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "thetapi", version, about = "Discrete fundamental groups of finite metric spaces at a scale")]
struct Cli {
    /// Worker threads; defaults to the machine's parallelism.
    #[arg(long, global = true, env = "THETAPI_THREADS")]
    threads: Option<usize>,
    /// Diagnostics on stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct SpaceArgs {
    /// Point cloud CSV (with header) or distance matrix CSV (no header).
    pub input: PathBuf,
    /// Metric for point clouds; overrides the sidecar.
    #[arg(long)]
    pub metric: Option<String>,
    /// Basepoint id; overrides the sidecar.
    #[arg(long)]
    pub basepoint: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum EffortArg {
    Minimal,
    Standard,
    Thorough,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a sample space.
    Gen(gen::GenArgs),
    /// Export the scale graph.
    Graph {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        theta: f64,
        /// Output format: dot (default), csv edge list or json.
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Presentation and abelian invariants at one scale.
    Pi1 {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        theta: f64,
        /// Also report a Tietze-simplified presentation.
        #[arg(long, value_enum)]
        simplify: Option<EffortArg>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sweep scales: tower, barcode and inverse-limit report.
    Sweep {
        #[command(flatten)]
        space: SpaceArgs,
        /// `critical` or a comma-separated list of scales.
        #[arg(long, default_value = "critical")]
        scales: String,
        /// Keep all squares and skip dominated-vertex folding.
        #[arg(long)]
        exact: bool,
        /// Tower JSON.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Barcode CSV.
        #[arg(long)]
        barcode: Option<PathBuf>,
        /// Inverse-limit report JSON; the text form goes next to it with a
        /// `.txt` extension.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Decide null-homotopy of one path or homotopy of two.
    Homotopy {
        #[command(flatten)]
        space: SpaceArgs,
        path1: PathBuf,
        path2: Option<PathBuf>,
        /// Scale; defaults to the scale recorded in the path file.
        #[arg(long)]
        theta: Option<f64>,
        /// Maximum number of search states.
        #[arg(long, default_value_t = 1_000_000)]
        budget: usize,
        /// Maximum row width during search.
        #[arg(long)]
        max_width: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the certificate of a trivial verdict here.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Discretise a polyline into a theta-path.
    Discretize {
        /// Polyline CSV: x1..xd plus a `closed` column.
        polyline: PathBuf,
        #[arg(long)]
        theta: f64,
        /// Snap samples to the nearest points of this cloud.
        #[arg(long)]
        snap: Option<PathBuf>,
        /// Largest allowed snapping displacement.
        #[arg(long, requires = "snap")]
        snap_radius: Option<f64>,
        /// Path JSON.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Sample cloud CSV the path indexes into (without snapping).
        #[arg(long)]
        samples: Option<PathBuf>,
    },
    /// Check a grid-homotopy certificate.
    Verify {
        certificate: PathBuf,
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        metric: Option<String>,
        /// Expected first row, as a path JSON.
        #[arg(long)]
        from: Option<PathBuf>,
        /// Expected last row, as a path JSON.
        #[arg(long)]
        to: Option<PathBuf>,
    },
    /// Brute-force cross-checks on small spaces.
    Oracle(commands::OracleArgs),
}

/// Exit statuses.
pub mod status {
    pub const VALIDATION: u8 = 2;
    pub const BUDGET: u8 = 3;
    pub const INTERNAL: u8 = 4;
}

/// A failed run: exit status plus a message.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    pub fn validation(message: impl Into<String>) -> Self {
        Self { code: status::VALIDATION, kind: "validation", message: message.into() }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self { code: status::INTERNAL, kind: "internal", message: message.into() }
    }
}

impl From<thetapi::Error> for Failure {
    fn from(e: thetapi::Error) -> Self {
        Failure::validation(e.to_string())
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast::<thetapi::Error>() {
            Ok(e) => e.into(),
            Err(e) => Failure::validation(format!("{e:#}")),
        }
    }
}

/// Per-run settings shared by the subcommands.
pub struct Ctx {
    pub verbose: bool,
    pub outputs: io::Outputs,
}

impl Ctx {
    pub fn note(&self, msg: impl AsRef<str>) {
        if self.verbose {
            eprintln!("thetapi: {}", msg.as_ref());
        }
    }
}

fn run(cli: Cli, ctx: &mut Ctx) -> Result<u8, Failure> {
    match cli.command {
        Command::Gen(args) => gen::run(ctx, args),
        Command::Graph { space, theta, format, output } => commands::graph(ctx, &space, theta, format, output),
        Command::Pi1 { space, theta, simplify, output } => commands::pi1(ctx, &space, theta, simplify, output),
        Command::Sweep { space, scales, exact, output, barcode, report } => {
            commands::sweep(ctx, &space, &scales, exact, output, barcode, report)
        }
        Command::Homotopy { space, path1, path2, theta, budget, max_width, output, certificate } => {
            commands::homotopy(ctx, &space, &path1, path2.as_deref(), theta, budget, max_width, output, certificate)
        }
        Command::Discretize { polyline, theta, snap, snap_radius, output, samples } => {
            commands::discretize(ctx, &polyline, theta, snap.as_deref(), snap_radius, output, samples)
        }
        Command::Verify { certificate, space, metric, from, to } => {
            commands::verify(ctx, &certificate, &space, metric, from.as_deref(), to.as_deref())
        }
        Command::Oracle(args) => commands::oracle(ctx, args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            return report(Failure::validation(format!("cannot use {n} threads")));
        }
    }
    let mut ctx = Ctx { verbose: cli.verbose, outputs: io::Outputs::default() };
    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(cli, &mut ctx)));
    let outcome = match result {
        Ok(r) => r,
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(Failure::internal(msg))
        }
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            ctx.outputs.remove_all();
            report(f)
        }
    }
}

fn report(f: Failure) -> ExitCode {
    let body = serde_json::json!({ "error": { "kind": f.kind, "code": f.code, "message": f.message } });
    eprintln!("{body}");
    ExitCode::from(f.code)
}

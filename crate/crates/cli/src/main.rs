use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wingmass::par::Execution;
use wingmass_cli::commands::{self, Ctx};
use wingmass_cli::config::RunConfig;
use wingmass_cli::error::CliError;
use wingmass_cli::output::Outputs;

/// Wing mass of high-frequency Dirichlet eigenfunctions on
/// rectangle-with-wings domains.
#[derive(Parser)]
#[command(name = "wingmass", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.directory`.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; 1 forces the sequential path.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, short, global = true)]
    verbose: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Check the straightened-metric identities and operator symmetry.
    ValidateOperator,
    /// Compute Dirichlet eigenpairs in the configured window(s).
    Eigs,
    /// Sweep the separable 1D model.
    Separable,
    /// Build bouncing-ball quasimodes and measure their residuals.
    Quasimode,
    /// Wing masses, weighted norms and trend verdicts of an eigenmode sweep.
    MassReport,
    /// Fit scaling exponents to columns of an existing CSV.
    ScalingFit,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::ValidateOperator => "validate-operator",
            Command::Eigs => "eigs",
            Command::Separable => "separable",
            Command::Quasimode => "quasimode",
            Command::MassReport => "mass-report",
            Command::ScalingFit => "scaling-fit",
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let (cfg, bytes) = RunConfig::load(path)?;
    let base = path.parent().map(PathBuf::from).unwrap_or_default();
    let exec = match cli.threads {
        Some(0) => return Err(CliError::Config("--threads must be at least 1".into())),
        Some(1) => Execution::Sequential,
        Some(n) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Config(format!("cannot size the thread pool: {e}")))?;
            Execution::Parallel
        }
        None => Execution::default(),
    };
    let dir = match &cli.out {
        Some(d) => d.clone(),
        None if cfg.output.directory.is_absolute() => cfg.output.directory.clone(),
        None => base.join(&cfg.output.directory),
    };
    let mut out = Outputs::create(&dir, cli.verbose)?;
    let ctx = Ctx {
        cfg: &cfg,
        base,
        exec,
    };
    let result = match cli.command {
        Command::ValidateOperator => commands::validate_operator(&ctx, &mut out),
        Command::Eigs => commands::eigs(&ctx, &mut out),
        Command::Separable => commands::separable(&ctx, &mut out),
        Command::Quasimode => commands::quasimode(&ctx, &mut out),
        Command::MassReport => commands::mass_report(&ctx, &mut out),
        Command::ScalingFit => commands::scaling_fit(&ctx, &mut out),
    };
    // The manifest is written even when a check fails so the report is kept.
    let finished = out.finish(cli.command.name(), &bytes);
    result.and(finished)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

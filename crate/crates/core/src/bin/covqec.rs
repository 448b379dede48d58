use clap::{Args, Parser, Subcommand};
use covqec::experiments::{default_config, exit_code, run, write_outputs, ExperimentConfig, EXIT_OK, EXIT_VERIFY};
use covqec::{Error, Result};
use std::path::PathBuf;
use std::process::ExitCode;

/// Experiments on random covariant quantum codes.
#[derive(Parser)]
#[command(name = "covqec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form U(1) symmetry terms over an n grid, with log-log slopes.
    Scaling(Common),
    /// Error bounds of sampled U(1) codes.
    McU1(Common),
    /// Error bounds of sampled SU(d) codes.
    McSud(Common),
    /// Min-entropy brackets and the SDP oracle suite.
    Minentropy(Common),
    /// Monte Carlo partial decoupling against the min-entropy bound.
    Decoupling(Common),
    /// Exact SU(d) average state against its closed form.
    SudAverage(Common),
    /// Worst input of the averaged SU(d) channel.
    WorstInput(Common),
    /// Bound checks; exits with status 4 if any fails.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration; the built-in default is used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long)]
    threads: Option<usize>,
}

impl Command {
    fn split(&self) -> (&'static str, &Common) {
        match self {
            Command::Scaling(c) => ("scaling", c),
            Command::McU1(c) => ("mc-u1", c),
            Command::McSud(c) => ("mc-sud", c),
            Command::Minentropy(c) => ("minentropy", c),
            Command::Decoupling(c) => ("decoupling", c),
            Command::SudAverage(c) => ("sud-average", c),
            Command::WorstInput(c) => ("worst-input", c),
            Command::Verify(c) => ("verify", c),
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let (name, common) = cli.command.split();
    if let Some(k) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Error::Config(format!("cannot start {k} threads: {e}")))?;
    }
    let bytes = match &common.config {
        Some(path) => std::fs::read(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
        None => default_config(name).expect("every subcommand has a default").as_bytes().to_vec(),
    };
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::Config(format!("config is not UTF-8: {e}")))?;
    let mut config = ExperimentConfig::parse(text)?;
    if config.name() != name {
        return Err(Error::Config(format!("config describes a {} experiment, not {name}", config.name())));
    }
    if let Some(seed) = common.seed {
        config.set_seed(seed);
    }
    let output = run(&config)?;
    let (csv, json) = write_outputs(&common.out, name, &bytes, config.seed(), &output)?;
    eprintln!("wrote {} rows to {} and {}", output.rows.len(), csv.display(), json.display());
    for fit in &output.fits {
        eprintln!("fit {} {}: slope {:.6} over {} points", fit.label, fit.metric, fit.fit.slope, fit.fit.points);
    }
    let failed: Vec<_> = output.checks.iter().filter(|c| !c.pass).collect();
    for c in &failed {
        eprintln!("FAIL {} [{}]: computed {:.6e}, bound {:.6e}, slack {:.3e}", c.name, c.tag, c.computed, c.bound, c.slack);
    }
    if !output.checks.is_empty() {
        eprintln!("{} of {} checks passed", output.checks.len() - failed.len(), output.checks.len());
    }
    Ok(if failed.is_empty() { EXIT_OK } else { EXIT_VERIFY })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

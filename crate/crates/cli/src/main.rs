use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{error, info, LevelFilter};

use nispdg_cli::config::{parse_config_raw, RunConfig};
use nispdg_cli::sweep::{self, Axis};
use nispdg_cli::{app, CliError};

#[derive(Parser)]
#[command(name = "nispdg", version, about = "A posteriori error bounds for NISP/RKDG runs")]
struct Cli {
    /// Output directory. Falls back to `output.dir` in the config, then `out`.
    #[arg(long, global = true, env = "NISPDG_OUT_DIR")]
    out_dir: Option<PathBuf>,
    /// Worker threads for sweeps and the stochastic ensemble.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Only log warnings and errors.
    #[arg(long, global = true)]
    quiet: bool,
    /// Record wall time in the CSV, overriding `output.timing`.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration.
    Run { config: PathBuf },
    /// Run a configuration for several values of one parameter.
    Sweep {
        config: PathBuf,
        /// N_x, M or R.
        #[arg(long)]
        axis: Axis,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<usize>,
    },
    /// Parse and check a configuration without running it.
    Validate { config: PathBuf },
}

fn load(path: &Path, timing: bool) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut raw = parse_config_raw(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    raw.output.timing |= timing;
    Ok(raw)
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "run".to_string(), |s| s.to_string_lossy().into_owned())
}

fn out_dir(cli: &Cli, config: &RunConfig) -> PathBuf {
    cli.out_dir
        .clone()
        .or_else(|| config.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn resolve(raw: RunConfig) -> Result<RunConfig, CliError> {
    let config = raw.resolved()?;
    config.experiment().validate()?;
    info!("resolved configuration:\n{}", config.to_toml());
    Ok(config)
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--workers: {e}")))?;
    }
    match &cli.command {
        Command::Validate { config } => {
            let config = resolve(load(config, cli.timing)?)?;
            if !cli.quiet {
                print!("{}", config.to_toml());
            }
            Ok(())
        }
        Command::Run { config: path } => {
            let config = resolve(load(path, cli.timing)?)?;
            let dir = out_dir(cli, &config);
            let result = app::run(&config, &stem(path), &dir)?;
            if !cli.quiet {
                for r in &result.rows {
                    println!(
                        "t = {:.4}  E_det {:.3e}  E_sq {:.3e}  E_sc {:.3e}  E_st {:.3e}  bound {:.3e}",
                        r.t, r.e_det, r.e_sq, r.e_sc, r.e_st, r.bound
                    );
                }
            }
            info!("wrote {}", dir.display());
            Ok(())
        }
        Command::Sweep { config: path, axis, values } => {
            let raw = load(path, cli.timing)?;
            let dir = out_dir(cli, &raw);
            resolve(raw.clone())?;
            let outcome = sweep::run_sweep(&raw, &stem(path), *axis, values, &dir)?;
            if !cli.quiet {
                print!("{}", sweep::table(&outcome));
            }
            info!("wrote {}", dir.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = if cli.quiet { LevelFilter::Warn } else { LevelFilter::Info };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

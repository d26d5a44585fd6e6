use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::LevelFilter;

use fanno_core::cli::{self, CommandError};
use fanno_core::config::ScenarioConfig;

/// Steady Fanno profiles and periodic supersonic transients.
#[derive(Debug, Parser)]
#[command(name = "fanno", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file (`section.key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `outputs.directory`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the steady profile; writes profile.csv and steady.txt.
    Steady(Common),
    /// Run the transient from the steady profile with the periodic inflow.
    Simulate(Common),
    /// Repeat a scenario over a list of values of one parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// alpha, beta, gamma, u_minus, c_minus, epsilon or nx.
        #[arg(long)]
        axis: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
        values: Vec<String>,
        /// Worker threads (0 = one per core).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Validate a scenario file and print it with defaults filled in.
    CheckConfig {
        #[arg(long)]
        config: PathBuf,
    },
}

fn init_logging() {
    let level = match std::env::var("FANNO_LOG").as_deref() {
        Ok("quiet") => LevelFilter::Off,
        Ok("debug") => LevelFilter::Debug,
        Ok("info") | Err(_) => LevelFilter::Info,
        Ok(other) => {
            eprintln!("fanno: unknown FANNO_LOG value `{other}`, using info");
            LevelFilter::Info
        }
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
}

fn out_dir(common: &Common, cfg: &ScenarioConfig) -> PathBuf {
    common.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.directory))
}

fn with_config(path: &Path, f: impl FnOnce(ScenarioConfig) -> i32) -> i32 {
    match cli::load_config(path) {
        Ok(cfg) => f(cfg),
        Err(e) => {
            eprintln!("fanno: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> i32 {
    match command {
        Command::Steady(common) => with_config(&common.config, |cfg| cli::cmd_steady(&cfg, &out_dir(&common, &cfg))),
        Command::Simulate(common) => {
            with_config(&common.config, |cfg| cli::cmd_simulate(&cfg, &out_dir(&common, &cfg)))
        }
        Command::Sweep { common, axis, values, jobs } => match cli::load_raw(&common.config) {
            Ok(raw) => {
                let dir = match (&common.out, raw.validate()) {
                    (Some(dir), _) => dir.clone(),
                    (None, Ok(cfg)) => PathBuf::from(cfg.directory),
                    (None, Err(e)) => {
                        let e = CommandError::Config(e);
                        eprintln!("fanno: {e}");
                        return e.exit_code();
                    }
                };
                cli::cmd_sweep(&raw, &axis, &values, jobs, &dir)
            }
            Err(e) => {
                eprintln!("fanno: {e}");
                e.exit_code()
            }
        },
        Command::CheckConfig { config } => cli::cmd_check_config(cli::load_raw(&config)),
    }
}

fn main() -> ExitCode {
    let parsed = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { fanno_core::error::exit_code::CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    init_logging();
    let code = std::panic::catch_unwind(|| dispatch(parsed.command)).unwrap_or_else(|_| {
        eprintln!("fanno: internal error");
        fanno_core::error::exit_code::INTERNAL
    });
    ExitCode::from(code as u8)
}

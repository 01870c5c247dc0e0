use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use kslab_cli::config::{Command, Params, RunConfig};
use kslab_cli::output::{self, Artifact, Table};
use kslab_cli::{commands, suite, CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "kslab", version, about = "Kuelbs-Steadman norm laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML file with the same keys as the flags; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(flatten)]
    params: Params,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("error")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("kslab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let params = match &cli.config {
        Some(path) => cli.params.over(Params::from_file(path)?),
        None => cli.params,
    };
    let config = RunConfig::resolve(cli.command, params)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    if cli.command == Command::Suite {
        return run_suite(&config, &mut out);
    }
    let artifacts = commands::run(cli.command, &config)?;
    output::emit(&config, &artifacts, &mut out)?;
    Ok(0)
}

fn run_suite<W: Write>(config: &RunConfig, out: &mut W) -> Result<u8> {
    let mut table = Table::new("suite", &["id", "criterion", "status", "detail"]);
    let mut failed = 0;
    for id in 1..=suite::CRITERIA {
        let outcome = suite::run(id, config.seed);
        writeln!(out, "{}", outcome.line())?;
        out.flush()?;
        failed += usize::from(!outcome.pass);
        table.push(vec![
            id.to_string(),
            outcome.name.into(),
            if outcome.pass { "PASS" } else { "FAIL" }.into(),
            outcome.detail,
        ]);
    }
    writeln!(out, "{}/{} criteria passed", suite::CRITERIA as usize - failed, suite::CRITERIA)?;
    if config.output.is_some() {
        output::emit(config, &[Artifact::Table(table)], out)?;
    }
    Ok(if failed == 0 { 0 } else { 1 })
}

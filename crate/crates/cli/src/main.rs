//! Command-line runner for directional modulation scenarios.
//!
//! Subcommands write figure-ready CSV files under `--out`; identical
//! invocations produce byte-identical outputs. Exit codes: 0 on success,
//! 2 for configuration errors, 3 for runtime or infeasibility errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dirmod::engine::{load_config, run, ScenarioConfig};
use dirmod::error::{DmError, Result};
use dirmod::metrics::{generate_epochs, permutation_count};
use dirmod::phasor::path_from_weights;
use dirmod::synthesis::EpochMode;

#[derive(Debug, Parser)]
#[command(
    name = "dirmod",
    about = "Directional modulation scenario runner",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// Scenario config file (TOML); defaults apply when omitted.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory for CSV files.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Config override, repeatable: --set key=value (dotted keys allowed).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Shorthand for --set seed=U64.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Shorthand for --set epochs=N.
    #[arg(long, value_name = "N")]
    epochs: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario and export weights.csv and pattern_stats.csv.
    Simulate(ScenarioArgs),
    /// Run a scenario and export secrecy.csv.
    Secrecy(ScenarioArgs),
    /// Run a scenario and export uniqueness.csv.
    Uniqueness(ScenarioArgs),
    /// Export the IQ-space vector path of one epoch as iq_path.csv.
    Path {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Epoch index to render (must be < epochs).
        #[arg(long, value_name = "INDEX", default_value_t = 0)]
        epoch: usize,
    },
    /// Print the number of distinct conventional gain arrangements.
    PermCount {
        /// Element count.
        n: usize,
        /// Balanced rotation count (even).
        k: usize,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(args) => {
            let config = scenario(&args)?;
            let report = run(&config)?;
            let out = ensure_out_dir(&args.out)?;
            write_file(&out.join("weights.csv"), |w| {
                report.ensemble.write_weights_csv(w)
            })?;
            write_file(&out.join("pattern_stats.csv"), |w| report.stats.write_csv(w))?;
            Ok(())
        }
        Command::Secrecy(args) => {
            let config = scenario(&args)?;
            let report = run(&config)?;
            let out = ensure_out_dir(&args.out)?;
            write_file(&out.join("secrecy.csv"), |w| report.secrecy.write_csv(w))
        }
        Command::Uniqueness(args) => {
            let config = scenario(&args)?;
            let report = run(&config)?;
            let out = ensure_out_dir(&args.out)?;
            write_file(&out.join("uniqueness.csv"), |w| {
                report.uniqueness.write_csv(w)
            })
        }
        Command::Path { scenario: args, epoch } => {
            let config = scenario(&args)?;
            let out = ensure_out_dir(&args.out)?;
            write_epoch_path(&config, epoch, &out)
        }
        Command::PermCount { n, k } => {
            let count = permutation_count(n, k).map_err(config_flavored)?;
            println!("{count}");
            Ok(())
        }
    }
}

fn scenario(args: &ScenarioArgs) -> Result<ScenarioConfig> {
    let mut overrides = Vec::new();
    for pair in &args.set {
        let (key, value) = pair.split_once('=').ok_or_else(|| {
            DmError::Config(format!("--set expects key=value, got \"{pair}\""))
        })?;
        overrides.push((key.to_string(), value.to_string()));
    }
    if let Some(seed) = args.seed {
        overrides.push(("seed".into(), seed.to_string()));
    }
    if let Some(epochs) = args.epochs {
        overrides.push(("epochs".into(), epochs.to_string()));
    }
    let config = load_config(args.config.as_deref(), &overrides)?;
    config.validate()?;
    Ok(config)
}

fn ensure_out_dir(dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)
        .map_err(|e| DmError::Config(format!("cannot create output dir {}: {e}", dir.display())))?;
    Ok(dir.to_path_buf())
}

fn write_file<F>(path: &Path, fill: F) -> Result<()>
where
    F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
{
    let mut buf = Vec::new();
    fill(&mut buf)
        .map_err(|e| DmError::InvalidParameter(format!("cannot render {}: {e}", path.display())))?;
    fs::write(path, buf)
        .map_err(|e| DmError::InvalidParameter(format!("cannot write {}: {e}", path.display())))
}

/// Regenerate the requested epoch's weights and export its vector path with
/// step provenance (random / herded / closeout) as a sixth column.
fn write_epoch_path(config: &ScenarioConfig, epoch: usize, out: &Path) -> Result<()> {
    if epoch >= config.epochs {
        return Err(DmError::InvalidParameter(format!(
            "epoch index {epoch} out of range for {} epochs",
            config.epochs
        )));
    }
    let mut scheme_cfg = config.scheme_config()?;
    // Symbol streams are driven by run_symbol_stream; the path subcommand
    // renders the scenario's fixed target.
    if config.modulation.is_some() {
        scheme_cfg.mode = EpochMode::Fresh;
    }
    let target = config.target()?;
    let targets = vec![target; epoch + 1];
    let weights = generate_epochs(&scheme_cfg, &config.array, &targets, config.seed)?;
    let wv = weights.last().expect("epoch + 1 >= 1 weights generated");
    let path = path_from_weights(&wv.walk_steps(&config.array)?)?;

    let mut buf = Vec::new();
    render_annotated_path(&path, &wv.kinds, &mut buf)
        .map_err(|e| DmError::InvalidParameter(format!("cannot render iq_path.csv: {e}")))?;
    fs::write(out.join("iq_path.csv"), buf).map_err(|e| {
        DmError::InvalidParameter(format!("cannot write {}: {e}", out.join("iq_path.csv").display()))
    })
}

fn render_annotated_path(
    path: &dirmod::IQPath,
    kinds: &[dirmod::StepKind],
    out: &mut Vec<u8>,
) -> std::io::Result<()> {
    use dirmod::phasor::fmt_f64;
    writeln!(out, "step_index,step_re,step_im,cum_re,cum_im,step_kind")?;
    for (i, step) in path.steps().iter().enumerate() {
        let cum = path.cumulative()[i + 1];
        writeln!(
            out,
            "{},{},{},{},{},{}",
            i,
            fmt_f64(step.re),
            fmt_f64(step.im),
            fmt_f64(cum.re),
            fmt_f64(cum.im),
            kinds[i]
        )?;
    }
    Ok(())
}

/// Bad CLI arguments are configuration errors (exit code 2).
fn config_flavored(e: DmError) -> DmError {
    match e {
        DmError::InvalidParameter(msg) => DmError::Config(msg),
        other => other,
    }
}

//! Command-line interface.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 integration
//! failure, 4 requested combination not applicable (oracle for a many-body
//! state, sweeping a parameter the setup does not have), 5 oracle comparison
//! exceeded tolerance (the report is still written), 6 oracle propagation
//! failure.

use clap::{Parser, Subcommand, ValueEnum};
use scaledyn::config::{ConfigError, OutputFormat, RunConfig};
use scaledyn::ermakov::{integrate_ermakov, ErmakovError};
use scaledyn::observables::energy_observables;
use scaledyn::oracle::{self, OracleError};
use scaledyn::output;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "scaledyn",
    version,
    about = "Exact nonadiabatic dynamics of scale-invariant gases in driven harmonic traps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct RunArgs {
    /// TOML run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output path (defaults to output.path from the config, else stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Table format (defaults to output.format from the config, else csv)
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Relative tolerance for the scaling-factor integration
    #[arg(long, default_value_t = 1e-10)]
    rel_tol: f64,
}

#[derive(clap::Args)]
struct CompareArgs {
    /// TOML run configuration
    #[arg(long)]
    config: PathBuf,
    /// Report path (defaults to stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Relative tolerance for the scaling-factor integration
    #[arg(long, default_value_t = 1e-10)]
    rel_tol: f64,
    /// Negative control: corrupt the predicted scaling factor by 1% before
    /// comparing, to prove the comparison can fail
    #[arg(long)]
    corrupt_b: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a protocol and tabulate every observable over the grid
    Run(RunArgs),
    /// Evaluate end-of-drive observables across a parameter sweep
    Sweep(RunArgs),
    /// Propagate the wavefunction oracle and compare it with the predictions
    CompareOracle(CompareArgs),
    /// Parse a config, run all validation, and print the resolved setup
    ValidateConfig {
        /// TOML run configuration
        #[arg(long)]
        config: PathBuf,
    },
}

enum CliError {
    Config(ConfigError),
    Integration(ErmakovError),
    Tolerance(String),
    Oracle(OracleError),
    Io(std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(ConfigError::Inapplicable(_)) => 4,
            CliError::Config(_) => 2,
            CliError::Integration(_) => 3,
            CliError::Tolerance(_) => 5,
            CliError::Oracle(OracleError::Trajectory(_)) => 3,
            CliError::Oracle(_) => 6,
            CliError::Io(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Config(e) => e.to_string(),
            CliError::Integration(e) => e.to_string(),
            CliError::Tolerance(m) => m.clone(),
            CliError::Oracle(e) => e.to_string(),
            CliError::Io(e) => e.to_string(),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<ErmakovError> for CliError {
    fn from(e: ErmakovError) -> Self {
        CliError::Integration(e)
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        CliError::Oracle(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn emit(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => output::write_atomic(path, content).map_err(CliError::Io),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn resolve_format(cfg: &RunConfig, arg: Option<FormatArg>) -> OutputFormat {
    match arg {
        Some(FormatArg::Csv) => OutputFormat::Csv,
        Some(FormatArg::Json) => OutputFormat::Json,
        None => cfg.output.format.unwrap_or(OutputFormat::Csv),
    }
}

fn resolve_out(cfg: &RunConfig, arg: &Option<PathBuf>) -> Option<PathBuf> {
    arg.clone()
        .or_else(|| cfg.output.path.as_ref().map(PathBuf::from))
}

fn warn_infeasible(protocol: &scaledyn::protocol::TrapProtocol) {
    if !protocol.is_feasible() {
        eprintln!(
            "warning: the designed schedule needs an inverted trap (omega^2 < 0) mid-drive; \
             the run proceeds, but the drive is not realizable with a purely attractive trap"
        );
    }
}

fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let cfg = RunConfig::load(&args.config)?;
    let protocol = cfg.build_protocol()?;
    warn_infeasible(&protocol);
    let state = cfg.build_state()?;
    let grid = cfg.build_grid();
    let traj = integrate_ermakov(&protocol, cfg.grid.t_end, args.rel_tol, &grid)?;
    let obs = energy_observables(&traj, &state);
    let content = match resolve_format(&cfg, args.format) {
        OutputFormat::Csv => output::render_csv(&traj, &obs),
        OutputFormat::Json => output::render_json(&traj, &obs),
    };
    emit(resolve_out(&cfg, &args.out).as_deref(), &content)
}

fn cmd_sweep(args: &RunArgs) -> Result<(), CliError> {
    let cfg = RunConfig::load(&args.config)?;
    let sweep = cfg
        .sweep
        .clone()
        .ok_or_else(|| ConfigError::Invalid("sweep command needs a [sweep] section".into()))?;
    let values = cfg.sweep_values(&sweep)?;
    let mut rows = Vec::with_capacity(values.len());
    for value in values {
        let point = cfg.with_sweep_value(&sweep.parameter, value)?;
        point.validate()?;
        let protocol = point.build_protocol()?;
        warn_infeasible(&protocol);
        let state = point.build_state()?;
        let t_eval = point.sweep_eval_time();
        let grid = [0.0, t_eval];
        let traj = integrate_ermakov(&protocol, t_eval, args.rel_tol, &grid)?;
        let obs = energy_observables(&traj, &state);
        rows.push(output::sweep_row(value, &traj, &obs));
    }
    let content = match resolve_format(&cfg, args.format) {
        OutputFormat::Csv => output::render_sweep_csv(&sweep.parameter, &rows),
        OutputFormat::Json => output::render_sweep_json(&sweep.parameter, &rows),
    };
    emit(resolve_out(&cfg, &args.out).as_deref(), &content)
}

fn cmd_compare_oracle(args: &CompareArgs) -> Result<(), CliError> {
    let cfg = RunConfig::load(&args.config)?;
    let protocol = cfg.build_protocol()?;
    warn_infeasible(&protocol);
    let state = cfg.build_state()?;
    let initial = cfg.oracle_initial_state()?;
    let settings = cfg.oracle_settings()?;
    let grid = cfg.build_grid();
    let traj = integrate_ermakov(&protocol, cfg.grid.t_end, args.rel_tol, &grid)?;
    let traj = if args.corrupt_b {
        traj.with_scaled_b(1.01)
    } else {
        traj
    };
    let obs = energy_observables(&traj, &state);
    let (_, report) =
        oracle::validate_predictions(&traj, &obs, initial, settings, cfg.compare_tolerances())?;
    let mut content = serde_json::to_string_pretty(&report).expect("report serializes");
    content.push('\n');
    emit(args.out.as_deref(), &content)?;
    if !report.pass {
        return Err(CliError::Tolerance(format!(
            "oracle comparison failed: worst deviation {:.3e} (see report)",
            report
                .rows
                .iter()
                .map(|r| r.deviation)
                .fold(0.0f64, f64::max)
        )));
    }
    Ok(())
}

fn cmd_validate_config(path: &Path) -> Result<(), CliError> {
    let cfg = RunConfig::load(path)?;
    let protocol = cfg.build_protocol()?;
    let state = cfg.build_state()?;
    println!("config: ok");
    println!(
        "protocol: {} (omega0 = {}, omega_f = {}, t_f = {}, feasible = {})",
        protocol.kind_name(),
        protocol.omega0(),
        protocol.omega_f(),
        protocol.t_f(),
        protocol.is_feasible()
    );
    println!("state: {} (mean energy {})", state.label, state.mean_h);
    println!(
        "grid: {} samples over [0, {}]",
        cfg.grid.samples, cfg.grid.t_end
    );
    if let Some(sweep) = &cfg.sweep {
        let n = cfg.sweep_values(sweep).map(|v| v.len()).unwrap_or(0);
        println!("sweep: {} ({} values)", sweep.parameter, n);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::CompareOracle(args) => cmd_compare_oracle(args),
        Command::ValidateConfig { config } => cmd_validate_config(config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

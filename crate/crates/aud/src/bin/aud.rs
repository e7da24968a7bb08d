//! Command-line front end: closed-form evaluation, simulation, figure
//! sweeps, the results table, and the validation suite.
//!
//! Exit codes: 0 success, 1 validation failure, 2 configuration error.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use aud::analytic::{aud_mg1d_general, aud_mg1m, SystemSpec};
use aud::distributions::{ArrivalLaw, DecisionLaw, ServiceLaw};
use aud::error::AudError;
use aud::experiments::{self, Estimators, Metric, SweepParameter, SweepSpec};
use aud::simulator::{self, SimConfig};

#[derive(Parser)]
#[command(name = "aud", version, about = "Age-upon-decisions analysis for update-and-decide queues")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the closed-form average AuD and missing probability
    Analytic {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Monte Carlo estimate from the discrete-event simulator
    Simulate {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        out: OutputArgs,
        /// write per-update and per-decision CSV traces with this path prefix
        #[arg(long)]
        trace: Option<String>,
    },
    /// Run a parameter sweep (figure preset or explicit grid)
    Sweep {
        /// one of fig3a, fig3b, fig4, fig5a, fig5b, fig6, fig7
        #[arg(long, conflicts_with_all = ["param", "grid"])]
        preset: Option<String>,
        #[arg(long, value_enum, requires = "grid")]
        param: Option<ParamArg>,
        /// comma-separated grid values, strictly increasing
        #[arg(long, value_delimiter = ',', requires = "param")]
        grid: Option<Vec<f64>>,
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, value_enum, default_value_t = EstimatorsArg::Analytic)]
        estimators: EstimatorsArg,
        #[arg(long, value_enum, default_value_t = MetricArg::Aud)]
        metric: MetricArg,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// The 4x3 headline results matrix at lambda=0.75, mu=1.5, nu=15
    Table1 {
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the full validation suite
    Validate {
        #[arg(long, env = "AUD_SEED", default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
struct SystemArgs {
    /// update arrival rate
    #[arg(long, default_value_t = 0.75)]
    lambda: f64,
    /// service rate
    #[arg(long, default_value_t = 1.5)]
    mu: f64,
    /// service law: exp | uniform | det
    #[arg(long, default_value = "exp")]
    service: String,
    /// arrival law: poisson | uniform | periodic (closed forms need poisson)
    #[arg(long, default_value = "poisson")]
    arrival: String,
    /// decision law: poisson | periodic
    #[arg(long, default_value = "poisson")]
    decision: String,
    /// decision rate (default 15)
    #[arg(long, conflicts_with = "m0")]
    nu: Option<f64>,
    /// decision-to-service rate ratio; sets nu = m0 * mu
    #[arg(long)]
    m0: Option<u64>,
}

impl SystemArgs {
    fn build(&self) -> Result<SystemSpec, AudError> {
        let nu = match self.m0 {
            Some(m0) => m0 as f64 * self.mu,
            None => self.nu.unwrap_or(15.0),
        };
        let spec = SystemSpec {
            arrival: ArrivalLaw::from_name(&self.arrival, self.lambda)?,
            service: ServiceLaw::from_name(&self.service, self.mu)?,
            decision: DecisionLaw::from_name(&self.decision, nu)?,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Args)]
struct SimArgs {
    /// updates per replication
    #[arg(long, default_value_t = 200_000)]
    updates: u64,
    /// fraction of updates discarded as warmup
    #[arg(long, default_value_t = 0.1)]
    warmup: f64,
    #[arg(long, env = "AUD_SEED", default_value_t = 1)]
    seed: u64,
    /// independent replications (>= 2 for confidence intervals)
    #[arg(long, default_value_t = 20)]
    reps: u64,
    /// random initial phase for the periodic decision grid
    #[arg(long)]
    random_phase: bool,
}

impl SimArgs {
    fn build(&self) -> SimConfig {
        SimConfig {
            n_updates: self.updates,
            warmup_fraction: self.warmup,
            seed: self.seed,
            replications: self.reps,
            random_phase: self.random_phase,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// output file (stdout if omitted)
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// suppress notices on stderr
    #[arg(long)]
    quiet: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParamArg {
    Lambda,
    Mu,
    M0,
    Nu,
}

impl From<ParamArg> for SweepParameter {
    fn from(p: ParamArg) -> Self {
        match p {
            ParamArg::Lambda => SweepParameter::Lambda,
            ParamArg::Mu => SweepParameter::Mu,
            ParamArg::M0 => SweepParameter::M0,
            ParamArg::Nu => SweepParameter::Nu,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorsArg {
    Analytic,
    Sim,
    Both,
}

impl From<EstimatorsArg> for Estimators {
    fn from(e: EstimatorsArg) -> Self {
        match e {
            EstimatorsArg::Analytic => Estimators::Analytic,
            EstimatorsArg::Sim => Estimators::Simulation,
            EstimatorsArg::Both => Estimators::Both,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Aud,
    Pmis,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Aud => Metric::Aud,
            MetricArg::Pmis => Metric::Pmis,
        }
    }
}

fn emit(out: &OutputArgs, content: &str) -> Result<(), AudError> {
    match &out.out {
        Some(path) => std::fs::write(path, content)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
            if !content.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

fn notice(out: &OutputArgs, msg: &str) {
    if !out.quiet {
        eprintln!("{msg}");
    }
}

fn run_analytic(system: &SystemArgs, out: &OutputArgs) -> Result<ExitCode, AudError> {
    let spec = system.build()?;
    notice(out, &format!("system: {}", spec.kendall()));
    let report = match spec.decision {
        DecisionLaw::Poisson { .. } => aud_mg1m(&spec),
        DecisionLaw::Periodic { .. } => aud_mg1d_general(&spec),
    };
    match report {
        Ok(r) => {
            if out.format == FormatArg::Csv {
                return Err(AudError::Config("analytic output is JSON only".into()));
            }
            emit(out, &serde_json::to_string_pretty(&r)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Err(AudError::NonIntegerM0 { m0 }) => {
            // closed periodic forms need an integral rate ratio; fall back
            // to a simulation estimate
            notice(
                out,
                &format!(
                    "notice: nu/mu = {m0} is not an integer; no closed form applies, \
                     running the simulator instead (20 x 200000 updates)"
                ),
            );
            let est = simulator::estimate(&spec, &SimConfig::default())?;
            emit(out, &serde_json::to_string_pretty(&est)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => Err(e),
    }
}

fn run_simulate(
    system: &SystemArgs,
    sim: &SimArgs,
    out: &OutputArgs,
    trace: &Option<String>,
) -> Result<ExitCode, AudError> {
    let spec = system.build()?;
    let config = sim.build();
    notice(out, &format!("system: {} (seed {})", spec.kendall(), config.seed));
    if let Some(prefix) = trace {
        let tr = simulator::trace(&spec, &config, 0)?;
        std::fs::write(format!("{prefix}_updates.csv"), simulator::updates_csv(&tr.updates))?;
        std::fs::write(
            format!("{prefix}_decisions.csv"),
            simulator::decisions_csv(&tr.decisions),
        )?;
        notice(out, &format!("trace written to {prefix}_updates.csv / {prefix}_decisions.csv"));
    }
    let est = simulator::estimate(&spec, &config)?;
    emit(out, &serde_json::to_string_pretty(&est)?)?;
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn run_sweep(
    preset: &Option<String>,
    param: Option<ParamArg>,
    grid: &Option<Vec<f64>>,
    system: &SystemArgs,
    estimators: EstimatorsArg,
    metric: MetricArg,
    sim: &SimArgs,
    out: &OutputArgs,
) -> Result<ExitCode, AudError> {
    let spec = match preset {
        Some(name) => {
            let mut p = experiments::preset(name)?;
            p.sim = sim.build();
            p.estimators = estimators.into();
            p
        }
        None => {
            let (Some(param), Some(grid)) = (param, grid.clone()) else {
                return Err(AudError::Config(
                    "either --preset or both --param and --grid are required".into(),
                ));
            };
            SweepSpec {
                parameter: param.into(),
                grid,
                templates: vec![system.build()?],
                metric: metric.into(),
                sim: sim.build(),
                estimators: estimators.into(),
            }
        }
    };
    let rows = experiments::sweep(&spec)?;
    let skipped = rows.iter().filter(|r| r.skipped.is_some()).count();
    if skipped > 0 {
        notice(out, &format!("notice: {skipped} unstable grid points skipped"));
    }
    let content = match out.format {
        FormatArg::Csv => experiments::rows_to_csv(&rows),
        FormatArg::Json => experiments::rows_to_json(&rows)?,
    };
    emit(out, &content)?;
    Ok(ExitCode::SUCCESS)
}

fn run_table1(sim: &SimArgs, out: &OutputArgs) -> Result<ExitCode, AudError> {
    let cells = experiments::table1(&sim.build())?;
    let content = match out.format {
        FormatArg::Csv => experiments::table1_csv(&cells),
        FormatArg::Json => serde_json::to_string_pretty(&cells)?,
    };
    emit(out, &content)?;
    Ok(ExitCode::SUCCESS)
}

fn run_validate(seed: u64, out: &OutputArgs) -> Result<ExitCode, AudError> {
    let report = experiments::validate(seed);
    match out.format {
        FormatArg::Csv => {
            return Err(AudError::Config("validate output is text/JSON only".into()))
        }
        FormatArg::Json => {
            if let Some(path) = &out.out {
                std::fs::write(path, serde_json::to_string_pretty(&report)?)?;
            }
        }
    }
    print!("{}", experiments::report_text(&report));
    Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn dispatch(cli: &Cli) -> Result<ExitCode, AudError> {
    match &cli.command {
        Command::Analytic { system, out } => run_analytic(system, out),
        Command::Simulate { system, sim, out, trace } => run_simulate(system, sim, out, trace),
        Command::Sweep { preset, param, grid, system, estimators, metric, sim, out } => {
            run_sweep(preset, *param, grid, system, *estimators, *metric, sim, out)
        }
        Command::Table1 { sim, out } => run_table1(sim, out),
        Command::Validate { seed, out } => run_validate(*seed, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

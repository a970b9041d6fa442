//! `transduce`: runs absorption scenarios from a JSON config and writes CSV bundles.

mod config;
mod figures;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{resolve, ConfigError, FigureId, Overrides, Scenario, ScenarioConfig, OUT_DIR_ENV};
use run::Failure;

#[derive(Parser, Debug)]
#[command(name = "transduce", version, about = "Non-Markov single-photon absorption scenarios")]
struct Cli {
    /// Scenario config (JSON); flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(flatten)]
    flags: Flags,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// Fraction gamma_p / gamma of the emission into the pulse modes.
    #[arg(long, global = true)]
    gamma_p_ratio: Option<f64>,
    /// Lorentzian spectrum half-width (replaces the configured spectrum).
    #[arg(long, global = true)]
    kappa: Option<f64>,
    #[arg(long, global = true)]
    tau_f: Option<f64>,
    /// gaussian, decaying_exp, rising_exp or delta.
    #[arg(long, global = true, value_name = "SHAPE")]
    pulse: Option<String>,
    /// closed_form, ode_reduction, volterra or markov.
    #[arg(long, global = true)]
    solver: Option<String>,
    #[arg(long, global = true)]
    t_max: Option<f64>,
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Output directory [default: $TRANSDUCE_OUT_DIR, then ./out].
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
}

impl From<&Flags> for Overrides {
    fn from(f: &Flags) -> Self {
        Self {
            gamma_p_ratio: f.gamma_p_ratio,
            kappa: f.kappa,
            tau_f: f.tau_f,
            pulse: f.pulse.clone(),
            solver: f.solver.clone(),
            t_max: f.t_max,
            dt: f.dt,
            out: f.out.clone(),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Excitation probability P(t) for one pulse.
    Simulate,
    /// max_t P over a (tau_f, kappa) grid.
    Sweep,
    /// Spontaneous decay from the excited state.
    Decay,
    /// Rising edge of the delta-pulse response.
    DeltaRise,
    /// Linear and atom detector traces for Fock and coherent pulses.
    DetectorCompare,
    /// Data bundle for one figure preset.
    Figure {
        /// fig2a-fig2d, fig3, fig4d-fig4f, fig5a, fig5b or fig6.
        id: String,
    },
    /// Print the effective config with defaults resolved, without running.
    Validate {
        /// Config to check (alternative to --config).
        path: Option<PathBuf>,
    },
}

fn load(path: Option<&PathBuf>) -> Result<ScenarioConfig, ConfigError> {
    path.map_or_else(|| Ok(ScenarioConfig::default()), |p| ScenarioConfig::from_path(p))
}

fn env_out_dir() -> Option<PathBuf> {
    std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    let (path, scenario) = match &cli.command {
        Command::Validate { path } => (path.as_ref().or(cli.config.as_ref()), None),
        Command::Simulate => (cli.config.as_ref(), Some(Scenario::Simulate)),
        Command::Sweep => (cli.config.as_ref(), Some(Scenario::Sweep)),
        Command::Decay => (cli.config.as_ref(), Some(Scenario::Decay)),
        Command::DeltaRise => (cli.config.as_ref(), Some(Scenario::DeltaRise)),
        Command::DetectorCompare => (cli.config.as_ref(), Some(Scenario::DetectorCompare)),
        Command::Figure { .. } => (cli.config.as_ref(), Some(Scenario::Figure)),
    };
    let mut config = load(path)?;
    if let Some(s) = scenario {
        config.scenario = Some(s);
    }
    if let Command::Figure { id } = &cli.command {
        config.figure = Some(id.parse::<FigureId>()?);
    }
    Overrides::from(&cli.flags).apply(&mut config)?;
    let plan = resolve(config, env_out_dir())?;

    if matches!(cli.command, Command::Validate { .. }) {
        println!("{}", serde_json::to_string_pretty(&plan.config).expect("config serializes"));
        return Ok(());
    }
    let bundle = run::run(&plan)?;
    let summary = serde_json::json!({
        "scenario": plan.scenario,
        "output_dir": bundle.dir(),
        "written": bundle.written(),
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}

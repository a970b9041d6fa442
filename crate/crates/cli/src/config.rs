//! Scenario configuration: strict JSON schema, flag overrides and default resolution.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use transduce_core::analysis::SweepSolver;
use transduce_core::dynamics::{default_grid, AtomParams, ModeFraction};
use transduce_core::grid::logspace;
use transduce_core::{Complex64, InteractionSpectrum, PulseShape, PulseSpec, TabulatedSpectrum, TimeGrid};

/// Fallback output directory when neither `--out` nor `output_dir` is given.
pub const OUT_DIR_ENV: &str = "TRANSDUCE_OUT_DIR";
const DEFAULT_OUT_DIR: &str = "out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Simulate,
    Sweep,
    Decay,
    DeltaRise,
    DetectorCompare,
    Figure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig2a,
    Fig2b,
    Fig2c,
    Fig2d,
    Fig3,
    Fig4d,
    Fig4e,
    Fig4f,
    Fig5a,
    Fig5b,
    Fig6,
}

impl FigureId {
    pub const ALL: [FigureId; 11] = [
        Self::Fig2a,
        Self::Fig2b,
        Self::Fig2c,
        Self::Fig2d,
        Self::Fig3,
        Self::Fig4d,
        Self::Fig4e,
        Self::Fig4f,
        Self::Fig5a,
        Self::Fig5b,
        Self::Fig6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Fig2a => "fig2a",
            Self::Fig2b => "fig2b",
            Self::Fig2c => "fig2c",
            Self::Fig2d => "fig2d",
            Self::Fig3 => "fig3",
            Self::Fig4d => "fig4d",
            Self::Fig4e => "fig4e",
            Self::Fig4f => "fig4f",
            Self::Fig5a => "fig5a",
            Self::Fig5b => "fig5b",
            Self::Fig6 => "fig6",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Self::ALL.into_iter().find(|id| id.name() == s).ok_or_else(|| {
            let known: Vec<_> = Self::ALL.iter().map(|id| id.name()).collect();
            ConfigError::new("figure", format!("unknown figure id `{s}`, expected one of {}", known.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    #[serde(default)]
    pub atom: AtomConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumConfig>,
    #[serde(default)]
    pub pulse: PulseConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SweepSolver>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figure: Option<FigureId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_p_ratio: Option<f64>,
    /// Named `gamma_p / gamma`: `ideal`, `free_space` or `waveguide_1d`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<ModeFraction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_d: Option<f64>,
    /// Initial amplitude `[re, im]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c0: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpectrum", into = "RawSpectrum")]
pub enum SpectrumConfig {
    Lorentzian { kappa: f64 },
    Flat,
    /// Two-column CSV `delta,g2`.
    Tabulated { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum SpectrumKind {
    Lorentzian,
    Flat,
    Tabulated,
}

/// Wire form of [`SpectrumConfig`]; keys that do not belong to `kind` are rejected.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpectrum {
    kind: SpectrumKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    path: Option<PathBuf>,
}

impl TryFrom<RawSpectrum> for SpectrumConfig {
    type Error = String;

    fn try_from(raw: RawSpectrum) -> Result<Self, String> {
        match (raw.kind, raw.kappa, raw.path) {
            (SpectrumKind::Lorentzian, Some(kappa), None) => Ok(Self::Lorentzian { kappa }),
            (SpectrumKind::Flat, None, None) => Ok(Self::Flat),
            (SpectrumKind::Tabulated, None, Some(path)) => Ok(Self::Tabulated { path }),
            (kind, ..) => Err(format!(
                "spectrum of kind `{}` takes {}",
                serde_json::to_value(kind).expect("kind serializes").as_str().unwrap_or_default(),
                match kind {
                    SpectrumKind::Lorentzian => "exactly `kappa`",
                    SpectrumKind::Flat => "no other keys",
                    SpectrumKind::Tabulated => "exactly `path`",
                }
            )),
        }
    }
}

impl From<SpectrumConfig> for RawSpectrum {
    fn from(s: SpectrumConfig) -> Self {
        match s {
            SpectrumConfig::Lorentzian { kappa } => Self {
                kind: SpectrumKind::Lorentzian,
                kappa: Some(kappa),
                path: None,
            },
            SpectrumConfig::Flat => Self {
                kind: SpectrumKind::Flat,
                kappa: None,
                path: None,
            },
            SpectrumConfig::Tabulated { path } => Self {
                kind: SpectrumKind::Tabulated,
                kappa: None,
                path: Some(path),
            },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<PulseShape>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_f: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_bar: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_f: Option<Axis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<Axis>,
}

/// Log-spaced axis from `min` to `max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Axis {
    fn validate(&self, field: &'static str) -> Result<Vec<f64>, ConfigError> {
        positive(field, self.min)?;
        positive(field, self.max)?;
        if self.points == 0 {
            return Err(ConfigError::new(field, "points must be at least 1"));
        }
        if self.points == 1 && self.min != self.max {
            return Err(ConfigError::new(field, "a single point needs min == max"));
        }
        if self.points > 1 && self.max <= self.min {
            return Err(ConfigError::new(field, format!("max {} must exceed min {}", self.max, self.min)));
        }
        Ok(logspace(self.min, self.max, self.points))
    }
}

/// A validation failure, tied to a dotted config field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
            line: None,
            column: None,
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)?;
        if let (Some(line), Some(column)) = (self.line, self.column) {
            write!(f, " (line {line}, column {column})")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

fn positive(field: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(ConfigError::new(field, format!("must be finite and > 0, got {v}")))
    }
}

fn finite(field: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError::new(field, format!("must be finite, got {v}")))
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError {
            field: "config".into(),
            message: e.to_string(),
            line: Some(e.line()),
            column: Some(e.column()),
        })
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub gamma_p_ratio: Option<f64>,
    pub kappa: Option<f64>,
    pub tau_f: Option<f64>,
    pub pulse: Option<String>,
    pub solver: Option<String>,
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
    pub out: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, config: &mut ScenarioConfig) -> Result<(), ConfigError> {
        if let Some(r) = self.gamma_p_ratio {
            config.atom.gamma_p_ratio = Some(r);
            config.atom.preset = None;
        }
        if let Some(kappa) = self.kappa {
            config.spectrum = Some(SpectrumConfig::Lorentzian { kappa });
        }
        if let Some(tau_f) = self.tau_f {
            config.pulse.tau_f = Some(tau_f);
        }
        if let Some(shape) = &self.pulse {
            let shape = shape.replace('-', "_");
            config.pulse.shape = Some(shape.parse().map_err(|e: transduce_core::Error| ConfigError::new("pulse.shape", e.to_string()))?);
        }
        if let Some(solver) = &self.solver {
            config.solver = Some(solver.parse().map_err(|e: transduce_core::Error| ConfigError::new("solver", e.to_string()))?);
        }
        if let Some(t_max) = self.t_max {
            config.grid.t_max = Some(t_max);
        }
        if let Some(dt) = self.dt {
            config.grid.dt = Some(dt);
        }
        if let Some(out) = &self.out {
            config.output_dir = Some(out.clone());
        }
        Ok(())
    }
}

/// A fully resolved run: library objects plus the normalized config that produced them.
#[derive(Debug, Clone)]
pub struct Plan {
    pub config: ScenarioConfig,
    pub scenario: Scenario,
    pub atom: AtomParams,
    pub spectrum: InteractionSpectrum,
    pub pulse: PulseSpec,
    pub n_bar: f64,
    pub grid: TimeGrid,
    pub solver: SweepSolver,
    pub tau_f_axis: Vec<f64>,
    pub kappa_axis: Vec<f64>,
    pub figure: Option<FigureId>,
    pub output_dir: PathBuf,
}

impl Plan {
    pub fn kappa(&self) -> Option<f64> {
        self.spectrum.kappa()
    }
}

/// Fills every default and validates. The returned plan's `config` has no
/// unset fields and, fed back in, resolves to the same plan.
pub fn resolve(mut config: ScenarioConfig, env_out: Option<PathBuf>) -> Result<Plan, ConfigError> {
    let scenario = config.scenario.unwrap_or(Scenario::Simulate);

    let gamma = positive("atom.gamma", config.atom.gamma.unwrap_or(1.0))?;
    let ratio = match (config.atom.gamma_p_ratio, config.atom.preset) {
        (Some(r), Some(p)) if r != p.ratio() => {
            return Err(ConfigError::new(
                "atom.preset",
                format!("preset gives gamma_p_ratio = {}, conflicting with {r}", p.ratio()),
            ))
        }
        (Some(r), _) => r,
        (None, Some(p)) => p.ratio(),
        (None, None) => 1.0,
    };
    if !(ratio.is_finite() && ratio > 0.0 && ratio <= 1.0) {
        return Err(ConfigError::new("atom.gamma_p_ratio", format!("must lie in (0, 1], got {ratio}")));
    }
    let t_d = finite("atom.t_d", config.atom.t_d.unwrap_or(0.0))?;
    let c0 = config.atom.c0.unwrap_or([0.0, 0.0]);
    let atom = AtomParams::new(gamma)
        .and_then(|a| a.with_gamma_p_ratio(ratio))
        .and_then(|a| a.with_delay(t_d).with_c0(Complex64::new(c0[0], c0[1])))
        .map_err(core_config_error)?;
    config.atom = AtomConfig {
        gamma: Some(gamma),
        gamma_p_ratio: Some(ratio),
        preset: None,
        t_d: Some(t_d),
        c0: Some(c0),
    };

    let spectrum_config = config.spectrum.take().unwrap_or(match scenario {
        Scenario::DetectorCompare => SpectrumConfig::Flat,
        _ => SpectrumConfig::Lorentzian { kappa: 10.0 * gamma },
    });
    let spectrum = match &spectrum_config {
        SpectrumConfig::Lorentzian { kappa } => atom.lorentzian(positive("spectrum.kappa", *kappa)?).map_err(core_config_error)?,
        SpectrumConfig::Flat => atom.flat().map_err(core_config_error)?,
        SpectrumConfig::Tabulated { path } => {
            let table = TabulatedSpectrum::from_csv_path(path)
                .map_err(|e| ConfigError::new("spectrum.path", format!("{}: {e}", path.display())))?;
            InteractionSpectrum::tabulated(table, atom.gamma, atom.gamma_p).map_err(core_config_error)?
        }
    };
    config.spectrum = Some(spectrum_config);
    let kappa = spectrum.kappa();

    let shape = config.pulse.shape.unwrap_or(PulseShape::Gaussian);
    let tau_f = positive("pulse.tau_f", config.pulse.tau_f.unwrap_or(1.0 / gamma))?;
    let delta0 = finite("pulse.delta0", config.pulse.delta0.unwrap_or(0.0))?;
    let t_a = finite("pulse.t_a", config.pulse.t_a.unwrap_or(0.0))?;
    let xi0 = finite("pulse.xi0", config.pulse.xi0.unwrap_or(1.0 / (2.0 * std::f64::consts::PI).sqrt()))?;
    let n_bar = config.pulse.n_bar.unwrap_or(1.0);
    if !(n_bar.is_finite() && n_bar >= 0.0) {
        return Err(ConfigError::new("pulse.n_bar", format!("must be finite and >= 0, got {n_bar}")));
    }
    let pulse = match shape {
        PulseShape::Delta => PulseSpec::delta(xi0),
        _ => PulseSpec::with_shape(shape, tau_f),
    }
    .map_err(core_config_error)?
    .with_detuning(delta0)
    .with_arrival(t_a);
    config.pulse = PulseConfig {
        shape: Some(shape),
        tau_f: Some(tau_f),
        delta0: Some(delta0),
        t_a: Some(t_a),
        xi0: Some(xi0),
        n_bar: Some(n_bar),
    };

    let solver = config.solver.unwrap_or(match kappa {
        Some(_) => SweepSolver::ClosedForm,
        None if matches!(spectrum.shape, transduce_core::SpectrumShape::Flat) => SweepSolver::Markov,
        None => SweepSolver::Volterra,
    });
    if matches!(solver, SweepSolver::ClosedForm | SweepSolver::OdeReduction) && kappa.is_none() {
        return Err(ConfigError::new("solver", format!("{solver} needs a Lorentzian spectrum")));
    }
    config.solver = Some(solver);

    let grid = resolve_grid(&mut config.grid, scenario, &atom, kappa, &pulse, solver)?;

    let sweep = config.sweep.take().unwrap_or_default();
    let tau_axis = sweep.tau_f.unwrap_or(Axis {
        min: 0.01 / gamma,
        max: 10.0 / gamma,
        points: 25,
    });
    let kappa_axis = sweep.kappa.unwrap_or(Axis {
        min: gamma,
        max: 100.0 * gamma,
        points: 25,
    });
    let tau_f_values = tau_axis.validate("sweep.tau_f")?;
    let kappa_values = kappa_axis.validate("sweep.kappa")?;
    config.sweep = Some(SweepConfig {
        tau_f: Some(tau_axis),
        kappa: Some(kappa_axis),
    });

    if scenario == Scenario::Figure && config.figure.is_none() {
        return Err(ConfigError::new("figure", "scenario `figure` needs a figure id"));
    }

    let output_dir = config
        .output_dir
        .clone()
        .or(env_out)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    config.output_dir = Some(output_dir.clone());
    config.scenario = Some(scenario);

    Ok(Plan {
        figure: config.figure,
        config,
        scenario,
        atom,
        spectrum,
        pulse,
        n_bar,
        grid,
        solver,
        tau_f_axis: tau_f_values,
        kappa_axis: kappa_values,
        output_dir,
    })
}

/// Default step: 1e-3/gamma, refined for short pulses, wide spectra and the
/// RK4 stability limit.
fn default_step(atom: &AtomParams, kappa: Option<f64>, pulse: &PulseSpec, solver: SweepSolver) -> f64 {
    let mut dt = 1e-3 / atom.gamma;
    if pulse.shape != PulseShape::Delta {
        dt = dt.min(pulse.tau_f / 40.0);
    }
    if let Some(k) = kappa {
        dt = dt.min(0.01 / k);
        if solver == SweepSolver::OdeReduction {
            dt = dt.min(0.5 * transduce_core::dynamics::MAX_STIFFNESS / k.max(atom.gamma));
        }
    }
    dt
}

fn resolve_grid(
    grid: &mut GridConfig,
    scenario: Scenario,
    atom: &AtomParams,
    kappa: Option<f64>,
    pulse: &PulseSpec,
    solver: SweepSolver,
) -> Result<TimeGrid, ConfigError> {
    let dt = positive("grid.dt", grid.dt.unwrap_or_else(|| default_step(atom, kappa, pulse, solver)))?;
    let (start, end) = match scenario {
        Scenario::Decay => (0.0, 20.0 / kappa.map_or(atom.gamma, |k| k.min(atom.gamma))),
        Scenario::DeltaRise => (0.0, atom.t_d + 10.0 / kappa.unwrap_or(atom.gamma) + 1.0 / atom.gamma),
        _ => {
            let g = default_grid(atom, kappa, Some(pulse), dt).map_err(core_config_error)?;
            (g.t0(), g.t_end())
        }
    };
    let t0 = finite("grid.t0", grid.t0.unwrap_or(start))?;
    let t_max = finite("grid.t_max", grid.t_max.unwrap_or(end))?;
    let resolved = TimeGrid::spanning(t0, t_max, dt).map_err(core_config_error)?;
    *grid = GridConfig {
        t0: Some(t0),
        t_max: Some(t_max),
        dt: Some(dt),
    };
    Ok(resolved)
}

/// Config field responsible for a library error, if it is a validation error.
pub fn core_field(e: &transduce_core::Error) -> Option<&'static str> {
    use transduce_core::Error as E;
    Some(match e {
        E::InvalidParameter { name, .. } => name,
        E::StepTooLarge { .. } | E::MemoryBudget { .. } | E::NonUniformGrid { .. } => "grid.dt",
        E::Unnormalizable | E::DeltaWithTabulated | E::ImpulsiveDrive { .. } => "pulse.shape",
        E::NonResonant { .. } => "pulse.delta0",
        E::NotLorentzian | E::DegenerateBranches => "spectrum",
        E::OutsideTable { .. } | E::Table(_) | E::WindowTooNarrow { .. } => "spectrum.path",
        _ => return None,
    })
}

fn core_config_error(e: transduce_core::Error) -> ConfigError {
    ConfigError::new(core_field(&e).unwrap_or("config"), e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(text: &str) -> Result<Plan, ConfigError> {
        resolve(ScenarioConfig::from_json(text)?, None)
    }

    #[test]
    fn minimal_config_defaults() {
        let p = plan("{}").unwrap();
        assert_eq!(p.scenario, Scenario::Simulate);
        assert_eq!(p.config.atom.gamma_p_ratio, Some(1.0));
        assert_eq!(p.kappa(), Some(10.0));
        assert_eq!(p.solver, SweepSolver::ClosedForm);
        assert_eq!(p.config.output_dir.as_deref(), Some(Path::new("out")));
    }

    #[test]
    fn presets_set_mode_fraction() {
        let free = plan(r#"{"atom": {"preset": "free_space"}}"#).unwrap();
        assert!((free.atom.gamma_p_ratio() - 0.11937).abs() < 1e-5);
        let guide = plan(r#"{"atom": {"preset": "waveguide_1d"}}"#).unwrap();
        assert_eq!(guide.atom.gamma_p_ratio(), 0.5);
        let clash = plan(r#"{"atom": {"preset": "waveguide_1d", "gamma_p_ratio": 0.3}}"#).unwrap_err();
        assert_eq!(clash.field, "atom.preset");
    }

    #[test]
    fn unknown_keys_rejected_with_position() {
        let e = plan("{\n  \"grid\": {\"dt\": 0.01, \"steps\": 3}\n}").unwrap_err();
        assert_eq!(e.line, Some(2));
        assert!(e.message.contains("steps"), "{e}");
        let e = plan(r#"{"spectrum": {"kind": "flat", "kappa": 3}}"#).unwrap_err();
        assert!(e.message.contains("no other keys"), "{e}");
    }

    #[test]
    fn field_names_in_validation_errors() {
        for (text, field) in [
            (r#"{"grid": {"dt": 0}}"#, "grid.dt"),
            (r#"{"grid": {"t0": 5, "t_max": 1}}"#, "grid.t_max"),
            (r#"{"atom": {"gamma": -1}}"#, "atom.gamma"),
            (r#"{"atom": {"gamma_p_ratio": 1.5}}"#, "atom.gamma_p_ratio"),
            (r#"{"spectrum": {"kind": "lorentzian", "kappa": 0}}"#, "spectrum.kappa"),
            (r#"{"pulse": {"n_bar": -2}}"#, "pulse.n_bar"),
            (r#"{"spectrum": {"kind": "flat"}, "solver": "ode_reduction"}"#, "solver"),
            (r#"{"scenario": "figure"}"#, "figure"),
            (r#"{"sweep": {"kappa": {"min": 5, "max": 1, "points": 4}}}"#, "sweep.kappa"),
        ] {
            assert_eq!(plan(text).unwrap_err().field, field, "{text}");
        }
    }

    #[test]
    fn overrides_win_over_file() {
        let mut config = ScenarioConfig::from_json(r#"{"spectrum": {"kind": "flat"}, "pulse": {"tau_f": 3}}"#).unwrap();
        Overrides {
            kappa: Some(4.0),
            tau_f: Some(0.5),
            pulse: Some("rising-exp".into()),
            solver: Some("ode-reduction".into()),
            ..Default::default()
        }
        .apply(&mut config)
        .unwrap();
        let p = resolve(config, None).unwrap();
        assert_eq!(p.kappa(), Some(4.0));
        assert_eq!(p.pulse.tau_f, 0.5);
        assert_eq!(p.pulse.shape, PulseShape::RisingExp);
        assert_eq!(p.solver, SweepSolver::OdeReduction);
    }

    #[test]
    fn env_dir_only_as_fallback() {
        let env = Some(PathBuf::from("from_env"));
        let p = resolve(ScenarioConfig::default(), env.clone()).unwrap();
        assert_eq!(p.output_dir, PathBuf::from("from_env"));
        let p = resolve(ScenarioConfig::from_json(r#"{"output_dir": "mine"}"#).unwrap(), env).unwrap();
        assert_eq!(p.output_dir, PathBuf::from("mine"));
    }

    #[test]
    fn resolved_config_round_trips() {
        for text in [
            "{}",
            r#"{"scenario": "decay", "atom": {"preset": "free_space"}, "spectrum": {"kind": "lorentzian", "kappa": 3}}"#,
            r#"{"pulse": {"shape": "delta", "t_a": 1.5}, "solver": "volterra", "grid": {"dt": 0.002}}"#,
            r#"{"scenario": "detector_compare", "pulse": {"n_bar": 2.5}}"#,
        ] {
            let first = plan(text).unwrap();
            let json = serde_json::to_string(&first.config).unwrap();
            let second = plan(&json).unwrap();
            assert_eq!(first.config, second.config);
            assert_eq!(first.grid, second.grid);
            assert_eq!(first.atom, second.atom);
            assert_eq!(first.pulse, second.pulse);
        }
    }

    #[test]
    fn figure_ids_parse() {
        for id in FigureId::ALL {
            assert_eq!(id.name().parse::<FigureId>().unwrap(), id);
        }
        assert_eq!("fig7".parse::<FigureId>().unwrap_err().field, "figure");
    }
}

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use transduce_core::analysis::{fit_exponential_decay, probability_density, sweep_pmax, transduction_metrics, SweepSolver};
use transduce_core::detectors::fock_atom_response;
use transduce_core::dynamics::{
    delta_pulse_rise, solve_closed_form_lorentzian, solve_markov, solve_ode_reduction, solve_volterra, spontaneous_decay,
};
use transduce_core::io::{columns_csv, rise_csv, sidecar_json, sweep_csv, trajectory_csv, write_atomic};
use transduce_core::{
    bloch_response, linear_response, AtomParams, CoherentPulseSpec, DetectorTrace, Error, InteractionSpectrum, PulseSpec,
    Statistics, TimeGrid, Trajectory,
};

use crate::config::{core_field, ConfigError, Plan, Scenario};
use crate::figures;

#[derive(Debug)]
pub enum Failure {
    Config(ConfigError),
    Core(Error),
    Io { path: PathBuf, source: std::io::Error },
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Self::Config(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::Core(e)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(e) => e.fmt(f),
            Self::Core(e) => e.fmt(f),
            Self::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl Failure {
    /// 2 for anything the caller can fix in the config, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Core(e) if core_field(e).is_some() => 2,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        let body = match self {
            Self::Config(e) => {
                let mut body = json!({ "kind": "validation", "field": e.field, "message": e.message });
                if let (Some(line), Some(column)) = (e.line, e.column) {
                    body["line"] = line.into();
                    body["column"] = column.into();
                }
                body
            }
            Self::Core(e) => match core_field(e) {
                Some(field) => json!({ "kind": "validation", "field": field, "message": e.to_string() }),
                None => json!({ "kind": "solver", "message": e.to_string() }),
            },
            Self::Io { path, source } => json!({ "kind": "io", "path": path, "message": source.to_string() }),
        };
        json!({ "error": body })
    }
}

/// Files written under one output directory, in write order.
pub struct Bundle {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Bundle {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: dir.into(),
            written: Vec::new(),
        }
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), Failure> {
        let path = self.dir.join(name);
        write_atomic(&path, contents.as_bytes()).map_err(|source| Failure::Io {
            path: path.clone(),
            source,
        })?;
        self.written.push(path);
        Ok(())
    }

    pub fn sidecar(&mut self, name: &str, meta: &impl Serialize) -> Result<(), Failure> {
        self.write(name, &sidecar_json(meta))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}

pub fn run(plan: &Plan) -> Result<Bundle, Failure> {
    let mut bundle = Bundle::new(&plan.output_dir);
    match plan.scenario {
        Scenario::Simulate => simulate(plan, &mut bundle)?,
        Scenario::Sweep => sweep(plan, &mut bundle)?,
        Scenario::Decay => decay(plan, &mut bundle)?,
        Scenario::DeltaRise => delta_rise(plan, &mut bundle)?,
        Scenario::DetectorCompare => detector_compare(plan, &mut bundle)?,
        Scenario::Figure => {
            let id = plan.figure.expect("resolved figure scenario has an id");
            figures::reproduce(id, &plan.atom, &mut bundle)?;
        }
    }
    Ok(bundle)
}

fn kappa_of(plan: &Plan) -> Result<f64, Failure> {
    plan.kappa().ok_or(Failure::Core(Error::NotLorentzian))
}

pub fn solve(plan: &Plan, pulse: Option<&PulseSpec>) -> Result<Trajectory, Failure> {
    let (atom, grid) = (&plan.atom, &plan.grid);
    Ok(match plan.solver {
        SweepSolver::ClosedForm => solve_closed_form_lorentzian(atom, kappa_of(plan)?, pulse, grid)?,
        SweepSolver::OdeReduction => solve_ode_reduction(atom, kappa_of(plan)?, pulse, grid)?,
        SweepSolver::Volterra => solve_volterra(atom, &plan.spectrum, pulse, grid)?,
        SweepSolver::Markov => solve_markov(atom, pulse, grid)?,
    })
}

/// Peak, metrics (or why they are unavailable) and provenance of a trajectory.
pub fn trajectory_summary(traj: &Trajectory, kappa: Option<f64>, gamma: f64) -> Value {
    let (p_max, t_peak) = traj.max_p();
    let metrics = transduction_metrics(traj, kappa.unwrap_or(f64::INFINITY), gamma).map(|m| {
        // the density is a per-sample curve; it belongs in a CSV, not the summary
        let mut v = serde_json::to_value(m).expect("metrics serialize");
        v.as_object_mut().map(|o| o.remove("density"));
        v
    });
    json!({
        "solver": traj.solver,
        "redirected_from": traj.redirected_from,
        "params_digest": traj.params_digest,
        "samples": traj.len(),
        "p_max_sampled": p_max,
        "t_peak_sampled": t_peak,
        "metrics": metrics.as_ref().ok(),
        "metrics_error": metrics.as_ref().err().map(|e| e.to_string()),
    })
}

fn simulate(plan: &Plan, bundle: &mut Bundle) -> Result<(), Failure> {
    let traj = solve(plan, Some(&plan.pulse))?;
    bundle.write("trajectory.csv", &trajectory_csv(&traj))?;
    if let Ok(density) = probability_density(&traj) {
        bundle.write("density.csv", &columns_csv(traj.t0, traj.dt, &["density"], &[&density]))?;
    }
    bundle.sidecar(
        "trajectory.json",
        &json!({
            "scenario": "simulate",
            "config": plan.config,
            "trajectory": trajectory_summary(&traj, plan.kappa(), plan.atom.gamma),
        }),
    )
}

fn sweep(plan: &Plan, bundle: &mut Bundle) -> Result<(), Failure> {
    let result = sweep_pmax(&plan.atom, plan.pulse.shape, &plan.tau_f_axis, &plan.kappa_axis, plan.solver)?;
    bundle.write("sweep.csv", &sweep_csv(&result))?;
    bundle.sidecar(
        "sweep.json",
        &json!({
            "scenario": "sweep",
            "config": plan.config,
            "shape": result.shape,
            "solver": result.solver,
            "argmax": result.argmax,
            "errors": result.errors,
        }),
    )
}

fn decay(plan: &Plan, bundle: &mut Bundle) -> Result<(), Failure> {
    let kappa = kappa_of(plan)?;
    let traj = spontaneous_decay(&plan.atom, kappa, &plan.grid)?;
    let times: Vec<f64> = traj.times().collect();
    let fit = fit_exponential_decay(&times, &traj.p);
    bundle.write("decay.csv", &trajectory_csv(&traj))?;
    bundle.sidecar(
        "decay.json",
        &json!({
            "scenario": "decay",
            "config": plan.config,
            "params_digest": traj.params_digest,
            "exponential_fit": fit.as_ref().ok(),
            "fit_error": fit.as_ref().err().map(|e| e.to_string()),
        }),
    )
}

fn delta_rise(plan: &Plan, bundle: &mut Bundle) -> Result<(), Failure> {
    let kappa = kappa_of(plan)?;
    let edge = delta_pulse_rise(&plan.atom, kappa, &plan.grid)?;
    bundle.write("rise.csv", &rise_csv(&edge))?;
    bundle.sidecar(
        "rise.json",
        &json!({
            "scenario": "delta_rise",
            "config": plan.config,
            "slope_width": 1.0 / (kappa - 0.5 * plan.atom.gamma),
        }),
    )
}

/// Linear detector (Fock and coherent) and atom detector (Fock and Bloch) traces.
pub struct DetectorSet {
    pub n_bar: f64,
    pub linear_fock: DetectorTrace,
    pub linear_coherent: DetectorTrace,
    pub atom_fock: DetectorTrace,
    pub atom_coherent: DetectorTrace,
}

impl DetectorSet {
    pub fn compute(atom: &AtomParams, spectrum: &InteractionSpectrum, pulse: &PulseSpec, n_bar: f64, grid: &TimeGrid) -> Result<Self, Failure> {
        Ok(Self {
            n_bar,
            linear_fock: linear_response(atom, pulse, Statistics::Fock, grid, spectrum)?,
            linear_coherent: linear_response(atom, pulse, Statistics::Coherent { n_bar }, grid, spectrum)?,
            atom_fock: fock_atom_response(atom, pulse, grid, spectrum)?,
            atom_coherent: bloch_response(atom, &CoherentPulseSpec::new(*pulse, n_bar)?, grid)?,
        })
    }

    /// Columns `t,y_fock,y_coherent` of the linear detector.
    pub fn linear_csv(&self) -> String {
        pair_csv(&self.linear_fock, &self.linear_coherent)
    }

    /// Columns `t,y_fock,y_coherent` of the atom detector.
    pub fn atom_csv(&self) -> String {
        pair_csv(&self.atom_fock, &self.atom_coherent)
    }

    pub fn linear_summary(&self) -> Value {
        json!({
            "detector": self.linear_fock.detector,
            "peak_fock": self.linear_fock.peak(),
            "peak_coherent": self.linear_coherent.peak(),
            "sup_diff": self.linear_fock.sup_diff(&self.linear_coherent),
        })
    }

    pub fn atom_summary(&self) -> Value {
        json!({
            "detector_fock": self.atom_fock.detector,
            "detector_coherent": self.atom_coherent.detector,
            "peak_fock": self.atom_fock.peak(),
            "peak_coherent": self.atom_coherent.peak(),
        })
    }
}

fn pair_csv(fock: &DetectorTrace, coherent: &DetectorTrace) -> String {
    columns_csv(fock.t0, fock.dt, &["y_fock", "y_coherent"], &[&fock.y, &coherent.y])
}

fn detector_compare(plan: &Plan, bundle: &mut Bundle) -> Result<(), Failure> {
    let set = DetectorSet::compute(&plan.atom, &plan.spectrum, &plan.pulse, plan.n_bar, &plan.grid)?;
    bundle.write("linear.csv", &set.linear_csv())?;
    bundle.write("atom.csv", &set.atom_csv())?;
    bundle.sidecar(
        "detectors.json",
        &json!({
            "scenario": "detector_compare",
            "config": plan.config,
            "n_bar": set.n_bar,
            "linear": set.linear_summary(),
            "atom": set.atom_summary(),
        }),
    )
}

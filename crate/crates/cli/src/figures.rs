//! Caption presets for the figure bundles. All use the configured atom; every
//! other parameter is fixed here.

use serde_json::{json, Value};
use transduce_core::analysis::{fit_exponential_decay, sweep_pmax, SweepSolver};
use transduce_core::dynamics::{default_grid, delta_pulse_rise, solve_closed_form_lorentzian, solve_markov, spontaneous_decay};
use transduce_core::grid::logspace;
use transduce_core::io::{columns_csv, sweep_csv, trajectory_csv};
use transduce_core::{AtomParams, PulseShape, PulseSpec, TimeGrid};

use crate::config::FigureId;
use crate::run::{trajectory_summary, Bundle, DetectorSet, Failure};

const DT: f64 = 1e-3;

pub fn reproduce(id: FigureId, atom: &AtomParams, bundle: &mut Bundle) -> Result<(), Failure> {
    let g = atom.gamma;
    let dir = format!("{}/", id.name());
    let summary = match id {
        FigureId::Fig2a => pulse_comparison(atom, 0.1 / g, &[10.0 * g], &dir, bundle)?,
        FigureId::Fig2b => pulse_comparison(atom, 0.05 / g, &[10.0 * g], &dir, bundle)?,
        FigureId::Fig2c => pulse_comparison(atom, 0.01 / g, &[10.0 * g], &dir, bundle)?,
        FigureId::Fig2d => pulse_comparison(atom, 1.0 / g, &[10.0 * g, g], &dir, bundle)?,
        FigureId::Fig3 => rising_edge(atom, &dir, bundle)?,
        FigureId::Fig4d => heatmap(atom, PulseShape::Gaussian, &dir, bundle)?,
        FigureId::Fig4e => heatmap(atom, PulseShape::DecayingExp, &dir, bundle)?,
        FigureId::Fig4f => heatmap(atom, PulseShape::RisingExp, &dir, bundle)?,
        FigureId::Fig5a | FigureId::Fig5b => detectors(atom, id, &dir, bundle)?,
        FigureId::Fig6 => decay_family(atom, &dir, bundle)?,
    };
    bundle.sidecar(
        &format!("{dir}bundle.json"),
        &json!({ "figure": id, "atom": atom, "summary": summary }),
    )
}

fn kappa_label(kappa: f64) -> String {
    format!("lorentzian_kappa{kappa}")
}

/// Gaussian pulse of length `tau_f`: Markov and Lorentzian trajectories on one grid.
fn pulse_comparison(atom: &AtomParams, tau_f: f64, kappas: &[f64], dir: &str, bundle: &mut Bundle) -> Result<Value, Failure> {
    let pulse = PulseSpec::gaussian(tau_f)?;
    let slowest = kappas.iter().copied().fold(f64::INFINITY, f64::min);
    let grid = default_grid(atom, Some(slowest), Some(&pulse), DT.min(tau_f / 40.0))?;
    let mut runs = serde_json::Map::new();
    let markov = solve_markov(atom, Some(&pulse), &grid)?;
    bundle.write(&format!("{dir}markov.csv"), &trajectory_csv(&markov))?;
    runs.insert("markov".into(), trajectory_summary(&markov, None, atom.gamma));
    for &kappa in kappas {
        let traj = solve_closed_form_lorentzian(atom, kappa, Some(&pulse), &grid)?;
        let label = kappa_label(kappa);
        bundle.write(&format!("{dir}{label}.csv"), &trajectory_csv(&traj))?;
        runs.insert(label, trajectory_summary(&traj, Some(kappa), atom.gamma));
    }
    Ok(json!({ "pulse": pulse, "runs": runs }))
}

/// Delta-pulse rising edge at `kappa = 10 gamma`, against the Markov step.
/// A delay of `0.1 / gamma` keeps the edge off the first sample.
fn rising_edge(atom: &AtomParams, dir: &str, bundle: &mut Bundle) -> Result<Value, Failure> {
    let g = atom.gamma;
    let kappa = 10.0 * g;
    let atom = atom.with_delay(0.1 / g);
    let grid = TimeGrid::spanning(0.0, 1.0 / g, 1e-4 / g)?;
    let edge = delta_pulse_rise(&atom, kappa, &grid)?;
    let step: Vec<f64> = grid
        .times()
        .map(|t| if t - grid.t0() >= atom.t_d { (0.5 * g * atom.t_d).exp() } else { 0.0 })
        .collect();
    bundle.write(
        &format!("{dir}rise.csv"),
        &columns_csv(grid.t0(), grid.dt(), &["c_r_markov", "c_r", "dc_r"], &[&step, &edge.c_r, &edge.dc_r]),
    )?;
    Ok(json!({ "kappa": kappa, "t_d": atom.t_d, "slope_width": 1.0 / (kappa - 0.5 * g) }))
}

/// `max_t P` over 25 log-spaced pulse lengths in [0.01, 10]/gamma and 25
/// log-spaced widths in [1, 100] gamma.
fn heatmap(atom: &AtomParams, shape: PulseShape, dir: &str, bundle: &mut Bundle) -> Result<Value, Failure> {
    let g = atom.gamma;
    let taus = logspace(0.01 / g, 10.0 / g, 25);
    let kappas = logspace(g, 100.0 * g, 25);
    let result = sweep_pmax(atom, shape, &taus, &kappas, SweepSolver::ClosedForm)?;
    bundle.write(&format!("{dir}sweep.csv"), &sweep_csv(&result))?;
    Ok(json!({ "shape": shape, "argmax": result.argmax, "errors": result.errors }))
}

/// Gaussian pulse of length `1/gamma`, Markov coupling, Fock against coherent `n_bar = 1`.
fn detectors(atom: &AtomParams, id: FigureId, dir: &str, bundle: &mut Bundle) -> Result<Value, Failure> {
    let pulse = PulseSpec::gaussian(1.0 / atom.gamma)?;
    let grid = default_grid(atom, None, Some(&pulse), DT / atom.gamma)?;
    let set = DetectorSet::compute(atom, &atom.flat()?, &pulse, 1.0, &grid)?;
    let panel = if id == FigureId::Fig5a {
        bundle.write(&format!("{dir}linear.csv"), &set.linear_csv())?;
        set.linear_summary()
    } else {
        bundle.write(&format!("{dir}atom.csv"), &set.atom_csv())?;
        set.atom_summary()
    };
    Ok(json!({ "pulse": pulse, "n_bar": set.n_bar, "panel": panel }))
}

/// Free decay from `|e>` for `kappa / gamma` from 1 to 100, with the Markov exponential.
fn decay_family(atom: &AtomParams, dir: &str, bundle: &mut Bundle) -> Result<Value, Failure> {
    let g = atom.gamma;
    let grid = TimeGrid::spanning(0.0, 10.0 / g, DT / g)?;
    let times: Vec<f64> = grid.times().collect();
    let ratios = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0];
    let mut names = vec!["p_markov".to_string()];
    let mut columns = vec![times.iter().map(|t| (-g * t).exp()).collect::<Vec<f64>>()];
    let mut fits = serde_json::Map::new();
    for r in ratios {
        let traj = spontaneous_decay(atom, r * g, &grid)?;
        let name = format!("p_kappa{r}");
        let fit = fit_exponential_decay(&times, &traj.p);
        fits.insert(
            name.clone(),
            json!({ "kappa": r * g, "fit": fit.as_ref().ok(), "fit_error": fit.as_ref().err().map(|e| e.to_string()) }),
        );
        names.push(name);
        columns.push(traj.p);
    }
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let columns: Vec<&[f64]> = columns.iter().map(Vec::as_slice).collect();
    bundle.write(&format!("{dir}decay.csv"), &columns_csv(grid.t0(), grid.dt(), &names, &columns))?;
    Ok(json!({ "exponential_fits": fits }))
}

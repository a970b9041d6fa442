use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::locate_peak;
use crate::dynamics::{
    default_grid, solve_closed_form_lorentzian, solve_markov, solve_ode_reduction, solve_volterra, AtomParams,
    Trajectory,
};
use crate::error::{Error, Result};
use crate::pulses::{PulseShape, PulseSpec};

/// Solver used for every cell of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepSolver {
    ClosedForm,
    OdeReduction,
    Volterra,
    /// Flat spectrum; every kappa column is identical.
    Markov,
}

impl SweepSolver {
    pub const ALL: [Self; 4] = [Self::ClosedForm, Self::OdeReduction, Self::Volterra, Self::Markov];

    pub fn name(self) -> &'static str {
        match self {
            Self::ClosedForm => "closed_form",
            Self::OdeReduction => "ode_reduction",
            Self::Volterra => "volterra",
            Self::Markov => "markov",
        }
    }

    /// Solves one trajectory for `kappa` (ignored by the Markov solver).
    pub fn solve(self, atom: &AtomParams, kappa: f64, pulse: Option<&PulseSpec>, grid: &crate::grid::TimeGrid) -> Result<Trajectory> {
        match self {
            Self::ClosedForm => solve_closed_form_lorentzian(atom, kappa, pulse, grid),
            Self::OdeReduction => solve_ode_reduction(atom, kappa, pulse, grid),
            Self::Volterra => solve_volterra(atom, &atom.lorentzian(kappa)?, pulse, grid),
            Self::Markov => solve_markov(atom, pulse, grid),
        }
    }
}

impl fmt::Display for SweepSolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepSolver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.name() == s.replace('-', "_"))
            .ok_or_else(|| Error::InvalidParameter {
                name: "solver",
                reason: format!("unknown solver `{s}` (expected closed_form, ode_reduction, volterra or markov)"),
            })
    }
}

/// Time-step policy for sweep cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    /// Samples per pulse length `tau_f`.
    pub points_per_tau: f64,
    /// Upper bound on `dt * gamma`.
    pub max_step: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            points_per_tau: 40.0,
            max_step: 0.01,
        }
    }
}

impl SweepOptions {
    fn step(&self, atom: &AtomParams, tau_f: f64, kappa: f64, solver: SweepSolver) -> f64 {
        let mut dt = (tau_f / self.points_per_tau).min(self.max_step / atom.gamma);
        if solver == SweepSolver::OdeReduction {
            dt = dt.min(0.5 * crate::dynamics::MAX_STIFFNESS / kappa.max(atom.gamma));
        }
        dt
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellError {
    pub tau_index: usize,
    pub kappa_index: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub tau_f: f64,
    pub kappa: f64,
    pub p_max: f64,
}

/// Peak excitation over a `tau_f x kappa` grid. Rows follow `tau_f_grid`,
/// columns `kappa_grid`; failed cells hold `None` and an entry in `errors`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub shape: PulseShape,
    pub solver: SweepSolver,
    pub tau_f_grid: Vec<f64>,
    pub kappa_grid: Vec<f64>,
    pub p_max: Vec<Vec<Option<f64>>>,
    pub t_peak: Vec<Vec<Option<f64>>>,
    pub errors: Vec<CellError>,
    pub argmax: Option<Optimum>,
}

impl SweepResult {
    /// `(tau_f, kappa, p_max, t_peak)` in row-major order.
    pub fn long_rows(&self) -> impl Iterator<Item = (f64, f64, Option<f64>, Option<f64>)> + '_ {
        self.tau_f_grid.iter().enumerate().flat_map(move |(i, &tau)| {
            self.kappa_grid
                .iter()
                .enumerate()
                .map(move |(j, &kappa)| (tau, kappa, self.p_max[i][j], self.t_peak[i][j]))
        })
    }
}

fn check_axis(name: &'static str, axis: &[f64]) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::InvalidParameter {
            name,
            reason: "grid must not be empty".into(),
        });
    }
    if axis.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::InvalidParameter {
            name,
            reason: "grid values must be finite and > 0".into(),
        });
    }
    if axis.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter {
            name,
            reason: "grid must be strictly ascending".into(),
        });
    }
    Ok(())
}

pub fn sweep_pmax(
    atom: &AtomParams,
    shape: PulseShape,
    tau_f_grid: &[f64],
    kappa_grid: &[f64],
    solver: SweepSolver,
) -> Result<SweepResult> {
    sweep_pmax_with(atom, shape, tau_f_grid, kappa_grid, solver, &SweepOptions::default())
}

/// [`sweep_pmax`] with an explicit step policy. Cells run in parallel and
/// are collected in grid order, so the result does not depend on scheduling.
pub fn sweep_pmax_with(
    atom: &AtomParams,
    shape: PulseShape,
    tau_f_grid: &[f64],
    kappa_grid: &[f64],
    solver: SweepSolver,
    options: &SweepOptions,
) -> Result<SweepResult> {
    atom.validate()?;
    check_axis("sweep.tau_f", tau_f_grid)?;
    check_axis("sweep.kappa", kappa_grid)?;
    if shape == PulseShape::Delta {
        return Err(Error::InvalidParameter {
            name: "sweep.shape",
            reason: "a delta pulse has no length to sweep".into(),
        });
    }
    let cells: Vec<(usize, usize)> = (0..tau_f_grid.len())
        .flat_map(|i| (0..kappa_grid.len()).map(move |j| (i, j)))
        .collect();
    let outcomes: Vec<Result<(f64, f64)>> = cells
        .par_iter()
        .map(|&(i, j)| {
            let (tau, kappa) = (tau_f_grid[i], kappa_grid[j]);
            let pulse = PulseSpec::with_shape(shape, tau)?;
            let dt = options.step(atom, tau, kappa, solver);
            let grid = default_grid(atom, Some(kappa), Some(&pulse), dt)?;
            let traj = solver.solve(atom, kappa, Some(&pulse), &grid)?;
            let peak = locate_peak(&traj.p, traj.t0, traj.dt);
            Ok((peak.value, peak.time))
        })
        .collect();
    let (rows, cols) = (tau_f_grid.len(), kappa_grid.len());
    let mut p_max = vec![vec![None; cols]; rows];
    let mut t_peak = vec![vec![None; cols]; rows];
    let mut errors = Vec::new();
    for (&(i, j), outcome) in cells.iter().zip(outcomes) {
        match outcome {
            Ok((p, t)) => {
                p_max[i][j] = Some(p);
                t_peak[i][j] = Some(t);
            }
            Err(e) => errors.push(CellError {
                tau_index: i,
                kappa_index: j,
                message: e.to_string(),
            }),
        }
    }
    let mut result = SweepResult {
        shape,
        solver,
        tau_f_grid: tau_f_grid.to_vec(),
        kappa_grid: kappa_grid.to_vec(),
        p_max,
        t_peak,
        errors,
        argmax: None,
    };
    result.argmax = find_optimum(&result).ok();
    Ok(result)
}

/// Global maximum of `p_max`; ties go to the smaller `tau_f`, then the smaller `kappa`.
pub fn find_optimum(sweep: &SweepResult) -> Result<Optimum> {
    let mut best: Option<Optimum> = None;
    for (i, row) in sweep.p_max.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            if let Some(p) = *cell {
                if best.is_none_or(|b| p > b.p_max) {
                    best = Some(Optimum {
                        tau_f: sweep.tau_f_grid[i],
                        kappa: sweep.kappa_grid[j],
                        p_max: p,
                    });
                }
            }
        }
    }
    best.ok_or(Error::EmptySweep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::logspace;

    fn synthetic(values: Vec<Vec<Option<f64>>>) -> SweepResult {
        let rows = values.len();
        let cols = values[0].len();
        SweepResult {
            shape: PulseShape::Gaussian,
            solver: SweepSolver::ClosedForm,
            tau_f_grid: (1..=rows).map(|v| v as f64).collect(),
            kappa_grid: (1..=cols).map(|v| v as f64 * 10.0).collect(),
            t_peak: values.clone(),
            p_max: values,
            errors: Vec::new(),
            argmax: None,
        }
    }

    #[test]
    fn ties_prefer_small_parameters() {
        let s = synthetic(vec![vec![Some(0.5); 3]; 3]);
        let o = find_optimum(&s).unwrap();
        assert_eq!((o.tau_f, o.kappa), (1.0, 10.0));
    }

    #[test]
    fn single_cell_and_all_failed() {
        let s = synthetic(vec![vec![Some(0.3)]]);
        assert_eq!(find_optimum(&s).unwrap().p_max, 0.3);
        let s = synthetic(vec![vec![None, None]]);
        assert_eq!(find_optimum(&s), Err(Error::EmptySweep));
    }

    #[test]
    fn rejects_unsorted_axis() {
        let atom = AtomParams::new(1.0).unwrap();
        let err = sweep_pmax(&atom, PulseShape::Gaussian, &[1.0, 0.5], &[1.0], SweepSolver::ClosedForm).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { name: "sweep.tau_f", .. }));
    }

    #[test]
    fn kappa_columns_are_independent() {
        let atom = AtomParams::new(1.0).unwrap();
        let options = SweepOptions {
            points_per_tau: 40.0,
            max_step: 0.01,
        };
        let s = sweep_pmax_with(&atom, PulseShape::Gaussian, &[1.0], &[1.0, 10.0], SweepSolver::ClosedForm, &options).unwrap();
        assert!(s.errors.is_empty());
        assert!(s.p_max[0][0].unwrap() > s.p_max[0][1].unwrap());
    }

    #[test]
    fn gaussian_rows_peak_near_unit_length() {
        let atom = AtomParams::new(1.0).unwrap();
        let taus = logspace(0.01, 10.0, 25);
        let s = sweep_pmax(&atom, PulseShape::Gaussian, &taus, &[1.0, 2.0, 10.0, 100.0], SweepSolver::ClosedForm).unwrap();
        let best = s.argmax.unwrap();
        assert!((0.5..=2.0).contains(&best.tau_f), "{best:?}");
        assert!(best.p_max > 0.96);
    }
}

use serde::{Deserialize, Serialize};

use super::branches::branch_params;
use super::{AtomParams, SolverId, Trajectory};
use crate::error::{ensure_positive, Result};
use crate::grid::TimeGrid;

#[derive(Serialize)]
struct Params<'a> {
    solver: &'static str,
    atom: &'a AtomParams,
    kappa: f64,
    grid: &'a TimeGrid,
}

/// Excited-state amplitude after preparation in `|e>` at the first grid time,
/// with no pulse. `atom.c0` is ignored: the amplitude starts at 1.
pub fn spontaneous_decay(atom: &AtomParams, kappa: f64, grid: &TimeGrid) -> Result<Trajectory> {
    atom.validate()?;
    let b = branch_params(atom.gamma, kappa)?;
    let c = (0..grid.len())
        .map(|i| b.impulse_response(atom.gamma, i as f64 * grid.dt()))
        .collect();
    let params = Params {
        solver: "spontaneous_decay",
        atom,
        kappa,
        grid,
    };
    Ok(Trajectory::new(grid, c, SolverId::SpontaneousDecay, &params))
}

/// Rising-edge factor of the weak-coupling delta-pulse response and its slope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiseEdge {
    pub t0: f64,
    pub dt: f64,
    pub c_r: Vec<f64>,
    pub dc_r: Vec<f64>,
}

/// `C_R(t) = \int_0^{t - t0} Theta(t' - t_d) kappa e^{-kappa (t' - t_d)} e^{gamma t' / 2} dt'`
/// in closed form, with `dC_R/dt` taken right-continuous at `t - t0 = t_d`.
pub fn delta_pulse_rise(atom: &AtomParams, kappa: f64, grid: &TimeGrid) -> Result<RiseEdge> {
    atom.validate()?;
    ensure_positive("spectrum.kappa", kappa)?;
    let (gamma, t_d) = (atom.gamma, atom.t_d);
    let r = kappa - 0.5 * gamma;
    let tol = 1e-12 * grid.dt();
    let mut c_r = Vec::with_capacity(grid.len());
    let mut dc_r = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let x = i as f64 * grid.dt();
        if x < t_d - tol {
            c_r.push(0.0);
            dc_r.push(0.0);
            continue;
        }
        let s = (x - t_d).max(0.0);
        // (1 - e^{-r s}) / r without cancellation for small r s
        let ramp = if (r * s).abs() < 1e-8 { s * (1.0 - 0.5 * r * s) } else { -(-r * s).exp_m1() / r };
        c_r.push(kappa * (0.5 * gamma * t_d).exp() * ramp);
        dc_r.push(kappa * (-kappa * s + 0.5 * gamma * x).exp());
    }
    Ok(RiseEdge {
        t0: grid.t0(),
        dt: grid.dt(),
        c_r,
        dc_r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::solve_closed_form_lorentzian;
    use num_complex::Complex64;
    use crate::grid::trapezoid;

    #[test]
    fn starts_excited() {
        let atom = AtomParams::new(1.0).unwrap();
        let grid = TimeGrid::spanning(0.0, 5.0, 0.01).unwrap();
        for kappa in [1.0, 2.0, 100.0] {
            let traj = spontaneous_decay(&atom, kappa, &grid).unwrap();
            assert!((traj.p[0] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn matches_free_closed_form() {
        let atom = AtomParams::new(1.0).unwrap();
        let grid = TimeGrid::spanning(0.0, 5.0, 0.01).unwrap();
        let decay = spontaneous_decay(&atom, 0.7, &grid).unwrap();
        let cf = solve_closed_form_lorentzian(&atom.with_c0(Complex64::from(1.0)).unwrap(), 0.7, None, &grid).unwrap();
        assert!(decay.sup_diff_p(&cf) < 1e-13);
    }

    #[test]
    fn rise_is_integral_of_slope() {
        let atom = AtomParams::new(1.0).unwrap().with_delay(0.3);
        let grid = TimeGrid::spanning(0.0, 3.0, 1e-4).unwrap();
        let edge = delta_pulse_rise(&atom, 10.0, &grid).unwrap();
        let n = edge.c_r.len() - 1;
        let numeric = trapezoid(&edge.dc_r, grid.dt());
        // the step at t_d costs half a cell of the trapezoid sum
        let correction = 0.5 * grid.dt() * edge.dc_r[3000];
        assert!((numeric - correction - edge.c_r[n]).abs() < 1e-6, "{numeric} {}", edge.c_r[n]);
        assert!(edge.c_r.windows(2).all(|w| w[1] >= w[0]));
    }
}

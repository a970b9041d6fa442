use num_complex::Complex64;
use serde::Serialize;

use super::closed_form::propagate_branches;
use super::{AtomParams, Drive, SolverId, Trajectory};
use crate::error::Result;
use crate::grid::TimeGrid;
use crate::pulses::PulseSpec;

#[derive(Serialize)]
struct Params<'a> {
    solver: &'static str,
    atom: &'a AtomParams,
    pulse: Option<&'a PulseSpec>,
    grid: &'a TimeGrid,
}

/// Memory-less dynamics `dC/dt = -gamma/2 C + sqrt(gamma_p) u(t - t_d)`.
///
/// A delta pulse enters as a jump of `sqrt(gamma_p) sqrt(2 pi) xi0` at its
/// arrival; the amplitude at the arrival node already includes the jump.
pub fn solve_markov(atom: &AtomParams, pulse: Option<&PulseSpec>, grid: &TimeGrid) -> Result<Trajectory> {
    atom.validate()?;
    let spectrum = atom.flat()?;
    let arriving = pulse.map(|p| atom.arriving(p));
    let drive = Drive::sample_optional(&spectrum, arriving.as_ref(), grid, false)?;
    let c = markov_with_drive(atom.gamma, atom.c0, &drive, grid);
    let params = Params {
        solver: "markov",
        atom,
        pulse,
        grid,
    };
    Ok(Trajectory::new(grid, c, SolverId::Markov, &params))
}

pub(crate) fn markov_with_drive(gamma: f64, c0: Complex64, drive: &Drive, grid: &TimeGrid) -> Vec<Complex64> {
    let rate = Complex64::from(0.5 * gamma);
    let mut c = propagate_branches(&[(Complex64::from(1.0), rate)], c0, drive.nodes(), grid.dt());
    if let Some(impulse) = drive.impulse() {
        let tol = 1e-9 * grid.dt();
        for (i, slot) in c.iter_mut().enumerate() {
            let elapsed = grid.time(i) - impulse.time;
            if elapsed >= -tol {
                *slot += impulse.weight * (-0.5 * gamma * elapsed.max(0.0)).exp();
            }
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_unit_width_peak() {
        // independent RK4 integration of the same equation gives 0.77025
        let atom = AtomParams::new(1.0).unwrap();
        let pulse = PulseSpec::gaussian(1.0).unwrap();
        let grid = TimeGrid::spanning(-8.0, 20.0, 0.002).unwrap();
        let traj = solve_markov(&atom, Some(&pulse), &grid).unwrap();
        assert!((traj.max_p().0 - 0.77025).abs() < 1e-4);
    }

    #[test]
    fn delta_pulse_jumps_then_decays() {
        let atom = AtomParams::new(1.0).unwrap();
        let xi0 = 0.3;
        let pulse = PulseSpec::delta(xi0).unwrap();
        let grid = TimeGrid::spanning(-1.0, 5.0, 0.01).unwrap();
        let traj = solve_markov(&atom, Some(&pulse), &grid).unwrap();
        let w = (2.0 * std::f64::consts::PI).sqrt() * xi0;
        for (i, c) in traj.c.iter().enumerate() {
            let t = grid.time(i);
            let expect = if t >= -1e-12 { w * (-0.5 * t.max(0.0)).exp() } else { 0.0 };
            assert!((c.re - expect).abs() < 1e-12 && c.im.abs() < 1e-15, "t = {t}");
        }
    }

    #[test]
    fn delay_shifts_response() {
        let pulse = PulseSpec::gaussian(1.0).unwrap();
        let grid = TimeGrid::spanning(-8.0, 20.0, 0.01).unwrap();
        let a = solve_markov(&AtomParams::new(1.0).unwrap(), Some(&pulse), &grid).unwrap();
        let b = solve_markov(&AtomParams::new(1.0).unwrap().with_delay(1.0), Some(&pulse), &grid).unwrap();
        for i in 0..grid.len() - 100 {
            assert!((a.p[i] - b.p[i + 100]).abs() < 1e-6);
        }
    }
}

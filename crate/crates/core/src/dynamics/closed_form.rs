use num_complex::Complex64;
use serde::Serialize;

use super::branches::branch_params;
use super::{AtomParams, Drive, SolverId, Trajectory};
use crate::error::Result;
use crate::grid::TimeGrid;
use crate::pulses::PulseSpec;

#[derive(Serialize)]
struct Params<'a> {
    solver: &'static str,
    atom: &'a AtomParams,
    kappa: f64,
    pulse: Option<&'a PulseSpec>,
    grid: &'a TimeGrid,
}

/// Exact solution for a Lorentzian spectrum,
/// `C(t) = sum_j s_j [e^{-p_j (t - t0)} C0 + \int_{t0}^t e^{-p_j (t - t')} D(t') dt']`.
///
/// The convolution uses the recursion
/// `I_{n+1} = e^{-p dt} I_n + dt/2 (e^{-p dt} D_n + D_{n+1})`, a trapezoid
/// rule that stays stable for any `p dt`. At `kappa = 2 gamma` the double-pole
/// kernel `(1 + gamma t) e^{-gamma t}` is used instead.
pub fn solve_closed_form_lorentzian(
    atom: &AtomParams,
    kappa: f64,
    pulse: Option<&PulseSpec>,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    atom.validate()?;
    let spectrum = atom.lorentzian(kappa)?;
    let arriving = pulse.map(|p| atom.arriving(p));
    let drive = Drive::sample_optional(&spectrum, arriving.as_ref(), grid, false)?;
    let b = branch_params(atom.gamma, kappa)?;
    let c = if b.degenerate {
        propagate_double_pole(atom.gamma, atom.c0, drive.nodes(), grid.dt())
    } else {
        propagate_branches(&[(b.s1, b.p1), (b.s2, b.p2)], atom.c0, drive.nodes(), grid.dt())
    };
    let params = Params {
        solver: "closed_form",
        atom,
        kappa,
        pulse,
        grid,
    };
    Ok(Trajectory::new(grid, c, SolverId::ClosedForm, &params))
}

/// `C_n = sum_j w_j [e^{-r_j n dt} c0 + I_j(n)]` for branches `(w_j, r_j)`.
pub(crate) fn propagate_branches(branches: &[(Complex64, Complex64)], c0: Complex64, drive: &[Complex64], dt: f64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); drive.len()];
    for &(weight, rate) in branches {
        let step = (-rate * dt).exp();
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, slot) in out.iter_mut().enumerate() {
            if n > 0 {
                acc = step * acc + 0.5 * dt * (step * drive[n - 1] + drive[n]);
            }
            let hom = (-rate * (n as f64 * dt)).exp();
            *slot += weight * (hom * c0 + acc);
        }
    }
    out
}

/// Double-pole kernel `h(t) = (1 + gamma t) e^{-gamma t} = e^{-gamma t} + gamma t e^{-gamma t}`.
///
/// `I_a = \int e^{-gamma (t - s)} D ds` and `I_b = \int (t - s) e^{-gamma (t - s)} D ds`
/// are advanced together; the trapezoid weight for `I_b` vanishes at the new node.
fn propagate_double_pole(gamma: f64, c0: Complex64, drive: &[Complex64], dt: f64) -> Vec<Complex64> {
    let e = (-gamma * dt).exp();
    let mut ia = Complex64::new(0.0, 0.0);
    let mut ib = Complex64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(drive.len());
    for n in 0..drive.len() {
        if n > 0 {
            let d0 = drive[n - 1];
            ib = e * (ib + dt * (ia + 0.5 * dt * d0));
            ia = e * ia + 0.5 * dt * (e * d0 + drive[n]);
        }
        let t = n as f64 * dt;
        let h = (1.0 + gamma * t) * (-gamma * t).exp();
        out.push(h * c0 + ia + gamma * ib);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_decay_matches_kernel() {
        let atom = AtomParams::new(1.0).unwrap().with_c0(Complex64::from(1.0)).unwrap();
        let grid = TimeGrid::spanning(0.0, 10.0, 0.01).unwrap();
        for kappa in [0.5, 1.0, 2.0, 10.0] {
            let traj = solve_closed_form_lorentzian(&atom, kappa, None, &grid).unwrap();
            let b = branch_params(1.0, kappa).unwrap();
            for (i, c) in traj.c.iter().enumerate().step_by(50) {
                let expect = b.impulse_response(1.0, grid.time(i));
                assert!((c - expect).norm() < 1e-12, "kappa {kappa} i {i}");
            }
        }
    }

    #[test]
    fn double_pole_agrees_with_neighbours() {
        let atom = AtomParams::new(1.0).unwrap();
        let pulse = PulseSpec::gaussian(1.0).unwrap();
        let grid = TimeGrid::spanning(-8.0, 20.0, 0.005).unwrap();
        let at = solve_closed_form_lorentzian(&atom, 2.0, Some(&pulse), &grid).unwrap();
        let near = solve_closed_form_lorentzian(&atom, 2.0 + 1e-5, Some(&pulse), &grid).unwrap();
        assert!(at.sup_diff_p(&near) < 1e-5, "{}", at.sup_diff_p(&near));
    }

    #[test]
    fn equal_rates_gaussian_peak() {
        let atom = AtomParams::new(1.0).unwrap();
        let pulse = PulseSpec::gaussian(1.0).unwrap();
        let grid = TimeGrid::spanning(-8.0, 20.0, 0.005).unwrap();
        let traj = solve_closed_form_lorentzian(&atom, 1.0, Some(&pulse), &grid).unwrap();
        let (p, _) = traj.max_p();
        assert!((p - 0.96037).abs() < 2e-4, "{p}");
    }
}

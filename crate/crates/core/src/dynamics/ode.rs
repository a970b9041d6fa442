use num_complex::Complex64;
use serde::Serialize;

use super::{AtomParams, Drive, SolverId, Trajectory};
use crate::error::{Error, Result};
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

/// Largest admissible `dt * max(kappa, gamma)` for the explicit RK4 step.
pub const MAX_STIFFNESS: f64 = 0.1;

/// RK4 integration of the Markovian embedding
/// `dC/dt = -(gamma kappa / 2) M + D`, `dM/dt = -kappa M + C`, `M(t0) = 0`,
/// where `M(t) = \int_{t0}^t e^{-kappa (t - t')} C(t') dt'` carries the memory.
pub fn solve_ode_reduction(
    atom: &AtomParams,
    kappa: f64,
    pulse: Option<&PulseSpec>,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    atom.validate()?;
    let spectrum = atom.lorentzian(kappa)?;
    let max = MAX_STIFFNESS / kappa.max(atom.gamma);
    if grid.dt() > max {
        return Err(Error::StepTooLarge { dt: grid.dt(), max });
    }
    let arriving = pulse.map(|p| atom.arriving(p));
    let drive = Drive::sample_optional(&spectrum, arriving.as_ref(), grid, true)?;
    let (nodes, mids) = (drive.nodes(), drive.mids());
    let a = 0.5 * atom.gamma * kappa;
    let rhs = |c: Complex64, m: Complex64, d: Complex64| (-a * m + d, -kappa * m + c);
    let h = grid.dt();
    let mut c = atom.c0;
    let mut m = Complex64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(grid.len());
    out.push(c);
    for n in 0..grid.len() - 1 {
        let (k1c, k1m) = rhs(c, m, nodes[n]);
        let (k2c, k2m) = rhs(c + 0.5 * h * k1c, m + 0.5 * h * k1m, mids[n]);
        let (k3c, k3m) = rhs(c + 0.5 * h * k2c, m + 0.5 * h * k2m, mids[n]);
        let (k4c, k4m) = rhs(c + h * k3c, m + h * k3m, nodes[n + 1]);
        c += h / 6.0 * (k1c + 2.0 * k2c + 2.0 * k3c + k4c);
        m += h / 6.0 * (k1m + 2.0 * k2m + 2.0 * k3m + k4m);
        out.push(c);
    }
    let params = Params {
        solver: "ode_reduction",
        atom,
        kappa,
        pulse,
        grid,
    };
    Ok(Trajectory::new(grid, out, SolverId::OdeReduction, &params))
}

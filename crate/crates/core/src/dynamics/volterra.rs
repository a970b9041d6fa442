use num_complex::Complex64;
use serde::Serialize;

use super::{markov_with_drive, AtomParams, Drive, SolverId, Trajectory};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::pulses::PulseSpec;
use crate::spectra::{InteractionSpectrum, MemoryKernel, SpectrumShape};

/// Largest grid accepted by the Volterra solver.
pub const MAX_VOLTERRA_STEPS: usize = 1_000_000;

#[derive(Serialize)]
struct Params<'a> {
    solver: &'static str,
    atom: &'a AtomParams,
    spectrum: &'a InteractionSpectrum,
    pulse: Option<&'a PulseSpec>,
    grid: &'a TimeGrid,
}

/// Direct discretization of the integro-differential equation for any spectrum.
///
/// The time step is the implicit trapezoid rule; its end-point term is linear
/// in `C_{n+1}` and is solved exactly. The memory integral treats `C` as
/// piecewise linear: exponential kernels are integrated exactly against it and
/// reuse a running sum, so the cost is `O(N)`; tabulated kernels use the
/// trapezoid rule on kernel samples at `O(N^2)`. A flat spectrum has no
/// memory and is forwarded to the Markov solver, with `redirected_from` set.
pub fn solve_volterra(
    atom: &AtomParams,
    spectrum: &InteractionSpectrum,
    pulse: Option<&PulseSpec>,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    solve(atom, spectrum, pulse, grid, true)
}

/// Same as [`solve_volterra`] but always evaluates the full `O(N^2)` memory sum.
pub fn solve_volterra_direct(
    atom: &AtomParams,
    spectrum: &InteractionSpectrum,
    pulse: Option<&PulseSpec>,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    solve(atom, spectrum, pulse, grid, false)
}

fn solve(
    atom: &AtomParams,
    spectrum: &InteractionSpectrum,
    pulse: Option<&PulseSpec>,
    grid: &TimeGrid,
    allow_fast: bool,
) -> Result<Trajectory> {
    atom.validate()?;
    spectrum.validate()?;
    if grid.len() > MAX_VOLTERRA_STEPS {
        return Err(Error::MemoryBudget {
            steps: grid.len(),
            limit: MAX_VOLTERRA_STEPS,
        });
    }
    let arriving = pulse.map(|p| atom.arriving(p));
    let drive = Drive::sample_optional(spectrum, arriving.as_ref(), grid, false)?;
    let params = Params {
        solver: "volterra",
        atom,
        spectrum,
        pulse,
        grid,
    };
    if matches!(spectrum.shape, SpectrumShape::Flat) {
        let c = markov_with_drive(spectrum.gamma, atom.c0, &drive, grid);
        let mut traj = Trajectory::new(grid, c, SolverId::Markov, &params);
        traj.redirected_from = Some(SolverId::Volterra);
        return Ok(traj);
    }
    let c = match spectrum.kernel() {
        MemoryKernel::Exponential { amplitude, rate } => {
            let w = ExpWeights::new(rate * grid.dt());
            if allow_fast {
                exponential_memory(amplitude, rate, &w, atom.c0, drive.nodes(), grid.dt())
            } else {
                let lag = |m: usize| amplitude * (-rate * m as f64 * grid.dt()).exp();
                let weights = Weights {
                    interior: (0..grid.len()).map(|m| Complex64::from(grid.dt() * w.interior * lag(m))).collect(),
                    head: (0..grid.len()).map(|m| Complex64::from(grid.dt() * w.head * lag(m))).collect(),
                    own: Complex64::from(grid.dt() * w.own * amplitude),
                };
                direct_memory(&weights, atom.c0, drive.nodes(), grid.dt())
            }
        }
        kernel => {
            let g = kernel
                .samples(grid.dt(), grid.len())
                .expect("non-flat spectra have a sampled kernel");
            direct_memory(&Weights::trapezoid(&g, grid.dt()), atom.c0, drive.nodes(), grid.dt())
        }
    };
    Ok(Trajectory::new(grid, c, SolverId::Volterra, &params))
}

/// Quadrature weights of the memory sum
/// `S_n = head[n] C_0 + sum_{k=1}^{n-1} interior[n-k] C_k + own C_n`.
struct Weights {
    interior: Vec<Complex64>,
    head: Vec<Complex64>,
    own: Complex64,
}

impl Weights {
    /// Plain trapezoid on kernel samples `g[m] = G(m dt)`.
    fn trapezoid(g: &[Complex64], dt: f64) -> Self {
        Self {
            interior: g.iter().map(|v| dt * v).collect(),
            head: g.iter().map(|v| 0.5 * dt * v).collect(),
            own: 0.5 * dt * g[0],
        }
    }
}

/// Product-integration factors for `G(t) = A e^{-r t}` with `C` linear on
/// each cell, relative to `dt A e^{-r m dt}`; `z = r dt`. They tend to the
/// trapezoid values (1, 1/2, 1/2) as `z -> 0`.
struct ExpWeights {
    interior: f64,
    head: f64,
    own: f64,
}

impl ExpWeights {
    fn new(z: f64) -> Self {
        if z < 1e-3 {
            let z2 = z * z;
            return Self {
                interior: 1.0 + z2 / 12.0,
                head: 0.5 + z / 6.0 + z2 / 24.0,
                own: 0.5 - z / 6.0 + z2 / 24.0,
            };
        }
        let half = 0.5 * z;
        Self {
            interior: (half.sinh() / half).powi(2),
            head: (z.exp_m1() - z) / (z * z),
            own: (z + (-z).exp_m1()) / (z * z),
        }
    }
}

/// One implicit trapezoid step given the explicit part `s_next` of the
/// memory sum at `n + 1` and the slope `f_n` at `n`; `own` weighs `C_{n+1}`.
#[inline]
fn step(c_n: Complex64, f_n: Complex64, s_next: Complex64, d_next: Complex64, own: Complex64, dt: f64) -> (Complex64, Complex64) {
    let c = (c_n + 0.5 * dt * (f_n - s_next + d_next)) / (1.0 + 0.5 * dt * own);
    let f = -s_next - own * c + d_next;
    (c, f)
}

fn direct_memory(w: &Weights, c0: Complex64, drive: &[Complex64], dt: f64) -> Vec<Complex64> {
    let n_total = drive.len();
    let mut c = Vec::with_capacity(n_total);
    c.push(c0);
    let mut f = drive[0];
    for n in 0..n_total - 1 {
        let m = n + 1;
        let mut sum = w.head[m] * c0;
        for k in 1..m {
            sum += w.interior[m - k] * c[k];
        }
        let (c_next, f_next) = step(c[n], f, sum, drive[m], w.own, dt);
        c.push(c_next);
        f = f_next;
    }
    c
}

/// Same sums for `G(t) = A e^{-r t}` via `R_n = sum_{k=1}^{n} e^{-r (n-k) dt} C_k`.
fn exponential_memory(amplitude: f64, rate: f64, w: &ExpWeights, c0: Complex64, drive: &[Complex64], dt: f64) -> Vec<Complex64> {
    let n_total = drive.len();
    let decay = (-rate * dt).exp();
    let scale = dt * amplitude;
    let own = Complex64::from(scale * w.own);
    let mut c = Vec::with_capacity(n_total);
    c.push(c0);
    let mut f = drive[0];
    let mut r = Complex64::new(0.0, 0.0);
    for n in 0..n_total - 1 {
        let m = n + 1;
        let head = w.head * (-rate * m as f64 * dt).exp() * c0;
        let s_next = scale * (head + w.interior * decay * r);
        let (c_next, f_next) = step(c[n], f, s_next, drive[m], own, dt);
        c.push(c_next);
        f = f_next;
        r = decay * r + c_next;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::solve_closed_form_lorentzian;
    use crate::spectra::TabulatedSpectrum;

    #[test]
    fn fast_and_direct_paths_agree() {
        let atom = AtomParams::new(1.0).unwrap().with_c0(Complex64::new(0.6, 0.0)).unwrap();
        let spectrum = atom.lorentzian(4.0).unwrap();
        let pulse = PulseSpec::gaussian(0.7).unwrap();
        let grid = TimeGrid::spanning(-5.0, 10.0, 0.01).unwrap();
        let fast = solve_volterra(&atom, &spectrum, Some(&pulse), &grid).unwrap();
        let direct = solve_volterra_direct(&atom, &spectrum, Some(&pulse), &grid).unwrap();
        let diff = fast.c.iter().zip(&direct.c).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-12, "{diff}");
    }

    #[test]
    fn converges_to_closed_form() {
        let atom = AtomParams::new(1.0).unwrap();
        let spectrum = atom.lorentzian(2.5).unwrap();
        let pulse = PulseSpec::gaussian(1.0).unwrap();
        let grid = TimeGrid::spanning(-8.0, 20.0, 0.002).unwrap();
        let v = solve_volterra(&atom, &spectrum, Some(&pulse), &grid).unwrap();
        let cf = solve_closed_form_lorentzian(&atom, 2.5, Some(&pulse), &grid).unwrap();
        assert!(v.sup_diff_p(&cf) < 1e-5, "{}", v.sup_diff_p(&cf));
    }

    #[test]
    fn flat_spectrum_redirects() {
        let atom = AtomParams::new(1.0).unwrap();
        let pulse = PulseSpec::gaussian(1.0).unwrap();
        let grid = TimeGrid::spanning(-8.0, 10.0, 0.01).unwrap();
        let traj = solve_volterra(&atom, &atom.flat().unwrap(), Some(&pulse), &grid).unwrap();
        assert_eq!(traj.solver, SolverId::Markov);
        assert_eq!(traj.redirected_from, Some(SolverId::Volterra));
    }

    #[test]
    fn memory_budget_enforced() {
        let atom = AtomParams::new(1.0).unwrap();
        let grid = TimeGrid::new(0.0, 1e-6, MAX_VOLTERRA_STEPS + 1).unwrap();
        let err = solve_volterra(&atom, &atom.lorentzian(1.0).unwrap(), None, &grid).unwrap_err();
        assert!(matches!(err, Error::MemoryBudget { .. }));
    }

    #[test]
    fn tabulated_lorentzian_decay() {
        let atom = AtomParams::new(1.0).unwrap().with_c0(Complex64::from(1.0)).unwrap();
        let table = TabulatedSpectrum::sample_lorentzian(1.0, 2.0, 4000.0, 400_001).unwrap();
        let spectrum = InteractionSpectrum::tabulated(table, 1.0, 1.0).unwrap();
        let grid = TimeGrid::spanning(0.0, 8.0, 0.01).unwrap();
        let v = solve_volterra(&atom, &spectrum, None, &grid).unwrap();
        let cf = solve_closed_form_lorentzian(&atom, 2.0, None, &grid).unwrap();
        assert!(v.sup_diff_p(&cf) < 1e-3, "{}", v.sup_diff_p(&cf));
    }
}

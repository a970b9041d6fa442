use num_complex::Complex64;

use super::branches::branch_params;
use super::AtomParams;
use crate::error::{Error, Result};
use crate::grid::{FrequencyGrid, TimeGrid};
use crate::pulses::PulseSpec;

/// Splits the driven amplitude into the two Lorentzian branches,
/// `C_j(t) = s_j \int g(delta) xi(delta) / (p_j - i delta) e^{-i delta (t - t_a)} d delta`,
/// integrated over the default truncation window.
///
/// The frequency-domain form assumes the pulse started in the far past, so
/// `atom.c0` does not enter.
pub fn branch_decomposition(
    atom: &AtomParams,
    kappa: f64,
    pulse: &PulseSpec,
    grid: &TimeGrid,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let tau = if pulse.tau_f > 0.0 { pulse.tau_f } else { 1.0 / kappa };
    let window = FrequencyGrid::truncation(kappa, tau)?;
    branch_decomposition_in(atom, kappa, pulse, grid, &window)
}

/// [`branch_decomposition`] over an explicit detuning window.
pub fn branch_decomposition_in(
    atom: &AtomParams,
    kappa: f64,
    pulse: &PulseSpec,
    grid: &TimeGrid,
    window: &FrequencyGrid,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    atom.validate()?;
    pulse.validate()?;
    let b = branch_params(atom.gamma, kappa)?;
    if b.degenerate {
        return Err(Error::DegenerateBranches);
    }
    let spectrum = atom.lorentzian(kappa)?;
    let pulse = atom.arriving(pulse);
    let nodes: Vec<f64> = window.nodes().collect();
    let mut base = Vec::with_capacity(nodes.len());
    for (i, &d) in nodes.iter().enumerate() {
        base.push(window.weight(i) * spectrum.coupling_amplitude(d)? * pulse.spectral_amplitude(d));
    }
    let w1: Vec<Complex64> = base.iter().zip(&nodes).map(|(a, &d)| b.s1 * a / (b.p1 - Complex64::new(0.0, d))).collect();
    let w2: Vec<Complex64> = base.iter().zip(&nodes).map(|(a, &d)| b.s2 * a / (b.p2 - Complex64::new(0.0, d))).collect();
    let steps: Vec<Complex64> = nodes.iter().map(|d| Complex64::from_polar(1.0, -d * grid.dt())).collect();
    let s0 = grid.t0() - pulse.t_a;
    let anchor = |k: usize| -> Vec<Complex64> {
        let s = s0 + k as f64 * grid.dt();
        nodes.iter().map(|d| Complex64::from_polar(1.0, -d * s)).collect()
    };
    let mut phasors = anchor(0);
    let mut c1 = Vec::with_capacity(grid.len());
    let mut c2 = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        if k > 0 && k % 4096 == 0 {
            phasors = anchor(k);
        }
        let mut a1 = Complex64::new(0.0, 0.0);
        let mut a2 = Complex64::new(0.0, 0.0);
        for ((p, x1), x2) in phasors.iter().zip(&w1).zip(&w2) {
            a1 += x1 * p;
            a2 += x2 * p;
        }
        c1.push(a1);
        c2.push(a2);
        for (p, s) in phasors.iter_mut().zip(&steps) {
            *p *= s;
        }
    }
    Ok((c1, c2))
}

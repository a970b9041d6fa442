//! Linear (harmonic-oscillator) and nonlinear (two-level) detector responses
//! to Fock and coherent single-photon pulses.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{solve_closed_form_lorentzian, solve_markov, solve_volterra, AtomParams, Trajectory};
use crate::error::{ensure_finite, Error, Result};
use crate::grid::TimeGrid;
use crate::pulses::{CoherentPulseSpec, PulseSpec};
use crate::spectra::{InteractionSpectrum, SpectrumShape};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorKind {
    LinearOscillator,
    AtomBloch,
    AtomFock,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Statistics {
    Fock,
    Coherent { n_bar: f64 },
}

impl Statistics {
    pub fn n_bar(self) -> f64 {
        match self {
            Self::Fock => 1.0,
            Self::Coherent { n_bar } => n_bar,
        }
    }

    fn validate(self) -> Result<()> {
        if let Self::Coherent { n_bar } = self {
            if !(n_bar.is_finite() && n_bar >= 0.0) {
                return Err(Error::InvalidParameter {
                    name: "pulse.n_bar",
                    reason: format!("must be finite and >= 0, got {n_bar}"),
                });
            }
        }
        Ok(())
    }
}

/// Mean excitation `y(t)` of a detector on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorTrace {
    pub t0: f64,
    pub dt: f64,
    pub y: Vec<f64>,
    pub detector: DetectorKind,
    pub statistics: Statistics,
}

impl DetectorTrace {
    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn peak(&self) -> f64 {
        self.y.iter().copied().fold(0.0, f64::max)
    }

    pub fn sup_diff(&self, other: &DetectorTrace) -> f64 {
        assert_eq!(self.y.len(), other.y.len(), "traces on different grids");
        self.y.iter().zip(&other.y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Single-excitation amplitude for the given spectrum, from vacuum.
fn mean_amplitude(atom: &AtomParams, pulse: &PulseSpec, grid: &TimeGrid, spectrum: &InteractionSpectrum) -> Result<Trajectory> {
    let atom = AtomParams {
        gamma: spectrum.gamma,
        gamma_p: spectrum.gamma_p,
        c0: Complex64::new(0.0, 0.0),
        ..*atom
    };
    match spectrum.shape {
        SpectrumShape::Flat => solve_markov(&atom, Some(pulse), grid),
        SpectrumShape::Lorentzian { kappa } => solve_closed_form_lorentzian(&atom, kappa, Some(pulse), grid),
        SpectrumShape::Tabulated { .. } => solve_volterra(&atom, spectrum, Some(pulse), grid),
    }
}

/// Linear detector: the mean mode amplitude obeys the same equation as the
/// single-excitation atom amplitude, so `y = n_bar |f|^2` (with `n_bar = 1`
/// for a Fock pulse). The decay rates are taken from `spectrum`.
pub fn linear_response(
    atom: &AtomParams,
    pulse: &PulseSpec,
    statistics: Statistics,
    grid: &TimeGrid,
    spectrum: &InteractionSpectrum,
) -> Result<DetectorTrace> {
    statistics.validate()?;
    if statistics == Statistics::Fock && !pulse.is_normalizable() {
        return Err(Error::Unnormalizable);
    }
    let f = mean_amplitude(atom, pulse, grid, spectrum)?;
    let n_bar = statistics.n_bar();
    Ok(DetectorTrace {
        t0: grid.t0(),
        dt: grid.dt(),
        y: f.p.iter().map(|p| n_bar * p).collect(),
        detector: DetectorKind::LinearOscillator,
        statistics,
    })
}

/// Two-level atom excited by a Fock pulse: `y = P(t)`.
pub fn fock_atom_response(
    atom: &AtomParams,
    pulse: &PulseSpec,
    grid: &TimeGrid,
    spectrum: &InteractionSpectrum,
) -> Result<DetectorTrace> {
    if !pulse.is_normalizable() {
        return Err(Error::Unnormalizable);
    }
    let traj = mean_amplitude(atom, pulse, grid, spectrum)?;
    Ok(DetectorTrace {
        t0: grid.t0(),
        dt: grid.dt(),
        y: traj.p,
        detector: DetectorKind::AtomFock,
        statistics: Statistics::Fock,
    })
}

/// Populations and coherence `(rho_ee, rho_ge)` of the coherently driven atom.
///
/// Resonant optical Bloch equations with coupling `-(Omega/2)|e><g| + h.c.`:
/// `d rho_ee/dt = -gamma rho_ee - Im(Omega rho_ge)`,
/// `d rho_ge/dt = -gamma/2 rho_ge + (i/2) Omega^* (2 rho_ee - 1)`,
/// with `Omega(t) = 2 sqrt(gamma_p) sqrt(n_bar) u(t - t_d)`, integrated by RK4
/// from the ground state.
pub fn bloch_states(atom: &AtomParams, pulse: &CoherentPulseSpec, grid: &TimeGrid) -> Result<Vec<(f64, Complex64)>> {
    atom.validate()?;
    ensure_finite("pulse.delta0", pulse.base.delta0)?;
    if pulse.base.delta0 != 0.0 {
        return Err(Error::NonResonant {
            delta0: pulse.base.delta0,
        });
    }
    if !pulse.base.is_normalizable() {
        return Err(Error::Unnormalizable);
    }
    let base = atom.arriving(&pulse.base);
    let scale = 2.0 * atom.gamma_p.sqrt() * pulse.n_bar.sqrt();
    let omega = |t: f64| scale * base.envelope_sample(t);
    let gamma = atom.gamma;
    let rhs = |om: Complex64, ee: f64, ge: Complex64| -> (f64, Complex64) {
        let d_ee = -gamma * ee - (om * ge).im;
        let d_ge = -0.5 * gamma * ge + Complex64::new(0.0, 0.5) * om.conj() * (2.0 * ee - 1.0);
        (d_ee, d_ge)
    };
    let h = grid.dt();
    let mut ee = 0.0;
    let mut ge = Complex64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(grid.len());
    out.push((ee, ge));
    for n in 0..grid.len() - 1 {
        let t = grid.time(n);
        let (o0, o1, o2) = (omega(t), omega(t + 0.5 * h), omega(t + h));
        let (a1, b1) = rhs(o0, ee, ge);
        let (a2, b2) = rhs(o1, ee + 0.5 * h * a1, ge + 0.5 * h * b1);
        let (a3, b3) = rhs(o1, ee + 0.5 * h * a2, ge + 0.5 * h * b2);
        let (a4, b4) = rhs(o2, ee + h * a3, ge + h * b3);
        ee += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        ge += h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
        out.push((ee, ge));
    }
    Ok(out)
}

/// Two-level atom driven by a coherent pulse in the Markov regime: `y = rho_ee`.
pub fn bloch_response(atom: &AtomParams, pulse: &CoherentPulseSpec, grid: &TimeGrid) -> Result<DetectorTrace> {
    let states = bloch_states(atom, pulse, grid)?;
    Ok(DetectorTrace {
        t0: grid.t0(),
        dt: grid.dt(),
        y: states.into_iter().map(|(ee, _)| ee).collect(),
        detector: DetectorKind::AtomBloch,
        statistics: Statistics::Coherent { n_bar: pulse.n_bar },
    })
}

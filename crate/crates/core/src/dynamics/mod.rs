//! Excitation-amplitude dynamics of the driven two-level atom.
//!
//! Three independent routes solve the same integro-differential equation
//! `dC/dt = -\int_{t0}^t G(t - t') C(t') dt' + D(t)`:
//!
//! * [`solve_closed_form_lorentzian`] evaluates the two-branch inverse-Laplace
//!   solution with a cumulative trapezoid for the drive convolution;
//! * [`solve_ode_reduction`] embeds the exponential kernel as an auxiliary
//!   state and integrates with fixed-step RK4;
//! * [`solve_volterra`] discretizes the memory integral directly.
//!
//! [`solve_markov`] is the memory-less reference.

mod branches;
mod closed_form;
mod decay;
mod decomposition;
mod markov;
mod ode;
mod volterra;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::grid::TimeGrid;
use crate::pulses::{PulseShape, PulseSpec};
use crate::spectra::{InteractionSpectrum, SpectrumShape};

pub use branches::{branch_params, LorentzBranches, DEGENERACY_TOLERANCE};
pub use closed_form::solve_closed_form_lorentzian;
pub use decay::{delta_pulse_rise, spontaneous_decay, RiseEdge};
pub use decomposition::{branch_decomposition, branch_decomposition_in};
pub use markov::solve_markov;
pub use ode::{solve_ode_reduction, MAX_STIFFNESS};
pub use volterra::{solve_volterra, solve_volterra_direct, MAX_VOLTERRA_STEPS};

pub(crate) use markov::markov_with_drive;

/// Fraction `gamma_p / gamma` of the field modes carried by the pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeFraction {
    /// All emission goes back into the pulse modes.
    Ideal,
    /// Dipole-aligned polarization in three-dimensional free space.
    FreeSpace,
    /// Narrow one-dimensional waveguide.
    #[serde(rename = "waveguide_1d")]
    Waveguide1d,
}

impl ModeFraction {
    pub fn ratio(self) -> f64 {
        match self {
            Self::Ideal => 1.0,
            Self::FreeSpace => 3.0 / (8.0 * std::f64::consts::PI),
            Self::Waveguide1d => 0.5,
        }
    }
}

/// Atom parameters in the frame rotating at the transition frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomParams {
    /// Total Markov decay rate `gamma = gamma_p + gamma'`.
    pub gamma: f64,
    /// Decay rate into the pulse modes.
    pub gamma_p: f64,
    /// Propagation delay `z0 / c`, added to the pulse arrival time.
    pub t_d: f64,
    /// Initial excitation amplitude `C(t0)`.
    pub c0: Complex64,
}

impl AtomParams {
    pub fn new(gamma: f64) -> Result<Self> {
        let atom = Self {
            gamma,
            gamma_p: gamma,
            t_d: 0.0,
            c0: Complex64::new(0.0, 0.0),
        };
        atom.validate()?;
        Ok(atom)
    }

    pub fn with_gamma_p_ratio(mut self, ratio: f64) -> Result<Self> {
        self.gamma_p = ratio * self.gamma;
        self.validate()?;
        Ok(self)
    }

    pub fn with_mode_fraction(self, fraction: ModeFraction) -> Self {
        Self {
            gamma_p: fraction.ratio() * self.gamma,
            ..self
        }
    }

    pub fn with_c0(mut self, c0: Complex64) -> Result<Self> {
        self.c0 = c0;
        self.validate()?;
        Ok(self)
    }

    pub fn with_delay(mut self, t_d: f64) -> Self {
        self.t_d = t_d;
        self
    }

    pub fn gamma_p_ratio(&self) -> f64 {
        self.gamma_p / self.gamma
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("atom.gamma", self.gamma)?;
        ensure_positive("atom.gamma_p", self.gamma_p)?;
        ensure_finite("atom.t_d", self.t_d)?;
        if self.gamma_p > self.gamma * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter {
                name: "atom.gamma_p",
                reason: format!("gamma_p / gamma must lie in (0, 1], got {}", self.gamma_p_ratio()),
            });
        }
        if !(self.c0.norm() <= 1.0 + 1e-12) {
            return Err(Error::InvalidParameter {
                name: "atom.c0",
                reason: format!("|C0| must not exceed 1, got {}", self.c0.norm()),
            });
        }
        Ok(())
    }

    pub fn lorentzian(&self, kappa: f64) -> Result<InteractionSpectrum> {
        InteractionSpectrum::lorentzian(self.gamma, self.gamma_p, kappa)
    }

    pub fn flat(&self) -> Result<InteractionSpectrum> {
        InteractionSpectrum::flat(self.gamma, self.gamma_p)
    }

    /// The pulse as seen at the atom, delayed by `t_d`.
    pub(crate) fn arriving(&self, pulse: &PulseSpec) -> PulseSpec {
        pulse.with_arrival(pulse.t_a + self.t_d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverId {
    ClosedForm,
    OdeReduction,
    Volterra,
    Markov,
    SpontaneousDecay,
}

impl SolverId {
    pub fn name(self) -> &'static str {
        match self {
            Self::ClosedForm => "closed_form",
            Self::OdeReduction => "ode_reduction",
            Self::Volterra => "volterra",
            Self::Markov => "markov",
            Self::SpontaneousDecay => "spontaneous_decay",
        }
    }
}

/// Complex amplitude `C(t)` and probability `P(t) = |C(t)|^2` on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub t0: f64,
    pub dt: f64,
    pub c: Vec<Complex64>,
    pub p: Vec<f64>,
    pub solver: SolverId,
    pub params_digest: String,
    /// Set when the requested solver delegated to another one.
    pub redirected_from: Option<SolverId>,
}

impl Trajectory {
    pub(crate) fn new(grid: &TimeGrid, c: Vec<Complex64>, solver: SolverId, params: &impl Serialize) -> Self {
        debug_assert_eq!(c.len(), grid.len());
        let p = c.iter().map(|z| z.norm_sqr()).collect();
        Self {
            t0: grid.t0(),
            dt: grid.dt(),
            c,
            p,
            solver,
            params_digest: digest(params),
            redirected_from: None,
        }
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn grid(&self) -> TimeGrid {
        TimeGrid::new(self.t0, self.dt, self.c.len()).expect("trajectory grid is valid")
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn times(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.time(i))
    }

    /// Largest sampled probability and its time.
    pub fn max_p(&self) -> (f64, f64) {
        let (i, p) = self
            .p
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, p)| if p > best.1 { (i, p) } else { best });
        (p, self.time(i))
    }

    /// `sup_i |P_i - Q_i|` against another trajectory on the same grid.
    pub fn sup_diff_p(&self, other: &Trajectory) -> f64 {
        assert_eq!(self.len(), other.len(), "trajectories on different grids");
        self.p.iter().zip(&other.p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Checks `0 <= P <= 1 + tol` at every sample.
    pub fn within_probability_bound(&self, tol: f64) -> bool {
        self.p.iter().all(|&p| p >= 0.0 && p <= 1.0 + tol)
    }
}

/// 64-bit FNV-1a digest of the JSON form of `params`.
pub(crate) fn digest(params: &impl Serialize) -> String {
    let text = serde_json::to_string(params).unwrap_or_default();
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in text.bytes() {
        hash ^= u64::from(byte);
        hash = hash.wrapping_mul(0x0100_0000_01b3);
    }
    format!("{hash:016x}")
}

/// Driving term sampled on a grid, at nodes and (optionally) midpoints.
///
/// A delta pulse seen through a flat spectrum has no pointwise value; it is
/// carried as an impulse instead.
#[derive(Debug, Clone, PartialEq)]
pub struct Drive {
    nodes: Vec<Complex64>,
    mids: Vec<Complex64>,
    impulse: Option<Impulse>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Impulse {
    pub time: f64,
    pub weight: Complex64,
}

impl Drive {
    pub fn zero(grid: &TimeGrid) -> Self {
        Self {
            nodes: vec![Complex64::new(0.0, 0.0); grid.len()],
            mids: vec![Complex64::new(0.0, 0.0); grid.len() - 1],
            impulse: None,
        }
    }

    /// Samples `D` for `pulse` (already delayed to the atom) seen through `spectrum`.
    pub fn sample(spectrum: &InteractionSpectrum, pulse: &PulseSpec, grid: &TimeGrid, with_mids: bool) -> Result<Self> {
        pulse.validate()?;
        if matches!(spectrum.shape, SpectrumShape::Flat) {
            if let Some(w) = pulse.impulse_weight() {
                let mut drive = Self::zero(grid);
                drive.impulse = Some(Impulse {
                    time: pulse.t_a,
                    weight: Complex64::from(spectrum.gamma_p.sqrt() * w),
                });
                return Ok(drive);
            }
        }
        let (nodes, mids) = if matches!(spectrum.shape, SpectrumShape::Tabulated { .. }) {
            let nodes = spectrum.tabulated_drive_samples(pulse, grid.t0(), grid.dt(), grid.len())?;
            let mids = if with_mids {
                spectrum.tabulated_drive_samples(pulse, grid.t0() + 0.5 * grid.dt(), grid.dt(), grid.len() - 1)?
            } else {
                Vec::new()
            };
            (nodes, mids)
        } else {
            let nodes = grid
                .times()
                .map(|t| spectrum.driving_term(pulse, t))
                .collect::<Result<Vec<_>>>()?;
            let mids = if with_mids {
                (0..grid.len() - 1)
                    .map(|i| spectrum.driving_term(pulse, grid.time(i) + 0.5 * grid.dt()))
                    .collect::<Result<Vec<_>>>()?
            } else {
                Vec::new()
            };
            (nodes, mids)
        };
        Ok(Self {
            nodes,
            mids,
            impulse: None,
        })
    }

    pub(crate) fn sample_optional(
        spectrum: &InteractionSpectrum,
        pulse: Option<&PulseSpec>,
        grid: &TimeGrid,
        with_mids: bool,
    ) -> Result<Self> {
        match pulse {
            Some(p) => Self::sample(spectrum, p, grid, with_mids),
            None => Ok(Self::zero(grid)),
        }
    }

    /// Complex-linear rescaling of the drive.
    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            nodes: self.nodes.iter().map(|d| d * factor).collect(),
            mids: self.mids.iter().map(|d| d * factor).collect(),
            impulse: self.impulse.map(|i| Impulse {
                weight: i.weight * factor,
                ..i
            }),
        }
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn mids(&self) -> &[Complex64] {
        &self.mids
    }

    pub fn impulse(&self) -> Option<Impulse> {
        self.impulse
    }
}

/// Default simulation window for `pulse` (or free decay) with step `dt`.
///
/// The window covers the pulse support, with a lead-in of `1/gamma` before
/// pulses that switch on abruptly, plus a tail of `20 / min(gamma, kappa)`
/// so the excitation has decayed by the last sample.
pub fn default_grid(atom: &AtomParams, kappa: Option<f64>, pulse: Option<&PulseSpec>, dt: f64) -> Result<TimeGrid> {
    atom.validate()?;
    let slowest = kappa.map_or(atom.gamma, |k| k.min(atom.gamma));
    let tail = 20.0 / slowest;
    let (start, end) = match pulse {
        None => (0.0, 0.0),
        Some(p) => {
            let p = atom.arriving(p);
            let (lo, hi) = p.support();
            match p.shape {
                PulseShape::Gaussian | PulseShape::RisingExp => (lo, hi),
                PulseShape::DecayingExp | PulseShape::Delta => (lo - 1.0 / atom.gamma, hi),
            }
        }
    };
    TimeGrid::spanning(start, end + tail, dt)
}

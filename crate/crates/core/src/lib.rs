//! Single-photon absorption by a two-level atom coupled to a structured
//! reservoir, beyond the Markov approximation.
//!
//! Units: the caller picks a rate unit (usually `gamma = 1`); times are in its
//! inverse. Frequencies are detunings from the atomic transition.

pub mod analysis;
pub mod detectors;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod io;
pub mod pulses;
pub mod spectra;

pub use num_complex::Complex64;

pub use analysis::{
    find_optimum, probability_density, sweep_pmax, transduction_metrics, SweepResult, SweepSolver,
    TransductionMetrics,
};
pub use detectors::{bloch_response, linear_response, DetectorKind, DetectorTrace, Statistics};
pub use dynamics::{
    branch_params, solve_closed_form_lorentzian, solve_markov, solve_ode_reduction, solve_volterra, AtomParams,
    LorentzBranches, ModeFraction, SolverId, Trajectory,
};
pub use error::{Error, Result};
pub use grid::{FrequencyGrid, TimeGrid};
pub use pulses::{CoherentPulseSpec, PulseShape, PulseSpec};
pub use spectra::{InteractionSpectrum, MemoryKernel, SpectrumShape, TabulatedSpectrum};

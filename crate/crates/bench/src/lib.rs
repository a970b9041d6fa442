//! Shared fixtures for the benchmarks.

use transduce_core::dynamics::default_grid;
use transduce_core::{AtomParams, PulseSpec, TimeGrid};

pub fn unit_atom() -> AtomParams {
    AtomParams::new(1.0).expect("gamma = 1 is valid")
}

/// Gaussian pulse of length `tau_f` on the default window at step `dt`.
pub fn gaussian_case(kappa: f64, tau_f: f64, dt: f64) -> (AtomParams, PulseSpec, TimeGrid) {
    let atom = unit_atom();
    let pulse = PulseSpec::gaussian(tau_f).expect("positive length");
    let grid = default_grid(&atom, Some(kappa), Some(&pulse), dt).expect("valid grid");
    (atom, pulse, grid)
}

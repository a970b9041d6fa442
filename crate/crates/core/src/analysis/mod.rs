//! Transduction metrics and spectral-matching sweeps.

mod fit;
mod sweep;

use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::grid::trapezoid;

pub use fit::{fit_exponential_decay, fit_inverse, ExpFit, InverseFit};
pub use sweep::{find_optimum, sweep_pmax, sweep_pmax_with, CellError, Optimum, SweepOptions, SweepResult, SweepSolver};

/// Secondary peaks above this fraction of the maximum make the metrics ambiguous.
pub const AMBIGUITY_FRACTION: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransductionMetrics {
    pub p_max: f64,
    pub t_peak: f64,
    pub rise_10_90: f64,
    pub fall_90_10: f64,
    /// `(rise_10_90 + fall_90_10) / ln 9`, an e-folding width of the absorption window.
    pub window: f64,
    /// `1/kappa + 1/gamma`.
    pub window_bound: f64,
    /// Normalized probability density `P(t) / \int P dt` on the trajectory grid.
    pub density: Vec<f64>,
    pub ambiguous: bool,
}

/// `P(t) / \int P dt` by trapezoid.
pub fn probability_density(traj: &Trajectory) -> Result<Vec<f64>> {
    let total = trapezoid(&traj.p, traj.dt);
    if !(total > 0.0) {
        return Err(Error::NoAbsorption);
    }
    Ok(traj.p.iter().map(|p| p / total).collect())
}

/// Sampled maximum with parabolic refinement.
///
/// The refinement is kept only when the parabola through the three samples
/// around the maximum also predicts the samples two steps away to within a
/// few percent of the peak, so kinks and jumps keep the raw sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub index: usize,
    pub value: f64,
    pub time: f64,
}

pub fn locate_peak(p: &[f64], t0: f64, dt: f64) -> Peak {
    let index = p
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v > p[best] { i } else { best });
    let raw = Peak {
        index,
        value: p[index],
        time: t0 + index as f64 * dt,
    };
    if index < 2 || index + 2 >= p.len() {
        return raw;
    }
    let (a, b, c) = (p[index - 1], p[index], p[index + 1]);
    let curvature = a - 2.0 * b + c;
    if !(curvature < 0.0) {
        return raw;
    }
    let slope = 0.5 * (c - a);
    let offset = -slope / curvature;
    let at = |x: f64| b + slope * x + 0.5 * curvature * x * x;
    let tol = 0.02 * b;
    if (at(-2.0) - p[index - 2]).abs() > tol || (at(2.0) - p[index + 2]).abs() > tol {
        return raw;
    }
    Peak {
        index,
        value: at(offset),
        time: t0 + (index as f64 + offset) * dt,
    }
}

/// Time at which `p` crosses `level` between samples `i` and `i + 1`.
fn crossing(p: &[f64], i: usize, level: f64, t0: f64, dt: f64) -> f64 {
    let (a, b) = (p[i], p[i + 1]);
    let frac = if b == a { 0.0 } else { (level - a) / (b - a) };
    t0 + (i as f64 + frac) * dt
}

/// Last upward crossing of `level` in a cell starting before `end`.
fn crossing_before(p: &[f64], end: usize, level: f64, t0: f64, dt: f64) -> Option<f64> {
    (0..end).rev().find(|&i| p[i] < level && p[i + 1] >= level).map(|i| crossing(p, i, level, t0, dt))
}

/// First downward crossing of `level` at or after `start`.
fn crossing_after(p: &[f64], start: usize, level: f64, t0: f64, dt: f64) -> Option<f64> {
    (start..p.len() - 1).find(|&i| p[i] >= level && p[i + 1] < level).map(|i| crossing(p, i, level, t0, dt))
}

/// Whether another local maximum above [`AMBIGUITY_FRACTION`] of the peak is
/// separated from it by a dip below 90% of the smaller of the two.
fn has_rival_peak(p: &[f64], peak: usize) -> bool {
    let threshold = AMBIGUITY_FRACTION * p[peak];
    let is_local_max = |i: usize| {
        (i == 0 || p[i] > p[i - 1]) && (i + 1 == p.len() || p[i] >= p[i + 1])
    };
    (0..p.len()).filter(|&i| i != peak && p[i] > threshold && is_local_max(i)).any(|i| {
        let (lo, hi) = if i < peak { (i, peak) } else { (peak, i) };
        let dip = p[lo..=hi].iter().copied().fold(f64::INFINITY, f64::min);
        dip < 0.9 * p[i].min(p[peak])
    })
}

/// Peak, 10-90% rise, 90-10% fall and window of the excitation probability.
///
/// The rise is measured backwards from the peak (last upward crossings of 90%
/// and then 10% of `p_max`), the fall forwards from it, with linear
/// interpolation between samples.
pub fn transduction_metrics(traj: &Trajectory, kappa: f64, gamma: f64) -> Result<TransductionMetrics> {
    let density = probability_density(traj)?;
    let p = &traj.p;
    let (t0, dt) = (traj.t0, traj.dt);
    let peak = locate_peak(p, t0, dt);
    let hi = 0.9 * peak.value;
    let lo = 0.1 * peak.value;
    let (t10_up, t90_up) = match (0..peak.index).rev().find(|&i| p[i] < hi && p[i + 1] >= hi) {
        Some(i) => (crossing_before(p, i + 1, lo, t0, dt).unwrap_or(t0), crossing(p, i, hi, t0, dt)),
        None => (t0, t0),
    };
    let t90_down = crossing_after(p, peak.index, hi, t0, dt).ok_or(Error::IncompleteTrajectory { level: 0.9 })?;
    let first_below_hi = ((t90_down - t0) / dt).floor() as usize;
    let t10_down = crossing_after(p, first_below_hi, lo, t0, dt).ok_or(Error::IncompleteTrajectory { level: 0.1 })?;
    let rise = t90_up - t10_up;
    let fall = t10_down - t90_down;
    Ok(TransductionMetrics {
        p_max: peak.value,
        t_peak: peak.time,
        rise_10_90: rise,
        fall_90_10: fall,
        window: (rise + fall) / 9f64.ln(),
        window_bound: 1.0 / kappa + 1.0 / gamma,
        density,
        ambiguous: has_rival_peak(p, peak.index),
    })
}

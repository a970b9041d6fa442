//! Uniform time and detuning grids.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_positive, Error, Result};

/// Uniform time grid `t_i = t0 + i * dt`, `i = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t0: f64,
    dt: f64,
    len: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, dt: f64, len: usize) -> Result<Self> {
        ensure_finite("grid.t0", t0)?;
        ensure_positive("grid.dt", dt)?;
        if len < 2 {
            return Err(Error::InvalidParameter {
                name: "grid.len",
                reason: format!("need at least 2 samples, got {len}"),
            });
        }
        Ok(Self { t0, dt, len })
    }

    /// Grid covering `[t0, t_max]` with step `dt`; the last sample is the
    /// first node at or beyond `t_max`.
    pub fn spanning(t0: f64, t_max: f64, dt: f64) -> Result<Self> {
        ensure_finite("grid.t0", t0)?;
        ensure_finite("grid.t_max", t_max)?;
        ensure_positive("grid.dt", dt)?;
        if t_max <= t0 {
            return Err(Error::InvalidParameter {
                name: "grid.t_max",
                reason: format!("must exceed t0 = {t0}, got {t_max}"),
            });
        }
        let steps = ((t_max - t0) / dt - 1e-9).ceil().max(1.0) as usize;
        Self::new(t0, dt, steps + 1)
    }

    /// Rebuilds a grid from explicit sample times, rejecting non-uniform spacing.
    pub fn from_times(times: &[f64]) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidParameter {
                name: "grid.len",
                reason: format!("need at least 2 samples, got {}", times.len()),
            });
        }
        let t0 = times[0];
        let dt = (times[times.len() - 1] - t0) / (times.len() - 1) as f64;
        let tol = 1e-9 * dt.abs().max(f64::MIN_POSITIVE) + 1e-12 * t0.abs();
        for (i, &t) in times.iter().enumerate() {
            let deviation = (t - (t0 + i as f64 * dt)).abs();
            if deviation > tol {
                return Err(Error::NonUniformGrid { index: i, deviation });
            }
        }
        Self::new(t0, dt, times.len())
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.len - 1)
    }

    #[inline]
    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn times(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.len).map(move |i| self.time(i))
    }
}

/// Uniform detuning grid on `[-half_width, half_width]` used for
/// frequency-domain quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    half_width: f64,
    points: usize,
}

impl FrequencyGrid {
    pub const DEFAULT_POINTS: usize = 20_001;

    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        ensure_positive("window.half_width", half_width)?;
        if points < 3 || points.is_multiple_of(2) {
            return Err(Error::InvalidParameter {
                name: "window.points",
                reason: format!("need an odd count >= 3, got {points}"),
            });
        }
        Ok(Self { half_width, points })
    }

    /// Truncation window `W = 50 max(kappa, 1/tau_f)` with the default point count.
    pub fn truncation(kappa: f64, tau_f: f64) -> Result<Self> {
        let scale = match (kappa > 0.0, tau_f > 0.0) {
            (true, true) => kappa.max(1.0 / tau_f),
            (true, false) => kappa,
            (false, true) => 1.0 / tau_f,
            (false, false) => {
                return Err(Error::InvalidParameter {
                    name: "window",
                    reason: "need kappa or tau_f to size the window".into(),
                })
            }
        };
        Self::new(50.0 * scale, Self::DEFAULT_POINTS)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.step()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.points).map(move |i| self.node(i))
    }

    /// Trapezoid weight of node `i`.
    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.points {
            0.5 * self.step()
        } else {
            self.step()
        }
    }
}

/// Trapezoid integral of uniformly sampled values.
pub fn trapezoid(values: &[f64], step: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, inner @ .., last] => step * (0.5 * (first + last) + inner.iter().sum::<f64>()),
    }
}

/// `n` logarithmically spaced values from `lo` to `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
        }
    }
}

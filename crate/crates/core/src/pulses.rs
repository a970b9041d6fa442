//! Single-photon pulse family.
//!
//! All frequency arguments are detunings `delta = omega - omega_d` from the
//! atomic transition, and all envelopes are slowly varying amplitudes in the
//! frame rotating at `omega_d`. With the transform convention
//! `u(t) = (2 pi)^{-1/2} \int xi(delta) e^{-i delta t} d delta` every
//! finite-length shape is unit-normalized in both domains.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::grid::FrequencyGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseShape {
    Gaussian,
    DecayingExp,
    RisingExp,
    Delta,
}

impl PulseShape {
    pub const FINITE: [PulseShape; 3] = [Self::Gaussian, Self::DecayingExp, Self::RisingExp];

    pub fn name(self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::DecayingExp => "decaying_exp",
            Self::RisingExp => "rising_exp",
            Self::Delta => "delta",
        }
    }
}

impl std::str::FromStr for PulseShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Self::Gaussian),
            "decaying_exp" => Ok(Self::DecayingExp),
            "rising_exp" => Ok(Self::RisingExp),
            "delta" => Ok(Self::Delta),
            other => Err(Error::InvalidParameter {
                name: "pulse.shape",
                reason: format!("unknown shape `{other}`"),
            }),
        }
    }
}

/// A single-photon Fock-state pulse.
///
/// `tau_f` is the pulse length (ignored for [`PulseShape::Delta`]),
/// `delta0` the carrier detuning `omega_0 - omega_d`, `t_a` the arrival time
/// at the atom and `xi0` the constant spectral amplitude of the delta pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub shape: PulseShape,
    pub tau_f: f64,
    pub delta0: f64,
    pub t_a: f64,
    pub xi0: f64,
}

impl PulseSpec {
    fn finite(shape: PulseShape, tau_f: f64) -> Result<Self> {
        ensure_positive("pulse.tau_f", tau_f)?;
        Ok(Self {
            shape,
            tau_f,
            delta0: 0.0,
            t_a: 0.0,
            xi0: 0.0,
        })
    }

    pub fn gaussian(tau_f: f64) -> Result<Self> {
        Self::finite(PulseShape::Gaussian, tau_f)
    }

    pub fn decaying_exp(tau_f: f64) -> Result<Self> {
        Self::finite(PulseShape::DecayingExp, tau_f)
    }

    pub fn rising_exp(tau_f: f64) -> Result<Self> {
        Self::finite(PulseShape::RisingExp, tau_f)
    }

    pub fn delta(xi0: f64) -> Result<Self> {
        ensure_finite("pulse.xi0", xi0)?;
        Ok(Self {
            shape: PulseShape::Delta,
            tau_f: 0.0,
            delta0: 0.0,
            t_a: 0.0,
            xi0,
        })
    }

    /// Builds a pulse of the given shape; `tau_f` doubles as `xi0` for delta pulses.
    pub fn with_shape(shape: PulseShape, tau_f: f64) -> Result<Self> {
        match shape {
            PulseShape::Delta => Self::delta(tau_f),
            _ => Self::finite(shape, tau_f),
        }
    }

    pub fn with_detuning(mut self, delta0: f64) -> Self {
        self.delta0 = delta0;
        self
    }

    pub fn with_arrival(mut self, t_a: f64) -> Self {
        self.t_a = t_a;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("pulse.delta0", self.delta0)?;
        ensure_finite("pulse.t_a", self.t_a)?;
        match self.shape {
            PulseShape::Delta => ensure_finite("pulse.xi0", self.xi0),
            _ => ensure_positive("pulse.tau_f", self.tau_f),
        }
    }

    pub fn is_normalizable(&self) -> bool {
        self.shape != PulseShape::Delta
    }

    /// Spectral amplitude `xi(omega_d + delta)`.
    pub fn spectral_amplitude(&self, delta: f64) -> Complex64 {
        let tau = self.tau_f;
        let x = delta - self.delta0;
        match self.shape {
            PulseShape::Gaussian => {
                Complex64::from((2.0 * tau * tau / PI).powf(0.25) * (-tau * tau * x * x).exp())
            }
            PulseShape::DecayingExp => {
                (2.0 * tau / PI).sqrt() / Complex64::new(1.0, -2.0 * x * tau)
            }
            PulseShape::RisingExp => (2.0 * tau / PI).sqrt() / Complex64::new(1.0, 2.0 * x * tau),
            PulseShape::Delta => Complex64::from(self.xi0),
        }
    }

    /// Slowly varying time envelope `u(t - t_a)`, unit-normalized.
    pub fn envelope(&self, t: f64) -> Result<Complex64> {
        let s = t - self.t_a;
        let real = match self.shape {
            PulseShape::Delta => return Err(Error::Unnormalizable),
            PulseShape::Gaussian => self.base_envelope(s),
            PulseShape::DecayingExp if s < 0.0 => 0.0,
            PulseShape::RisingExp if s > 0.0 => 0.0,
            _ => self.base_envelope(s),
        };
        Ok(self.carrier(s) * real)
    }

    /// Envelope sampled for quadrature: at the jump of an exponential pulse
    /// the mean of the one-sided limits is returned, which keeps trapezoid
    /// sums second-order accurate.
    pub(crate) fn envelope_sample(&self, t: f64) -> Complex64 {
        let s = t - self.t_a;
        match self.shape {
            PulseShape::Delta => Complex64::new(0.0, 0.0),
            PulseShape::Gaussian => self.carrier(s) * self.base_envelope(s),
            PulseShape::DecayingExp | PulseShape::RisingExp => {
                let inside = match self.shape {
                    PulseShape::DecayingExp => s > 0.0,
                    _ => s < 0.0,
                };
                if self.at_jump(t) {
                    self.carrier(0.0) * 0.5 * self.base_envelope(0.0)
                } else if inside {
                    self.carrier(s) * self.base_envelope(s)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
        }
    }

    /// Whether `t` coincides with the arrival time up to grid rounding.
    pub(crate) fn at_jump(&self, t: f64) -> bool {
        let scale = if self.tau_f > 0.0 { self.tau_f } else { 1.0 };
        (t - self.t_a).abs() <= 1e-9 * scale.min(1.0)
    }

    /// Real envelope profile at `s = t - t_a`, ignoring causality cut-offs.
    fn base_envelope(&self, s: f64) -> f64 {
        let tau = self.tau_f;
        match self.shape {
            PulseShape::Gaussian => {
                (1.0 / (2.0 * PI * tau * tau)).powf(0.25) * (-s * s / (4.0 * tau * tau)).exp()
            }
            PulseShape::DecayingExp => (-s / (2.0 * tau)).exp() / tau.sqrt(),
            PulseShape::RisingExp => (s / (2.0 * tau)).exp() / tau.sqrt(),
            PulseShape::Delta => 0.0,
        }
    }

    fn carrier(&self, s: f64) -> Complex64 {
        if self.delta0 == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::from_polar(1.0, -self.delta0 * s)
        }
    }

    /// Time interval outside which the envelope amplitude is below ~1e-6
    /// of its peak.
    pub fn support(&self) -> (f64, f64) {
        let tau = self.tau_f;
        let ta = self.t_a;
        match self.shape {
            PulseShape::Gaussian => (ta - 8.0 * tau, ta + 8.0 * tau),
            PulseShape::DecayingExp => (ta, ta + 30.0 * tau),
            PulseShape::RisingExp => (ta - 30.0 * tau, ta),
            PulseShape::Delta => (ta, ta),
        }
    }

    /// Weight `w` of the time-domain impulse `u(t) = w delta(t - t_a)` of a
    /// delta pulse, consistent with a constant spectrum `xi0`.
    pub fn impulse_weight(&self) -> Option<f64> {
        (self.shape == PulseShape::Delta).then(|| (2.0 * PI).sqrt() * self.xi0)
    }
}

/// A single-photon coherent-state pulse: the base amplitude scaled by `sqrt(n_bar)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentPulseSpec {
    pub base: PulseSpec,
    pub n_bar: f64,
}

impl CoherentPulseSpec {
    pub fn new(base: PulseSpec, n_bar: f64) -> Result<Self> {
        base.validate()?;
        if !(n_bar.is_finite() && n_bar >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "pulse.n_bar",
                reason: format!("must be finite and >= 0, got {n_bar}"),
            });
        }
        Ok(Self { base, n_bar })
    }

    pub fn amplitude_scale(&self) -> f64 {
        self.n_bar.sqrt()
    }

    pub fn spectral_amplitude(&self, delta: f64) -> Complex64 {
        self.base.spectral_amplitude(delta) * self.amplitude_scale()
    }

    pub fn envelope(&self, t: f64) -> Result<Complex64> {
        Ok(self.base.envelope(t)? * self.amplitude_scale())
    }
}

/// `|\int |xi|^2 d delta - 1|` by trapezoid quadrature over `window`.
///
/// The window must span at least `40 / tau_f` on each side of the carrier.
pub fn validate_normalization(spec: &PulseSpec, window: &FrequencyGrid) -> Result<f64> {
    spec.validate()?;
    if !spec.is_normalizable() {
        return Err(Error::Unnormalizable);
    }
    let required = 40.0 / spec.tau_f;
    let reach = window.half_width() - spec.delta0.abs();
    if reach < required {
        return Err(Error::WindowTooNarrow {
            half_width: window.half_width(),
            required: required + spec.delta0.abs(),
        });
    }
    let norm: f64 = window
        .nodes()
        .enumerate()
        .map(|(i, d)| window.weight(i) * spec.spectral_amplitude(d).norm_sqr())
        .sum();
    Ok((norm - 1.0).abs())
}

//! Atom-field interaction spectra, memory kernels and the pulse driving term.
//!
//! The Lorentzian spectrum is normalized so that `2 pi |g_tot(0)|^2 = gamma`,
//! reducing to the flat (Markov) spectrum as `kappa -> infinity`. The pulse
//! part of the spectrum is the fraction `gamma_p / gamma` of the total at
//! every detuning.

use std::f64::consts::PI;
use std::io::BufRead;
use std::path::Path;

use errorfunctions::ComplexErrorFunctions;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::grid::FrequencyGrid;
use crate::pulses::{PulseShape, PulseSpec};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Total coupling density `|g_tot(delta)|^2` sampled on a sorted detuning grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedSpectrum {
    delta: Vec<f64>,
    g2: Vec<f64>,
}

impl TabulatedSpectrum {
    pub fn new(delta: Vec<f64>, g2: Vec<f64>) -> Result<Self> {
        if delta.len() != g2.len() {
            return Err(Error::Table(format!(
                "column lengths differ ({} vs {})",
                delta.len(),
                g2.len()
            )));
        }
        if delta.len() < 2 {
            return Err(Error::Table("need at least two rows".into()));
        }
        if let Some(w) = delta.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::Table(format!(
                "detunings must be strictly increasing (row {})",
                w + 2
            )));
        }
        if let Some(i) = g2.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Table(format!("g2 must be finite and >= 0 (row {})", i + 1)));
        }
        if delta.iter().any(|d| !d.is_finite()) {
            return Err(Error::Table("detunings must be finite".into()));
        }
        Ok(Self { delta, g2 })
    }

    /// Samples an analytic Lorentzian `|g_tot|^2` on `points` uniform nodes
    /// spanning `[-half_width, half_width]`.
    pub fn sample_lorentzian(gamma: f64, kappa: f64, half_width: f64, points: usize) -> Result<Self> {
        let window = FrequencyGrid::new(half_width, points)?;
        let delta: Vec<f64> = window.nodes().collect();
        let g2 = delta.iter().map(|&d| lorentzian_density(gamma, kappa, d)).collect();
        Self::new(delta, g2)
    }

    /// Reads a two-column `delta,g2` CSV with a header row.
    pub fn from_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut delta = Vec::new();
        let mut g2 = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::Table(e.to_string()))?;
            let line = line.trim();
            if lineno == 0 || line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split(',').map(str::trim);
            let parse = |c: Option<&str>| -> Result<f64> {
                c.ok_or_else(|| Error::Table(format!("line {}: expected 2 columns", lineno + 1)))?
                    .parse::<f64>()
                    .map_err(|e| Error::Table(format!("line {}: {e}", lineno + 1)))
            };
            delta.push(parse(cols.next())?);
            g2.push(parse(cols.next())?);
            if cols.next().is_some() {
                return Err(Error::Table(format!("line {}: expected 2 columns", lineno + 1)));
            }
        }
        Self::new(delta, g2)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())
            .map_err(|e| Error::Table(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_csv(std::io::BufReader::new(file))
    }

    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    pub fn g2(&self) -> &[f64] {
        &self.g2
    }

    pub fn range(&self) -> (f64, f64) {
        (self.delta[0], self.delta[self.delta.len() - 1])
    }

    /// Linear interpolation of `g2` at `delta`.
    pub fn interpolate(&self, delta: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(delta >= lo && delta <= hi) {
            return Err(Error::OutsideTable { delta, lo, hi });
        }
        let j = self.delta.partition_point(|&d| d <= delta).clamp(1, self.delta.len() - 1);
        let (d0, d1) = (self.delta[j - 1], self.delta[j]);
        let w = (delta - d0) / (d1 - d0);
        Ok(self.g2[j - 1] * (1.0 - w) + self.g2[j] * w)
    }

    /// Trapezoid weights of the (possibly non-uniform) nodes.
    fn weights(&self) -> Vec<f64> {
        let n = self.delta.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.delta[i] - self.delta[i - 1] } else { 0.0 };
                let right = if i + 1 < n { self.delta[i + 1] - self.delta[i] } else { 0.0 };
                0.5 * (left + right)
            })
            .collect()
    }

    /// `\int g2(delta) e^{-i delta t} d delta` by trapezoid on the table nodes.
    pub fn fourier(&self, t: f64) -> Complex64 {
        self.weights()
            .iter()
            .zip(&self.delta)
            .zip(&self.g2)
            .map(|((w, d), g)| Complex64::from_polar(w * g, -d * t))
            .sum()
    }

    /// Fourier samples at `t = k dt`, `k = 0..n`, via phasor recursion.
    pub fn fourier_samples(&self, dt: f64, n: usize) -> Vec<Complex64> {
        let weighted: Vec<f64> = self.weights().iter().zip(&self.g2).map(|(w, g)| w * g).collect();
        let steps: Vec<Complex64> = self.delta.iter().map(|d| Complex64::from_polar(1.0, -d * dt)).collect();
        let mut phasors = vec![Complex64::new(1.0, 0.0); self.delta.len()];
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            if k > 0 && k % 4096 == 0 {
                // re-anchor against accumulated rounding
                for (p, d) in phasors.iter_mut().zip(&self.delta) {
                    *p = Complex64::from_polar(1.0, -d * dt * k as f64);
                }
            }
            out.push(weighted.iter().zip(&phasors).map(|(w, p)| p * *w).sum());
            for (p, s) in phasors.iter_mut().zip(&steps) {
                *p *= s;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumShape {
    Lorentzian { kappa: f64 },
    Flat,
    Tabulated { table: TabulatedSpectrum },
}

/// Interaction spectrum with total Markov rate `gamma = gamma_p + gamma'`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionSpectrum {
    pub shape: SpectrumShape,
    pub gamma: f64,
    pub gamma_p: f64,
}

/// Value of the memory kernel at a time: either a number or the Markov
/// marker `G(t) = weight * delta(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelValue {
    Value(Complex64),
    Markov { weight: f64 },
}

/// Memory kernel `G(t) = \int |g_tot(delta)|^2 e^{-i delta t} d delta`.
#[derive(Debug, Clone, PartialEq)]
pub enum MemoryKernel {
    /// `weight * delta(t)`; memory-less.
    Dirac { weight: f64 },
    /// `amplitude * exp(-rate |t|)`.
    Exponential { amplitude: f64, rate: f64 },
    /// Trapezoid Fourier transform of a tabulated spectrum.
    Numerical(TabulatedSpectrum),
}

impl MemoryKernel {
    pub fn is_analytic(&self) -> bool {
        !matches!(self, Self::Numerical(_))
    }

    /// Pointwise value; `None` for the Dirac kernel.
    pub fn eval(&self, t: f64) -> Option<Complex64> {
        match self {
            Self::Dirac { .. } => None,
            Self::Exponential { amplitude, rate } => Some(Complex64::from(amplitude * (-rate * t.abs()).exp())),
            Self::Numerical(table) => Some(table.fourier(t)),
        }
    }

    /// Samples at `t = k dt` for `k = 0..n`; `None` for the Dirac kernel.
    pub fn samples(&self, dt: f64, n: usize) -> Option<Vec<Complex64>> {
        match self {
            Self::Dirac { .. } => None,
            Self::Exponential { amplitude, rate } => Some(
                (0..n)
                    .map(|k| Complex64::from(amplitude * (-rate * dt * k as f64).exp()))
                    .collect(),
            ),
            Self::Numerical(table) => Some(table.fourier_samples(dt, n)),
        }
    }
}

fn lorentzian_density(gamma: f64, kappa: f64, delta: f64) -> f64 {
    let x = delta / kappa;
    gamma / (2.0 * PI) / (x * x + 1.0)
}

impl InteractionSpectrum {
    pub fn lorentzian(gamma: f64, gamma_p: f64, kappa: f64) -> Result<Self> {
        let s = Self {
            shape: SpectrumShape::Lorentzian { kappa },
            gamma,
            gamma_p,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn flat(gamma: f64, gamma_p: f64) -> Result<Self> {
        let s = Self {
            shape: SpectrumShape::Flat,
            gamma,
            gamma_p,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn tabulated(table: TabulatedSpectrum, gamma: f64, gamma_p: f64) -> Result<Self> {
        let s = Self {
            shape: SpectrumShape::Tabulated { table },
            gamma,
            gamma_p,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("atom.gamma", self.gamma)?;
        ensure_positive("atom.gamma_p", self.gamma_p)?;
        if self.gamma_p > self.gamma * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter {
                name: "atom.gamma_p",
                reason: format!("must not exceed gamma = {}, got {}", self.gamma, self.gamma_p),
            });
        }
        if let SpectrumShape::Lorentzian { kappa } = self.shape {
            ensure_positive("spectrum.kappa", kappa)?;
        }
        Ok(())
    }

    pub fn kappa(&self) -> Option<f64> {
        match self.shape {
            SpectrumShape::Lorentzian { kappa } => Some(kappa),
            _ => None,
        }
    }

    fn pulse_fraction(&self) -> f64 {
        self.gamma_p / self.gamma
    }

    /// Total coupling density `|g_tot(delta)|^2`.
    pub fn total_density(&self, delta: f64) -> Result<f64> {
        match &self.shape {
            SpectrumShape::Lorentzian { kappa } => Ok(lorentzian_density(self.gamma, *kappa, delta)),
            SpectrumShape::Flat => Ok(self.gamma / (2.0 * PI)),
            SpectrumShape::Tabulated { table } => table.interpolate(delta),
        }
    }

    /// Pulse coupling amplitude `g(omega_d + delta)`.
    pub fn coupling_amplitude(&self, delta: f64) -> Result<Complex64> {
        let scale = (self.gamma_p / (2.0 * PI)).sqrt();
        match &self.shape {
            SpectrumShape::Lorentzian { kappa } => Ok(scale / Complex64::new(delta / kappa, 1.0)),
            SpectrumShape::Flat => Ok(Complex64::from(scale)),
            SpectrumShape::Tabulated { table } => {
                Ok(Complex64::from((self.pulse_fraction() * table.interpolate(delta)?).sqrt()))
            }
        }
    }

    pub fn kernel(&self) -> MemoryKernel {
        match &self.shape {
            SpectrumShape::Lorentzian { kappa } => MemoryKernel::Exponential {
                amplitude: 0.5 * self.gamma * kappa,
                rate: *kappa,
            },
            SpectrumShape::Flat => MemoryKernel::Dirac { weight: self.gamma },
            SpectrumShape::Tabulated { table } => MemoryKernel::Numerical(table.clone()),
        }
    }

    pub fn memory_kernel(&self, t: f64) -> KernelValue {
        match self.kernel() {
            MemoryKernel::Dirac { weight } => KernelValue::Markov { weight },
            k => KernelValue::Value(k.eval(t).expect("non-Dirac kernel")),
        }
    }

    /// Driving term `D(t) = \int g(delta) xi(delta) e^{-i delta (t - t_a)} d delta`.
    ///
    /// Lorentzian and flat spectra use exact time-domain forms; tabulated
    /// spectra are integrated by trapezoid on the table nodes. At the jump of
    /// a discontinuous drive the mean of the one-sided limits is returned.
    pub fn driving_term(&self, pulse: &PulseSpec, t: f64) -> Result<Complex64> {
        pulse.validate()?;
        match &self.shape {
            SpectrumShape::Flat => match pulse.impulse_weight() {
                Some(w) => Err(Error::ImpulsiveDrive {
                    weight: self.gamma_p.sqrt() * w,
                }),
                None => Ok(self.gamma_p.sqrt() * pulse.envelope_sample(t)),
            },
            SpectrumShape::Lorentzian { kappa } => Ok(lorentzian_drive(self.gamma_p, *kappa, pulse, t)),
            SpectrumShape::Tabulated { table } => {
                if pulse.shape == PulseShape::Delta {
                    return Err(Error::DeltaWithTabulated);
                }
                let coupling = self.tabulated_coupling(table);
                let weights = table.weights();
                let s = t - pulse.t_a;
                Ok(table
                    .delta
                    .iter()
                    .zip(&coupling)
                    .zip(&weights)
                    .map(|((&d, &g), &w)| pulse.spectral_amplitude(d) * Complex64::from_polar(w * g, -d * s))
                    .sum())
            }
        }
    }

    fn tabulated_coupling(&self, table: &TabulatedSpectrum) -> Vec<f64> {
        let f = self.pulse_fraction();
        table.g2.iter().map(|g| (f * g).sqrt()).collect()
    }

    /// `D(t)` by trapezoid quadrature of the coupling and pulse spectra over
    /// `window`, for any spectrum.
    pub fn driving_term_quadrature(&self, pulse: &PulseSpec, t: f64, window: &FrequencyGrid) -> Result<Complex64> {
        pulse.validate()?;
        let s = t - pulse.t_a;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, d) in window.nodes().enumerate() {
            let g = self.coupling_amplitude(d)?;
            acc += g * pulse.spectral_amplitude(d) * Complex64::from_polar(window.weight(i), -d * s);
        }
        Ok(acc)
    }

    /// Samples `D` at `t0 + k dt` for `k = 0..n` (tabulated spectra only),
    /// using phasor recursion instead of one exponential per node and time.
    pub(crate) fn tabulated_drive_samples(&self, pulse: &PulseSpec, t0: f64, dt: f64, n: usize) -> Result<Vec<Complex64>> {
        let SpectrumShape::Tabulated { table } = &self.shape else {
            return Err(Error::Table("not a tabulated spectrum".into()));
        };
        if pulse.shape == PulseShape::Delta {
            return Err(Error::DeltaWithTabulated);
        }
        let weighted: Vec<Complex64> = table
            .delta
            .iter()
            .zip(self.tabulated_coupling(table))
            .zip(table.weights())
            .map(|((&d, g), w)| pulse.spectral_amplitude(d) * (g * w))
            .collect();
        let steps: Vec<Complex64> = table.delta.iter().map(|d| Complex64::from_polar(1.0, -d * dt)).collect();
        let s0 = t0 - pulse.t_a;
        let anchor = |k: usize| -> Vec<Complex64> {
            table
                .delta
                .iter()
                .map(|d| Complex64::from_polar(1.0, -d * (s0 + dt * k as f64)))
                .collect()
        };
        let mut phasors = anchor(0);
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            if k > 0 && k % 4096 == 0 {
                phasors = anchor(k);
            }
            out.push(weighted.iter().zip(&phasors).map(|(w, p)| w * p).sum());
            for (p, s) in phasors.iter_mut().zip(&steps) {
                *p *= s;
            }
        }
        Ok(out)
    }
}

/// `(e^z - 1) / z`, accurate for small `|z|`.
fn phi1(z: Complex64) -> Complex64 {
    if z.norm() < 1e-3 {
        Complex64::new(1.0, 0.0) + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0)))
    } else {
        (z.exp() - 1.0) / z
    }
}

/// Exact drive for the complex Lorentzian coupling `sqrt(gamma_p/2pi) / (delta/kappa + i)`:
/// `D(t) = -i sqrt(gamma_p) kappa \int_0^inf e^{-kappa s} u(t - s) ds`.
fn lorentzian_drive(gamma_p: f64, kappa: f64, pulse: &PulseSpec, t: f64) -> Complex64 {
    let s = t - pulse.t_a;
    let prefactor = -I * gamma_p.sqrt() * kappa;
    if let Some(w) = pulse.impulse_weight() {
        return if pulse.at_jump(t) {
            prefactor * (0.5 * w)
        } else if s > 0.0 {
            prefactor * (w * (-kappa * s).exp())
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    let tau = pulse.tau_f;
    // complex decay rate once the carrier phase is factored out
    let k = Complex64::new(kappa, -pulse.delta0);
    let carrier = Complex64::from_polar(1.0, -pulse.delta0 * s);
    let amp = 1.0 / tau.sqrt();
    let b = 0.5 / tau;
    let integral = match pulse.shape {
        PulseShape::Gaussian => {
            let a = (1.0 / (2.0 * PI * tau * tau)).powf(0.25);
            let z = k * tau - s / (2.0 * tau);
            let g = (-s * s / (4.0 * tau * tau)).exp();
            let core = if z.re >= 0.0 {
                g * z.erfcx()
            } else {
                // erfcx(z) = 2 e^{z^2} - erfcx(-z) keeps both terms bounded
                2.0 * (k * k * tau * tau - k * s).exp() - g * (-z).erfcx()
            };
            a * tau * PI.sqrt() * core
        }
        PulseShape::DecayingExp => {
            if s <= 0.0 {
                Complex64::new(0.0, 0.0)
            } else if k.re >= b {
                amp * (-b * s).exp() * s * phi1(-(k - b) * s)
            } else {
                amp * (-k * s).exp() * s * phi1((k - b) * s)
            }
        }
        PulseShape::RisingExp => {
            if s <= 0.0 {
                amp * (b * s).exp() / (k + b)
            } else {
                amp * (-k * s).exp() / (k + b)
            }
        }
        PulseShape::Delta => unreachable!("handled above"),
    };
    prefactor * carrier * integral
}

#[cfg(test)]
mod tests {
    use super::*;

    const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

    #[test]
    fn coupling_amplitude_examples() {
        let s = InteractionSpectrum::lorentzian(1.0, 1.0, 10.0).unwrap();
        let g0 = s.coupling_amplitude(0.0).unwrap();
        assert!((g0 - Complex64::new(0.0, -INV_SQRT_2PI)).norm() < 1e-15);
        let half = s.coupling_amplitude(10.0).unwrap().norm_sqr();
        assert!((half - 0.5 * g0.norm_sqr()).abs() < 1e-15);

        let flat = InteractionSpectrum::flat(1.0, 1.0).unwrap();
        for d in [-100.0, 0.0, 3.0] {
            assert!((flat.coupling_amplitude(d).unwrap().re - INV_SQRT_2PI).abs() < 1e-15);
        }
    }

    #[test]
    fn lorentzian_density_matches_coupling_when_gamma_p_is_gamma() {
        let s = InteractionSpectrum::lorentzian(2.0, 2.0, 3.0).unwrap();
        for d in [-7.0, -1.0, 0.0, 0.4, 11.0] {
            let g = s.coupling_amplitude(d).unwrap().norm_sqr();
            assert!((g - s.total_density(d).unwrap()).abs() < 1e-15);
        }
        assert!((2.0 * PI * s.total_density(0.0).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn tabulated_query_outside_grid_errors() {
        let table = TabulatedSpectrum::new(vec![-1.0, 0.0, 1.0], vec![0.1, 0.2, 0.1]).unwrap();
        let s = InteractionSpectrum::tabulated(table, 1.0, 1.0).unwrap();
        assert!(matches!(s.coupling_amplitude(1.5), Err(Error::OutsideTable { .. })));
        let g = s.coupling_amplitude(0.5).unwrap();
        assert!((g.re - 0.15f64.sqrt()).abs() < 1e-15 && g.im == 0.0);
    }

    #[test]
    fn table_validation() {
        assert!(TabulatedSpectrum::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(TabulatedSpectrum::new(vec![0.0, 1.0], vec![1.0, -1.0]).is_err());
        let csv = "delta,g2\n-1,0.5\n0,1.0\n1,0.5\n";
        let t = TabulatedSpectrum::from_csv(csv.as_bytes()).unwrap();
        assert_eq!(t.g2(), &[0.5, 1.0, 0.5]);
        assert!(TabulatedSpectrum::from_csv("delta,g2\n1,2,3\n".as_bytes()).is_err());
    }

    #[test]
    fn memory_kernel_examples() {
        let s = InteractionSpectrum::lorentzian(1.0, 1.0, 10.0).unwrap();
        assert_eq!(s.memory_kernel(0.0), KernelValue::Value(Complex64::from(5.0)));
        let KernelValue::Value(v) = s.memory_kernel(0.1) else { panic!() };
        assert!((v.re - 5.0 * (-1.0f64).exp()).abs() < 1e-14);
        assert!((v.re - 1.83940).abs() < 5e-6);
        let flat = InteractionSpectrum::flat(1.0, 1.0).unwrap();
        assert_eq!(flat.memory_kernel(0.0), KernelValue::Markov { weight: 1.0 });
        assert!(!MemoryKernel::Numerical(TabulatedSpectrum::new(vec![0.0, 1.0], vec![0.0, 0.0]).unwrap()).is_analytic());
    }

    #[test]
    fn flat_drive_is_scaled_envelope() {
        let flat = InteractionSpectrum::flat(1.0, 0.5).unwrap();
        let g = PulseSpec::gaussian(1.0).unwrap().with_arrival(1.5);
        let d = flat.driving_term(&g, 1.5).unwrap();
        assert!((d.re - 0.5f64.sqrt() * (1.0 / (2.0 * PI)).powf(0.25)).abs() < 1e-15);
        let delta = PulseSpec::delta(0.1).unwrap();
        assert!(matches!(flat.driving_term(&delta, 0.0), Err(Error::ImpulsiveDrive { .. })));
    }

    #[test]
    fn drive_vanishes_long_before_gaussian() {
        for spectrum in [
            InteractionSpectrum::lorentzian(1.0, 1.0, 10.0).unwrap(),
            InteractionSpectrum::flat(1.0, 1.0).unwrap(),
        ] {
            let g = PulseSpec::gaussian(1.0).unwrap();
            assert!(spectrum.driving_term(&g, -60.0).unwrap().norm() < 1e-100);
        }
    }

    #[test]
    fn delta_with_tabulated_errors() {
        let table = TabulatedSpectrum::sample_lorentzian(1.0, 10.0, 100.0, 101).unwrap();
        let s = InteractionSpectrum::tabulated(table, 1.0, 1.0).unwrap();
        let delta = PulseSpec::delta(0.1).unwrap();
        assert_eq!(s.driving_term(&delta, 0.3), Err(Error::DeltaWithTabulated));
    }

    #[test]
    fn gaussian_drive_branches_agree_near_switch() {
        // z crosses zero at s = 2 kappa tau^2; both erfcx branches must join smoothly.
        let s = InteractionSpectrum::lorentzian(1.0, 1.0, 3.0).unwrap();
        let g = PulseSpec::gaussian(0.5).unwrap();
        let switch = 2.0 * 3.0 * 0.25;
        let left = s.driving_term(&g, switch - 1e-9).unwrap();
        let right = s.driving_term(&g, switch + 1e-9).unwrap();
        assert!((left - right).norm() < 1e-8);
    }

    #[test]
    fn decaying_drive_phi1_branches_join() {
        // kappa = 1/(2 tau) is the removable double-pole case
        let s = InteractionSpectrum::lorentzian(1.0, 1.0, 0.5).unwrap();
        let p = PulseSpec::decaying_exp(1.0).unwrap();
        let at = s.driving_term(&p, 2.0).unwrap();
        // D = -i kappa tau^{-1/2} s e^{-s/2}
        let expected = Complex64::new(0.0, -0.5 * 2.0 * (-1.0f64).exp());
        assert!((at - expected).norm() < 1e-14);
    }
}

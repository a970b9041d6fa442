use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares fit of `y = a / x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseFit {
    pub a: f64,
    /// Coefficient of determination of the no-intercept model,
    /// `1 - SS_res / sum y^2`.
    pub r_squared: f64,
}

pub fn fit_inverse(x: &[f64], y: &[f64]) -> Result<InverseFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "fit.samples",
            reason: format!("need two or more paired samples, got {} and {}", x.len(), y.len()),
        });
    }
    if x.iter().any(|v| !(v.is_finite() && *v != 0.0)) {
        return Err(Error::InvalidParameter {
            name: "fit.x",
            reason: "abscissae must be finite and nonzero".into(),
        });
    }
    let sxy: f64 = x.iter().zip(y).map(|(x, y)| y / x).sum();
    let sxx: f64 = x.iter().map(|x| 1.0 / (x * x)).sum();
    let a = sxy / sxx;
    let ss_res: f64 = x.iter().zip(y).map(|(x, y)| (y - a / x).powi(2)).sum();
    let ss_tot: f64 = y.iter().map(|y| y * y).sum();
    Ok(InverseFit {
        a,
        r_squared: 1.0 - ss_res / ss_tot,
    })
}

/// Least-squares fit of `ln P = ln A - rate t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpFit {
    pub rate: f64,
    pub amplitude: f64,
    /// Largest `|ln P - (ln A - rate t)|` over the fitted samples; roughly the
    /// worst relative deviation from the exponential.
    pub max_log_deviation: f64,
}

pub fn fit_exponential_decay(t: &[f64], p: &[f64]) -> Result<ExpFit> {
    if t.len() != p.len() || t.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "fit.samples",
            reason: format!("need two or more paired samples, got {} and {}", t.len(), p.len()),
        });
    }
    if p.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidParameter {
            name: "fit.p",
            reason: "probabilities must be positive for a log-linear fit".into(),
        });
    }
    let n = t.len() as f64;
    let logs: Vec<f64> = p.iter().map(|v| v.ln()).collect();
    let mt = t.iter().sum::<f64>() / n;
    let ml = logs.iter().sum::<f64>() / n;
    let stt: f64 = t.iter().map(|t| (t - mt).powi(2)).sum();
    let stl: f64 = t.iter().zip(&logs).map(|(t, l)| (t - mt) * (l - ml)).sum();
    let slope = stl / stt;
    let intercept = ml - slope * mt;
    let max_log_deviation = t
        .iter()
        .zip(&logs)
        .map(|(t, l)| (l - intercept - slope * t).abs())
        .fold(0.0, f64::max);
    Ok(ExpFit {
        rate: -slope,
        amplitude: intercept.exp(),
        max_log_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_inverse_law() {
        let x = [5.0, 10.0, 20.0, 40.0];
        let y: Vec<f64> = x.iter().map(|x| 1.7 / x).collect();
        let fit = fit_inverse(&x, &y).unwrap();
        assert!((fit.a - 1.7).abs() < 1e-14);
        assert!((fit.r_squared - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exact_exponential() {
        let t: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let p: Vec<f64> = t.iter().map(|t| 0.8 * (-1.3 * t).exp()).collect();
        let fit = fit_exponential_decay(&t, &p).unwrap();
        assert!((fit.rate - 1.3).abs() < 1e-12);
        assert!((fit.amplitude - 0.8).abs() < 1e-12);
        assert!(fit.max_log_deviation < 1e-12);
    }

    #[test]
    fn nonpositive_samples_rejected() {
        assert!(fit_exponential_decay(&[0.0, 1.0], &[1.0, 0.0]).is_err());
    }
}

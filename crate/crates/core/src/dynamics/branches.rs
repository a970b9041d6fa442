use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Result};

/// Relative distance `|kappa - 2 gamma| / gamma` below which the double-pole
/// form is used.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

/// Poles `-p_j` and residues `s_j` of `F[p] = (p + kappa) / (p^2 + kappa p + gamma kappa / 2)`.
///
/// For `kappa < 2 gamma` the rates are complex: the real part is the decay
/// rate and the imaginary part the frequency shift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzBranches {
    pub p1: Complex64,
    pub p2: Complex64,
    pub s1: Complex64,
    pub s2: Complex64,
    pub degenerate: bool,
}

impl LorentzBranches {
    /// `h(t) = s1 e^{-p1 t} + s2 e^{-p2 t}` (or `(1 + gamma t) e^{-gamma t}`
    /// at the double pole), the response to a unit initial amplitude.
    pub fn impulse_response(&self, gamma: f64, t: f64) -> Complex64 {
        if self.degenerate {
            Complex64::from((1.0 + gamma * t) * (-gamma * t).exp())
        } else {
            self.s1 * (-self.p1 * t).exp() + self.s2 * (-self.p2 * t).exp()
        }
    }
}

/// Branch rates `p_j = [kappa -/+ sqrt(kappa^2 - 2 kappa gamma)] / 2` and
/// weights `s_j = [1 +/- (1 - 2 gamma / kappa)^{-1/2}] / 2`.
///
/// The smaller rate and second weight are evaluated through the products
/// `p1 p2 = gamma kappa / 2` and `s2 = -p1 / (p2 - p1)`, which are exact
/// rearrangements that avoid cancellation when `kappa >> gamma`.
pub fn branch_params(gamma: f64, kappa: f64) -> Result<LorentzBranches> {
    ensure_positive("atom.gamma", gamma)?;
    ensure_positive("spectrum.kappa", kappa)?;
    let degenerate = (kappa - 2.0 * gamma).abs() < DEGENERACY_TOLERANCE * gamma;
    if degenerate {
        let g = Complex64::from(gamma);
        return Ok(LorentzBranches {
            p1: g,
            p2: g,
            s1: Complex64::from(1.0),
            s2: Complex64::from(0.0),
            degenerate,
        });
    }
    let root = Complex64::from(kappa * kappa - 2.0 * kappa * gamma).sqrt();
    let p2 = 0.5 * (kappa + root);
    let p1 = if kappa > 2.0 * gamma {
        0.5 * gamma * kappa / p2
    } else {
        0.5 * (kappa - root)
    };
    let gap = p2 - p1;
    Ok(LorentzBranches {
        p1,
        p2,
        s1: p2 / gap,
        s2: -p1 / gap,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_values_gamma1_kappa10() {
        let b = branch_params(1.0, 10.0).unwrap();
        let r = 80f64.sqrt();
        assert!((b.p1.re - 0.5 * (10.0 - r)).abs() < 1e-14);
        assert!((b.p2.re - 0.5 * (10.0 + r)).abs() < 1e-14);
        assert!((b.p1.re - 0.527864).abs() < 1e-6);
        assert!((b.p2.re - 9.472136).abs() < 1e-6);
        assert!((b.s1.re - 1.059017).abs() < 1e-6);
        assert!((b.s2.re + 0.059017).abs() < 1e-6);
        let direct_s1 = 0.5 * (1.0 + 1.0 / 0.8f64.sqrt());
        assert!((b.s1.re - direct_s1).abs() < 1e-14);
        assert!(b.p1.im == 0.0 && b.s1.im == 0.0);
    }

    #[test]
    fn weak_coupling_limits() {
        let b = branch_params(1.0, 1000.0).unwrap();
        assert!((b.p1.re - 0.5).abs() / 0.5 < 1e-3);
        assert!((b.p2.re - 1000.0).abs() / 1000.0 < 1e-3);
        let s2_limit = -1.0 / 2000.0;
        assert!((b.s2.re - s2_limit).abs() / s2_limit.abs() < 0.1);
    }

    #[test]
    fn strong_coupling_is_complex() {
        // kappa = gamma: p = (1 +/- i) / 2
        let b = branch_params(1.0, 1.0).unwrap();
        assert!((b.p1 - Complex64::new(0.5, -0.5)).norm() < 1e-15);
        assert!((b.p2 - Complex64::new(0.5, 0.5)).norm() < 1e-15);
        assert!((b.s1 + b.s2 - 1.0).norm() < 1e-15);
    }

    #[test]
    fn degenerate_flag() {
        assert!(branch_params(1.0, 2.0).unwrap().degenerate);
        assert!(branch_params(1.0, 2.0 + 5e-10).unwrap().degenerate);
        assert!(!branch_params(1.0, 2.0 + 2e-9).unwrap().degenerate);
    }

    proptest! {
        #[test]
        fn sum_and_product_identities(log_g in -2.0f64..2.0, log_ratio in -2.0f64..4.0) {
            let gamma = 10f64.powf(log_g);
            let kappa = gamma * 10f64.powf(log_ratio);
            let b = branch_params(gamma, kappa).unwrap();
            prop_assume!(!b.degenerate);
            prop_assert!((b.s1 + b.s2 - 1.0).norm() < 1e-12);
            prop_assert!((b.p1 + b.p2 - kappa).norm() / kappa < 1e-12);
            prop_assert!((b.p1 * b.p2 - 0.5 * gamma * kappa).norm() / (0.5 * gamma * kappa) < 1e-12);
        }
    }
}

use thiserror::Error;

/// Errors produced by the transduction library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("delta pulse has no square-integrable envelope")]
    Unnormalizable,

    #[error("frequency window too narrow: half-width {half_width} < required {required}")]
    WindowTooNarrow { half_width: f64, required: f64 },

    #[error("detuning {delta} lies outside the tabulated spectrum [{lo}, {hi}]")]
    OutsideTable { delta: f64, lo: f64, hi: f64 },

    #[error("time grid is not uniform (sample {index} deviates by {deviation:e})")]
    NonUniformGrid { index: usize, deviation: f64 },

    #[error("step too large for stiffness: dt = {dt} > {max}")]
    StepTooLarge { dt: f64, max: f64 },

    #[error("memory budget exceeded: {steps} steps > {limit}")]
    MemoryBudget { steps: usize, limit: usize },

    #[error("degenerate branches (kappa = 2 gamma): use closed-form degenerate path")]
    DegenerateBranches,

    #[error("delta pulse with tabulated spectrum has no closed-form driving term")]
    DeltaWithTabulated,

    #[error("driving term is a Dirac impulse of weight {weight}; it has no pointwise value")]
    ImpulsiveDrive { weight: f64 },

    #[error("operation requires a Lorentzian spectrum")]
    NotLorentzian,

    #[error("no absorption event: trajectory is identically zero")]
    NoAbsorption,

    #[error("trajectory ends before P falls below {level} of its peak")]
    IncompleteTrajectory { level: f64 },

    #[error("non-resonant carrier (delta0 = {delta0}) is not supported by the Bloch detector")]
    NonResonant { delta0: f64 },

    #[error("every sweep cell failed")]
    EmptySweep,

    #[error("tabulated spectrum: {0}")]
    Table(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite and > 0, got {value}"),
        })
    }
}

pub(crate) fn ensure_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite, got {value}"),
        })
    }
}

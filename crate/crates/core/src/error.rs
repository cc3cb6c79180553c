use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate Λ system: Ω₀² + Ω₁² = 0")]
    DegenerateSystem,

    #[error("two-photon mismatch |Δ₀ − Δ₁| = {mismatch:.3e} Γ exceeds tolerance {tolerance:.1e} Γ")]
    TwoPhotonMismatch { mismatch: f64, tolerance: f64 },

    #[error("steady state is not unique (null space dimension {nullity})")]
    NonUniqueSteadyState { nullity: usize },

    #[error("{what} did not converge")]
    NoConvergence { what: &'static str },

    #[error("step dt = {dt:.3e} too large for ‖L‖ = {norm:.3e} (need dt·‖L‖ ≤ {limit})")]
    StepTooLarge { dt: f64, norm: f64, limit: f64 },

    #[error("no cooling: upper-sideband absorption does not exceed lower-sideband absorption")]
    NotCooling,

    #[error("every point of the search window is outside the cooling region")]
    NoMinimumInWindow,

    #[error("linear chain unstable: squared mode frequency {value:.3e} ≤ 0")]
    UnstableChain { value: f64 },

    #[error("sideband ratio {0} outside [0, 1)")]
    RatioOutOfRange(f64),

    #[error("AC Stark shift and detuning have inconsistent signs")]
    InconsistentSigns,

    #[error("least-squares fit diverged: {0}")]
    FitDiverged(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}

use thiserror::Error;

/// Errors raised by state construction, conditioning and phase-space evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PsgError {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("unphysical Gaussian state: A = {a}, B = {b} violates A > 0, B > 0, AB >= 1")]
    Unphysical { a: f64, b: f64 },

    #[error("degenerate beam splitter: transmittivity T = {t} must lie strictly inside (0, 1)")]
    DegenerateSplitter { t: f64 },

    #[error("heralding outcome has zero probability (margin {margin:e}); nothing to subtract")]
    ZeroProbabilityHerald { margin: f64 },

    #[error("divergent integral: Gaussian decay rates ({a}, {b}) are not strictly positive")]
    DivergentIntegral { a: f64, b: f64 },

    #[error("input is not squeezed along the expected axis (need A < 1 < B, got A = {a}, B = {b})")]
    NotSqueezedInput { a: f64, b: f64 },

    #[error("no homodyne efficiency up to 1 yields a negative Wigner origin (W(0) = {w_at_unit_eta} at eta = 1)")]
    NoThresholdBelowOne { w_at_unit_eta: f64 },

    #[error("Fock truncation at dim {dim} is too small (lost mass {lost:e})")]
    UnderTruncated { dim: usize, lost: f64 },
}

pub type Result<T> = std::result::Result<T, PsgError>;

//! Typed failures shared by all solvers.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Every way a solver call can fail.
///
/// The variant name doubles as the machine-parsable error tag emitted by the
/// command-line front end, so variants are never renamed lightly.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter or matrix entry is NaN or infinite.
    #[error("NonFinite: {0}")]
    NonFinite(String),

    /// A length parameter (`r_star` or `epsilon`) is negative.
    #[error("NegativeRange: {0}")]
    NegativeRange(String),

    /// The three-body solver needs `r_star > 0`; the zero-range limit has no
    /// ground state to converge to.
    #[error("RStarRequired: {0}")]
    RStarRequired(String),

    /// An argument is outside its admissible range (bad grid bounds, empty
    /// scan list, nonpositive wavenumber, ...).
    #[error("BadRange: {0}")]
    BadRange(String),

    /// `f0(0)` diverges at unitarity (`1/a = 0`).
    #[error("PoleAtZero: f0(k = 0) diverges at unitarity")]
    PoleAtZero,

    /// The regularized amplitude needs `epsilon > 0`.
    #[error("EpsilonZero: regularized amplitude needs epsilon > 0")]
    EpsilonZero,

    /// No two-body bound state exists (`a <= 0`).
    #[error("NoBoundState: dimer exists only for a > 0 (got 1/a = {inv_a})")]
    NoBoundState { inv_a: f64 },

    /// Trial trimer binding wavenumber at or below the atom-dimer threshold.
    #[error("ThresholdViolation: q = {q} must exceed the dimer kappa = {kappa}")]
    ThresholdViolation { q: f64, kappa: f64 },

    /// Bracketing endpoints do not straddle a sign change.
    #[error("NoSignChange: f({x_lo}) and f({x_hi}) have the same sign")]
    NoSignChange { x_lo: f64, x_hi: f64 },

    /// An iterative routine ran out of iterations.
    #[error("MaxIterations: {0}")]
    MaxIterations(String),

    /// Inverse iteration failed to produce a null vector.
    #[error("NotConverged: {0}")]
    NotConverged(String),

    /// The tail-fit window contains too few samples.
    #[error("WindowTooNarrow: {0}")]
    WindowTooNarrow(String),
}

impl Error {
    /// Stable machine-parsable tag (the variant name).
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonFinite(_) => "NonFinite",
            Error::NegativeRange(_) => "NegativeRange",
            Error::RStarRequired(_) => "RStarRequired",
            Error::BadRange(_) => "BadRange",
            Error::PoleAtZero => "PoleAtZero",
            Error::EpsilonZero => "EpsilonZero",
            Error::NoBoundState { .. } => "NoBoundState",
            Error::ThresholdViolation { .. } => "ThresholdViolation",
            Error::NoSignChange { .. } => "NoSignChange",
            Error::MaxIterations(_) => "MaxIterations",
            Error::NotConverged(_) => "NotConverged",
            Error::WindowTooNarrow(_) => "WindowTooNarrow",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_starts_with_name() {
        let errors = [
            Error::NonFinite("x".into()),
            Error::NegativeRange("r".into()),
            Error::RStarRequired("s".into()),
            Error::BadRange("b".into()),
            Error::PoleAtZero,
            Error::EpsilonZero,
            Error::NoBoundState { inv_a: -1.0 },
            Error::ThresholdViolation { q: 0.1, kappa: 0.6 },
            Error::NoSignChange { x_lo: 0.0, x_hi: 1.0 },
            Error::MaxIterations("m".into()),
            Error::NotConverged("n".into()),
            Error::WindowTooNarrow("w".into()),
        ];
        for e in errors {
            assert!(e.to_string().starts_with(e.name()), "{e}");
        }
    }
}

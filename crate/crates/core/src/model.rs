//! Units convention, parameter records, result records and validation shared
//! by the two- and three-body solvers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod units {
    //! Natural units used everywhere in this crate: `hbar = 1` and atomic
    //! mass `M = 1`.
    //!
    //! All momenta are inverse lengths and all energies are squared inverse
    //! lengths. The caller picks the physical length unit; the natural choice
    //! is `R* = 1`. Conversion back to laboratory units is the caller's job.

    /// Reduced Planck constant in natural units.
    pub const HBAR: f64 = 1.0;
    /// Atomic mass in natural units.
    pub const MASS: f64 = 1.0;

    /// Kinetic energy `k^2/2` of a single atom with wavenumber `k`.
    #[inline]
    pub fn atom_kinetic_energy(k: f64) -> f64 {
        0.5 * k * k
    }

    /// Kinetic energy `k^2/4` of a molecule (mass `2M`) with wavenumber `k`.
    #[inline]
    pub fn molecule_kinetic_energy(k: f64) -> f64 {
        0.25 * k * k
    }

    /// Bound-state energy `-q^2` of a state with binding wavenumber `q`.
    #[inline]
    pub fn binding_energy(q: f64) -> f64 {
        -q * q
    }
}

/// Which solver the parameters are being validated for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverContext {
    /// Closed-form two-body observables; `r_star = 0` and `epsilon = 0` are
    /// both admissible.
    TwoBody,
    /// The regularized amplitude needs `epsilon > 0` (and `r_star > 0` for
    /// the coupling amplitude to be finite).
    RegularizedAmplitude,
    /// The three-body solver needs `r_star > 0`.
    ThreeBody,
}

/// Physical knobs of the interaction: inverse scattering length `1/a`, width
/// parameter `R*`, and Gaussian interchannel cutoff range `epsilon`.
///
/// `inv_a` may be negative; `inv_a = 0` is unitarity. `epsilon = 0` is the
/// strict zero-range limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceParams {
    /// Inverse scattering length `1/a`.
    pub inv_a: f64,
    /// Width parameter `R*` (a length, `>= 0`).
    pub r_star: f64,
    /// Gaussian cutoff range (a length, `>= 0`; `0` = zero-range limit).
    pub epsilon: f64,
}

impl ResonanceParams {
    /// Zero-range parameters (`epsilon = 0`).
    pub fn new(inv_a: f64, r_star: f64) -> Self {
        Self { inv_a, r_star, epsilon: 0.0 }
    }

    /// Parameters with a finite interchannel cutoff range.
    pub fn with_cutoff(inv_a: f64, r_star: f64, epsilon: f64) -> Self {
        Self { inv_a, r_star, epsilon }
    }

    /// Unitarity (`1/a = 0`) at the given `R*`.
    pub fn unitarity(r_star: f64) -> Self {
        Self::new(0.0, r_star)
    }
}

/// Checks that `p` is admissible for the requested solver and returns it
/// unchanged.
pub fn validate_params(p: ResonanceParams, context: SolverContext) -> Result<ResonanceParams> {
    if !(p.inv_a.is_finite() && p.r_star.is_finite() && p.epsilon.is_finite()) {
        return Err(Error::NonFinite(format!(
            "params must be finite: inv_a = {}, r_star = {}, epsilon = {}",
            p.inv_a, p.r_star, p.epsilon
        )));
    }
    if p.r_star < 0.0 {
        return Err(Error::NegativeRange(format!("r_star = {} < 0", p.r_star)));
    }
    if p.epsilon < 0.0 {
        return Err(Error::NegativeRange(format!("epsilon = {} < 0", p.epsilon)));
    }
    match context {
        SolverContext::TwoBody => {}
        SolverContext::RegularizedAmplitude => {
            if p.epsilon == 0.0 {
                return Err(Error::EpsilonZero);
            }
            if p.r_star == 0.0 {
                return Err(Error::RStarRequired(
                    "regularized amplitude needs a finite coupling, r_star > 0".into(),
                ));
            }
        }
        SolverContext::ThreeBody => {
            if p.r_star == 0.0 {
                return Err(Error::RStarRequired(
                    "three-body solving needs r_star > 0 (zero range collapses)".into(),
                ));
            }
        }
    }
    Ok(p)
}

/// Closed-form two-body observables of the dimer attached to `params`.
///
/// `energy = -kappa^2` and `c4 * r_star = 8 pi * n_mol` hold exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimerSolution {
    /// Input parameters, for provenance.
    pub params: ResonanceParams,
    /// Binding wavenumber `kappa > 0`.
    pub kappa: f64,
    /// Binding energy `-kappa^2`.
    pub energy: f64,
    /// Mean closed-channel molecule number, in `(0, 1)`.
    pub n_mol: f64,
    /// Coefficient of the `1/k^4` momentum tail.
    pub c4: f64,
    /// Coefficient of the `1/k^6` momentum-tail correction.
    pub c6: f64,
}

/// One trimer level: `energy = -q^2`, levels ordered by decreasing `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrimerLevel {
    /// 0 = ground state.
    pub index: usize,
    /// Binding wavenumber, `> 0`.
    pub q: f64,
    /// Binding energy `-q^2`.
    pub energy: f64,
}

impl TrimerLevel {
    pub fn new(index: usize, q: f64) -> Self {
        Self { index, q, energy: units::binding_energy(q) }
    }
}

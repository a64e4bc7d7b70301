//! Three identical bosons: discretization of the bound-state
//! Skorniakov--Ter-Martirosyan (STM) integral equation, the trimer spectrum,
//! the pair amplitude `D(k)`, the one-body momentum distribution, and the
//! contact / energy consistency checks.
//!
//! The s-wave projected equation solved here is
//!
//! ```text
//! d(k) D(k) = (2/(pi k)) ∫_0^∞ dk' k' ln[(k^2+k'^2+k k'+q^2)/(k^2+k'^2-k k'+q^2)] D(k')
//! d(k)      = sqrt(3k^2/4 + q^2) + R* (3k^2/4 + q^2) - 1/a
//! ```
//!
//! where `q` is the trial binding wavenumber (`E = -q^2`) and the diagonal is
//! the inverse two-body amplitude continued below threshold. Trimer levels
//! are the zeros of the Fredholm determinant `det(I - D^{-1} K)` on the
//! quadrature grid.

mod amplitude;
mod efimov;
mod stm;

pub use amplitude::{energy_relation_residual_trimer, reconstruct_nk, solve_amplitude};
pub use efimov::{efimov_channel_root, EfimovChannelRoot};
pub use stm::{
    assemble, det_scan, solve_levels, solve_levels_in, thomas_collapse_probe, CollapseRow,
    DetPoint, QScan, StmOperator,
};

use serde::{Deserialize, Serialize};

use crate::model::{ResonanceParams, TrimerLevel};
use crate::numerics::RadialGrid;

/// Trimer levels found by a determinant sweep, ordered by decreasing `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrimerSpectrum {
    pub params: ResonanceParams,
    /// How many levels the caller asked for.
    pub requested: usize,
    pub levels: Vec<TrimerLevel>,
}

impl TrimerSpectrum {
    /// True when shallow levels fell below the scan resolution and fewer
    /// levels than requested were bracketed.
    pub fn fewer_than_requested(&self) -> bool {
        self.levels.len() < self.requested
    }
}

/// A solved trimer: null vector of the discretized STM operator plus the
/// sector weights of the normalized three-body state.
///
/// The amplitude is scaled so that `n_open + n_mol = 1`; `n_mol` is then the
/// mean closed-channel molecule number of the level and `k_mol` its mean
/// molecular translational kinetic energy.
#[derive(Debug, Clone, PartialEq)]
pub struct StmSolution {
    pub params: ResonanceParams,
    pub level: TrimerLevel,
    /// Pair amplitude samples `D(k_i)` on the solution grid.
    pub d_values: Vec<f64>,
    /// One-molecule sector weight, in `(0, 1)`.
    pub n_mol: f64,
    /// Open-channel (three free atoms) weight, `1 - n_mol`.
    pub n_open: f64,
    /// Mean molecular kinetic energy `<K_mol>`.
    pub k_mol: f64,
    /// Null-vector residual `‖(I - D^{-1}K) D‖ / ‖D‖`.
    pub residual: f64,
    pub(crate) grid: RadialGrid,
}

impl StmSolution {
    /// Quadrature grid the amplitude lives on.
    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }
}

/// One-body momentum distribution samples with the fitted tail coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumDistribution {
    pub params: ResonanceParams,
    /// Level the distribution belongs to.
    pub level_index: usize,
    pub k_samples: Vec<f64>,
    pub values: Vec<f64>,
    /// Quadrature weights matching `k_samples`.
    pub weights: Vec<f64>,
    /// Fitted `1/k^4` tail coefficient.
    pub c4_fit: f64,
    /// Fitted `1/k^6` tail coefficient.
    pub c6_fit: f64,
    /// Window `(k_lo, k_hi)` used for the tail fit.
    pub fit_window: (f64, f64),
    /// `|∫ d^3k/(2 pi)^3 n_k - (3 - 2 n_mol)|`.
    pub sum_rule_residual: f64,
}

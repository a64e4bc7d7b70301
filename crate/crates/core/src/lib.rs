//! Few-body solver for identical bosons at an asymptotically narrow magnetic
//! Feshbach resonance.
//!
//! The interaction is the zero-range two-channel model with scattering
//! amplitude `f0(k) = -1/(1/a + R* k^2 + i k)`: a scattering length `a`, a
//! width parameter `R*` acting as the natural short-distance cutoff, and an
//! optional Gaussian interchannel cutoff of range `epsilon`. On top of that
//! model the crate solves
//!
//! * the two-body (dimer) problem in closed form ([`twobody`]),
//! * the three-body (Efimov trimer) bound-state problem by discretizing the
//!   Skorniakov--Ter-Martirosyan integral equation ([`threebody`]),
//!
//! and verifies the Tan-type contact relations that tie the `1/k^4` momentum
//! tail and the total energy to the closed-channel molecule number.
//!
//! Units are `hbar = 1`, atomic mass `M = 1` throughout; see [`model::units`].

pub mod error;
pub mod guide;
pub mod model;
pub mod numerics;
pub mod threebody;
pub mod twobody;

pub use error::{Error, Result};
pub use model::{DimerSolution, ResonanceParams, SolverContext, TrimerLevel};

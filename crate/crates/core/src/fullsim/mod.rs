//! Numerically exact integration of the driven multilevel Hamiltonian.
//!
//! Where [`crate::gatephase`] works in the displaced-oscillator picture,
//! this module keeps all four three-level atoms and the three field modes
//! (each truncated at a configurable Fock cutoff) and integrates the
//! time-dependent Schroedinger equation directly, with no rotating-wave or
//! dispersive approximation beyond the Hamiltonian itself.  Its purpose is
//! validation: evolve each logical basis state, read off the accumulated
//! phase and the leakage out of the ideal subspace, and compare against
//! the effective model's predictions.
//!
//! The pieces:
//!
//! * [`FockConfig`] / [`StateSpace`]: basis layout and sparse ladder and
//!   transition actions.
//! * [`Hamiltonian`]: the fixed list of oscillating coupling terms.
//! * [`evolve`] / [`evolve_monitored`]: an adaptive eighth-order
//!   Runge-Kutta integrator.
//! * [`validate_against_effective`] / [`delta_scaling_scan`]: the
//!   comparison harness.

mod hamiltonian;
mod integrate;
mod space;
mod validate;

pub use hamiltonian::{Hamiltonian, HamiltonianTerm};
pub use integrate::{evolve, evolve_monitored, Evolution, DEFAULT_ACCURACY};
pub use space::{build_space, FockConfig, SparseAction, StateSpace, EXCITED_LEVEL};
pub use validate::{
    delta_scaling_scan, extract_phase_leakage, validate_against_effective, BasisComparison,
    ScalingPoint, ValidationReport, EXTRACTION_OVERLAP_FLOOR,
};

use core::fmt;

use crate::gatephase::GateError;
use crate::model::ModelError;

/// Errors from configuration, integration, and phase extraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FullsimError {
    /// Fock cutoffs below one photon cannot represent the driven dynamics.
    InvalidCutoff { n_max: usize },
    /// The requested space exceeds the configured dimension cap.
    DimensionCap { dim: usize, cap: usize },
    /// The step controller drove the step size below the floating-point
    /// resolution of the current time; reports how far it got.
    StepSizeUnderflow { t_reached: f64 },
    /// The evolved state has (almost) no weight left on the initial state,
    /// so its phase is meaningless.
    DepopulatedState { overlap_abs: f64 },
    /// Effective-model failure while preparing the comparison.
    Gate(GateError),
}

impl From<GateError> for FullsimError {
    fn from(err: GateError) -> Self {
        FullsimError::Gate(err)
    }
}

impl From<ModelError> for FullsimError {
    fn from(err: ModelError) -> Self {
        FullsimError::Gate(GateError::Model(err))
    }
}

impl fmt::Display for FullsimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FullsimError::InvalidCutoff { n_max } => {
                write!(f, "Fock cutoff must be at least 1, got {}", n_max)
            }
            FullsimError::DimensionCap { dim, cap } => {
                write!(f, "state space of dimension {} exceeds the cap {}", dim, cap)
            }
            FullsimError::StepSizeUnderflow { t_reached } => write!(
                f,
                "integrator step size underflowed at t = {:e} us; the requested accuracy is unreachable",
                t_reached,
            ),
            FullsimError::DepopulatedState { overlap_abs } => write!(
                f,
                "overlap with the initial state fell to {:e}; phase extraction is undefined",
                overlap_abs,
            ),
            FullsimError::Gate(err) => write!(f, "{}", err),
        }
    }
}

impl core::error::Error for FullsimError {}

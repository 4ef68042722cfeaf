//! Numerical tolerances shared across the crate. All quantities handled here
//! are O(1), so absolute thresholds are used throughout.

use serde::{Deserialize, Serialize};

/// `max|M - M†|` accepted as Hermitian.
pub const HERM_TOL: f64 = 1e-12;
/// Residual allowed when reconstructing a matrix from its eigendecomposition.
pub const RECONSTRUCTION_TOL: f64 = 1e-10;
/// Singular values at or below this count as zero in null-space solves.
pub const NULL_SPACE_TOL: f64 = 1e-9;
/// Negative eigenvalue / completeness slack for states, POVMs and observables.
pub const PSD_TOL: f64 = 1e-10;
/// Second eigenvalue below which a POVM element counts as rank one.
pub const RANK_ONE_TOL: f64 = 1e-9;
/// Condition number of the correlation matrix beyond which inversion is refused.
pub const MAX_ETA_CONDITION: f64 = 1e12;

/// The tolerance set in force for a run, embedded in every report.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub herm: f64,
    pub reconstruction: f64,
    pub null_space: f64,
    pub psd: f64,
    /// Residual allowed on Bell values and probabilities in report checks.
    pub check: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            herm: HERM_TOL,
            reconstruction: RECONSTRUCTION_TOL,
            null_space: NULL_SPACE_TOL,
            psd: PSD_TOL,
            check: 1e-10,
        }
    }
}

impl Tolerances {
    /// Overrides one field by name; returns `false` for an unknown key.
    pub fn set(&mut self, key: &str, value: f64) -> bool {
        let slot = match key {
            "herm" | "herm_tol" => &mut self.herm,
            "reconstruction" | "reconstruction_tol" => &mut self.reconstruction,
            "null_space" | "null_space_tol" => &mut self.null_space,
            "psd" | "psd_tol" => &mut self.psd,
            "check" | "check_tol" => &mut self.check,
            _ => return false,
        };
        *slot = value;
        true
    }
}

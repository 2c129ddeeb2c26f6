//! Numerical tolerances and pipeline defaults.
//!
//! Every threshold used by the library lives here. The [`Config`] record is
//! echoed into machine-readable reports so a run can be reproduced exactly.

use serde::{Deserialize, Serialize};

/// Maximum entrywise deviation from Hermiticity accepted for a density matrix.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Hermiticity tolerance accepted by the eigensolver.
pub const EIGEN_HERMITIAN_TOL: f64 = 1e-8;
/// Eigenvalues in `[-PSD_CLIP_TOL, 0)` are clipped to zero; below that a state is rejected.
pub const PSD_CLIP_TOL: f64 = 1e-10;
/// Slack on the upper trace bound of (sub-normalized) density matrices.
pub const TRACE_TOL: f64 = 1e-10;
/// Norm tolerance for pure states.
pub const NORM_TOL: f64 = 1e-10;
/// Normalization tolerance for operations that require trace one.
pub const UNIT_TRACE_TOL: f64 = 1e-9;
/// Unit-determinant tolerance for local filters.
pub const DET_TOL: f64 = 1e-9;
/// Eigenvalue floor below which a single-qubit marginal counts as singular.
pub const SINGULAR_TOL: f64 = 1e-14;
/// Largest forbidden entry allowed in a GHZ-symmetric matrix.
pub const SYMMETRIC_SHAPE_TOL: f64 = 1e-8;
/// Slack on the physical-triangle test for (x, y) coordinates.
pub const COORDS_TOL: f64 = 1e-10;
/// Clamping slack on the pure-state three-tangle.
pub const TANGLE_CLAMP_TOL: f64 = 1e-9;
/// Eigenvalues below `-TOMO_NEGATIVE_TOL` make tomographic data inconsistent.
pub const TOMO_NEGATIVE_TOL: f64 = 1e-6;
/// Slack on the [-1, 1] range of Pauli expectation values.
pub const PAULI_RANGE_TOL: f64 = 1e-9;
/// Minimal entrywise difference for the error estimate to be meaningful.
pub const COINCIDENCE_TOL: f64 = 1e-12;
/// Subspace leakage allowed by the decomposition search.
pub const SUBSPACE_TOL: f64 = 1e-10;

/// Settings of the normal-form iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalFormConfig {
    /// Frobenius distance of each normalized marginal (times two) from the identity.
    pub eps_nf: f64,
    /// Trace below which the normal form is declared to vanish.
    pub trace_floor: f64,
    /// Safety cap on the number of qubit cycles.
    pub max_iter: usize,
}

impl Default for NormalFormConfig {
    fn default() -> Self {
        Self {
            eps_nf: 1e-9,
            trace_floor: 1e-12,
            max_iter: 10_000,
        }
    }
}

/// Settings of the local-unitary search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptConfig {
    pub seed: u64,
    pub restarts: usize,
    /// Objective spread at which a simplex counts as converged.
    pub tol: f64,
    /// Simplex diameter (radians) at which a search stops.
    pub xtol: f64,
    /// Objective evaluations per restart and phase.
    pub max_evals: usize,
    /// Worker threads for restarts; 0 or 1 runs serially.
    pub jobs: usize,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 32,
            tol: 1e-8,
            xtol: 1e-7,
            max_evals: 2000,
            jobs: 1,
        }
    }
}

/// Full configuration of a certification run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct Config {
    pub normal_form: NormalFormConfig,
    pub opt: OptConfig,
}

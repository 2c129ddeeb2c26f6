//! Projection of arbitrary states onto the GHZ-symmetric family.
//!
//! The twirl averages a state over the GHZ symmetry group: qubit
//! permutations, the collective flip `X⊗X⊗X`, and the correlated z-rotations
//! `exp(i φ1 Z) ⊗ exp(i φ2 Z) ⊗ exp(-i (φ1+φ2) Z)`. Only the closed-form
//! effect on matrix elements is implemented here; the angles never appear at
//! runtime.

use crate::error::Result;
use crate::ghz_symmetric::{tau3_symmetric_approx, SymCoords};
use crate::linalg::{c, ComplexMatrix, DensityMatrix};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// The six permutations of three qubits, as maps from new to old position.
pub const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Basis index after permuting the qubits of `idx`.
pub fn permute_index(idx: usize, perm: [usize; 3]) -> usize {
    let bits = [(idx >> 2) & 1, (idx >> 1) & 1, idx & 1];
    4 * bits[perm[0]] + 2 * bits[perm[1]] + bits[perm[2]]
}

/// Twirl onto the GHZ-symmetric states. Trace preserving and idempotent.
pub fn project(rho: &DensityMatrix) -> DensityMatrix {
    let m = rho.matrix();
    let a = 0.5 * (m[(0, 0)].re + m[(7, 7)].re);
    let b = (1..7).map(|i| m[(i, i)].re).sum::<f64>() / 6.0;
    let x = 0.5 * (m[(0, 7)] + m[(7, 0)]).re;
    let mut out = ComplexMatrix::diag_real(&[a, b, b, b, b, b, b, a]);
    out[(0, 7)] = c(x, 0.0);
    out[(7, 0)] = c(x, 0.0);
    DensityMatrix::from_trusted(out)
}

/// Coordinates of the twirled state, read directly from four matrix elements.
///
/// Sub-normalized inputs are rescaled to unit trace.
pub fn coords(rho: &DensityMatrix) -> SymCoords {
    let tr = rho.trace();
    let x = 0.5 * (rho.entry(0, 7) + rho.entry(7, 0)).re / tr;
    let y = ((rho.entry(0, 0).re + rho.entry(7, 7).re) / tr - 0.25) / SQRT3;
    SymCoords::new_unchecked(x, y)
}

/// Explicit witness-plane bound on the raw matrix elements:
/// `max over ± of max(0, ±8/7 (ρ_{000,111} + ρ_{111,000}) + 20/7 (ρ_{000,000} + ρ_{111,111}) - 3)`.
pub fn tau3_approx_rho(rho: &DensityMatrix) -> f64 {
    let off = (rho.entry(0, 7) + rho.entry(7, 0)).re;
    let diag = rho.entry(0, 0).re + rho.entry(7, 7).re;
    [1.0, -1.0]
        .iter()
        .map(|s| (s * 8.0 / 7.0 * off + 20.0 / 7.0 * diag - 3.0).max(0.0))
        .fold(0.0, f64::max)
}

/// Same value routed through the symmetric-state plane.
pub fn tau3_approx_via_coords(rho: &DensityMatrix) -> Result<f64> {
    tau3_symmetric_approx(coords(rho))
}

/// Average over the six qubit permutations.
pub fn pit_project(rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::from_trusted(permutation_average(rho.matrix()))
}

pub(crate) fn permutation_average(m: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(8, 8);
    for perm in PERMUTATIONS {
        for i in 0..8 {
            for j in 0..8 {
                out[(permute_index(i, perm), permute_index(j, perm))] += m[(i, j)];
            }
        }
    }
    out.scale_re(1.0 / 6.0)
}

//! Named states used throughout the examples: GHZ, W and the three
//! benchmark families whose three-tangle is known.

use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix, DensityMatrix, PureState, ZERO};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// `(|000> + |111>)/sqrt(2)`.
pub fn ghz_plus() -> PureState {
    let mut a = [ZERO; 8];
    a[0] = c(FRAC_1_SQRT_2, 0.0);
    a[7] = c(FRAC_1_SQRT_2, 0.0);
    PureState::new(a).expect("normalized")
}

/// `(|000> - |111>)/sqrt(2)`.
pub fn ghz_minus() -> PureState {
    let mut a = [ZERO; 8];
    a[0] = c(FRAC_1_SQRT_2, 0.0);
    a[7] = c(-FRAC_1_SQRT_2, 0.0);
    PureState::new(a).expect("normalized")
}

/// `(|001> + |010> + |100>)/sqrt(3)`.
pub fn w_state() -> PureState {
    PureState::from_real([0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0]).expect("nonzero")
}

/// `(|100> + |011>)/sqrt(2)`: GHZ with the first qubit flipped.
pub fn flipped_ghz() -> PureState {
    PureState::from_real([0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0]).expect("nonzero")
}

/// Uniform superposition of the six basis states with mixed excitation.
pub fn phi_state() -> PureState {
    PureState::from_real([0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0]).expect("nonzero")
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange { name: "p", value: p });
    }
    Ok(())
}

/// `p |GHZ><GHZ| + (1-p) |001><001|`.
pub fn rho1(p: f64) -> Result<DensityMatrix> {
    check_p(p)?;
    DensityMatrix::mixture(&[(p, &ghz_plus()), (1.0 - p, &PureState::basis(1))])
}

/// `p |GHZ><GHZ| + (1-p) |W><W|`.
pub fn rho2(p: f64) -> Result<DensityMatrix> {
    check_p(p)?;
    DensityMatrix::mixture(&[(p, &ghz_plus()), (1.0 - p, &w_state())])
}

/// Rank-3 mixture of `|phi>` with `|000>` and `|111>`, given entrywise as
/// one eighth of a 0/1 matrix.
pub fn rho3() -> DensityMatrix {
    let m = ComplexMatrix::from_fn(8, 8, |i, j| {
        let corner = i == j && (i == 0 || i == 7);
        let inner = (1..7).contains(&i) && (1..7).contains(&j);
        if corner || inner {
            c(0.125, 0.0)
        } else {
            ZERO
        }
    });
    DensityMatrix::new(m).expect("valid state")
}

/// Threshold weight above which the GHZ/W mixture has nonzero three-tangle.
pub fn rho2_threshold() -> f64 {
    let t = 2f64.powf(1.0 / 3.0);
    t / (t + 0.75)
}

/// Known three-tangle of `rho2(p)`.
pub fn rho2_exact_tau3(p: f64) -> f64 {
    let p0 = rho2_threshold();
    ((p - p0) / (1.0 - p0)).max(0.0)
}

//! Three-tangle of pure states from Cayley's hyperdeterminant.

use crate::config::{NORM_TOL, TANGLE_CLAMP_TOL};
use crate::error::{Error, Result};
use crate::linalg::{PureState, C64};

/// The hyperdeterminant combination `d1 - 2 d2 + 4 d3` of the amplitudes.
///
/// Homogeneous of degree four, so it also makes sense for unnormalized
/// vectors.
pub fn hyperdeterminant(psi: &[C64; 8]) -> C64 {
    let a = |j: usize, k: usize, l: usize| psi[4 * j + 2 * k + l];
    let d1 = (a(0, 0, 0) * a(1, 1, 1)).powi(2)
        + (a(0, 0, 1) * a(1, 1, 0)).powi(2)
        + (a(0, 1, 0) * a(1, 0, 1)).powi(2)
        + (a(0, 1, 1) * a(1, 0, 0)).powi(2);
    let d2 = a(0, 0, 0) * a(0, 0, 1) * a(1, 1, 0) * a(1, 1, 1)
        + a(0, 0, 0) * a(0, 1, 0) * a(1, 0, 1) * a(1, 1, 1)
        + a(0, 0, 0) * a(0, 1, 1) * a(1, 0, 0) * a(1, 1, 1)
        + a(0, 0, 1) * a(0, 1, 0) * a(1, 0, 1) * a(1, 1, 0)
        + a(0, 0, 1) * a(0, 1, 1) * a(1, 0, 0) * a(1, 1, 0)
        + a(0, 1, 0) * a(0, 1, 1) * a(1, 0, 0) * a(1, 0, 1);
    let d3 = a(0, 0, 0) * a(1, 1, 0) * a(1, 0, 1) * a(0, 1, 1)
        + a(1, 0, 0) * a(0, 1, 0) * a(0, 0, 1) * a(1, 1, 1);
    d1 - d2 * 2.0 + d3 * 4.0
}

/// `2 sqrt|hyperdet|` without normalization: equals `||psi||^2 * tau3(psi/||psi||)`.
pub fn tau3_unnormalized(psi: &[C64; 8]) -> f64 {
    2.0 * hyperdeterminant(psi).norm().sqrt()
}

/// Three-tangle of a normalized pure state, in [0, 1].
pub fn tau3_pure(psi: &PureState) -> Result<f64> {
    let amp = psi.amplitudes();
    let n: f64 = amp.iter().map(|z| z.norm_sqr()).sum();
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(n));
    }
    let t = tau3_unnormalized(amp);
    if t > 1.0 + TANGLE_CLAMP_TOL {
        return Err(Error::Invalid(format!("three-tangle {t} exceeds one")));
    }
    Ok(t.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, LocalOperator, ZERO};
    use crate::testutil::*;
    use proptest::prelude::*;

    #[test]
    fn anchors() {
        assert!((tau3_pure(&ghz_plus()).unwrap() - 1.0).abs() < 1e-15);
        assert!(tau3_pure(&w_state()).unwrap().abs() < 1e-15);
        assert_eq!(tau3_pure(&PureState::basis(0)).unwrap(), 0.0);
    }

    #[test]
    fn generalized_ghz() {
        let p: f64 = 0.2;
        let mut a = [ZERO; 8];
        a[0] = c(p.sqrt(), 0.0);
        a[7] = c((1.0 - p).sqrt(), 0.0);
        let t = tau3_pure(&PureState::new(a).unwrap()).unwrap();
        assert!((t - 0.8).abs() < 1e-15);
    }

    fn permute(psi: &[C64; 8], perm: [usize; 3]) -> [C64; 8] {
        let mut out = [ZERO; 8];
        for (idx, z) in psi.iter().enumerate() {
            let bits = [(idx >> 2) & 1, (idx >> 1) & 1, idx & 1];
            let nb = [bits[perm[0]], bits[perm[1]], bits[perm[2]]];
            out[4 * nb[0] + 2 * nb[1] + nb[2]] = *z;
        }
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn local_unitary_invariance(seed in any::<u64>()) {
            let mut r = rng(seed);
            let psi = random_pure(&mut r);
            let v = random_local_unitary(&mut r);
            let moved = PureState::new(v.apply_pure(psi.amplitudes())).unwrap();
            let d = (tau3_pure(&moved).unwrap() - tau3_pure(&psi).unwrap()).abs();
            prop_assert!(d <= 1e-9);
        }

        #[test]
        fn sl2_covariance(seed in any::<u64>()) {
            let mut r = rng(seed);
            let psi = random_pure(&mut r);
            let a: LocalOperator = random_local_sl2(&mut r, 10.0);
            let raw = a.apply_pure(psi.amplitudes());
            let n2: f64 = raw.iter().map(|z| z.norm_sqr()).sum();
            let normed = PureState::normalize(raw).unwrap();
            let lhs = tau3_pure(&normed).unwrap() * n2;
            prop_assert!((lhs - tau3_pure(&psi).unwrap()).abs() <= 1e-8);
        }

        #[test]
        fn permutation_invariance_and_range(seed in any::<u64>()) {
            let mut r = rng(seed);
            let psi = random_pure(&mut r);
            let t = tau3_pure(&psi).unwrap();
            prop_assert!((0.0..=1.0).contains(&t));
            for perm in [[1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]] {
                let q = PureState::new(permute(psi.amplitudes(), perm)).unwrap();
                prop_assert!((tau3_pure(&q).unwrap() - t).abs() <= 1e-12);
            }
        }
    }
}

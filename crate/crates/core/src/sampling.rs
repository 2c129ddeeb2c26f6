//! Seeded random states and local operators.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, ComplexMatrix, DensityMatrix, LocalOperator, PureState, C64, ZERO};
use crate::unitary_opt::su2_from_angles;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gauss_c<R: Rng>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Ginibre-distributed Hermitian matrix.
pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, n, |_, _| gauss_c(rng));
    g.hermitian_part()
}

/// Random unit-trace positive matrix `G G^dagger / tr`, full rank.
pub fn random_density<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    random_density_rank(rng, n, n)
}

/// Random unit-trace positive matrix of rank at most `rank`.
pub fn random_density_rank<R: Rng>(rng: &mut R, n: usize, rank: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, rank, |_, _| gauss_c(rng));
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    m.scale_re(1.0 / tr).hermitian_part()
}

/// Random three-qubit state of the given rank.
pub fn random_state<R: Rng>(rng: &mut R, rank: usize) -> DensityMatrix {
    DensityMatrix::new(random_density_rank(rng, 8, rank)).expect("valid random state")
}

pub fn random_pure<R: Rng>(rng: &mut R) -> PureState {
    let mut a = [ZERO; 8];
    for z in a.iter_mut() {
        *z = gauss_c(rng);
    }
    PureState::normalize(a).expect("nonzero")
}

/// Haar-random element of SU(2).
pub fn random_su2<R: Rng>(rng: &mut R) -> ComplexMatrix {
    let v: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (a, b) = (c(v[0] / n, v[1] / n), c(v[2] / n, v[3] / n));
    ComplexMatrix::m2(a, -b.conj(), b, a.conj())
}

pub fn random_local_unitary<R: Rng>(rng: &mut R) -> LocalOperator {
    LocalOperator::new(random_su2(rng), random_su2(rng), random_su2(rng)).expect("SU(2)")
}

/// Random SL(2,C) element `U diag(s, 1/s) W` with condition number `s^2 <= max_cond`.
pub fn random_sl2<R: Rng>(rng: &mut R, max_cond: f64) -> ComplexMatrix {
    let s = rng.random_range(1.0..max_cond.sqrt());
    let d = ComplexMatrix::diag_real(&[s, 1.0 / s]);
    &(&random_su2(rng) * &d) * &random_su2(rng)
}

pub fn random_local_sl2<R: Rng>(rng: &mut R, max_cond: f64) -> LocalOperator {
    LocalOperator::new(
        random_sl2(rng, max_cond),
        random_sl2(rng, max_cond),
        random_sl2(rng, max_cond),
    )
    .expect("unit determinant")
}

/// Local unitary from nine Euler angles drawn uniformly.
pub fn random_euler_unitary<R: Rng>(rng: &mut R) -> LocalOperator {
    let mut f = || {
        su2_from_angles(
            rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
            rng.random_range(0.0..std::f64::consts::PI),
            rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
        )
    };
    LocalOperator::new(f(), f(), f()).expect("SU(2)")
}

//! Local-unitary orientation of a normalized state before projection.
//!
//! All three criteria depend only on the rotated entries `ρ'_{000,000}`,
//! `ρ'_{111,111}` and `ρ'_{000,111}`, which need just rows 0 and 7 of the
//! rotating operator. The full 8x8 product is formed once, for the winner.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::OptConfig;
use crate::error::{Error, Result};
use crate::ghz_symmetric::{plane_value, tau3_symmetric_exact_unchecked, SymCoords};
use crate::linalg::{ComplexMatrix, DensityMatrix, LocalOperator, C64, ZERO};
use crate::sampling::rng;
use crate::simplex::{minimize, SimplexOptions};
use crate::twirl::coords;

use std::f64::consts::PI;

const SQRT3: f64 = 1.732_050_807_568_877_2;
const INITIAL_STEP: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Criterion {
    MaxTau3,
    MaxFidelity,
    MinHsDistance,
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Criterion::MaxTau3 => "tau3",
            Criterion::MaxFidelity => "fidelity",
            Criterion::MinHsDistance => "hs",
        }
    }
}

impl std::str::FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tau3" => Ok(Criterion::MaxTau3),
            "fidelity" => Ok(Criterion::MaxFidelity),
            "hs" => Ok(Criterion::MinHsDistance),
            other => Err(Error::Invalid(format!("unknown criterion {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptResult {
    pub best_unitary: LocalOperator,
    pub best_angles: [f64; 9],
    pub optimized_state: DensityMatrix,
    pub objective: f64,
    pub restarts_used: usize,
    pub seed: u64,
    /// Best objective reached by each restart, in restart order.
    pub objective_trace: Vec<f64>,
}

/// `Rz(alpha) Ry(beta) Rz(gamma)` with `Rz(t) = diag(e^{-it/2}, e^{it/2})`.
pub fn su2_from_angles(alpha: f64, beta: f64, gamma: f64) -> ComplexMatrix {
    let (cb, sb) = ((0.5 * beta).cos(), (0.5 * beta).sin());
    let em = |t: f64| C64::from_polar(1.0, -0.5 * t);
    let ep = |t: f64| C64::from_polar(1.0, 0.5 * t);
    ComplexMatrix::m2(
        em(alpha) * em(gamma) * cb,
        -em(alpha) * ep(gamma) * sb,
        ep(alpha) * em(gamma) * sb,
        ep(alpha) * ep(gamma) * cb,
    )
}

pub fn local_unitary_from_angles(t: &[f64; 9]) -> LocalOperator {
    LocalOperator::from_trusted([
        su2_from_angles(t[0], t[1], t[2]),
        su2_from_angles(t[3], t[4], t[5]),
        su2_from_angles(t[6], t[7], t[8]),
    ])
}

/// The three GHZ-relevant entries of `V rho V^dagger`.
#[derive(Debug, Clone, Copy)]
struct Corners {
    p000: f64,
    p111: f64,
    coh: C64,
}

fn rotated_corners(rho: &ComplexMatrix, t: &[f64]) -> Corners {
    let u = [
        su2_from_angles(t[0], t[1], t[2]),
        su2_from_angles(t[3], t[4], t[5]),
        su2_from_angles(t[6], t[7], t[8]),
    ];
    // b = 0 gives the row of |000>, b = 1 the row of |111>
    let row = |b: usize| -> [C64; 8] {
        std::array::from_fn(|col| u[0][(b, col >> 2)] * u[1][(b, (col >> 1) & 1)] * u[2][(b, col & 1)])
    };
    let (r0, r7) = (row(0), row(1));
    // rho applied to the conjugated rows
    let mut m0 = [ZERO; 8];
    let mut m7 = [ZERO; 8];
    for i in 0..8 {
        for j in 0..8 {
            m0[i] += rho[(i, j)] * r0[j].conj();
            m7[i] += rho[(i, j)] * r7[j].conj();
        }
    }
    let dot = |r: &[C64; 8], m: &[C64; 8]| r.iter().zip(m).map(|(a, b)| a * b).sum::<C64>();
    Corners {
        p000: dot(&r0, &m0).re,
        p111: dot(&r7, &m7).re,
        coh: dot(&r0, &m7),
    }
}

fn corner_coords(k: &Corners) -> SymCoords {
    SymCoords::new_unchecked(k.coh.re, (k.p000 + k.p111 - 0.25) / SQRT3)
}

fn fidelity(k: &Corners) -> f64 {
    0.5 * (k.p000 + k.p111) + k.coh.re
}

fn objective_of(k: &Corners, crit: Criterion, purity: f64) -> f64 {
    match crit {
        Criterion::MaxTau3 => tau3_symmetric_exact_unchecked(corner_coords(k)),
        Criterion::MaxFidelity => fidelity(k),
        Criterion::MinHsDistance => -(0.5 * (1.0 - 2.0 * fidelity(k) + purity)).max(0.0).sqrt(),
    }
}

fn purity(m: &ComplexMatrix) -> f64 {
    m.as_slice().iter().map(|z| z.norm_sqr()).sum()
}

/// Maximize-me value of the criterion on a unit-trace state.
pub fn evaluate_criterion(rho: &DensityMatrix, crit: Criterion) -> Result<f64> {
    rho.require_unit_trace()?;
    let m = rho.matrix();
    Ok(match crit {
        Criterion::MaxTau3 => tau3_symmetric_exact_unchecked(coords(rho)),
        Criterion::MaxFidelity => 0.5 * (m[(0, 0)].re + m[(7, 7)].re) + m[(0, 7)].re,
        Criterion::MinHsDistance => {
            let f = 0.5 * (m[(0, 0)].re + m[(7, 7)].re) + m[(0, 7)].re;
            -(0.5 * (1.0 - 2.0 * f + purity(m))).max(0.0).sqrt()
        }
    })
}

/// Starting angles: the identity, then uniformly drawn Euler triples.
fn starting_points(seed: u64, restarts: usize) -> Vec<[f64; 9]> {
    let mut r = rng(seed);
    (0..restarts.max(1))
        .map(|k| {
            if k == 0 {
                [0.0; 9]
            } else {
                std::array::from_fn(|i| {
                    if i % 3 == 1 {
                        r.random_range(0.0..=PI)
                    } else {
                        r.random_range(-PI..PI)
                    }
                })
            }
        })
        .collect()
}

fn run_restart(m: &ComplexMatrix, crit: Criterion, start: &[f64; 9], opts: &SimplexOptions, pur: f64) -> ([f64; 9], f64) {
    let value = |t: &[f64]| objective_of(&rotated_corners(m, t), crit, pur);
    let mut best = (*start, value(start));
    let mut consider = |t: &[f64]| {
        let v = value(t);
        if v > best.1 {
            best = (t.try_into().expect("nine angles"), v);
        }
    };

    let mut x = start.to_vec();
    if crit == Criterion::MaxTau3 {
        // the exact surface is flat zero on the W side; climb the plane first
        let r = minimize(|t| -plane_value(corner_coords(&rotated_corners(m, t))), &x, opts);
        consider(&r.x);
        x = r.x;
    }
    let r = minimize(|t| -value(t), &x, opts);
    consider(&r.x);
    best
}

/// Searches local unitaries maximizing the criterion on `V rho V^dagger`.
pub fn optimize(rho: &DensityMatrix, crit: Criterion, cfg: &OptConfig) -> Result<OptResult> {
    rho.require_unit_trace()?;
    let m = rho.matrix();
    let pur = purity(m);
    let opts = SimplexOptions {
        max_evals: cfg.max_evals,
        xtol: cfg.xtol,
        ftol: cfg.tol,
        initial_step: INITIAL_STEP,
        reinits: 1,
    };
    let starts = starting_points(cfg.seed, cfg.restarts);
    let work = |s: &[f64; 9]| run_restart(m, crit, s, &opts, pur);
    let results: Vec<([f64; 9], f64)> = if cfg.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?;
        pool.install(|| starts.par_iter().map(work).collect())
    } else {
        starts.iter().map(work).collect()
    };

    let mut best = 0;
    for (k, r) in results.iter().enumerate() {
        if r.1 > results[best].1 {
            best = k;
        }
    }
    let angles = results[best].0;
    let v = local_unitary_from_angles(&angles);
    let optimized_state = DensityMatrix::from_trusted(v.conjugate(m).hermitian_part());
    let objective = evaluate_criterion(&optimized_state, crit)?;
    Ok(OptResult {
        best_unitary: v,
        best_angles: angles,
        optimized_state,
        objective,
        restarts_used: results.len(),
        seed: cfg.seed,
        objective_trace: results.iter().map(|r| r.1).collect(),
    })
}

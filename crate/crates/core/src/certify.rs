//! Certified lower bound, geometric upper estimates and fixed-subspace
//! decomposition search.
//!
//! The lower bound runs: normal form, local-unitary orientation of the
//! normalized normal form, twirl, exact symmetric three-tangle, times the
//! trace of the normal form. Upper bounds come from explicit decompositions
//! and are reported alongside but never mixed into the certified value.

use rand_distr::StandardNormal;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{Config, COINCIDENCE_TOL, SUBSPACE_TOL};
use crate::error::{Error, Result};
use crate::ghz_symmetric::{
    coords_of_symmetric, tau3_symmetric_exact, tau3_symmetric_exact_unchecked, witness_expectation, SymCoords,
    WitnessKind, WitnessValue,
};
use crate::linalg::{c, herm_eigensystem, ComplexMatrix, DensityMatrix, PureState, C64, ZERO};
use crate::normal_form::normal_form;
use crate::pure_tangle::tau3_unnormalized;
use crate::sampling::rng;
use crate::simplex::{minimize, SimplexOptions};
use crate::twirl::{coords, project, tau3_approx_rho};
use crate::unitary_opt::{optimize, Criterion};

const PSD_TOL: f64 = 1e-10;
const LAMBDA_FLOOR: f64 = 1e-6;
const LAMBDA_ITERATIONS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    GhzClassCertified,
    Inconclusive,
}

/// Summary of the local-unitary search used for the bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptSummary {
    pub objective: f64,
    pub restarts_used: usize,
    pub seed: u64,
    pub best_angles: [f64; 9],
    pub objective_trace: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    /// `None` when the oriented normal form is already GHZ-symmetric.
    pub lambda: Option<f64>,
    pub tau3_minus: f64,
    /// Upper estimate for the input state (already multiplied by the normal-form trace).
    pub upper_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub lower_bound: f64,
    pub trace_nf: f64,
    pub nf_iterations: usize,
    pub nf_converged: bool,
    pub degenerate_nf: bool,
    /// Twirl coordinates of the oriented, normalized normal form.
    pub coords_after: SymCoords,
    pub tau3_symmetric: f64,
    pub criterion: Criterion,
    pub opt: Option<OptSummary>,
    /// Witness-plane value on the raw input.
    pub approx_bound: f64,
    /// Witnesses evaluated on the raw input.
    pub witness_values: Vec<WitnessValue>,
    /// Best GHZ fidelity of the normalized normal form. Diagnostic only.
    pub fidelity_heuristic: f64,
    pub error_estimate: Option<ErrorEstimate>,
    pub upper_bound_spectral: f64,
    pub verdict: Verdict,
}

pub fn lower_bound(rho: &DensityMatrix, crit: Criterion, cfg: &Config) -> Result<BoundReport> {
    run_pipeline(rho, crit, cfg, false)
}

/// As [`lower_bound`], additionally filling the error estimate.
pub fn lower_bound_with_estimate(rho: &DensityMatrix, crit: Criterion, cfg: &Config) -> Result<BoundReport> {
    run_pipeline(rho, crit, cfg, true)
}

fn run_pipeline(rho: &DensityMatrix, crit: Criterion, cfg: &Config, with_estimate: bool) -> Result<BoundReport> {
    rho.require_unit_trace()?;
    let approx_bound = tau3_approx_rho(rho);
    let witness_values = WitnessKind::ALL.iter().map(|&k| witness_expectation(rho, k)).collect();
    let upper_bound_spectral = spectral_upper_bound(rho);

    let nf = normal_form(rho, &cfg.normal_form);
    if nf.degenerate {
        return Ok(BoundReport {
            lower_bound: 0.0,
            trace_nf: nf.trace_nf,
            nf_iterations: nf.iterations,
            nf_converged: nf.converged,
            degenerate_nf: true,
            coords_after: coords(rho),
            tau3_symmetric: 0.0,
            criterion: crit,
            opt: None,
            approx_bound,
            witness_values,
            fidelity_heuristic: 0.0,
            error_estimate: None,
            upper_bound_spectral,
            verdict: Verdict::Inconclusive,
        });
    }

    let normalized = nf.nf.normalized();
    let opt = optimize(&normalized, crit, &cfg.opt)?;
    let oriented = &opt.optimized_state;
    let coords_after = coords(oriented);
    let tau3_symmetric = tau3_symmetric_exact_unchecked(coords_after);
    let lower = tau3_symmetric * nf.trace_nf;

    let fidelity_heuristic = if crit == Criterion::MaxFidelity {
        opt.objective
    } else {
        optimize(&normalized, Criterion::MaxFidelity, &cfg.opt)?.objective
    };

    let error_estimate = if with_estimate {
        let sym = project(oriented);
        Some(match boundary_lambda(oriented, &sym) {
            Ok((lambda, minus)) => {
                let tau3_minus = spectral_upper_bound(&minus).min(1.0);
                let upper = convexity_upper(lambda, tau3_minus, tau3_symmetric);
                ErrorEstimate {
                    lambda: Some(lambda),
                    tau3_minus,
                    upper_bound: upper * nf.trace_nf,
                }
            }
            Err(Error::StatesCoincide) => ErrorEstimate {
                lambda: None,
                tau3_minus: tau3_symmetric,
                upper_bound: lower,
            },
            Err(e) => return Err(e),
        })
    } else {
        None
    };

    Ok(BoundReport {
        lower_bound: lower,
        trace_nf: nf.trace_nf,
        nf_iterations: nf.iterations,
        nf_converged: nf.converged,
        degenerate_nf: false,
        coords_after,
        tau3_symmetric,
        criterion: crit,
        opt: Some(OptSummary {
            objective: opt.objective,
            restarts_used: opt.restarts_used,
            seed: opt.seed,
            best_angles: opt.best_angles,
            objective_trace: opt.objective_trace.clone(),
        }),
        approx_bound,
        witness_values,
        fidelity_heuristic,
        error_estimate,
        upper_bound_spectral,
        verdict: if lower > 0.0 {
            Verdict::GhzClassCertified
        } else {
            Verdict::Inconclusive
        },
    })
}

/// `rho_s + (rho_nf - rho_s) / lambda`.
fn extend(rho_nf: &ComplexMatrix, rho_s: &ComplexMatrix, lambda: f64) -> ComplexMatrix {
    rho_s + &(rho_nf - rho_s).scale_re(1.0 / lambda)
}

fn is_psd(m: &ComplexMatrix) -> bool {
    herm_eigensystem(m).map(|e| e.values[0] >= -PSD_TOL).unwrap_or(false)
}

/// Smallest `lambda` in (0, 1] for which the extension of `rho_s` through
/// `rho_nf` stays positive, together with the extended state.
///
/// Returns `lambda = 1` when `rho_nf` is itself on the boundary in that direction.
pub fn boundary_lambda(rho_nf: &DensityMatrix, rho_s: &DensityMatrix) -> Result<(f64, DensityMatrix)> {
    rho_nf.require_unit_trace()?;
    rho_s.require_unit_trace()?;
    let (a, b) = (rho_nf.matrix(), rho_s.matrix());
    if a.max_abs_diff(b) <= COINCIDENCE_TOL {
        return Err(Error::StatesCoincide);
    }
    if is_psd(&extend(a, b, LAMBDA_FLOOR)) {
        let m = extend(a, b, LAMBDA_FLOOR).hermitian_part();
        return Ok((LAMBDA_FLOOR, DensityMatrix::from_trusted(m)));
    }
    let (mut lo, mut hi) = (LAMBDA_FLOOR, 1.0);
    for _ in 0..LAMBDA_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if is_psd(&extend(a, b, mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let m = extend(a, b, hi).hermitian_part();
    Ok((hi, DensityMatrix::from_trusted(m)))
}

/// `lambda * tau3_minus + (1 - lambda) * tau3_s`.
pub fn convexity_upper(lambda: f64, tau3_minus: f64, tau3_s: f64) -> f64 {
    lambda * tau3_minus + (1.0 - lambda) * tau3_s
}

/// Upper estimate of the three-tangle of `rho_nf` from its symmetric projection.
pub fn error_estimate(rho_nf: &DensityMatrix, rho_s: &DensityMatrix, tau3_minus: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&tau3_minus) {
        return Err(Error::OutOfRange {
            name: "tau3_minus",
            value: tau3_minus,
        });
    }
    let (lambda, _) = boundary_lambda(rho_nf, rho_s)?;
    let tau3_s = tau3_symmetric_exact(coords_of_symmetric(rho_s)?)?;
    Ok(convexity_upper(lambda, tau3_minus, tau3_s))
}

/// Average three-tangle of the eigen-decomposition.
pub fn spectral_upper_bound(rho: &DensityMatrix) -> f64 {
    let es = rho.eigensystem();
    let mut total = 0.0;
    for (k, &l) in es.values.iter().enumerate() {
        if l <= 0.0 {
            continue;
        }
        let v = es.vector(k);
        let amp: [C64; 8] = std::array::from_fn(|i| v[i]);
        total += l * tau3_unnormalized(&amp).min(1.0);
    }
    total
}

/// Pure-state decomposition `rho = sum_j weights[j] |states[j]><states[j]|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub weights: Vec<f64>,
    pub states: Vec<PureState>,
}

impl Decomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(8, 8);
        for (p, s) in self.weights.iter().zip(&self.states) {
            m = &m + &ComplexMatrix::outer(s.amplitudes()).scale_re(*p);
        }
        m
    }

    pub fn average_tau3(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.states)
            .map(|(p, s)| p * tau3_unnormalized(s.amplitudes()))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubspaceSearchConfig {
    pub seed: u64,
    pub restarts: usize,
    pub max_evals: usize,
}

impl Default for SubspaceSearchConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 64,
            max_evals: 4000,
        }
    }
}

fn orthonormalize(basis: &[PureState]) -> Vec<[C64; 8]> {
    let mut out: Vec<[C64; 8]> = Vec::new();
    for b in basis {
        let mut v = *b.amplitudes();
        for u in &out {
            let ov: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for i in 0..8 {
                v[i] -= ov * u[i];
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-12 {
            out.push(v.map(|z| z / n));
        }
    }
    out
}

/// `m (m^dagger m)^{-1/2}`, the nearest matrix with orthonormal columns.
fn polar_isometry(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    let g = &m.adjoint() * m;
    let es = herm_eigensystem(&g).ok()?;
    if es.values[0] <= 1e-14 * es.values[es.values.len() - 1].max(1e-300) {
        return None;
    }
    Some(m * &es.reconstruct_with(|l| 1.0 / l.sqrt()))
}

/// Unnormalized decomposition vectors `psi_j = sum_i U_ji w_i`.
fn mixed_vectors(u: &ComplexMatrix, w: &[[C64; 8]]) -> Vec<[C64; 8]> {
    (0..u.rows())
        .map(|j| {
            let mut v = [ZERO; 8];
            for (i, wi) in w.iter().enumerate() {
                for a in 0..8 {
                    v[a] += u[(j, i)] * wi[a];
                }
            }
            v
        })
        .collect()
}

fn params_to_matrix(p: &[f64], k: usize, r: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(k, r, |j, i| c(p[2 * (j * r + i)], p[2 * (j * r + i) + 1]))
}

/// Minimizes the average three-tangle over `k`-term decompositions of `rho`
/// whose states lie in the span of `basis`.
pub fn subspace_decomposition_search(
    rho: &DensityMatrix,
    basis: &[PureState],
    k: usize,
    cfg: &SubspaceSearchConfig,
) -> Result<(Decomposition, f64)> {
    let onb = orthonormalize(basis);
    if onb.is_empty() {
        return Err(Error::Invalid("empty subspace basis".into()));
    }
    let proj = onb
        .iter()
        .fold(ComplexMatrix::zeros(8, 8), |acc, u| &acc + &ComplexMatrix::outer(u));
    let m = rho.matrix();
    let leak = (&proj * &(m * &proj)).max_abs_diff(m);
    if leak > SUBSPACE_TOL {
        return Err(Error::UnsupportedState(leak));
    }

    let es = rho.eigensystem();
    let w: Vec<[C64; 8]> = es
        .values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > SUBSPACE_TOL)
        .map(|(idx, &l)| {
            let v = es.vector(idx);
            std::array::from_fn(|a| v[a] * l.sqrt())
        })
        .collect();
    let r = w.len();
    if k < r {
        return Err(Error::Invalid(format!("k = {k} is below the rank {r}")));
    }

    let objective = |p: &[f64]| -> f64 {
        match polar_isometry(&params_to_matrix(p, k, r)) {
            Some(u) => mixed_vectors(&u, &w).iter().map(tau3_unnormalized).sum(),
            None => f64::INFINITY,
        }
    };

    let opts = SimplexOptions {
        max_evals: cfg.max_evals,
        xtol: 1e-9,
        ftol: 1e-12,
        initial_step: 0.3,
        reinits: 2,
    };
    let mut gen = rng(cfg.seed);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for restart in 0..cfg.restarts.max(1) {
        let start: Vec<f64> = if restart == 0 {
            let mut p = vec![0.0; 2 * k * r];
            for i in 0..r {
                p[2 * (i * r + i)] = 1.0;
            }
            p
        } else {
            (0..2 * k * r).map(|_| gen.sample(StandardNormal)).collect()
        };
        let res = minimize(objective, &start, &opts);
        if best.as_ref().map_or(true, |b| res.f < b.1) {
            best = Some((res.x, res.f));
        }
    }
    let (p, _) = best.expect("at least one restart");
    let u = polar_isometry(&params_to_matrix(&p, k, r)).expect("finite objective implies full rank");

    let mut weights = Vec::new();
    let mut states = Vec::new();
    for v in mixed_vectors(&u, &w) {
        let n2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if n2 > 0.0 {
            weights.push(n2);
            states.push(PureState::normalize(v)?);
        }
    }
    let dec = Decomposition { weights, states };
    let avg = dec.average_tau3();
    Ok((dec, avg))
}

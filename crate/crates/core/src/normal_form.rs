//! SL(2,C)⊗3 normal form by alternating local filtering.
//!
//! Each step replaces qubit j's marginal by a multiple of the identity using
//! the unit-determinant filter `ρ_(j)^{-1/2} / sqrt(det ρ_(j)^{-1/2})`. Plain
//! alternation approaches the normal form only like `1/n` on states whose
//! orbit is not closed, so after every full cycle the product filter of the
//! cycle is also tried at powers 2, 4, 8, ... and kept while the trace keeps
//! dropping. Every accepted state is a legal filtered state, so the trace
//! sequence stays monotone.

use crate::config::{NormalFormConfig, SINGULAR_TOL};
use crate::error::{Error, Result};
use crate::linalg::{c, herm_eigensystem, min_eigenvalue, partial_trace, ComplexMatrix, DensityMatrix, LocalOperator, C64};

const STALL_WINDOW: usize = 200;
const STALL_REL: f64 = 1e-13;
const MAX_DOUBLINGS: u32 = 40;
/// Largest natural log of the condition number of an extrapolated filter.
const MAX_LOG_COND: f64 = 16.0;
const EXTRAPOLATION_PSD_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct NormalFormResult {
    /// Sub-normalized filtered state.
    pub nf: DensityMatrix,
    pub accumulated_filter: LocalOperator,
    pub trace_nf: f64,
    /// Number of full filter cycles performed.
    pub iterations: usize,
    pub converged: bool,
    pub degenerate: bool,
    /// Trace after each cycle.
    pub trace_history: Vec<f64>,
}

/// `(a on qubit j) m (a on qubit j)^dagger` without forming the 8x8 operator.
pub(crate) fn conjugate_on_qubit(m: &ComplexMatrix, j: usize, a: &ComplexMatrix) -> ComplexMatrix {
    let bit = 1usize << (3 - j);
    let mut tmp = ComplexMatrix::zeros(8, 8);
    for i in 0..8 {
        let r = usize::from(i & bit != 0);
        let i0 = i & !bit;
        for k in 0..8 {
            tmp[(i, k)] = a[(r, 0)] * m[(i0, k)] + a[(r, 1)] * m[(i0 | bit, k)];
        }
    }
    let mut out = ComplexMatrix::zeros(8, 8);
    for k in 0..8 {
        let r = usize::from(k & bit != 0);
        let k0 = k & !bit;
        let (b0, b1) = (a[(r, 0)].conj(), a[(r, 1)].conj());
        for i in 0..8 {
            out[(i, k)] = tmp[(i, k0)] * b0 + tmp[(i, k0 | bit)] * b1;
        }
    }
    out
}

fn conjugate_local(m: &ComplexMatrix, ops: &[ComplexMatrix; 3]) -> ComplexMatrix {
    let m = conjugate_on_qubit(m, 1, &ops[0]);
    let m = conjugate_on_qubit(&m, 2, &ops[1]);
    conjugate_on_qubit(&m, 3, &ops[2])
}

/// Unit-determinant filter that maps the 2x2 marginal `m` to a multiple of the identity.
fn marginal_filter(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let t = (m[(0, 0)] + m[(1, 1)]).re;
    let d = m.det2().re;
    if !(t > 0.0) {
        return Err(Error::NearSingularMarginal(0.0));
    }
    let disc = (t * t - 4.0 * d).max(0.0).sqrt();
    let lmin = 2.0 * d / (t + disc) / t;
    if !(lmin > SINGULAR_TOL) {
        return Err(Error::NearSingularMarginal(lmin));
    }
    // sqrt(m) = (m + sqrt(d) I)/sqrt(t + 2 sqrt(d)); its adjugate gives m^{-1/2}
    let sd = d.sqrt();
    let scale = d.powf(0.25) / (sd * (t + 2.0 * sd).sqrt());
    let diag = t + sd;
    Ok(ComplexMatrix::m2(
        c((diag - m[(0, 0)].re) * scale, 0.0),
        -m[(0, 1)] * scale,
        -m[(1, 0)] * scale,
        c((diag - m[(1, 1)].re) * scale, 0.0),
    ))
}

/// One filtering step on qubit `j` (1-based). Returns the filtered matrix and the filter.
pub fn filter_step(rho: &DensityMatrix, j: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    filter_matrix(rho.matrix(), j)
}

fn filter_matrix(m: &ComplexMatrix, j: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let marg = partial_trace(m, j)?;
    let a = marginal_filter(&marg)?;
    let out = conjugate_on_qubit(m, j, &a).hermitian_part();
    Ok((out, a))
}

/// `ln(hi / lo) / 2` for the eigenvalues of a Hermitian positive filter.
fn log_spread(a: &ComplexMatrix) -> f64 {
    match herm_eigensystem(a) {
        Ok(es) => 0.5 * (es.values[1].max(f64::MIN_POSITIVE) / es.values[0].max(f64::MIN_POSITIVE)).ln(),
        Err(_) => f64::INFINITY,
    }
}

/// `a^s` for Hermitian positive `a` with unit determinant, keeping the determinant exact.
fn unit_det_power(a: &ComplexMatrix, s: f64) -> ComplexMatrix {
    let es = herm_eigensystem(a).expect("filters are Hermitian");
    let (lo, hi) = (es.values[0].max(f64::MIN_POSITIVE), es.values[1].max(f64::MIN_POSITIVE));
    let h = 0.5 * (hi / lo).ln();
    let (e_lo, e_hi) = ((-s * h).exp(), (s * h).exp());
    let v = &es.vectors;
    ComplexMatrix::from_fn(2, 2, |i, j| v[(i, 0)] * v[(j, 0)].conj() * e_lo + v[(i, 1)] * v[(j, 1)].conj() * e_hi)
}

/// Max over qubits of `||2 rho_(j)/tr - I||_F`.
pub fn marginal_deviation(m: &ComplexMatrix) -> f64 {
    let tr = m.trace().re;
    (1..=3)
        .map(|j| {
            let p = partial_trace(m, j).expect("8x8 input");
            let d00 = 2.0 * p[(0, 0)].re / tr - 1.0;
            let d11 = 2.0 * p[(1, 1)].re / tr - 1.0;
            let off = 2.0 * p[(0, 1)].norm() / tr;
            (d00 * d00 + d11 * d11 + 2.0 * off * off).sqrt()
        })
        .fold(0.0, f64::max)
}

fn renormalize(a: &ComplexMatrix) -> ComplexMatrix {
    let mut r = a.scale(C64::new(1.0, 0.0) / a.det2().sqrt());
    if r[(0, 0)].re < 0.0 {
        r = r.scale_re(-1.0);
    }
    r
}

pub fn normal_form(rho: &DensityMatrix, cfg: &NormalFormConfig) -> NormalFormResult {
    let mut cur = rho.matrix().clone();
    let mut acc = [ComplexMatrix::identity(2), ComplexMatrix::identity(2), ComplexMatrix::identity(2)];
    let mut history = Vec::new();
    let mut converged = false;
    let mut degenerate = false;
    let mut iterations = 0;

    while iterations < cfg.max_iter {
        iterations += 1;
        let start = cur.clone();
        let mut cycle: Vec<ComplexMatrix> = Vec::with_capacity(3);
        for j in 1..=3 {
            match filter_matrix(&cur, j) {
                Ok((next, a)) => {
                    cur = next;
                    cycle.push(a);
                }
                Err(_) => {
                    degenerate = true;
                    break;
                }
            }
        }
        if degenerate {
            break;
        }
        let cycle: [ComplexMatrix; 3] = [cycle[0].clone(), cycle[1].clone(), cycle[2].clone()];
        let mut applied = cycle.clone();

        let mut best_trace = cur.trace().re;
        if marginal_deviation(&cur) > cfg.eps_nf {
            let spread = cycle.iter().map(log_spread).fold(0.0, f64::max);
            for k in 1..=MAX_DOUBLINGS {
                let s = 2f64.powi(k as i32);
                if 2.0 * s * spread > MAX_LOG_COND {
                    break;
                }
                let ops = [
                    unit_det_power(&cycle[0], s),
                    unit_det_power(&cycle[1], s),
                    unit_det_power(&cycle[2], s),
                ];
                let cand = conjugate_local(&start, &ops).hermitian_part();
                let tr = cand.trace().re;
                let sound = tr.is_finite()
                    && tr >= 0.0
                    && min_eigenvalue(&cand).is_ok_and(|l| l >= -EXTRAPOLATION_PSD_TOL * tr);
                if sound && tr < best_trace {
                    best_trace = tr;
                    cur = cand;
                    applied = ops;
                } else {
                    break;
                }
            }
        }
        for q in 0..3 {
            acc[q] = renormalize(&(&applied[q] * &acc[q]));
        }

        let tr = cur.trace().re;
        history.push(tr);
        if !(tr >= cfg.trace_floor) {
            degenerate = true;
            break;
        }
        if marginal_deviation(&cur) <= cfg.eps_nf {
            converged = true;
            break;
        }
        // rounding can leave the deviation just above eps_nf with the trace frozen
        if history.len() > STALL_WINDOW {
            let old = history[history.len() - 1 - STALL_WINDOW];
            if old - tr <= STALL_REL * old {
                break;
            }
        }
    }

    let trace_nf = cur.trace().re;
    NormalFormResult {
        nf: DensityMatrix::from_trusted(cur),
        accumulated_filter: LocalOperator::from_trusted(acc),
        trace_nf,
        iterations,
        converged,
        degenerate,
        trace_history: history,
    }
}

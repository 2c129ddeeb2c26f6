//! Acceptance suite. Prints one line per criterion and exits nonzero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;

use tangle_bound::certify::{
    boundary_lambda, lower_bound, lower_bound_with_estimate, spectral_upper_bound,
    subspace_decomposition_search, SubspaceSearchConfig,
};
use tangle_bound::ghz_symmetric::{
    ghz_w_line, state_of_coords, tau3_symmetric_approx, tau3_symmetric_exact, witness_expectation, SymCoords,
    WitnessKind,
};
use tangle_bound::linalg::{c, ComplexMatrix, PureState, C64};
use tangle_bound::normal_form::normal_form;
use tangle_bound::pure_tangle::tau3_pure;
use tangle_bound::sampling::{random_local_unitary, random_state, rng};
use tangle_bound::states::{ghz_plus, phi_state, rho1, rho2, rho2_exact_tau3, rho3, w_state};
use tangle_bound::tomo::{expectations_of, ghz_elements_minimal, pit_record, reconstruct, ReconstructMode};
use tangle_bound::twirl::{coords, pit_project, project};
use tangle_bound::unitary_opt::optimize;
use tangle_bound::{Config, Criterion};

const SQRT3: f64 = 1.732_050_807_568_877_2;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let t = Instant::now();
    let mut o = f();
    let el = t.elapsed();
    if let Some(limit) = limit {
        if el > limit {
            o.pass = false;
            o.detail.push_str(&format!("; runtime {:.2?} over {:.0?}", el, limit));
            return o;
        }
    }
    o.detail.push_str(&format!("; {:.2?}", el));
    o
}

/// y of the border curve above |x|, found by bisection on the curve parameter.
/// `None` to the right of the curve's end point.
fn curve_height(x: f64) -> Option<f64> {
    let x = x.abs();
    let end = ghz_w_line(1.0).unwrap();
    if x > end.x {
        return None;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ghz_w_line(mid).unwrap().x < x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(ghz_w_line(0.5 * (lo + hi)).unwrap().y)
}

fn below_curve(p: SymCoords) -> bool {
    curve_height(p.x).is_some_and(|h| p.y <= h)
}

fn criterion_1() -> Outcome {
    let g = tau3_pure(&ghz_plus()).unwrap();
    let w = tau3_pure(&w_state()).unwrap();
    outcome(
        (g - 1.0).abs() <= 1e-12 && w.abs() <= 1e-12,
        format!("tau3(GHZ) = {g:.3e}, tau3(W) = {w:.3e}"),
    )
}

fn criterion_2() -> Outcome {
    let p = ghz_w_line(1.0).unwrap();
    let dx = (p.x - 0.375).abs();
    let dy = (p.y - SQRT3 / 6.0).abs();
    let wit = witness_expectation(&state_of_coords(p).unwrap(), WitnessKind::TangentPlus).expectation;
    outcome(
        dx <= 1e-15 && dy <= 1e-15 && wit.abs() <= 1e-12,
        format!("point ({:.17}, {:.17}), W+ expectation {wit:.3e}", p.x, p.y),
    )
}

fn criterion_3() -> Outcome {
    let n = 50;
    let (mut points, mut zero_bad, mut order_bad) = (0, 0, 0);
    let mut worst_margin: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let x = -0.5 + i as f64 / (n - 1) as f64;
            let y = -SQRT3 / 12.0 + j as f64 / (n - 1) as f64 * (SQRT3 / 3.0);
            let Ok(p) = SymCoords::new(x, y) else { continue };
            points += 1;
            let exact = tau3_symmetric_exact(p).unwrap();
            let approx = tau3_symmetric_approx(p).unwrap();
            if below_curve(p) && exact != 0.0 {
                zero_bad += 1;
            }
            worst_margin = worst_margin.min(exact - approx);
            if exact < approx - 1e-9 {
                order_bad += 1;
            }
        }
    }
    let corners = [
        tau3_symmetric_exact(SymCoords::new(0.5, SQRT3 / 4.0).unwrap()).unwrap(),
        tau3_symmetric_exact(SymCoords::new(-0.5, SQRT3 / 4.0).unwrap()).unwrap(),
    ];
    let corners_ok = corners.iter().all(|&t| (t - 1.0).abs() <= 1e-12);

    // second differences along rays from the corner to curve points
    let g = SymCoords::new(0.5, SQRT3 / 4.0).unwrap();
    let mut ray_res: f64 = 0.0;
    for k in 0..=20 {
        let w = ghz_w_line(k as f64 / 20.0).unwrap();
        for m in 1..40 {
            let (a, b) = (m as f64 / 40.0 - 0.02, m as f64 / 40.0 + 0.02);
            let (a, b) = (a.max(0.0), b.min(1.0));
            let ta = tau3_symmetric_exact(w.lerp(&g, a)).unwrap();
            let tb = tau3_symmetric_exact(w.lerp(&g, b)).unwrap();
            let tm = tau3_symmetric_exact(w.lerp(&g, 0.5 * (a + b))).unwrap();
            ray_res = ray_res.max((tm - 0.5 * (ta + tb)).abs());
        }
        let at_w = tau3_symmetric_exact(w).unwrap();
        ray_res = ray_res.max(at_w.abs());
    }
    outcome(
        zero_bad == 0 && corners_ok && ray_res <= 1e-9 && order_bad == 0,
        format!(
            "{points} grid points, {zero_bad} nonzero below curve, corners {corners:?}, ray residual {ray_res:.2e}, min exact-approx {worst_margin:.2e}"
        ),
    )
}

fn criterion_4() -> Outcome {
    let cfg = Config::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for p in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let rho = rho1(p).unwrap();
        let lb = lower_bound(&rho, Criterion::MaxTau3, &cfg).unwrap().lower_bound;
        let sp = spectral_upper_bound(&rho);
        pass &= (lb - p).abs() <= 1e-4 && (sp - p).abs() <= 1e-12;
        parts.push(format!("p={p}: lb {lb:.6}, spectral {sp:.12}"));
    }
    outcome(pass, parts.join(", "))
}

fn criterion_5() -> Outcome {
    let cfg = Config::default();
    let p0 = {
        let t = 2f64.powf(1.0 / 3.0);
        t / (t + 0.75)
    };
    let exact = |p: f64| ((p - p0) / (1.0 - p0)).max(0.0);
    let mut pass = true;
    let mut parts = Vec::new();
    for p in [0.8, 0.9, 1.0] {
        let lb = lower_bound(&rho2(p).unwrap(), Criterion::MaxTau3, &cfg).unwrap().lower_bound;
        let (lo, hi) = ((4.0 * p - 3.0).max(0.0) - 0.02, exact(p) + 1e-6);
        pass &= lb >= lo && lb <= hi;
        parts.push(format!("p={p}: lb {lb:.4} in [{lo:.4}, {hi:.4}]"));
    }
    let lb07 = lower_bound(&rho2(0.7).unwrap(), Criterion::MaxTau3, &cfg).unwrap().lower_bound;
    pass &= lb07 == 0.0 && (exact(0.7) - 0.196).abs() < 5e-4 && (rho2_exact_tau3(0.7) - exact(0.7)).abs() < 1e-15;
    parts.push(format!("p=0.7: lb {lb07}, exact {:.4}", exact(0.7)));

    // the documented gap refers to the raw state taken as its own normal form,
    // twirled without any local-unitary orientation
    let r = rho2(0.75).unwrap();
    let raw_sym = tau3_symmetric_exact(coords(&r)).unwrap();
    let gap = exact(0.75) - raw_sym;
    pass &= (gap - (0.75 - p0) / (1.0 - p0)).abs() <= 0.01;
    let full = lower_bound(&r, Criterion::MaxTau3, &cfg).unwrap().lower_bound;
    parts.push(format!(
        "gap(0.75) {gap:.4} vs {:.4}; with filtering and orientation the bound is {full:.4}",
        (0.75 - p0) / (1.0 - p0)
    ));
    outcome(pass, parts.join(", "))
}

fn criterion_6() -> Outcome {
    let rho = rho3();
    let rep = lower_bound(&rho, Criterion::MaxTau3, &Config::default()).unwrap();
    let proj = coords(&rho);
    let in_w = below_curve(proj) && tau3_symmetric_exact(proj).unwrap() == 0.0;
    let basis = [PureState::basis(0), phi_state(), PureState::basis(7)];
    let (dec, avg) = subspace_decomposition_search(&rho, &basis, 3, &SubspaceSearchConfig::default()).unwrap();
    let resid = dec.reconstruct().max_abs_diff(rho.matrix());
    outcome(
        rep.lower_bound == 0.0 && in_w && avg <= 5e-3 && resid <= 1e-8,
        format!(
            "lb {}, projection ({:.4}, {:.4}) in W region: {in_w}, subspace avg tau3 {avg:.2e}, residual {resid:.2e}",
            rep.lower_bound, proj.x, proj.y
        ),
    )
}

fn criterion_7() -> Outcome {
    let cfg = Config::default();
    let mut worst: f64 = 1.0;
    for seed in 0..20 {
        let v = random_local_unitary(&mut rng(1000 + seed));
        let psi = PureState::normalize(v.apply_pure(ghz_plus().amplitudes())).unwrap();
        let lb = lower_bound(&psi.projector(), Criterion::MaxTau3, &cfg).unwrap().lower_bound;
        worst = worst.min(lb);
    }
    outcome(worst >= 1.0 - 1e-4, format!("worst bound over 20 rotations {worst:.8}"))
}

fn criterion_8() -> Outcome {
    let mut r = rng(8);
    let mut round: f64 = 0.0;
    let mut pit: f64 = 0.0;
    for k in 0..100 {
        let rank = 1 + k % 8;
        let rho = random_state(&mut r, rank);
        let rec = expectations_of(&rho);
        let (back, _) = reconstruct(&rec, ReconstructMode::Strict).unwrap();
        round = round.max(back.matrix().max_abs_diff(rho.matrix()));
        let (sym, _) = reconstruct(&pit_record(&rec), ReconstructMode::Strict).unwrap();
        pit = pit.max(sym.matrix().max_abs_diff(pit_project(&rho).matrix()));
    }
    let e = ghz_elements_minimal(&expectations_of(&ghz_plus().projector()), true).unwrap();
    let elems_ok = (e.p000 - 0.5).abs() <= 1e-15
        && (e.p111 - 0.5).abs() <= 1e-15
        && (e.c_re - 0.5).abs() <= 1e-15
        && e.c_im.is_some_and(|v| v.abs() <= 1e-15);
    outcome(
        round <= 1e-12 && pit <= 1e-10 && elems_ok,
        format!(
            "round trip {round:.2e}, PIT {pit:.2e}, GHZ elements ({}, {}, {}, {:?})",
            e.p000, e.p111, e.c_re, e.c_im
        ),
    )
}

fn criterion_9() -> Outcome {
    let cfg = Config::default();
    let rho = rho1(0.5).unwrap();
    let rep = lower_bound_with_estimate(&rho, Criterion::MaxTau3, &cfg).unwrap();
    let lb = rep.lower_bound;
    let up = rep.error_estimate.map(|e| e.upper_bound).unwrap_or(f64::NAN);

    // the oriented normal form of this state is already symmetric, so the
    // boundary construction is checked on the raw state as well
    let nf = normal_form(&rho, &cfg.normal_form);
    let oriented = optimize(&nf.nf.normalized(), Criterion::MaxTau3, &cfg.opt).unwrap().optimized_state;
    let mut pass = up >= lb && up <= lb + 2e-3;
    let mut parts = vec![format!("lb {lb:.6}, upper {up:.6}")];
    for (name, state) in [("oriented normal form", &oriented), ("raw state", &rho)] {
        match boundary_lambda(state, &project(state)) {
            Ok((lambda, minus)) => {
                let me = minus.min_eigenvalue();
                pass &= me.abs() <= 1e-9;
                parts.push(format!("{name}: lambda {lambda:.6}, min eig {me:.2e}"));
            }
            Err(e) => parts.push(format!("{name}: {e}")),
        }
    }
    outcome(pass, parts.join(", "))
}

/// Random element of the symmetry group acting on basis states:
/// `|i> -> phase(i) |g(i)>`.
fn group_sample<R: Rng>(r: &mut R) -> ([usize; 8], [C64; 8]) {
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let perm = perms[r.random_range(0..6)];
    let flip = r.random_bool(0.5);
    let f1 = r.random_range(0.0..2.0 * PI);
    let f2 = r.random_range(0.0..2.0 * PI);
    let angles = [f1, f2, -(f1 + f2)];
    let mut target = [0; 8];
    let mut phase = [c(0.0, 0.0); 8];
    for i in 0..8 {
        let bits = [(i >> 2) & 1, (i >> 1) & 1, i & 1];
        let arg: f64 = (0..3).map(|q| angles[q] * (1.0 - 2.0 * bits[q] as f64)).sum();
        phase[i] = C64::from_polar(1.0, arg);
        let mut nb = [bits[perm[0]], bits[perm[1]], bits[perm[2]]];
        if flip {
            nb = nb.map(|b| 1 - b);
        }
        target[i] = 4 * nb[0] + 2 * nb[1] + nb[2];
    }
    (target, phase)
}

fn criterion_10() -> Outcome {
    let samples = 100_000;
    let mut r = rng(10);
    let mut worst: f64 = 0.0;
    for k in 0..10 {
        let rho = random_state(&mut r, 1 + k % 8);
        let m = rho.matrix();
        let mut acc = ComplexMatrix::zeros(8, 8);
        for _ in 0..samples {
            let (g, ph) = group_sample(&mut r);
            for i in 0..8 {
                for j in 0..8 {
                    acc[(g[i], g[j])] += ph[i] * ph[j].conj() * m[(i, j)];
                }
            }
        }
        let mc = acc.scale_re(1.0 / samples as f64);
        worst = worst.max(mc.max_abs_diff(project(&rho).matrix()));
    }
    outcome(worst <= 3e-3, format!("max entrywise deviation {worst:.2e} over 10 states"))
}

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria: Vec<(&str, Option<Duration>, fn() -> Outcome)> = vec![
        ("pure-state anchors", secs(1), criterion_1),
        ("GHZ/W line end point", None, criterion_2),
        ("exact symmetric surface", secs(5), criterion_3),
        ("rho1 bounds", secs(30), criterion_4),
        ("rho2 bounds and gap", secs(60), criterion_5),
        ("rho3 vanishing tangle", secs(120), criterion_6),
        ("optimizer recovery", secs(120), criterion_7),
        ("tomography round trip", None, criterion_8),
        ("error estimate", None, criterion_9),
        ("twirl oracle", None, criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, limit, f)) in criteria.into_iter().enumerate() {
        let o = timed(limit, f);
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag}: {name}: {}", k + 1, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        println!("all criteria passed");
        ExitCode::SUCCESS
    }
}

//! Nelder–Mead minimization.

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub max_evals: usize,
    /// Stop once the simplex diameter falls below this.
    pub xtol: f64,
    /// Stop once the value spread falls below this and the simplex is reasonably small.
    pub ftol: f64,
    pub initial_step: f64,
    /// Number of times the simplex is rebuilt around the best point after convergence.
    pub reinits: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_evals: 2000,
            xtol: 1e-7,
            ftol: 1e-8,
            initial_step: 0.3,
            reinits: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
}

const LOOSE_DIAMETER: f64 = 1e-4;

fn diameter(pts: &[Vec<f64>]) -> f64 {
    let best = &pts[0];
    pts[1..]
        .iter()
        .map(|p| p.iter().zip(best).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
}

/// Minimizes `f` starting from `x0`. Non-finite values are treated as `+inf`.
pub fn minimize(mut f: impl FnMut(&[f64]) -> f64, x0: &[f64], opts: &SimplexOptions) -> SimplexResult {
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut best_x = x0.to_vec();
    let mut best_f = eval(x0, &mut evals);
    if n == 0 {
        return SimplexResult { x: best_x, f: best_f, evals };
    }

    for _ in 0..=opts.reinits {
        if evals >= opts.max_evals {
            break;
        }
        let mut pts = vec![best_x.clone()];
        let mut vals = vec![best_f];
        for i in 0..n {
            let mut p = best_x.clone();
            p[i] += opts.initial_step;
            vals.push(eval(&p, &mut evals));
            pts.push(p);
        }

        loop {
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
            pts = order.iter().map(|&i| pts[i].clone()).collect();
            vals = order.iter().map(|&i| vals[i]).collect();

            let diam = diameter(&pts);
            let spread = vals[n] - vals[0];
            if evals >= opts.max_evals || diam < opts.xtol || (spread <= opts.ftol && diam < LOOSE_DIAMETER) {
                break;
            }

            let centroid: Vec<f64> = (0..n)
                .map(|k| pts[..n].iter().map(|p| p[k]).sum::<f64>() / n as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&pts[n])
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let xr = along(1.0);
            let fr = eval(&xr, &mut evals);
            if fr < vals[0] {
                let xe = along(2.0);
                let fe = eval(&xe, &mut evals);
                if fe < fr {
                    pts[n] = xe;
                    vals[n] = fe;
                } else {
                    pts[n] = xr;
                    vals[n] = fr;
                }
                continue;
            }
            if fr < vals[n - 1] {
                pts[n] = xr;
                vals[n] = fr;
                continue;
            }
            let (xc, fc) = if fr < vals[n] {
                let xc = along(0.5);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            } else {
                let xc = along(-0.5);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            };
            if fc < vals[n].min(fr) {
                pts[n] = xc;
                vals[n] = fc;
                continue;
            }
            for i in 1..=n {
                let p: Vec<f64> = pts[i].iter().zip(&pts[0]).map(|(a, b)| b + 0.5 * (a - b)).collect();
                vals[i] = eval(&p, &mut evals);
                pts[i] = p;
            }
        }

        if vals[0] < best_f {
            best_f = vals[0];
            best_x = pts[0].clone();
        } else if vals[0] == best_f {
            best_x = pts[0].clone();
        }
    }

    SimplexResult { x: best_x, f: best_f, evals }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let opts = SimplexOptions {
            ftol: 0.0,
            ..Default::default()
        };
        let r = minimize(
            |x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2) + x[2].powi(2),
            &[0.0, 0.0, 0.0],
            &opts,
        );
        assert!(r.f < 1e-12, "{r:?}");
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] + 2.0).abs() < 1e-6);
    }

    #[test]
    fn rosenbrock() {
        let opts = SimplexOptions {
            max_evals: 5000,
            xtol: 1e-10,
            ftol: 0.0,
            ..Default::default()
        };
        let r = minimize(
            |x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2),
            &[-1.2, 1.0],
            &opts,
        );
        assert!((r.x[0] - 1.0).abs() < 1e-5 && (r.x[1] - 1.0).abs() < 1e-5, "{r:?}");
    }

    #[test]
    fn budget_is_respected_and_start_never_lost() {
        let opts = SimplexOptions {
            max_evals: 50,
            ..Default::default()
        };
        let f = |x: &[f64]| x.iter().map(|v| v.sin() + 0.1 * v * v).sum::<f64>();
        let x0 = vec![0.4; 9];
        let r = minimize(f, &x0, &opts);
        assert!(r.evals <= 50 + 10);
        assert!(r.f <= f(&x0));
    }

    #[test]
    fn nan_is_rejected() {
        let r = minimize(
            |x| if x[0] > 0.5 { f64::NAN } else { (x[0] - 0.2).powi(2) },
            &[0.0],
            &SimplexOptions {
                ftol: 0.0,
                ..Default::default()
            },
        );
        assert!((r.x[0] - 0.2).abs() < 1e-6);
    }
}

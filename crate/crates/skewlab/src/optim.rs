//! Derivative-free minimization: Nelder-Mead simplex with a deterministic
//! multi-start wrapper. Used for the extremal Mardia search and for the
//! conditional maximization steps of mixture fitting.

/// Simplex controls. `f_tol` bounds the spread of objective values across
/// the simplex relative to the best value's magnitude.
#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    pub max_iter: usize,
    pub f_tol: f64,
    pub init_step: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead {
            max_iter: 400,
            f_tol: 1e-9,
            init_step: 0.5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptimOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn centroid(points: &[Vec<f64>], skip: usize) -> Vec<f64> {
    let n = points[0].len();
    let mut c = vec![0.0; n];
    for (i, p) in points.iter().enumerate() {
        if i == skip {
            continue;
        }
        for j in 0..n {
            c[j] += p[j];
        }
    }
    let m = (points.len() - 1) as f64;
    for v in &mut c {
        *v /= m;
    }
    c
}

fn blend(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    // a + t (a - b)
    a.iter().zip(b).map(|(&x, &y)| x + t * (x - y)).collect()
}

/// Minimizes `f` from `x0`. Non-finite objective values are treated as +inf,
/// so penalized feasibility boundaries are safe.
pub fn minimize(f: &mut dyn FnMut(&[f64]) -> f64, x0: &[f64], cfg: &NelderMead) -> OptimOutcome {
    let n = x0.len();
    assert!(n > 0, "empty parameter vector");
    let mut eval = |x: &[f64]| -> f64 {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += if p[i].abs() > 1.0 {
            cfg.init_step * p[i].abs()
        } else {
            cfg.init_step
        };
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p)).collect();

    let mut order: Vec<usize> = (0..=n).collect();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iter {
        order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap_or(std::cmp::Ordering::Equal));
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];
        let spread = vals[worst] - vals[best];
        if spread.is_finite() && spread <= cfg.f_tol * (1.0 + vals[best].abs()) {
            converged = true;
            break;
        }
        iterations += 1;

        let c = centroid(&pts, worst);
        let xr = blend(&c, &pts[worst], 1.0);
        let fr = eval(&xr);
        if fr < vals[best] {
            let xe = blend(&c, &pts[worst], 2.0);
            let fe = eval(&xe);
            if fe < fr {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
        } else if fr < vals[second_worst] {
            pts[worst] = xr;
            vals[worst] = fr;
        } else {
            let outside = fr < vals[worst];
            let xc = blend(&c, &pts[worst], if outside { 0.5 } else { -0.5 });
            let fc = eval(&xc);
            let accept = if outside { fc <= fr } else { fc < vals[worst] };
            if accept {
                pts[worst] = xc;
                vals[worst] = fc;
            } else {
                let anchor = pts[best].clone();
                for i in 0..=n {
                    if i == best {
                        continue;
                    }
                    for j in 0..n {
                        pts[i][j] = anchor[j] + 0.5 * (pts[i][j] - anchor[j]);
                    }
                    vals[i] = eval(&pts[i]);
                }
            }
        }
    }

    order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap_or(std::cmp::Ordering::Equal));
    let best = order[0];
    OptimOutcome {
        x: pts[best].clone(),
        value: vals[best],
        iterations,
        converged,
    }
}

/// Runs `minimize` from every start and returns the winner; ties by value
/// break on the lower start index, so the result is deterministic.
pub fn multi_start(
    f: &mut dyn FnMut(&[f64]) -> f64,
    starts: &[Vec<f64>],
    cfg: &NelderMead,
) -> (usize, OptimOutcome) {
    assert!(!starts.is_empty(), "at least one start required");
    let mut best: Option<(usize, OptimOutcome)> = None;
    for (i, s) in starts.iter().enumerate() {
        let out = minimize(f, s, cfg);
        let better = match &best {
            None => true,
            Some((_, b)) => out.value < b.value,
        };
        if better {
            best = Some((i, out));
        }
    }
    best.unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl_reaches_minimum() {
        let mut f = |x: &[f64]| (x[0] - 3.0).powi(2) + 2.0 * (x[1] + 1.0).powi(2) + 5.0;
        let out = minimize(&mut f, &[0.0, 0.0], &NelderMead::default());
        assert!(out.converged);
        assert!((out.x[0] - 3.0).abs() < 1e-4, "{:?}", out.x);
        assert!((out.x[1] + 1.0).abs() < 1e-4, "{:?}", out.x);
        assert!((out.value - 5.0).abs() < 1e-7);
    }

    #[test]
    fn rosenbrock_valley_is_tracked() {
        let mut f = |x: &[f64]| {
            100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2)
        };
        let cfg = NelderMead {
            max_iter: 2000,
            ..NelderMead::default()
        };
        let out = minimize(&mut f, &[-1.2, 1.0], &cfg);
        assert!(out.converged);
        assert!((out.x[0] - 1.0).abs() < 1e-3, "{:?}", out.x);
        assert!((out.x[1] - 1.0).abs() < 1e-3, "{:?}", out.x);
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let mut f = |x: &[f64]| x[0] * x[0];
        let cfg = NelderMead {
            max_iter: 1,
            ..NelderMead::default()
        };
        let out = minimize(&mut f, &[10.0], &cfg);
        assert!(!out.converged);
    }

    #[test]
    fn non_finite_values_are_rejected_not_propagated() {
        let mut f = |x: &[f64]| {
            if x[0] < 0.0 {
                f64::NAN
            } else {
                (x[0] - 2.0).powi(2)
            }
        };
        let out = minimize(&mut f, &[1.0], &NelderMead::default());
        assert!(out.converged);
        assert!((out.x[0] - 2.0).abs() < 1e-4);
    }

    #[test]
    fn multi_start_selects_global_basin() {
        let mut f = |x: &[f64]| (x[0] * x[0] - 1.0).powi(2) + 0.1 * x[0];
        let starts = vec![vec![2.0], vec![-2.0]];
        let (idx, out) = multi_start(&mut f, &starts, &NelderMead::default());
        assert_eq!(idx, 1);
        assert!((out.x[0] + 1.0124).abs() < 1e-2, "{:?}", out.x);
    }
}

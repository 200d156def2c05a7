//! Bounded Nelder-Mead simplex minimizer.
//!
//! Derivative-free, deterministic (fixed initial simplex, no restarts).
//! Every trial point is clamped to the declared box before evaluation, so
//! the objective is never queried outside bounds.

/// Stopping controls. Convergence: relative spread of the simplex values
/// below `rel_tol`, or `max_iters` iterations.
#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub max_iters: usize,
    pub rel_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self { max_iters: 500, rel_tol: 1e-9 }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub fval: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn clamp(x: &mut [f64], bounds: &[(f64, f64)]) {
    for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
        *v = v.clamp(lo, hi);
    }
}

/// Minimize `f` inside the box `bounds`, starting from `init`.
pub fn nelder_mead_bounded<F>(
    mut f: F,
    init: &[f64],
    bounds: &[(f64, f64)],
    opts: &SimplexOptions,
) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    assert_eq!(init.len(), bounds.len());
    let dim = init.len();
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);

    let mut x0 = init.to_vec();
    clamp(&mut x0, bounds);
    let mut simplex = vec![x0.clone()];
    for i in 0..dim {
        let (lo, hi) = bounds[i];
        let span = hi - lo;
        let step = if span.is_finite() && span > 0.0 { 0.10 * span } else { 0.10 * x0[i].abs().max(1.0) };
        let mut p = x0.clone();
        p[i] = if p[i] + step <= hi { p[i] + step } else { p[i] - step };
        clamp(&mut p, bounds);
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iters {
        iterations += 1;
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim - 1];

        // relative spread of the simplex values (Numerical-Recipes form)
        let spread = 2.0 * (values[worst] - values[best]).abs()
            / (values[worst].abs() + values[best].abs() + 1e-12);
        if spread <= opts.rel_tol {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; dim];
        for &i in order.iter().take(dim) {
            for d in 0..dim {
                centroid[d] += simplex[i][d];
            }
        }
        for c in &mut centroid {
            *c /= dim as f64;
        }

        let mut reflected: Vec<f64> = (0..dim)
            .map(|d| centroid[d] + alpha * (centroid[d] - simplex[worst][d]))
            .collect();
        clamp(&mut reflected, bounds);
        let f_r = f(&reflected);

        if f_r < values[best] {
            let mut expanded: Vec<f64> = (0..dim)
                .map(|d| centroid[d] + gamma * (reflected[d] - centroid[d]))
                .collect();
            clamp(&mut expanded, bounds);
            let f_e = f(&expanded);
            if f_e < f_r {
                simplex[worst] = expanded;
                values[worst] = f_e;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_r;
            }
            continue;
        }
        if f_r < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = f_r;
            continue;
        }

        let mut contracted: Vec<f64> = (0..dim)
            .map(|d| centroid[d] + rho * (simplex[worst][d] - centroid[d]))
            .collect();
        clamp(&mut contracted, bounds);
        let f_c = f(&contracted);
        if f_c < values[worst] {
            simplex[worst] = contracted;
            values[worst] = f_c;
            continue;
        }

        // shrink toward the best vertex
        let best_point = simplex[best].clone();
        for &i in order.iter().skip(1) {
            for d in 0..dim {
                simplex[i][d] = best_point[d] + sigma * (simplex[i][d] - best_point[d]);
            }
            clamp(&mut simplex[i], bounds);
            values[i] = f(&simplex[i]);
        }
    }

    let (k, _) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap();
    SimplexResult {
        x: simplex[k].clone(),
        fval: values[k],
        iterations,
        converged,
    }
}

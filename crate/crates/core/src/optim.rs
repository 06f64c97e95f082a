//! Small dense L-BFGS used by the convex-roof search and the feasibility
//! polish.

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Two-loop recursion; returns the descent direction `-H g`.
pub(crate) fn lbfgs_direction(g: &[f64], s: &[Vec<f64>], y: &[Vec<f64>]) -> Vec<f64> {
    let mut q = g.to_vec();
    let m = s.len();
    let mut alpha = vec![0.0; m];
    for i in (0..m).rev() {
        let rho = 1.0 / dot(&y[i], &s[i]);
        alpha[i] = rho * dot(&s[i], &q);
        q.iter_mut()
            .zip(&y[i])
            .for_each(|(qv, yv)| *qv -= alpha[i] * yv);
    }
    if m > 0 {
        let gamma = dot(&s[m - 1], &y[m - 1]) / dot(&y[m - 1], &y[m - 1]);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for i in 0..m {
        let rho = 1.0 / dot(&y[i], &s[i]);
        let beta = rho * dot(&y[i], &q);
        q.iter_mut()
            .zip(&s[i])
            .for_each(|(qv, sv)| *qv += (alpha[i] - beta) * sv);
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

pub(crate) struct Minimum {
    pub x: Vec<f64>,
    pub iterations: usize,
}

/// Minimises a smooth function on `R^n` with backtracking L-BFGS. Stops when
/// the value drops below `target`, the gradient norm below `gtol`, or after
/// `max_iter` iterations.
pub(crate) fn minimize(
    mut f: impl FnMut(&[f64]) -> (f64, Vec<f64>),
    x0: Vec<f64>,
    max_iter: usize,
    gtol: f64,
    target: f64,
) -> Minimum {
    const HISTORY: usize = 10;
    let mut x = x0;
    let (mut fx, mut g) = f(&x);
    let mut s_hist: Vec<Vec<f64>> = Vec::new();
    let mut y_hist: Vec<Vec<f64>> = Vec::new();
    let mut it = 0;
    while it < max_iter {
        it += 1;
        let gn = norm(&g);
        if fx <= target || gn <= gtol {
            break;
        }
        let mut p = lbfgs_direction(&g, &s_hist, &y_hist);
        let mut slope = dot(&g, &p);
        if slope >= 0.0 {
            s_hist.clear();
            y_hist.clear();
            p = g.iter().map(|v| -v).collect();
            slope = -gn * gn;
        }
        let mut t = if s_hist.is_empty() {
            (1.0 / gn).min(1.0)
        } else {
            1.0
        };
        let mut step = None;
        for _ in 0..50 {
            let xn: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + t * b).collect();
            let (fn_, gn_) = f(&xn);
            if fn_ <= fx + 1e-4 * t * slope {
                step = Some((xn, fn_, gn_));
                break;
            }
            t *= 0.5;
        }
        let Some((xn, fn_, gn_)) = step else {
            if s_hist.is_empty() {
                break;
            }
            s_hist.clear();
            y_hist.clear();
            continue;
        };
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn_.iter().zip(&g).map(|(a, b)| a - b).collect();
        if dot(&s, &y) > 1e-16 * norm(&s) * norm(&y) {
            s_hist.push(s);
            y_hist.push(y);
            if s_hist.len() > HISTORY {
                s_hist.remove(0);
                y_hist.remove(0);
            }
        }
        x = xn;
        fx = fn_;
        g = gn_;
    }
    Minimum { x, iterations: it }
}

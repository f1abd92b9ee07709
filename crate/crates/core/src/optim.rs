//! Small derivative-free and cutting-plane solvers used by the bound
//! optimizers: golden-section search, bisection on a monotone predicate,
//! box-constrained coordinate descent and a deep-cut ellipsoid method.

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`.
///
/// Returns `(argmin, min)`. Stops when the bracket is narrower than
/// `tol · max(1, |x|)` or after `max_iter` shrinks.
pub fn golden_section<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    max_iter: usize,
) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..max_iter {
        if hi - lo <= tol * x1.abs().max(1.0) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Largest `x` in `[lo, hi]` with `pred(x)` true, for a predicate that is
/// true on `[lo, x*]` and false above. `pred(lo)` must hold.
pub fn bisect_last_true<P: FnMut(f64) -> bool>(mut pred: P, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    if pred(hi) {
        return hi;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[derive(Debug, Clone)]
pub struct CoordinateDescent {
    /// Initial step per coordinate.
    pub steps: Vec<f64>,
    /// Stop once every step is below this.
    pub min_step: f64,
    /// Improvement over a full sweep below which steps are halved.
    pub sweep_tol: f64,
    pub max_evals: usize,
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

impl CoordinateDescent {
    /// Minimises `f` inside the box `[lower, upper]` starting at `x0`.
    ///
    /// Each sweep tries `±step` along every coordinate and keeps any strict
    /// improvement; a sweep that gains less than `sweep_tol` halves all steps.
    pub fn minimize<F: FnMut(&[f64]) -> f64>(
        &self,
        mut f: F,
        x0: &[f64],
        lower: &[f64],
        upper: &[f64],
    ) -> Minimum {
        let clamp = |v: f64, i: usize| v.max(lower[i]).min(upper[i]);
        let mut x: Vec<f64> = x0.iter().enumerate().map(|(i, &v)| clamp(v, i)).collect();
        let mut best = f(&x);
        let mut evals = 1;
        let mut steps = self.steps.clone();
        while evals < self.max_evals && steps.iter().any(|&s| s >= self.min_step) {
            let start = best;
            for i in 0..x.len() {
                for dir in [1.0, -1.0] {
                    let trial_v = clamp(x[i] + dir * steps[i], i);
                    if trial_v == x[i] {
                        continue;
                    }
                    let old = x[i];
                    x[i] = trial_v;
                    let v = f(&x);
                    evals += 1;
                    if v < best {
                        best = v;
                        break;
                    }
                    x[i] = old;
                }
            }
            if !(start - best >= self.sweep_tol) {
                steps.iter_mut().for_each(|s| *s *= 0.5);
            }
        }
        Minimum { x, value: best, evals }
    }
}

/// One evaluation of a convex feasibility oracle at a query point.
pub enum Cut {
    /// The point satisfies every constraint.
    Feasible,
    /// The point violates a constraint `g(x) ≤ 0` with `g(x) = violation > 0`
    /// and (sub)gradient `gradient`.
    Violated { violation: f64, gradient: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct EllipsoidOutcome {
    pub feasible_point: Option<Vec<f64>>,
    pub iterations: usize,
}

/// Deep-cut ellipsoid method for finding a point of a convex set described
/// by `oracle`, starting from the ball of radius `radius` around `center`.
///
/// Requires dimension ≥ 2. Stops when a feasible center is found, when a cut
/// shows the current ellipsoid holds no feasible point, when the ellipsoid
/// collapses numerically, or after `max_iter` cuts.
pub fn ellipsoid<O: FnMut(&[f64]) -> Cut>(
    mut oracle: O,
    center: &[f64],
    radius: f64,
    max_iter: usize,
) -> EllipsoidOutcome {
    let n = center.len();
    assert!(n >= 2, "ellipsoid method needs dimension >= 2");
    let nf = n as f64;
    let mut c = center.to_vec();
    let mut e = vec![0.0; n * n];
    for i in 0..n {
        e[i * n + i] = radius * radius;
    }
    for it in 0..max_iter {
        let (violation, g) = match oracle(&c) {
            Cut::Feasible => return EllipsoidOutcome { feasible_point: Some(c), iterations: it },
            Cut::Violated { violation, gradient } => (violation, gradient),
        };
        let eg: Vec<f64> = (0..n).map(|i| (0..n).map(|j| e[i * n + j] * g[j]).sum()).collect();
        let geg: f64 = g.iter().zip(&eg).map(|(a, b)| a * b).sum();
        if !(geg > 0.0) || !geg.is_finite() {
            return EllipsoidOutcome { feasible_point: None, iterations: it + 1 };
        }
        let norm = geg.sqrt();
        let alpha = violation / norm;
        if alpha >= 1.0 {
            return EllipsoidOutcome { feasible_point: None, iterations: it + 1 };
        }
        let bvec: Vec<f64> = eg.iter().map(|v| v / norm).collect();
        let step = (1.0 + nf * alpha) / (nf + 1.0);
        for i in 0..n {
            c[i] -= step * bvec[i];
        }
        let scale = nf * nf * (1.0 - alpha * alpha) / (nf * nf - 1.0);
        let shrink = 2.0 * (1.0 + nf * alpha) / ((nf + 1.0) * (1.0 + alpha));
        for i in 0..n {
            for j in 0..n {
                e[i * n + j] = scale * (e[i * n + j] - shrink * bvec[i] * bvec[j]);
            }
        }
        for i in 0..n {
            for j in 0..i {
                let s = 0.5 * (e[i * n + j] + e[j * n + i]);
                e[i * n + j] = s;
                e[j * n + i] = s;
            }
        }
        if (0..n).all(|i| e[i * n + i] < 1e-34) {
            return EllipsoidOutcome { feasible_point: None, iterations: it + 1 };
        }
    }
    EllipsoidOutcome { feasible_point: None, iterations: max_iter }
}

//! Noisy interference for the m-user channel.
//!
//! Treating interference as noise achieves the sum capacity
//! `Σ ½log₂(1 + P_i/(1 + Q_i))` whenever some `ρ ∈ (0,1)^m` satisfies, for
//! every receiver `i`,
//!
//! ```text
//! Σ_{j≠i} c_ji (1+Q_j)² / ρ_j²       ≤ 1 − ρ_i²
//! Σ_{j≠i} c_ij / (1 + Q_j − ρ_j²)    ≤ 1 / (P_i + (1+Q_i)²/ρ_i²)
//! ```
//!
//! In the variables `x_j = ρ_j²` both residuals are convex (sums of `1/x`,
//! `1/(d−x)` and `−x/(Px+K)` terms), so the feasible set is convex. The
//! search exploits that with a deep-cut ellipsoid method after a symmetric
//! line probe and a coarse grid.

use serde::{Deserialize, Serialize};

use crate::channel::{gaussian_rate, m_user_interference_powers, MUserChannel};
use crate::error::{Error, Result};
use crate::optim::{ellipsoid, golden_section, Cut};
use crate::par::Execution;

pub const MAX_SEARCH_USERS: usize = 16;
pub const MAX_ORACLE_USERS: usize = 4;
pub const MAX_ORACLE_RESOLUTION: usize = 64;

const EVAL_BUDGET: usize = 100_000;
const GRID_POINTS: usize = 5;
/// Keeps ρ² strictly inside (0, 1) during the search.
const X_MARGIN: f64 = 1e-12;

/// Correlation vector with every entry in the open interval `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RhoVector(Vec<f64>);

impl RhoVector {
    pub fn new(rho: Vec<f64>) -> Result<Self> {
        if let Some(r) = rho.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
            return Err(Error::domain(format!("correlation {r} outside (0, 1)")));
        }
        Ok(RhoVector(rho))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MUserVerdict {
    pub feasible: bool,
    /// Witness when feasible, otherwise the probe with the smallest largest
    /// residual.
    pub rho: Option<RhoVector>,
    pub sum_capacity: Option<f64>,
    /// Per receiver, the residuals (LHS − RHS) of the two conditions at the
    /// reported correlation vector.
    pub slacks: Vec<[f64; 2]>,
    pub max_slack: f64,
    /// Set when a uniform channel violates `c ≤ 1/(4(m−1))`, which rules out
    /// every symmetric choice of correlations.
    pub provably_infeasible: bool,
    pub evaluations: usize,
}

/// Precomputed per-channel quantities shared by every residual evaluation.
struct Conditions<'a> {
    ch: &'a MUserChannel,
    q: Vec<f64>,
    /// `(1 + Q_i)²`.
    k: Vec<f64>,
}

impl<'a> Conditions<'a> {
    fn new(ch: &'a MUserChannel) -> Self {
        let q = m_user_interference_powers(ch);
        let k = q.iter().map(|q| (1.0 + q) * (1.0 + q)).collect();
        Conditions { ch, q, k }
    }

    fn m(&self) -> usize {
        self.ch.users()
    }

    /// Residuals at squared correlations `x`.
    fn slacks(&self, x: &[f64]) -> Vec<[f64; 2]> {
        let m = self.m();
        (0..m)
            .map(|i| {
                let mut cross = 0.0;
                let mut leak = 0.0;
                for j in (0..m).filter(|&j| j != i) {
                    cross += self.ch.gain(j, i) * self.k[j] / x[j];
                    leak += self.ch.gain(i, j) / (1.0 + self.q[j] - x[j]);
                }
                let first = cross - (1.0 - x[i]);
                let second = leak - 1.0 / (self.ch.power(i) + self.k[i] / x[i]);
                [first, second]
            })
            .collect()
    }

    /// Gradient of residual `which` of receiver `i` with respect to `x`.
    fn gradient(&self, x: &[f64], i: usize, which: usize) -> Vec<f64> {
        let m = self.m();
        let mut g = vec![0.0; m];
        if which == 0 {
            for j in (0..m).filter(|&j| j != i) {
                g[j] = -self.ch.gain(j, i) * self.k[j] / (x[j] * x[j]);
            }
            g[i] = 1.0;
        } else {
            for j in (0..m).filter(|&j| j != i) {
                let d = 1.0 + self.q[j] - x[j];
                g[j] = self.ch.gain(i, j) / (d * d);
            }
            let d = self.ch.power(i) * x[i] + self.k[i];
            g[i] = -self.k[i] / (d * d);
        }
        g
    }

    fn verdict(&self, x: &[f64], evaluations: usize, provably_infeasible: bool) -> MUserVerdict {
        let slacks = self.slacks(x);
        let max_slack = max_residual(&slacks);
        let feasible = max_slack <= 0.0;
        let rho = RhoVector::new(x.iter().map(|v| v.sqrt()).collect()).ok();
        MUserVerdict {
            feasible,
            rho,
            sum_capacity: feasible.then(|| tin_sum_capacity(self.ch)),
            slacks,
            max_slack,
            provably_infeasible: provably_infeasible && !feasible,
            evaluations,
        }
    }
}

fn max_residual(slacks: &[[f64; 2]]) -> f64 {
    slacks.iter().flat_map(|s| s.iter().copied()).fold(f64::NEG_INFINITY, f64::max)
}

/// `Σ ½log₂(1 + P_i/(1 + Q_i))`.
pub fn tin_sum_capacity(ch: &MUserChannel) -> f64 {
    m_user_interference_powers(ch)
        .iter()
        .enumerate()
        .map(|(i, q)| gaussian_rate(ch.power(i) / (1.0 + q)))
        .sum()
}

/// Residuals (LHS − RHS) of both conditions for every receiver.
pub fn check_conditions(ch: &MUserChannel, rho: &RhoVector) -> Result<Vec<[f64; 2]>> {
    if rho.len() != ch.users() {
        return Err(Error::domain(format!(
            "correlation vector has {} entries for a {}-user channel",
            rho.len(),
            ch.users()
        )));
    }
    let x: Vec<f64> = rho.as_slice().iter().map(|r| r * r).collect();
    Ok(Conditions::new(ch).slacks(&x))
}

/// Largest common power `P*` for which a uniform m-user channel with
/// crosstalk `c` satisfies the conditions with equal correlations:
/// `(√((m−1)c) − 2(m−1)c) / (2(m−1)²c²)`, or 0 when `c > 1/(4(m−1))`.
pub fn symmetric_threshold(m: usize, c: f64) -> Result<f64> {
    if m < 2 {
        return Err(Error::domain("the symmetric threshold needs m >= 2"));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::domain(format!("crosstalk gain {c} must be positive")));
    }
    let k = (m - 1) as f64;
    if c > 1.0 / (4.0 * k) {
        return Ok(0.0);
    }
    Ok((((k * c).sqrt() - 2.0 * k * c) / (2.0 * k * k * c * c)).max(0.0))
}

/// Searches for correlations satisfying the m-user noisy-interference
/// conditions. A negative answer means none was found, not that none exists
/// (except where `provably_infeasible` is set).
pub fn find_rho(ch: &MUserChannel) -> Result<MUserVerdict> {
    find_rho_with(ch, Execution::default())
}

pub fn find_rho_with(ch: &MUserChannel, exec: Execution) -> Result<MUserVerdict> {
    let m = ch.users();
    if m > MAX_SEARCH_USERS {
        return Err(Error::TooLarge(format!("find_rho supports at most {MAX_SEARCH_USERS} users, got {m}")));
    }
    let cond = Conditions::new(ch);
    let provably_infeasible = match ch.uniform_parameters() {
        Some((c, _)) if m >= 2 => c > 1.0 / (4.0 * (m - 1) as f64),
        _ => false,
    };
    let mut evals = 0usize;
    let mut best: (f64, Vec<f64>) = (f64::INFINITY, vec![0.5; m]);
    let consider = |x: Vec<f64>, value: f64, best: &mut (f64, Vec<f64>)| {
        if value < best.0 || (value == best.0 && x < best.1) {
            *best = (value, x);
        }
    };

    // Equal correlations: a convex problem in one variable.
    let line = |t: f64| max_residual(&cond.slacks(&vec![t; m]));
    let (t, v) = golden_section(
        |t| {
            evals += 1;
            line(t)
        },
        X_MARGIN,
        1.0 - X_MARGIN,
        1e-15,
        200,
    );
    consider(vec![t; m], v, &mut best);
    if best.0 <= 0.0 || m == 1 {
        return Ok(cond.verdict(&best.1, evals, provably_infeasible));
    }

    // Coarse grid in ρ when it fits the budget.
    let cells = GRID_POINTS.checked_pow(m as u32).filter(|&n| n <= EVAL_BUDGET / 4);
    if let Some(cells) = cells {
        let values = exec.map_range(cells, |idx| {
            let x = grid_point(idx, m, GRID_POINTS);
            (max_residual(&cond.slacks(&x)), x)
        });
        evals += cells;
        for (v, x) in values {
            consider(x, v, &mut best);
        }
        if best.0 <= 0.0 {
            return Ok(cond.verdict(&best.1, evals, provably_infeasible));
        }
    }

    // Deep-cut ellipsoid over x = ρ² ∈ [margin, 1 − margin]^m.
    let remaining = EVAL_BUDGET.saturating_sub(evals);
    let outcome = ellipsoid(
        |x| {
            for (i, &xi) in x.iter().enumerate() {
                if !(X_MARGIN..=1.0 - X_MARGIN).contains(&xi) {
                    let mut g = vec![0.0; m];
                    let (violation, sign) =
                        if xi < X_MARGIN { (X_MARGIN - xi, -1.0) } else { (xi - (1.0 - X_MARGIN), 1.0) };
                    g[i] = sign;
                    return Cut::Violated { violation, gradient: g };
                }
            }
            evals += 1;
            let slacks = cond.slacks(x);
            let worst = max_residual(&slacks);
            consider(x.to_vec(), worst, &mut best);
            if worst <= 0.0 {
                return Cut::Feasible;
            }
            // Deepest normalised cut among the violated residuals.
            let mut pick: Option<(f64, f64, Vec<f64>)> = None;
            for (i, s) in slacks.iter().enumerate() {
                for (which, &v) in s.iter().enumerate() {
                    if v <= 0.0 {
                        continue;
                    }
                    let g = cond.gradient(x, i, which);
                    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
                    let depth = v / norm;
                    if pick.as_ref().is_none_or(|p| depth > p.0) {
                        pick = Some((depth, v, g));
                    }
                }
            }
            let (_, violation, gradient) = pick.expect("a violated residual exists");
            Cut::Violated { violation, gradient }
        },
        &vec![0.5; m],
        0.5 * (m as f64).sqrt(),
        remaining,
    );
    if let Some(x) = outcome.feasible_point {
        return Ok(cond.verdict(&x, evals, provably_infeasible));
    }
    Ok(cond.verdict(&best.1, evals, provably_infeasible))
}

/// `ρ²` coordinates of grid cell `idx` with `res` points per axis at
/// `ρ = k/(res+1)`.
fn grid_point(mut idx: usize, m: usize, res: usize) -> Vec<f64> {
    let mut x = vec![0.0; m];
    for slot in x.iter_mut().rev() {
        let r = (idx % res + 1) as f64 / (res + 1) as f64;
        *slot = r * r;
        idx /= res;
    }
    x
}

/// Exhaustive check of every `ρ_i ∈ {1/(res+1), …, res/(res+1)}`.
///
/// Independent of [`find_rho`]; meant for tests and spot checks. Refuses
/// more than 4 users or a resolution above 64.
pub fn oracle_grid_feasibility(ch: &MUserChannel, resolution: usize) -> Result<MUserVerdict> {
    oracle_grid_feasibility_with(ch, resolution, Execution::default())
}

pub fn oracle_grid_feasibility_with(ch: &MUserChannel, resolution: usize, exec: Execution) -> Result<MUserVerdict> {
    let m = ch.users();
    if m > MAX_ORACLE_USERS || resolution == 0 || resolution > MAX_ORACLE_RESOLUTION {
        return Err(Error::TooLarge(format!(
            "oracle grid limited to m <= {MAX_ORACLE_USERS} and 1 <= resolution <= {MAX_ORACLE_RESOLUTION} \
             (got m={m}, resolution={resolution})"
        )));
    }
    let cond = Conditions::new(ch);
    let cells = resolution.pow(m as u32);
    let values = exec.map_range(cells, |idx| max_residual(&cond.slacks(&grid_point(idx, m, resolution))));
    // First cell (lexicographic ρ order) with the smallest residual.
    let (best_idx, _) = values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    Ok(cond.verdict(&grid_point(best_idx, m, resolution), cells, false))
}

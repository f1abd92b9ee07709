//! Genie-aided outer bounds on the two-user capacity region.
//!
//! Three families of weighted-sum-rate constraints are available:
//!
//! * [`WeightKind::Mu`]: `R1 + μ·R2 ≤ v`, where each receiver is handed
//!   `Xi + Ni` with noise `Ni` correlated with its own receiver noise. The
//!   bound has to be minimised over the genie's correlation/variance tuple,
//!   see [`optimize_constraint1`].
//! * [`WeightKind::Eta1`] and [`WeightKind::Eta2`]: closed-form bounds
//!   obtained by giving one receiver the other user's full codeword, which
//!   reduces the channel to a one-sided (Z) channel.
//!
//! Bound values are in bits per channel use.

use serde::{Deserialize, Serialize};

use crate::capacity::{noisy_certificate, noisy_condition};
use crate::channel::{gaussian_rate, TwoUserChannel};
use crate::error::{Error, Result};
use crate::optim::CoordinateDescent;
use crate::par::Execution;

/// Relative slack allowed when testing `σ² ≤ limit` on the boundary of the
/// genie feasibility set. The closed-form certificate sits exactly on it.
const SIGMA_TOL: f64 = 1e-12;

/// Upper end of the correlation grid and search box.
const RHO_MAX: f64 = 1.0 - 1e-6;

const GRID_POINTS: usize = 8;
const LOCAL_STARTS: usize = 6;

/// Correlations and variances of the genie's side-information noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenieParams {
    pub rho1: f64,
    pub rho2: f64,
    pub sigma1_sq: f64,
    pub sigma2_sq: f64,
}

impl GenieParams {
    pub fn new(rho1: f64, rho2: f64, sigma1_sq: f64, sigma2_sq: f64) -> Result<Self> {
        if !((0.0..=1.0).contains(&rho1) && (0.0..=1.0).contains(&rho2)) {
            return Err(Error::domain(format!("correlations ({rho1}, {rho2}) outside [0, 1]")));
        }
        if !(sigma1_sq > 0.0 && sigma2_sq > 0.0 && sigma1_sq.is_finite() && sigma2_sq.is_finite()) {
            return Err(Error::domain(format!(
                "genie variances ({sigma1_sq}, {sigma2_sq}) must be positive and finite"
            )));
        }
        Ok(GenieParams { rho1, rho2, sigma1_sq, sigma2_sq })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WeightKind {
    Mu,
    Eta1,
    Eta2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum Certificate {
    /// Minimising genie parameters and the effective powers they induce.
    Genie { params: GenieParams, p1_star: f64, p2_star: f64 },
    /// Power user 1 spends on the private part of the Z-channel reduction.
    Eta1 { p1_tilde: f64 },
    /// Mirror image of [`Certificate::Eta1`] for user 2.
    Eta2 { p2_tilde: f64 },
}

/// A valid constraint `R1 + weight·R2 ≤ value` together with the parameters
/// that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportingLine {
    pub kind: WeightKind,
    pub weight: f64,
    pub value: f64,
    pub certificate: Certificate,
}

fn one_minus_sq(rho: f64) -> f64 {
    (1.0 - rho) * (1.0 + rho)
}

fn le_tol(x: f64, limit: f64) -> bool {
    x <= limit + SIGMA_TOL * limit.abs()
}

/// `limit / gain`, reading a zero gain as an absent upper limit.
fn limit_over(limit: f64, gain: f64) -> f64 {
    if gain == 0.0 {
        f64::INFINITY
    } else {
        limit / gain
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("weight μ = {mu} must be positive and finite")))
    }
}

fn check_weak_regime(ch: &TwoUserChannel) -> Result<()> {
    if ch.in_weak_regime() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "the correlated-genie bound needs 0 < a < 1 and 0 < b < 1 (a={}, b={})",
            ch.a(),
            ch.b()
        )))
    }
}

/// Membership of `(σ1², σ2²)` in the weight-dependent feasibility set.
///
/// For `μ ≥ 1` the genie variance of user 2 is capped at `(1−ρ1²)/a`, for
/// `μ < 1` that of user 1 at `(1−ρ2²)/b`. A zero gain removes the cap.
pub fn sigma_feasible(ch: &TwoUserChannel, mu: f64, gp: &GenieParams) -> Result<bool> {
    check_mu(mu)?;
    if !(gp.sigma1_sq > 0.0 && gp.sigma2_sq > 0.0) {
        return Ok(false);
    }
    Ok(if mu >= 1.0 {
        le_tol(gp.sigma2_sq, limit_over(one_minus_sq(gp.rho1), ch.a()))
    } else {
        le_tol(gp.sigma1_sq, limit_over(one_minus_sq(gp.rho2), ch.b()))
    })
}

/// Piecewise effective power of the capped user.
///
/// `power` is the user's power constraint, `weight ≥ 1` the ratio of the two
/// entropy weights, `numer/gain` the upper breakpoint scale (`1−ρ²` over the
/// crosstalk gain) and `var` the genie variance being tested.
fn capped_power(power: f64, weight: f64, numer: f64, gain: f64, var: f64) -> f64 {
    if gain == 0.0 {
        return power;
    }
    let upper = numer / (gain * weight);
    if weight == 1.0 {
        return if le_tol(var, upper) { power } else { 0.0 };
    }
    let lower = ((1.0 - weight) * power / weight + upper).max(0.0);
    if var <= lower {
        power
    } else if le_tol(var, upper) {
        ((numer - gain * weight * var) / (gain * weight - gain)).clamp(0.0, power)
    } else {
        0.0
    }
}

/// Effective powers `(P1*, P2*)` at which the extremal step is tight.
///
/// For `μ ≥ 1` only user 1's power is reduced, with breakpoints
/// `[(1−μ)P1/μ + (1−ρ2²)/(bμ)]⁺` and `(1−ρ2²)/(bμ)`; for `μ < 1` the mirror
/// construction reduces user 2's power.
pub fn effective_powers(ch: &TwoUserChannel, mu: f64, gp: &GenieParams) -> Result<(f64, f64)> {
    if !sigma_feasible(ch, mu, gp)? {
        return Err(Error::domain("genie variances outside the feasible set"));
    }
    Ok(effective_powers_unchecked(ch, mu, gp))
}

fn effective_powers_unchecked(ch: &TwoUserChannel, mu: f64, gp: &GenieParams) -> (f64, f64) {
    if mu >= 1.0 {
        let p1 = capped_power(ch.p1(), mu, one_minus_sq(gp.rho2), ch.b(), gp.sigma1_sq);
        (p1, ch.p2())
    } else {
        // Same shape with the weight 1/μ on user 2's side: the breakpoints
        // (μ−1)P2 + μ(1−ρ1²)/a and μ(1−ρ1²)/a are those of the μ ≥ 1 branch
        // with μ replaced by 1/μ.
        let p2 = capped_power(ch.p2(), 1.0 / mu, one_minus_sq(gp.rho1), ch.a(), gp.sigma2_sq);
        (ch.p1(), p2)
    }
}

/// `Var(Y | X + N)` for a receiver with direct power `p`, interference power
/// `interference`, and genie noise of variance `s` with correlation `rho`.
///
/// Written as `interference + [p((σ−ρ)² + 1−ρ²) + σ²(1−ρ²)]/(p + σ²)`, which
/// equals `1 + p + interference − (p + ρσ)²/(p + σ²)` without cancellation.
fn conditional_variance(p: f64, interference: f64, rho: f64, s: f64) -> f64 {
    let sigma = s.sqrt();
    let omr = one_minus_sq(rho);
    interference + (p * ((sigma - rho).powi(2) + omr) + s * omr) / (p + s)
}

/// One user's three-log contribution to the weighted bound.
fn user_term(p_star: f64, p: f64, cross_star: f64, cross: f64, gain: f64, rho: f64, s: f64) -> f64 {
    let residual = gain * cross_star + one_minus_sq(rho);
    if !(residual > 0.0) {
        return f64::INFINITY;
    }
    gaussian_rate(p_star / s) - 0.5 * residual.log2()
        + 0.5 * conditional_variance(p, gain * cross, rho, s).log2()
}

fn eval_unchecked(ch: &TwoUserChannel, mu: f64, gp: &GenieParams) -> f64 {
    let (p1s, p2s) = effective_powers_unchecked(ch, mu, gp);
    let first = user_term(p1s, ch.p1(), p2s, ch.p2(), ch.a(), gp.rho1, gp.sigma1_sq);
    let second = user_term(p2s, ch.p2(), p1s, ch.p1(), ch.b(), gp.rho2, gp.sigma2_sq);
    first + mu * second
}

/// Value of the correlated-genie bound on `R1 + μ·R2` at one feasible
/// parameter tuple. Every feasible tuple gives a valid outer bound; the
/// tightest one is found by [`optimize_constraint1`].
///
/// Returns `+∞` when `a·P2* + 1 − ρ1²` (or its mirror) vanishes.
pub fn eval_constraint1(ch: &TwoUserChannel, mu: f64, gp: &GenieParams) -> Result<f64> {
    check_weak_regime(ch)?;
    if !sigma_feasible(ch, mu, gp)? {
        return Err(Error::domain("genie variances outside the feasible set"));
    }
    Ok(eval_unchecked(ch, mu, gp))
}

/// Search coordinates for the genie optimiser.
///
/// `[ρ1, ρ2, ln s, ln t]`. The variance of the power-reduced user is `s`
/// times its upper effective-power breakpoint, so the branch switch sits at
/// `ln s = 0` whatever the correlations; the other variance is a fraction
/// `t ∈ (0, 1]` of its cap, so every point of the box is feasible.
struct GenieSpace<'a> {
    ch: &'a TwoUserChannel,
    mu: f64,
}

impl GenieSpace<'_> {
    fn capped_user_is_two(&self) -> bool {
        self.mu >= 1.0
    }

    fn cap(&self, rho_other: f64) -> f64 {
        if self.capped_user_is_two() {
            limit_over(one_minus_sq(rho_other), self.ch.a())
        } else {
            limit_over(one_minus_sq(rho_other), self.ch.b())
        }
    }

    /// Upper breakpoint of the reduced user's effective power.
    fn breakpoint(&self, rho_other: f64) -> f64 {
        if self.capped_user_is_two() {
            one_minus_sq(rho_other) / (self.ch.b() * self.mu)
        } else {
            self.mu * one_minus_sq(rho_other) / self.ch.a()
        }
    }

    fn decode(&self, u: &[f64]) -> GenieParams {
        let (rho1, rho2) = (u[0], u[1]);
        let s = u[2].exp();
        let t = u[3].exp();
        if self.capped_user_is_two() {
            GenieParams { rho1, rho2, sigma1_sq: s * self.breakpoint(rho2), sigma2_sq: t * self.cap(rho1) }
        } else {
            GenieParams { rho1, rho2, sigma1_sq: t * self.cap(rho2), sigma2_sq: s * self.breakpoint(rho1) }
        }
    }

    fn encode(&self, gp: &GenieParams) -> [f64; 4] {
        if self.capped_user_is_two() {
            let t = (gp.sigma2_sq / self.cap(gp.rho1)).min(1.0);
            [gp.rho1, gp.rho2, (gp.sigma1_sq / self.breakpoint(gp.rho2)).ln(), t.ln()]
        } else {
            let t = (gp.sigma1_sq / self.cap(gp.rho2)).min(1.0);
            [gp.rho1, gp.rho2, (gp.sigma2_sq / self.breakpoint(gp.rho1)).ln(), t.ln()]
        }
    }

    fn value(&self, u: &[f64]) -> f64 {
        let gp = self.decode(u);
        if !(gp.sigma1_sq > 0.0 && gp.sigma2_sq > 0.0) {
            return f64::INFINITY;
        }
        eval_unchecked(self.ch, self.mu, &gp)
    }
}

/// Minimises the correlated-genie bound on `R1 + μ·R2` over all feasible
/// genie parameters.
///
/// A coarse 8⁴ grid over `(ρ1, ρ2, σ1², σ2²)` seeds coordinate-descent
/// refinements from its best points. At `μ = 1` under noisy interference the
/// closed-form parameters are probed first, so the bound meets the
/// treat-interference-as-noise sum rate. The result is the best value found,
/// not a certified global minimum; ties resolve to the earliest probe.
pub fn optimize_constraint1(ch: &TwoUserChannel, mu: f64) -> Result<SupportingLine> {
    optimize_constraint1_with(ch, mu, Execution::default())
}

pub fn optimize_constraint1_with(ch: &TwoUserChannel, mu: f64, exec: Execution) -> Result<SupportingLine> {
    check_weak_regime(ch)?;
    check_mu(mu)?;
    let space = GenieSpace { ch, mu };

    let sigma_hi = 10.0 * ch.p1().max(ch.p2()).max(space.cap(0.0));
    let sigma_lo = 1e-4f64;
    let rho_grid: Vec<f64> =
        (0..GRID_POINTS).map(|k| RHO_MAX * k as f64 / (GRID_POINTS - 1) as f64).collect();
    let log_step = (sigma_hi / sigma_lo).ln() / (GRID_POINTS - 1) as f64;
    let sigma_grid: Vec<f64> =
        (0..GRID_POINTS).map(|k| (sigma_lo.ln() + log_step * k as f64).exp()).collect();

    let n = GRID_POINTS;
    let grid: Vec<(f64, [f64; 4])> = exec.map_range(n.pow(4), |idx| {
        let (i1, i2, i3, i4) = (idx / n.pow(3), (idx / n.pow(2)) % n, (idx / n) % n, idx % n);
        let (rho1, rho2) = (rho_grid[i1], rho_grid[i2]);
        let gp = if space.capped_user_is_two() {
            GenieParams {
                rho1,
                rho2,
                sigma1_sq: sigma_grid[i3],
                sigma2_sq: sigma_grid[i4].min(space.cap(rho1)),
            }
        } else {
            GenieParams {
                rho1,
                rho2,
                sigma1_sq: sigma_grid[i3].min(space.cap(rho2)),
                sigma2_sq: sigma_grid[i4],
            }
        };
        let u = space.encode(&gp);
        (space.value(&u), u)
    });

    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&i, &j| grid[i].0.total_cmp(&grid[j].0).then(i.cmp(&j)));
    let mut starts: Vec<[f64; 4]> = Vec::new();
    if mu == 1.0 && noisy_condition(ch).holds {
        if let Ok(cert) = noisy_certificate(ch) {
            starts.push(space.encode(&cert));
        }
    }
    for &i in &order {
        if starts.len() > LOCAL_STARTS {
            break;
        }
        if !starts.contains(&grid[i].1) {
            starts.push(grid[i].1);
        }
    }

    let lower = [0.0, 0.0, -40.0, (1e-12f64).ln()];
    let upper = [RHO_MAX, RHO_MAX, 40.0, 0.0];
    let cd = CoordinateDescent {
        steps: vec![RHO_MAX / (GRID_POINTS - 1) as f64, RHO_MAX / (GRID_POINTS - 1) as f64, log_step, log_step],
        min_step: 1e-10,
        sweep_tol: 1e-9,
        max_evals: 20_000,
    };
    let refined = exec.map(&starts, |u0| {
        let start_value = space.value(u0);
        let m = cd.minimize(|u| space.value(u), u0, &lower, &upper);
        // Clamping can move an injected start; never lose its exact value.
        if start_value <= m.value {
            (start_value, u0.to_vec())
        } else {
            (m.value, m.x)
        }
    });

    let (value, u) = refined
        .into_iter()
        .fold(None::<(f64, Vec<f64>)>, |best, cand| match best {
            Some(b) if b.0 <= cand.0 => Some(b),
            _ => Some(cand),
        })
        .expect("at least one start");
    let params = space.decode(&u);
    let (p1_star, p2_star) = effective_powers_unchecked(ch, mu, &params);
    Ok(SupportingLine {
        kind: WeightKind::Mu,
        weight: mu,
        value,
        certificate: Certificate::Genie { params, p1_star, p2_star },
    })
}

/// Admissible range `[(1+bP1)/(b+bP1), 1/b]` of the weight in the
/// user-2-to-receiver-1 genie bound. Needs `0 < b < 1`.
pub fn eta1_range(ch: &TwoUserChannel) -> Result<(f64, f64)> {
    let b = ch.b();
    if !(b > 0.0 && b < 1.0) {
        return Err(Error::domain(format!("η1 bound needs 0 < b < 1, got b={b}")));
    }
    Ok(((1.0 + b * ch.p1()) / (b + b * ch.p1()), 1.0 / b))
}

/// Admissible range `[a, (a+aP2)/(1+aP2)]` of the weight in the
/// user-1-to-receiver-2 genie bound. Needs `0 < a < 1`.
pub fn eta2_range(ch: &TwoUserChannel) -> Result<(f64, f64)> {
    let a = ch.a();
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::domain(format!("η2 bound needs 0 < a < 1, got a={a}")));
    }
    Ok((a, (a + a * ch.p2()) / (1.0 + a * ch.p2())))
}

fn check_in_range(name: &str, w: f64, (lo, hi): (f64, f64)) -> Result<f64> {
    let tol = 1e-12 * hi.abs().max(1.0);
    if !(w >= lo - tol && w <= hi + tol) {
        return Err(Error::domain(format!("{name} = {w} outside [{lo}, {hi}]")));
    }
    Ok(w.clamp(lo, hi))
}

/// Bound on `R1 + η1·R2` from giving receiver 1 the codeword of user 2.
pub fn eval_constraint2(ch: &TwoUserChannel, eta1: f64) -> Result<SupportingLine> {
    let range = eta1_range(ch)?;
    let eta = check_in_range("η1", eta1, range)?;
    let b = ch.b();
    // The quotient loses precision as b → 1; endpoints are exact.
    let p1_tilde = if eta == range.0 {
        ch.p1()
    } else if eta == range.1 {
        0.0
    } else {
        ((b * eta - 1.0) / (b - b * eta)).clamp(0.0, ch.p1())
    };
    let value = gaussian_rate(p1_tilde) - eta * gaussian_rate(b * p1_tilde)
        + eta * gaussian_rate(b * ch.p1() + ch.p2());
    Ok(SupportingLine { kind: WeightKind::Eta1, weight: eta, value, certificate: Certificate::Eta1 { p1_tilde } })
}

/// Bound on `R1 + η2·R2` from giving receiver 2 the codeword of user 1.
pub fn eval_constraint3(ch: &TwoUserChannel, eta2: f64) -> Result<SupportingLine> {
    let range = eta2_range(ch)?;
    let eta = check_in_range("η2", eta2, range)?;
    let a = ch.a();
    let p2_tilde = if eta == range.0 {
        0.0
    } else if eta == range.1 {
        ch.p2()
    } else {
        ((a - eta) / (a * eta - a)).clamp(0.0, ch.p2())
    };
    let value = gaussian_rate(ch.p1() + a * ch.p2()) - gaussian_rate(a * p2_tilde)
        + eta * gaussian_rate(p2_tilde);
    Ok(SupportingLine { kind: WeightKind::Eta2, weight: eta, value, certificate: Certificate::Eta2 { p2_tilde } })
}

/// User 1's part of the `μ = 1` bound with full effective powers, as a
/// function of its genie correlation and standard deviation.
pub fn user1_sum_term(ch: &TwoUserChannel, rho1: f64, sigma1: f64) -> f64 {
    user_term(ch.p1(), ch.p1(), ch.p2(), ch.p2(), ch.a(), rho1, sigma1 * sigma1)
}

/// The same quantity written as a completed square in `1/σ1`:
/// `½log₂[P1(1+aP2)/(1+aP2−ρ1²)·(1/σ1 − ρ1/(1+aP2))² + 1 + P1/(1+aP2)]`.
///
/// For fixed `ρ1` it is smallest at `ρ1σ1 = 1 + aP2`, where it equals the
/// single-user-detection rate of user 1.
pub fn user1_sum_term_completed_square(ch: &TwoUserChannel, rho1: f64, sigma1: f64) -> f64 {
    let n = 1.0 + ch.a() * ch.p2();
    let dev = 1.0 / sigma1 - rho1 / n;
    let excess = ch.p1() * n / (n - rho1 * rho1) * dev * dev + ch.p1() / n;
    0.5 * excess.ln_1p() / std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::tin_rates;

    fn sample() -> TwoUserChannel {
        TwoUserChannel::new(0.04, 0.09, 10.0, 20.0).unwrap()
    }

    fn gp(r1: f64, r2: f64, s1: f64, s2: f64) -> GenieParams {
        GenieParams::new(r1, r2, s1, s2).unwrap()
    }

    #[test]
    fn sigma_feasibility_examples() {
        let ch = TwoUserChannel::new(0.5, 0.5, 1.0, 1.0).unwrap();
        // The cap (1 − ρ1²)/a = 2 belongs to the set.
        assert!(!sigma_feasible(&ch, 2.0, &gp(0.0, 0.0, 1.0, 2.0 + 1e-6)).unwrap());
        assert!(sigma_feasible(&ch, 2.0, &gp(0.0, 0.0, 1.0, 2.0)).unwrap());
        assert!(sigma_feasible(&ch, 2.0, &gp(0.0, 0.0, 1.0, 2.0 - 1e-9)).unwrap());

        let zb = TwoUserChannel::new(0.5, 0.0, 1.0, 1.0).unwrap();
        assert!(sigma_feasible(&zb, 0.5, &gp(0.3, 0.9, 1e9, 1.0)).unwrap());

        assert!(sigma_feasible(&ch, 0.0, &gp(0.0, 0.0, 1.0, 1.0)).is_err());
        assert!(sigma_feasible(&ch, -1.0, &gp(0.0, 0.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn genie_params_validation() {
        assert!(GenieParams::new(1.1, 0.0, 1.0, 1.0).is_err());
        assert!(GenieParams::new(0.0, 0.0, 0.0, 1.0).is_err());
        assert!(GenieParams::new(1.0, 1.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn effective_power_branches() {
        // μ ≥ 1, σ1² past the upper breakpoint → no power.
        let ch = TwoUserChannel::new(0.5, 0.25, 1.0, 1.0).unwrap();
        let (p1, p2) = effective_powers(&ch, 2.0, &gp(0.0, 0.0, 2.5, 1.0)).unwrap();
        assert_eq!((p1, p2), (0.0, 1.0));

        // Middle branch: breakpoints 1.5 and 2, value (1 − 0.5·1.6)/(0.5 − 0.25).
        let (p1, _) = effective_powers(&ch, 2.0, &gp(0.0, 0.0, 1.6, 1.0)).unwrap();
        assert!((p1 - 0.8).abs() < 1e-12);

        // μ = 1 has only two branches split at (1−ρ2²)/b = 4.
        let (p1, _) = effective_powers(&ch, 1.0, &gp(0.0, 0.0, 4.0, 1.0)).unwrap();
        assert_eq!(p1, 1.0);
        let (p1, _) = effective_powers(&ch, 1.0, &gp(0.0, 0.0, 4.0001, 1.0)).unwrap();
        assert_eq!(p1, 0.0);

        // μ < 1 reduces user 2; breakpoints (μ−1)P2 + μ(1−ρ1²)/a = 0.5, μ/a = 1.
        let (p1, p2) = effective_powers(&ch, 0.5, &gp(0.0, 0.0, 1.0, 0.75)).unwrap();
        assert_eq!(p1, 1.0);
        assert!((p2 - (0.5 - 0.5 * 0.75) / (0.5 - 0.25)).abs() < 1e-12);

        assert!(effective_powers(&ch, 2.0, &gp(0.0, 0.0, 1.0, 5.0)).is_err());
    }

    #[test]
    fn effective_powers_continuous_at_breakpoints() {
        let ch = TwoUserChannel::new(0.3, 0.2, 3.0, 2.0).unwrap();
        for &mu in &[1.5, 2.0, 4.0] {
            let rho2: f64 = 0.4;
            let upper = (1.0 - rho2 * rho2) / (ch.b() * mu);
            let lower = ((1.0 - mu) * ch.p1() / mu + upper).max(0.0);
            for &bp in &[lower, upper] {
                if bp <= 0.0 {
                    continue;
                }
                let at = |s: f64| effective_powers(&ch, mu, &gp(0.1, rho2, s, 0.5)).unwrap().0;
                let eps = 1e-13 * bp;
                assert!((at(bp - eps) - at(bp + eps)).abs() <= 1e-12 * ch.p1() + 1e-9 * ch.p1());
                assert!((at(bp) - at(bp + eps)).abs() <= 1e-9 * ch.p1());
            }
        }
    }

    #[test]
    fn constraint1_symmetric_probe_dominates_tin() {
        let ch = TwoUserChannel::symmetric(0.1, 1.0).unwrap();
        let v = eval_constraint1(&ch, 1.0, &gp(0.0, 0.0, 1.0, 1.0)).unwrap();
        let tin = 2.0 * gaussian_rate(1.0 / 1.1);
        assert!((tin - 0.932_885_804_141_463).abs() < 1e-14);
        assert!(v.is_finite() && v >= tin);
    }

    #[test]
    fn constraint1_rejects_outside_regime() {
        let ch = TwoUserChannel::new(0.0, 0.5, 1.0, 1.0).unwrap();
        assert!(eval_constraint1(&ch, 1.0, &gp(0.0, 0.0, 1.0, 1.0)).is_err());
        assert!(optimize_constraint1(&ch, 1.0).is_err());
        let ch = TwoUserChannel::new(1.5, 0.5, 1.0, 1.0).unwrap();
        assert!(optimize_constraint1(&ch, 1.0).is_err());
    }

    #[test]
    fn constraint1_at_certificate_is_tin_sum() {
        let ch = sample();
        let cert = noisy_certificate(&ch).unwrap();
        let v = eval_constraint1(&ch, 1.0, &cert).unwrap();
        assert!((v - 3.119_788_797_038_558_4).abs() < 1e-9);
    }

    #[test]
    fn optimize_noisy_channels_is_tight() {
        let ch = sample();
        let line = optimize_constraint1(&ch, 1.0).unwrap();
        assert!((line.value - tin_rates(&ch).sum()).abs() < 1e-9);
        match line.certificate {
            Certificate::Genie { params, .. } => assert!(sigma_feasible(&ch, 1.0, &params).unwrap()),
            _ => panic!("wrong certificate kind"),
        }

        let ch = TwoUserChannel::symmetric(0.04, 1.0).unwrap();
        let line = optimize_constraint1(&ch, 1.0).unwrap();
        assert!((line.value - tin_rates(&ch).sum()).abs() < 1e-9);
    }

    #[test]
    fn optimize_outside_noisy_regime_is_strictly_above_tin() {
        let ch = TwoUserChannel::symmetric(0.3, 7.0).unwrap();
        let line = optimize_constraint1(&ch, 1.0).unwrap();
        let tin = tin_rates(&ch).sum();
        assert!(line.value > tin + 1e-6, "{} vs {}", line.value, tin);
    }

    #[test]
    fn optimize_matches_reference_minimisation() {
        // Best values from an independent multi-start Nelder–Mead run.
        let ch = sample();
        let v2 = optimize_constraint1(&ch, 2.0).unwrap().value;
        assert!(v2 >= tin_rates(&ch).weighted(2.0));
        assert!(v2 <= 5.034_919_713_016_185 + 1e-4, "{v2}");
        let vh = optimize_constraint1(&ch, 0.5).unwrap().value;
        assert!(vh <= 2.293_647_873_473_857 + 1e-4, "{vh}");
        let sym = optimize_constraint1(&TwoUserChannel::symmetric(0.3, 7.0).unwrap(), 1.0).unwrap().value;
        assert!(sym <= 2.285_957_783_737_058 + 1e-4, "{sym}");
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let ch = TwoUserChannel::new(0.2, 0.35, 4.0, 9.0).unwrap();
        for &mu in &[0.3, 1.0, 2.5] {
            let s = optimize_constraint1_with(&ch, mu, Execution::Sequential).unwrap();
            let p = optimize_constraint1_with(&ch, mu, Execution::Parallel).unwrap();
            assert_eq!(s, p);
        }
    }

    #[test]
    fn constraint2_examples() {
        let ch = TwoUserChannel::new(0.3, 0.5, 10.0, 20.0).unwrap();
        let (lo, hi) = eta1_range(&ch).unwrap();
        assert!((lo - 6.0 / 5.5).abs() < 1e-15);
        let line = eval_constraint2(&ch, lo).unwrap();
        match line.certificate {
            Certificate::Eta1 { p1_tilde } => assert!((p1_tilde - 10.0).abs() < 1e-12),
            _ => unreachable!(),
        }
        assert!((line.value - 2.883_612_473_365_886).abs() < 1e-12);

        let top = eval_constraint2(&ch, hi).unwrap();
        assert_eq!(top.certificate, Certificate::Eta1 { p1_tilde: 0.0 });
        assert!((top.value - (1.0 / (2.0 * 0.5)) * (1.0 + 5.0 + 20.0f64).log2()).abs() < 1e-12);

        assert!(eval_constraint2(&ch, lo - 1e-3).is_err());
        assert!(eval_constraint2(&ch, hi + 1e-3).is_err());
        let bad = TwoUserChannel::new(0.3, 1.2, 1.0, 1.0).unwrap();
        assert!(eval_constraint2(&bad, 1.0).is_err());
    }

    #[test]
    fn constraint3_examples() {
        let ch = sample();
        let (lo, hi) = eta2_range(&ch).unwrap();
        let at_a = eval_constraint3(&ch, lo).unwrap();
        assert!((at_a.value - gaussian_rate(10.0 + 0.04 * 20.0)).abs() < 1e-14);
        assert_eq!(at_a.certificate, Certificate::Eta2 { p2_tilde: 0.0 });

        assert!((hi - 0.84 / 1.8).abs() < 1e-15);
        let top = eval_constraint3(&ch, hi).unwrap();
        assert!((top.value - 2.381_233_089_274_808_5).abs() < 1e-12);
        match top.certificate {
            Certificate::Eta2 { p2_tilde } => assert!((p2_tilde - 20.0).abs() < 1e-11),
            _ => unreachable!(),
        }

        // Strictly between the endpoint values in the interior.
        let ch = TwoUserChannel::new(0.5, 0.2, 3.0, 4.0).unwrap();
        let (lo, hi) = eta2_range(&ch).unwrap();
        let v_lo = eval_constraint3(&ch, lo).unwrap().value;
        let v_hi = eval_constraint3(&ch, hi).unwrap().value;
        let v_mid = eval_constraint3(&ch, 0.5 * (lo + hi)).unwrap().value;
        assert!(v_lo.min(v_hi) < v_mid && v_mid < v_lo.max(v_hi));
    }

    #[test]
    fn completed_square_matches_three_logs() {
        let ch = TwoUserChannel::new(0.07, 0.11, 4.0, 6.0).unwrap();
        for &(rho, sigma) in &[(0.2, 0.5), (0.6, 2.3), (0.95, 10.0), (0.5, 2.48)] {
            let direct = user1_sum_term(&ch, rho, sigma);
            let square = user1_sum_term_completed_square(&ch, rho, sigma);
            assert!((direct - square).abs() < 1e-12, "{direct} vs {square}");
        }
    }
}

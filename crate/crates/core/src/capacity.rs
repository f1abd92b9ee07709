//! Channels whose sum-rate capacity is known exactly.
//!
//! * Noisy interference: `√a(bP1+1) + √b(aP2+1) ≤ 1`. Treating interference
//!   as noise is optimal and the genie bound at `μ = 1` meets it.
//! * Mixed interference corner point: `a > 1`, `0 < b < 1` and
//!   `(1−ab)P1 ≤ a−1` (or the same with the users swapped).
//! * One-sided (Z) channels with the remaining gain at most 1 fall under the
//!   noisy-interference formula directly.

use serde::{Deserialize, Serialize};

use crate::channel::{gaussian_rate, tin_rates, TwoUserChannel};
use crate::error::{Error, Result};
use crate::genie::GenieParams;
use crate::optim::bisect_last_true;

/// Absolute slack under which a capacity condition counts as satisfied.
pub const CONDITION_TOL: f64 = 1e-12;

/// Relation `ρ1σ1 = 1 + aP2`, `ρ2σ2 = 1 + bP1` that selects the operative
/// root pair of the closed-form certificate.
const PAIRING_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub holds: bool,
    /// Left-hand side minus right-hand side of the governing inequality.
    pub slack: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `a > 1`, `0 < b < 1`: user 1 sees strong interference.
    Direct,
    /// `b > 1`, `0 < a < 1`.
    Swapped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedCheck {
    pub holds: bool,
    /// `(1−ab)P − (g−1)` for the applicable orientation, `None` when neither
    /// gain configuration is mixed.
    pub slack: Option<f64>,
    pub orientation: Option<Orientation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictKind {
    NoisyInterference,
    MixedCorner,
    ZicNoisy,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityVerdict {
    pub kind: VerdictKind,
    pub sum_capacity: Option<f64>,
    pub certificate: Option<GenieParams>,
    /// Slack of the condition behind the verdict; for `UNKNOWN`, that of the
    /// noisy-interference condition.
    pub condition_slack: f64,
    pub noisy_slack: f64,
    pub mixed_slack: Option<f64>,
}

/// Noisy-interference condition `√a(bP1+1) + √b(aP2+1) ≤ 1`.
pub fn noisy_condition(ch: &TwoUserChannel) -> ConditionCheck {
    let (a, b) = (ch.a(), ch.b());
    let slack = a.sqrt() * (b * ch.p1() + 1.0) + b.sqrt() * (a * ch.p2() + 1.0) - 1.0;
    ConditionCheck { holds: slack <= CONDITION_TOL, slack }
}

/// Both roots of `s² − (1 + B − A)s + B = 0`, larger first, with a
/// discriminant that is slightly negative from rounding clamped to zero.
fn scaled_roots(big_a: f64, big_b: f64) -> Option<[f64; 2]> {
    let lin = 1.0 + big_b - big_a;
    let mut disc = lin * lin - 4.0 * big_b;
    if disc < 0.0 {
        if disc < -1e-9 {
            return None;
        }
        disc = 0.0;
    }
    let root = disc.sqrt();
    Some([0.5 * (lin + root), 0.5 * (lin - root)])
}

/// Closed-form genie parameters at which the `μ = 1` bound equals the
/// treat-interference-as-noise sum rate.
///
/// `σ1²` and `σ2²` are the roots of the two quadratics
/// `bσ1² = ½{b(aP2+1)² − a(bP1+1)² + 1 ± √(…)}` (and mirror), with
/// `ρ1 = √(1−aσ2²)` and `ρ2 = √(1−bσ1²)`. All four sign choices are tried;
/// valid pairs must give positive variances and correlations in `[0, 1]`, and
/// among those the pair satisfying `ρ1σ1 = 1+aP2`, `ρ2σ2 = 1+bP1` wins.
pub fn noisy_certificate(ch: &TwoUserChannel) -> Result<GenieParams> {
    let (a, b, p1, p2) = (ch.a(), ch.b(), ch.p1(), ch.p2());
    let check = noisy_condition(ch);
    if !check.holds {
        return Err(Error::CertificateUnavailable(format!(
            "noisy-interference condition fails (slack {})",
            check.slack
        )));
    }
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::CertificateUnavailable("the genie construction needs a > 0 and b > 0".into()));
    }
    let n1 = 1.0 + a * p2;
    let n2 = 1.0 + b * p1;
    let big_a = a * n2 * n2;
    let big_b = b * n1 * n1;
    let (Some(s_roots), Some(t_roots)) = (scaled_roots(big_a, big_b), scaled_roots(big_b, big_a)) else {
        return Err(Error::CertificateUnavailable("negative discriminant".into()));
    };

    let mut fallback = None;
    for (s, t) in [(0, 0), (1, 1), (0, 1), (1, 0)].map(|(i, j)| (s_roots[i], t_roots[j])) {
        let sigma1_sq = s / b;
        let sigma2_sq = t / a;
        let rho1_sq = 1.0 - t;
        let rho2_sq = 1.0 - s;
        if !(sigma1_sq > 0.0 && sigma2_sq > 0.0 && (0.0..=1.0).contains(&rho1_sq) && (0.0..=1.0).contains(&rho2_sq)) {
            continue;
        }
        let gp = GenieParams { rho1: rho1_sq.sqrt(), rho2: rho2_sq.sqrt(), sigma1_sq, sigma2_sq };
        let paired = ((gp.rho1 * sigma1_sq.sqrt() - n1) / n1).abs() <= PAIRING_TOL
            && ((gp.rho2 * sigma2_sq.sqrt() - n2) / n2).abs() <= PAIRING_TOL;
        if paired {
            return Ok(gp);
        }
        fallback.get_or_insert(gp);
    }
    fallback.ok_or_else(|| Error::CertificateUnavailable("no root pair gives valid genie parameters".into()))
}

/// Mixed-interference corner-point condition, checked in both orientations.
pub fn mixed_condition(ch: &TwoUserChannel) -> MixedCheck {
    let (a, b) = (ch.a(), ch.b());
    let (orientation, slack) = if a > 1.0 && b > 0.0 && b < 1.0 {
        (Orientation::Direct, (1.0 - a * b) * ch.p1() - (a - 1.0))
    } else if b > 1.0 && a > 0.0 && a < 1.0 {
        (Orientation::Swapped, (1.0 - a * b) * ch.p2() - (b - 1.0))
    } else {
        return MixedCheck { holds: false, slack: None, orientation: None };
    };
    MixedCheck { holds: slack <= CONDITION_TOL, slack: Some(slack), orientation: Some(orientation) }
}

/// Classifies a channel by the capacity result that applies to it.
pub fn classify(ch: &TwoUserChannel) -> CapacityVerdict {
    let noisy = noisy_condition(ch);
    let mixed = mixed_condition(ch);
    if noisy.holds {
        let zic = ch.a() == 0.0 || ch.b() == 0.0;
        return CapacityVerdict {
            kind: if zic { VerdictKind::ZicNoisy } else { VerdictKind::NoisyInterference },
            sum_capacity: Some(tin_rates(ch).sum()),
            certificate: if zic { None } else { noisy_certificate(ch).ok() },
            condition_slack: noisy.slack,
            noisy_slack: noisy.slack,
            mixed_slack: mixed.slack,
        };
    }
    if mixed.holds {
        let (p1, p2) = (ch.p1(), ch.p2());
        let capacity = match mixed.orientation {
            Some(Orientation::Direct) => gaussian_rate(p1) + gaussian_rate(p2 / (1.0 + ch.b() * p1)),
            _ => gaussian_rate(p2) + gaussian_rate(p1 / (1.0 + ch.a() * p2)),
        };
        return CapacityVerdict {
            kind: VerdictKind::MixedCorner,
            sum_capacity: Some(capacity),
            certificate: None,
            condition_slack: mixed.slack.unwrap_or(f64::NAN),
            noisy_slack: noisy.slack,
            mixed_slack: mixed.slack,
        };
    }
    CapacityVerdict {
        kind: VerdictKind::Unknown,
        sum_capacity: None,
        certificate: None,
        condition_slack: noisy.slack,
        noisy_slack: noisy.slack,
        mixed_slack: mixed.slack,
    }
}

/// Largest power for which the symmetric channel with gain `a` has noisy
/// interference: `(√a − 2a)/(2a²)`, negative above `a = ¼`.
pub fn symmetric_noisy_power_limit(a: f64) -> f64 {
    (a.sqrt() - 2.0 * a) / (2.0 * a * a)
}

/// Power limit `(1 − 2a)/(2a²)` of the classical weak-interference regime.
pub fn weak_interference_power_limit(a: f64) -> f64 {
    (1.0 - 2.0 * a) / (2.0 * a * a)
}

/// Largest symmetric gain `a* ∈ (0, ¼]` that still gives noisy interference
/// at power `p`, found by bisection to within `1e-12`.
pub fn symmetric_noisy_threshold(p: f64) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::domain(format!("power {p} must be positive and finite")));
    }
    // The limit decreases on (0, 9/16) ⊃ (0, ¼] and diverges at 0.
    let mut lo = 0.25;
    while symmetric_noisy_power_limit(lo) < p {
        lo *= 0.5;
    }
    Ok(bisect_last_true(|a| symmetric_noisy_power_limit(a) >= p, lo, 0.25, 1e-15))
}

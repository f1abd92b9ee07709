//! Channel models and the elementary achievable rates.
//!
//! The two-user channel in standard form is
//! `Y1 = X1 + sqrt(a) X2 + Z1`, `Y2 = sqrt(b) X1 + X2 + Z2` with unit-variance
//! noise and average power constraints `p1`, `p2`. The m-user channel
//! generalises this with a matrix of crosstalk gains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `½·log₂(1 + snr)`: the rate of a real AWGN channel at the given SNR.
#[inline]
pub fn gaussian_rate(snr: f64) -> f64 {
    0.5 * snr.ln_1p() / std::f64::consts::LN_2
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Two-user Gaussian interference channel `(a, b, P1, P2)` in standard form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoUserChannel {
    a: f64,
    b: f64,
    p1: f64,
    p2: f64,
}

impl TwoUserChannel {
    /// `a` is the crosstalk gain into receiver 1, `b` into receiver 2.
    pub fn new(a: f64, b: f64, p1: f64, p2: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && p1.is_finite() && p2.is_finite()) {
            return Err(Error::domain("channel parameters must be finite"));
        }
        if a < 0.0 || b < 0.0 {
            return Err(Error::domain(format!("gains must be nonnegative (a={a}, b={b})")));
        }
        if p1 <= 0.0 || p2 <= 0.0 {
            return Err(Error::domain(format!("powers must be positive (p1={p1}, p2={p2})")));
        }
        Ok(TwoUserChannel { a, b, p1, p2 })
    }

    pub fn symmetric(a: f64, p: f64) -> Result<Self> {
        Self::new(a, a, p, p)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    /// The same channel with the user labels exchanged.
    pub fn swapped(&self) -> Self {
        TwoUserChannel { a: self.b, b: self.a, p1: self.p2, p2: self.p1 }
    }

    /// True when both crosstalk gains lie strictly inside `(0, 1)`.
    pub fn in_weak_regime(&self) -> bool {
        self.a > 0.0 && self.a < 1.0 && self.b > 0.0 && self.b < 1.0
    }
}

/// A rate pair in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RatePoint {
    pub r1: f64,
    pub r2: f64,
}

impl RatePoint {
    pub fn new(r1: f64, r2: f64) -> Result<Self> {
        if !(r1 >= 0.0 && r2 >= 0.0) {
            return Err(Error::domain(format!("rates must be nonnegative ({r1}, {r2})")));
        }
        Ok(RatePoint { r1, r2 })
    }

    pub fn sum(&self) -> f64 {
        self.r1 + self.r2
    }

    /// `r1 + weight·r2`.
    pub fn weighted(&self, weight: f64) -> f64 {
        self.r1 + weight * self.r2
    }
}

/// Rates achieved when each receiver treats the other user's signal as noise.
pub fn tin_rates(ch: &TwoUserChannel) -> RatePoint {
    RatePoint {
        r1: gaussian_rate(ch.p1 / (1.0 + ch.a * ch.p2)),
        r2: gaussian_rate(ch.p2 / (1.0 + ch.b * ch.p1)),
    }
}

/// Interference-free point-to-point capacities of the two links.
pub fn single_user_capacities(ch: &TwoUserChannel) -> RatePoint {
    RatePoint { r1: gaussian_rate(ch.p1), r2: gaussian_rate(ch.p2) }
}

/// Rate pair of orthogonal time/frequency sharing where user 1 gets the
/// fraction `alpha` of the resource and concentrates its power there.
///
/// The endpoints `alpha = 0` and `alpha = 1` are accepted and evaluate to the
/// single-user corner points.
pub fn tdm_fdm_point(ch: &TwoUserChannel, alpha: f64) -> Result<RatePoint> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::domain(format!("time-sharing fraction {alpha} outside [0, 1]")));
    }
    let share = |frac: f64, p: f64| if frac == 0.0 { 0.0 } else { frac * gaussian_rate(p / frac) };
    Ok(RatePoint { r1: share(alpha, ch.p1), r2: share(1.0 - alpha, ch.p2) })
}

/// Sum rate of orthogonal sharing with fraction `alpha ∈ (0, 1)` for user 1.
pub fn tdm_fdm_sum_rate(ch: &TwoUserChannel, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("time-sharing fraction {alpha} outside (0, 1)")));
    }
    Ok(tdm_fdm_point(ch, alpha)?.sum())
}

/// m-user Gaussian interference channel with unit direct gains.
///
/// `gains[j][i]` is the power gain from transmitter `j` to receiver `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MUserChannel {
    gains: Vec<Vec<f64>>,
    powers: Vec<f64>,
}

impl MUserChannel {
    pub fn new(gains: Vec<Vec<f64>>, powers: Vec<f64>) -> Result<Self> {
        let m = powers.len();
        if m == 0 {
            return Err(Error::domain("an m-user channel needs at least one user"));
        }
        if gains.len() != m || gains.iter().any(|row| row.len() != m) {
            return Err(Error::domain(format!("gain matrix must be {m}x{m}")));
        }
        for (j, row) in gains.iter().enumerate() {
            for (i, &g) in row.iter().enumerate() {
                if !g.is_finite() {
                    return Err(Error::domain(format!("gain ({j},{i}) is not finite")));
                }
                if i == j && g != 1.0 {
                    return Err(Error::domain(format!("diagonal gain ({j},{j}) must be 1, got {g}")));
                }
                if g < 0.0 {
                    return Err(Error::domain(format!("gain ({j},{i}) is negative")));
                }
            }
        }
        if let Some(p) = powers.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::domain(format!("powers must be positive and finite, got {p}")));
        }
        Ok(MUserChannel { gains, powers })
    }

    /// Every crosstalk gain equal to `c` and every power equal to `p`.
    pub fn uniform(m: usize, c: f64, p: f64) -> Result<Self> {
        let gains = (0..m)
            .map(|j| (0..m).map(|i| if i == j { 1.0 } else { c }).collect())
            .collect();
        Self::new(gains, vec![p; m])
    }

    /// Embeds a two-user channel: `c21 = a`, `c12 = b`.
    pub fn from_two_user(ch: &TwoUserChannel) -> Self {
        MUserChannel {
            gains: vec![vec![1.0, ch.b()], vec![ch.a(), 1.0]],
            powers: vec![ch.p1(), ch.p2()],
        }
    }

    pub fn as_two_user(&self) -> Option<TwoUserChannel> {
        (self.users() == 2).then(|| {
            TwoUserChannel::new(self.gain(1, 0), self.gain(0, 1), self.powers[0], self.powers[1])
                .expect("validated channel")
        })
    }

    pub fn users(&self) -> usize {
        self.powers.len()
    }

    /// Gain from transmitter `from` to receiver `to`.
    pub fn gain(&self, from: usize, to: usize) -> f64 {
        self.gains[from][to]
    }

    pub fn gains(&self) -> &[Vec<f64>] {
        &self.gains
    }

    pub fn power(&self, i: usize) -> f64 {
        self.powers[i]
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    /// `Some((c, p))` when all crosstalk gains and all powers are equal.
    pub fn uniform_parameters(&self) -> Option<(f64, f64)> {
        let m = self.users();
        let p = self.powers[0];
        if self.powers.iter().any(|&q| q != p) {
            return None;
        }
        if m == 1 {
            return Some((0.0, p));
        }
        let c = self.gains[1][0];
        let uniform = (0..m).all(|j| (0..m).all(|i| i == j || self.gains[j][i] == c));
        uniform.then_some((c, p))
    }

    /// Channel with every power multiplied by `factor`.
    pub fn scaled_powers(&self, factor: f64) -> Result<Self> {
        Self::new(self.gains.clone(), self.powers.iter().map(|p| p * factor).collect())
    }
}

/// Interference power `Q_i = Σ_{j≠i} c_ji P_j` seen at each receiver.
pub fn m_user_interference_powers(ch: &MUserChannel) -> Vec<f64> {
    let m = ch.users();
    (0..m)
        .map(|i| (0..m).filter(|&j| j != i).map(|j| ch.gain(j, i) * ch.power(j)).sum())
        .collect()
}

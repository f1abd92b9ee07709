//! Channel configuration files and command-line channel flags.

use std::path::Path;

use icbounds::{db_to_linear, MUserChannel, TwoUserChannel};
use serde::Deserialize;

use crate::CliError;

/// Unit of the gains in a configuration. Powers are always linear.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Linear,
    Db,
}

impl Units {
    fn gain(self, g: f64) -> f64 {
        match self {
            Units::Linear => g,
            Units::Db => db_to_linear(g),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    a: Option<f64>,
    b: Option<f64>,
    p1: Option<f64>,
    p2: Option<f64>,
    gains: Option<Vec<Vec<f64>>>,
    powers: Option<Vec<f64>>,
    #[serde(default)]
    units: Units,
}

/// A validated channel from either configuration shape.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelConfig {
    TwoUser(TwoUserChannel),
    MultiUser(MUserChannel),
}

impl ChannelConfig {
    /// Parses `{"a", "b", "p1", "p2"}` or `{"gains", "powers"}`, each with an
    /// optional `"units": "linear" | "db"` applying to the gains.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let raw: RawConfig =
            serde_json::from_str(text).map_err(|e| CliError::BadInput(format!("invalid config: {e}")))?;
        let scalars = [raw.a, raw.b, raw.p1, raw.p2];
        let any_scalar = scalars.iter().any(Option::is_some);
        let any_matrix = raw.gains.is_some() || raw.powers.is_some();
        match (any_scalar, any_matrix) {
            (true, false) => {
                let [Some(a), Some(b), Some(p1), Some(p2)] = scalars else {
                    return Err(CliError::BadInput("config needs all of a, b, p1, p2".into()));
                };
                Ok(ChannelConfig::TwoUser(TwoUserChannel::new(raw.units.gain(a), raw.units.gain(b), p1, p2)?))
            }
            (false, true) => {
                let (Some(gains), Some(powers)) = (raw.gains, raw.powers) else {
                    return Err(CliError::BadInput("config needs both gains and powers".into()));
                };
                let gains = gains
                    .into_iter()
                    .map(|row| row.into_iter().map(|g| raw.units.gain(g)).collect())
                    .collect();
                let ch = MUserChannel::new(gains, powers)?;
                Ok(ChannelConfig::MultiUser(ch))
            }
            _ => Err(CliError::BadInput(
                "config must give either {a, b, p1, p2} or {gains, powers}, not both or neither".into(),
            )),
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::BadInput(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// The two-user channel, converting a 2×2 gain matrix if needed.
    pub fn two_user(&self) -> Result<TwoUserChannel, CliError> {
        match self {
            ChannelConfig::TwoUser(ch) => Ok(*ch),
            ChannelConfig::MultiUser(ch) => ch.as_two_user().ok_or_else(|| {
                CliError::BadInput(format!("this command needs a 2-user channel, got {} users", ch.users()))
            }),
        }
    }

    pub fn multi_user(&self) -> MUserChannel {
        match self {
            ChannelConfig::TwoUser(ch) => MUserChannel::from_two_user(ch),
            ChannelConfig::MultiUser(ch) => ch.clone(),
        }
    }
}

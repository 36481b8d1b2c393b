use thiserror::Error;

/// Problems detected while building an environment, a filter or a planner
/// from user-supplied configuration.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("map has no {0} region")]
    MissingRegion(&'static str),
    #[error("region `{0}` has zero area")]
    EmptyRegion(String),
    #[error("region `{region}` intersects a wall")]
    RegionBlocked { region: String },
    #[error("trap `{trap}` overlaps goal `{goal}`")]
    TrapOverlapsGoal { trap: String, goal: String },
    #[error("state ({0}, {1}) lies on a wall")]
    StateOnWall(f64, f64),
    #[error("state ({0}, {1}) is outside the map bounds")]
    OutOfBounds(f64, f64),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },
    #[error("failed to read config file: {0}")]
    Io(String),
    #[error("failed to parse config: {0}")]
    Parse(String),
}

impl ConfigError {
    pub fn param(name: &'static str, reason: impl Into<String>) -> Self {
        ConfigError::InvalidParam {
            name,
            reason: reason.into(),
        }
    }
}

/// `x > 0`; false for NaN, so validators reject it.
pub(crate) fn positive(x: f64) -> bool {
    x > 0.0
}

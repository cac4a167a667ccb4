//! Identifier newtypes shared across the arena.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Zone identifier, e.g. `deployed_a_restricted` or `contractor`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ZoneId(pub String);

impl ZoneId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ZoneId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ZoneId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

/// Host identifier, e.g. `hq_office_host_0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HostId(pub String);

impl HostId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for HostId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for HostId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

/// Blue agent index; the arena always fields agents 0 through 4.
pub type BlueIndex = u8;

/// Number of blue agents in the arena.
pub const BLUE_AGENT_COUNT: u8 = 5;

/// Actor identity used in action maps and trajectory logs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AgentId {
    Blue(BlueIndex),
    Red,
}

impl AgentId {
    pub fn is_blue(&self) -> bool {
        matches!(self, AgentId::Blue(_))
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentId::Blue(i) => write!(f, "blue_agent_{i}"),
            AgentId::Red => write!(f, "red_agent_0"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("unrecognized agent id: {0}")]
pub struct ParseAgentIdError(String);

impl FromStr for AgentId {
    type Err = ParseAgentIdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "red_agent_0" {
            return Ok(AgentId::Red);
        }
        if let Some(rest) = s.strip_prefix("blue_agent_") {
            if let Ok(i) = rest.parse::<u8>() {
                if i < BLUE_AGENT_COUNT {
                    return Ok(AgentId::Blue(i));
                }
            }
        }
        Err(ParseAgentIdError(s.to_owned()))
    }
}

impl Serialize for AgentId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AgentId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Unordered zone pair, normalized so the lexicographically smaller id comes
/// first. Used for connectivity rules and traffic blocks.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ZonePair {
    a: ZoneId,
    b: ZoneId,
}

impl ZonePair {
    pub fn new(x: ZoneId, y: ZoneId) -> Self {
        if x <= y {
            Self { a: x, b: y }
        } else {
            Self { a: y, b: x }
        }
    }

    pub fn first(&self) -> &ZoneId {
        &self.a
    }

    pub fn second(&self) -> &ZoneId {
        &self.b
    }

    pub fn contains(&self, z: &ZoneId) -> bool {
        &self.a == z || &self.b == z
    }
}

impl fmt::Display for ZonePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}<->{}", self.a, self.b)
    }
}

#[derive(Debug, thiserror::Error)]
#[error("zone pair must be formatted as `a<->b`: {0}")]
pub struct ParseZonePairError(String);

impl FromStr for ZonePair {
    type Err = ParseZonePairError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once("<->")
            .ok_or_else(|| ParseZonePairError(s.to_owned()))?;
        if a.is_empty() || b.is_empty() {
            return Err(ParseZonePairError(s.to_owned()));
        }
        Ok(ZonePair::new(ZoneId::new(a), ZoneId::new(b)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agent_id_round_trips_through_display() {
        for agent in [AgentId::Blue(0), AgentId::Blue(4), AgentId::Red] {
            let s = agent.to_string();
            assert_eq!(s.parse::<AgentId>().unwrap(), agent);
        }
    }

    #[test]
    fn agent_id_rejects_out_of_range_blue() {
        assert!("blue_agent_5".parse::<AgentId>().is_err());
        assert!("green_agent_0".parse::<AgentId>().is_err());
    }

    #[test]
    fn zone_pair_is_unordered() {
        let p1 = ZonePair::new(ZoneId::from("b"), ZoneId::from("a"));
        let p2 = ZonePair::new(ZoneId::from("a"), ZoneId::from("b"));
        assert_eq!(p1, p2);
        assert_eq!(p1.to_string(), "a<->b");
        assert_eq!("b<->a".parse::<ZonePair>().unwrap(), p1);
    }
}

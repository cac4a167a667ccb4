//! Scenario configuration: topology layout, engine parameters, reward
//! weights, and per-agent policy bindings.
//!
//! Everything here deserializes from the scenario JSON file; every field has
//! a default so sparse configs stay short. Validation happens in
//! [`ScenarioConfig::validate`] and in `net::build_topology`, which checks
//! the structural zone/guardian invariants.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ids::{BlueIndex, HostId, ZoneId, BLUE_AGENT_COUNT};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config field `{field}` is invalid: {reason}")]
    Invalid { field: String, reason: String },
    #[error("failed to read config file {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("failed to parse config file {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
}

impl ConfigError {
    pub fn invalid(field: &str, reason: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field: field.to_owned(),
            reason: reason.into(),
        }
    }
}

/// The four networks of the arena.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkName {
    DeployedA,
    DeployedB,
    Headquarters,
    Contractor,
}

impl NetworkName {
    pub fn prefix(&self) -> &'static str {
        match self {
            NetworkName::DeployedA => "deployed_a",
            NetworkName::DeployedB => "deployed_b",
            NetworkName::Headquarters => "hq",
            NetworkName::Contractor => "contractor",
        }
    }
}

/// Zone kinds as they appear in the arena layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZoneKind {
    Restricted,
    Operational,
    PublicAccess,
    Admin,
    Office,
    Contractor,
}

impl ZoneKind {
    pub fn suffix(&self) -> &'static str {
        match self {
            ZoneKind::Restricted => "restricted",
            ZoneKind::Operational => "operational",
            ZoneKind::PublicAccess => "public_access",
            ZoneKind::Admin => "admin",
            ZoneKind::Office => "office",
            ZoneKind::Contractor => "contractor",
        }
    }
}

/// One zone in the topology. The zone id is derived from network and kind
/// (`deployed_a_restricted`, `hq_office`, ...); the contractor network's
/// single zone is just `contractor`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZoneSpec {
    pub network: NetworkName,
    pub kind: ZoneKind,
}

impl ZoneSpec {
    pub fn id(&self) -> ZoneId {
        if self.network == NetworkName::Contractor && self.kind == ZoneKind::Contractor {
            ZoneId::new("contractor")
        } else {
            ZoneId::new(format!("{}_{}", self.network.prefix(), self.kind.suffix()))
        }
    }
}

/// Assignment of one blue agent to one zone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuardianBinding {
    pub agent: BlueIndex,
    pub zone: ZoneId,
}

/// Static topology parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct TopologyConfig {
    pub zones: Vec<ZoneSpec>,
    pub hosts_per_zone: u32,
    /// First steps of mission A and mission B respectively.
    pub phase_boundaries: [u32; 2],
    pub guardians: Vec<GuardianBinding>,
    /// Hosts flagged as critical. Empty means "host 0 of each operational
    /// zone", which is the default layout.
    pub critical_hosts: Vec<HostId>,
    /// Services installed on every host.
    pub services: Vec<String>,
    /// Decoy service names available to DeployDecoy, in deployment order.
    pub decoy_services: Vec<String>,
}

pub fn default_zones() -> Vec<ZoneSpec> {
    use NetworkName::*;
    use ZoneKind::*;
    vec![
        ZoneSpec { network: DeployedA, kind: Restricted },
        ZoneSpec { network: DeployedA, kind: Operational },
        ZoneSpec { network: DeployedB, kind: Restricted },
        ZoneSpec { network: DeployedB, kind: Operational },
        ZoneSpec { network: Headquarters, kind: PublicAccess },
        ZoneSpec { network: Headquarters, kind: Admin },
        ZoneSpec { network: Headquarters, kind: Office },
        ZoneSpec { network: Contractor, kind: Contractor },
    ]
}

pub fn default_guardians() -> Vec<GuardianBinding> {
    vec![
        GuardianBinding { agent: 0, zone: ZoneId::new("deployed_a_restricted") },
        GuardianBinding { agent: 1, zone: ZoneId::new("deployed_a_operational") },
        GuardianBinding { agent: 2, zone: ZoneId::new("deployed_b_restricted") },
        GuardianBinding { agent: 3, zone: ZoneId::new("deployed_b_operational") },
        GuardianBinding { agent: 4, zone: ZoneId::new("hq_public_access") },
        GuardianBinding { agent: 4, zone: ZoneId::new("hq_admin") },
        GuardianBinding { agent: 4, zone: ZoneId::new("hq_office") },
    ]
}

impl Default for TopologyConfig {
    fn default() -> Self {
        Self {
            zones: default_zones(),
            hosts_per_zone: 2,
            phase_boundaries: [167, 334],
            guardians: default_guardians(),
            critical_hosts: Vec::new(),
            services: vec!["svc_http".to_owned(), "svc_files".to_owned()],
            decoy_services: vec!["decoy_http".to_owned(), "decoy_ssh".to_owned()],
        }
    }
}

/// Multi-step action durations, in engine steps.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ActionDurations {
    pub analyse: u32,
    pub deploy_decoy: u32,
    pub restore: u32,
    /// Steps the host stays out of operation after a restore completes.
    pub restore_downtime: u32,
}

impl Default for ActionDurations {
    fn default() -> Self {
        Self {
            analyse: 2,
            deploy_decoy: 2,
            restore: 5,
            restore_downtime: 5,
        }
    }
}

/// Penalty weights. The reward is the negated weighted sum of the step's
/// penalty counts, scaled by the active phase multiplier.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RewardWeights {
    pub green_failure: f64,
    pub impact: f64,
    pub impact_critical: f64,
    pub restore_downtime: f64,
    pub block_denial: f64,
    /// Multipliers for planning, mission A, mission B.
    pub phase_multipliers: [f64; 3],
}

impl Default for RewardWeights {
    fn default() -> Self {
        Self {
            green_failure: 1.0,
            impact: 5.0,
            impact_critical: 10.0,
            restore_downtime: 1.0,
            block_denial: 1.0,
            phase_multipliers: [1.0, 2.0, 2.0],
        }
    }
}

impl RewardWeights {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let fields = [
            ("weights.green_failure", self.green_failure),
            ("weights.impact", self.impact),
            ("weights.impact_critical", self.impact_critical),
            ("weights.restore_downtime", self.restore_downtime),
            ("weights.block_denial", self.block_denial),
            ("weights.phase_multipliers[0]", self.phase_multipliers[0]),
            ("weights.phase_multipliers[1]", self.phase_multipliers[1]),
            ("weights.phase_multipliers[2]", self.phase_multipliers[2]),
        ];
        for (name, value) in fields {
            if !value.is_finite() || value < 0.0 {
                return Err(ConfigError::invalid(name, "must be a non-negative number"));
            }
        }
        Ok(())
    }
}

/// Stochastic engine parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineParams {
    pub durations: ActionDurations,
    /// Detection probability of a loud red scan per touched host.
    pub detect_scan: f64,
    /// Detection probability of a quiet red scan per touched host.
    pub detect_scan_quiet: f64,
    /// Detection probability of a red exploit attempt.
    pub detect_exploit: f64,
    /// Probability that a green action raises a false-positive INFO alert.
    pub fp_green: f64,
    /// Probability that an exploit against a real (non-decoy) service
    /// succeeds.
    pub exploit_success: f64,
    /// Probability per green per step of a phishing grant.
    pub p_phish: f64,
    /// Probability that a green does local work instead of accessing a
    /// remote service.
    pub p_green_local: f64,
    pub weights: RewardWeights,
}

impl Default for EngineParams {
    fn default() -> Self {
        Self {
            durations: ActionDurations::default(),
            detect_scan: 0.5,
            detect_scan_quiet: 0.1,
            detect_exploit: 0.75,
            fp_green: 0.02,
            exploit_success: 1.0,
            p_phish: 0.01,
            p_green_local: 0.5,
            weights: RewardWeights::default(),
        }
    }
}

impl EngineParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.weights.validate()?;
        let probs = [
            ("engine.detect_scan", self.detect_scan),
            ("engine.detect_scan_quiet", self.detect_scan_quiet),
            ("engine.detect_exploit", self.detect_exploit),
            ("engine.fp_green", self.fp_green),
            ("engine.exploit_success", self.exploit_success),
            ("engine.p_phish", self.p_phish),
            ("engine.p_green_local", self.p_green_local),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(ConfigError::invalid(name, "must be a probability in [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Red policy tuning knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RedParams {
    /// The stealthy variant acts only every k-th step.
    pub stealth_interval: u32,
    /// Steps before the aggressive variant considers zone knowledge stale.
    pub rescan_interval: u32,
    /// Steps before the stealthy variant considers zone knowledge stale.
    pub stealthy_rescan_interval: u32,
}

impl Default for RedParams {
    fn default() -> Self {
        Self {
            stealth_interval: 3,
            rescan_interval: 8,
            stealthy_rescan_interval: 100,
        }
    }
}

/// Red agent variants selectable per scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RedVariant {
    Default,
    Aggressive,
    Stealthy,
    Impact,
    Degrade,
}

impl fmt::Display for RedVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RedVariant::Default => "default",
            RedVariant::Aggressive => "aggressive",
            RedVariant::Stealthy => "stealthy",
            RedVariant::Impact => "impact",
            RedVariant::Degrade => "degrade",
        };
        f.write_str(s)
    }
}

impl FromStr for RedVariant {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "default" => Ok(RedVariant::Default),
            "aggressive" => Ok(RedVariant::Aggressive),
            "stealthy" => Ok(RedVariant::Stealthy),
            "impact" => Ok(RedVariant::Impact),
            "degrade" => Ok(RedVariant::Degrade),
            other => Err(ConfigError::invalid(
                "red_variant",
                format!("unknown variant `{other}`"),
            )),
        }
    }
}

/// Prompt strategy names for the LLM policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptStrategyName {
    Instruct,
    FewshotInstruct,
    RoleFewshot,
}

/// Connection settings for an LLM-driven blue agent.
///
/// When `mock_script` is set the policy answers from the script instead of
/// calling the endpoint; `{agent}`, `{host0}`, `{host1}` and `{zone0}`
/// placeholders in script entries are substituted with the agent's own
/// identifiers at startup.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct LlmSettings {
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    pub timeout_ms: u64,
    pub max_retries: u32,
    /// Initial backoff between retries; doubles per attempt.
    pub retry_base_ms: u64,
    /// Rough token budget for the user message (estimated at 4 chars per
    /// token); oldest suspicious-activity lines are dropped to fit.
    pub token_budget: u32,
    pub api_key_env: String,
    pub strategy: PromptStrategyName,
    pub mock_script: Option<Vec<String>>,
    /// Artificial per-reply delay for the scripted backend, for latency
    /// plumbing experiments.
    pub response_delay_ms: u64,
}

impl Default for LlmSettings {
    fn default() -> Self {
        Self {
            endpoint: String::new(),
            model: "gpt-4o-mini".to_owned(),
            temperature: 1.0,
            timeout_ms: 30_000,
            max_retries: 2,
            retry_base_ms: 250,
            token_budget: 2048,
            api_key_env: "ARENA_LLM_API_KEY".to_owned(),
            strategy: PromptStrategyName::RoleFewshot,
            mock_script: None,
            response_delay_ms: 0,
        }
    }
}

impl LlmSettings {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !self.temperature.is_finite() || self.temperature < 0.0 {
            return Err(ConfigError::invalid("llm.temperature", "must be >= 0"));
        }
        if self.mock_script.is_none() && self.endpoint.is_empty() {
            return Err(ConfigError::invalid(
                "llm.endpoint",
                "an endpoint URL is required unless mock_script is set",
            ));
        }
        if let Some(script) = &self.mock_script {
            if script.is_empty() {
                return Err(ConfigError::invalid("llm.mock_script", "must not be empty"));
            }
        }
        Ok(())
    }
}

/// Policy bound to one blue agent for a scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolicySpec {
    Sleep,
    Reactive {
        /// Repeated INFO alerts on one host before Analyse fires.
        #[serde(default = "default_info_threshold")]
        info_threshold: u32,
    },
    Remote {
        endpoint: String,
        #[serde(default = "default_remote_timeout_ms")]
        timeout_ms: u64,
    },
    Llm(LlmSettings),
}

fn default_info_threshold() -> u32 {
    2
}

fn default_remote_timeout_ms() -> u64 {
    1_000
}

/// Complete description of one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub name: String,
    pub topology: TopologyConfig,
    pub engine: EngineParams,
    pub red: RedParams,
    pub episodes: u32,
    pub steps: u32,
    pub seed: u64,
    pub red_variant: RedVariant,
    /// Exactly one policy per blue agent, index 0 through 4.
    pub blue: Vec<PolicySpec>,
    pub output_dir: PathBuf,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            name: "scenario".to_owned(),
            topology: TopologyConfig::default(),
            engine: EngineParams::default(),
            red: RedParams::default(),
            episodes: 2,
            steps: 500,
            seed: 1,
            red_variant: RedVariant::Default,
            blue: vec![PolicySpec::Reactive { info_threshold: 2 }; 5],
            output_dir: PathBuf::from("out"),
        }
    }
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        let config: ScenarioConfig =
            serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
                path: path.to_owned(),
                source,
            })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.steps < 1 {
            return Err(ConfigError::invalid("steps", "must be at least 1"));
        }
        if self.episodes < 1 {
            return Err(ConfigError::invalid("episodes", "must be at least 1"));
        }
        if self.blue.len() != BLUE_AGENT_COUNT as usize {
            return Err(ConfigError::invalid(
                "blue",
                format!(
                    "exactly {} policy bindings required, got {}",
                    BLUE_AGENT_COUNT,
                    self.blue.len()
                ),
            ));
        }
        if self.topology.hosts_per_zone < 1 {
            return Err(ConfigError::invalid("topology.hosts_per_zone", "must be at least 1"));
        }
        if self.topology.phase_boundaries[0] >= self.topology.phase_boundaries[1] {
            return Err(ConfigError::invalid(
                "topology.phase_boundaries",
                "boundaries must be strictly increasing",
            ));
        }
        self.engine.validate()?;
        for (i, policy) in self.blue.iter().enumerate() {
            if let PolicySpec::Llm(settings) = policy {
                settings.validate().map_err(|e| match e {
                    ConfigError::Invalid { field, reason } => ConfigError::Invalid {
                        field: format!("blue[{i}].{field}"),
                        reason,
                    },
                    other => other,
                })?;
            }
        }
        // Duplicate decoy names would make slot accounting ambiguous.
        let decoys: BTreeSet<_> = self.topology.decoy_services.iter().collect();
        if decoys.len() != self.topology.decoy_services.len() {
            return Err(ConfigError::invalid(
                "topology.decoy_services",
                "decoy service names must be unique",
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        ScenarioConfig::default().validate().unwrap();
    }

    #[test]
    fn negative_weight_is_a_config_error() {
        let mut config = ScenarioConfig::default();
        config.engine.weights.impact = -1.0;
        let err = config.validate().unwrap_err();
        assert!(err.to_string().contains("weights.impact"));
    }

    #[test]
    fn wrong_blue_binding_count_is_rejected() {
        let mut config = ScenarioConfig::default();
        config.blue.pop();
        assert!(config.validate().is_err());
    }

    #[test]
    fn sparse_json_config_fills_defaults() {
        let config: ScenarioConfig =
            serde_json::from_str(r#"{"seed": 42, "red_variant": "stealthy"}"#).unwrap();
        assert_eq!(config.seed, 42);
        assert_eq!(config.red_variant, RedVariant::Stealthy);
        assert_eq!(config.steps, 500);
        assert_eq!(config.blue.len(), 5);
    }
}

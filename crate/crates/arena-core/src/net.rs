//! Static and dynamic model of the zoned enterprise network: zones, hosts,
//! mission phases, and the phase-dependent connectivity policy.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::{ConfigError, NetworkName, TopologyConfig, ZoneKind};
use crate::ids::{BlueIndex, HostId, ZoneId, ZonePair, BLUE_AGENT_COUNT};

/// One zone of the arena.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Zone {
    pub id: ZoneId,
    pub kind: ZoneKind,
    pub network: NetworkName,
    /// Blue agent responsible for this zone; the contractor zone has none.
    pub guardian: Option<BlueIndex>,
}

/// Attacker privilege on a host.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompromiseLevel {
    Clean,
    User,
    Admin,
}

impl fmt::Display for CompromiseLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CompromiseLevel::Clean => "clean",
            CompromiseLevel::User => "user",
            CompromiseLevel::Admin => "admin",
        };
        f.write_str(s)
    }
}

/// One host. Compromise and service state mutate only through engine
/// operations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Host {
    pub id: HostId,
    pub zone: ZoneId,
    pub services: BTreeSet<String>,
    pub critical: bool,
    pub compromise: CompromiseLevel,
    pub decoys: BTreeSet<String>,
    pub degraded: BTreeSet<String>,
    /// First step at which the host is back in operation, when set.
    pub unavailable_until: Option<u32>,
}

impl Host {
    pub fn available(&self, step: u32) -> bool {
        match self.unavailable_until {
            Some(until) => step >= until,
            None => true,
        }
    }
}

/// Episode phases, visited in order within an episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissionPhase {
    Planning,
    MissionA,
    MissionB,
}

impl MissionPhase {
    pub fn index(&self) -> usize {
        match self {
            MissionPhase::Planning => 0,
            MissionPhase::MissionA => 1,
            MissionPhase::MissionB => 2,
        }
    }
}

impl fmt::Display for MissionPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MissionPhase::Planning => "Planning",
            MissionPhase::MissionA => "Mission A",
            MissionPhase::MissionB => "Mission B",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
#[error("unrecognized mission phase: {0}")]
pub struct ParsePhaseError(String);

impl FromStr for MissionPhase {
    type Err = ParsePhaseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Planning" => Ok(MissionPhase::Planning),
            "Mission A" => Ok(MissionPhase::MissionA),
            "Mission B" => Ok(MissionPhase::MissionB),
            other => Err(ParsePhaseError(other.to_owned())),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum NetError {
    #[error("step {step} is outside the episode range 0..{steps}")]
    StepOutOfRange { step: u32, steps: u32 },
}

/// Zone pairs permitted to communicate under the current phase, and the
/// pairs removed by blue traffic blocks. `allowed` already excludes every
/// pair in `blocked_overrides`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityPolicy {
    pub allowed: BTreeSet<ZonePair>,
    pub blocked_overrides: BTreeSet<ZonePair>,
}

impl ConnectivityPolicy {
    /// Intra-zone traffic is always permitted; cross-zone traffic must be in
    /// the allowed set.
    pub fn is_allowed(&self, a: &ZoneId, b: &ZoneId) -> bool {
        a == b || self.allowed.contains(&ZonePair::new(a.clone(), b.clone()))
    }
}

/// The single source of simulation truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkState {
    pub zones: BTreeMap<ZoneId, Zone>,
    pub hosts: BTreeMap<HostId, Host>,
    /// Zone pairs blocked by blue BlockTrafficZone actions.
    pub blocked: BTreeSet<ZonePair>,
}

impl NetworkState {
    pub fn guardian_of(&self, zone: &ZoneId) -> Option<BlueIndex> {
        self.zones.get(zone).and_then(|z| z.guardian)
    }

    pub fn zones_of_agent(&self, agent: BlueIndex) -> Vec<ZoneId> {
        self.zones
            .values()
            .filter(|z| z.guardian == Some(agent))
            .map(|z| z.id.clone())
            .collect()
    }

    pub fn hosts_in_zone(&self, zone: &ZoneId) -> Vec<&Host> {
        self.hosts.values().filter(|h| &h.zone == zone).collect()
    }

    pub fn hosts_of_agent(&self, agent: BlueIndex) -> Vec<HostId> {
        self.hosts
            .values()
            .filter(|h| self.guardian_of(&h.zone) == Some(agent))
            .map(|h| h.id.clone())
            .collect()
    }

    /// Map of every guarded zone to its guardian.
    pub fn zone_guardians(&self) -> BTreeMap<ZoneId, BlueIndex> {
        self.zones
            .values()
            .filter_map(|z| z.guardian.map(|g| (z.id.clone(), g)))
            .collect()
    }

    /// Stable JSON snapshot, used for state-hash comparisons in tests.
    pub fn snapshot_json(&self) -> String {
        serde_json::to_string(self).expect("network state is always serializable")
    }
}

fn host_id(zone: &ZoneId, n: u32) -> HostId {
    HostId::new(format!("{zone}_host_{n}"))
}

/// Builds the initial network state from a topology config.
///
/// Checks every structural invariant (two deployed networks with restricted
/// and operational zones, the three headquarters zones, one unguarded
/// contractor zone, guardian coverage of agents 0..=4) and seeds the red
/// agent with user access on the first contractor host.
pub fn build_topology(config: &TopologyConfig) -> Result<NetworkState, ConfigError> {
    if config.hosts_per_zone < 1 {
        return Err(ConfigError::invalid("hosts_per_zone", "must be at least 1"));
    }

    let mut zones: BTreeMap<ZoneId, Zone> = BTreeMap::new();
    for spec in &config.zones {
        let id = spec.id();
        if zones.contains_key(&id) {
            return Err(ConfigError::invalid(
                "zones",
                format!("duplicate zone `{id}`"),
            ));
        }
        zones.insert(
            id.clone(),
            Zone {
                id,
                kind: spec.kind,
                network: spec.network,
                guardian: None,
            },
        );
    }

    // Structural layout checks.
    for network in [NetworkName::DeployedA, NetworkName::DeployedB] {
        for kind in [ZoneKind::Restricted, ZoneKind::Operational] {
            let count = zones
                .values()
                .filter(|z| z.network == network && z.kind == kind)
                .count();
            if count != 1 {
                return Err(ConfigError::invalid(
                    "zones",
                    format!(
                        "network {} must have exactly one {} zone, found {count}",
                        network.prefix(),
                        kind.suffix()
                    ),
                ));
            }
        }
    }
    for kind in [ZoneKind::PublicAccess, ZoneKind::Admin, ZoneKind::Office] {
        let count = zones
            .values()
            .filter(|z| z.network == NetworkName::Headquarters && z.kind == kind)
            .count();
        if count != 1 {
            return Err(ConfigError::invalid(
                "zones",
                format!("headquarters must have exactly one {} zone", kind.suffix()),
            ));
        }
    }
    let contractor_zones: Vec<ZoneId> = zones
        .values()
        .filter(|z| z.network == NetworkName::Contractor)
        .map(|z| z.id.clone())
        .collect();
    if contractor_zones.len() != 1 {
        return Err(ConfigError::invalid(
            "zones",
            format!("exactly one contractor zone required, found {}", contractor_zones.len()),
        ));
    }
    let contractor_zone = contractor_zones[0].clone();

    // Guardian assignment.
    let mut seen_agents: BTreeSet<BlueIndex> = BTreeSet::new();
    for binding in &config.guardians {
        if binding.agent >= BLUE_AGENT_COUNT {
            return Err(ConfigError::invalid(
                "guardians",
                format!("agent index {} out of range 0..{}", binding.agent, BLUE_AGENT_COUNT),
            ));
        }
        let zone = zones.get_mut(&binding.zone).ok_or_else(|| {
            ConfigError::invalid(
                "guardians",
                format!("guardian assigned to unknown zone `{}`", binding.zone),
            )
        })?;
        if zone.guardian.is_some() {
            return Err(ConfigError::invalid(
                "guardians",
                format!("zone `{}` has more than one guardian", binding.zone),
            ));
        }
        if zone.id == contractor_zone {
            return Err(ConfigError::invalid(
                "guardians",
                "the contractor zone must not have a guardian",
            ));
        }
        zone.guardian = Some(binding.agent);
        seen_agents.insert(binding.agent);
    }
    for zone in zones.values() {
        if zone.id != contractor_zone && zone.guardian.is_none() {
            return Err(ConfigError::invalid(
                "guardians",
                format!("zone `{}` has no guardian", zone.id),
            ));
        }
    }
    if seen_agents.len() != BLUE_AGENT_COUNT as usize {
        return Err(ConfigError::invalid(
            "guardians",
            format!(
                "guardian indices must cover 0..{}, found {:?}",
                BLUE_AGENT_COUNT, seen_agents
            ),
        ));
    }

    // Hosts.
    let mut hosts: BTreeMap<HostId, Host> = BTreeMap::new();
    let default_critical = config.critical_hosts.is_empty();
    for zone in zones.values() {
        for n in 0..config.hosts_per_zone {
            let id = host_id(&zone.id, n);
            let critical = if default_critical {
                zone.kind == ZoneKind::Operational && n == 0
            } else {
                config.critical_hosts.contains(&id)
            };
            hosts.insert(
                id.clone(),
                Host {
                    id,
                    zone: zone.id.clone(),
                    services: config.services.iter().cloned().collect(),
                    critical,
                    compromise: CompromiseLevel::Clean,
                    decoys: BTreeSet::new(),
                    degraded: BTreeSet::new(),
                    unavailable_until: None,
                },
            );
        }
    }
    if !default_critical {
        for id in &config.critical_hosts {
            if !hosts.contains_key(id) {
                return Err(ConfigError::invalid(
                    "critical_hosts",
                    format!("unknown host `{id}`"),
                ));
            }
        }
    }

    // Red starts with user access on the first contractor host.
    let foothold = host_id(&contractor_zone, 0);
    hosts
        .get_mut(&foothold)
        .expect("contractor zone has at least one host")
        .compromise = CompromiseLevel::User;

    Ok(NetworkState {
        zones,
        hosts,
        blocked: BTreeSet::new(),
    })
}

/// Phase of a step given the configured boundaries.
pub fn phase_at(step: u32, boundaries: [u32; 2], steps: u32) -> Result<MissionPhase, NetError> {
    if step >= steps {
        return Err(NetError::StepOutOfRange { step, steps });
    }
    if step < boundaries[0] {
        Ok(MissionPhase::Planning)
    } else if step < boundaries[1] {
        Ok(MissionPhase::MissionA)
    } else {
        Ok(MissionPhase::MissionB)
    }
}

fn pair_allowed_in_phase(phase: MissionPhase, za: &Zone, zb: &Zone) -> bool {
    let active_network = match phase {
        MissionPhase::Planning => return true,
        MissionPhase::MissionA => NetworkName::DeployedA,
        MissionPhase::MissionB => NetworkName::DeployedB,
    };
    for (z, other) in [(za, zb), (zb, za)] {
        // The active mission's operational zone talks only to its own
        // deployed network.
        if z.kind == ZoneKind::Operational
            && z.network == active_network
            && other.network != z.network
        {
            return false;
        }
        // Restricted zones keep limited connectivity during active
        // missions: own network plus headquarters.
        if z.kind == ZoneKind::Restricted
            && other.network != z.network
            && other.network != NetworkName::Headquarters
        {
            return false;
        }
    }
    true
}

/// Effective connectivity for a phase: phase isolation rules applied first,
/// then blue traffic blocks subtracted.
pub fn connectivity(state: &NetworkState, phase: MissionPhase) -> ConnectivityPolicy {
    let zone_list: Vec<&Zone> = state.zones.values().collect();
    let mut allowed = BTreeSet::new();
    for (i, za) in zone_list.iter().enumerate() {
        for zb in zone_list.iter().skip(i + 1) {
            if pair_allowed_in_phase(phase, za, zb) {
                allowed.insert(ZonePair::new(za.id.clone(), zb.id.clone()));
            }
        }
    }
    let blocked_overrides: BTreeSet<ZonePair> = state.blocked.clone();
    allowed.retain(|pair| !blocked_overrides.contains(pair));
    ConnectivityPolicy {
        allowed,
        blocked_overrides,
    }
}

/// Connectivity under the phase rules only, ignoring blue blocks. Greens
/// pick targets from this set; attempts that then hit a blue block are
/// counted as block denials.
pub fn phase_connectivity(state: &NetworkState, phase: MissionPhase) -> ConnectivityPolicy {
    let unblocked = NetworkState {
        zones: state.zones.clone(),
        hosts: BTreeMap::new(),
        blocked: BTreeSet::new(),
    };
    connectivity(&unblocked, phase)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::default_zones;

    fn default_state() -> NetworkState {
        build_topology(&TopologyConfig::default()).unwrap()
    }

    #[test]
    fn default_topology_matches_expected_shape() {
        let state = default_state();
        assert_eq!(state.zones.len(), 8);
        let networks: BTreeSet<NetworkName> = state.zones.values().map(|z| z.network).collect();
        assert_eq!(networks.len(), 4);
        let guardians: BTreeSet<BlueIndex> =
            state.zones.values().filter_map(|z| z.guardian).collect();
        assert_eq!(guardians, (0..5).collect());
        assert_eq!(state.hosts.len(), 16);
        let footholds: Vec<&Host> = state
            .hosts
            .values()
            .filter(|h| h.compromise != CompromiseLevel::Clean)
            .collect();
        assert_eq!(footholds.len(), 1);
        assert_eq!(footholds[0].zone, ZoneId::new("contractor"));
        assert_eq!(footholds[0].compromise, CompromiseLevel::User);
    }

    #[test]
    fn one_host_per_zone_gives_eight_hosts() {
        let config = TopologyConfig {
            hosts_per_zone: 1,
            ..TopologyConfig::default()
        };
        let state = build_topology(&config).unwrap();
        assert_eq!(state.hosts.len(), 8);
        let clean = state
            .hosts
            .values()
            .filter(|h| h.compromise == CompromiseLevel::Clean)
            .count();
        assert_eq!(clean, 7);
    }

    #[test]
    fn duplicate_guardian_is_a_config_error() {
        let mut config = TopologyConfig::default();
        config.guardians.push(GuardianBindingDup::binding());
        let err = build_topology(&config).unwrap_err();
        assert!(err.to_string().contains("more than one guardian"), "{err}");
    }

    struct GuardianBindingDup;
    impl GuardianBindingDup {
        fn binding() -> crate::config::GuardianBinding {
            crate::config::GuardianBinding {
                agent: 3,
                zone: ZoneId::new("deployed_a_restricted"),
            }
        }
    }

    #[test]
    fn missing_zone_is_a_config_error() {
        let mut config = TopologyConfig::default();
        config.zones.retain(|z| z.kind != ZoneKind::Office);
        let err = build_topology(&config).unwrap_err();
        assert!(err.to_string().contains("office"), "{err}");
    }

    #[test]
    fn guarded_contractor_zone_is_rejected() {
        let mut config = TopologyConfig::default();
        config.guardians = default_guardians_with_contractor();
        let err = build_topology(&config).unwrap_err();
        assert!(err.to_string().contains("contractor"), "{err}");
    }

    fn default_guardians_with_contractor() -> Vec<crate::config::GuardianBinding> {
        let mut g = crate::config::default_guardians();
        g.push(crate::config::GuardianBinding {
            agent: 4,
            zone: ZoneId::new("contractor"),
        });
        g
    }

    #[test]
    fn phase_at_boundaries() {
        let b = [167, 334];
        assert_eq!(phase_at(0, b, 500).unwrap(), MissionPhase::Planning);
        assert_eq!(phase_at(166, b, 500).unwrap(), MissionPhase::Planning);
        assert_eq!(phase_at(167, b, 500).unwrap(), MissionPhase::MissionA);
        assert_eq!(phase_at(200, b, 500).unwrap(), MissionPhase::MissionA);
        assert_eq!(phase_at(334, b, 500).unwrap(), MissionPhase::MissionB);
        assert_eq!(phase_at(499, b, 500).unwrap(), MissionPhase::MissionB);
        assert!(phase_at(500, b, 500).is_err());
    }

    #[test]
    fn planning_allows_all_pairs() {
        let state = default_state();
        let policy = connectivity(&state, MissionPhase::Planning);
        // 8 zones -> 28 unordered pairs.
        assert_eq!(policy.allowed.len(), 28);
    }

    #[test]
    fn mission_a_isolates_the_deployed_a_operational_zone() {
        let state = default_state();
        let policy = connectivity(&state, MissionPhase::MissionA);
        let op = ZoneId::new("deployed_a_operational");
        let partners: Vec<&ZonePair> =
            policy.allowed.iter().filter(|p| p.contains(&op)).collect();
        assert_eq!(partners.len(), 1);
        assert!(partners[0].contains(&ZoneId::new("deployed_a_restricted")));
    }

    #[test]
    fn blue_block_removes_pair_from_allowed() {
        let mut state = default_state();
        let pair = ZonePair::new(ZoneId::new("hq_office"), ZoneId::new("contractor"));
        state.blocked.insert(pair.clone());
        let policy = connectivity(&state, MissionPhase::MissionA);
        assert!(!policy.allowed.contains(&pair));
        assert!(policy.blocked_overrides.contains(&pair));
    }

    #[test]
    fn zone_ids_follow_naming_scheme() {
        let ids: Vec<String> = default_zones().iter().map(|z| z.id().to_string()).collect();
        assert!(ids.contains(&"deployed_a_restricted".to_owned()));
        assert!(ids.contains(&"hq_office".to_owned()));
        assert!(ids.contains(&"contractor".to_owned()));
    }
}

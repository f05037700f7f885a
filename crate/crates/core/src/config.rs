//! Configuration for both compilation stages and the end-to-end driver.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Duration;

/// Stage-1 (mapping) configuration.
#[derive(Debug, Clone)]
pub struct Stage1Config {
    /// Maximum bridge size per stabilizer; `None` defaults to wt(s).
    pub bridge_limit: Option<usize>,
    /// How many uniform +1 escalations of the bridge limit to try on UNSAT.
    pub escalation_cap: usize,
    /// Soft-weight overrides. When `None`, weights are auto-stratified:
    /// bridge size dominates compatibility dominates retention.
    pub w1: Option<u64>,
    pub w2: Option<u64>,
    pub w3: Option<u64>,
    /// Restrict mapping and bridges to this node subset.
    pub allowed_region: Option<BTreeSet<usize>>,
    /// Nodes that must stay untouched (occupied by parked data qubits of
    /// other subsets during partitioned compilation).
    pub forbidden_nodes: BTreeSet<usize>,
    /// Data qubits to map; `None` means all of `0..num_data`.
    pub active_qubits: Option<Vec<usize>>,
    /// Prior placements: soft retention clauses pull these qubits back to
    /// their previous nodes.
    pub retention: BTreeMap<usize, usize>,
    /// Use the per-start-vertex traversal encoding instead of root election.
    pub per_root_bft: bool,
    /// Seed solver polarities from retention targets.
    pub warm_start: bool,
    pub time_limit: Duration,
}

impl Default for Stage1Config {
    fn default() -> Self {
        Stage1Config {
            bridge_limit: None,
            escalation_cap: 4,
            w1: None,
            w2: None,
            w3: None,
            allowed_region: None,
            forbidden_nodes: BTreeSet::new(),
            active_qubits: None,
            retention: BTreeMap::new(),
            per_root_bft: false,
            warm_start: true,
            time_limit: Duration::from_secs(7200),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepthSearch {
    Binary,
    Linear,
}

/// Which stage-2 constraint families to skip. Only used by mutation tests;
/// everything is enabled in normal operation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DisabledConstraints {
    pub hard_b1: bool,
    pub hard_b2: bool,
    pub hard_b3: bool,
    pub hard_c: bool,
    pub hard_d: bool,
    pub phase_order: bool,
}

/// Stage-2 (scheduling) configuration.
#[derive(Debug, Clone)]
pub struct Stage2Config {
    pub depth_search: DepthSearch,
    pub time_limit: Duration,
    pub disabled: DisabledConstraints,
}

impl Default for Stage2Config {
    fn default() -> Self {
        Stage2Config {
            depth_search: DepthSearch::Binary,
            time_limit: Duration::from_secs(7200),
            disabled: DisabledConstraints::default(),
        }
    }
}

/// End-to-end run configuration assembled by the CLI.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub stage1: Stage1Config,
    pub stage2: Stage2Config,
    /// Number of stabilizer subsets; 1 compiles the whole code at once.
    pub partition: usize,
    pub seed: u64,
    /// External MaxSAT command for stage 1; `None` uses the internal engine.
    pub external_solver: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            stage1: Stage1Config::default(),
            stage2: Stage2Config::default(),
            partition: 1,
            seed: 0,
            external_solver: None,
        }
    }
}

//! Stage 1: code topology mapping via MaxSAT.
//!
//! Hard constraints: injective data placement, data/ancilla disjointness,
//! connected ancilla bridges within a per-stabilizer size limit, and one
//! coupling ancilla per (stabilizer, data qubit). Soft constraints: minimize
//! total bridge size (dominant), maximize bridge-disjoint stabilizer pairs,
//! and optionally retain prior placements of shared data qubits.
//!
//! Bridge connectivity is encoded as a breadth-first traversal. The default
//! variant elects one root per stabilizer and tracks visited-by-round
//! variables from it; connectivity from one vertex of a set is equivalent to
//! connectivity from any, and this cuts the variable count by a factor of
//! |Phys| against the per-start-vertex formulation, which remains available
//! behind [`Stage1Config::per_root_bft`] for encoding-size comparisons.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};

use esmc_sat::encode::{at_least_one, at_most_k, at_most_one, exactly_one};
use esmc_sat::external::ExternalSolver;
use esmc_sat::solver::{SolveOutcome, Solver};
use esmc_sat::types::{Lit, Model, Var, Wcnf};
use esmc_sat::{solve_maxsat, Builder, MaxSatOptions, MaxSatResult};

use crate::arch::CouplingGraph;
use crate::code::StabilizerCode;
use crate::config::Stage1Config;
use crate::error::{param, Error, Result};
use crate::tag::Tag;

/// Output of stage 1: data placement, per-stabilizer ancilla bridges with
/// their measured roots, and the data-to-bridge coupling relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingSolution {
    /// pi: data qubit -> physical node (injective).
    pub placement: BTreeMap<usize, usize>,
    /// anc\[s\]: bridge nodes per stabilizer, by stabilizer index.
    pub bridges: Vec<BTreeSet<usize>>,
    /// Measured root per stabilizer; always a bridge member.
    pub roots: Vec<usize>,
    /// cp(s, q): coupling bridge node per (stabilizer, supported data qubit).
    pub couplings: Vec<BTreeMap<usize, usize>>,
}

impl MappingSolution {
    pub fn total_bridge_size(&self) -> usize {
        self.bridges.iter().map(|b| b.len()).sum()
    }

    /// Number of stabilizer pairs with node-disjoint bridges.
    pub fn compatible_pairs(&self) -> usize {
        let mut count = 0;
        for i in 0..self.bridges.len() {
            for j in i + 1..self.bridges.len() {
                if self.bridges[i].is_disjoint(&self.bridges[j]) {
                    count += 1;
                }
            }
        }
        count
    }

    pub fn to_json(&self, code: &StabilizerCode) -> String {
        let file = MappingFile {
            pi: self
                .placement
                .iter()
                .map(|(&q, &p)| (q.to_string(), p))
                .collect(),
            anc: self
                .bridges
                .iter()
                .enumerate()
                .map(|(s, b)| {
                    (
                        code.stabilizers[s].label.clone(),
                        b.iter().copied().collect(),
                    )
                })
                .collect(),
            cp: self
                .couplings
                .iter()
                .enumerate()
                .map(|(s, cps)| {
                    (
                        code.stabilizers[s].label.clone(),
                        cps.iter().map(|(&q, &p)| (q.to_string(), p)).collect(),
                    )
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("mapping serialization")
    }

    /// Loads a mapping; roots are not part of the interchange schema and
    /// default to the smallest bridge node.
    pub fn from_json(text: &str, code: &StabilizerCode) -> Result<MappingSolution> {
        let file: MappingFile = serde_json::from_str(text)?;
        let mut placement = BTreeMap::new();
        for (q, p) in &file.pi {
            let q: usize = q
                .parse()
                .map_err(|_| param(format!("bad data-qubit key '{q}'")))?;
            placement.insert(q, *p);
        }
        let mut bridges = Vec::new();
        let mut couplings = Vec::new();
        let mut roots = Vec::new();
        for s in &code.stabilizers {
            let nodes = file
                .anc
                .get(&s.label)
                .ok_or_else(|| param(format!("mapping missing bridge for {}", s.label)))?;
            let bridge: BTreeSet<usize> = nodes.iter().copied().collect();
            let root = *bridge
                .iter()
                .next()
                .ok_or_else(|| param(format!("empty bridge for {}", s.label)))?;
            let cp_raw = file
                .cp
                .get(&s.label)
                .ok_or_else(|| param(format!("mapping missing couplings for {}", s.label)))?;
            let mut cps = BTreeMap::new();
            for (q, p) in cp_raw {
                let q: usize = q
                    .parse()
                    .map_err(|_| param(format!("bad coupling key '{q}'")))?;
                cps.insert(q, *p);
            }
            bridges.push(bridge);
            roots.push(root);
            couplings.push(cps);
        }
        Ok(MappingSolution {
            placement,
            bridges,
            roots,
            couplings,
        })
    }

    pub fn read_file(path: &Path, code: &StabilizerCode) -> Result<MappingSolution> {
        Self::from_json(&std::fs::read_to_string(path)?, code)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct MappingFile {
    pi: BTreeMap<String, usize>,
    anc: BTreeMap<String, Vec<usize>>,
    cp: BTreeMap<String, BTreeMap<String, usize>>,
}

/// Encoded stage-1 instance plus everything needed to decode a model.
pub struct Stage1Encoding {
    pub builder: Builder<Tag>,
    pub region: Vec<usize>,
    pub active: Vec<usize>,
    pub limits: Vec<usize>,
    pub num_stabs: usize,
    pub per_root: bool,
}

fn auto_weights(cfg: &Stage1Config, num_pairs: usize, num_retention: usize) -> (u64, u64, u64) {
    let w3 = cfg.w3.unwrap_or(1);
    let w2 = cfg.w2.unwrap_or(w3 * num_retention as u64 + 1);
    let w1 = cfg
        .w1
        .unwrap_or(w2 * num_pairs as u64 + w3 * num_retention as u64 + 1);
    (w1, w2, w3)
}

/// Builds the stage-1 WCNF. `extra_limit` uniformly enlarges every bridge
/// limit (used by the escalation loop in [`solve_stage1`]).
pub fn encode_stage1(
    code: &StabilizerCode,
    arch: &CouplingGraph,
    cfg: &Stage1Config,
    extra_limit: usize,
) -> Result<Stage1Encoding> {
    let active: Vec<usize> = match &cfg.active_qubits {
        Some(qs) => {
            let set: BTreeSet<usize> = qs.iter().copied().collect();
            set.into_iter().collect()
        }
        None => (0..code.num_data).collect(),
    };
    for s in &code.stabilizers {
        for q in s.qubits() {
            if !active.contains(&q) {
                return Err(param(format!(
                    "stabilizer {} references inactive data qubit {q}",
                    s.label
                )));
            }
        }
    }
    let region: Vec<usize> = arch
        .nodes()
        .iter()
        .copied()
        .filter(|n| {
            cfg.allowed_region.as_ref().is_none_or(|r| r.contains(n))
                && !cfg.forbidden_nodes.contains(n)
        })
        .collect();
    if active.len() > region.len() {
        return Err(Error::Infeasible(format!(
            "{} data qubits cannot fit {} available physical qubits",
            active.len(),
            region.len()
        )));
    }

    let num_stabs = code.stabilizers.len();
    let limits: Vec<usize> = code
        .stabilizers
        .iter()
        .map(|s| cfg.bridge_limit.unwrap_or(s.weight()).max(1) + extra_limit)
        .collect();

    let mut b: Builder<Tag> = Builder::new();

    // Hard A(1): injective data placement.
    for &q in &active {
        let lits: Vec<Lit> = region
            .iter()
            .map(|&p| b.var(Tag::Map { qubit: q, node: p }).positive())
            .collect();
        exactly_one(&mut b, &lits);
    }
    for &p in &region {
        let lits: Vec<Lit> = active
            .iter()
            .map(|&q| b.var(Tag::Map { qubit: q, node: p }).positive())
            .collect();
        at_most_one(&mut b, &lits);
    }

    // Ancilla variables, bridge size caps and a per-stabilizer nonemptiness
    // clause (implied by Hard C, stated directly to aid propagation).
    for s in 0..num_stabs {
        let lits: Vec<Lit> = region
            .iter()
            .map(|&p| b.var(Tag::Anc { stab: s, node: p }).positive())
            .collect();
        at_least_one(&mut b, &lits);
        at_most_k(&mut b, &lits, limits[s]);
    }

    // Hard A(2): a node never carries both a data qubit and an ancilla.
    for &q in &active {
        for s in 0..num_stabs {
            for &p in &region {
                let m = b.existing(&Tag::Map { qubit: q, node: p });
                let a = b.existing(&Tag::Anc { stab: s, node: p });
                b.clause(&[m.negative(), a.negative()]);
            }
        }
    }

    // Hard B: bridge connectivity via breadth-first traversal rounds.
    if cfg.per_root_bft {
        encode_connectivity_per_start(&mut b, arch, &region, &limits, num_stabs);
    } else {
        encode_connectivity_rooted(&mut b, arch, &region, &limits, num_stabs);
    }

    // Hard C: every supported data qubit couples to exactly one bridge node
    // adjacent to its placement.
    for (s, stab) in code.stabilizers.iter().enumerate() {
        for q in stab.qubits() {
            let lits: Vec<Lit> = region
                .iter()
                .map(|&p| {
                    b.var(Tag::Cp {
                        stab: s,
                        qubit: q,
                        node: p,
                    })
                    .positive()
                })
                .collect();
            exactly_one(&mut b, &lits);
            for &p in &region {
                let cp = b.existing(&Tag::Cp {
                    stab: s,
                    qubit: q,
                    node: p,
                });
                let anc = b.existing(&Tag::Anc { stab: s, node: p });
                b.clause(&[cp.negative(), anc.positive()]);
                let mut clause = vec![cp.negative()];
                for &n in arch.neighbors(p) {
                    if let Some(m) = b.registry.lookup(&Tag::Map { qubit: q, node: n }) {
                        clause.push(m.positive());
                    }
                }
                b.clause(&clause);
            }
        }
    }

    // Soft constraints.
    let num_pairs = num_stabs * (num_stabs - 1) / 2;
    let retention: Vec<(usize, usize)> = cfg
        .retention
        .iter()
        .filter(|&(q, p)| active.contains(q) && region.contains(p))
        .map(|(&q, &p)| (q, p))
        .collect();
    let (w1, w2, w3) = auto_weights(cfg, num_pairs, retention.len());

    // Soft P1: minimize total bridge size.
    for s in 0..num_stabs {
        for &p in &region {
            let a = b.existing(&Tag::Anc { stab: s, node: p });
            b.soft(w1, &[a.negative()]);
        }
    }
    // Soft P2: maximize bridge-disjoint pairs.
    for i in 0..num_stabs {
        for j in i + 1..num_stabs {
            let compat = b.var(Tag::Compat { a: i, b: j }).positive();
            for &p in &region {
                let ai = b.existing(&Tag::Anc { stab: i, node: p });
                let aj = b.existing(&Tag::Anc { stab: j, node: p });
                b.clause(&[!compat, ai.negative(), aj.negative()]);
            }
            b.soft(w2, &[compat]);
        }
    }
    // Retention: keep shared data qubits where a previous subset put them.
    for &(q, p) in &retention {
        let m = b.existing(&Tag::Map { qubit: q, node: p });
        b.soft(w3, &[m.positive()]);
    }

    Ok(Stage1Encoding {
        builder: b,
        region,
        active,
        limits,
        num_stabs,
        per_root: cfg.per_root_bft,
    })
}

/// Root-election connectivity: one elected root per stabilizer, visited
/// variables track traversal rounds from it.
fn encode_connectivity_rooted(
    b: &mut Builder<Tag>,
    arch: &CouplingGraph,
    region: &[usize],
    limits: &[usize],
    num_stabs: usize,
) {
    let region_set: BTreeSet<usize> = region.iter().copied().collect();
    for s in 0..num_stabs {
        let limit = limits[s];
        let roots: Vec<Lit> = region
            .iter()
            .map(|&p| b.var(Tag::Root { stab: s, node: p }).positive())
            .collect();
        exactly_one(b, &roots);
        for &p in region {
            let root = b.existing(&Tag::Root { stab: s, node: p });
            let anc = b.existing(&Tag::Anc { stab: s, node: p });
            b.clause(&[root.negative(), anc.positive()]);
        }
        // visited(p, 1) is the root variable itself.
        let visited = |b: &mut Builder<Tag>, p: usize, t: usize| -> Var {
            if t == 1 {
                b.existing(&Tag::Root { stab: s, node: p })
            } else {
                b.var(Tag::Visit {
                    stab: s,
                    node: p,
                    round: t,
                })
            }
        };
        for t in 2..=limit {
            for &p in region {
                let v = visited(b, p, t);
                let anc = b.existing(&Tag::Anc { stab: s, node: p });
                b.clause(&[v.negative(), anc.positive()]);
                let mut clause = vec![v.negative(), visited(b, p, t - 1).positive()];
                for &n in arch.neighbors(p) {
                    if region_set.contains(&n) {
                        clause.push(visited(b, n, t - 1).positive());
                    }
                }
                b.clause(&clause);
            }
        }
        // Every bridge node must be visited by the final round.
        for &p in region {
            let anc = b.existing(&Tag::Anc { stab: s, node: p });
            let last = visited(b, p, limit);
            b.clause(&[anc.negative(), last.positive()]);
        }
    }
}

/// Per-start-vertex connectivity: a full traversal instance from every
/// possible start node, with visited variables restricted to the reachable
/// cone (distance at most round-1 from the start).
fn encode_connectivity_per_start(
    b: &mut Builder<Tag>,
    arch: &CouplingGraph,
    region: &[usize],
    limits: &[usize],
    num_stabs: usize,
) {
    let region_set: BTreeSet<usize> = region.iter().copied().collect();
    // Region-restricted BFS distances from every node.
    let mut dist: BTreeMap<usize, BTreeMap<usize, usize>> = BTreeMap::new();
    for &start in region {
        let mut d = BTreeMap::from([(start, 0usize)]);
        let mut queue = VecDeque::from([start]);
        while let Some(n) = queue.pop_front() {
            let dn = d[&n];
            for &m in arch.neighbors(n) {
                if region_set.contains(&m) && !d.contains_key(&m) {
                    d.insert(m, dn + 1);
                    queue.push_back(m);
                }
            }
        }
        dist.insert(start, d);
    }

    for s in 0..num_stabs {
        let limit = limits[s];
        for &start in region {
            let d = &dist[&start];
            // visited(p, t) exists iff dist(start, p) <= t-1; at t == 1 only
            // the start vertex is visited (a constant, not a variable).
            let lookup = |b: &mut Builder<Tag>, p: usize, t: usize| -> Option<Lit> {
                if t == 1 {
                    return None; // constant: true iff p == start
                }
                match d.get(&p) {
                    Some(&dp) if dp <= t - 1 => Some(
                        b.var(Tag::VisitFrom {
                            stab: s,
                            start,
                            node: p,
                            round: t,
                        })
                        .positive(),
                    ),
                    _ => None,
                }
            };
            for t in 2..=limit {
                for &p in region {
                    let Some(v) = lookup(b, p, t) else { continue };
                    let anc = b.existing(&Tag::Anc { stab: s, node: p });
                    b.clause(&[!v, anc.positive()]);
                    // Previous-round antecedents; constants fold away.
                    if t == 2 {
                        // dist(start, p) <= 1 makes the antecedent constant
                        // true (start itself or a neighbor of it); nothing to
                        // emit.
                        continue;
                    }
                    let mut clause = vec![!v];
                    let mut constant_true = false;
                    for n in std::iter::once(p).chain(
                        arch.neighbors(p)
                            .iter()
                            .copied()
                            .filter(|n| region_set.contains(n)),
                    ) {
                        if t - 1 == 1 {
                            constant_true |= n == start;
                        } else if let Some(l) = lookup(b, n, t - 1) {
                            clause.push(l);
                        }
                    }
                    if !constant_true {
                        b.clause(&clause);
                    }
                }
            }
            // Final obligation: if the traversal starts on a bridge node,
            // every other bridge node is visited by the last round.
            let anc_start = b.existing(&Tag::Anc { stab: s, node: start });
            for &p in region {
                if p == start {
                    continue;
                }
                let anc_p = b.existing(&Tag::Anc { stab: s, node: p });
                let final_lit = if limit == 1 {
                    None // only the start is reachable
                } else {
                    lookup(b, p, limit)
                };
                match final_lit {
                    Some(v) => b.clause(&[anc_start.negative(), anc_p.negative(), v]),
                    None => b.clause(&[anc_start.negative(), anc_p.negative()]),
                }
            }
        }
    }
}

/// Reads a mapping out of a satisfying model.
pub fn decode_stage1(
    model: &Model,
    encoding: &Stage1Encoding,
    code: &StabilizerCode,
) -> Result<MappingSolution> {
    let b = &encoding.builder;
    let mut placement = BTreeMap::new();
    for &q in &encoding.active {
        for &p in &encoding.region {
            let var = b
                .registry
                .lookup(&Tag::Map { qubit: q, node: p })
                .expect("map variable registered");
            if model.value(var) {
                if placement.insert(q, p).is_some() {
                    return Err(Error::Internal(format!("qubit {q} placed twice")));
                }
            }
        }
    }
    let mut bridges = Vec::new();
    let mut roots = Vec::new();
    let mut couplings = Vec::new();
    for (s, stab) in code.stabilizers.iter().enumerate() {
        let mut bridge = BTreeSet::new();
        for &p in &encoding.region {
            let var = b
                .registry
                .lookup(&Tag::Anc { stab: s, node: p })
                .expect("anc variable registered");
            if model.value(var) {
                bridge.insert(p);
            }
        }
        let root = if encoding.per_root {
            *bridge
                .iter()
                .next()
                .ok_or_else(|| Error::Internal(format!("empty bridge for stabilizer {s}")))?
        } else {
            encoding
                .region
                .iter()
                .copied()
                .find(|&p| {
                    b.registry
                        .lookup(&Tag::Root { stab: s, node: p })
                        .is_some_and(|v| model.value(v))
                })
                .ok_or_else(|| Error::Internal(format!("no root elected for stabilizer {s}")))?
        };
        let mut cps = BTreeMap::new();
        for q in stab.qubits() {
            for &p in &encoding.region {
                let var = b
                    .registry
                    .lookup(&Tag::Cp {
                        stab: s,
                        qubit: q,
                        node: p,
                    })
                    .expect("cp variable registered");
                if model.value(var) {
                    cps.insert(q, p);
                }
            }
        }
        bridges.push(bridge);
        roots.push(root);
        couplings.push(cps);
    }
    Ok(MappingSolution {
        placement,
        bridges,
        roots,
        couplings,
    })
}

/// Independent re-check of every stage-1 hard constraint with plain graph
/// search. Returns an empty list iff the mapping is valid.
pub fn validate_mapping(
    sol: &MappingSolution,
    code: &StabilizerCode,
    arch: &CouplingGraph,
    limits: Option<&[usize]>,
) -> Vec<String> {
    let mut issues = Vec::new();
    let mut used_nodes: BTreeMap<usize, usize> = BTreeMap::new();
    for (&q, &p) in &sol.placement {
        if q >= code.num_data {
            issues.push(format!("placed qubit {q} outside code"));
        }
        if !arch.contains(p) {
            issues.push(format!("qubit {q} placed on unknown node {p}"));
        }
        if let Some(other) = used_nodes.insert(p, q) {
            issues.push(format!("qubits {other} and {q} share node {p}"));
        }
    }
    let data_nodes: BTreeSet<usize> = sol.placement.values().copied().collect();
    if sol.bridges.len() != code.stabilizers.len() {
        issues.push("bridge count differs from stabilizer count".into());
        return issues;
    }
    for (s, stab) in code.stabilizers.iter().enumerate() {
        let bridge = &sol.bridges[s];
        let label = &stab.label;
        if bridge.is_empty() {
            issues.push(format!("{label}: empty bridge"));
            continue;
        }
        if let Some(limits) = limits {
            if bridge.len() > limits[s] {
                issues.push(format!(
                    "{label}: bridge size {} exceeds limit {}",
                    bridge.len(),
                    limits[s]
                ));
            }
        }
        for &p in bridge {
            if !arch.contains(p) {
                issues.push(format!("{label}: bridge node {p} not in architecture"));
            }
            if data_nodes.contains(&p) {
                issues.push(format!("{label}: bridge node {p} also carries a data qubit"));
            }
        }
        if !sol.bridges[s].contains(&sol.roots[s]) {
            issues.push(format!("{label}: root {} outside bridge", sol.roots[s]));
        }
        // Connectivity by BFS inside the bridge.
        let start = *bridge.iter().next().unwrap();
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(n) = queue.pop_front() {
            for &m in arch.neighbors(n) {
                if bridge.contains(&m) && seen.insert(m) {
                    queue.push_back(m);
                }
            }
        }
        if seen.len() != bridge.len() {
            issues.push(format!("{label}: bridge is disconnected"));
        }
        // Couplings.
        for q in stab.qubits() {
            match (sol.couplings[s].get(&q), sol.placement.get(&q)) {
                (Some(&cp), Some(&pq)) => {
                    if !bridge.contains(&cp) {
                        issues.push(format!("{label}: cp({q}) = {cp} outside bridge"));
                    }
                    if !arch.are_adjacent(cp, pq) {
                        issues.push(format!(
                            "{label}: cp({q}) = {cp} not adjacent to placement {pq}"
                        ));
                    }
                }
                (None, _) => issues.push(format!("{label}: no coupling for data qubit {q}")),
                (_, None) => issues.push(format!("{label}: data qubit {q} unplaced")),
            }
        }
        for q in sol.couplings[s].keys() {
            if stab.pauli_at(*q) == crate::code::PauliOp::I {
                issues.push(format!("{label}: coupling for unsupported qubit {q}"));
            }
        }
    }
    issues
}

/// Result of a stage-1 solve.
#[derive(Debug, Clone)]
pub struct Stage1Outcome {
    pub solution: MappingSolution,
    pub total_bridge_size: usize,
    pub compatible_pairs: usize,
    pub optimal: bool,
    pub limits: Vec<usize>,
}

/// Encode, optimize, decode, validate; escalates the bridge limit on UNSAT.
pub fn solve_stage1(
    code: &StabilizerCode,
    arch: &CouplingGraph,
    cfg: &Stage1Config,
    external: Option<&ExternalSolver>,
) -> Result<Stage1Outcome> {
    let deadline = std::time::Instant::now() + cfg.time_limit;
    for extra in 0..=cfg.escalation_cap {
        let encoding = encode_stage1(code, arch, cfg, extra)?;
        let phase_hints: Vec<(Var, bool)> = if cfg.warm_start {
            cfg.retention
                .iter()
                .filter_map(|(&q, &p)| {
                    encoding
                        .builder
                        .registry
                        .lookup(&Tag::Map { qubit: q, node: p })
                        .map(|v| (v, true))
                })
                .collect()
        } else {
            Vec::new()
        };
        let result = match external {
            Some(ext) => ext.solve(&encoding.builder.formula)?,
            None => solve_maxsat(
                &encoding.builder.formula,
                &MaxSatOptions {
                    deadline: Some(deadline),
                    phase_hints,
                },
            ),
        };
        let (model, optimal) = match result {
            MaxSatResult::Optimal { model, .. } => (model, true),
            MaxSatResult::Feasible { model, .. } => (model, false),
            MaxSatResult::HardUnsat => continue,
            MaxSatResult::Timeout => return Err(Error::Timeout),
        };
        let solution = decode_stage1(&model, &encoding, code)?;
        let issues = validate_mapping(&solution, code, arch, Some(&encoding.limits));
        if !issues.is_empty() {
            return Err(Error::Internal(format!(
                "decoded mapping failed validation: {}",
                issues.join("; ")
            )));
        }
        return Ok(Stage1Outcome {
            total_bridge_size: solution.total_bridge_size(),
            compatible_pairs: solution.compatible_pairs(),
            solution,
            optimal,
            limits: encoding.limits,
        });
    }
    Err(Error::Infeasible(format!(
        "no mapping within bridge limits after {} escalations",
        cfg.escalation_cap
    )))
}

/// Proves a bridge-size optimum: SAT check with a hard bound one below.
/// Returns true when `total - 1` is unsatisfiable.
pub fn bridge_bound_is_tight(
    code: &StabilizerCode,
    arch: &CouplingGraph,
    cfg: &Stage1Config,
    total: usize,
) -> Result<bool> {
    if total == 0 {
        return Ok(true);
    }
    let encoding = encode_stage1(code, arch, cfg, 0)?;
    let mut solver = Solver::new();
    solver.ensure_vars(encoding.builder.formula.num_vars());
    for clause in encoding.builder.formula.hard_clauses() {
        solver.add_clause(clause);
    }
    let anc_lits: Vec<Lit> = encoding
        .builder
        .registry
        .tags()
        .filter(|(_, t)| matches!(t, Tag::Anc { .. }))
        .map(|(v, _)| v.positive())
        .collect();
    at_most_k(&mut solver, &anc_lits, total - 1);
    let deadline = std::time::Instant::now() + cfg.time_limit;
    match solver.solve(&[], Some(deadline)) {
        SolveOutcome::Unsat => Ok(true),
        SolveOutcome::Sat => Ok(false),
        SolveOutcome::Timeout => Err(Error::Timeout),
    }
}

/// Enumerates every valid mapping, projected onto (placement, bridges,
/// couplings). Intended for exhaustive comparison on small instances.
pub fn enumerate_mappings(
    code: &StabilizerCode,
    arch: &CouplingGraph,
    cfg: &Stage1Config,
    limit: usize,
) -> Result<Vec<MappingSolution>> {
    let encoding = encode_stage1(code, arch, cfg, 0)?;
    let mut solver = Solver::new();
    solver.ensure_vars(encoding.builder.formula.num_vars());
    for clause in encoding.builder.formula.hard_clauses() {
        solver.add_clause(clause);
    }
    let projection: Vec<Var> = encoding
        .builder
        .registry
        .tags()
        .filter(|(_, t)| matches!(t, Tag::Map { .. } | Tag::Anc { .. } | Tag::Cp { .. }))
        .map(|(v, _)| v)
        .collect();
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    while out.len() < limit {
        match solver.solve(&[], None) {
            SolveOutcome::Sat => {
                let model = solver.model();
                let block: Vec<Lit> = projection
                    .iter()
                    .map(|&v| Lit::new(v, !model.value(v)))
                    .collect();
                let sol = decode_stage1(&model, &encoding, code)?;
                let key = format!("{sol:?}");
                if seen.insert(key) {
                    out.push(sol);
                }
                solver.add_clause(&block);
            }
            SolveOutcome::Unsat => break,
            SolveOutcome::Timeout => return Err(Error::Timeout),
        }
    }
    Ok(out)
}

/// Convenience wrapper returning the WCNF of a fresh encoding (used by the
/// export subcommand and encoding-size checks).
pub fn stage1_wcnf(
    code: &StabilizerCode,
    arch: &CouplingGraph,
    cfg: &Stage1Config,
) -> Result<(Wcnf, String)> {
    let encoding = encode_stage1(code, arch, cfg, 0)?;
    let legend = encoding.builder.registry.legend();
    Ok((encoding.builder.formula, legend))
}

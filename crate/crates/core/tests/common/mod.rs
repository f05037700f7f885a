//! Shared brute-force oracles for integration and acceptance tests. All
//! enumeration here restates the mapping/scheduling rules from scratch and
//! never calls into the SAT encoders.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use esmc_core::arch::CouplingGraph;
use esmc_core::code::StabilizerCode;
use esmc_core::stage1::MappingSolution;
use esmc_core::stage2::{check_schedule, GateKind, GateOp, Phase, ScheduledCircuit};

/// (placement, bridges, couplings) with roots ignored.
pub type Projection = (
    BTreeMap<usize, usize>,
    Vec<BTreeSet<usize>>,
    Vec<BTreeMap<usize, usize>>,
);

pub fn projection(sol: &MappingSolution) -> Projection {
    (
        sol.placement.clone(),
        sol.bridges.clone(),
        sol.couplings.clone(),
    )
}

/// Independent enumeration of every valid mapping: all injective placements,
/// all connected bridge sets within the size limit, all coupling choices.
pub fn brute_force_mappings(
    code: &StabilizerCode,
    arch: &CouplingGraph,
    limits: &[usize],
) -> BTreeSet<Projection> {
    let nodes: Vec<usize> = arch.nodes().to_vec();
    let qubits: Vec<usize> = (0..code.num_data).collect();
    let mut out = BTreeSet::new();

    fn placements(
        qubits: &[usize],
        nodes: &[usize],
        current: &mut BTreeMap<usize, usize>,
        out: &mut Vec<BTreeMap<usize, usize>>,
    ) {
        if current.len() == qubits.len() {
            out.push(current.clone());
            return;
        }
        let q = qubits[current.len()];
        for &p in nodes {
            if !current.values().any(|&v| v == p) {
                current.insert(q, p);
                placements(qubits, nodes, current, out);
                current.remove(&q);
            }
        }
    }
    let mut all_placements = Vec::new();
    placements(&qubits, &nodes, &mut BTreeMap::new(), &mut all_placements);

    let connected = |set: &BTreeSet<usize>| -> bool {
        let start = *set.iter().next().unwrap();
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(n) = queue.pop_front() {
            for &m in arch.neighbors(n) {
                if set.contains(&m) && seen.insert(m) {
                    queue.push_back(m);
                }
            }
        }
        seen.len() == set.len()
    };

    for placement in &all_placements {
        let data_nodes: BTreeSet<usize> = placement.values().copied().collect();
        let free: Vec<usize> = nodes
            .iter()
            .copied()
            .filter(|p| !data_nodes.contains(p))
            .collect();
        let mut per_stab: Vec<Vec<(BTreeSet<usize>, Vec<BTreeMap<usize, usize>>)>> = Vec::new();
        for (s, st) in code.stabilizers.iter().enumerate() {
            let mut options = Vec::new();
            for mask in 1u32..(1 << free.len()) {
                let bridge: BTreeSet<usize> = free
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &p)| p)
                    .collect();
                if bridge.len() > limits[s] || !connected(&bridge) {
                    continue;
                }
                let mut cps: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new()];
                for q in st.qubits() {
                    let pq = placement[&q];
                    let choices: Vec<usize> = bridge
                        .iter()
                        .copied()
                        .filter(|&b| arch.are_adjacent(b, pq))
                        .collect();
                    let mut next = Vec::new();
                    for partial in &cps {
                        for &c in &choices {
                            let mut extended = partial.clone();
                            extended.insert(q, c);
                            next.push(extended);
                        }
                    }
                    cps = next;
                    if cps.is_empty() {
                        break;
                    }
                }
                if !cps.is_empty() {
                    options.push((bridge, cps));
                }
            }
            per_stab.push(options);
        }
        fn combine(
            per_stab: &[Vec<(BTreeSet<usize>, Vec<BTreeMap<usize, usize>>)>],
            placement: &BTreeMap<usize, usize>,
            chosen: &mut Vec<(BTreeSet<usize>, BTreeMap<usize, usize>)>,
            out: &mut BTreeSet<Projection>,
        ) {
            if chosen.len() == per_stab.len() {
                out.insert((
                    placement.clone(),
                    chosen.iter().map(|(b, _)| b.clone()).collect(),
                    chosen.iter().map(|(_, c)| c.clone()).collect(),
                ));
                return;
            }
            for (bridge, cps) in &per_stab[chosen.len()] {
                for cp in cps {
                    chosen.push((bridge.clone(), cp.clone()));
                    combine(per_stab, placement, chosen, out);
                    chosen.pop();
                }
            }
        }
        combine(&per_stab, placement, &mut Vec::new(), &mut out);
    }
    out
}

/// All spanning in-trees of `bridge` (node -> parent; parent == node marks
/// the root), optionally with a fixed root.
pub fn all_trees(
    arch: &CouplingGraph,
    bridge: &[usize],
    fixed_root: Option<usize>,
) -> Vec<BTreeMap<usize, usize>> {
    let mut out = Vec::new();
    let roots: Vec<usize> = match fixed_root {
        Some(r) => vec![r],
        None => bridge.to_vec(),
    };
    for &root in &roots {
        let mut assignment: BTreeMap<usize, usize> = BTreeMap::from([(root, root)]);
        fn extend(
            arch: &CouplingGraph,
            bridge: &[usize],
            root: usize,
            assignment: &mut BTreeMap<usize, usize>,
            out: &mut Vec<BTreeMap<usize, usize>>,
        ) {
            if assignment.len() == bridge.len() {
                for &start in bridge {
                    let mut cur = start;
                    let mut steps = 0;
                    while cur != root {
                        cur = assignment[&cur];
                        steps += 1;
                        if steps > bridge.len() {
                            return;
                        }
                    }
                }
                out.push(assignment.clone());
                return;
            }
            let next = *bridge
                .iter()
                .find(|p| !assignment.contains_key(p))
                .unwrap();
            for &parent in arch.neighbors(next) {
                if bridge.contains(&parent) {
                    assignment.insert(next, parent);
                    extend(arch, bridge, root, assignment, out);
                    assignment.remove(&next);
                }
            }
        }
        extend(arch, bridge, root, &mut assignment, &mut out);
    }
    out
}

/// Gates of one stabilizer under chosen encode/decode trees.
pub fn materialize(
    code: &StabilizerCode,
    sol: &MappingSolution,
    s: usize,
    enc_tree: &BTreeMap<usize, usize>,
    dec_tree: &BTreeMap<usize, usize>,
) -> Vec<GateOp> {
    let mut gates = Vec::new();
    for &p in &sol.bridges[s] {
        gates.push(GateOp {
            kind: GateKind::Reset,
            qubits: vec![p],
            stab: s,
            phase: Phase::Init,
        });
    }
    for (&node, &parent) in enc_tree {
        gates.push(if parent == node {
            GateOp {
                kind: GateKind::Hadamard,
                qubits: vec![node],
                stab: s,
                phase: Phase::Enc,
            }
        } else {
            GateOp {
                kind: GateKind::EncCnot,
                qubits: vec![parent, node],
                stab: s,
                phase: Phase::Enc,
            }
        });
    }
    for q in code.stabilizers[s].qubits() {
        gates.push(GateOp {
            kind: GateKind::Ctrl(code.stabilizers[s].pauli_at(q)),
            qubits: vec![sol.couplings[s][&q], sol.placement[&q]],
            stab: s,
            phase: Phase::Ctrl,
        });
    }
    for (&node, &parent) in dec_tree {
        gates.push(if parent == node {
            GateOp {
                kind: GateKind::Hadamard,
                qubits: vec![node],
                stab: s,
                phase: Phase::Dec,
            }
        } else {
            GateOp {
                kind: GateKind::DecCnot,
                qubits: vec![parent, node],
                stab: s,
                phase: Phase::Dec,
            }
        });
    }
    gates.push(GateOp {
        kind: GateKind::Measure,
        qubits: vec![sol.roots[s]],
        stab: s,
        phase: Phase::Meas,
    });
    gates
}

fn assignable(
    gates: &[GateOp],
    t_max: usize,
    sol: &MappingSolution,
    code: &StabilizerCode,
    arch: &CouplingGraph,
) -> bool {
    fn dfs(
        gates: &[GateOp],
        times: &mut Vec<usize>,
        busy: &mut BTreeSet<(usize, usize)>,
        t_max: usize,
        sol: &MappingSolution,
        code: &StabilizerCode,
        arch: &CouplingGraph,
    ) -> bool {
        let idx = times.len();
        if idx == gates.len() {
            let circuit = ScheduledCircuit {
                gates: gates.iter().cloned().zip(times.iter().copied()).collect(),
                depth: times.iter().copied().max().unwrap_or(0),
            };
            return check_schedule(&circuit, sol, code, arch).is_empty();
        }
        let gate = &gates[idx];
        'times: for t in 1..=t_max {
            for &q in &gate.qubits {
                if busy.contains(&(q, t)) {
                    continue 'times;
                }
            }
            for (j, other) in gates.iter().enumerate().take(idx) {
                if other.stab == gate.stab
                    && other.phase < gate.phase
                    && other.qubits.iter().any(|q| gate.qubits.contains(q))
                    && times[j] >= t
                {
                    continue 'times;
                }
            }
            for &q in &gate.qubits {
                busy.insert((q, t));
            }
            times.push(t);
            if dfs(gates, times, busy, t_max, sol, code, arch) {
                return true;
            }
            times.pop();
            for &q in &gate.qubits {
                busy.remove(&(q, t));
            }
        }
        false
    }
    dfs(
        gates,
        &mut Vec::new(),
        &mut BTreeSet::new(),
        t_max,
        sol,
        code,
        arch,
    )
}

/// Exhaustive minimal depth over all tree choices and time assignments,
/// validity judged by the independent schedule checker.
pub fn brute_force_min_depth(
    code: &StabilizerCode,
    sol: &MappingSolution,
    arch: &CouplingGraph,
    t_limit: usize,
) -> Option<usize> {
    let per_stab_trees: Vec<Vec<(BTreeMap<usize, usize>, BTreeMap<usize, usize>)>> = (0..code
        .stabilizers
        .len())
        .map(|s| {
            let bridge: Vec<usize> = sol.bridges[s].iter().copied().collect();
            let encs = all_trees(arch, &bridge, None);
            let decs = all_trees(arch, &bridge, Some(sol.roots[s]));
            let mut pairs = Vec::new();
            for e in &encs {
                for d in &decs {
                    pairs.push((e.clone(), d.clone()));
                }
            }
            pairs
        })
        .collect();

    for t in 1..=t_limit {
        let mut choice = vec![0usize; per_stab_trees.len()];
        loop {
            let gates: Vec<GateOp> = (0..code.stabilizers.len())
                .flat_map(|s| {
                    let (e, d) = &per_stab_trees[s][choice[s]];
                    materialize(code, sol, s, e, d)
                })
                .collect();
            if assignable(&gates, t, sol, code, arch) {
                return Some(t);
            }
            let mut k = 0;
            loop {
                if k == choice.len() {
                    break;
                }
                choice[k] += 1;
                if choice[k] < per_stab_trees[k].len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == choice.len() {
                break;
            }
        }
    }
    None
}

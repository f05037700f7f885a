//! Stage 2: five-phase circuit scheduling via iterated SAT.
//!
//! Each stabilizer's measurement circuit is the pipeline Init -> Enc -> Ctrl
//! -> Dec -> Meas. Initialization, controlled gates and the measurement are
//! fixed by the stage-1 mapping; the encoding/decoding entangling trees over
//! the bridge are chosen by the solver through `enc`/`dec` selector
//! variables. Scheduling constraints:
//!
//! - Hard A: every existing gate exactly once, one gate per qubit per step.
//! - Hard B: enc/dec selectors form a tree (one root, in-degree one,
//!   preparation order along edges; decode mirrored).
//! - Hard C: for every anti-commuting controlled-gate pair set, the number
//!   of inverted pairs is even.
//! - Hard D: stabilizers sharing bridge nodes are serialized per shared node.
//! - Per-qubit phase ordering: reset first; a bridge node's controlled gates
//!   sit between the gates that splice it into and out of the entangled
//!   state; measurement last.
//!
//! Depth is minimized by binary or linear search over the horizon, between a
//! static per-node lower bound and the sequential fallback schedule.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::time::Instant;

use esmc_sat::encode::{at_most_one, exactly_one, order_before, parity_even};
use esmc_sat::solver::{SolveOutcome, Solver};
use esmc_sat::types::{Lit, Model, Var};
use esmc_sat::Builder;

use crate::arch::CouplingGraph;
use crate::code::{PauliOp, StabilizerCode};
use crate::config::{DepthSearch, DisabledConstraints, Stage2Config};
use crate::error::{Error, Result};
use crate::stage1::MappingSolution;
use crate::tag::Tag;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Phase {
    Init,
    Enc,
    Ctrl,
    Dec,
    Meas,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    Reset,
    Hadamard,
    EncCnot,
    DecCnot,
    /// Controlled-P from a bridge node onto a data qubit.
    Ctrl(PauliOp),
    Measure,
}

/// A concrete gate instance. Two-qubit gates store [control, target].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateOp {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub stab: usize,
    pub phase: Phase,
}

/// A gate slot in the scheduling universe; `guard` is the enc/dec selector
/// that decides whether the slot is realized (None = mandatory).
#[derive(Debug, Clone)]
pub struct CandidateGate {
    pub op: GateOp,
    pub guard: Option<Tag>,
}

/// Per-stabilizer view into the candidate-gate table.
#[derive(Debug, Clone)]
pub struct StabOps {
    pub bridge: Vec<usize>,
    pub root: usize,
    pub reset: BTreeMap<usize, usize>,
    pub enc_h: BTreeMap<usize, usize>,
    pub enc_cx: BTreeMap<(usize, usize), usize>,
    pub ctrl: BTreeMap<usize, usize>,
    pub dec_h: BTreeMap<usize, usize>,
    pub dec_cx: BTreeMap<(usize, usize), usize>,
    pub measure: usize,
}

impl StabOps {
    /// Candidate enc gates targeting `p`: the diagonal Hadamard plus every
    /// adjacent incoming CNOT.
    fn enc_targeting(&self, p: usize) -> Vec<usize> {
        let mut out = vec![self.enc_h[&p]];
        out.extend(
            self.enc_cx
                .iter()
                .filter(|(&(_, to), _)| to == p)
                .map(|(_, &g)| g),
        );
        out
    }

    fn dec_targeting(&self, p: usize) -> Vec<usize> {
        let mut out = vec![self.dec_h[&p]];
        out.extend(
            self.dec_cx
                .iter()
                .filter(|(&(_, to), _)| to == p)
                .map(|(_, &g)| g),
        );
        out
    }

}

/// The full operation universe for one mapping.
#[derive(Debug, Clone)]
pub struct OperationSet {
    pub gates: Vec<CandidateGate>,
    pub stabs: Vec<StabOps>,
    pub nodes: Vec<usize>,
}

/// Materializes the candidate gates implied by a mapping.
pub fn enumerate_operations(
    sol: &MappingSolution,
    code: &StabilizerCode,
    arch: &CouplingGraph,
) -> OperationSet {
    let mut gates: Vec<CandidateGate> = Vec::new();
    let mut stabs = Vec::new();
    let push = |gates: &mut Vec<CandidateGate>, op: GateOp, guard: Option<Tag>| -> usize {
        gates.push(CandidateGate { op, guard });
        gates.len() - 1
    };
    for (s, stab) in code.stabilizers.iter().enumerate() {
        let bridge: Vec<usize> = sol.bridges[s].iter().copied().collect();
        let root = sol.roots[s];
        let mut ops = StabOps {
            bridge: bridge.clone(),
            root,
            reset: BTreeMap::new(),
            enc_h: BTreeMap::new(),
            enc_cx: BTreeMap::new(),
            ctrl: BTreeMap::new(),
            dec_h: BTreeMap::new(),
            dec_cx: BTreeMap::new(),
            measure: 0,
        };
        for &p in &bridge {
            let g = push(
                &mut gates,
                GateOp {
                    kind: GateKind::Reset,
                    qubits: vec![p],
                    stab: s,
                    phase: Phase::Init,
                },
                None,
            );
            ops.reset.insert(p, g);
        }
        for &p in &bridge {
            let g = push(
                &mut gates,
                GateOp {
                    kind: GateKind::Hadamard,
                    qubits: vec![p],
                    stab: s,
                    phase: Phase::Enc,
                },
                Some(Tag::Enc {
                    stab: s,
                    from: p,
                    to: p,
                }),
            );
            ops.enc_h.insert(p, g);
        }
        for &p in &bridge {
            for &q in &bridge {
                if p != q && arch.are_adjacent(p, q) {
                    let g = push(
                        &mut gates,
                        GateOp {
                            kind: GateKind::EncCnot,
                            qubits: vec![p, q],
                            stab: s,
                            phase: Phase::Enc,
                        },
                        Some(Tag::Enc {
                            stab: s,
                            from: p,
                            to: q,
                        }),
                    );
                    ops.enc_cx.insert((p, q), g);
                }
            }
        }
        for q in stab.qubits() {
            let control = sol.couplings[s][&q];
            let target = sol.placement[&q];
            let g = push(
                &mut gates,
                GateOp {
                    kind: GateKind::Ctrl(stab.pauli_at(q)),
                    qubits: vec![control, target],
                    stab: s,
                    phase: Phase::Ctrl,
                },
                None,
            );
            ops.ctrl.insert(q, g);
        }
        for &p in &bridge {
            let g = push(
                &mut gates,
                GateOp {
                    kind: GateKind::Hadamard,
                    qubits: vec![p],
                    stab: s,
                    phase: Phase::Dec,
                },
                Some(Tag::Dec {
                    stab: s,
                    from: p,
                    to: p,
                }),
            );
            ops.dec_h.insert(p, g);
        }
        for &p in &bridge {
            for &q in &bridge {
                if p != q && arch.are_adjacent(p, q) {
                    let g = push(
                        &mut gates,
                        GateOp {
                            kind: GateKind::DecCnot,
                            qubits: vec![p, q],
                            stab: s,
                            phase: Phase::Dec,
                        },
                        Some(Tag::Dec {
                            stab: s,
                            from: p,
                            to: q,
                        }),
                    );
                    ops.dec_cx.insert((p, q), g);
                }
            }
        }
        ops.measure = push(
            &mut gates,
            GateOp {
                kind: GateKind::Measure,
                qubits: vec![root],
                stab: s,
                phase: Phase::Meas,
            },
            None,
        );
        stabs.push(ops);
    }
    let nodes: BTreeSet<usize> = gates.iter().flat_map(|g| g.op.qubits.clone()).collect();
    OperationSet {
        gates,
        stabs,
        nodes: nodes.into_iter().collect(),
    }
}

/// Static depth lower bound: some node must host this many gates.
pub fn depth_lower_bound(ops: &OperationSet) -> usize {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for stab in &ops.stabs {
        for &p in &stab.bridge {
            // Reset, exactly one enc gate targeting p, exactly one dec gate
            // targeting p.
            *counts.entry(p).or_default() += 3;
        }
        let root_extra = 1 + usize::from(stab.bridge.len() > 1);
        *counts.entry(stab.root).or_default() += root_extra;
        for &g in stab.ctrl.values() {
            for &p in &ops.gates[g].op.qubits {
                *counts.entry(p).or_default() += 1;
            }
        }
    }
    counts.values().copied().max().unwrap_or(0)
}

/// A fully scheduled circuit: time-stamped gates, dense steps from 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduledCircuit {
    pub gates: Vec<(GateOp, usize)>,
    pub depth: usize,
}

impl ScheduledCircuit {
    fn sort(&mut self) {
        self.gates
            .sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.qubits.cmp(&b.0.qubits)));
    }
}

/// Encoded stage-2 instance at a fixed horizon.
pub struct Stage2Encoding {
    pub builder: Builder<Tag>,
    pub horizon: usize,
}

pub fn encode_stage2(
    ops: &OperationSet,
    horizon: usize,
    disabled: &DisabledConstraints,
) -> Stage2Encoding {
    assert!(horizon >= 1, "scheduling horizon must be >= 1");
    let mut b: Builder<Tag> = Builder::new();
    let t_range = 1..=horizon;

    // Guards first (selector variables), then time variables and ladders.
    for (idx, gate) in ops.gates.iter().enumerate() {
        if let Some(tag) = gate.guard {
            b.var(tag);
        }
        let _ = idx;
    }
    let time_lits = |b: &mut Builder<Tag>, g: usize| -> Vec<Lit> {
        t_range
            .clone()
            .map(|t| b.var(Tag::Time { gate: g, step: t }).positive())
            .collect::<Vec<_>>()
    };
    let ladder_lits = |b: &mut Builder<Tag>, g: usize| -> Vec<Lit> {
        t_range
            .clone()
            .map(|t| b.var(Tag::Ladder { gate: g, step: t }).positive())
            .collect::<Vec<_>>()
    };

    // Hard A(1) + existence semantics + prefix ladders.
    for (g, gate) in ops.gates.iter().enumerate() {
        let times = time_lits(&mut b, g);
        let ladder = ladder_lits(&mut b, g);
        at_most_one(&mut b, &times);
        match gate.guard {
            None => at_least_one_clause(&mut b, &times),
            Some(tag) => {
                let guard = b.existing(&tag).positive();
                let mut clause = vec![!guard];
                clause.extend(&times);
                b.clause(&clause);
                for &t in &times {
                    b.clause(&[!t, guard]);
                }
            }
        }
        // u(g,t) <-> executed at step <= t.
        for t in 0..horizon {
            b.clause(&[!times[t], ladder[t]]);
            if t > 0 {
                b.clause(&[!ladder[t - 1], ladder[t]]);
                b.clause(&[!ladder[t], ladder[t - 1], times[t]]);
            } else {
                b.clause(&[!ladder[0], times[0]]);
            }
        }
    }

    // Hard A(2): per-node step exclusivity.
    for &p in &ops.nodes {
        let acting: Vec<usize> = ops
            .gates
            .iter()
            .enumerate()
            .filter(|(_, g)| g.op.qubits.contains(&p))
            .map(|(i, _)| i)
            .collect();
        for t in 1..=horizon {
            let lits: Vec<Lit> = acting
                .iter()
                .map(|&g| b.existing(&Tag::Time { gate: g, step: t }).positive())
                .collect();
            at_most_one(&mut b, &lits);
        }
    }

    let guard_lit = |b: &Builder<Tag>, g: usize| -> Option<Lit> {
        ops.gates[g].guard.map(|tag| b.existing(&tag).positive())
    };
    // Conditional ordering helper: before < after whenever both exist.
    let order = |b: &mut Builder<Tag>, before: usize, after: usize, extra: &[Lit]| {
        let mut guards: Vec<Lit> = extra.to_vec();
        guards.extend(guard_lit(b, before));
        guards.extend(guard_lit(b, after));
        let ladder: Vec<Lit> = (1..=horizon)
            .map(|t| {
                b.existing(&Tag::Ladder {
                    gate: before,
                    step: t,
                })
                .positive()
            })
            .collect();
        let times: Vec<Lit> = (1..=horizon)
            .map(|t| {
                b.existing(&Tag::Time {
                    gate: after,
                    step: t,
                })
                .positive()
            })
            .collect();
        order_before(b, &guards, &ladder, &times);
    };

    for stab in &ops.stabs {
        // Hard B(1): exactly one enc root; the dec root is the measured node.
        if !disabled.hard_b1 {
            let enc_diag: Vec<Lit> = stab
                .bridge
                .iter()
                .map(|&p| {
                    b.existing(&Tag::Enc {
                        stab: gate_stab(ops, stab),
                        from: p,
                        to: p,
                    })
                    .positive()
                })
                .collect();
            exactly_one(&mut b, &enc_diag);
            let dec_diag: Vec<Lit> = stab
                .bridge
                .iter()
                .map(|&p| {
                    b.existing(&Tag::Dec {
                        stab: gate_stab(ops, stab),
                        from: p,
                        to: p,
                    })
                    .positive()
                })
                .collect();
            exactly_one(&mut b, &dec_diag);
            let dec_root = b.existing(&Tag::Dec {
                stab: gate_stab(ops, stab),
                from: stab.root,
                to: stab.root,
            });
            b.clause(&[dec_root.positive()]);
        }
        // Hard B(2): every bridge node is targeted exactly once.
        if !disabled.hard_b2 {
            for &p in &stab.bridge {
                let enc_col: Vec<Lit> = stab
                    .enc_targeting(p)
                    .iter()
                    .map(|&g| guard_lit(&b, g).expect("enc gates are guarded"))
                    .collect();
                exactly_one(&mut b, &enc_col);
                let dec_col: Vec<Lit> = stab
                    .dec_targeting(p)
                    .iter()
                    .map(|&g| guard_lit(&b, g).expect("dec gates are guarded"))
                    .collect();
                exactly_one(&mut b, &dec_col);
            }
        }
        // Hard B(3): preparation order along tree edges (decode mirrored).
        if !disabled.hard_b3 {
            for (&(from, to), &edge_gate) in &stab.enc_cx {
                debug_assert_ne!(from, to);
                for &parent_gate in &stab.enc_targeting(from) {
                    order(&mut b, parent_gate, edge_gate, &[]);
                }
            }
            for (&(from, to), &edge_gate) in &stab.dec_cx {
                debug_assert_ne!(from, to);
                for &parent_gate in &stab.dec_targeting(from) {
                    order(&mut b, edge_gate, parent_gate, &[]);
                }
            }
        }
        // Per-qubit phase ordering.
        if !disabled.phase_order {
            for &p in &stab.bridge {
                let reset = stab.reset[&p];
                for g in stab_gates_on(ops, stab, p) {
                    if g != reset {
                        order(&mut b, reset, g, &[]);
                    }
                }
                let ctrl_on_p: Vec<usize> = stab
                    .ctrl
                    .values()
                    .copied()
                    .filter(|&g| ops.gates[g].op.qubits[0] == p)
                    .collect();
                for &enc_in in &stab.enc_targeting(p) {
                    for &c in &ctrl_on_p {
                        order(&mut b, enc_in, c, &[]);
                    }
                }
                for &dec_in in &stab.dec_targeting(p) {
                    for &c in &ctrl_on_p {
                        order(&mut b, c, dec_in, &[]);
                    }
                    // Every enc gate acting on p precedes the dec gate that
                    // takes p out of the entangled state.
                    for g in stab_gates_on(ops, stab, p) {
                        if ops.gates[g].op.phase == Phase::Enc {
                            order(&mut b, g, dec_in, &[]);
                        }
                    }
                }
            }
            let measure = stab.measure;
            for g in stab_gates_on(ops, stab, stab.root) {
                if g != measure {
                    order(&mut b, g, measure, &[]);
                }
            }
        }
    }

    // Hard C: even inversion parity for anti-commuting controlled pairs.
    if !disabled.hard_c {
        for i in 0..ops.stabs.len() {
            for j in i + 1..ops.stabs.len() {
                let mut flags = Vec::new();
                for (&q, &ci) in &ops.stabs[i].ctrl {
                    if let Some(&cj) = ops.stabs[j].ctrl.get(&q) {
                        let (pi, pj) = match (&ops.gates[ci].op.kind, &ops.gates[cj].op.kind) {
                            (GateKind::Ctrl(a), GateKind::Ctrl(b)) => (*a, *b),
                            _ => unreachable!("ctrl tables hold controlled gates"),
                        };
                        if pi.anticommutes(pj) {
                            flags.push(before_flag(&mut b, ops, horizon, ci, cj));
                        }
                    }
                }
                parity_even(&mut b, &flags);
            }
        }
    }

    // Hard D: serialize stabilizers sharing bridge nodes.
    if !disabled.hard_d {
        for i in 0..ops.stabs.len() {
            for j in i + 1..ops.stabs.len() {
                let shared: Vec<usize> = ops.stabs[i]
                    .bridge
                    .iter()
                    .copied()
                    .filter(|p| ops.stabs[j].bridge.contains(p))
                    .collect();
                if shared.is_empty() {
                    continue;
                }
                let i_first = b.fresh_aux().positive();
                for &p in &shared {
                    for (last, first, sel) in [
                        (last_gates_on(ops, &ops.stabs[i], p), ops.stabs[j].reset[&p], i_first),
                        (last_gates_on(ops, &ops.stabs[j], p), ops.stabs[i].reset[&p], !i_first),
                    ] {
                        for g in last {
                            order(&mut b, g, first, &[sel]);
                        }
                    }
                }
            }
        }
    }

    Stage2Encoding {
        builder: b,
        horizon,
    }
}

fn at_least_one_clause(b: &mut Builder<Tag>, lits: &[Lit]) {
    b.clause(lits);
}

fn gate_stab(ops: &OperationSet, stab: &StabOps) -> usize {
    ops.gates[stab.measure].op.stab
}

fn stab_gates_on(ops: &OperationSet, stab: &StabOps, p: usize) -> Vec<usize> {
    let s = gate_stab(ops, stab);
    ops.gates
        .iter()
        .enumerate()
        .filter(|(_, g)| g.op.stab == s && g.op.qubits.contains(&p))
        .map(|(i, _)| i)
        .collect()
}

/// Gates that close a stabilizer's activity on node `p`: the measurement if
/// `p` is the root, otherwise every candidate dec gate targeting `p` (its
/// own guard makes the ordering conditional).
fn last_gates_on(_ops: &OperationSet, stab: &StabOps, p: usize) -> Vec<usize> {
    if p == stab.root {
        vec![stab.measure]
    } else {
        stab.dec_targeting(p)
    }
}

/// Defines a flag variable equivalent to "gate a executes before gate b"
/// (both are mandatory one-hot gates on a shared qubit, so never equal).
fn before_flag(
    b: &mut Builder<Tag>,
    _ops: &OperationSet,
    horizon: usize,
    a: usize,
    bg: usize,
) -> Lit {
    let flag = b.fresh_aux().positive();
    for t in 1..=horizon {
        let time_b = b.existing(&Tag::Time { gate: bg, step: t }).positive();
        if t == 1 {
            b.clause(&[!time_b, !flag]);
            continue;
        }
        let u_a = b
            .existing(&Tag::Ladder {
                gate: a,
                step: t - 1,
            })
            .positive();
        b.clause(&[!time_b, !u_a, flag]);
        b.clause(&[!time_b, u_a, !flag]);
    }
    flag
}

/// Reads a schedule out of a satisfying model without consistency checks.
pub fn decode_stage2_unchecked(
    model: &Model,
    encoding: &Stage2Encoding,
    ops: &OperationSet,
) -> ScheduledCircuit {
    let b = &encoding.builder;
    let mut gates = Vec::new();
    let mut depth = 0;
    for (g, gate) in ops.gates.iter().enumerate() {
        let exists = gate
            .guard
            .map_or(true, |tag| model.value(b.existing(&tag)));
        if !exists {
            continue;
        }
        for t in 1..=encoding.horizon {
            let var = b.existing(&Tag::Time { gate: g, step: t });
            if model.value(var) {
                gates.push((gate.op.clone(), t));
                depth = depth.max(t);
            }
        }
    }
    let mut circuit = ScheduledCircuit { gates, depth };
    circuit.sort();
    circuit
}

/// Checked decoding: extraction plus a full independent re-check.
pub fn decode_stage2(
    model: &Model,
    encoding: &Stage2Encoding,
    ops: &OperationSet,
    sol: &MappingSolution,
    code: &StabilizerCode,
    arch: &CouplingGraph,
) -> Result<ScheduledCircuit> {
    let circuit = decode_stage2_unchecked(model, encoding, ops);
    let issues = check_schedule(&circuit, sol, code, arch);
    if issues.is_empty() {
        Ok(circuit)
    } else {
        Err(Error::Internal(format!(
            "decoded schedule failed validation: {}",
            issues.join("; ")
        )))
    }
}

// ---------------------------------------------------------------------------
// Independent schedule checker
// ---------------------------------------------------------------------------

/// Re-checks every scheduling rule with plain data-structure walks. Returns
/// an empty list iff the schedule is valid.
pub fn check_schedule(
    circuit: &ScheduledCircuit,
    sol: &MappingSolution,
    code: &StabilizerCode,
    arch: &CouplingGraph,
) -> Vec<String> {
    let mut issues = Vec::new();
    let num_stabs = code.stabilizers.len();

    // Step exclusivity and adjacency.
    let mut busy: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (idx, (gate, t)) in circuit.gates.iter().enumerate() {
        if *t < 1 || *t > circuit.depth {
            issues.push(format!("gate {idx} at step {t} outside 1..={}", circuit.depth));
        }
        for &p in &gate.qubits {
            if let Some(prev) = busy.insert((p, *t), idx) {
                issues.push(format!("gates {prev} and {idx} share node {p} at step {t}"));
            }
        }
        if gate.qubits.len() == 2 && !arch.are_adjacent(gate.qubits[0], gate.qubits[1]) {
            issues.push(format!(
                "two-qubit gate on non-adjacent nodes {:?}",
                gate.qubits
            ));
        }
    }

    for s in 0..num_stabs {
        let stab = &code.stabilizers[s];
        let bridge = &sol.bridges[s];
        let root = sol.roots[s];
        let label = &stab.label;
        let mine: Vec<&(GateOp, usize)> =
            circuit.gates.iter().filter(|(g, _)| g.stab == s).collect();

        // Mandatory gates exactly once.
        let resets: Vec<&&(GateOp, usize)> = mine
            .iter()
            .filter(|(g, _)| g.kind == GateKind::Reset)
            .collect();
        if resets.len() != bridge.len()
            || !bridge
                .iter()
                .all(|p| resets.iter().any(|(g, _)| g.qubits[0] == *p))
        {
            issues.push(format!("{label}: resets do not cover the bridge exactly"));
        }
        let measures: Vec<&&(GateOp, usize)> = mine
            .iter()
            .filter(|(g, _)| g.kind == GateKind::Measure)
            .collect();
        if measures.len() != 1 || measures[0].0.qubits[0] != root {
            issues.push(format!("{label}: expected exactly one measurement on the root"));
        }
        let ctrl_gates: Vec<&&(GateOp, usize)> = mine
            .iter()
            .filter(|(g, _)| matches!(g.kind, GateKind::Ctrl(_)))
            .collect();
        if ctrl_gates.len() != stab.weight() {
            issues.push(format!(
                "{label}: {} controlled gates for weight {}",
                ctrl_gates.len(),
                stab.weight()
            ));
        }
        for q in stab.qubits() {
            let expected_ctrl = (sol.couplings[s][&q], sol.placement[&q]);
            let found = ctrl_gates.iter().any(|(g, _)| {
                g.qubits == vec![expected_ctrl.0, expected_ctrl.1]
                    && g.kind == GateKind::Ctrl(stab.pauli_at(q))
            });
            if !found {
                issues.push(format!("{label}: missing controlled gate for qubit {q}"));
            }
        }

        // Tree structure per phase.
        for (phase, h_kind, cx_kind) in [
            (Phase::Enc, GateKind::Hadamard, GateKind::EncCnot),
            (Phase::Dec, GateKind::Hadamard, GateKind::DecCnot),
        ] {
            let hs: Vec<&&(GateOp, usize)> = mine
                .iter()
                .filter(|(g, _)| g.phase == phase && g.kind == h_kind)
                .collect();
            if hs.len() != 1 {
                issues.push(format!("{label}: {phase:?} needs exactly one root Hadamard"));
                continue;
            }
            let tree_root = hs[0].0.qubits[0];
            if phase == Phase::Dec && tree_root != root {
                issues.push(format!("{label}: decode root differs from measured root"));
            }
            let edges: Vec<(usize, usize, usize)> = mine
                .iter()
                .filter(|(g, _)| g.kind == cx_kind)
                .map(|(g, t)| (g.qubits[0], g.qubits[1], *t))
                .collect();
            // In-degree one for every non-root bridge node.
            let mut indeg: BTreeMap<usize, usize> = bridge.iter().map(|&p| (p, 0)).collect();
            for &(from, to, _) in &edges {
                if !bridge.contains(&from) || !bridge.contains(&to) {
                    issues.push(format!("{label}: {phase:?} edge off the bridge"));
                }
                *indeg.entry(to).or_default() += 1;
            }
            for (&p, &d) in &indeg {
                let expected = usize::from(p != tree_root);
                if d != expected {
                    issues.push(format!(
                        "{label}: {phase:?} node {p} has in-degree {d}, expected {expected}"
                    ));
                }
            }
            // Preparation order along edges (mirrored for decode).
            let target_time = |p: usize| -> Option<usize> {
                if p == tree_root {
                    hs.first().map(|(_, t)| *t)
                } else {
                    edges.iter().find(|&&(_, to, _)| to == p).map(|&(_, _, t)| t)
                }
            };
            for &(from, _, t) in &edges {
                if let Some(pt) = target_time(from) {
                    let ok = if phase == Phase::Enc { pt < t } else { t < pt };
                    if !ok {
                        issues.push(format!(
                            "{label}: {phase:?} edge from {from} violates preparation order"
                        ));
                    }
                }
            }
        }

        // Per-qubit phase ordering.
        for &p in bridge {
            let on_p: Vec<&&(GateOp, usize)> =
                mine.iter().filter(|(g, _)| g.qubits.contains(&p)).collect();
            let reset_t = on_p
                .iter()
                .find(|(g, _)| g.kind == GateKind::Reset)
                .map(|(_, t)| *t);
            let dec_target_t = on_p
                .iter()
                .find(|(g, _)| {
                    g.phase == Phase::Dec
                        && (g.kind == GateKind::Hadamard || g.qubits.get(1) == Some(&p))
                })
                .map(|(_, t)| *t);
            if let Some(rt) = reset_t {
                if on_p.iter().any(|(g, t)| g.kind != GateKind::Reset && *t <= rt) {
                    issues.push(format!("{label}: gate on {p} before its reset"));
                }
            } else {
                issues.push(format!("{label}: bridge node {p} has no reset"));
            }
            let enc_target_t = on_p
                .iter()
                .find(|(g, _)| {
                    g.phase == Phase::Enc
                        && (g.kind == GateKind::Hadamard || g.qubits.get(1) == Some(&p))
                })
                .map(|(_, t)| *t);
            for (g, t) in on_p.iter().filter(|(g, _)| matches!(g.kind, GateKind::Ctrl(_))) {
                if g.qubits[0] != p {
                    continue;
                }
                match (enc_target_t, dec_target_t) {
                    (Some(et), Some(dt)) => {
                        if !(et < *t && *t < dt) {
                            issues.push(format!(
                                "{label}: controlled gate on {p} outside its entangled window"
                            ));
                        }
                    }
                    _ => issues.push(format!("{label}: node {p} lacks enc/dec target gates")),
                }
            }
            if let (Some(et), Some(dt)) = (enc_target_t, dec_target_t) {
                if et >= dt {
                    issues.push(format!("{label}: node {p} decoded before encoded"));
                }
            }
            for (g, t) in &on_p {
                if g.phase == Phase::Enc {
                    if let Some(dt) = dec_target_t {
                        if *t >= dt {
                            issues.push(format!(
                                "{label}: enc gate on {p} after its dec target"
                            ));
                        }
                    }
                }
            }
        }
        if let Some((_, mt)) = mine
            .iter()
            .find(|(g, _)| g.kind == GateKind::Measure)
        {
            if mine
                .iter()
                .any(|(g, t)| g.kind != GateKind::Measure && g.qubits.contains(&root) && t >= mt)
            {
                issues.push(format!("{label}: gate on root at or after measurement"));
            }
        }
    }

    // Hard C: even inversion parity per anti-commuting pair family.
    for i in 0..num_stabs {
        for j in i + 1..num_stabs {
            let mut inversions = 0usize;
            let mut relevant = false;
            for q in code.stabilizers[i].qubits() {
                let pi = code.stabilizers[i].pauli_at(q);
                let pj = code.stabilizers[j].pauli_at(q);
                if !pi.anticommutes(pj) {
                    continue;
                }
                relevant = true;
                let ti = ctrl_time(circuit, i, sol, q);
                let tj = ctrl_time(circuit, j, sol, q);
                if let (Some(ti), Some(tj)) = (ti, tj) {
                    if ti < tj {
                        inversions += 1;
                    }
                } else {
                    inversions += 1; // missing gate; already reported above
                }
            }
            if relevant && inversions % 2 != 0 {
                issues.push(format!(
                    "stabilizers {} and {} have odd anti-commuting inversion parity",
                    code.stabilizers[i].label, code.stabilizers[j].label
                ));
            }
        }
    }

    // Hard D: per-node serialization of bridge-sharing stabilizers.
    for i in 0..num_stabs {
        for j in i + 1..num_stabs {
            for &p in sol.bridges[i].intersection(&sol.bridges[j]) {
                let span = |s: usize| -> Option<(usize, usize)> {
                    let times: Vec<usize> = circuit
                        .gates
                        .iter()
                        .filter(|(g, _)| g.stab == s && g.qubits.contains(&p))
                        .map(|(_, t)| *t)
                        .collect();
                    times
                        .iter()
                        .min()
                        .zip(times.iter().max())
                        .map(|(&a, &b)| (a, b))
                };
                if let (Some((ai, bi)), Some((aj, bj))) = (span(i), span(j)) {
                    if !(bi < aj || bj < ai) {
                        issues.push(format!(
                            "stabilizers {} and {} interleave on shared node {p}",
                            code.stabilizers[i].label, code.stabilizers[j].label
                        ));
                    }
                }
            }
        }
    }

    issues
}

fn ctrl_time(
    circuit: &ScheduledCircuit,
    s: usize,
    sol: &MappingSolution,
    q: usize,
) -> Option<usize> {
    let target = *sol.placement.get(&q)?;
    circuit
        .gates
        .iter()
        .find(|(g, _)| {
            g.stab == s && matches!(g.kind, GateKind::Ctrl(_)) && g.qubits.get(1) == Some(&target)
        })
        .map(|(_, t)| *t)
}

// ---------------------------------------------------------------------------
// Sequential fallback and depth minimization
// ---------------------------------------------------------------------------

/// Fully serialized schedule: stabilizers one after another, each with a
/// breadth-first entangling tree (decode mirrored). Valid by construction
/// and used as the upper bound for depth search.
pub fn sequential_schedule(
    sol: &MappingSolution,
    code: &StabilizerCode,
    arch: &CouplingGraph,
) -> ScheduledCircuit {
    let mut gates = Vec::new();
    let mut t = 0usize;
    for (s, stab) in code.stabilizers.iter().enumerate() {
        let bridge = &sol.bridges[s];
        let root = sol.roots[s];
        // BFS tree of the bridge from the root; parents precede children.
        let mut order: Vec<(usize, usize)> = Vec::new(); // (parent, child)
        let mut seen = BTreeSet::from([root]);
        let mut queue = VecDeque::from([root]);
        while let Some(n) = queue.pop_front() {
            for &m in arch.neighbors(n) {
                if bridge.contains(&m) && seen.insert(m) {
                    order.push((n, m));
                    queue.push_back(m);
                }
            }
        }
        t += 1;
        for &p in bridge.iter() {
            gates.push((
                GateOp {
                    kind: GateKind::Reset,
                    qubits: vec![p],
                    stab: s,
                    phase: Phase::Init,
                },
                t,
            ));
        }
        t += 1;
        gates.push((
            GateOp {
                kind: GateKind::Hadamard,
                qubits: vec![root],
                stab: s,
                phase: Phase::Enc,
            },
            t,
        ));
        for &(parent, child) in &order {
            t += 1;
            gates.push((
                GateOp {
                    kind: GateKind::EncCnot,
                    qubits: vec![parent, child],
                    stab: s,
                    phase: Phase::Enc,
                },
                t,
            ));
        }
        for q in stab.qubits() {
            t += 1;
            gates.push((
                GateOp {
                    kind: GateKind::Ctrl(stab.pauli_at(q)),
                    qubits: vec![sol.couplings[s][&q], sol.placement[&q]],
                    stab: s,
                    phase: Phase::Ctrl,
                },
                t,
            ));
        }
        for &(parent, child) in order.iter().rev() {
            t += 1;
            gates.push((
                GateOp {
                    kind: GateKind::DecCnot,
                    qubits: vec![parent, child],
                    stab: s,
                    phase: Phase::Dec,
                },
                t,
            ));
        }
        t += 1;
        gates.push((
            GateOp {
                kind: GateKind::Hadamard,
                qubits: vec![root],
                stab: s,
                phase: Phase::Dec,
            },
            t,
        ));
        t += 1;
        gates.push((
            GateOp {
                kind: GateKind::Measure,
                qubits: vec![root],
                stab: s,
                phase: Phase::Meas,
            },
            t,
        ));
    }
    let mut circuit = ScheduledCircuit { gates, depth: t };
    circuit.sort();
    circuit
}

#[derive(Debug, Clone)]
pub struct Stage2Outcome {
    pub circuit: ScheduledCircuit,
    pub optimal: bool,
}

/// Probes a single horizon. Returns Ok(Some) on SAT, Ok(None) on UNSAT.
pub fn probe_depth(
    ops: &OperationSet,
    horizon: usize,
    disabled: &DisabledConstraints,
    sol: &MappingSolution,
    code: &StabilizerCode,
    arch: &CouplingGraph,
    deadline: Option<Instant>,
) -> Result<Option<ScheduledCircuit>> {
    let encoding = encode_stage2(ops, horizon, disabled);
    let mut solver = Solver::new();
    solver.ensure_vars(encoding.builder.formula.num_vars());
    for clause in encoding.builder.formula.hard_clauses() {
        solver.add_clause(clause);
    }
    match solver.solve(&[], deadline) {
        SolveOutcome::Sat => {
            let model = solver.model();
            let circuit = decode_stage2(&model, &encoding, ops, sol, code, arch)?;
            Ok(Some(circuit))
        }
        SolveOutcome::Unsat => Ok(None),
        SolveOutcome::Timeout => Err(Error::Timeout),
    }
}

/// Minimizes circuit depth by binary or linear search below the sequential
/// upper bound. The result is flagged optimal when the next-smaller horizon
/// is proven UNSAT or the static lower bound is reached.
pub fn minimize_depth(
    sol: &MappingSolution,
    code: &StabilizerCode,
    arch: &CouplingGraph,
    cfg: &Stage2Config,
) -> Result<Stage2Outcome> {
    let deadline = Instant::now() + cfg.time_limit;
    let ops = enumerate_operations(sol, code, arch);
    if ops.gates.is_empty() {
        return Ok(Stage2Outcome {
            circuit: ScheduledCircuit {
                gates: Vec::new(),
                depth: 0,
            },
            optimal: true,
        });
    }
    let sequential = sequential_schedule(sol, code, arch);
    debug_assert!(check_schedule(&sequential, sol, code, arch).is_empty());
    let lower = depth_lower_bound(&ops).max(1);
    let mut best = sequential;
    let optimal;
    match cfg.depth_search {
        DepthSearch::Binary => {
            // Invariants: `best.depth == hi` is a known-SAT horizon; every
            // raise of `lo` comes from an UNSAT proof at lo-1. On normal
            // termination lo == hi == best.depth, so either the static lower
            // bound was reached or hi-1 is proven UNSAT: optimal either way.
            let mut lo = lower;
            let mut hi = best.depth;
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                match probe_depth(&ops, mid, &cfg.disabled, sol, code, arch, Some(deadline)) {
                    Ok(Some(circuit)) => {
                        hi = circuit.depth.min(mid);
                        best = circuit;
                    }
                    Ok(None) => lo = mid + 1,
                    Err(Error::Timeout) => {
                        return Ok(Stage2Outcome {
                            circuit: best,
                            optimal: false,
                        });
                    }
                    Err(e) => return Err(e),
                }
            }
            optimal = true;
        }
        DepthSearch::Linear => {
            let mut t = best.depth.saturating_sub(1);
            loop {
                if t < lower {
                    optimal = true;
                    break;
                }
                match probe_depth(&ops, t, &cfg.disabled, sol, code, arch, Some(deadline)) {
                    Ok(Some(circuit)) => {
                        t = circuit.depth.saturating_sub(1);
                        best = circuit;
                    }
                    Ok(None) => {
                        optimal = true;
                        break;
                    }
                    Err(Error::Timeout) => {
                        optimal = false;
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(Stage2Outcome {
        circuit: best,
        optimal,
    })
}

/// Enumerates schedules at a fixed horizon (projected onto gate times and
/// tree selectors), without validity re-checks. Used by property and
/// mutation tests.
pub fn enumerate_schedules(
    ops: &OperationSet,
    horizon: usize,
    disabled: &DisabledConstraints,
    limit: usize,
) -> Result<Vec<ScheduledCircuit>> {
    let encoding = encode_stage2(ops, horizon, disabled);
    let mut solver = Solver::new();
    solver.ensure_vars(encoding.builder.formula.num_vars());
    for clause in encoding.builder.formula.hard_clauses() {
        solver.add_clause(clause);
    }
    let projection: Vec<Var> = encoding
        .builder
        .registry
        .tags()
        .filter(|(_, t)| matches!(t, Tag::Time { .. } | Tag::Enc { .. } | Tag::Dec { .. }))
        .map(|(v, _)| v)
        .collect();
    let mut out = Vec::new();
    while out.len() < limit {
        match solver.solve(&[], None) {
            SolveOutcome::Sat => {
                let model = solver.model();
                let block: Vec<Lit> = projection
                    .iter()
                    .map(|&v| Lit::new(v, !model.value(v)))
                    .collect();
                out.push(decode_stage2_unchecked(&model, &encoding, ops));
                solver.add_clause(&block);
            }
            SolveOutcome::Unsat => break,
            SolveOutcome::Timeout => return Err(Error::Timeout),
        }
    }
    Ok(out)
}

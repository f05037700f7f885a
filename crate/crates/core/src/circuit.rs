//! Final circuit representation, metrics, SWAP expansion and emission.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::code::{PauliOp, StabilizerCode};
use crate::error::Result;
use crate::stage1::MappingSolution;
use crate::stage2::{GateKind, Phase, ScheduledCircuit};

/// Gate names as emitted: R, H, CX, CZ, CY, M, SWAP.
pub const KIND_RESET: &str = "R";
pub const KIND_H: &str = "H";
pub const KIND_CX: &str = "CX";
pub const KIND_CZ: &str = "CZ";
pub const KIND_CY: &str = "CY";
pub const KIND_MEASURE: &str = "M";
pub const KIND_SWAP: &str = "SWAP";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitGate {
    pub kind: String,
    pub qubits: Vec<usize>,
    pub t: usize,
    /// Owner stabilizer label; empty for routing layers.
    #[serde(default)]
    pub stab: String,
    /// "init" | "enc" | "ctrl" | "dec" | "meas" | "route".
    pub phase: String,
    #[serde(default)]
    pub segment: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    pub extra_cnots: usize,
    pub depth: usize,
    pub two_qubit_total: usize,
    pub ancilla_total: usize,
    pub swap_count: usize,
}

/// Time-stamped gate list over `n` physical qubit slots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub n: usize,
    pub gates: Vec<CircuitGate>,
    pub metrics: Option<Metrics>,
}

impl Circuit {
    pub fn depth(&self) -> usize {
        self.gates.iter().map(|g| g.t).max().unwrap_or(0)
    }

    pub fn sort_gates(&mut self) {
        self.gates
            .sort_by(|a, b| a.t.cmp(&b.t).then_with(|| a.qubits.cmp(&b.qubits)));
    }

    /// Converts a stage-2 schedule. `step_offset` shifts all times (used when
    /// concatenating partitioned segments).
    pub fn from_schedule(
        schedule: &ScheduledCircuit,
        code: &StabilizerCode,
        n: usize,
        segment: usize,
        step_offset: usize,
    ) -> Circuit {
        let mut gates = Vec::new();
        for (op, t) in &schedule.gates {
            let (kind, phase) = match (&op.kind, &op.phase) {
                (GateKind::Reset, _) => (KIND_RESET, "init"),
                (GateKind::Hadamard, Phase::Enc) => (KIND_H, "enc"),
                (GateKind::Hadamard, _) => (KIND_H, "dec"),
                (GateKind::EncCnot, _) => (KIND_CX, "enc"),
                (GateKind::DecCnot, _) => (KIND_CX, "dec"),
                (GateKind::Ctrl(PauliOp::X), _) => (KIND_CX, "ctrl"),
                (GateKind::Ctrl(PauliOp::Z), _) => (KIND_CZ, "ctrl"),
                (GateKind::Ctrl(PauliOp::Y), _) => (KIND_CY, "ctrl"),
                (GateKind::Ctrl(PauliOp::I), _) => unreachable!("identity controlled gate"),
                (GateKind::Measure, _) => (KIND_MEASURE, "meas"),
            };
            gates.push(CircuitGate {
                kind: kind.to_string(),
                qubits: op.qubits.clone(),
                t: t + step_offset,
                stab: code.stabilizers[op.stab].label.clone(),
                phase: phase.to_string(),
                segment,
            });
        }
        let mut circuit = Circuit {
            n,
            gates,
            metrics: None,
        };
        circuit.sort_gates();
        circuit
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serialization")
    }

    pub fn from_json(text: &str) -> Result<Circuit> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read_file(path: &Path) -> Result<Circuit> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

/// Gate counts and depth. `ancilla_total` equals the number of reset gates:
/// every bridge node is reset exactly once per owning stabilizer.
pub fn compute_metrics(circuit: &Circuit) -> Metrics {
    let mut extra_cnots = 0;
    let mut two_qubit_total = 0;
    let mut ancilla_total = 0;
    let mut swap_count = 0;
    for gate in &circuit.gates {
        match gate.kind.as_str() {
            KIND_RESET => ancilla_total += 1,
            KIND_SWAP => {
                swap_count += 1;
                two_qubit_total += 3;
                extra_cnots += 3;
            }
            KIND_CX | KIND_CZ | KIND_CY => {
                two_qubit_total += 1;
                match gate.phase.as_str() {
                    "enc" | "dec" => extra_cnots += 1,
                    "route" => extra_cnots += 1,
                    _ => {}
                }
            }
            _ => {}
        }
    }
    // Expanded routing CNOTs come in threes.
    swap_count += circuit
        .gates
        .iter()
        .filter(|g| g.phase == "route" && g.kind == KIND_CX)
        .count()
        / 3;
    Metrics {
        extra_cnots,
        depth: circuit.depth(),
        two_qubit_total,
        ancilla_total,
        swap_count,
    }
}

/// Checks the metric identity against the mapping solutions that produced
/// the circuit: extra CNOTs = 2 * sum(|anc| - 1) + 3 * swaps.
pub fn metrics_consistent(metrics: &Metrics, solutions: &[&MappingSolution]) -> bool {
    let bridge_extra: usize = solutions
        .iter()
        .flat_map(|s| s.bridges.iter())
        .map(|b| 2 * (b.len() - 1))
        .sum();
    metrics.extra_cnots == bridge_extra + 3 * metrics.swap_count
}

/// Replaces every SWAP by three CNOTs on consecutive steps; disjoint SWAPs
/// in the same step expand in parallel, later steps shift by two.
pub fn expand_swaps(circuit: &Circuit) -> Circuit {
    let depth = circuit.depth();
    let mut by_step: BTreeMap<usize, Vec<&CircuitGate>> = BTreeMap::new();
    for g in &circuit.gates {
        by_step.entry(g.t).or_default().push(g);
    }
    let mut gates = Vec::new();
    let mut offset = 0usize;
    for t in 1..=depth {
        let step_gates = by_step.get(&t).map_or(&[][..], |v| v.as_slice());
        let has_swap = step_gates.iter().any(|g| g.kind == KIND_SWAP);
        for g in step_gates {
            if g.kind == KIND_SWAP {
                let (a, b) = (g.qubits[0], g.qubits[1]);
                for (i, (c, tgt)) in [(a, b), (b, a), (a, b)].into_iter().enumerate() {
                    gates.push(CircuitGate {
                        kind: KIND_CX.to_string(),
                        qubits: vec![c, tgt],
                        t: t + offset + i,
                        stab: g.stab.clone(),
                        phase: "route".to_string(),
                        segment: g.segment,
                    });
                }
            } else {
                let mut g = (*g).clone();
                g.t = t + offset;
                gates.push(g);
            }
        }
        if has_swap {
            offset += 2;
        }
    }
    let mut out = Circuit {
        n: circuit.n,
        gates,
        metrics: None,
    };
    out.sort_gates();
    out.metrics = Some(compute_metrics(&out));
    out
}

/// Plain-text emission: one gate per line, TICK between steps.
pub fn emit_stim_text(circuit: &Circuit) -> String {
    let mut out = String::new();
    let depth = circuit.depth();
    for t in 1..=depth {
        for gate in circuit.gates.iter().filter(|g| g.t == t) {
            write!(out, "{}", gate.kind).unwrap();
            for &q in &gate.qubits {
                write!(out, " {q}").unwrap();
            }
            out.push('\n');
        }
        if t < depth {
            out.push_str("TICK\n");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gate(kind: &str, qubits: &[usize], t: usize, phase: &str) -> CircuitGate {
        CircuitGate {
            kind: kind.into(),
            qubits: qubits.to_vec(),
            t,
            stab: "s".into(),
            phase: phase.into(),
            segment: 0,
        }
    }

    #[test]
    fn expand_single_swap_shifts_later_steps() {
        let circuit = Circuit {
            n: 4,
            gates: vec![
                gate("H", &[0], 4, "enc"),
                gate("SWAP", &[1, 2], 5, "route"),
                gate("M", &[0], 6, "meas"),
            ],
            metrics: None,
        };
        let expanded = expand_swaps(&circuit);
        assert_eq!(expanded.depth(), 8);
        let cx: Vec<(usize, Vec<usize>)> = expanded
            .gates
            .iter()
            .filter(|g| g.kind == "CX")
            .map(|g| (g.t, g.qubits.clone()))
            .collect();
        assert_eq!(
            cx,
            vec![(5, vec![1, 2]), (6, vec![2, 1]), (7, vec![1, 2])]
        );
        assert_eq!(
            expanded.gates.iter().find(|g| g.kind == "M").unwrap().t,
            8
        );
    }

    #[test]
    fn expand_without_swaps_is_identity_on_gates() {
        let circuit = Circuit {
            n: 2,
            gates: vec![gate("H", &[0], 1, "enc"), gate("CX", &[0, 1], 2, "enc")],
            metrics: None,
        };
        let expanded = expand_swaps(&circuit);
        assert_eq!(expanded.gates, circuit.gates);
    }

    #[test]
    fn parallel_swaps_expand_in_parallel() {
        let circuit = Circuit {
            n: 4,
            gates: vec![
                gate("SWAP", &[0, 1], 1, "route"),
                gate("SWAP", &[2, 3], 1, "route"),
            ],
            metrics: None,
        };
        let expanded = expand_swaps(&circuit);
        assert_eq!(expanded.depth(), 3);
        assert_eq!(expanded.gates.len(), 6);
    }

    #[test]
    fn metrics_count_swap_as_three_extra_cnots() {
        let circuit = Circuit {
            n: 4,
            gates: vec![
                gate("R", &[0], 1, "init"),
                gate("CX", &[0, 1], 2, "enc"),
                gate("CX", &[1, 2], 3, "ctrl"),
                gate("CX", &[0, 1], 4, "dec"),
                gate("SWAP", &[2, 3], 5, "route"),
            ],
            metrics: None,
        };
        let m = compute_metrics(&circuit);
        assert_eq!(m.extra_cnots, 2 + 3);
        assert_eq!(m.swap_count, 1);
        assert_eq!(m.two_qubit_total, 3 + 3);
        assert_eq!(m.ancilla_total, 1);
        assert_eq!(m.depth, 5);
    }

    #[test]
    fn stim_text_layout() {
        let circuit = Circuit {
            n: 3,
            gates: vec![
                gate("R", &[0], 1, "init"),
                gate("H", &[0], 2, "enc"),
                gate("CZ", &[0, 1], 3, "ctrl"),
                gate("CZ", &[0, 2], 4, "ctrl"),
                gate("H", &[0], 5, "dec"),
                gate("M", &[0], 6, "meas"),
            ],
            metrics: None,
        };
        let text = emit_stim_text(&circuit);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.iter().filter(|l| **l == "TICK").count(), 5);
        assert_eq!(lines.iter().filter(|l| **l != "TICK").count(), 6);
        assert!(lines.contains(&"CZ 0 1"));
    }

    #[test]
    fn json_roundtrip() {
        let mut circuit = Circuit {
            n: 5,
            gates: vec![gate("CY", &[0, 3], 1, "ctrl")],
            metrics: None,
        };
        circuit.metrics = Some(compute_metrics(&circuit));
        let parsed = Circuit::from_json(&circuit.to_json()).unwrap();
        assert_eq!(parsed, circuit);
    }
}

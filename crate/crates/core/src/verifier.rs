//! Independent semantic oracle based on Pauli back-propagation.
//!
//! For every stabilizer, the measured observable (Z on the bridge root just
//! before its measurement) is conjugated backward through the circuit to the
//! initial time step. The circuit measures exactly its stabilizer iff the
//! back-propagated observable restricts to the stabilizer on the data
//! qubits, to Z-or-identity on the stabilizer's own reset-initialized bridge
//! nodes (absorbed by |0>), to identity everywhere else, with sign +1.
//! Forward propagation of injected errors then confirms that syndrome flips
//! match symplectic anti-commutation.

use std::collections::BTreeSet;

use crate::circuit::{Circuit, CircuitGate};
use crate::code::{PauliOp, StabilizerCode};
use crate::error::{param, Error, Result};
use crate::stage1::MappingSolution;

/// A Pauli operator over all physical nodes, with a sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliFrame {
    x: Vec<bool>,
    z: Vec<bool>,
    pub sign: i8,
}

impl PauliFrame {
    pub fn identity(n: usize) -> PauliFrame {
        PauliFrame {
            x: vec![false; n],
            z: vec![false; n],
            sign: 1,
        }
    }

    pub fn single(n: usize, node: usize, pauli: PauliOp) -> PauliFrame {
        let mut frame = PauliFrame::identity(n);
        frame.set(node, pauli);
        frame
    }

    pub fn pauli_at(&self, node: usize) -> PauliOp {
        PauliOp::from_xz(self.x[node], self.z[node])
    }

    pub fn set(&mut self, node: usize, pauli: PauliOp) {
        let (x, z) = pauli.xz();
        self.x[node] = x;
        self.z[node] = z;
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.x.len())
            .filter(|&i| self.x[i] || self.z[i])
            .collect()
    }

    fn conj_h(&mut self, q: usize) {
        if self.x[q] && self.z[q] {
            self.sign = -self.sign;
        }
        let (xq, zq) = (self.x[q], self.z[q]);
        self.x[q] = zq;
        self.z[q] = xq;
    }

    fn conj_s(&mut self, q: usize) {
        if self.x[q] && self.z[q] {
            self.sign = -self.sign;
        }
        self.z[q] ^= self.x[q];
    }

    fn conj_s_dag(&mut self, q: usize) {
        if self.x[q] && !self.z[q] {
            self.sign = -self.sign;
        }
        self.z[q] ^= self.x[q];
    }

    fn conj_cx(&mut self, c: usize, t: usize) {
        if self.x[c] && self.z[t] && (self.x[t] == self.z[c]) {
            self.sign = -self.sign;
        }
        self.x[t] ^= self.x[c];
        self.z[c] ^= self.z[t];
    }

    fn conj_cz(&mut self, c: usize, t: usize) {
        if self.x[c] && self.x[t] && (self.z[c] != self.z[t]) {
            self.sign = -self.sign;
        }
        self.z[t] ^= self.x[c];
        self.z[c] ^= self.x[t];
    }

    fn conj_cy(&mut self, c: usize, t: usize) {
        // CY = (I (x) S) CX (I (x) S+), conjugated innermost first.
        self.conj_s_dag(t);
        self.conj_cx(c, t);
        self.conj_s(t);
    }

    fn conj_swap(&mut self, a: usize, b: usize) {
        self.x.swap(a, b);
        self.z.swap(a, b);
    }

    /// Conjugates through one unitary gate. Both directions coincide: every
    /// supported gate is self-inverse.
    pub fn conjugate_unitary(&mut self, gate: &CircuitGate) -> Result<()> {
        match gate.kind.as_str() {
            "H" => self.conj_h(gate.qubits[0]),
            "CX" => self.conj_cx(gate.qubits[0], gate.qubits[1]),
            "CZ" => self.conj_cz(gate.qubits[0], gate.qubits[1]),
            "CY" => self.conj_cy(gate.qubits[0], gate.qubits[1]),
            "SWAP" => self.conj_swap(gate.qubits[0], gate.qubits[1]),
            other => {
                return Err(Error::Parameter(format!(
                    "unsupported gate '{other}' in Clifford propagation"
                )))
            }
        }
        Ok(())
    }
}

/// One stabilizer's verification failure.
#[derive(Debug, Clone)]
pub struct VerifyFailure {
    pub stab: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub failures: Vec<VerifyFailure>,
    pub checked: usize,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Back-propagates `observable` from just before time `from_step` to the
/// start of `gates` (ascending-time slice). Reset and measurement act as
/// frame boundaries: the frame must be I or Z there. A Z crossing any reset
/// is absorbed by the |0> initialization — including resets of other
/// stabilizers, where interleaved commuting circuits legitimately deposit Z
/// residues — while an X or Y component at a boundary makes the observable
/// indeterminate and is reported.
fn propagate_backward(
    gates: &[CircuitGate],
    mut frame: PauliFrame,
    from_step: usize,
    errors: &mut Vec<String>,
) -> PauliFrame {
    for gate in gates.iter().rev().filter(|g| g.t < from_step) {
        match gate.kind.as_str() {
            "R" => {
                let q = gate.qubits[0];
                match frame.pauli_at(q) {
                    PauliOp::I | PauliOp::Z => frame.set(q, PauliOp::I),
                    p => {
                        errors.push(format!(
                            "{p} component hits reset boundary of '{}' on node {q}",
                            gate.stab
                        ));
                        frame.set(q, PauliOp::I);
                    }
                }
            }
            "M" => {
                let q = gate.qubits[0];
                match frame.pauli_at(q) {
                    PauliOp::I | PauliOp::Z => {}
                    p => errors.push(format!(
                        "{p} component crosses measurement of '{}' on node {q}",
                        gate.stab
                    )),
                }
            }
            _ => {
                if let Err(e) = frame.conjugate_unitary(gate) {
                    errors.push(e.to_string());
                }
            }
        }
    }
    frame
}

/// Back-propagates an observable through a whole circuit (public entry used
/// by tests and round-trip properties). Fails on X/Y at any boundary.
pub fn conjugate_backward(circuit: &Circuit, observable: &PauliFrame) -> Result<PauliFrame> {
    let mut gates = circuit.gates.clone();
    gates.sort_by_key(|g| g.t);
    let mut errors = Vec::new();
    let frame = propagate_backward(&gates, observable.clone(), usize::MAX, &mut errors);
    if let Some(e) = errors.into_iter().next() {
        return Err(Error::Parameter(e));
    }
    Ok(frame)
}

/// Proves that each stabilizer's measured observable equals the stabilizer.
pub fn verify_syndrome_extraction(
    circuit: &Circuit,
    code: &StabilizerCode,
    sol: &MappingSolution,
) -> VerifyReport {
    let mut report = VerifyReport::default();
    let mut gates = circuit.gates.clone();
    gates.sort_by_key(|g| g.t);
    let node_to_qubit: std::collections::BTreeMap<usize, usize> =
        sol.placement.iter().map(|(&q, &p)| (p, q)).collect();

    for (s, stab) in code.stabilizers.iter().enumerate() {
        report.checked += 1;
        let mut fail = |reason: String| {
            report.failures.push(VerifyFailure {
                stab: stab.label.clone(),
                reason,
            });
        };
        let Some(measure) = gates
            .iter()
            .find(|g| g.kind == "M" && g.stab == stab.label)
        else {
            fail("no measurement gate".into());
            continue;
        };
        let root = measure.qubits[0];
        if !sol.bridges[s].contains(&root) {
            fail(format!("measured node {root} outside the bridge"));
        }
        let observable = PauliFrame::single(circuit.n, root, PauliOp::Z);
        let mut errors = Vec::new();
        let frame = propagate_backward(&gates, observable, measure.t, &mut errors);
        for e in errors {
            fail(e);
        }
        // Data restriction must equal the stabilizer under the placement.
        for (&q, &p) in &sol.placement {
            let expected = stab.pauli_at(q);
            let got = frame.pauli_at(p);
            if got != expected {
                fail(format!(
                    "data qubit {q} at node {p}: observable restricts to {got}, stabilizer needs {expected}"
                ));
            }
        }
        // Everything else must be identity (bridge Z residues were absorbed
        // at this stabilizer's own resets during the walk).
        for node in frame.support() {
            if !node_to_qubit.contains_key(&node) {
                fail(format!(
                    "residual {} on non-data node {node}",
                    frame.pauli_at(node)
                ));
            }
        }
        if frame.sign != 1 {
            fail("observable acquires a -1 sign".into());
        }
    }
    report
}

/// Forward-propagates a single-qubit Pauli `error` injected on a data node
/// before the circuit; returns the indices of stabilizers whose measurement
/// flips. Errors on ancilla nodes are rejected.
pub fn verify_error_detection(
    circuit: &Circuit,
    code: &StabilizerCode,
    sol: &MappingSolution,
    node: usize,
    error: PauliOp,
) -> Result<BTreeSet<usize>> {
    if error == PauliOp::I {
        return Err(param("identity is not an error"));
    }
    if !sol.placement.values().any(|&p| p == node) {
        return Err(param(format!(
            "node {node} does not hold a data qubit (ancilla errors are out of scope)"
        )));
    }
    let mut gates = circuit.gates.clone();
    gates.sort_by_key(|g| g.t);
    let mut frame = PauliFrame::single(circuit.n, node, error);
    let mut flips = BTreeSet::new();
    for gate in &gates {
        match gate.kind.as_str() {
            "R" => frame.set(gate.qubits[0], PauliOp::I),
            "M" => {
                let q = gate.qubits[0];
                if matches!(frame.pauli_at(q), PauliOp::X | PauliOp::Y) {
                    if let Some(s) = code
                        .stabilizers
                        .iter()
                        .position(|st| st.label == gate.stab)
                    {
                        flips.insert(s);
                    }
                }
            }
            _ => frame.conjugate_unitary(gate)?,
        }
    }
    Ok(flips)
}

/// Stabilizers anti-commuting with a single-qubit `error` on `qubit`: the
/// expected syndrome flip set, computed symplectically.
pub fn anticommuting_stabilizers(
    code: &StabilizerCode,
    qubit: usize,
    error: PauliOp,
) -> BTreeSet<usize> {
    code.stabilizers
        .iter()
        .enumerate()
        .filter(|(_, s)| s.pauli_at(qubit).anticommutes(error))
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitGate;

    fn gate(kind: &str, qubits: &[usize], t: usize) -> CircuitGate {
        CircuitGate {
            kind: kind.into(),
            qubits: qubits.to_vec(),
            t,
            stab: "s".into(),
            phase: "ctrl".into(),
            segment: 0,
        }
    }

    #[test]
    fn h_conjugates_z_to_x() {
        let circuit = Circuit {
            n: 1,
            gates: vec![gate("H", &[0], 1)],
            metrics: None,
        };
        let obs = PauliFrame::single(1, 0, PauliOp::Z);
        let back = conjugate_backward(&circuit, &obs).unwrap();
        assert_eq!(back.pauli_at(0), PauliOp::X);
        assert_eq!(back.sign, 1);
    }

    #[test]
    fn z_on_control_commutes_through_cx() {
        let circuit = Circuit {
            n: 2,
            gates: vec![gate("CX", &[0, 1], 1)],
            metrics: None,
        };
        let obs = PauliFrame::single(2, 0, PauliOp::Z);
        let back = conjugate_backward(&circuit, &obs).unwrap();
        assert_eq!(back.pauli_at(0), PauliOp::Z);
        assert_eq!(back.pauli_at(1), PauliOp::I);
    }

    #[test]
    fn textbook_weight_four_extraction() {
        // H(a), CX(a, q1..q4), H(a): Z on the syndrome qubit back-propagates
        // to X1X2X3X4 on data with Z-free ancilla.
        let mut gates = vec![gate("H", &[0], 1)];
        for (i, q) in (1..=4).enumerate() {
            gates.push(gate("CX", &[0, q], 2 + i));
        }
        gates.push(gate("H", &[0], 6));
        let circuit = Circuit {
            n: 5,
            gates,
            metrics: None,
        };
        let obs = PauliFrame::single(5, 0, PauliOp::Z);
        let back = conjugate_backward(&circuit, &obs).unwrap();
        assert_eq!(back.pauli_at(0), PauliOp::Z);
        for q in 1..=4 {
            assert_eq!(back.pauli_at(q), PauliOp::X);
        }
        assert_eq!(back.sign, 1);
    }

    #[test]
    fn sign_tracking_hyh() {
        // H Y H = -Y.
        let circuit = Circuit {
            n: 1,
            gates: vec![gate("H", &[0], 1)],
            metrics: None,
        };
        let obs = PauliFrame::single(1, 0, PauliOp::Y);
        let back = conjugate_backward(&circuit, &obs).unwrap();
        assert_eq!(back.pauli_at(0), PauliOp::Y);
        assert_eq!(back.sign, -1);
    }

    #[test]
    fn cy_conjugation_table() {
        let circuit = Circuit {
            n: 2,
            gates: vec![gate("CY", &[0, 1], 1)],
            metrics: None,
        };
        // X on control picks up Y on target.
        let back =
            conjugate_backward(&circuit, &PauliFrame::single(2, 0, PauliOp::X)).unwrap();
        assert_eq!(back.pauli_at(0), PauliOp::X);
        assert_eq!(back.pauli_at(1), PauliOp::Y);
        assert_eq!(back.sign, 1);
        // X on target picks up Z on control.
        let back =
            conjugate_backward(&circuit, &PauliFrame::single(2, 1, PauliOp::X)).unwrap();
        assert_eq!(back.pauli_at(0), PauliOp::Z);
        assert_eq!(back.pauli_at(1), PauliOp::X);
        assert_eq!(back.sign, 1);
        // Y on target commutes.
        let back =
            conjugate_backward(&circuit, &PauliFrame::single(2, 1, PauliOp::Y)).unwrap();
        assert_eq!(back.pauli_at(0), PauliOp::I);
        assert_eq!(back.pauli_at(1), PauliOp::Y);
        assert_eq!(back.sign, 1);
    }

    #[test]
    fn backward_then_forward_is_identity_on_unitary_circuits() {
        // Deterministic pseudo-random circuits and frames.
        let mut state = 0x9E3779B97F4A7C15u64;
        let mut next = move |m: usize| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as usize) % m
        };
        for _ in 0..50 {
            let n = 4;
            let mut gates = Vec::new();
            for t in 1..=12 {
                match next(4) {
                    0 => gates.push(gate("H", &[next(n)], t)),
                    1 => {
                        let a = next(n);
                        let b = (a + 1 + next(n - 1)) % n;
                        gates.push(gate("CX", &[a, b], t));
                    }
                    2 => {
                        let a = next(n);
                        let b = (a + 1 + next(n - 1)) % n;
                        gates.push(gate("CZ", &[a, b], t));
                    }
                    _ => {
                        let a = next(n);
                        let b = (a + 1 + next(n - 1)) % n;
                        gates.push(gate("CY", &[a, b], t));
                    }
                }
            }
            let circuit = Circuit {
                n,
                gates,
                metrics: None,
            };
            let mut frame = PauliFrame::identity(n);
            for q in 0..n {
                frame.set(
                    q,
                    [PauliOp::I, PauliOp::X, PauliOp::Y, PauliOp::Z][next(4)],
                );
            }
            let back = conjugate_backward(&circuit, &frame).unwrap();
            // Forward pass: conjugate in ascending time order.
            let mut forward = back.clone();
            let mut sorted = circuit.gates.clone();
            sorted.sort_by_key(|g| g.t);
            for g in &sorted {
                forward.conjugate_unitary(g).unwrap();
            }
            assert_eq!(forward, frame);
        }
    }
}

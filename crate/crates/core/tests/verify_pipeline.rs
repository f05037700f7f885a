//! End-to-end semantic verification: compiled circuits measure exactly
//! their stabilizers, and injected errors flip exactly the anti-commuting
//! syndromes.

use esmc_core::arch::{generate_arch, ArchFamily};
use esmc_core::code::{PauliOp, Stabilizer, StabilizerCode};
use esmc_core::config::RunConfig;
use esmc_core::pipeline::{compile, CompileResult};
use esmc_core::verifier::{
    anticommuting_stabilizers, verify_error_detection, verify_syndrome_extraction,
};

fn compiled(code: &StabilizerCode, arch: &esmc_core::arch::CouplingGraph) -> CompileResult {
    let result = compile(code, arch, &RunConfig::default()).unwrap();
    assert!(
        result.verify.passed(),
        "oracle failures: {:?}",
        result.verify.failures
    );
    result
}

#[test]
fn steane_error_detection_matches_reference_syndromes() {
    let code = esmc_core::cli::parse_code("steane").unwrap();
    let arch = generate_arch(ArchFamily::Square, 5, 5).unwrap();
    let result = compiled(&code, &arch);
    let sol = &result.segments[0].solution;

    // A Z error on data qubit q3 (index 2) flips exactly X1 and X3.
    let node = sol.placement[&2];
    let flips = verify_error_detection(&result.circuit, &code, sol, node, PauliOp::Z).unwrap();
    let labels: Vec<&str> = flips
        .iter()
        .map(|&s| code.stabilizers[s].label.as_str())
        .collect();
    assert_eq!(labels, vec!["X1", "X3"]);

    // An X error never flips an X-type stabilizer.
    let flips = verify_error_detection(&result.circuit, &code, sol, node, PauliOp::X).unwrap();
    assert!(flips
        .iter()
        .all(|&s| code.stabilizers[s].label.starts_with('Z')));

    // Errors on ancilla nodes are out of scope.
    let bridge_node = *sol.bridges[0].iter().next().unwrap();
    assert!(
        verify_error_detection(&result.circuit, &code, sol, bridge_node, PauliOp::Z).is_err()
    );

    // Full sweep against symplectic anti-commutation.
    for q in 0..code.num_data {
        for pauli in [PauliOp::X, PauliOp::Y, PauliOp::Z] {
            let node = sol.placement[&q];
            let flips =
                verify_error_detection(&result.circuit, &code, sol, node, pauli).unwrap();
            assert_eq!(flips, anticommuting_stabilizers(&code, q, pauli));
        }
    }
}

#[test]
fn single_qubit_sweep_agrees_with_symplectic_products() {
    let cases = [
        (
            esmc_core::code::repetition_code(3).unwrap(),
            generate_arch(ArchFamily::Square, 2, 3).unwrap(),
        ),
        (
            esmc_core::code::repetition_code(3).unwrap(),
            generate_arch(ArchFamily::Hexagon, 2, 4).unwrap(),
        ),
        (
            esmc_core::code::surface_code(3).unwrap(),
            generate_arch(ArchFamily::Square, 5, 5).unwrap(),
        ),
    ];
    for (code, arch) in &cases {
        let result = compiled(code, arch);
        let sol = &result.segments[0].solution;
        for q in 0..code.num_data {
            for pauli in [PauliOp::X, PauliOp::Y, PauliOp::Z] {
                let node = sol.placement[&q];
                let flips =
                    verify_error_detection(&result.circuit, code, sol, node, pauli).unwrap();
                let expected = anticommuting_stabilizers(code, q, pauli);
                assert_eq!(
                    flips, expected,
                    "{} on {}: {pauli:?} at qubit {q}",
                    code.name, arch.name
                );
            }
        }
    }
}

#[test]
fn bridged_compile_on_degree_limited_lattice_passes() {
    // A weight-4 check on a degree-3 lattice needs a two-node bridge.
    let code = StabilizerCode::new(
        "w4",
        4,
        vec![Stabilizer::new(
            "s",
            vec![
                (0, PauliOp::X),
                (1, PauliOp::X),
                (2, PauliOp::X),
                (3, PauliOp::X),
            ],
        )
        .unwrap()],
    );
    let arch = generate_arch(ArchFamily::Hexagon, 3, 3).unwrap();
    let result = compiled(&code, &arch);
    let sol = &result.segments[0].solution;
    assert_eq!(sol.bridges[0].len(), 2);
    assert_eq!(result.metrics.extra_cnots, 2);
    // Depth 8: reset, H, enc CNOT, 2+2 interleaved controlled gates,
    // dec CNOT, H, measure with pipelining.
    assert_eq!(result.metrics.depth, 8);
    for q in 0..code.num_data {
        for pauli in [PauliOp::X, PauliOp::Z] {
            let node = sol.placement[&q];
            let flips =
                verify_error_detection(&result.circuit, &code, sol, node, pauli).unwrap();
            assert_eq!(flips, anticommuting_stabilizers(&code, q, pauli));
        }
    }
}

#[test]
fn corrupted_circuits_fail_verification() {
    let code = esmc_core::code::repetition_code(3).unwrap();
    let arch = generate_arch(ArchFamily::Square, 2, 3).unwrap();
    let result = compiled(&code, &arch);
    let sol = &result.segments[0].solution;

    // Delete one controlled gate: the observable loses a data factor.
    let mut missing = result.circuit.clone();
    let idx = missing
        .gates
        .iter()
        .position(|g| g.phase == "ctrl")
        .unwrap();
    missing.gates.remove(idx);
    assert!(!verify_syndrome_extraction(&missing, &code, sol).passed());

    // Move a controlled gate before the encode Hadamard of its stabilizer.
    let mut early = result.circuit.clone();
    let idx = early.gates.iter().position(|g| g.phase == "ctrl").unwrap();
    early.gates[idx].t = 1;
    assert!(!verify_syndrome_extraction(&early, &code, sol).passed());

    // Swap an X-type controlled gate into a Z-type one.
    let code_x = StabilizerCode::new(
        "x01",
        2,
        vec![Stabilizer::new("s", vec![(0, PauliOp::X), (1, PauliOp::X)]).unwrap()],
    );
    let arch_p3 =
        esmc_core::arch::CouplingGraph::new("p3", vec![0, 1, 2], vec![(0, 1), (1, 2)]).unwrap();
    let result = compiled(&code_x, &arch_p3);
    let mut wrong_pauli = result.circuit.clone();
    let idx = wrong_pauli
        .gates
        .iter()
        .position(|g| g.phase == "ctrl")
        .unwrap();
    wrong_pauli.gates[idx].kind = "CZ".to_string();
    assert!(
        !verify_syndrome_extraction(&wrong_pauli, &code_x, &result.segments[0].solution)
            .passed()
    );
}

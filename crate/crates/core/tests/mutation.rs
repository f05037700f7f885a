//! Mutation testing: disabling any scheduling constraint family must let
//! the solver produce at least one circuit that the independent checker or
//! the semantic oracle rejects — each family is load-bearing.

use std::collections::{BTreeMap, BTreeSet};

use esmc_core::arch::CouplingGraph;
use esmc_core::circuit::Circuit;
use esmc_core::code::{PauliOp, Stabilizer, StabilizerCode};
use esmc_core::config::DisabledConstraints;
use esmc_core::stage1::MappingSolution;
use esmc_core::stage2::{
    check_schedule, enumerate_operations, enumerate_schedules, minimize_depth,
};
use esmc_core::verifier::verify_syndrome_extraction;

fn stab(label: &str, paulis: &[(usize, PauliOp)]) -> Stabilizer {
    Stabilizer::new(label, paulis.to_vec()).unwrap()
}

/// Weight-2 stabilizer over a two-node bridge (trees are non-trivial).
fn bridged_instance() -> (StabilizerCode, CouplingGraph, MappingSolution) {
    let code = StabilizerCode::new(
        "w2b",
        2,
        vec![stab("s", &[(0, PauliOp::X), (1, PauliOp::X)])],
    );
    let arch =
        CouplingGraph::new("p4", vec![0, 1, 2, 3], vec![(0, 1), (1, 2), (2, 3)]).unwrap();
    let sol = MappingSolution {
        placement: BTreeMap::from([(0, 0), (1, 3)]),
        bridges: vec![BTreeSet::from([1, 2])],
        roots: vec![1],
        couplings: vec![BTreeMap::from([(0, 1), (1, 2)])],
    };
    (code, arch, sol)
}

/// X and Z stabilizers over shared data (parity-sensitive).
fn xx_zz_instance() -> (StabilizerCode, CouplingGraph, MappingSolution) {
    let code = StabilizerCode::new(
        "xxzz",
        2,
        vec![
            stab("x", &[(0, PauliOp::X), (1, PauliOp::X)]),
            stab("z", &[(0, PauliOp::Z), (1, PauliOp::Z)]),
        ],
    );
    let arch = CouplingGraph::new(
        "c4",
        vec![0, 1, 2, 3],
        vec![(0, 1), (0, 2), (1, 3), (2, 3)],
    )
    .unwrap();
    let sol = MappingSolution {
        placement: BTreeMap::from([(0, 1), (1, 2)]),
        bridges: vec![BTreeSet::from([0]), BTreeSet::from([3])],
        roots: vec![0, 3],
        couplings: vec![
            BTreeMap::from([(0, 0), (1, 0)]),
            BTreeMap::from([(0, 3), (1, 3)]),
        ],
    };
    (code, arch, sol)
}

/// Two stabilizers sharing one ancilla node (serialization-sensitive).
fn shared_instance() -> (StabilizerCode, CouplingGraph, MappingSolution) {
    let code = StabilizerCode::new(
        "shared",
        2,
        vec![
            stab("x", &[(0, PauliOp::X), (1, PauliOp::X)]),
            stab("z", &[(0, PauliOp::Z), (1, PauliOp::Z)]),
        ],
    );
    let arch = CouplingGraph::new("p3", vec![0, 1, 2], vec![(0, 1), (1, 2)]).unwrap();
    let sol = MappingSolution {
        placement: BTreeMap::from([(0, 0), (1, 2)]),
        bridges: vec![BTreeSet::from([1]), BTreeSet::from([1])],
        roots: vec![1, 1],
        couplings: vec![
            BTreeMap::from([(0, 1), (1, 1)]),
            BTreeMap::from([(0, 1), (1, 1)]),
        ],
    };
    (code, arch, sol)
}

/// Runs the mutated encoding over the benchmark instances; returns true if
/// any enumerated schedule fails the checker or the oracle.
fn mutation_exposes_failure(disabled: DisabledConstraints) -> bool {
    let instances = vec![bridged_instance(), xx_zz_instance(), shared_instance()];
    for (code, arch, sol) in instances {
        // Depth range to probe: from one below the true optimum (overlap
        // opportunities) up to the optimum itself (reordering opportunities).
        let full = minimize_depth(&sol, &code, &arch, &Default::default()).unwrap();
        let optimum = full.circuit.depth;
        let ops = enumerate_operations(&sol, &code, &arch);
        for t in optimum.saturating_sub(1)..=optimum {
            if t == 0 {
                continue;
            }
            let schedules = enumerate_schedules(&ops, t, &disabled, 400).unwrap();
            for sched in schedules {
                if !check_schedule(&sched, &sol, &code, &arch).is_empty() {
                    return true;
                }
                let n = arch.nodes().iter().max().unwrap() + 1;
                let circuit = Circuit::from_schedule(&sched, &code, n, 0, 0);
                if !verify_syndrome_extraction(&circuit, &code, &sol).passed() {
                    return true;
                }
            }
        }
    }
    false
}

#[test]
fn baseline_has_no_failures() {
    assert!(
        !mutation_exposes_failure(DisabledConstraints::default()),
        "unmutated constraint set admitted an invalid schedule"
    );
}

#[test]
fn disabling_tree_root_constraint_breaks_circuits() {
    assert!(mutation_exposes_failure(DisabledConstraints {
        hard_b1: true,
        ..Default::default()
    }));
}

#[test]
fn disabling_tree_indegree_constraint_breaks_circuits() {
    assert!(mutation_exposes_failure(DisabledConstraints {
        hard_b2: true,
        ..Default::default()
    }));
}

#[test]
fn disabling_preparation_order_breaks_circuits() {
    assert!(mutation_exposes_failure(DisabledConstraints {
        hard_b3: true,
        ..Default::default()
    }));
}

#[test]
fn disabling_inversion_parity_breaks_circuits() {
    assert!(mutation_exposes_failure(DisabledConstraints {
        hard_c: true,
        ..Default::default()
    }));
}

#[test]
fn disabling_serialization_breaks_circuits() {
    assert!(mutation_exposes_failure(DisabledConstraints {
        hard_d: true,
        ..Default::default()
    }));
}

#[test]
fn disabling_phase_ordering_breaks_circuits() {
    assert!(mutation_exposes_failure(DisabledConstraints {
        phase_order: true,
        ..Default::default()
    }));
}

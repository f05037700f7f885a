//! End-to-end compilation driver: stage 1 -> stage 2 -> circuit assembly ->
//! mandatory verification, with optional stabilizer-set partitioning.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use esmc_sat::external::ExternalSolver;

use crate::arch::CouplingGraph;
use crate::circuit::{compute_metrics, expand_swaps, Circuit, CircuitGate, Metrics, KIND_SWAP};
use crate::code::StabilizerCode;
use crate::config::RunConfig;
use crate::error::{param, Error, Result};
use crate::partition::{order_subsets, partition_stabilizers, route_integration};
use crate::stage1::{solve_stage1, MappingSolution};
use crate::stage2::{minimize_depth, ScheduledCircuit};
use crate::verifier::{verify_syndrome_extraction, VerifyReport};

/// One compiled stabilizer subset.
#[derive(Debug, Clone)]
pub struct Segment {
    /// Global stabilizer indices of this subset, ascending.
    pub stab_indices: Vec<usize>,
    /// Subset view of the code (global data-qubit indexing).
    pub sub_code: StabilizerCode,
    pub solution: MappingSolution,
    pub schedule: ScheduledCircuit,
    pub stage1_optimal: bool,
    pub stage2_optimal: bool,
    /// SWAPs inserted before this segment to reposition shared data qubits.
    pub integration: Vec<(usize, usize)>,
    /// Retained / moved shared-qubit counts against prior placements.
    pub retained: usize,
    pub moved: usize,
}

#[derive(Debug, Clone)]
pub struct CompileResult {
    /// Final circuit with SWAPs expanded and metrics embedded.
    pub circuit: Circuit,
    pub metrics: Metrics,
    pub segments: Vec<Segment>,
    pub verify: VerifyReport,
    pub optimal: bool,
}

/// Audit record of a partitioned compile.
#[derive(Debug, Clone, Serialize)]
pub struct PlanDump {
    pub subsets: Vec<Vec<String>>,
    pub order: Vec<usize>,
    pub integration: Vec<Vec<(usize, usize)>>,
    pub retained: Vec<usize>,
    pub moved: Vec<usize>,
}

impl CompileResult {
    pub fn plan_dump(&self) -> PlanDump {
        PlanDump {
            subsets: self
                .segments
                .iter()
                .map(|seg| {
                    seg.sub_code
                        .stabilizers
                        .iter()
                        .map(|s| s.label.clone())
                        .collect()
                })
                .collect(),
            order: (0..self.segments.len()).collect(),
            integration: self
                .segments
                .iter()
                .map(|seg| seg.integration.clone())
                .collect(),
            retained: self.segments.iter().map(|s| s.retained).collect(),
            moved: self.segments.iter().map(|s| s.moved).collect(),
        }
    }

    /// Circuit slice of one segment (routing layers excluded).
    pub fn segment_circuit(&self, segment: usize) -> Circuit {
        Circuit {
            n: self.circuit.n,
            gates: self
                .circuit
                .gates
                .iter()
                .filter(|g| g.segment == segment && g.phase != "route")
                .cloned()
                .collect(),
            metrics: None,
        }
    }
}

fn qubit_slots(arch: &CouplingGraph) -> usize {
    arch.nodes().iter().copied().max().map_or(0, |m| m + 1)
}

/// Compiles a whole code in one shot or in `cfg.partition` subsets.
pub fn compile(code: &StabilizerCode, arch: &CouplingGraph, cfg: &RunConfig) -> Result<CompileResult> {
    let report = code.validate();
    if !report.is_valid() {
        return Err(param(format!(
            "invalid code: {} index violations, {} non-commuting pairs",
            report.index_violations.len(),
            report.noncommuting_pairs.len()
        )));
    }
    if cfg.partition == 1 {
        compile_single(code, arch, cfg)
    } else {
        compile_partitioned(code, arch, cfg.partition, cfg)
    }
}

fn external_solver(cfg: &RunConfig) -> Option<ExternalSolver> {
    cfg.external_solver.as_deref().map(ExternalSolver::new)
}

fn compile_single(
    code: &StabilizerCode,
    arch: &CouplingGraph,
    cfg: &RunConfig,
) -> Result<CompileResult> {
    let stage1 = solve_stage1(code, arch, &cfg.stage1, external_solver(cfg).as_ref())?;
    let stage2 = minimize_depth(&stage1.solution, code, arch, &cfg.stage2)?;
    let circuit = Circuit::from_schedule(&stage2.circuit, code, qubit_slots(arch), 0, 0);
    let mut circuit = expand_swaps(&circuit);
    let metrics = compute_metrics(&circuit);
    circuit.metrics = Some(metrics);
    let verify = verify_syndrome_extraction(&circuit, code, &stage1.solution);
    let optimal = stage1.optimal && stage2.optimal;
    let segment = Segment {
        stab_indices: (0..code.stabilizers.len()).collect(),
        sub_code: code.clone(),
        solution: stage1.solution,
        schedule: stage2.circuit,
        stage1_optimal: stage1.optimal,
        stage2_optimal: stage2.optimal,
        integration: Vec::new(),
        retained: 0,
        moved: 0,
    };
    Ok(CompileResult {
        circuit,
        metrics,
        segments: vec![segment],
        verify,
        optimal,
    })
}

/// Partitioned compilation: solve subsets in interaction order, retaining
/// shared data-qubit placements softly, then stitch the per-subset circuits
/// with SWAP routing layers in between.
pub fn compile_partitioned(
    code: &StabilizerCode,
    arch: &CouplingGraph,
    k: usize,
    cfg: &RunConfig,
) -> Result<CompileResult> {
    if k == 1 {
        return compile_single(code, arch, cfg);
    }
    let subsets = partition_stabilizers(code, k)?;
    let order = order_subsets(&subsets, code);

    let mut segments: Vec<Segment> = Vec::new();
    // Current physical home of every data qubit placed so far.
    let mut positions: BTreeMap<usize, usize> = BTreeMap::new();
    let mut all_gates: Vec<CircuitGate> = Vec::new();
    let mut step_offset = 0usize;
    let n = qubit_slots(arch);

    for (segment_idx, &subset_idx) in order.iter().enumerate() {
        let stab_indices = subsets[subset_idx].clone();
        let sub_code = StabilizerCode::new(
            format!("{}#{}", code.name, segment_idx),
            code.num_data,
            stab_indices
                .iter()
                .map(|&s| code.stabilizers[s].clone())
                .collect(),
        );
        let active: BTreeSet<usize> = sub_code.support_union().into_iter().collect();

        let mut stage1_cfg = cfg.stage1.clone();
        stage1_cfg.active_qubits = Some(active.iter().copied().collect());
        stage1_cfg.retention = positions
            .iter()
            .filter(|(q, _)| active.contains(q))
            .map(|(&q, &p)| (q, p))
            .collect();
        // Nodes parked under data qubits of other subsets stay untouched.
        stage1_cfg.forbidden_nodes = positions
            .iter()
            .filter(|(q, _)| !active.contains(q))
            .map(|(_, &p)| p)
            .collect();

        let stage1 = solve_stage1(&sub_code, arch, &stage1_cfg, external_solver(cfg).as_ref())?;
        let stage2 = minimize_depth(&stage1.solution, &sub_code, arch, &cfg.stage2)?;

        // Route previously-placed shared qubits to their new homes.
        let required: BTreeMap<usize, usize> = stage1
            .solution
            .placement
            .iter()
            .filter(|(q, _)| positions.contains_key(q))
            .map(|(&q, &p)| (q, p))
            .collect();
        let retained = required
            .iter()
            .filter(|(q, &p)| positions.get(q) == Some(&p))
            .count();
        let moved = required.len() - retained;
        let swaps = route_integration(&mut positions, &required, arch)?;

        // Freshly placed qubits must land on free nodes.
        let occupied: BTreeSet<usize> = positions.values().copied().collect();
        for (&q, &p) in &stage1.solution.placement {
            if !positions.contains_key(&q) {
                if occupied.contains(&p) {
                    return Err(Error::Routing(format!(
                        "new qubit {q} assigned to occupied node {p}"
                    )));
                }
                positions.insert(q, p);
            }
        }
        // Parked tokens must not sit inside this segment's working set.
        let working: BTreeSet<usize> = stage1
            .solution
            .placement
            .values()
            .copied()
            .chain(stage1.solution.bridges.iter().flatten().copied())
            .collect();
        for (&q, &p) in positions.iter() {
            if !active.contains(&q) && working.contains(&p) {
                return Err(Error::Routing(format!(
                    "parked qubit {q} on node {p} collides with segment {segment_idx}"
                )));
            }
        }

        for (i, &(u, v)) in swaps.iter().enumerate() {
            all_gates.push(CircuitGate {
                kind: KIND_SWAP.to_string(),
                qubits: vec![u, v],
                t: step_offset + i + 1,
                stab: String::new(),
                phase: "route".to_string(),
                segment: segment_idx,
            });
        }
        step_offset += swaps.len();

        let segment_circuit =
            Circuit::from_schedule(&stage2.circuit, &sub_code, n, segment_idx, step_offset);
        all_gates.extend(segment_circuit.gates);
        step_offset += stage2.circuit.depth;

        segments.push(Segment {
            stab_indices,
            sub_code,
            solution: stage1.solution,
            schedule: stage2.circuit,
            stage1_optimal: stage1.optimal,
            stage2_optimal: stage2.optimal,
            integration: swaps,
            retained,
            moved,
        });
    }

    let mut stitched = Circuit {
        n,
        gates: all_gates,
        metrics: None,
    };
    stitched.sort_gates();
    let mut circuit = expand_swaps(&stitched);
    let metrics = compute_metrics(&circuit);
    circuit.metrics = Some(metrics);

    // Verify every segment slice against its own sub-code and mapping.
    let mut verify = VerifyReport::default();
    for (idx, segment) in segments.iter().enumerate() {
        let slice = Circuit {
            n,
            gates: circuit
                .gates
                .iter()
                .filter(|g| g.segment == idx && g.phase != "route")
                .cloned()
                .collect(),
            metrics: None,
        };
        let report = verify_syndrome_extraction(&slice, &segment.sub_code, &segment.solution);
        verify.checked += report.checked;
        verify.failures.extend(report.failures);
    }

    let optimal = segments.iter().all(|s| s.stage1_optimal && s.stage2_optimal);
    Ok(CompileResult {
        circuit,
        metrics,
        segments,
        verify,
        optimal,
    })
}

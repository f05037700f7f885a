//! Balanced stabilizer partitioning, subset ordering and SWAP routing
//! between per-subset placements.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::arch::CouplingGraph;
use crate::code::StabilizerCode;
use crate::error::{param, Error, Result};

/// Splits stabilizers into `k` balanced subsets (sizes differ by at most 1)
/// minimizing the shared-data-qubit cut: greedy seeded growth followed by
/// pairwise-swap refinement. Fully deterministic.
pub fn partition_stabilizers(code: &StabilizerCode, k: usize) -> Result<Vec<Vec<usize>>> {
    let n = code.stabilizers.len();
    if k < 1 || k > n {
        return Err(param(format!("partition count {k} outside 1..={n}")));
    }
    if k == 1 {
        return Ok(vec![(0..n).collect()]);
    }
    let graph = code.interaction_graph();
    let weight = |a: usize, b: usize| -> usize {
        let key = if a < b { (a, b) } else { (b, a) };
        graph.get(&key).copied().unwrap_or(0)
    };
    let total_weight = |v: usize| -> usize { (0..n).filter(|&u| u != v).map(|u| weight(v, u)).sum() };

    let mut sizes = vec![n / k; k];
    for size in sizes.iter_mut().take(n % k) {
        *size += 1;
    }

    let mut assignment: Vec<Option<usize>> = vec![None; n];
    let mut unassigned: BTreeSet<usize> = (0..n).collect();
    for (subset_idx, &size) in sizes.iter().enumerate() {
        // Seed: heaviest remaining vertex, ties to the lowest index.
        let seed = *unassigned
            .iter()
            .max_by_key(|&&v| (total_weight(v), std::cmp::Reverse(v)))
            .expect("sizes sum to n");
        assignment[seed] = Some(subset_idx);
        unassigned.remove(&seed);
        let mut members = vec![seed];
        while members.len() < size {
            let next = *unassigned
                .iter()
                .max_by_key(|&&v| {
                    let w: usize = members.iter().map(|&m| weight(v, m)).sum();
                    (w, std::cmp::Reverse(v))
                })
                .expect("sizes sum to n");
            assignment[next] = Some(subset_idx);
            unassigned.remove(&next);
            members.push(next);
        }
    }
    let mut assignment: Vec<usize> = assignment.into_iter().map(|a| a.unwrap()).collect();

    // Pairwise-swap refinement: apply the best strictly-improving swap until
    // none exists.
    let cut = |assignment: &[usize]| -> usize {
        graph
            .iter()
            .filter(|(&(a, b), _)| assignment[a] != assignment[b])
            .map(|(_, &w)| w)
            .sum()
    };
    let mut current = cut(&assignment);
    for _pass in 0..n * n {
        let mut best: Option<(usize, usize, usize)> = None; // (a, b, new_cut)
        for a in 0..n {
            for b in a + 1..n {
                if assignment[a] == assignment[b] {
                    continue;
                }
                assignment.swap(a, b);
                let c = cut(&assignment);
                assignment.swap(a, b);
                if c < current && best.map_or(true, |(_, _, bc)| c < bc) {
                    best = Some((a, b, c));
                }
            }
        }
        match best {
            Some((a, b, c)) => {
                assignment.swap(a, b);
                current = c;
            }
            None => break,
        }
    }

    let mut subsets: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (v, &s) in assignment.iter().enumerate() {
        subsets[s].push(v);
    }
    Ok(subsets)
}

fn data_of(code: &StabilizerCode, subset: &[usize]) -> BTreeSet<usize> {
    subset
        .iter()
        .flat_map(|&s| code.stabilizers[s].qubits())
        .collect()
}

/// Greedy solve order: start with the subset of largest internal
/// interaction weight, then repeatedly pick the subset sharing the most data
/// qubits with everything placed so far. Ties break to the lowest index.
pub fn order_subsets(subsets: &[Vec<usize>], code: &StabilizerCode) -> Vec<usize> {
    let k = subsets.len();
    if k == 0 {
        return Vec::new();
    }
    let graph = code.interaction_graph();
    let datas: Vec<BTreeSet<usize>> = subsets.iter().map(|s| data_of(code, s)).collect();
    let mut order = Vec::with_capacity(k);
    let mut remaining: BTreeSet<usize> = (0..k).collect();
    let first = *remaining
        .iter()
        .max_by_key(|&&i| {
            let w: usize = graph
                .iter()
                .filter(|(&(a, b), _)| subsets[i].contains(&a) && subsets[i].contains(&b))
                .map(|(_, &w)| w)
                .sum();
            (w, std::cmp::Reverse(i))
        })
        .unwrap();
    order.push(first);
    remaining.remove(&first);
    let mut covered: BTreeSet<usize> = datas[first].clone();
    while let Some(&next) = remaining
        .iter()
        .max_by_key(|&&i| (datas[i].intersection(&covered).count(), std::cmp::Reverse(i)))
    {
        order.push(next);
        remaining.remove(&next);
        covered.extend(datas[next].iter().copied());
    }
    order
}

/// Shortest path between nodes avoiding `blocked`, lexicographic tie-break.
fn path_avoiding(
    arch: &CouplingGraph,
    from: usize,
    to: usize,
    blocked: &BTreeSet<usize>,
) -> Option<Vec<usize>> {
    if from == to {
        return Some(vec![from]);
    }
    let ok = |n: usize| n == from || n == to || !blocked.contains(&n);
    let mut dist: BTreeMap<usize, usize> = BTreeMap::from([(to, 0)]);
    let mut queue = VecDeque::from([to]);
    while let Some(n) = queue.pop_front() {
        let d = dist[&n];
        for &m in arch.neighbors(n) {
            if ok(m) && !dist.contains_key(&m) {
                dist.insert(m, d + 1);
                queue.push_back(m);
            }
        }
    }
    let total = *dist.get(&from)?;
    let mut path = vec![from];
    let mut current = from;
    for step in (0..total).rev() {
        let next = arch
            .neighbors(current)
            .iter()
            .copied()
            .find(|m| dist.get(m) == Some(&step))?;
        path.push(next);
        current = next;
    }
    Some(path)
}

/// Moves data-qubit tokens from `positions` so that every qubit required by
/// `required` ends on its node, inserting SWAPs along shortest paths, one
/// qubit at a time in ascending qubit order. `positions` is updated in place
/// (including displaced bystander tokens). Returns the SWAP list.
pub fn route_integration(
    positions: &mut BTreeMap<usize, usize>,
    required: &BTreeMap<usize, usize>,
    arch: &CouplingGraph,
) -> Result<Vec<(usize, usize)>> {
    let mut swaps = Vec::new();
    let mut occupant: BTreeMap<usize, usize> =
        positions.iter().map(|(&q, &p)| (p, q)).collect();
    if occupant.len() != positions.len() {
        return Err(Error::Routing("token positions are not injective".into()));
    }
    for (&q, &target) in required {
        if !positions.contains_key(&q) {
            return Err(Error::Routing(format!("qubit {q} has no current position")));
        }
        if !arch.contains(target) {
            return Err(Error::Routing(format!("target node {target} not in graph")));
        }
    }

    let mut pending: VecDeque<usize> = required.keys().copied().collect();
    let mut placed: BTreeSet<usize> = BTreeSet::new();
    let budget = (required.len() + 1) * (required.len() + 1) + required.len();
    let mut spent = 0usize;
    while let Some(q) = pending.pop_front() {
        spent += 1;
        if spent > budget {
            return Err(Error::Routing("token routing did not converge".into()));
        }
        let current = positions[&q];
        let target = required[&q];
        if current == target {
            placed.insert(q);
            continue;
        }
        // Prefer paths that do not disturb already-placed tokens.
        let locked: BTreeSet<usize> = placed.iter().map(|p| required[p]).collect();
        let path = match path_avoiding(arch, current, target, &locked) {
            Some(p) => p,
            None => arch.shortest_path(current, target)?,
        };
        for window in path.windows(2) {
            let (u, v) = (window[0], window[1]);
            swaps.push((u, v));
            let qu = occupant.remove(&u);
            let qv = occupant.remove(&v);
            if let Some(t) = qu {
                occupant.insert(v, t);
                positions.insert(t, v);
            }
            if let Some(t) = qv {
                occupant.insert(u, t);
                positions.insert(t, u);
                if placed.contains(&t) && positions[&t] != required[&t] {
                    placed.remove(&t);
                    pending.push_back(t);
                }
            }
        }
        placed.insert(q);
    }
    for (&q, &target) in required {
        if positions[&q] != target {
            return Err(Error::Routing(format!(
                "qubit {q} ended on node {} instead of {target}",
                positions[&q]
            )));
        }
    }
    Ok(swaps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch::{generate_arch, ArchFamily};
    use crate::code::{repetition_code, surface_code, PauliOp, Stabilizer};

    #[test]
    fn single_subset_partition_is_identity() {
        let code = surface_code(3).unwrap();
        let subsets = partition_stabilizers(&code, 1).unwrap();
        assert_eq!(subsets, vec![(0..8).collect::<Vec<_>>()]);
    }

    #[test]
    fn surface_three_into_two_balanced_halves() {
        let code = surface_code(3).unwrap();
        let subsets = partition_stabilizers(&code, 2).unwrap();
        assert_eq!(subsets.len(), 2);
        assert_eq!(subsets[0].len(), 4);
        assert_eq!(subsets[1].len(), 4);
        let all: BTreeSet<usize> = subsets.iter().flatten().copied().collect();
        assert_eq!(all.len(), 8);
    }

    #[test]
    fn disconnected_cliques_split_with_zero_cut() {
        // Two groups of four stabilizers; within a group every pair shares a
        // qubit, across groups nothing is shared.
        let mut stabs = Vec::new();
        for g in 0..2usize {
            // Qubits 10g..10g+3 shared by all four stabilizers of group g.
            for i in 0..4usize {
                let q0 = 10 * g + i;
                let q1 = 10 * g + ((i + 1) % 4);
                let shared = 10 * g + 5;
                stabs.push(
                    Stabilizer::new(
                        format!("s{g}{i}"),
                        vec![
                            (q0, PauliOp::Z),
                            (q1, PauliOp::Z),
                            (shared, PauliOp::Z),
                        ],
                    )
                    .unwrap(),
                );
            }
        }
        let code = StabilizerCode::new("cliques", 20, stabs);
        let subsets = partition_stabilizers(&code, 2).unwrap();
        let graph = code.interaction_graph();
        let mut assignment = vec![0usize; 8];
        for (s, subset) in subsets.iter().enumerate() {
            for &v in subset {
                assignment[v] = s;
            }
        }
        let cut: usize = graph
            .iter()
            .filter(|(&(a, b), _)| assignment[a] != assignment[b])
            .map(|(_, &w)| w)
            .sum();
        assert_eq!(cut, 0);

        // Exhaustive oracle over all balanced 2-partitions of 8 vertices.
        let mut best = usize::MAX;
        for mask in 0u32..256 {
            if mask.count_ones() != 4 {
                continue;
            }
            let c: usize = graph
                .iter()
                .filter(|(&(a, b), _)| (mask >> a & 1) != (mask >> b & 1))
                .map(|(_, &w)| w)
                .sum();
            best = best.min(c);
        }
        assert_eq!(cut, best);
    }

    #[test]
    fn ordering_prefers_shared_qubits() {
        // Three subsets in a chain: A shares with B, B shares with C, A and
        // C are disjoint. Whatever end starts, B comes second.
        let stabs = vec![
            Stabilizer::new("a", vec![(0, PauliOp::Z), (1, PauliOp::Z)]).unwrap(),
            Stabilizer::new("b", vec![(1, PauliOp::Z), (2, PauliOp::Z)]).unwrap(),
            Stabilizer::new("c", vec![(2, PauliOp::Z), (3, PauliOp::Z)]).unwrap(),
        ];
        let code = StabilizerCode::new("chain", 4, stabs);
        let subsets = vec![vec![0], vec![1], vec![2]];
        let order = order_subsets(&subsets, &code);
        assert_eq!(order[1], 1, "middle subset second, got {order:?}");

        // All-disjoint subsets fall back to index order.
        let stabs = vec![
            Stabilizer::new("a", vec![(0, PauliOp::Z), (1, PauliOp::Z)]).unwrap(),
            Stabilizer::new("b", vec![(2, PauliOp::Z), (3, PauliOp::Z)]).unwrap(),
            Stabilizer::new("c", vec![(4, PauliOp::Z), (5, PauliOp::Z)]).unwrap(),
        ];
        let code = StabilizerCode::new("disjoint", 6, stabs);
        let order = order_subsets(&[vec![0], vec![1], vec![2]], &code);
        assert_eq!(order, vec![0, 1, 2]);

        let one = order_subsets(&[vec![0, 1, 2]], &code);
        assert_eq!(one, vec![0]);
    }

    #[test]
    fn routing_moves_token_two_hops() {
        let arch = generate_arch(ArchFamily::Square, 1, 3).unwrap();
        let mut positions = BTreeMap::from([(0usize, 0usize)]);
        let required = BTreeMap::from([(0usize, 2usize)]);
        let swaps = route_integration(&mut positions, &required, &arch).unwrap();
        assert_eq!(swaps, vec![(0, 1), (1, 2)]);
        assert_eq!(positions[&0], 2);
    }

    #[test]
    fn routing_identity_is_empty() {
        let arch = generate_arch(ArchFamily::Square, 2, 2).unwrap();
        let mut positions = BTreeMap::from([(0usize, 1usize), (1, 2)]);
        let required = positions.clone();
        let swaps = route_integration(&mut positions, &required, &arch).unwrap();
        assert!(swaps.is_empty());
    }

    #[test]
    fn mutual_swap_needs_single_swap() {
        let arch = generate_arch(ArchFamily::Square, 1, 2).unwrap();
        let mut positions = BTreeMap::from([(0usize, 0usize), (1, 1)]);
        let required = BTreeMap::from([(0usize, 1usize), (1, 0)]);
        let swaps = route_integration(&mut positions, &required, &arch).unwrap();
        assert_eq!(swaps.len(), 1);
        assert_eq!(positions[&0], 1);
        assert_eq!(positions[&1], 0);
    }

    #[test]
    fn routing_displaces_and_recovers_bystanders() {
        // Token 1 sits on the only path of token 0.
        let arch = generate_arch(ArchFamily::Square, 1, 4).unwrap();
        let mut positions = BTreeMap::from([(0usize, 0usize), (1, 1), (2, 2)]);
        let required = BTreeMap::from([(0usize, 3usize), (1, 1), (2, 2)]);
        let swaps = route_integration(&mut positions, &required, &arch).unwrap();
        assert_eq!(positions[&0], 3);
        assert_eq!(positions[&1], 1);
        assert_eq!(positions[&2], 2);
        assert!(!swaps.is_empty());
    }

    #[test]
    fn partition_rejects_bad_k() {
        let code = repetition_code(3).unwrap();
        assert!(partition_stabilizers(&code, 0).is_err());
        assert!(partition_stabilizers(&code, 3).is_err());
        assert!(partition_stabilizers(&code, 2).is_ok());
    }
}

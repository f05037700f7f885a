//! Cardinality, parity and ordering encodings.
//!
//! All encoders write through [`ClauseSink`] so they can target either a
//! [`Builder`] (tagged auxiliary variables, for export) or a [`Solver`]
//! directly (incremental use).

use std::hash::Hash;

use crate::registry::{AuxTag, Builder};
use crate::solver::Solver;
use crate::types::{Lit, Var};

pub trait ClauseSink {
    fn add_clause_sink(&mut self, lits: &[Lit]);
    fn new_aux_var(&mut self) -> Var;
}

impl ClauseSink for Solver {
    fn add_clause_sink(&mut self, lits: &[Lit]) {
        self.add_clause(lits);
    }
    fn new_aux_var(&mut self) -> Var {
        self.new_var()
    }
}

impl<T: Clone + Eq + Hash + AuxTag> ClauseSink for Builder<T> {
    fn add_clause_sink(&mut self, lits: &[Lit]) {
        self.clause(lits);
    }
    fn new_aux_var(&mut self) -> Var {
        self.fresh_aux()
    }
}

pub fn at_least_one(sink: &mut impl ClauseSink, lits: &[Lit]) {
    assert!(!lits.is_empty(), "at_least_one over empty set");
    sink.add_clause_sink(lits);
}

pub fn at_most_one(sink: &mut impl ClauseSink, lits: &[Lit]) {
    if lits.len() <= 4 {
        for i in 0..lits.len() {
            for j in i + 1..lits.len() {
                sink.add_clause_sink(&[!lits[i], !lits[j]]);
            }
        }
    } else {
        at_most_k(sink, lits, 1);
    }
}

pub fn exactly_one(sink: &mut impl ClauseSink, lits: &[Lit]) {
    at_least_one(sink, lits);
    at_most_one(sink, lits);
}

/// Sequential-counter at-most-k (Sinz). No clauses when `k >= lits.len()`;
/// all-negative units when `k == 0`.
pub fn at_most_k(sink: &mut impl ClauseSink, lits: &[Lit], k: usize) {
    let n = lits.len();
    if k >= n {
        return;
    }
    if k == 0 {
        for &l in lits {
            sink.add_clause_sink(&[!l]);
        }
        return;
    }
    // s[i][j]: among lits[0..=i] at least j+1 are true.
    let mut prev: Vec<Var> = (0..k).map(|_| sink.new_aux_var()).collect();
    sink.add_clause_sink(&[!lits[0], prev[0].positive()]);
    for s in prev.iter().skip(1) {
        sink.add_clause_sink(&[s.negative()]);
    }
    for i in 1..n - 1 {
        let row: Vec<Var> = (0..k).map(|_| sink.new_aux_var()).collect();
        sink.add_clause_sink(&[!lits[i], row[0].positive()]);
        sink.add_clause_sink(&[prev[0].negative(), row[0].positive()]);
        for j in 1..k {
            sink.add_clause_sink(&[!lits[i], prev[j - 1].negative(), row[j].positive()]);
            sink.add_clause_sink(&[prev[j].negative(), row[j].positive()]);
        }
        sink.add_clause_sink(&[!lits[i], prev[k - 1].negative()]);
        prev = row;
    }
    sink.add_clause_sink(&[!lits[n - 1], prev[k - 1].negative()]);
}

/// XOR chain forcing an even number of `flags` to be true.
pub fn parity_even(sink: &mut impl ClauseSink, flags: &[Lit]) {
    match flags.len() {
        0 => {}
        1 => sink.add_clause_sink(&[!flags[0]]),
        _ => {
            let mut acc = flags[0];
            for &f in &flags[1..] {
                let x = sink.new_aux_var().positive();
                // x <-> acc xor f
                sink.add_clause_sink(&[!x, acc, f]);
                sink.add_clause_sink(&[!x, !acc, !f]);
                sink.add_clause_sink(&[x, !acc, f]);
                sink.add_clause_sink(&[x, acc, !f]);
                acc = x;
            }
            sink.add_clause_sink(&[!acc]);
        }
    }
}

/// Monotone prefix ladder over one-hot time literals.
///
/// Returns `u[t]` for `t in 0..T` with: `u[t]` true iff the gate executes at
/// step `<= t+1`. Clauses: `u` monotone, `time[t] -> u[t]`, and
/// `u[t] & !u[t-1] -> time[t]`.
pub fn build_ladder(sink: &mut impl ClauseSink, time_lits: &[Lit]) -> Vec<Lit> {
    assert!(!time_lits.is_empty(), "ladder over empty horizon");
    let u: Vec<Lit> = (0..time_lits.len())
        .map(|_| sink.new_aux_var().positive())
        .collect();
    for t in 0..time_lits.len() {
        sink.add_clause_sink(&[!time_lits[t], u[t]]);
        if t > 0 {
            sink.add_clause_sink(&[!u[t - 1], u[t]]);
            sink.add_clause_sink(&[!u[t], u[t - 1], time_lits[t]]);
        } else {
            sink.add_clause_sink(&[!u[0], time_lits[0]]);
        }
    }
    u
}

/// Requires gate `g` (with prefix ladder `ladder_g`) to execute strictly
/// before gate `h` (with one-hot times `time_h`), whenever all `guards` hold.
pub fn order_before(
    sink: &mut impl ClauseSink,
    guards: &[Lit],
    ladder_g: &[Lit],
    time_h: &[Lit],
) {
    debug_assert_eq!(ladder_g.len(), time_h.len());
    let mut clause: Vec<Lit> = guards.iter().map(|&g| !g).collect();
    clause.push(!time_h[0]);
    sink.add_clause_sink(&clause);
    for t in 1..time_h.len() {
        let mut clause: Vec<Lit> = guards.iter().map(|&g| !g).collect();
        clause.push(!time_h[t]);
        clause.push(ladder_g[t - 1]);
        sink.add_clause_sink(&clause);
    }
}

/// Weighted monotone counter over `lits`. Returns `out` with `out[j-1]`
/// forced true whenever the weighted sum reaches `j`; asserting `!out[k]`
/// bounds the sum to at most `k`. The returned vector has length
/// `min(j_max, total_weight)` — levels beyond the total weight are
/// unreachable and carry no literal.
pub fn weighted_counter(
    sink: &mut impl ClauseSink,
    lits: &[Lit],
    weights: &[u64],
    j_max: u64,
) -> Vec<Lit> {
    assert_eq!(lits.len(), weights.len());
    assert!(j_max >= 1);
    let total: u64 = weights.iter().sum();
    let j_max = j_max.min(total) as usize;
    if j_max == 0 {
        return Vec::new();
    }
    let mut prev: Vec<Option<Lit>> = vec![None; j_max]; // prev[j-1] = s_{i,j}
    let mut prefix_sum = 0u64;
    for (&lit, &w) in lits.iter().zip(weights) {
        prefix_sum = prefix_sum.saturating_add(w);
        let cap = (prefix_sum.min(j_max as u64)) as usize;
        let mut row: Vec<Option<Lit>> = vec![None; j_max];
        for j in 1..=cap {
            let s = sink.new_aux_var().positive();
            // Carry from the previous prefix.
            if let Some(p) = prev[j - 1] {
                sink.add_clause_sink(&[!p, s]);
            }
            // lit adds w to the sum.
            if (j as u64) <= w {
                sink.add_clause_sink(&[!lit, s]);
            } else if let Some(p) = prev[j - 1 - w as usize] {
                sink.add_clause_sink(&[!lit, !p, s]);
            }
            row[j - 1] = Some(s);
        }
        prev = row;
    }
    prev.into_iter()
        .map(|s| s.expect("counter row incomplete"))
        .collect()
}

//! Weighted partial MaxSAT by stratified linear search.
//!
//! Each soft clause is relaxed with a selector, then an at-most-k bound over
//! the (weighted) selectors is strengthened until UNSAT. Weight strata are
//! solved highest first; when a stratum's weight exceeds the total weight of
//! everything below it, fixing the stratum optimum before descending is exact.
//! Otherwise all selectors are bounded together with a weighted counter, so
//! the result is the true weighted optimum in both regimes.

use std::time::Instant;

use crate::check;
use crate::encode::weighted_counter;
use crate::solver::{SolveOutcome, Solver};
use crate::types::{Lit, Model, Var, Wcnf};

#[derive(Debug, Clone, Default)]
pub struct MaxSatOptions {
    pub deadline: Option<Instant>,
    /// Initial branching polarities, e.g. retained placements from an
    /// earlier solve.
    pub phase_hints: Vec<(Var, bool)>,
}

#[derive(Debug, Clone)]
pub enum MaxSatResult {
    /// Best model with its violated-soft cost, proven optimal.
    Optimal { model: Model, cost: u64 },
    /// Deadline hit with at least one model in hand; not proven optimal.
    Feasible { model: Model, cost: u64 },
    /// Hard clauses are unsatisfiable.
    HardUnsat,
    /// Deadline hit before any model was found.
    Timeout,
}

impl MaxSatResult {
    pub fn model(&self) -> Option<&Model> {
        match self {
            MaxSatResult::Optimal { model, .. } | MaxSatResult::Feasible { model, .. } => {
                Some(model)
            }
            _ => None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        matches!(self, MaxSatResult::Optimal { .. })
    }
}

struct Stratum {
    weight: u64,
    /// Literal that is true exactly when the soft clause is violated
    /// (negation of unit softs, fresh relax selector otherwise).
    violations: Vec<Lit>,
}

pub fn solve_maxsat(wcnf: &Wcnf, opts: &MaxSatOptions) -> MaxSatResult {
    let mut solver = Solver::new();
    solver.ensure_vars(wcnf.num_vars());
    for (var, phase) in &opts.phase_hints {
        solver.set_phase_hint(*var, *phase);
    }
    for clause in wcnf.hard_clauses() {
        solver.add_clause(clause);
    }

    // Relax soft clauses.
    let mut relaxed: Vec<(u64, Lit)> = Vec::new();
    for soft in wcnf.soft_clauses() {
        let violation = if soft.lits.len() == 1 {
            !soft.lits[0]
        } else {
            let r = solver.new_var();
            let mut clause = soft.lits.clone();
            clause.push(r.positive());
            solver.add_clause(&clause);
            r.positive()
        };
        relaxed.push((soft.weight, violation));
    }

    // Group into strata by weight, heaviest first.
    let mut weights: Vec<u64> = relaxed.iter().map(|&(w, _)| w).collect();
    weights.sort_unstable_by(|a, b| b.cmp(a));
    weights.dedup();
    let mut strata: Vec<Stratum> = weights
        .into_iter()
        .map(|w| Stratum {
            weight: w,
            violations: relaxed
                .iter()
                .filter(|&&(sw, _)| sw == w)
                .map(|&(_, v)| v)
                .collect(),
        })
        .collect();

    // Boolean-multilevel condition: every stratum outweighs everything below.
    let bmo = strata.iter().enumerate().all(|(i, s)| {
        let below: u64 = strata[i + 1..]
            .iter()
            .map(|t| t.weight * t.violations.len() as u64)
            .sum();
        s.weight > below || below == 0
    });
    if !bmo {
        let all: Vec<Lit> = relaxed.iter().map(|&(_, v)| v).collect();
        let ws: Vec<u64> = relaxed.iter().map(|&(w, _)| w).collect();
        strata = vec![Stratum {
            weight: 1,
            violations: all,
        }];
        return run_strata(&mut solver, wcnf, strata, Some(ws), opts);
    }
    run_strata(&mut solver, wcnf, strata, None, opts)
}

fn run_strata(
    solver: &mut Solver,
    wcnf: &Wcnf,
    strata: Vec<Stratum>,
    generic_weights: Option<Vec<u64>>,
    opts: &MaxSatOptions,
) -> MaxSatResult {
    let mut best: Option<Model> = None;

    for (stratum_idx, stratum) in strata.iter().enumerate() {
        let stratum_start = std::time::Instant::now();
        let mut solve_count = 0u32;
        let weights: Vec<u64> = match &generic_weights {
            Some(ws) => ws.clone(),
            None => vec![1; stratum.violations.len()],
        };
        let mut counter: Option<Vec<Lit>> = None;
        let mut stratum_best: Option<u64> = None;
        loop {
            // Invariant: stratum_best >= 1 whenever the counter exists (a
            // zero-cost model breaks out of the loop immediately).
            let assumption: Vec<Lit> = match (&counter, stratum_best) {
                (Some(out), Some(c)) => vec![!out[(c - 1) as usize]],
                _ => Vec::new(),
            };
            solve_count += 1;
            match solver.solve(&assumption, opts.deadline) {
                SolveOutcome::Sat => {
                    let model = solver.model();
                    debug_assert!(check::first_violated_hard(wcnf, &model).is_none());
                    let cost = stratum_cost(&stratum.violations, &weights, &model);
                    best = Some(model);
                    if cost == 0 {
                        stratum_best = Some(0);
                        break;
                    }
                    if counter.is_none() {
                        counter = Some(weighted_counter(
                            solver,
                            &stratum.violations,
                            &weights,
                            cost + 1,
                        ));
                    }
                    stratum_best = Some(cost);
                }
                SolveOutcome::Unsat => {
                    match stratum_best {
                        // No model even without a bound: hard UNSAT.
                        None => return MaxSatResult::HardUnsat,
                        Some(_) => break, // stratum optimum proven
                    }
                }
                SolveOutcome::Timeout => {
                    return match best {
                        Some(model) => {
                            let cost = wcnf.cost(&model);
                            MaxSatResult::Feasible { model, cost }
                        }
                        None => MaxSatResult::Timeout,
                    };
                }
            }
        }
        if std::env::var("ESMC_TIMING").is_ok() {
            eprintln!(
                "stratum {stratum_idx} (w={}, n={}): {} solves, best={:?}, {:?}",
                stratum.weight,
                stratum.violations.len(),
                solve_count,
                stratum_best,
                stratum_start.elapsed()
            );
        }
        // Freeze this stratum's optimum before descending.
        let c = stratum_best.unwrap_or(0);
        if c == 0 {
            for &v in &stratum.violations {
                solver.add_clause(&[!v]);
            }
        } else if let Some(out) = &counter {
            if (c as usize) < out.len() + 1 {
                // sum <= c, i.e. not(sum >= c+1); vacuous if c is the total.
                if let Some(&bound) = out.get(c as usize) {
                    solver.add_clause(&[!bound]);
                }
            }
        }
    }

    match best {
        Some(model) => {
            let cost = wcnf.cost(&model);
            MaxSatResult::Optimal { model, cost }
        }
        None => {
            // No soft clauses at all: a plain SAT check decides.
            match solver.solve(&[], opts.deadline) {
                SolveOutcome::Sat => MaxSatResult::Optimal {
                    model: solver.model(),
                    cost: 0,
                },
                SolveOutcome::Unsat => MaxSatResult::HardUnsat,
                SolveOutcome::Timeout => MaxSatResult::Timeout,
            }
        }
    }
}

fn stratum_cost(violations: &[Lit], weights: &[u64], model: &Model) -> u64 {
    violations
        .iter()
        .zip(weights)
        .filter(|&(&v, _)| model.value_lit(v))
        .map(|(_, &w)| w)
        .sum()
}

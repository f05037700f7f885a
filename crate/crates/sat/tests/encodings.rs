//! Encoding semantics checked against brute-force enumeration of the
//! intended predicate over the variables of interest.

use esmc_sat::encode::{
    at_most_k, at_most_one, build_ladder, exactly_one, order_before, parity_even,
    weighted_counter,
};
use esmc_sat::solver::{SolveOutcome, Solver};
use esmc_sat::types::{Lit, Var};

/// For every assignment of `vars`, checks that the encoding in `solver` is
/// satisfiable under the corresponding assumptions iff `pred` holds.
fn assert_projection(solver: &mut Solver, vars: &[Var], pred: impl Fn(&[bool]) -> bool) {
    let n = vars.len();
    assert!(n <= 16, "projection too large to enumerate");
    for mask in 0u32..(1 << n) {
        let bits: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        let assumptions: Vec<Lit> = vars
            .iter()
            .zip(&bits)
            .map(|(&v, &b)| Lit::new(v, b))
            .collect();
        let outcome = solver.solve(&assumptions, None);
        let expected = if pred(&bits) {
            SolveOutcome::Sat
        } else {
            SolveOutcome::Unsat
        };
        assert_eq!(outcome, expected, "assignment {bits:?}");
    }
}

fn fresh_vars(solver: &mut Solver, n: usize) -> Vec<Var> {
    (0..n).map(|_| solver.new_var()).collect()
}

#[test]
fn exactly_one_single_literal_is_unit() {
    let mut solver = Solver::new();
    let v = solver.new_var();
    exactly_one(&mut solver, &[v.positive()]);
    assert_eq!(solver.solve(&[], None), SolveOutcome::Sat);
    assert!(solver.model().value(v));
    assert_eq!(solver.solve(&[v.negative()], None), SolveOutcome::Unsat);
}

#[test]
fn exactly_one_matches_one_hot_enumeration() {
    let mut solver = Solver::new();
    let vars = fresh_vars(&mut solver, 3);
    let lits: Vec<Lit> = vars.iter().map(|v| v.positive()).collect();
    exactly_one(&mut solver, &lits);
    assert_projection(&mut solver, &vars, |bits| {
        bits.iter().filter(|&&b| b).count() == 1
    });
}

#[test]
fn at_most_one_large_uses_counter_and_matches() {
    let mut solver = Solver::new();
    let vars = fresh_vars(&mut solver, 7);
    let lits: Vec<Lit> = vars.iter().map(|v| v.positive()).collect();
    at_most_one(&mut solver, &lits);
    assert_projection(&mut solver, &vars, |bits| {
        bits.iter().filter(|&&b| b).count() <= 1
    });
}

#[test]
fn at_most_k_trivial_when_k_equals_len() {
    let mut solver = Solver::new();
    let vars = fresh_vars(&mut solver, 3);
    let lits: Vec<Lit> = vars.iter().map(|v| v.positive()).collect();
    let before = solver.num_vars();
    at_most_k(&mut solver, &lits, 3);
    assert_eq!(solver.num_vars(), before, "no auxiliaries expected");
    assert_projection(&mut solver, &vars, |_| true);
}

#[test]
fn at_most_k_two_of_five() {
    let mut solver = Solver::new();
    let vars = fresh_vars(&mut solver, 5);
    let lits: Vec<Lit> = vars.iter().map(|v| v.positive()).collect();
    at_most_k(&mut solver, &lits, 2);
    assert_projection(&mut solver, &vars, |bits| {
        bits.iter().filter(|&&b| b).count() <= 2
    });
}

#[test]
fn at_most_k_zero_forces_all_false() {
    let mut solver = Solver::new();
    let vars = fresh_vars(&mut solver, 3);
    let lits: Vec<Lit> = vars.iter().map(|v| v.positive()).collect();
    at_most_k(&mut solver, &lits, 0);
    assert_projection(&mut solver, &vars, |bits| bits.iter().all(|&b| !b));
}

#[test]
fn parity_empty_is_tautology() {
    let mut solver = Solver::new();
    let _ = solver.new_var();
    parity_even(&mut solver, &[]);
    assert_eq!(solver.solve(&[], None), SolveOutcome::Sat);
}

#[test]
fn parity_two_flags_forces_equality() {
    let mut solver = Solver::new();
    let vars = fresh_vars(&mut solver, 2);
    let lits: Vec<Lit> = vars.iter().map(|v| v.positive()).collect();
    parity_even(&mut solver, &lits);
    assert_projection(&mut solver, &vars, |bits| bits[0] == bits[1]);
}

#[test]
fn parity_four_flags_has_exactly_even_models() {
    let mut solver = Solver::new();
    let vars = fresh_vars(&mut solver, 4);
    let lits: Vec<Lit> = vars.iter().map(|v| v.positive()).collect();
    parity_even(&mut solver, &lits);
    assert_projection(&mut solver, &vars, |bits| {
        bits.iter().filter(|&&b| b).count() % 2 == 0
    });
}

/// Builds two one-hot gates over horizon `t_max` with g ordered before h.
fn ordered_pair(solver: &mut Solver, t_max: usize) -> (Vec<Var>, Vec<Var>) {
    let g = fresh_vars(solver, t_max);
    let h = fresh_vars(solver, t_max);
    let g_lits: Vec<Lit> = g.iter().map(|v| v.positive()).collect();
    let h_lits: Vec<Lit> = h.iter().map(|v| v.positive()).collect();
    exactly_one(solver, &g_lits);
    exactly_one(solver, &h_lits);
    let ladder = build_ladder(solver, &g_lits);
    order_before(solver, &[], &ladder, &h_lits);
    (g, h)
}

#[test]
fn order_with_two_steps_has_unique_model() {
    let mut solver = Solver::new();
    let (g, h) = ordered_pair(&mut solver, 2);
    let all: Vec<Var> = g.iter().chain(&h).copied().collect();
    assert_projection(&mut solver, &all, |bits| {
        let (tg, th) = (&bits[..2], &bits[2..]);
        let pos = |b: &[bool]| b.iter().position(|&x| x);
        matches!((pos(tg), pos(th)), (Some(a), Some(b))
            if tg.iter().filter(|&&x| x).count() == 1
            && th.iter().filter(|&&x| x).count() == 1
            && a < b)
    });
}

#[test]
fn order_with_one_step_is_unsat() {
    let mut solver = Solver::new();
    let _ = ordered_pair(&mut solver, 1);
    assert_eq!(solver.solve(&[], None), SolveOutcome::Unsat);
}

#[test]
fn order_with_three_steps_has_three_models() {
    let mut solver = Solver::new();
    let (g, h) = ordered_pair(&mut solver, 3);
    let all: Vec<Var> = g.iter().chain(&h).copied().collect();
    let mut count = 0;
    for mask in 0u32..(1 << 6) {
        let bits: Vec<bool> = (0..6).map(|i| mask >> i & 1 == 1).collect();
        let assumptions: Vec<Lit> = all
            .iter()
            .zip(&bits)
            .map(|(&v, &b)| Lit::new(v, b))
            .collect();
        if solver.solve(&assumptions, None) == SolveOutcome::Sat {
            count += 1;
        }
    }
    assert_eq!(count, 3, "(1,2) (1,3) (2,3)");
}

#[test]
fn weighted_counter_bounds_weighted_sums() {
    // weights 2,3,1; enumerate all bounds.
    for bound in 0u64..=6 {
        let mut solver = Solver::new();
        let vars = fresh_vars(&mut solver, 3);
        let lits: Vec<Lit> = vars.iter().map(|v| v.positive()).collect();
        let out = weighted_counter(&mut solver, &lits, &[2, 3, 1], 7);
        assert_eq!(out.len(), 6);
        if bound < 6 {
            solver.add_clause(&[!out[bound as usize]]);
        }
        assert_projection(&mut solver, &vars, |bits| {
            let sum: u64 = bits
                .iter()
                .zip([2u64, 3, 1])
                .filter(|(&b, _)| b)
                .map(|(_, w)| w)
                .sum();
            sum <= bound
        });
    }
}

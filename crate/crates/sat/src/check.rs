//! Independent clause evaluation, used to re-check solver models.

use crate::types::{Lit, Model, Wcnf};

pub fn clause_satisfied(clause: &[Lit], model: &Model) -> bool {
    clause.iter().any(|&l| model.value_lit(l))
}

/// Index of the first hard clause violated by `model`, if any.
pub fn first_violated_hard(wcnf: &Wcnf, model: &Model) -> Option<usize> {
    wcnf.hard_clauses()
        .iter()
        .position(|c| !clause_satisfied(c, model))
}

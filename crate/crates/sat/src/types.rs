//! Variables, literals, clause databases and models.

use std::fmt;
use std::ops::Not;

/// A Boolean variable. Ids are dense and start at 1.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    pub fn from_index(id: u32) -> Var {
        debug_assert!(id >= 1);
        Var(id)
    }

    /// 1-based id, matching DIMACS numbering.
    pub fn index(self) -> u32 {
        self.0
    }

    pub fn positive(self) -> Lit {
        Lit::new(self, true)
    }

    pub fn negative(self) -> Lit {
        Lit::new(self, false)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A literal: a variable or its negation.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: Var, positive: bool) -> Lit {
        Lit(var.0 << 1 | u32::from(!positive))
    }

    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    /// Dense code usable as a watch-list index (2*var + sign).
    pub(crate) fn code(self) -> usize {
        self.0 as usize
    }

    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.var().index());
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    pub fn from_dimacs(value: i64) -> Lit {
        debug_assert!(value != 0);
        Lit::new(Var(value.unsigned_abs() as u32), value > 0)
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A soft clause with a positive integer weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoftClause {
    pub weight: u64,
    pub lits: Vec<Lit>,
}

/// A weighted partial CNF formula: hard clauses plus weighted soft clauses.
///
/// Also serves as the plain-CNF database (soft list empty).
#[derive(Debug, Clone, Default)]
pub struct Wcnf {
    num_vars: u32,
    hard: Vec<Vec<Lit>>,
    soft: Vec<SoftClause>,
}

impl Wcnf {
    pub fn new() -> Wcnf {
        Wcnf::default()
    }

    pub fn new_var(&mut self) -> Var {
        self.num_vars += 1;
        Var(self.num_vars)
    }

    /// Registers externally-chosen variable ids (used by the DIMACS parser).
    pub fn ensure_vars(&mut self, count: u32) {
        self.num_vars = self.num_vars.max(count);
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn add_hard(&mut self, lits: &[Lit]) {
        assert!(!lits.is_empty(), "empty hard clause at build time");
        debug_assert!(lits.iter().all(|l| l.var().index() <= self.num_vars));
        self.hard.push(lits.to_vec());
    }

    pub fn add_soft(&mut self, weight: u64, lits: &[Lit]) {
        assert!(weight >= 1, "soft weights must be >= 1");
        assert!(!lits.is_empty(), "empty soft clause");
        debug_assert!(lits.iter().all(|l| l.var().index() <= self.num_vars));
        self.soft.push(SoftClause {
            weight,
            lits: lits.to_vec(),
        });
    }

    pub fn hard_clauses(&self) -> &[Vec<Lit>] {
        &self.hard
    }

    pub fn soft_clauses(&self) -> &[SoftClause] {
        &self.soft
    }

    pub fn soft_weight_sum(&self) -> u64 {
        self.soft.iter().map(|s| s.weight).sum()
    }

    /// Total weight of soft clauses falsified by `model`.
    pub fn cost(&self, model: &Model) -> u64 {
        self.soft
            .iter()
            .filter(|s| !s.lits.iter().any(|&l| model.value_lit(l)))
            .map(|s| s.weight)
            .sum()
    }
}

/// A total assignment over all allocated variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    values: Vec<bool>, // indexed by var id, slot 0 unused
}

impl Model {
    pub fn from_values(values: Vec<bool>) -> Model {
        Model { values }
    }

    pub fn num_vars(&self) -> u32 {
        (self.values.len().saturating_sub(1)) as u32
    }

    pub fn value(&self, var: Var) -> bool {
        self.values[var.index() as usize]
    }

    pub fn value_lit(&self, lit: Lit) -> bool {
        self.value(lit.var()) == lit.is_positive()
    }
}

//! Variable registry: a bijection between solver variables and semantic tags.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use crate::types::{Lit, Var, Wcnf};

/// Tags that can mint anonymous auxiliary entries (encoding plumbing).
pub trait AuxTag {
    fn aux(ordinal: u32) -> Self;
}

/// Maps every allocated variable to exactly one semantic tag and back.
#[derive(Debug, Clone)]
pub struct VarRegistry<T> {
    tags: Vec<T>, // tags[i] is the tag of variable i+1
    index: HashMap<T, Var>,
    aux_count: u32,
}

impl<T: Clone + Eq + Hash> VarRegistry<T> {
    pub fn new() -> VarRegistry<T> {
        VarRegistry {
            tags: Vec::new(),
            index: HashMap::new(),
            aux_count: 0,
        }
    }

    fn insert(&mut self, formula: &mut Wcnf, tag: T) -> Var {
        let var = formula.new_var();
        debug_assert_eq!(var.index() as usize, self.tags.len() + 1);
        self.tags.push(tag.clone());
        let prev = self.index.insert(tag, var);
        assert!(prev.is_none(), "tag registered twice");
        var
    }

    pub fn lookup(&self, tag: &T) -> Option<Var> {
        self.index.get(tag).copied()
    }

    pub fn tag(&self, var: Var) -> &T {
        &self.tags[var.index() as usize - 1]
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn tags(&self) -> impl Iterator<Item = (Var, &T)> {
        self.tags
            .iter()
            .enumerate()
            .map(|(i, t)| (Var::from_index(i as u32 + 1), t))
    }
}

impl<T: Clone + Eq + Hash> Default for VarRegistry<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// A WCNF under construction together with its registry.
///
/// All encoders in [`crate::encode`] write through this type so that every
/// auxiliary variable they allocate is tagged.
#[derive(Debug, Clone)]
pub struct Builder<T> {
    pub formula: Wcnf,
    pub registry: VarRegistry<T>,
}

impl<T: Clone + Eq + Hash + AuxTag> Builder<T> {
    pub fn new() -> Builder<T> {
        Builder {
            formula: Wcnf::new(),
            registry: VarRegistry::new(),
        }
    }

    /// Returns the variable for `tag`, allocating it on first use.
    pub fn var(&mut self, tag: T) -> Var {
        if let Some(v) = self.registry.lookup(&tag) {
            return v;
        }
        self.registry.insert(&mut self.formula, tag)
    }

    /// Variable for `tag`, which must already exist.
    pub fn existing(&self, tag: &T) -> Var {
        self.registry
            .lookup(tag)
            .expect("variable not yet registered")
    }

    pub fn fresh_aux(&mut self) -> Var {
        let ordinal = self.registry.aux_count;
        self.registry.aux_count += 1;
        self.registry.insert(&mut self.formula, T::aux(ordinal))
    }

    pub fn clause(&mut self, lits: &[Lit]) {
        self.formula.add_hard(lits);
    }

    pub fn soft(&mut self, weight: u64, lits: &[Lit]) {
        self.formula.add_soft(weight, lits);
    }
}

impl<T: Clone + Eq + Hash + AuxTag> Default for Builder<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: fmt::Display> VarRegistry<T> {
    /// Human-readable legend, one `var tag` line per variable.
    pub fn legend(&self) -> String {
        let mut out = String::new();
        for (i, tag) in self.tags.iter().enumerate() {
            out.push_str(&format!("{} {}\n", i + 1, tag));
        }
        out
    }
}

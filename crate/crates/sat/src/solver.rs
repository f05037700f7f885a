//! An incremental CDCL solver with assumptions, phase hints and deadlines.
//!
//! Standard two-watched-literal propagation, first-UIP clause learning with
//! recursive minimization, VSIDS branching with phase saving, Luby restarts
//! and LBD-based learned-clause reduction. Fully deterministic: no random
//! seeds, ties broken by variable index.

use std::time::Instant;

use crate::types::{Lit, Model, Var};

/// Verdict of a `solve` call. Timeouts are reported distinctly and never
/// conflated with UNSAT.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveOutcome {
    Sat,
    /// Unsatisfiable under the given assumptions (or globally if none).
    Unsat,
    Timeout,
}

const NO_REASON: u32 = u32::MAX;

#[derive(Clone, Copy)]
struct Watch {
    cref: u32,
    blocker: Lit,
}

struct ClauseHeader {
    start: u32,
    len: u32,
    learnt: bool,
    deleted: bool,
    lbd: u32,
    activity: f32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Value {
    Undef,
    True,
    False,
}

pub struct Solver {
    // Clause arena.
    lit_pool: Vec<Lit>,
    headers: Vec<ClauseHeader>,
    learnt_refs: Vec<u32>,
    watches: Vec<Vec<Watch>>, // indexed by Lit::code
    // Assignment state.
    assign: Vec<Value>, // indexed by var id
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    // Branching.
    activity: Vec<f64>,
    var_inc: f64,
    heap: IndexedHeap,
    saved_phase: Vec<bool>,
    // Learning scratch.
    seen: Vec<bool>,
    analyze_stack: Vec<Lit>,
    analyze_clear: Vec<Var>,
    // Bookkeeping.
    ok: bool,
    num_vars: u32,
    cla_inc: f32,
    conflicts: u64,
    max_learnts: usize,
    #[cfg(debug_assertions)]
    problem_clauses: Vec<Vec<Lit>>,
}

impl Solver {
    pub fn new() -> Solver {
        Solver {
            lit_pool: Vec::new(),
            headers: Vec::new(),
            learnt_refs: Vec::new(),
            watches: vec![Vec::new(), Vec::new()],
            assign: vec![Value::Undef],
            level: vec![0],
            reason: vec![NO_REASON],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0],
            var_inc: 1.0,
            heap: IndexedHeap::new(),
            saved_phase: vec![false],
            seen: vec![false],
            analyze_stack: Vec::new(),
            analyze_clear: Vec::new(),
            ok: true,
            num_vars: 0,
            cla_inc: 1.0,
            conflicts: 0,
            max_learnts: 8192,
            #[cfg(debug_assertions)]
            problem_clauses: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn new_var(&mut self) -> Var {
        self.num_vars += 1;
        let v = Var::from_index(self.num_vars);
        self.assign.push(Value::Undef);
        self.level.push(0);
        self.reason.push(NO_REASON);
        self.activity.push(0.0);
        self.saved_phase.push(false);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.heap.insert(v, &self.activity);
        v
    }

    /// Grows the variable table so that ids `1..=n` exist.
    pub fn ensure_vars(&mut self, n: u32) {
        while self.num_vars < n {
            self.new_var();
        }
    }

    /// Initial branching polarity for `var`. The solver keeps updating it
    /// through phase saving afterwards.
    pub fn set_phase_hint(&mut self, var: Var, phase: bool) {
        self.saved_phase[var.index() as usize] = phase;
    }

    fn value_lit(&self, lit: Lit) -> Value {
        match self.assign[lit.var().index() as usize] {
            Value::Undef => Value::Undef,
            Value::True => {
                if lit.is_positive() {
                    Value::True
                } else {
                    Value::False
                }
            }
            Value::False => {
                if lit.is_positive() {
                    Value::False
                } else {
                    Value::True
                }
            }
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    /// Adds a clause. Callable between solves; any leftover search state is
    /// rolled back to level 0 first.
    pub fn add_clause(&mut self, lits: &[Lit]) {
        self.cancel_until(0);
        if !self.ok {
            return;
        }
        #[cfg(debug_assertions)]
        self.problem_clauses.push(lits.to_vec());
        // Sort, dedupe, drop tautologies and level-0-false literals.
        let mut ls: Vec<Lit> = lits.to_vec();
        ls.sort_unstable();
        ls.dedup();
        let mut i = 0;
        while i + 1 < ls.len() {
            if ls[i].var() == ls[i + 1].var() {
                return; // x and !x: tautology
            }
            i += 1;
        }
        ls.retain(|&l| self.value_lit(l) != Value::False);
        if ls.iter().any(|&l| self.value_lit(l) == Value::True) {
            return;
        }
        match ls.len() {
            0 => self.ok = false,
            1 => {
                self.enqueue(ls[0], NO_REASON);
                if self.propagate().is_some() {
                    self.ok = false;
                }
            }
            _ => {
                self.attach_clause(&ls, false);
            }
        }
    }

    fn attach_clause(&mut self, lits: &[Lit], learnt: bool) -> u32 {
        let cref = self.headers.len() as u32;
        self.headers.push(ClauseHeader {
            start: self.lit_pool.len() as u32,
            len: lits.len() as u32,
            learnt,
            deleted: false,
            lbd: 0,
            activity: 0.0,
        });
        self.lit_pool.extend_from_slice(lits);
        self.watches[(!lits[0]).code()].push(Watch {
            cref,
            blocker: lits[1],
        });
        self.watches[(!lits[1]).code()].push(Watch {
            cref,
            blocker: lits[0],
        });
        if learnt {
            self.learnt_refs.push(cref);
        }
        cref
    }

    fn enqueue(&mut self, lit: Lit, reason: u32) {
        debug_assert_eq!(self.value_lit(lit), Value::Undef);
        let v = lit.var().index() as usize;
        self.assign[v] = if lit.is_positive() {
            Value::True
        } else {
            Value::False
        };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(lit);
    }

    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            // Clauses watching !p must be inspected: p just became true.
            // Such clauses are registered under p's code.
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[p.code()]);
            let mut i = 0;
            'watchers: while i < ws.len() {
                let w = ws[i];
                if self.value_lit(w.blocker) == Value::True {
                    i += 1;
                    continue;
                }
                let h = &self.headers[w.cref as usize];
                let (start, len) = (h.start as usize, h.len as usize);
                // Ensure the falsified literal sits at slot 1.
                if self.lit_pool[start] == false_lit {
                    self.lit_pool.swap(start, start + 1);
                }
                debug_assert_eq!(self.lit_pool[start + 1], false_lit);
                let first = self.lit_pool[start];
                if first != w.blocker && self.value_lit(first) == Value::True {
                    ws[i].blocker = first;
                    i += 1;
                    continue;
                }
                for k in 2..len {
                    let lk = self.lit_pool[start + k];
                    if self.value_lit(lk) != Value::False {
                        self.lit_pool.swap(start + 1, start + k);
                        self.watches[(!lk).code()].push(Watch {
                            cref: w.cref,
                            blocker: first,
                        });
                        ws.swap_remove(i);
                        continue 'watchers;
                    }
                }
                // No replacement watch: unit or conflict.
                ws[i].blocker = first;
                if self.value_lit(first) == Value::False {
                    self.watches[p.code()] = ws;
                    self.qhead = self.trail.len();
                    return Some(w.cref);
                }
                self.enqueue(first, w.cref);
                i += 1;
            }
            self.watches[p.code()] = ws;
        }
        None
    }

    fn bump_var(&mut self, v: Var) {
        let idx = v.index() as usize;
        self.activity[idx] += self.var_inc;
        if self.activity[idx] > 1e100 {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.update(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: u32) {
        let h = &mut self.headers[cref as usize];
        if !h.learnt {
            return;
        }
        h.activity += self.cla_inc;
        if h.activity > 1e30 {
            for hh in self.headers.iter_mut() {
                hh.activity *= 1e-30;
            }
            self.cla_inc *= 1e-30;
        }
    }

    /// First-UIP conflict analysis. Returns (learnt clause, backtrack level).
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let mut learnt: Vec<Lit> = vec![Lit::new(Var::from_index(1), true)]; // slot 0 placeholder
        let mut counter = 0u32;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        loop {
            self.bump_clause(confl);
            let clause_range = {
                let h = &self.headers[confl as usize];
                (h.start as usize, h.len as usize)
            };
            let skip = usize::from(p.is_some());
            for k in skip..clause_range.1 {
                let q = self.lit_pool[clause_range.0 + k];
                let v = q.var().index() as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(q.var());
                    if self.level[v] >= self.decision_level() {
                        counter += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            if p.is_none() && counter == 0 {
                let info: Vec<(i64, u32, bool)> = (clause_range.0..clause_range.0 + clause_range.1)
                    .map(|k| {
                        let l = self.lit_pool[k];
                        (
                            l.to_dimacs(),
                            self.level[l.var().index() as usize],
                            self.value_lit(l) == Value::True,
                        )
                    })
                    .collect();
                panic!(
                    "analyze: conflict clause has no current-level literal; dl={} clause={info:?}",
                    self.decision_level()
                );
            }
            // Walk back the trail to the next marked literal.
            loop {
                if index == 0 {
                    let levels: Vec<u32> = (clause_range.0..clause_range.0 + clause_range.1)
                        .map(|k| self.level[self.lit_pool[k].var().index() as usize])
                        .collect();
                    panic!(
                        "analyze: no marked literal on trail; counter={counter} dl={} clause levels={levels:?}",
                        self.decision_level()
                    );
                }
                index -= 1;
                if self.seen[self.trail[index].var().index() as usize] {
                    break;
                }
            }
            let lit = self.trail[index];
            let v = lit.var().index() as usize;
            self.seen[v] = false;
            counter -= 1;
            if counter == 0 {
                learnt[0] = !lit;
                break;
            }
            confl = self.reason[v];
            debug_assert_ne!(confl, NO_REASON);
            p = Some(lit);
        }

        // Minimize: drop literals implied by the rest of the clause.
        for &l in &learnt {
            self.seen[l.var().index() as usize] = true;
        }
        self.analyze_clear.clear();
        let full: Vec<Lit> = learnt.clone();
        let mut j = 1;
        for i in 1..learnt.len() {
            let l = learnt[i];
            if self.reason[l.var().index() as usize] == NO_REASON || !self.lit_redundant(l) {
                learnt[j] = l;
                j += 1;
            }
        }
        learnt.truncate(j);
        for &l in &full {
            self.seen[l.var().index() as usize] = false;
        }
        for &v in &self.analyze_clear {
            self.seen[v.index() as usize] = false;
        }

        // Backtrack level: highest level among learnt[1..].
        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var().index() as usize]
                    > self.level[learnt[max_i].var().index() as usize]
                {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var().index() as usize]
        };
        (learnt, bt)
    }

    /// True if `lit`'s reason chain stays within already-seen literals.
    fn lit_redundant(&mut self, lit: Lit) -> bool {
        self.analyze_stack.clear();
        self.analyze_stack.push(lit);
        let mut pending: Vec<Var> = Vec::new();
        while let Some(l) = self.analyze_stack.pop() {
            let reason = self.reason[l.var().index() as usize];
            if reason == NO_REASON {
                for &v in &pending {
                    self.seen[v.index() as usize] = false;
                }
                return false;
            }
            let h = &self.headers[reason as usize];
            let (start, len) = (h.start as usize, h.len as usize);
            for k in 0..len {
                let q = self.lit_pool[start + k];
                let v = q.var();
                let vi = v.index() as usize;
                if v != l.var() && !self.seen[vi] && self.level[vi] > 0 {
                    self.seen[vi] = true;
                    pending.push(v);
                    self.analyze_stack.push(q);
                }
            }
        }
        self.analyze_clear.extend_from_slice(&pending);
        true
    }

    fn cancel_until(&mut self, target: u32) {
        if self.decision_level() <= target {
            return;
        }
        let keep = self.trail_lim[target as usize];
        for i in (keep..self.trail.len()).rev() {
            let lit = self.trail[i];
            let v = lit.var();
            let vi = v.index() as usize;
            self.assign[vi] = Value::Undef;
            self.saved_phase[vi] = lit.is_positive();
            self.reason[vi] = NO_REASON;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(keep);
        self.trail_lim.truncate(target as usize);
        self.qhead = self.trail.len();
    }

    fn compute_lbd(&mut self, lits: &[Lit]) -> u32 {
        let mut levels: Vec<u32> = lits
            .iter()
            .map(|l| self.level[l.var().index() as usize])
            .collect();
        levels.sort_unstable();
        levels.dedup();
        levels.len() as u32
    }

    fn reduce_db(&mut self) {
        let headers = &self.headers;
        let mut refs: Vec<u32> = self
            .learnt_refs
            .iter()
            .copied()
            .filter(|&c| !headers[c as usize].deleted)
            .collect();
        // Worst clauses first: high LBD, then low activity.
        refs.sort_by(|&a, &b| {
            let (ha, hb) = (&headers[a as usize], &headers[b as usize]);
            hb.lbd
                .cmp(&ha.lbd)
                .then(ha.activity.partial_cmp(&hb.activity).unwrap())
                .then(a.cmp(&b))
        });
        let locked: Vec<bool> = refs
            .iter()
            .map(|&c| {
                let h = &self.headers[c as usize];
                let first = self.lit_pool[h.start as usize];
                self.value_lit(first) == Value::True
                    && self.reason[first.var().index() as usize] == c
            })
            .collect();
        let target = refs.len() / 2;
        let mut removed = 0;
        for (i, &cref) in refs.iter().enumerate() {
            if removed >= target {
                break;
            }
            let h = &self.headers[cref as usize];
            if locked[i] || h.lbd <= 3 || h.len == 2 {
                continue;
            }
            self.detach_clause(cref);
            removed += 1;
        }
        self.learnt_refs
            .retain(|&c| !self.headers[c as usize].deleted);
    }

    fn detach_clause(&mut self, cref: u32) {
        let (l0, l1) = {
            let h = &self.headers[cref as usize];
            (
                self.lit_pool[h.start as usize],
                self.lit_pool[h.start as usize + 1],
            )
        };
        self.watches[(!l0).code()].retain(|w| w.cref != cref);
        self.watches[(!l1).code()].retain(|w| w.cref != cref);
        self.headers[cref as usize].deleted = true;
    }

    fn pick_branch(&mut self) -> Option<Var> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assign[v.index() as usize] == Value::Undef {
                return Some(v);
            }
        }
        None
    }

    /// Solves under `assumptions` with an optional wall-clock deadline.
    pub fn solve(&mut self, assumptions: &[Lit], deadline: Option<Instant>) -> SolveOutcome {
        if !self.ok {
            return SolveOutcome::Unsat;
        }
        self.cancel_until(0);
        if self.propagate().is_some() {
            self.ok = false;
            return SolveOutcome::Unsat;
        }

        let mut restart_count = 0u64;
        let mut conflicts_until_restart = 128 * luby(restart_count);
        let outcome = loop {
            match self.search_step(assumptions) {
                StepResult::Sat => break SolveOutcome::Sat,
                StepResult::Unsat => break SolveOutcome::Unsat,
                StepResult::Continue => {}
                StepResult::Conflict => {
                    if conflicts_until_restart == 0 {
                        restart_count += 1;
                        conflicts_until_restart = 128 * luby(restart_count);
                        let restart_level = assumptions.len() as u32;
                        self.cancel_until(restart_level.min(self.decision_level()));
                    } else {
                        conflicts_until_restart -= 1;
                    }
                    if self.conflicts % 1024 == 0 {
                        if let Some(d) = deadline {
                            if Instant::now() >= d {
                                break SolveOutcome::Timeout;
                            }
                        }
                    }
                    if self.learnt_refs.len() > self.max_learnts {
                        self.reduce_db();
                        self.max_learnts += self.max_learnts / 2;
                    }
                }
            }
        };
        if outcome != SolveOutcome::Sat {
            self.cancel_until(0);
        }
        outcome
    }

    fn search_step(&mut self, assumptions: &[Lit]) -> StepResult {
        if let Some(confl) = self.propagate() {
            self.conflicts += 1;
            if self.decision_level() == 0 {
                self.ok = false;
                return StepResult::Unsat;
            }
            if self.decision_level() <= assumptions.len() as u32 {
                // Conflict forced by the assumption prefix alone.
                return StepResult::Unsat;
            }
            let (learnt, bt) = self.analyze(confl);
            // Never backtrack into the middle of the assumption prefix with a
            // learnt unit: clamp to the assumption boundary instead.
            self.cancel_until(bt.max(0));
            self.var_inc /= 0.95;
            self.cla_inc /= 0.999;
            if learnt.len() == 1 {
                if self.decision_level() > 0 {
                    self.cancel_until(0);
                }
                self.enqueue(learnt[0], NO_REASON);
            } else {
                let cref = self.attach_clause(&learnt, true);
                self.headers[cref as usize].lbd = self.compute_lbd(&learnt);
                self.enqueue(learnt[0], cref);
            }
            return StepResult::Conflict;
        }

        // Establish pending assumptions as decisions.
        while (self.decision_level() as usize) < assumptions.len() {
            let a = assumptions[self.decision_level() as usize];
            match self.value_lit(a) {
                Value::True => {
                    self.trail_lim.push(self.trail.len());
                }
                Value::False => return StepResult::Unsat,
                Value::Undef => {
                    self.trail_lim.push(self.trail.len());
                    self.enqueue(a, NO_REASON);
                    return StepResult::Continue;
                }
            }
        }

        match self.pick_branch() {
            None => StepResult::Sat,
            Some(v) => {
                self.trail_lim.push(self.trail.len());
                let phase = self.saved_phase[v.index() as usize];
                self.enqueue(Lit::new(v, phase), NO_REASON);
                StepResult::Continue
            }
        }
    }

    /// The model after a `Sat` outcome. Covers every allocated variable.
    pub fn model(&self) -> Model {
        debug_assert!(self
            .assign
            .iter()
            .skip(1)
            .all(|&v| v != Value::Undef));
        let values = self
            .assign
            .iter()
            .map(|&v| v == Value::True)
            .collect::<Vec<bool>>();
        let model = Model::from_values(values);
        #[cfg(debug_assertions)]
        {
            // Independent re-check of every problem clause against the model.
            for clause in &self.problem_clauses {
                debug_assert!(
                    crate::check::clause_satisfied(clause, &model),
                    "model violates problem clause {:?}",
                    clause
                );
            }
        }
        model
    }
}

impl Default for Solver {
    fn default() -> Self {
        Self::new()
    }
}

enum StepResult {
    Sat,
    Unsat,
    Conflict,
    Continue,
}

/// Luby sequence: 1 1 2 1 1 2 4 1 1 2 1 1 2 4 8 ...
fn luby(i: u64) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < i + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    let mut x = i;
    let mut sz = size;
    let mut sq = seq;
    while sz - 1 != x {
        sz = (sz - 1) / 2;
        sq -= 1;
        x %= sz;
    }
    1u64 << sq
}

/// Binary max-heap over variable activities with index positions.
struct IndexedHeap {
    heap: Vec<Var>,
    position: Vec<i32>, // indexed by var id, -1 if absent
}

impl IndexedHeap {
    fn new() -> IndexedHeap {
        IndexedHeap {
            heap: Vec::new(),
            position: vec![-1],
        }
    }

    fn better(a: Var, b: Var, act: &[f64]) -> bool {
        let (aa, ab) = (act[a.index() as usize], act[b.index() as usize]);
        aa > ab || (aa == ab && a < b)
    }

    fn insert(&mut self, v: Var, act: &[f64]) {
        let vi = v.index() as usize;
        while self.position.len() <= vi {
            self.position.push(-1);
        }
        if self.position[vi] >= 0 {
            return;
        }
        self.position[vi] = self.heap.len() as i32;
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1, act);
    }

    fn update(&mut self, v: Var, act: &[f64]) {
        let vi = v.index() as usize;
        if vi < self.position.len() && self.position[vi] >= 0 {
            self.sift_up(self.position[vi] as usize, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<Var> {
        if self.heap.is_empty() {
            return None;
        }
        let top = self.heap[0];
        self.position[top.index() as usize] = -1;
        let last = self.heap.pop().unwrap();
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.position[last.index() as usize] = 0;
            self.sift_down(0, act);
        }
        Some(top)
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if Self::better(self.heap[i], self.heap[parent], act) {
                self.swap(i, parent);
                i = parent;
            } else {
                break;
            }
        }
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut best = i;
            if l < self.heap.len() && Self::better(self.heap[l], self.heap[best], act) {
                best = l;
            }
            if r < self.heap.len() && Self::better(self.heap[r], self.heap[best], act) {
                best = r;
            }
            if best == i {
                break;
            }
            self.swap(i, best);
            i = best;
        }
    }

    fn swap(&mut self, i: usize, j: usize) {
        self.heap.swap(i, j);
        self.position[self.heap[i].index() as usize] = i as i32;
        self.position[self.heap[j].index() as usize] = j as i32;
    }
}

//! Counter-based unit propagation over a fixed clause database.
//!
//! Assigning a literal is the trail form of conditioning: a clause with a
//! true literal is gone from the formula, a false literal is deleted from it.
//! Hard clauses propagate units and raise conflicts; soft clauses are only
//! counted (satisfied / falsified).

use std::time::Instant;

use crate::{Clause, Lit, Model, Var};

pub(crate) struct Engine {
    num_vars: usize,
    num_hard: usize,
    lits: Vec<Lit>,
    start: Vec<usize>,
    occ: Vec<Vec<u32>>,
    value: Vec<Option<bool>>,
    true_cnt: Vec<u32>,
    false_cnt: Vec<u32>,
    hard_satisfied: usize,
    soft_falsified: usize,
    trail: Vec<Lit>,
    pending: Vec<Lit>,
    conflict: bool,
    root_conflict: bool,
    scratch: Vec<u32>,
}

impl Engine {
    pub fn new<'a, H, S>(num_vars: usize, hard: H, soft: S) -> Engine
    where
        H: IntoIterator<Item = &'a Clause>,
        S: IntoIterator<Item = &'a Clause>,
    {
        let mut lits = Vec::new();
        let mut start = vec![0];
        let mut pending = Vec::new();
        let mut root_conflict = false;
        for c in hard {
            match c.lits() {
                [] => root_conflict = true,
                [unit] => pending.push(*unit),
                _ => {}
            }
            lits.extend_from_slice(c.lits());
            start.push(lits.len());
        }
        let num_hard = start.len() - 1;
        for c in soft {
            lits.extend_from_slice(c.lits());
            start.push(lits.len());
        }
        let num_clauses = start.len() - 1;
        let mut occ = vec![Vec::new(); 2 * num_vars];
        for ci in 0..num_clauses {
            for l in &lits[start[ci]..start[ci + 1]] {
                occ[l.code()].push(ci as u32);
            }
        }
        let mut engine = Engine {
            num_vars,
            num_hard,
            lits,
            start,
            occ,
            value: vec![None; num_vars],
            true_cnt: vec![0; num_clauses],
            false_cnt: vec![0; num_clauses],
            hard_satisfied: 0,
            soft_falsified: 0,
            trail: Vec::new(),
            pending,
            conflict: false,
            root_conflict,
            scratch: vec![0; 2 * num_vars],
        };
        // Empty soft clauses are falsified from the start.
        engine.soft_falsified = (num_hard..num_clauses)
            .filter(|&ci| engine.clause_len(ci) == 0)
            .count();
        engine
    }

    fn clause(&self, ci: usize) -> &[Lit] {
        &self.lits[self.start[ci]..self.start[ci + 1]]
    }

    fn clause_len(&self, ci: usize) -> usize {
        self.start[ci + 1] - self.start[ci]
    }

    pub fn value(&self, var: Var) -> Option<bool> {
        self.value[var as usize - 1]
    }

    pub fn lit_value(&self, lit: Lit) -> Option<bool> {
        self.value(lit.var()).map(|v| v == lit.is_positive())
    }

    pub fn trail_len(&self) -> usize {
        self.trail.len()
    }

    /// Every hard clause has a true literal.
    pub fn hard_done(&self) -> bool {
        self.hard_satisfied == self.num_hard
    }

    pub fn soft_falsified(&self) -> usize {
        self.soft_falsified
    }

    fn assign(&mut self, lit: Lit) {
        debug_assert!(self.value(lit.var()).is_none());
        self.value[lit.var() as usize - 1] = Some(lit.is_positive());
        self.trail.push(lit);
        for k in 0..self.occ[lit.code()].len() {
            let ci = self.occ[lit.code()][k] as usize;
            self.true_cnt[ci] += 1;
            if self.true_cnt[ci] == 1 && ci < self.num_hard {
                self.hard_satisfied += 1;
            }
        }
        let neg = (!lit).code();
        for k in 0..self.occ[neg].len() {
            let ci = self.occ[neg][k] as usize;
            self.false_cnt[ci] += 1;
            let len = self.clause_len(ci) as u32;
            if ci >= self.num_hard {
                if self.false_cnt[ci] == len {
                    self.soft_falsified += 1;
                }
                continue;
            }
            if self.true_cnt[ci] > 0 {
                continue;
            }
            if self.false_cnt[ci] == len {
                self.conflict = true;
            } else if self.false_cnt[ci] + 1 == len {
                let unit = self
                    .clause(ci)
                    .iter()
                    .copied()
                    .find(|l| self.value(l.var()).is_none())
                    .expect("unit clause has an unassigned literal");
                self.pending.push(unit);
            }
        }
    }

    fn unassign(&mut self) {
        let lit = self.trail.pop().expect("trail not empty");
        self.value[lit.var() as usize - 1] = None;
        for k in 0..self.occ[lit.code()].len() {
            let ci = self.occ[lit.code()][k] as usize;
            self.true_cnt[ci] -= 1;
            if self.true_cnt[ci] == 0 && ci < self.num_hard {
                self.hard_satisfied -= 1;
            }
        }
        let neg = (!lit).code();
        for k in 0..self.occ[neg].len() {
            let ci = self.occ[neg][k] as usize;
            if ci >= self.num_hard && self.false_cnt[ci] == self.clause_len(ci) as u32 {
                self.soft_falsified -= 1;
            }
            self.false_cnt[ci] -= 1;
        }
    }

    /// Makes `lit` true and queues it for propagation. If `lit` is already
    /// false this records a conflict.
    pub fn decide(&mut self, lit: Lit) {
        match self.lit_value(lit) {
            Some(true) => {}
            Some(false) => self.conflict = true,
            None => self.assign(lit),
        }
    }

    /// Exhaustive unit propagation on hard clauses. Returns `false` on
    /// conflict (some hard clause became empty).
    pub fn propagate(&mut self) -> bool {
        if self.root_conflict {
            return false;
        }
        while !self.conflict {
            let Some(lit) = self.pending.pop() else { break };
            match self.lit_value(lit) {
                Some(true) => {}
                Some(false) => self.conflict = true,
                None => self.assign(lit),
            }
        }
        !self.conflict
    }

    pub fn backtrack(&mut self, mark: usize) {
        while self.trail.len() > mark {
            self.unassign();
        }
        self.pending.clear();
        self.conflict = false;
    }

    /// Unassigned variable with the most occurrences in unsatisfied hard
    /// clauses; ties go to the smallest index.
    pub fn pick_hard_var(&mut self) -> Option<Var> {
        self.scratch.iter_mut().for_each(|c| *c = 0);
        for ci in 0..self.num_hard {
            if self.true_cnt[ci] > 0 {
                continue;
            }
            for k in self.start[ci]..self.start[ci + 1] {
                let l = self.lits[k];
                if self.value[l.var() as usize - 1].is_none() {
                    self.scratch[l.code()] += 1;
                }
            }
        }
        best_var(&self.scratch)
    }

    /// Literal counts (indexed by [`Lit::code`]) of unassigned literals in
    /// soft clauses that are neither satisfied nor falsified yet.
    fn open_soft_counts(&mut self) {
        self.scratch.iter_mut().for_each(|c| *c = 0);
        for ci in self.num_hard..self.start.len() - 1 {
            if self.true_cnt[ci] > 0 {
                continue;
            }
            for k in self.start[ci]..self.start[ci + 1] {
                let l = self.lits[k];
                if self.value[l.var() as usize - 1].is_none() {
                    self.scratch[l.code()] += 1;
                }
            }
        }
    }

    /// Unassigned variable with the most occurrences in open soft clauses.
    pub fn pick_soft_var(&mut self) -> Option<Var> {
        self.open_soft_counts();
        best_var(&self.scratch)
    }

    /// The polarity of `var` occurring in more open soft clauses (positive on
    /// ties).
    pub fn preferred_polarity(&mut self, var: Var) -> bool {
        self.open_soft_counts();
        let p = Lit::pos(var);
        self.scratch[p.code()] >= self.scratch[(!p).code()]
    }

    pub fn unassigned_vars(&self) -> impl Iterator<Item = Var> + '_ {
        (1..=self.num_vars as Var).filter(|&v| self.value(v).is_none())
    }

    /// The current assignment with every unassigned variable set to `fill`.
    pub fn model_filled(&self, fill: bool) -> Model {
        Model::new(self.value.iter().map(|v| v.unwrap_or(fill)).collect())
    }
}

fn best_var(counts: &[u32]) -> Option<Var> {
    let mut best: Option<(u32, Var)> = None;
    for (v, pair) in counts.chunks(2).enumerate() {
        let c = pair[0] + pair[1];
        if c > 0 && best.is_none_or(|(bc, _)| c > bc) {
            best = Some((c, v as Var + 1));
        }
    }
    best.map(|(_, v)| v)
}

/// Node and wall-clock limits for a search.
#[derive(Clone, Copy, Debug, Default)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub deadline: Option<Instant>,
}

impl Budget {
    pub fn unlimited() -> Budget {
        Budget::default()
    }

    /// `true` once the node count or the deadline is exhausted. The clock is
    /// only read every 256 nodes.
    pub(crate) fn exhausted(&self, nodes: u64) -> bool {
        if self.max_nodes.is_some_and(|m| nodes > m) {
            return true;
        }
        nodes.is_multiple_of(256) && self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

//! Exact partial MaxSAT: a DPLL satisfiability check, a linear
//! branch-and-bound solver, and an adapter for external solver executables.

mod external;

use serde::Serialize;

pub use crate::dpll::Budget;
use crate::dpll::Engine;
use crate::{Clause, Formula, Lit, Model};
pub use external::{external_solve, parse_solver_output, ExternalSolver};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PmsStatus {
    Optimum,
    /// A model was found but optimality was not proven.
    Satisfiable,
    UnsatHard,
    Unknown,
}

#[derive(Clone, Debug)]
pub struct SolverResult {
    pub status: PmsStatus,
    /// Number of unsatisfied soft clauses of the best model known.
    pub min_unsat: Option<usize>,
    pub witness: Option<Model>,
    /// The search or the child process was stopped by its limit.
    pub timed_out: bool,
    /// Why a result was downgraded, if it was.
    pub note: Option<String>,
}

impl SolverResult {
    fn plain(status: PmsStatus, min_unsat: Option<usize>, witness: Option<Model>) -> Self {
        SolverResult {
            status,
            min_unsat,
            witness,
            timed_out: false,
            note: None,
        }
    }
}

/// A model of `clauses` over `num_vars` variables, or `None` if there is
/// none. Branches on the variable occurring most in open clauses, true
/// first; variables left free are set to true.
pub fn sat_check(clauses: &[Clause], num_vars: usize) -> Option<Model> {
    let mut engine = Engine::new(num_vars, clauses, &[]);
    fn dfs(e: &mut Engine) -> Option<Model> {
        if !e.propagate() {
            return None;
        }
        let Some(var) = e.pick_hard_var() else {
            debug_assert!(e.hard_done());
            return Some(e.model_filled(true));
        };
        let mark = e.trail_len();
        for value in [true, false] {
            e.decide(Lit::new(var, value));
            if let Some(m) = dfs(e) {
                return Some(m);
            }
            e.backtrack(mark);
        }
        None
    }
    dfs(&mut engine)
}

/// Minimum number of unsatisfied soft clauses over all models of the hard
/// clauses, by depth-first branch-and-bound. The bound is the number of
/// soft clauses already falsified by the partial assignment.
pub fn solve_exact(formula: &Formula, budget: Budget) -> SolverResult {
    let mut search = Bnb {
        engine: Engine::new(formula.num_vars(), formula.hard(), formula.soft()),
        best: usize::MAX,
        witness: None,
        nodes: 0,
        budget,
        aborted: false,
    };
    search.run();
    let Bnb {
        best,
        witness,
        aborted,
        ..
    } = search;
    match (witness, aborted) {
        (Some(w), false) => SolverResult::plain(PmsStatus::Optimum, Some(best), Some(w)),
        (Some(w), true) => SolverResult {
            timed_out: true,
            ..SolverResult::plain(PmsStatus::Satisfiable, Some(best), Some(w))
        },
        (None, false) => SolverResult::plain(PmsStatus::UnsatHard, None, None),
        (None, true) => SolverResult {
            timed_out: true,
            ..SolverResult::plain(PmsStatus::Unknown, None, None)
        },
    }
}

struct Bnb {
    engine: Engine,
    best: usize,
    witness: Option<Model>,
    nodes: u64,
    budget: Budget,
    aborted: bool,
}

impl Bnb {
    fn run(&mut self) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.budget.exhausted(self.nodes) {
            self.aborted = true;
            return;
        }
        if !self.engine.propagate() {
            return;
        }
        if self.engine.soft_falsified() >= self.best {
            return;
        }
        let var = if self.engine.hard_done() {
            self.engine.pick_soft_var()
        } else {
            self.engine.pick_hard_var()
        };
        let Some(var) = var else {
            // Every hard clause holds and every soft clause is decided.
            self.best = self.engine.soft_falsified();
            self.witness = Some(self.engine.model_filled(true));
            return;
        };
        let first = self.engine.preferred_polarity(var);
        let mark = self.engine.trail_len();
        for value in [first, !first] {
            self.engine.decide(Lit::new(var, value));
            self.run();
            self.engine.backtrack(mark);
            if self.aborted || self.best == 0 {
                return;
            }
        }
    }
}

//! The expanding encoding.
//!
//! A top-k instance over `n` variables becomes one partial MaxSAT formula
//! over `k·n` variables: copy `j` of variable `x_i` is expanded variable
//! `(j-1)·n + i`. Each hard clause is repeated once per copy, and each soft
//! clause becomes the disjunction of its `k` copies, so a soft clause counts
//! as satisfied when any of the `k` decoded models satisfies it.

use crate::pms::sat_check;
use crate::{
    coverage, Clause, Error, Formula, Lit, Model, Result, SolveStatus, TopKInstance, TopKSolution,
    Var,
};

/// Bijection between `(original variable, copy)` pairs and expanded
/// variables, copy-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VarMap {
    n: usize,
    k: usize,
}

impl VarMap {
    pub fn new(n: usize, k: usize) -> VarMap {
        VarMap { n, k }
    }

    pub fn num_original(&self) -> usize {
        self.n
    }

    pub fn copies(&self) -> usize {
        self.k
    }

    pub fn num_expanded(&self) -> usize {
        self.n * self.k
    }

    /// Expanded index of copy `copy` (1-based) of `var`.
    pub fn expanded(&self, var: Var, copy: usize) -> Var {
        assert!(var >= 1 && var as usize <= self.n && copy >= 1 && copy <= self.k);
        ((copy - 1) * self.n) as Var + var
    }

    /// `(original variable, copy)` of an expanded index.
    pub fn original(&self, expanded: Var) -> (Var, usize) {
        assert!(expanded >= 1 && expanded as usize <= self.num_expanded());
        let e = expanded as usize - 1;
        ((e % self.n) as Var + 1, e / self.n + 1)
    }

    fn lit(&self, lit: Lit, copy: usize) -> Lit {
        Lit::new(self.expanded(lit.var(), copy), lit.is_positive())
    }

    /// `c eemap <orig> <copy> <expanded>` comment bodies, one per expanded
    /// variable in ascending expanded order.
    pub fn to_comments(&self) -> Vec<String> {
        (1..=self.num_expanded() as Var)
            .map(|e| {
                let (v, j) = self.original(e);
                format!("eemap {v} {j} {e}")
            })
            .collect()
    }

    /// Recovers the map from `eemap` comment bodies. Returns `None` when no
    /// such comments exist; fails if they do not describe a copy-major map.
    pub fn from_comments<S: AsRef<str>>(comments: &[S]) -> Result<Option<VarMap>> {
        let mut entries = Vec::new();
        for c in comments {
            let mut it = c.as_ref().split_whitespace();
            if it.next() != Some("eemap") {
                continue;
            }
            let nums: Vec<usize> = it
                .map(|t| t.parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Invalid(format!("malformed eemap comment `{}`", c.as_ref())))?;
            if nums.len() != 3 {
                return Err(Error::Invalid(format!(
                    "malformed eemap comment `{}`",
                    c.as_ref()
                )));
            }
            entries.push((nums[0], nums[1], nums[2]));
        }
        if entries.is_empty() {
            return Ok(None);
        }
        let n = entries.iter().map(|e| e.0).max().unwrap_or(0);
        let k = entries.iter().map(|e| e.1).max().unwrap_or(0);
        let map = VarMap::new(n, k);
        let consistent = entries.len() == n * k
            && entries
                .iter()
                .all(|&(v, j, e)| v >= 1 && j >= 1 && map.expanded(v as Var, j) as usize == e);
        if !consistent {
            return Err(Error::Invalid(
                "eemap comments do not form a copy-major map".into(),
            ));
        }
        Ok(Some(map))
    }
}

/// Expands a top-k instance into a partial MaxSAT formula with `k·n`
/// variables, `k·m` hard clauses and `m′` soft clauses.
pub fn ee_encode(inst: &TopKInstance) -> (Formula, VarMap) {
    let f = &inst.formula;
    let k = inst.k();
    let map = VarMap::new(f.num_vars(), k);
    let mut out = Formula::new(map.num_expanded());
    for c in f.hard() {
        for j in 1..=k {
            let copy = Clause::from_lits(c.lits().iter().map(|&l| map.lit(l, j)))
                .expect("copy of a clause without complementary literals");
            out.push_hard(copy)
                .expect("expanded variables are in range");
        }
    }
    for c in f.soft() {
        let wide =
            Clause::from_lits((1..=k).flat_map(|j| c.lits().iter().map(move |&l| map.lit(l, j))))
                .expect("copies use disjoint variables");
        out.push_soft(wide)
            .expect("expanded variables are in range");
    }
    (out, map)
}

/// Splits an assignment of the expanded formula into `k` models of the
/// original one. Duplicate models are kept.
pub fn ee_decode(
    assignment: &Model,
    map: &VarMap,
    formula: &Formula,
    status: SolveStatus,
) -> Result<TopKSolution> {
    if assignment.num_vars() != map.num_expanded() {
        return Err(Error::ModelSize {
            expected: map.num_expanded(),
            got: assignment.num_vars(),
        });
    }
    let models: Vec<Model> = (1..=map.copies())
        .map(|j| {
            Model::new(
                (1..=map.num_original() as Var)
                    .map(|v| assignment.value(map.expanded(v, j)))
                    .collect(),
            )
        })
        .collect();
    for (j, m) in models.iter().enumerate() {
        if let Some(c) = formula.first_violated_hard(m) {
            return Err(Error::HardViolated {
                clause: c * map.copies() + j,
            });
        }
    }
    TopKSolution::from_models(formula, map.copies(), models, status)
}

/// Extends `model` to a maximal solution. Soft clauses are visited in index
/// order; an unsatisfied one is committed when the hard clauses, the soft
/// clauses already satisfied and it are jointly satisfiable, and the model
/// returned by `sat` replaces the current one.
///
/// `sat` receives a variable count and a clause list and returns a model or
/// `None` if the clauses are unsatisfiable.
pub fn grow_to_maximal<S>(formula: &Formula, model: &Model, mut sat: S) -> Result<Model>
where
    S: FnMut(usize, &[Clause]) -> Result<Option<Model>>,
{
    let mut current = model.clone();
    let mut covered = coverage(formula, &current)?;
    for (i, clause) in formula.soft().iter().enumerate() {
        if covered.contains(i) {
            continue;
        }
        let mut query: Vec<Clause> = formula.hard().to_vec();
        query.extend(covered.iter().map(|s| formula.soft()[s].clone()));
        query.push(clause.clone());
        if let Some(witness) = sat(formula.num_vars(), &query)? {
            let grown = coverage(formula, &witness)?;
            if !covered.is_subset(&grown) || !grown.contains(i) {
                return Err(Error::Inconsistent(
                    "satisfiability oracle returned a model of a different query".into(),
                ));
            }
            current = witness;
            covered = grown;
        }
    }
    Ok(current)
}

/// [`grow_to_maximal`] backed by the built-in DPLL check.
pub fn maximalize(formula: &Formula, model: &Model) -> Result<Model> {
    grow_to_maximal(formula, model, |n, clauses| Ok(sat_check(clauses, n)))
}

/// Maximalizes every model of a solution and recomputes its coverage.
pub fn maximalize_solution(formula: &Formula, sol: &TopKSolution) -> Result<TopKSolution> {
    let models = sol
        .models
        .iter()
        .map(|m| maximalize(formula, m))
        .collect::<Result<Vec<_>>>()?;
    TopKSolution::from_models(formula, sol.k, models, sol.status)
}

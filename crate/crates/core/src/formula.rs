//! Literals, clauses, partial MaxSAT formulas, assignments and coverage.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Not;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// 1-based variable index.
pub type Var = u32;

/// A literal in DIMACS encoding: `v` is the positive literal of variable `v`,
/// `-v` its negation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(i32);

impl Lit {
    pub fn new(var: Var, positive: bool) -> Lit {
        assert!(
            var >= 1 && var <= i32::MAX as u32,
            "variable index out of range"
        );
        let v = var as i32;
        Lit(if positive { v } else { -v })
    }

    pub fn pos(var: Var) -> Lit {
        Lit::new(var, true)
    }

    pub fn neg(var: Var) -> Lit {
        Lit::new(var, false)
    }

    /// `None` for 0.
    pub fn from_dimacs(value: i32) -> Option<Lit> {
        (value != 0 && value != i32::MIN).then_some(Lit(value))
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }

    pub fn var(self) -> Var {
        self.0.unsigned_abs()
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    /// Dense index usable for per-literal tables: `2(v-1)` for `v`, `2(v-1)+1`
    /// for `-v`.
    pub fn code(self) -> usize {
        2 * (self.var() as usize - 1) + usize::from(!self.is_positive())
    }

    /// Truth value under a total model.
    pub fn eval(self, model: &Model) -> bool {
        model.value(self.var()) == self.is_positive()
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "x{}", self.var())
        } else {
            write!(f, "¬x{}", self.var())
        }
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A disjunction of literals with no repeated literal.
///
/// Clauses built from input never contain both `x` and `¬x`; see
/// [`Clause::from_lits`]. An empty clause only arises from conditioning and
/// stands for a falsified clause.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Clause(Vec<Lit>);

impl Clause {
    /// Builds a clause, removing repeated literals (first occurrence wins).
    /// Returns `None` if the literals form a tautology.
    pub fn from_lits<I: IntoIterator<Item = Lit>>(lits: I) -> Option<Clause> {
        let mut out: Vec<Lit> = Vec::new();
        for lit in lits {
            if out.contains(&!lit) {
                return None;
            }
            if !out.contains(&lit) {
                out.push(lit);
            }
        }
        Some(Clause(out))
    }

    /// Like [`Clause::from_lits`] but from DIMACS integers; panics on 0.
    pub fn from_dimacs(lits: &[i32]) -> Option<Clause> {
        Clause::from_lits(
            lits.iter()
                .map(|&l| Lit::from_dimacs(l).expect("0 is not a literal")),
        )
    }

    pub fn empty() -> Clause {
        Clause(Vec::new())
    }

    pub fn lits(&self) -> &[Lit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.0.contains(&lit)
    }

    pub fn is_satisfied(&self, model: &Model) -> bool {
        self.0.iter().any(|l| l.eval(model))
    }

    pub fn max_var(&self) -> Var {
        self.0.iter().map(|l| l.var()).max().unwrap_or(0)
    }

    pub fn to_dimacs(&self) -> Vec<i32> {
        self.0.iter().map(|l| l.to_dimacs()).collect()
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "⊥");
        }
        for (i, lit) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "∨")?;
            }
            write!(f, "{lit:?}")?;
        }
        Ok(())
    }
}

/// `clauses` conditioned on `lit` being true: clauses containing `lit` are
/// removed and `¬lit` is deleted from the rest. May produce empty clauses.
pub fn condition(clauses: &[Clause], lit: Lit) -> Vec<Clause> {
    clauses
        .iter()
        .filter(|c| !c.contains(lit))
        .map(|c| Clause(c.0.iter().copied().filter(|&l| l != !lit).collect()))
        .collect()
}

/// Hard clauses plus unit-weight soft clauses over `num_vars` variables.
///
/// Soft clauses are identified by their position in [`Formula::soft`]; that
/// 0-based index is what a [`CoverageSet`] stores. Duplicate soft clauses are
/// distinct entries.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Formula {
    num_vars: usize,
    hard: Vec<Clause>,
    soft: Vec<Clause>,
}

impl Formula {
    pub fn new(num_vars: usize) -> Formula {
        Formula {
            num_vars,
            hard: Vec::new(),
            soft: Vec::new(),
        }
    }

    /// Builds a formula from already-validated clauses.
    pub fn from_clauses(num_vars: usize, hard: Vec<Clause>, soft: Vec<Clause>) -> Result<Formula> {
        let mut f = Formula::new(num_vars);
        for c in hard {
            f.push_hard(c)?;
        }
        for c in soft {
            f.push_soft(c)?;
        }
        Ok(f)
    }

    /// Builds a formula from DIMACS integer clauses, dropping tautologies.
    pub fn from_dimacs(num_vars: usize, hard: &[&[i32]], soft: &[&[i32]]) -> Result<Formula> {
        let mut f = Formula::new(num_vars);
        for c in hard {
            f.add_hard(c.iter().map(|&l| lit_or_panic(l)))?;
        }
        for c in soft {
            f.add_soft(c.iter().map(|&l| lit_or_panic(l)))?;
        }
        Ok(f)
    }

    /// Adds a hard clause. Returns `false` if it was a tautology and dropped.
    pub fn add_hard<I: IntoIterator<Item = Lit>>(&mut self, lits: I) -> Result<bool> {
        match Clause::from_lits(lits) {
            Some(c) => self.push_hard(c).map(|_| true),
            None => Ok(false),
        }
    }

    /// Adds a soft clause. Returns `false` if it was a tautology and dropped.
    pub fn add_soft<I: IntoIterator<Item = Lit>>(&mut self, lits: I) -> Result<bool> {
        match Clause::from_lits(lits) {
            Some(c) => self.push_soft(c).map(|_| true),
            None => Ok(false),
        }
    }

    pub fn push_hard(&mut self, clause: Clause) -> Result<()> {
        self.check_vars(&clause)?;
        self.hard.push(clause);
        Ok(())
    }

    pub fn push_soft(&mut self, clause: Clause) -> Result<()> {
        self.check_vars(&clause)?;
        self.soft.push(clause);
        Ok(())
    }

    fn check_vars(&self, clause: &Clause) -> Result<()> {
        let var = clause.max_var();
        if var as usize > self.num_vars {
            return Err(Error::VarOutOfRange {
                var,
                num_vars: self.num_vars,
            });
        }
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn hard(&self) -> &[Clause] {
        &self.hard
    }

    pub fn soft(&self) -> &[Clause] {
        &self.soft
    }

    pub fn num_hard(&self) -> usize {
        self.hard.len()
    }

    pub fn num_soft(&self) -> usize {
        self.soft.len()
    }

    /// Index of the first hard clause `model` falsifies.
    pub fn first_violated_hard(&self, model: &Model) -> Option<usize> {
        self.hard.iter().position(|c| !c.is_satisfied(model))
    }

    /// Number of soft clauses `model` leaves unsatisfied.
    pub fn unsat_soft_count(&self, model: &Model) -> usize {
        self.soft.iter().filter(|c| !c.is_satisfied(model)).count()
    }

    /// Marks every variable occurring in a soft clause.
    pub fn soft_vars(&self) -> Vec<Var> {
        let mut seen = vec![false; self.num_vars + 1];
        for c in &self.soft {
            for l in c.lits() {
                seen[l.var() as usize] = true;
            }
        }
        (1..=self.num_vars as Var)
            .filter(|&v| seen[v as usize])
            .collect()
    }
}

fn lit_or_panic(l: i32) -> Lit {
    Lit::from_dimacs(l).expect("0 is not a literal")
}

/// A partial truth assignment.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Assignment(Vec<Option<bool>>);

impl Assignment {
    pub fn unassigned(num_vars: usize) -> Assignment {
        Assignment(vec![None; num_vars])
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, var: Var) -> Option<bool> {
        self.0[var as usize - 1]
    }

    pub fn set(&mut self, var: Var, value: Option<bool>) {
        self.0[var as usize - 1] = value;
    }

    /// Makes `lit` true.
    pub fn assign(&mut self, lit: Lit) {
        self.set(lit.var(), Some(lit.is_positive()));
    }

    pub fn assigned_lits(&self) -> impl Iterator<Item = Lit> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|b| Lit::new(i as Var + 1, b)))
    }

    /// The total model, if no variable is unassigned.
    pub fn to_model(&self) -> Option<Model> {
        self.0
            .iter()
            .copied()
            .collect::<Option<Vec<bool>>>()
            .map(Model)
    }
}

impl From<&Model> for Assignment {
    fn from(m: &Model) -> Self {
        Assignment(m.0.iter().map(|&b| Some(b)).collect())
    }
}

/// A total truth assignment over variables `1..=n`.
///
/// Ordered lexicographically with `false < true` on variable 1 first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Model(Vec<bool>);

impl Model {
    pub fn new(values: Vec<bool>) -> Model {
        Model(values)
    }

    pub fn all(num_vars: usize, value: bool) -> Model {
        Model(vec![value; num_vars])
    }

    /// From DIMACS literals; every variable in `1..=num_vars` not mentioned
    /// is false.
    pub fn from_dimacs(num_vars: usize, lits: &[i32]) -> Result<Model> {
        let mut values = vec![false; num_vars];
        for &l in lits {
            let lit = Lit::from_dimacs(l).ok_or_else(|| Error::Invalid("literal 0".into()))?;
            let v = lit.var() as usize;
            if v > num_vars {
                return Err(Error::VarOutOfRange {
                    var: lit.var(),
                    num_vars,
                });
            }
            values[v - 1] = lit.is_positive();
        }
        Ok(Model(values))
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    pub fn value(&self, var: Var) -> bool {
        self.0[var as usize - 1]
    }

    pub fn set(&mut self, var: Var, value: bool) {
        self.0[var as usize - 1] = value;
    }

    pub fn values(&self) -> &[bool] {
        &self.0
    }

    /// Signed DIMACS literals, one per variable.
    pub fn to_dimacs(&self) -> Vec<i32> {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &b)| if b { i as i32 + 1 } else { -(i as i32 + 1) })
            .collect()
    }
}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, &b) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", if b { 'T' } else { 'F' })?;
        }
        write!(f, ")")
    }
}

/// A set of 0-based soft clause indices drawn from a universe of size `m′`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CoverageSet {
    universe: usize,
    words: Vec<u64>,
}

impl CoverageSet {
    pub fn new(universe: usize) -> CoverageSet {
        CoverageSet {
            universe,
            words: vec![0; universe.div_ceil(64)],
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(universe: usize, indices: I) -> CoverageSet {
        let mut s = CoverageSet::new(universe);
        for i in indices {
            s.insert(i);
        }
        s
    }

    pub fn full(universe: usize) -> CoverageSet {
        CoverageSet::from_indices(universe, 0..universe)
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn insert(&mut self, index: usize) {
        assert!(
            index < self.universe,
            "soft index {index} outside universe {}",
            self.universe
        );
        self.words[index / 64] |= 1 << (index % 64);
    }

    pub fn contains(&self, index: usize) -> bool {
        index < self.universe && self.words[index / 64] & (1 << (index % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn union_with(&mut self, other: &CoverageSet) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn union(&self, other: &CoverageSet) -> CoverageSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn is_subset(&self, other: &CoverageSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    /// `|self \ other|`.
    pub fn difference_len(&self, other: &CoverageSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & !b).count_ones() as usize)
            .sum()
    }

    /// Indices in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + bit)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl Ord for CoverageSet {
    /// Lexicographic on the ascending index sequence.
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for CoverageSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for CoverageSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Soft clauses satisfied by `model`, which must be total and satisfy every
/// hard clause.
pub fn coverage(formula: &Formula, model: &Model) -> Result<CoverageSet> {
    if model.num_vars() != formula.num_vars() {
        return Err(Error::ModelSize {
            expected: formula.num_vars(),
            got: model.num_vars(),
        });
    }
    if let Some(clause) = formula.first_violated_hard(model) {
        return Err(Error::HardViolated { clause });
    }
    Ok(CoverageSet::from_indices(
        formula.num_soft(),
        formula
            .soft()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_satisfied(model))
            .map(|(i, _)| i),
    ))
}

/// A diversified top-k problem: a formula and the number of solutions wanted.
#[derive(Clone, Debug)]
pub struct TopKInstance {
    pub formula: Formula,
    k: usize,
}

impl TopKInstance {
    pub fn new(formula: Formula, k: usize) -> Result<TopKInstance> {
        if k == 0 {
            return Err(Error::InvalidK);
        }
        Ok(TopKInstance { formula, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    Feasible,
    InfeasibleHard,
    Unknown,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::InfeasibleHard => "infeasible-hard",
            SolveStatus::Unknown => "unknown",
        })
    }
}

/// A set of at most `k` models and the soft clauses their union satisfies.
#[derive(Clone, Debug)]
pub struct TopKSolution {
    pub k: usize,
    pub models: Vec<Model>,
    pub covered: CoverageSet,
    pub objective: usize,
    pub uncovered: usize,
    pub status: SolveStatus,
}

impl TopKSolution {
    /// Recomputes coverage from `models`; fails if one violates a hard clause.
    pub fn from_models(
        formula: &Formula,
        k: usize,
        models: Vec<Model>,
        status: SolveStatus,
    ) -> Result<TopKSolution> {
        if models.len() > k {
            return Err(Error::Inconsistent(format!(
                "{} models for k = {k}",
                models.len()
            )));
        }
        let mut covered = CoverageSet::new(formula.num_soft());
        for m in &models {
            covered.union_with(&coverage(formula, m)?);
        }
        let objective = covered.len();
        Ok(TopKSolution {
            k,
            models,
            covered,
            objective,
            uncovered: formula.num_soft() - objective,
            status,
        })
    }

    /// The solution for an instance whose hard clauses are unsatisfiable.
    pub fn infeasible(formula: &Formula, k: usize) -> TopKSolution {
        TopKSolution {
            k,
            models: Vec::new(),
            covered: CoverageSet::new(formula.num_soft()),
            objective: 0,
            uncovered: formula.num_soft(),
            status: SolveStatus::InfeasibleHard,
        }
    }

    pub fn distinct_models(&self) -> usize {
        let mut ms: Vec<&Model> = self.models.iter().collect();
        ms.sort();
        ms.dedup();
        ms.len()
    }

    /// Re-derives everything from the models and checks it against the
    /// recorded fields.
    pub fn verify(&self, formula: &Formula) -> Result<()> {
        let fresh = TopKSolution::from_models(formula, self.k, self.models.clone(), self.status)?;
        if fresh.covered != self.covered {
            return Err(Error::Inconsistent(format!(
                "recorded coverage {:?} differs from recomputed {:?}",
                self.covered, fresh.covered
            )));
        }
        if self.objective != fresh.objective
            || self.objective + self.uncovered != formula.num_soft()
        {
            return Err(Error::Inconsistent(format!(
                "objective {} / uncovered {} do not match {} soft clauses covered of {}",
                self.objective,
                self.uncovered,
                fresh.objective,
                formula.num_soft()
            )));
        }
        if (self.status == SolveStatus::InfeasibleHard) != self.models.is_empty() {
            return Err(Error::Inconsistent(
                "infeasible-hard status must coincide with an empty model list".into(),
            ));
        }
        Ok(())
    }
}

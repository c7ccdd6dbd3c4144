//! Exact diversified top-k solving by model enumeration followed by
//! maximum k-coverage.
//!
//! [`me_enumerate`] lists every model of the hard clauses by unit
//! propagation and two-way branching. [`mkc`] then chooses at most `k` of
//! them so that the union of their satisfied soft clauses is largest, by
//! include/exclude branching on models.

use std::time::Instant;

use log::debug;

use crate::dpll::{Budget, Engine};
use crate::ee::maximalize;
use crate::{
    Assignment, Clause, CoverageSet, Error, Lit, Model, Result, SolveStatus, TopKInstance,
    TopKSolution, Var,
};

pub const DEFAULT_MODEL_CAP: usize = 1_000_000;

/// Distinct models of a set of hard clauses.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModelSet {
    pub models: Vec<Model>,
}

impl ModelSet {
    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    /// Soft clauses satisfied by each model, in model order.
    pub fn coverages(&self, soft: &[Clause]) -> Vec<CoverageSet> {
        self.models.iter().map(|m| soft_coverage(soft, m)).collect()
    }
}

fn soft_coverage(soft: &[Clause], model: &Model) -> CoverageSet {
    CoverageSet::from_indices(
        soft.len(),
        soft.iter()
            .enumerate()
            .filter(|(_, c)| c.is_satisfied(model))
            .map(|(i, _)| i),
    )
}

#[derive(Clone, Copy, Debug)]
pub struct EnumOptions {
    pub cap: usize,
    pub budget: Budget,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            cap: DEFAULT_MODEL_CAP,
            budget: Budget::unlimited(),
        }
    }
}

/// Every model of `hard` over `num_vars` variables that extends `partial`.
///
/// When all hard clauses are satisfied with variables still unassigned,
/// the unassigned members of `all_vars` are expanded both ways and any other
/// unassigned variable is set to true. With `all_vars = 1..=n` the result is
/// exactly the set of total models.
pub fn me_enumerate(
    num_vars: usize,
    hard: &[Clause],
    partial: &Assignment,
    all_vars: &[Var],
    opts: EnumOptions,
) -> Result<ModelSet> {
    let mut engine = Engine::new(num_vars, hard, &[]);
    for lit in partial.assigned_lits() {
        engine.decide(lit);
    }
    let mut expand = vec![false; num_vars + 1];
    for &v in all_vars {
        expand[v as usize] = true;
    }
    let mut me = Enumerator {
        engine,
        expand,
        out: Vec::new(),
        opts,
        nodes: 0,
    };
    me.run()?;
    Ok(ModelSet { models: me.out })
}

struct Enumerator {
    engine: Engine,
    expand: Vec<bool>,
    out: Vec<Model>,
    opts: EnumOptions,
    nodes: u64,
}

impl Enumerator {
    fn run(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.opts.budget.exhausted(self.nodes) {
            return Err(Error::Timeout);
        }
        if !self.engine.propagate() {
            return Ok(());
        }
        if self.engine.hard_done() {
            return self.complete();
        }
        let var = self
            .engine
            .pick_hard_var()
            .expect("an unsatisfied hard clause has free variables after propagation");
        let mark = self.engine.trail_len();
        for value in [true, false] {
            self.engine.decide(Lit::new(var, value));
            self.run()?;
            self.engine.backtrack(mark);
        }
        Ok(())
    }

    fn complete(&mut self) -> Result<()> {
        let base = self.engine.model_filled(true);
        let free: Vec<Var> = self
            .engine
            .unassigned_vars()
            .filter(|&v| self.expand[v as usize])
            .collect();
        let total = 1u128 << free.len().min(127);
        if self.out.len() as u128 + total > self.opts.cap as u128 {
            return Err(Error::EnumerationOverflow { cap: self.opts.cap });
        }
        // Free variables count down from all-true, the first one slowest.
        for mask in 0..(1u64 << free.len()) {
            let mut m = base.clone();
            for (i, &v) in free.iter().enumerate() {
                if mask >> (free.len() - 1 - i) & 1 == 1 {
                    m.set(v, false);
                }
            }
            self.out.push(m);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct MkcOptions {
    /// Drop models whose coverage is contained in another's before search.
    pub dominance: bool,
    /// Prune with the sum of the largest residual gains.
    pub bound: bool,
    pub budget: Budget,
}

impl Default for MkcOptions {
    fn default() -> Self {
        MkcOptions {
            dominance: true,
            bound: true,
            budget: Budget::unlimited(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MkcResult {
    /// Soft clauses covered by the committed models plus the chosen ones.
    pub best_count: usize,
    /// Indices into the model set, in selection order.
    pub chosen: Vec<usize>,
}

/// Picks at most `k` models from `models` maximising the number of distinct
/// soft clauses satisfied by them together with the `committed` models.
pub fn mkc(
    soft: &[Clause],
    models: &ModelSet,
    k: usize,
    committed: &[Model],
    opts: MkcOptions,
) -> Result<MkcResult> {
    let mut covered = CoverageSet::new(soft.len());
    for m in committed {
        covered.union_with(&soft_coverage(soft, m));
    }
    let coverages = models.coverages(soft);
    let order = candidate_order(&models.models, &coverages, opts.dominance);
    debug!(
        "mkc: {} models, {} candidates after reduction, k = {k}",
        models.len(),
        order.len()
    );
    let cands: Vec<CoverageSet> = order.iter().map(|&i| coverages[i].clone()).collect();
    let mut search = CoverSearch {
        cands: &cands,
        universe: soft.len(),
        bound: opts.bound,
        budget: opts.budget,
        nodes: 0,
        best: covered.len(),
        best_pick: Vec::new(),
        pick: Vec::new(),
        gains: Vec::new(),
    };
    let start = covered.len();
    search.run(0, k, &covered, start)?;
    Ok(MkcResult {
        best_count: search.best,
        chosen: search.best_pick.iter().map(|&c| order[c]).collect(),
    })
}

/// Model indices to branch on: by descending coverage size, then by model
/// order (`false < true` at the first differing variable). With `dominance`
/// only one model per distinct set-maximal coverage set remains.
fn candidate_order(models: &[Model], coverages: &[CoverageSet], dominance: bool) -> Vec<usize> {
    let mut order: Vec<usize> = (0..models.len()).collect();
    order.sort_by(|&a, &b| {
        coverages[b]
            .len()
            .cmp(&coverages[a].len())
            .then_with(|| models[a].cmp(&models[b]))
    });
    if !dominance {
        return order;
    }
    // Processing by descending size, a set can only be dominated by one kept
    // earlier; an equal set counts as dominated.
    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        if !kept.iter().any(|&j| coverages[i].is_subset(&coverages[j])) {
            kept.push(i);
        }
    }
    kept
}

struct CoverSearch<'a> {
    cands: &'a [CoverageSet],
    universe: usize,
    bound: bool,
    budget: Budget,
    nodes: u64,
    best: usize,
    best_pick: Vec<usize>,
    pick: Vec<usize>,
    gains: Vec<usize>,
}

impl CoverSearch<'_> {
    fn run(
        &mut self,
        pos: usize,
        k_left: usize,
        covered: &CoverageSet,
        count: usize,
    ) -> Result<()> {
        self.nodes += 1;
        if self.budget.exhausted(self.nodes) {
            return Err(Error::Timeout);
        }
        if count > self.best {
            self.best = count;
            self.best_pick = self.pick.clone();
        }
        if k_left == 0 || pos == self.cands.len() || self.best == self.universe {
            return Ok(());
        }
        if self.bound && count + self.top_gains(pos, k_left, covered) <= self.best {
            return Ok(());
        }
        let gain = self.cands[pos].difference_len(covered);
        if gain > 0 {
            let next = covered.union(&self.cands[pos]);
            self.pick.push(pos);
            self.run(pos + 1, k_left - 1, &next, count + gain)?;
            self.pick.pop();
        }
        self.run(pos + 1, k_left, covered, count)
    }

    /// Sum of the `k` largest residual gains among candidates from `pos`.
    fn top_gains(&mut self, pos: usize, k: usize, covered: &CoverageSet) -> usize {
        self.gains.clear();
        self.gains
            .extend(self.cands[pos..].iter().map(|c| c.difference_len(covered)));
        if self.gains.len() > k {
            self.gains.select_nth_unstable_by(k - 1, |a, b| b.cmp(a));
            self.gains.truncate(k);
        }
        self.gains.iter().sum()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct MemkcOptions {
    pub cap: usize,
    /// Grow the chosen models to maximal solutions.
    pub maximalize: bool,
    pub dominance: bool,
    pub deadline: Option<Instant>,
}

impl Default for MemkcOptions {
    fn default() -> Self {
        MemkcOptions {
            cap: DEFAULT_MODEL_CAP,
            maximalize: true,
            dominance: true,
            deadline: None,
        }
    }
}

/// Solves a top-k instance exactly: enumerate the models of the hard
/// clauses, select by maximum coverage, then maximalize the selection.
///
/// Only variables that occur in soft clauses are expanded when the hard
/// clauses are already satisfied; the rest are fixed to true, which leaves
/// the set of reachable coverage sets unchanged.
pub fn memkc_solve(inst: &TopKInstance, opts: MemkcOptions) -> Result<TopKSolution> {
    let f = &inst.formula;
    let budget = Budget {
        max_nodes: None,
        deadline: opts.deadline,
    };
    let models = me_enumerate(
        f.num_vars(),
        f.hard(),
        &Assignment::unassigned(f.num_vars()),
        &f.soft_vars(),
        EnumOptions {
            cap: opts.cap,
            budget,
        },
    )?;
    debug!("memkc: enumerated {} models", models.len());
    if models.is_empty() {
        return Ok(TopKSolution::infeasible(f, inst.k()));
    }
    let result = mkc(
        f.soft(),
        &models,
        inst.k(),
        &[],
        MkcOptions {
            dominance: opts.dominance,
            bound: true,
            budget,
        },
    )?;
    let mut chosen: Vec<Model> = result
        .chosen
        .iter()
        .map(|&i| models.models[i].clone())
        .collect();
    if chosen.is_empty() {
        // Nothing to cover: any single model is an optimal answer.
        let coverages = models.coverages(f.soft());
        chosen.push(models.models[candidate_order(&models.models, &coverages, true)[0]].clone());
    }
    if opts.maximalize {
        chosen = chosen
            .iter()
            .map(|m| maximalize(f, m))
            .collect::<Result<_>>()?;
    }
    let sol = TopKSolution::from_models(f, inst.k(), chosen, SolveStatus::Optimal)?;
    if sol.objective != result.best_count {
        return Err(Error::Inconsistent(format!(
            "selection covers {} soft clauses, search reported {}",
            sol.objective, result.best_count
        )));
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Formula;

    fn exactly_one() -> Formula {
        Formula::from_dimacs(2, &[&[1, 2], &[-1, -2]], &[&[1], &[2]]).unwrap()
    }

    fn all(f: &Formula) -> ModelSet {
        let vars: Vec<Var> = (1..=f.num_vars() as Var).collect();
        me_enumerate(
            f.num_vars(),
            f.hard(),
            &Assignment::unassigned(f.num_vars()),
            &vars,
            EnumOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn enumerate_examples() {
        let f = exactly_one();
        let mut ms = all(&f).models;
        ms.sort();
        assert_eq!(
            ms,
            vec![Model::new(vec![false, true]), Model::new(vec![true, false])]
        );

        let contra = Formula::from_dimacs(1, &[&[1], &[-1]], &[]).unwrap();
        assert!(all(&contra).is_empty());

        let free = Formula::from_dimacs(1, &[], &[&[1]]).unwrap();
        let ms = me_enumerate(
            1,
            &[],
            &Assignment::unassigned(1),
            &free.soft_vars(),
            EnumOptions::default(),
        )
        .unwrap();
        assert_eq!(
            ms.models,
            vec![Model::new(vec![true]), Model::new(vec![false])]
        );
    }

    #[test]
    fn enumerate_respects_partial_and_fixes_unlisted() {
        let f = Formula::from_dimacs(3, &[&[1, 2]], &[&[3]]).unwrap();
        let mut s = Assignment::unassigned(3);
        s.assign(Lit::neg(1));
        let ms = me_enumerate(3, f.hard(), &s, &[3], EnumOptions::default()).unwrap();
        assert_eq!(
            ms.models,
            vec![
                Model::new(vec![false, true, true]),
                Model::new(vec![false, true, false])
            ]
        );
    }

    #[test]
    fn enumeration_cap() {
        let f = Formula::new(12);
        let vars: Vec<Var> = (1..=12).collect();
        let r = me_enumerate(
            12,
            f.hard(),
            &Assignment::unassigned(12),
            &vars,
            EnumOptions {
                cap: 1000,
                budget: Budget::unlimited(),
            },
        );
        assert!(matches!(r, Err(Error::EnumerationOverflow { cap: 1000 })));
        let inst = TopKInstance::new(Formula::from_dimacs(12, &[], &[&[1]]).unwrap(), 1).unwrap();
        // Only x1 is expanded: two models, well under the cap.
        let sol = memkc_solve(
            &inst,
            MemkcOptions {
                cap: 2,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(sol.objective, 1);
    }

    #[test]
    fn mkc_examples() {
        let f = exactly_one();
        let ms = ModelSet {
            models: vec![Model::new(vec![true, false]), Model::new(vec![false, true])],
        };
        let r = mkc(f.soft(), &ms, 2, &[], MkcOptions::default()).unwrap();
        assert_eq!(r.best_count, 2);
        let mut chosen = r.chosen.clone();
        chosen.sort();
        assert_eq!(chosen, vec![0, 1]);

        let r = mkc(f.soft(), &ms, 1, &[], MkcOptions::default()).unwrap();
        assert_eq!((r.best_count, r.chosen.len()), (1, 1));

        let r = mkc(f.soft(), &ms, 0, &[], MkcOptions::default()).unwrap();
        assert_eq!(
            r,
            MkcResult {
                best_count: 0,
                chosen: vec![]
            }
        );

        let committed = [Model::new(vec![true, false])];
        let r = mkc(f.soft(), &ms, 1, &committed, MkcOptions::default()).unwrap();
        assert_eq!((r.best_count, r.chosen.clone()), (2, vec![1]));
    }

    #[test]
    fn solve_examples() {
        let f = exactly_one();
        let sol = memkc_solve(
            &TopKInstance::new(f.clone(), 2).unwrap(),
            MemkcOptions::default(),
        )
        .unwrap();
        assert_eq!(
            (sol.objective, sol.uncovered, sol.status),
            (2, 0, SolveStatus::Optimal)
        );
        sol.verify(&f).unwrap();
        let sol = memkc_solve(&TopKInstance::new(f, 1).unwrap(), MemkcOptions::default()).unwrap();
        assert_eq!((sol.objective, sol.uncovered), (1, 1));

        let unsat = Formula::from_dimacs(1, &[&[1], &[-1]], &[&[1]]).unwrap();
        let sol = memkc_solve(
            &TopKInstance::new(unsat, 3).unwrap(),
            MemkcOptions::default(),
        )
        .unwrap();
        assert_eq!(
            (sol.status, sol.objective),
            (SolveStatus::InfeasibleHard, 0)
        );
        assert!(sol.models.is_empty());
    }

    #[test]
    fn no_soft_clauses_still_returns_a_model() {
        let f = Formula::from_dimacs(2, &[&[1, 2]], &[]).unwrap();
        let sol = memkc_solve(
            &TopKInstance::new(f.clone(), 2).unwrap(),
            MemkcOptions::default(),
        )
        .unwrap();
        assert_eq!(sol.models.len(), 1);
        sol.verify(&f).unwrap();
    }

    #[test]
    fn dominance_keeps_one_per_maximal_set() {
        let models = vec![
            Model::new(vec![false, false]),
            Model::new(vec![true, false]),
            Model::new(vec![true, true]),
            Model::new(vec![false, true]),
        ];
        let soft = vec![
            Clause::from_dimacs(&[1]).unwrap(),
            Clause::from_dimacs(&[1, 2]).unwrap(),
        ];
        let cov = ModelSet {
            models: models.clone(),
        }
        .coverages(&soft);
        // (T,F) and (T,T) both cover {0,1}; (F,F) is first but covers nothing.
        assert_eq!(candidate_order(&models, &cov, true), vec![1]);
        assert_eq!(candidate_order(&models, &cov, false), vec![1, 2, 3, 0]);
    }
}

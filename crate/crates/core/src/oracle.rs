//! Brute-force reference solvers. They scan all `2ⁿ` assignments and all
//! `k`-subsets, share no search code with the solvers they check, and are
//! only usable on small instances.

use crate::apps::Graph;
use crate::{CoverageSet, Error, Formula, Model, Result, SolveStatus, TopKInstance, TopKSolution};

pub const DEFAULT_ORACLE_CAP: usize = 20;

fn check_cap(num_vars: usize, cap: usize) -> Result<()> {
    if num_vars > cap {
        return Err(Error::OracleCap { num_vars, cap });
    }
    Ok(())
}

/// All total assignments, in binary counting order with variable 1 as the
/// most significant bit and `false` before `true`.
fn all_assignments(n: usize) -> impl Iterator<Item = Model> {
    (0..1u64 << n)
        .map(move |bits| Model::new((0..n).map(|i| bits >> (n - 1 - i) & 1 == 1).collect()))
}

fn satisfies(clause: &crate::Clause, m: &Model) -> bool {
    clause
        .lits()
        .iter()
        .any(|l| m.values()[l.var() as usize - 1] == l.is_positive())
}

/// Distinct set-maximal coverage sets over all models, each with the first
/// model (in enumeration order) achieving it, sorted by coverage set.
fn maximal_sets(f: &Formula) -> Vec<(CoverageSet, Model)> {
    let mut found: Vec<(CoverageSet, Model)> = Vec::new();
    for m in all_assignments(f.num_vars()) {
        if !f.hard().iter().all(|c| satisfies(c, &m)) {
            continue;
        }
        let cov = CoverageSet::from_indices(
            f.num_soft(),
            (0..f.num_soft()).filter(|&i| satisfies(&f.soft()[i], &m)),
        );
        if found.iter().any(|(c, _)| cov.is_subset(c)) {
            continue;
        }
        found.retain(|(c, _)| !c.is_subset(&cov));
        found.push((cov, m));
    }
    found.sort_by(|a, b| a.0.cmp(&b.0));
    found
}

/// The distinct set-maximal coverage sets of `f`, canonically ordered.
pub fn brute_coverage_sets(f: &Formula, cap: usize) -> Result<Vec<CoverageSet>> {
    check_cap(f.num_vars(), cap)?;
    Ok(maximal_sets(f).into_iter().map(|(c, _)| c).collect())
}

/// Largest union over all `min(k, len)`-subsets of `sets`, and the first
/// subset (in lexicographic index order) reaching it.
pub fn best_cover(sets: &[CoverageSet], universe: usize, k: usize) -> (usize, Vec<usize>) {
    let n = sets.len();
    let r = k.min(n);
    let mut best: Option<(usize, Vec<usize>)> = None;
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        let mut u = CoverageSet::new(universe);
        for &i in &idx {
            u.union_with(&sets[i]);
        }
        if best.as_ref().is_none_or(|b| u.len() > b.0) {
            best = Some((u.len(), idx.clone()));
        }
        let mut i = r;
        while i > 0 && idx[i - 1] == n - r + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return best.expect("at least one subset was scored");
        }
        idx[i - 1] += 1;
        for j in i..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Exact diversified top-k optimum by exhaustive search.
pub fn brute_topk(inst: &TopKInstance, cap: usize) -> Result<TopKSolution> {
    let f = &inst.formula;
    check_cap(f.num_vars(), cap)?;
    let sets = maximal_sets(f);
    if sets.is_empty() {
        return Ok(TopKSolution::infeasible(f, inst.k()));
    }
    let covers: Vec<CoverageSet> = sets.iter().map(|(c, _)| c.clone()).collect();
    let (_, pick) = best_cover(&covers, f.num_soft(), inst.k());
    let models = pick.iter().map(|&i| sets[i].1.clone()).collect();
    TopKSolution::from_models(f, inst.k(), models, SolveStatus::Optimal)
}

/// All maximal cliques of `g` by checking every vertex subset, as sorted
/// vertex lists in lexicographic order.
pub fn brute_maximal_cliques(g: &Graph, cap: usize) -> Result<Vec<Vec<u32>>> {
    let n = g.num_vertices();
    check_cap(n, cap)?;
    let is_clique = |bits: u64| {
        (0..n).all(|i| {
            bits >> i & 1 == 0
                || (i + 1..n).all(|j| bits >> j & 1 == 0 || g.has_edge(i as u32 + 1, j as u32 + 1))
        })
    };
    let mut out = Vec::new();
    for bits in 1..1u64 << n {
        if !is_clique(bits) {
            continue;
        }
        let maximal = (0..n).all(|v| bits >> v & 1 == 1 || !is_clique(bits | 1 << v));
        if maximal {
            out.push(
                (0..n)
                    .filter(|&v| bits >> v & 1 == 1)
                    .map(|v| v as u32 + 1)
                    .collect::<Vec<_>>(),
            );
        }
    }
    out.sort();
    Ok(out)
}

/// Most vertices coverable by `k` maximal cliques.
pub fn brute_clique_cover(g: &Graph, k: usize, cap: usize) -> Result<usize> {
    let cliques = brute_maximal_cliques(g, cap)?;
    let n = g.num_vertices();
    let sets: Vec<CoverageSet> = cliques
        .iter()
        .map(|c| CoverageSet::from_indices(n, c.iter().map(|&v| v as usize - 1)))
        .collect();
    Ok(best_cover(&sets, n, k).0)
}

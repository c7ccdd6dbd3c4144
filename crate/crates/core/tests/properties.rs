use std::collections::BTreeSet;

use proptest::prelude::*;

use divtopk::apps::{
    contradicts, decode_ca, encode_ca, encode_clique, enumerate_combinations, row_model, CaSpec,
    Graph,
};
use divtopk::ee::{ee_encode, maximalize};
use divtopk::memkc::{me_enumerate, mkc, EnumOptions, MkcOptions, ModelSet};
use divtopk::oracle::{best_cover, brute_coverage_sets, brute_topk, DEFAULT_ORACLE_CAP};
use divtopk::pms::{sat_check, solve_exact, Budget, PmsStatus};
use divtopk::wcnf::{parse_wcnf, write_wcnf};
use divtopk::{
    condition, coverage, Assignment, Clause, CoverageSet, Formula, Lit, Model, SolveStatus,
    TopKInstance, TopKSolution, Var,
};

fn lits(n: usize, max_len: usize) -> impl Strategy<Value = Vec<i32>> {
    prop::collection::vec((1..=n as i32, any::<bool>()), 1..=max_len)
        .prop_map(|v| v.into_iter().map(|(x, s)| if s { x } else { -x }).collect())
}

prop_compose! {
    fn formula(max_vars: usize, max_hard: usize, max_soft: usize)
        (n in 1..=max_vars)
        (hard in prop::collection::vec(lits(n, 3), 0..=max_hard),
         soft in prop::collection::vec(lits(n, 3), 0..=max_soft),
         n in Just(n)) -> Formula {
        let mut f = Formula::new(n);
        for c in hard {
            f.add_hard(c.into_iter().map(|l| Lit::from_dimacs(l).unwrap())).unwrap();
        }
        for c in soft {
            f.add_soft(c.into_iter().map(|l| Lit::from_dimacs(l).unwrap())).unwrap();
        }
        f
    }
}

fn all_models(n: usize) -> impl Iterator<Item = Model> {
    (0..1u32 << n).map(move |b| Model::new((0..n).map(|i| b >> i & 1 == 1).collect()))
}

fn models_of(n: usize, clauses: &[Clause]) -> BTreeSet<Model> {
    all_models(n)
        .filter(|m| clauses.iter().all(|c| c.is_satisfied(m)))
        .collect()
}

prop_compose! {
    fn graph(max_n: usize)(n in 1..=max_n)(
        mask in prop::collection::vec(any::<bool>(), n * (n - 1) / 2),
        n in Just(n),
    ) -> Graph {
        let mut g = Graph::new(n);
        let mut it = mask.into_iter();
        for i in 1..=n as u32 {
            for j in i + 1..=n as u32 {
                if it.next().unwrap() {
                    g.add_edge(i, j).unwrap();
                }
            }
        }
        g
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn wcnf_round_trip(f in formula(10, 12, 12)) {
        let text = write_wcnf(&f);
        let back = parse_wcnf(&text).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(write_wcnf(&back), text);
    }

    #[test]
    fn conditioning_commutes_and_keeps_models(f in formula(6, 8, 0), a in 1..=6i32, b in 1..=6i32, sa: bool, sb: bool) {
        let n = f.num_vars() as i32;
        let (a, b) = ((a - 1) % n + 1, (b - 1) % n + 1);
        prop_assume!(a != b);
        let la = Lit::from_dimacs(if sa { a } else { -a }).unwrap();
        let lb = Lit::from_dimacs(if sb { b } else { -b }).unwrap();
        let ab: BTreeSet<Clause> = condition(&condition(f.hard(), la), lb).into_iter().collect();
        let ba: BTreeSet<Clause> = condition(&condition(f.hard(), lb), la).into_iter().collect();
        prop_assert_eq!(ab, ba);
        // Models of F|l, restricted to l being true, are the models of F with l true.
        let cond = condition(f.hard(), la);
        let lhs: BTreeSet<Model> = models_of(f.num_vars(), &cond).into_iter().filter(|m| la.eval(m)).collect();
        let rhs: BTreeSet<Model> = models_of(f.num_vars(), f.hard()).into_iter().filter(|m| la.eval(m)).collect();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn enumeration_matches_truth_table(f in formula(7, 10, 0)) {
        let vars: Vec<Var> = (1..=f.num_vars() as Var).collect();
        let ms = me_enumerate(f.num_vars(), f.hard(), &Assignment::unassigned(f.num_vars()), &vars, EnumOptions::default()).unwrap();
        let got: BTreeSet<Model> = ms.models.iter().cloned().collect();
        prop_assert_eq!(got.len(), ms.len(), "duplicate models");
        prop_assert_eq!(got, models_of(f.num_vars(), f.hard()));
    }

    #[test]
    fn mkc_matches_exhaustive_and_pruning_is_sound(f in formula(6, 6, 8), k in 1..=4usize) {
        let vars: Vec<Var> = (1..=f.num_vars() as Var).collect();
        let ms = me_enumerate(f.num_vars(), f.hard(), &Assignment::unassigned(f.num_vars()), &vars, EnumOptions::default()).unwrap();
        let covs = ms.coverages(f.soft());
        let (want, _) = best_cover(&covs, f.num_soft(), k);
        let mut counts = BTreeSet::new();
        for (dominance, bound) in [(false, false), (true, false), (false, true), (true, true)] {
            let r = mkc(f.soft(), &ms, k, &[], MkcOptions { dominance, bound, budget: Budget::unlimited() }).unwrap();
            let mut u = CoverageSet::new(f.num_soft());
            for &i in &r.chosen {
                u.union_with(&covs[i]);
            }
            prop_assert!(r.chosen.len() <= k);
            prop_assert_eq!(u.len(), r.best_count);
            counts.insert(r.best_count);
        }
        prop_assert_eq!(counts.into_iter().collect::<Vec<_>>(), vec![want]);
    }

    #[test]
    fn mkc_with_committed_models(f in formula(5, 4, 6), k in 1..=3usize, pick in any::<prop::sample::Index>()) {
        let vars: Vec<Var> = (1..=f.num_vars() as Var).collect();
        let ms = me_enumerate(f.num_vars(), f.hard(), &Assignment::unassigned(f.num_vars()), &vars, EnumOptions::default()).unwrap();
        prop_assume!(!ms.is_empty());
        let committed = ms.models[pick.index(ms.len())].clone();
        let covs = ms.coverages(f.soft());
        let base = coverage(&f, &committed).unwrap();
        let want = covs.iter().map(|c| c.union(&base)).collect::<Vec<_>>();
        let (best, _) = best_cover(&want, f.num_soft(), k);
        let r = mkc(f.soft(), &ms, k, &[committed], MkcOptions::default()).unwrap();
        prop_assert_eq!(r.best_count, best);
    }

    #[test]
    fn solve_exact_matches_brute_force(f in formula(8, 12, 10)) {
        let r = solve_exact(&f, Budget::unlimited());
        let best = all_models(f.num_vars())
            .filter(|m| f.first_violated_hard(m).is_none())
            .map(|m| f.unsat_soft_count(&m))
            .min();
        match best {
            None => prop_assert_eq!(r.status, PmsStatus::UnsatHard),
            Some(b) => {
                prop_assert_eq!(r.status, PmsStatus::Optimum);
                prop_assert_eq!(r.min_unsat, Some(b));
                let w = r.witness.unwrap();
                prop_assert!(f.first_violated_hard(&w).is_none());
                prop_assert_eq!(f.unsat_soft_count(&w), b);
            }
        }
        prop_assert_eq!(sat_check(f.hard(), f.num_vars()).is_some(), best.is_some());
    }

    #[test]
    fn topk_is_monotone_and_saturates(f in formula(7, 8, 8)) {
        let sets = brute_coverage_sets(&f, DEFAULT_ORACLE_CAP).unwrap();
        prop_assume!(!sets.is_empty());
        let all = sets.iter().fold(CoverageSet::new(f.num_soft()), |a, s| a.union(s));
        let mut prev = 0;
        for k in 1..=sets.len() + 1 {
            let inst = TopKInstance::new(f.clone(), k).unwrap();
            let sol = brute_topk(&inst, DEFAULT_ORACLE_CAP).unwrap();
            let ee = f.num_soft() - solve_exact(&ee_encode(&inst).0, Budget::unlimited()).min_unsat.unwrap();
            prop_assert_eq!(ee, sol.objective);
            prop_assert!(sol.objective >= prev);
            if k >= sets.len() {
                prop_assert_eq!(sol.objective, all.len());
            }
            prev = sol.objective;
        }
        let k1 = brute_topk(&TopKInstance::new(f.clone(), 1).unwrap(), DEFAULT_ORACLE_CAP).unwrap();
        prop_assert_eq!(k1.objective, f.num_soft() - solve_exact(&f, Budget::unlimited()).min_unsat.unwrap());
    }

    #[test]
    fn growing_is_idempotent_and_maximal(f in formula(7, 8, 8), seed in any::<u32>()) {
        let models: Vec<Model> = models_of(f.num_vars(), f.hard()).into_iter().collect();
        prop_assume!(!models.is_empty());
        let m = &models[seed as usize % models.len()];
        let grown = maximalize(&f, m).unwrap();
        prop_assert!(f.first_violated_hard(&grown).is_none());
        let before = coverage(&f, m).unwrap();
        let after = coverage(&f, &grown).unwrap();
        prop_assert!(before.is_subset(&after));
        prop_assert_eq!(maximalize(&f, &grown).unwrap(), grown.clone());
        // No model covers a strict superset.
        for other in &models {
            let c = coverage(&f, other).unwrap();
            prop_assert!(!(after.is_subset(&c) && c.len() > after.len()));
        }
    }

    #[test]
    fn solutions_reverify(f in formula(6, 6, 6), k in 1..=3usize) {
        let inst = TopKInstance::new(f.clone(), k).unwrap();
        let sol = divtopk::memkc::memkc_solve(&inst, Default::default()).unwrap();
        sol.verify(&f).unwrap();
        let rebuilt = TopKSolution::from_models(&f, k, sol.models.clone(), sol.status).unwrap();
        prop_assert_eq!(rebuilt.objective, sol.objective);
        prop_assert_eq!(sol.status == SolveStatus::InfeasibleHard, models_of(f.num_vars(), f.hard()).is_empty());
    }

    #[test]
    fn clique_models_are_cliques(g in graph(8)) {
        let inst = encode_clique(&g, 1).unwrap();
        let n = g.num_vertices();
        prop_assert_eq!(inst.formula.num_hard() + g.num_edges(), n * (n - 1) / 2);
        for m in models_of(n, inst.formula.hard()) {
            let vs: Vec<u32> = (1..=n as u32).filter(|&v| m.value(v)).collect();
            for (i, &a) in vs.iter().enumerate() {
                for &b in &vs[i + 1..] {
                    prop_assert!(g.has_edge(a, b));
                }
            }
        }
    }

    #[test]
    fn ca_rows_are_models(levels in prop::collection::vec(1..=3u32, 2..=4), t in 1..=3usize, row_seed in any::<u64>()) {
        prop_assume!(t <= levels.len());
        let spec = CaSpec::new(levels.clone(), t).unwrap();
        let combos = enumerate_combinations(&spec);
        let mut count = 0usize;
        // Every t-subset of columns contributes the product of its levels.
        let m = levels.len();
        for mask in 0u32..1 << m {
            if mask.count_ones() as usize == t {
                count += (0..m).filter(|&c| mask >> c & 1 == 1).map(|c| levels[c] as usize).product::<usize>();
            }
        }
        prop_assert_eq!(combos.len(), count);
        let inst = encode_ca(&spec, 1).unwrap();
        let mut s = row_seed;
        let row: Vec<u32> = levels.iter().map(|&l| { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); ((s >> 33) % l as u64) as u32 }).collect();
        let model = row_model(&spec, &row);
        prop_assert!(inst.formula.first_violated_hard(&model).is_none());
        // A full row is a maximal solution and decodes to itself.
        prop_assert_eq!(maximalize(&inst.formula, &model).unwrap(), model.clone());
        let sol = TopKSolution::from_models(&inst.formula, 1, vec![model], SolveStatus::Optimal).unwrap();
        prop_assert_eq!(decode_ca(&sol, &spec).unwrap(), vec![row]);
        for (i, a) in combos.iter().enumerate() {
            for b in &combos[i + 1..] {
                prop_assert_eq!(contradicts(a, b), contradicts(b, a));
            }
        }
    }
}

#[test]
fn enumeration_with_partial_assignment() {
    let f = Formula::from_dimacs(3, &[&[1, 2], &[-2, 3]], &[]).unwrap();
    let mut a = Assignment::unassigned(3);
    a.assign(Lit::neg(1));
    let vars = [1, 2, 3];
    let got: BTreeSet<Model> = me_enumerate(3, f.hard(), &a, &vars, EnumOptions::default())
        .unwrap()
        .models
        .into_iter()
        .collect();
    let want: BTreeSet<Model> = models_of(3, f.hard())
        .into_iter()
        .filter(|m| !m.value(1))
        .collect();
    assert_eq!(got, want);
    let empty = ModelSet::default();
    assert!(empty.is_empty());
}

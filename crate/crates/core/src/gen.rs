//! Seeded instance generators.
//!
//! All randomness comes from SplitMix64 seeded with the user seed, and is
//! consumed in a documented order so that other implementations can
//! reproduce the same instances:
//!
//! - an index below `n` is `(u64 · n) >> 64` over the next output;
//! - a Bernoulli(`p`) draw is `(u64 >> 11) · 2⁻⁵³ < p`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::apps::Graph;
use crate::{Error, Formula, Lit, Result, Var};

struct Sampler(SplitMix64);

impl Sampler {
    fn new(seed: u64) -> Sampler {
        Sampler(SplitMix64::seed_from_u64(seed))
    }

    fn below(&mut self, n: u64) -> u64 {
        ((self.0.next_u64() as u128 * n as u128) >> 64) as u64
    }

    fn bernoulli(&mut self, p: f64) -> bool {
        ((self.0.next_u64() >> 11) as f64) * (1.0 / (1u64 << 53) as f64) < p
    }
}

/// Random partial MaxSAT instances: `num_hard` hard clauses of
/// `clause_len` distinct variables and one positive soft unit per variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomInstanceParams {
    pub num_vars: usize,
    pub num_hard: usize,
    pub clause_len: usize,
    pub seed: u64,
}

impl RandomInstanceParams {
    pub fn new(num_vars: usize, num_hard: usize, seed: u64) -> RandomInstanceParams {
        RandomInstanceParams {
            num_vars,
            num_hard,
            clause_len: 3,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.clause_len == 0 || self.clause_len > self.num_vars {
            return Err(Error::Invalid(format!(
                "clause length {} not in 1..={}",
                self.clause_len, self.num_vars
            )));
        }
        Ok(())
    }
}

/// Per clause, variables are drawn one at a time by rejection until
/// `clause_len` distinct ones are found; each is followed by one draw for
/// its sign. Literals keep their draw order.
///
/// Panics if the parameters do not pass [`RandomInstanceParams::validate`]
/// while `num_hard > 0`.
pub fn gen_random_instance(p: &RandomInstanceParams) -> Formula {
    if p.num_hard > 0 {
        p.validate().expect("invalid random instance parameters");
    }
    let mut rng = Sampler::new(p.seed);
    let mut f = Formula::new(p.num_vars);
    for _ in 0..p.num_hard {
        let mut lits: Vec<Lit> = Vec::with_capacity(p.clause_len);
        while lits.len() < p.clause_len {
            let v = rng.below(p.num_vars as u64) as Var + 1;
            if lits.iter().any(|l| l.var() == v) {
                continue;
            }
            let positive = rng.below(2) == 1;
            lits.push(Lit::new(v, positive));
        }
        f.add_hard(lits).expect("variables are in range");
    }
    for v in 1..=p.num_vars as Var {
        f.add_soft([Lit::pos(v)]).expect("variables are in range");
    }
    f
}

/// G(n, p): pairs `(i, j)` with `i < j` are visited in lexicographic order,
/// one Bernoulli draw each.
pub fn gen_random_graph(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Invalid(format!(
            "edge probability {p} not in [0, 1]"
        )));
    }
    let mut rng = Sampler::new(seed);
    let mut g = Graph::new(n);
    for i in 1..=n as u32 {
        for j in i + 1..=n as u32 {
            if rng.bernoulli(p) {
                g.add_edge(i, j)?;
            }
        }
    }
    Ok(g)
}

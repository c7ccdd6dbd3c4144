//! Diversified top-k partial MaxSAT.
//!
//! Given a partial MaxSAT formula and a bound `k`, find at most `k` maximal
//! solutions whose union satisfies the largest number of distinct soft
//! clauses. Two exact routes are provided:
//!
//! - [`ee`]: the expanding encoding, which turns the top-k problem into a
//!   single partial MaxSAT instance over `k` copies of every variable, solved
//!   with [`pms::solve_exact`] or an external MaxSAT solver;
//! - [`memkc`]: enumerate every model of the hard clauses and pick `k` of
//!   them by branch-and-bound maximum coverage.
//!
//! [`apps`] reduces diversified top-k clique and diversified top-k covering
//! arrays to the same problem, and [`oracle`] holds brute-force reference
//! solvers for small instances.

pub mod apps;
pub mod bench;
pub mod cli;
mod dpll;
pub mod ee;
mod error;
pub mod formula;
pub mod gen;
pub mod memkc;
pub mod oracle;
pub mod pms;
pub mod report;
pub mod solve;
pub mod wcnf;

pub use error::{Error, Result};
pub use formula::{
    condition, coverage, Assignment, Clause, CoverageSet, Formula, Lit, Model, SolveStatus,
    TopKInstance, TopKSolution, Var,
};

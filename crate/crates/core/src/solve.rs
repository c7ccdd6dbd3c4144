//! Problem loading and the three solving routes behind one entry point.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::apps::{
    decode_ca, decode_clique, encode_ca, encode_clique, parse_ca_spec, parse_dimacs_graph, CaSpec,
    Graph,
};
use crate::ee::{ee_decode, ee_encode, maximalize_solution};
use crate::memkc::{memkc_solve, MemkcOptions, DEFAULT_MODEL_CAP};
use crate::pms::{external_solve, solve_exact, Budget, ExternalSolver, PmsStatus, SolverResult};
use crate::report::{Decoded, Report};
use crate::wcnf::read_wcnf;
use crate::{Error, Formula, Result, SolveStatus, TopKInstance, TopKSolution};

/// Environment variable holding the external solver command template.
pub const SOLVER_CMD_ENV: &str = "DIVTOPK_SOLVER_CMD";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputFormat {
    Wcnf,
    Clique,
    Ca,
}

impl FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<InputFormat> {
        match s {
            "wcnf" => Ok(InputFormat::Wcnf),
            "clique" | "edge" | "graph" => Ok(InputFormat::Clique),
            "ca" => Ok(InputFormat::Ca),
            _ => Err(Error::Invalid(format!("unknown input format `{s}`"))),
        }
    }
}

/// A top-k problem before `k` is fixed.
#[derive(Clone, Debug)]
pub enum Problem {
    Wcnf(Formula),
    Clique(Graph),
    Ca(CaSpec),
}

impl Problem {
    pub fn parse(text: &str, format: InputFormat) -> Result<Problem> {
        Ok(match format {
            InputFormat::Wcnf => Problem::Wcnf(read_wcnf(text.as_bytes())?.formula),
            InputFormat::Clique => Problem::Clique(parse_dimacs_graph(text)?),
            InputFormat::Ca => Problem::Ca(parse_ca_spec(text)?),
        })
    }

    pub fn load(path: &Path, format: InputFormat) -> Result<Problem> {
        Problem::parse(&std::fs::read_to_string(path)?, format)
    }

    pub fn instance(&self, k: usize) -> Result<TopKInstance> {
        match self {
            Problem::Wcnf(f) => TopKInstance::new(f.clone(), k),
            Problem::Clique(g) => encode_clique(g, k),
            Problem::Ca(spec) => encode_ca(spec, k),
        }
    }

    pub fn decode(&self, sol: &TopKSolution) -> Result<Option<Decoded>> {
        Ok(match self {
            Problem::Wcnf(_) => None,
            Problem::Clique(g) => Some(Decoded::Cliques(decode_clique(g, sol)?)),
            Problem::Ca(spec) => Some(Decoded::Rows(decode_ca(sol, spec)?)),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Memkc,
    EeInternal,
    EeExternal,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Memkc => "memkc",
            Method::EeInternal => "ee-internal",
            Method::EeExternal => "ee-external",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        match s {
            "memkc" => Ok(Method::Memkc),
            "ee-internal" => Ok(Method::EeInternal),
            "ee-external" => Ok(Method::EeExternal),
            _ => Err(Error::Invalid(format!("unknown method `{s}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveConfig {
    pub maximalize: bool,
    pub dominance: bool,
    pub time_limit: Option<Duration>,
    /// Required by [`Method::EeExternal`].
    pub solver: Option<ExternalSolver>,
    pub model_cap: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            maximalize: true,
            dominance: true,
            time_limit: None,
            solver: None,
            model_cap: DEFAULT_MODEL_CAP,
        }
    }
}

/// What a solving route produced.
#[derive(Clone, Debug)]
pub struct Outcome {
    /// `None` when the limit was hit before any solution was known, or the
    /// external solver's answer failed verification.
    pub solution: Option<TopKSolution>,
    pub timed_out: bool,
    /// Set when an external witness was rejected.
    pub mismatch: Option<String>,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn report(&self, inst: &TopKInstance, decoded: Option<Decoded>) -> Report {
        match &self.solution {
            Some(sol) => Report::new(sol, self.elapsed.as_secs_f64(), decoded),
            None => Report {
                status: SolveStatus::Unknown,
                k: inst.k(),
                objective: 0,
                uncovered: inst.formula.num_soft(),
                time_s: self.elapsed.as_secs_f64(),
                models: Vec::new(),
                decoded: None,
            },
        }
    }

    /// Solved to proven optimality or infeasibility within the limit.
    pub fn is_complete(&self) -> bool {
        !self.timed_out && self.mismatch.is_none() && self.solution.is_some()
    }
}

/// Runs `method` on `inst`. Every returned solution has been re-verified
/// against `inst`.
pub fn solve_instance(inst: &TopKInstance, method: Method, cfg: &SolveConfig) -> Result<Outcome> {
    let start = Instant::now();
    let deadline = cfg.time_limit.map(|d| start + d);
    let mut outcome = Outcome {
        solution: None,
        timed_out: false,
        mismatch: None,
        elapsed: Duration::ZERO,
    };
    match method {
        Method::Memkc => {
            let opts = MemkcOptions {
                cap: cfg.model_cap,
                maximalize: cfg.maximalize,
                dominance: cfg.dominance,
                deadline,
            };
            match memkc_solve(inst, opts) {
                Ok(sol) => outcome.solution = Some(sol),
                Err(Error::Timeout) => outcome.timed_out = true,
                Err(e) => return Err(e),
            }
        }
        Method::EeInternal | Method::EeExternal => {
            let (expanded, map) = ee_encode(inst);
            let result = if method == Method::EeInternal {
                solve_exact(
                    &expanded,
                    Budget {
                        max_nodes: None,
                        deadline,
                    },
                )
            } else {
                let solver = cfg.solver.as_ref().ok_or_else(|| {
                    Error::Invalid(format!(
                        "ee-external needs a solver command (--solver-cmd or {SOLVER_CMD_ENV})"
                    ))
                })?;
                external_solve(&expanded, solver, cfg.time_limit)?
            };
            let SolverResult {
                status,
                witness,
                timed_out,
                note,
                ..
            } = result;
            outcome.timed_out = timed_out;
            outcome.mismatch = note;
            let status = match status {
                PmsStatus::Optimum => Some(SolveStatus::Optimal),
                PmsStatus::Satisfiable => Some(SolveStatus::Feasible),
                PmsStatus::UnsatHard => {
                    outcome.solution = Some(TopKSolution::infeasible(&inst.formula, inst.k()));
                    None
                }
                PmsStatus::Unknown => None,
            };
            if let (Some(status), Some(w)) = (status, witness) {
                let mut sol = ee_decode(&w, &map, &inst.formula, status)?;
                if cfg.maximalize {
                    sol = maximalize_solution(&inst.formula, &sol)?;
                }
                outcome.solution = Some(sol);
            }
        }
    }
    if let Some(sol) = &outcome.solution {
        sol.verify(&inst.formula)?;
    }
    outcome.elapsed = start.elapsed();
    Ok(outcome)
}

/// The external solver from an explicit template or the environment.
pub fn external_solver(template: Option<&str>) -> Result<Option<ExternalSolver>> {
    match template {
        Some(t) => ExternalSolver::from_template(t).map(Some),
        None => match std::env::var(SOLVER_CMD_ENV) {
            Ok(t) if !t.trim().is_empty() => ExternalSolver::from_template(&t).map(Some),
            _ => Ok(None),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXACTLY_ONE: &str = "p wcnf 2 4 3\n3 1 2 0\n3 -1 -2 0\n1 1 0\n1 2 0\n";

    #[test]
    fn routes_agree_on_exactly_one() {
        let p = Problem::parse(EXACTLY_ONE, InputFormat::Wcnf).unwrap();
        for k in 1..=3 {
            let inst = p.instance(k).unwrap();
            let a = solve_instance(&inst, Method::Memkc, &SolveConfig::default()).unwrap();
            let b = solve_instance(&inst, Method::EeInternal, &SolveConfig::default()).unwrap();
            let (a, b) = (a.solution.unwrap(), b.solution.unwrap());
            assert_eq!(a.objective, b.objective);
            assert_eq!(a.uncovered, if k == 1 { 1 } else { 0 });
        }
    }

    #[test]
    fn external_requires_solver() {
        let inst = Problem::parse(EXACTLY_ONE, InputFormat::Wcnf)
            .unwrap()
            .instance(1)
            .unwrap();
        assert!(solve_instance(&inst, Method::EeExternal, &SolveConfig::default()).is_err());
    }

    #[test]
    fn ca_route_decodes_rows() {
        let p = Problem::parse("3 2 2 2 2", InputFormat::Ca).unwrap();
        let inst = p.instance(4).unwrap();
        let out = solve_instance(&inst, Method::EeInternal, &SolveConfig::default()).unwrap();
        let sol = out.solution.unwrap();
        assert_eq!(sol.uncovered, 0);
        let Some(Decoded::Rows(rows)) = p.decode(&sol).unwrap() else {
            panic!()
        };
        assert_eq!(rows.len(), 4);
    }

    #[test]
    fn parse_names() {
        assert_eq!("ee-internal".parse::<Method>().unwrap(), Method::EeInternal);
        assert!("ee".parse::<Method>().is_err());
        assert_eq!("ca".parse::<InputFormat>().unwrap(), InputFormat::Ca);
    }
}

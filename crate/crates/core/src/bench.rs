//! Benchmark manifests and result tables.
//!
//! A manifest is TOML:
//!
//! ```toml
//! methods = ["memkc", "ee-internal"]
//! time_limit = 60.0       # seconds per solve
//! repetitions = 1
//!
//! [[instances]]
//! name = "CA(8,2,2,2,2)"
//! ca = "3 2 2 2 2"        # inline spec, or `path` + `format`
//! k = [1, 2, 3, 4, 5, 6]
//! ```
//!
//! Paths are relative to the manifest. One row is produced per instance and
//! `k`, in manifest order.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rayon::prelude::*;
use serde::Deserialize;

use crate::solve::{external_solver, solve_instance, InputFormat, Method, Problem, SolveConfig};
use crate::{Error, Result};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default = "default_methods")]
    pub methods: Vec<String>,
    pub time_limit: Option<f64>,
    #[serde(default = "one")]
    pub repetitions: usize,
    pub solver_cmd: Option<String>,
    #[serde(default = "yes")]
    pub maximalize: bool,
    #[serde(default)]
    pub instances: Vec<InstanceEntry>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceEntry {
    pub name: Option<String>,
    pub path: Option<PathBuf>,
    /// `wcnf`, `clique` or `ca`; defaults to `wcnf`.
    pub format: Option<String>,
    /// Inline covering array spec line.
    pub ca: Option<String>,
    pub k: KSpec,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum KSpec {
    One(usize),
    Many(Vec<usize>),
}

impl KSpec {
    fn values(&self) -> Vec<usize> {
        match self {
            KSpec::One(k) => vec![*k],
            KSpec::Many(ks) => ks.clone(),
        }
    }
}

fn default_methods() -> Vec<String> {
    vec!["memkc".into()]
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Manifest> {
        let m: Manifest =
            toml::from_str(text).map_err(|e| Error::Invalid(format!("bad manifest: {e}")))?;
        for name in &m.methods {
            name.parse::<Method>()?;
        }
        if m.repetitions == 0 {
            return Err(Error::Invalid("repetitions must be at least 1".into()));
        }
        Ok(m)
    }
}

/// One measured cell: mean `#uncov` and mean time, or `None` (printed `-`)
/// if any repetition failed or hit its limit.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell(pub Option<(f64, f64)>);

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub instance: String,
    pub k: usize,
    pub cells: Vec<Cell>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub methods: Vec<String>,
    pub rows: Vec<Row>,
}

fn fmt_num(x: f64, decimals: usize) -> String {
    if x.fract() == 0.0 && decimals == 0 {
        format!("{x:.0}")
    } else if decimals == 0 {
        format!("{x:.1}")
    } else {
        format!("{x:.decimals$}")
    }
}

impl Table {
    fn header(&self) -> Vec<String> {
        let mut h = vec!["Instance".to_string(), "k".to_string()];
        for m in &self.methods {
            h.push(format!("{m} #uncov"));
            h.push(format!("{m} Time"));
        }
        h
    }

    fn cells(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                let mut v = vec![r.instance.clone(), r.k.to_string()];
                for c in &r.cells {
                    match c.0 {
                        Some((u, t)) => {
                            v.push(fmt_num(u, 0));
                            v.push(fmt_num(t, 3));
                        }
                        None => {
                            v.push("-".into());
                            v.push("-".into());
                        }
                    }
                }
                v
            })
            .collect()
    }

    /// Whitespace-aligned columns.
    pub fn to_text(&self) -> String {
        let header = self.header();
        let body = self.cells();
        let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
        for r in &body {
            for (w, c) in width.iter_mut().zip(r) {
                *w = (*w).max(c.len());
            }
        }
        let mut out = String::new();
        for r in std::iter::once(&header).chain(&body) {
            let line: Vec<String> = r
                .iter()
                .zip(&width)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            let _ = writeln!(out, "{}", line.join("  ").trim_end());
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in std::iter::once(self.header()).chain(self.cells()) {
            let _ = writeln!(out, "{}", r.join(","));
        }
        out
    }
}

struct Job {
    name: String,
    problem: std::result::Result<Problem, String>,
    k: usize,
}

fn load_entry(
    entry: &InstanceEntry,
    base: &Path,
) -> (String, std::result::Result<Problem, String>) {
    let name = entry
        .name
        .clone()
        .unwrap_or_else(|| match (&entry.path, &entry.ca) {
            (Some(p), _) => p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
            (None, Some(ca)) => ca.clone(),
            (None, None) => "?".into(),
        });
    let problem = match (&entry.path, &entry.ca) {
        (None, Some(ca)) => Problem::parse(ca, InputFormat::Ca),
        (Some(p), None) => entry
            .format
            .as_deref()
            .unwrap_or("wcnf")
            .parse()
            .and_then(|fmt| Problem::load(&base.join(p), fmt)),
        _ => Err(Error::Invalid(
            "an instance needs exactly one of `path` and `ca`".into(),
        )),
    };
    (name, problem.map_err(|e| e.to_string()))
}

/// Runs every row on a pool of `workers` threads (all cores if `None`).
/// Failures are logged and shown as `-`.
pub fn run_manifest(m: &Manifest, base: &Path, workers: Option<usize>) -> Result<Table> {
    let methods: Vec<Method> = m.methods.iter().map(|s| s.parse()).collect::<Result<_>>()?;
    let cfg = SolveConfig {
        maximalize: m.maximalize,
        time_limit: m.time_limit.map(Duration::from_secs_f64),
        solver: external_solver(m.solver_cmd.as_deref())?,
        ..SolveConfig::default()
    };
    let mut jobs = Vec::new();
    for entry in &m.instances {
        let (name, problem) = load_entry(entry, base);
        if let Err(e) = &problem {
            log::error!("{name}: {e}");
        }
        for k in entry.k.values() {
            jobs.push(Job {
                name: name.clone(),
                problem: problem.clone(),
                k,
            });
        }
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Invalid(format!("cannot build worker pool: {e}")))?;
    let rows = pool.install(|| {
        jobs.par_iter()
            .map(|job| Row {
                instance: job.name.clone(),
                k: job.k,
                cells: methods
                    .iter()
                    .map(|&method| run_cell(job, method, &cfg, m.repetitions))
                    .collect(),
            })
            .collect()
    });
    Ok(Table {
        methods: m.methods.clone(),
        rows,
    })
}

fn run_cell(job: &Job, method: Method, cfg: &SolveConfig, reps: usize) -> Cell {
    let Ok(problem) = &job.problem else {
        return Cell(None);
    };
    let mut uncov = 0.0;
    let mut time = 0.0;
    for _ in 0..reps {
        let outcome = problem
            .instance(job.k)
            .and_then(|inst| solve_instance(&inst, method, cfg));
        match outcome {
            Ok(o) if o.is_complete() => {
                let sol = o.solution.expect("complete outcomes carry a solution");
                uncov += sol.uncovered as f64;
                time += o.elapsed.as_secs_f64();
            }
            Ok(o) => {
                log::warn!(
                    "{} k={} {method}: {}",
                    job.name,
                    job.k,
                    o.mismatch.as_deref().unwrap_or("time limit reached")
                );
                return Cell(None);
            }
            Err(e) => {
                log::warn!("{} k={} {method}: {e}", job.name, job.k);
                return Cell(None);
            }
        }
    }
    Cell(Some((uncov / reps as f64, time / reps as f64)))
}

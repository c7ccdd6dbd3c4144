//! Solution reports in text and JSON form.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::{Error, Formula, Model, Result, SolveStatus, TopKSolution};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decoded {
    /// One sorted vertex list per model.
    Cliques(Vec<Vec<u32>>),
    /// One test case per model.
    Rows(Vec<Vec<u32>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub status: SolveStatus,
    pub k: usize,
    pub objective: usize,
    pub uncovered: usize,
    pub time_s: f64,
    /// Signed DIMACS literals, one list per model.
    pub models: Vec<Vec<i32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoded: Option<Decoded>,
}

impl Report {
    pub fn new(sol: &TopKSolution, time_s: f64, decoded: Option<Decoded>) -> Report {
        Report {
            status: sol.status,
            k: sol.k,
            objective: sol.objective,
            uncovered: sol.uncovered,
            time_s,
            models: sol.models.iter().map(|m| m.to_dimacs()).collect(),
            decoded,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn from_json(text: &str) -> Result<Report> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("bad report: {e}")))
    }

    /// `key: value` lines, then `model i:` and `clique i:` / `row i:` lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "status: {}", self.status);
        let _ = writeln!(s, "k: {}", self.k);
        let _ = writeln!(s, "objective: {}", self.objective);
        let _ = writeln!(s, "uncovered: {}", self.uncovered);
        let _ = writeln!(s, "time_s: {}", self.time_s);
        for (i, m) in self.models.iter().enumerate() {
            let _ = writeln!(s, "model {}: {}", i + 1, join(m));
        }
        let (label, lists) = match &self.decoded {
            Some(Decoded::Cliques(c)) => ("clique", c),
            Some(Decoded::Rows(r)) => ("row", r),
            None => return s,
        };
        for (i, l) in lists.iter().enumerate() {
            let _ = writeln!(s, "{label} {}: {}", i + 1, join(l));
        }
        s
    }

    /// Inverse of [`Report::to_text`].
    pub fn from_text(text: &str) -> Result<Report> {
        let mut status = None;
        let mut k = None;
        let mut objective = None;
        let mut uncovered = None;
        let mut time_s = None;
        let mut models = Vec::new();
        let mut cliques: Vec<Vec<u32>> = Vec::new();
        let mut rows: Vec<Vec<u32>> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let bad = || Error::parse(i + 1, format!("bad report line `{line}`"));
            let Some((key, value)) = line.split_once(':') else {
                continue;
            };
            let value = value.trim();
            let int = || value.parse::<usize>().map_err(|_| bad());
            match key.split_whitespace().next() {
                Some("status") => {
                    status = Some(
                        serde_json::from_value(serde_json::Value::String(value.to_string()))
                            .map_err(|_| bad())?,
                    )
                }
                Some("k") => k = Some(int()?),
                Some("objective") => objective = Some(int()?),
                Some("uncovered") => uncovered = Some(int()?),
                Some("time_s") => time_s = Some(value.parse::<f64>().map_err(|_| bad())?),
                Some("model") => models.push(split(value).map_err(|_| bad())?),
                Some("clique") => cliques.push(split(value).map_err(|_| bad())?),
                Some("row") => rows.push(split(value).map_err(|_| bad())?),
                _ => {}
            }
        }
        let missing = |f: &str| Error::Invalid(format!("report lacks `{f}`"));
        let decoded = match (cliques.is_empty(), rows.is_empty()) {
            (true, true) => None,
            (false, true) => Some(Decoded::Cliques(cliques)),
            (true, false) => Some(Decoded::Rows(rows)),
            (false, false) => {
                return Err(Error::Invalid("report has both cliques and rows".into()))
            }
        };
        Ok(Report {
            status: status.ok_or_else(|| missing("status"))?,
            k: k.ok_or_else(|| missing("k"))?,
            objective: objective.ok_or_else(|| missing("objective"))?,
            uncovered: uncovered.ok_or_else(|| missing("uncovered"))?,
            time_s: time_s.ok_or_else(|| missing("time_s"))?,
            models,
            decoded,
        })
    }

    /// Rebuilds the solution from the reported models and checks every
    /// recorded number against it.
    pub fn verify(&self, formula: &Formula) -> Result<()> {
        let models = self
            .models
            .iter()
            .map(|m| Model::from_dimacs(formula.num_vars(), m))
            .collect::<Result<Vec<_>>>()?;
        let sol = TopKSolution::from_models(formula, self.k, models, self.status)?;
        if sol.objective != self.objective || sol.uncovered != self.uncovered {
            return Err(Error::Inconsistent(format!(
                "report claims objective {} / uncovered {}, models give {} / {}",
                self.objective, self.uncovered, sol.objective, sol.uncovered
            )));
        }
        sol.verify(formula)
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn split<T: std::str::FromStr>(s: &str) -> std::result::Result<Vec<T>, T::Err> {
    s.split_whitespace().map(str::parse).collect()
}

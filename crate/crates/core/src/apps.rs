//! Reductions of diversified top-k clique and diversified top-k covering
//! arrays to diversified top-k partial MaxSAT.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::{Clause, Error, Formula, Lit, Model, Result, TopKInstance, TopKSolution, Var};

/// A simple undirected graph on vertices `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(u32, u32)>,
}

impl Graph {
    pub fn new(n: usize) -> Graph {
        Graph {
            n,
            edges: BTreeSet::new(),
        }
    }

    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Graph> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Adds `{u, v}`. Returns `false` if the edge was already present.
    pub fn add_edge(&mut self, u: u32, v: u32) -> Result<bool> {
        if u == v {
            return Err(Error::Invalid(format!("self-loop on vertex {u}")));
        }
        for w in [u, v] {
            if w == 0 || w as usize > self.n {
                return Err(Error::Invalid(format!("vertex {w} outside 1..={}", self.n)));
            }
        }
        Ok(self.edges.insert((u.min(v), u.max(v))))
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    /// Edges as `(smaller, larger)` pairs in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edges.iter().copied()
    }
}

/// Reads the DIMACS edge format: `p edge <n> <m>`, `e <u> <v>` lines and `c`
/// comments. Repeated edges are merged.
pub fn parse_dimacs_graph(text: &str) -> Result<Graph> {
    let mut graph: Option<Graph> = None;
    let mut declared = 0usize;
    let mut seen = 0usize;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let mut tok = line.split_whitespace();
        match tok.next() {
            None | Some("c") => {}
            Some("p") => {
                if graph.is_some() {
                    return Err(Error::parse(line_no, "duplicate header"));
                }
                let fmt = tok.next();
                let n = tok.next().and_then(|t| t.parse().ok());
                let m = tok.next().and_then(|t| t.parse().ok());
                match (fmt, n, m) {
                    (Some("edge" | "col"), Some(n), Some(m)) => {
                        graph = Some(Graph::new(n));
                        declared = m;
                    }
                    _ => {
                        return Err(Error::parse(
                            line_no,
                            "malformed header, expected `p edge <n> <m>`",
                        ))
                    }
                }
            }
            Some("e") => {
                let g = graph
                    .as_mut()
                    .ok_or_else(|| Error::parse(line_no, "edge before header"))?;
                let u = tok.next().and_then(|t| t.parse().ok());
                let v = tok.next().and_then(|t| t.parse().ok());
                let (Some(u), Some(v)) = (u, v) else {
                    return Err(Error::parse(line_no, "malformed edge line"));
                };
                g.add_edge(u, v)
                    .map_err(|e| Error::parse(line_no, e.to_string()))?;
                seen += 1;
            }
            Some(other) if other.starts_with('c') => {}
            Some(other) => {
                return Err(Error::parse(
                    line_no,
                    format!("unexpected line type `{other}`"),
                ))
            }
        }
    }
    let g = graph.ok_or_else(|| Error::parse(0, "missing `p edge` header"))?;
    if seen != declared {
        log::warn!("header declares {declared} edges, found {seen}");
    }
    Ok(g)
}

pub fn write_dimacs_graph(g: &Graph) -> String {
    let mut out = format!("p edge {} {}\n", g.n, g.edges.len());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "e {u} {v}");
    }
    out
}

/// Vertex `v` becomes variable `v`; every non-adjacent pair `i < j` gives the
/// hard clause `¬v_i ∨ ¬v_j`; every vertex gives the soft unit `v_i`.
pub fn encode_clique(g: &Graph, k: usize) -> Result<TopKInstance> {
    let n = g.num_vertices();
    let mut f = Formula::new(n);
    for i in 1..=n as Var {
        for j in i + 1..=n as Var {
            if !g.has_edge(i, j) {
                f.add_hard([Lit::neg(i), Lit::neg(j)])?;
            }
        }
    }
    for v in 1..=n as Var {
        f.add_soft([Lit::pos(v)])?;
    }
    TopKInstance::new(f, k)
}

/// The vertex set of each model, checked to be a clique of `g`.
pub fn decode_clique(g: &Graph, sol: &TopKSolution) -> Result<Vec<Vec<u32>>> {
    sol.models
        .iter()
        .map(|m| {
            let vs: Vec<u32> = (1..=g.num_vertices() as Var)
                .filter(|&v| m.value(v))
                .collect();
            for (a, &u) in vs.iter().enumerate() {
                for &v in &vs[a + 1..] {
                    if !g.has_edge(u, v) {
                        return Err(Error::Inconsistent(format!(
                            "vertices {u} and {v} are not adjacent"
                        )));
                    }
                }
            }
            Ok(vs)
        })
        .collect()
}

/// Parameters of a diversified top-k covering array problem: `M` columns with
/// the given symbol counts and interaction strength `t`. The run size `N` is
/// carried along but not used by the encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaSpec {
    pub levels: Vec<u32>,
    pub strength: usize,
    pub runs: Option<u64>,
}

impl CaSpec {
    pub fn new(levels: Vec<u32>, strength: usize) -> Result<CaSpec> {
        if levels.is_empty() || levels.contains(&0) {
            return Err(Error::Invalid(
                "every column needs at least one symbol".into(),
            ));
        }
        if strength == 0 || strength > levels.len() {
            return Err(Error::Invalid(format!(
                "strength {strength} not in 1..={}",
                levels.len()
            )));
        }
        Ok(CaSpec {
            levels,
            strength,
            runs: None,
        })
    }

    pub fn columns(&self) -> usize {
        self.levels.len()
    }

    pub fn to_line(&self) -> String {
        let mut s = format!("{} {}", self.columns(), self.strength);
        for l in &self.levels {
            let _ = write!(s, " {l}");
        }
        if let Some(n) = self.runs {
            let _ = write!(s, " {n}");
        }
        s
    }
}

/// Reads `M t s_1 ... s_M [N]` from the first non-comment line.
pub fn parse_ca_spec(text: &str) -> Result<CaSpec> {
    let (line_no, line) = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .find(|(_, l)| !l.is_empty() && !l.starts_with('c') && !l.starts_with('#'))
        .ok_or_else(|| Error::parse(0, "empty covering array spec"))?;
    let nums: Vec<u64> = line
        .split_whitespace()
        .map(|t| t.parse())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::parse(line_no, "expected integers `M t s_1 ... s_M [N]`"))?;
    if nums.len() < 2 {
        return Err(Error::parse(line_no, "expected `M t s_1 ... s_M [N]`"));
    }
    let m = nums[0] as usize;
    let rest = &nums[2..];
    if rest.len() != m && rest.len() != m + 1 {
        return Err(Error::parse(
            line_no,
            format!(
                "expected {m} levels and an optional run size, got {} values",
                rest.len()
            ),
        ));
    }
    let levels = rest[..m].iter().map(|&s| s as u32).collect();
    let mut spec =
        CaSpec::new(levels, nums[1] as usize).map_err(|e| Error::parse(line_no, e.to_string()))?;
    spec.runs = rest.get(m).copied();
    Ok(spec)
}

/// Symbols for a `t`-subset of columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueCombination {
    /// 1-based; equals the variable of this combination.
    pub id: usize,
    /// 1-based column indices, ascending.
    pub columns: Vec<usize>,
    /// `values[i]` is the symbol of `columns[i]`, in `0..s_c`.
    pub values: Vec<u32>,
}

impl ValueCombination {
    fn value_of(&self, column: usize) -> Option<u32> {
        self.columns
            .iter()
            .position(|&c| c == column)
            .map(|i| self.values[i])
    }

    fn matches(&self, row: &[u32]) -> bool {
        self.columns
            .iter()
            .zip(&self.values)
            .all(|(&c, &v)| row[c - 1] == v)
    }
}

/// Every value combination: column subsets in lexicographic order, and
/// within one subset the value tuples in lexicographic order.
pub fn enumerate_combinations(spec: &CaSpec) -> Vec<ValueCombination> {
    let m = spec.columns();
    let t = spec.strength;
    let mut out = Vec::new();
    let mut cols: Vec<usize> = (1..=t).collect();
    loop {
        let mut values = vec![0u32; t];
        loop {
            out.push(ValueCombination {
                id: out.len() + 1,
                columns: cols.clone(),
                values: values.clone(),
            });
            // Odometer over the value tuple, last position fastest.
            let mut i = t;
            while i > 0 && values[i - 1] + 1 == spec.levels[cols[i - 1] - 1] {
                values[i - 1] = 0;
                i -= 1;
            }
            if i == 0 {
                break;
            }
            values[i - 1] += 1;
        }
        let mut i = t;
        while i > 0 && cols[i - 1] == m - t + i {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cols[i - 1] += 1;
        for j in i..t {
            cols[j] = cols[j - 1] + 1;
        }
    }
}

/// `true` iff the two combinations give some shared column different
/// symbols.
pub fn contradicts(a: &ValueCombination, b: &ValueCombination) -> bool {
    a.columns
        .iter()
        .zip(&a.values)
        .any(|(&c, &v)| b.value_of(c).is_some_and(|w| w != v))
}

/// Combination `i` becomes variable `i`; each contradicting pair `i < j`
/// gives `¬var_i ∨ ¬var_j`; each combination gives the soft unit `var_i`.
pub fn encode_ca(spec: &CaSpec, k: usize) -> Result<TopKInstance> {
    let combos = enumerate_combinations(spec);
    let mut f = Formula::new(combos.len());
    for (i, a) in combos.iter().enumerate() {
        for b in &combos[i + 1..] {
            if contradicts(a, b) {
                f.add_hard([Lit::neg(a.id as Var), Lit::neg(b.id as Var)])?;
            }
        }
    }
    for c in &combos {
        f.add_soft([Lit::pos(c.id as Var)])?;
    }
    TopKInstance::new(f, k)
}

/// One test case per model: each column takes the symbol of a true
/// combination mentioning it, or 0 if none does.
pub fn decode_ca(sol: &TopKSolution, spec: &CaSpec) -> Result<Vec<Vec<u32>>> {
    let combos = enumerate_combinations(spec);
    sol.models
        .iter()
        .map(|m| {
            if m.num_vars() != combos.len() {
                return Err(Error::ModelSize {
                    expected: combos.len(),
                    got: m.num_vars(),
                });
            }
            let mut row: Vec<Option<u32>> = vec![None; spec.columns()];
            for c in combos.iter().filter(|c| m.value(c.id as Var)) {
                for (&col, &v) in c.columns.iter().zip(&c.values) {
                    match row[col - 1] {
                        Some(w) if w != v => {
                            return Err(Error::Inconsistent(format!(
                                "column {col} is given symbols {w} and {v}"
                            )))
                        }
                        _ => row[col - 1] = Some(v),
                    }
                }
            }
            Ok(row.into_iter().map(|v| v.unwrap_or(0)).collect())
        })
        .collect()
}

/// The model of the covering array encoding that a full row induces: every
/// combination the row contains is true.
pub fn row_model(spec: &CaSpec, row: &[u32]) -> Model {
    Model::new(
        enumerate_combinations(spec)
            .iter()
            .map(|c| c.matches(row))
            .collect(),
    )
}

/// Combination ids (0-based soft indices) covered by `rows`.
pub fn rows_coverage(spec: &CaSpec, rows: &[Vec<u32>]) -> crate::CoverageSet {
    let combos = enumerate_combinations(spec);
    crate::CoverageSet::from_indices(
        combos.len(),
        combos
            .iter()
            .filter(|c| rows.iter().any(|r| c.matches(r)))
            .map(|c| c.id - 1),
    )
}

/// Hard clauses of a formula as sorted DIMACS vectors; handy for comparing
/// encodings irrespective of clause order.
pub fn sorted_clauses(clauses: &[Clause]) -> Vec<Vec<i32>> {
    let mut v: Vec<Vec<i32>> = clauses.iter().map(|c| c.to_dimacs()).collect();
    v.sort();
    v
}

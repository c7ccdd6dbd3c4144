//! Reading and writing unweighted partial MaxSAT instances in DIMACS WCNF.
//!
//! The header is `p wcnf <nvars> <nclauses> <top>`. Every clause sits on its
//! own line as a weight, its literals and a terminating `0`; weight `top`
//! marks a hard clause and weight `1` a soft one. Lines starting with `c` are
//! comments. Writing is canonical: single spaces, hard clauses first, and
//! `top = m′ + 1`.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read};

use log::warn;

use crate::{Error, Formula, Lit, Result};

/// A parsed WCNF file together with what the parser had to discard.
#[derive(Clone, Debug)]
pub struct WcnfDocument {
    pub formula: Formula,
    /// Comment lines, without the leading `c` and one following space.
    pub comments: Vec<String>,
    /// Tautological clauses dropped while reading.
    pub dropped_tautologies: usize,
}

pub fn parse_wcnf(text: &str) -> Result<Formula> {
    read_wcnf(text.as_bytes()).map(|d| d.formula)
}

pub fn read_wcnf<R: Read>(reader: R) -> Result<WcnfDocument> {
    let reader = BufReader::new(reader);
    let mut header: Option<(usize, usize, u64)> = None;
    let mut formula = Formula::new(0);
    let mut comments = Vec::new();
    let mut clauses_seen = 0usize;
    let mut dropped = 0usize;

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('c') {
            if rest.is_empty() || rest.starts_with(char::is_whitespace) {
                comments.push(rest.strip_prefix(' ').unwrap_or(rest).to_string());
                continue;
            }
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(Error::parse(line_no, "duplicate header"));
            }
            let h = parse_header(trimmed).ok_or_else(|| {
                Error::parse(
                    line_no,
                    format!(
                        "malformed header `{trimmed}`, expected `p wcnf <nvars> <nclauses> <top>`"
                    ),
                )
            })?;
            formula = Formula::new(h.0);
            header = Some(h);
            continue;
        }
        let Some((num_vars, _, top)) = header else {
            return Err(Error::parse(line_no, "clause before header"));
        };

        let mut tokens = trimmed.split_whitespace();
        let weight: u64 = tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::parse(line_no, "malformed weight"))?;
        let hard = if weight == top {
            true
        } else if weight == 1 {
            false
        } else {
            return Err(Error::parse(
                line_no,
                format!("weight neither 1 nor top: {weight} (top = {top})"),
            ));
        };

        let mut lits = Vec::new();
        let mut terminated = false;
        for tok in tokens {
            if terminated {
                return Err(Error::parse(
                    line_no,
                    format!("unexpected `{tok}` after terminating 0"),
                ));
            }
            let value: i64 = tok
                .parse()
                .map_err(|_| Error::parse(line_no, format!("malformed literal `{tok}`")))?;
            if value == 0 {
                terminated = true;
                continue;
            }
            let var = value.unsigned_abs();
            if var > num_vars as u64 {
                return Err(Error::parse(
                    line_no,
                    format!("literal {value} exceeds declared {num_vars} variables"),
                ));
            }
            lits.push(Lit::new(var as u32, value > 0));
        }
        if !terminated {
            return Err(Error::parse(line_no, "missing 0 terminator"));
        }
        clauses_seen += 1;
        let added = if hard {
            formula.add_hard(lits)?
        } else {
            formula.add_soft(lits)?
        };
        if !added {
            warn!(
                "line {line_no}: dropping tautological {} clause",
                if hard { "hard" } else { "soft" }
            );
            dropped += 1;
        }
    }

    let Some((_, num_clauses, _)) = header else {
        return Err(Error::parse(0, "missing `p wcnf` header"));
    };
    if clauses_seen != num_clauses {
        return Err(Error::parse(
            0,
            format!("header declares {num_clauses} clauses, found {clauses_seen}"),
        ));
    }
    Ok(WcnfDocument {
        formula,
        comments,
        dropped_tautologies: dropped,
    })
}

fn parse_header(line: &str) -> Option<(usize, usize, u64)> {
    let mut it = line.split_whitespace();
    if it.next()? != "p" || it.next()? != "wcnf" {
        return None;
    }
    let nvars = it.next()?.parse().ok()?;
    let nclauses = it.next()?.parse().ok()?;
    let top: u64 = it.next()?.parse().ok()?;
    if it.next().is_some() || top == 0 {
        return None;
    }
    Some((nvars, nclauses, top))
}

pub fn write_wcnf(formula: &Formula) -> String {
    write_wcnf_with_comments(formula, &[])
}

/// Writes `comments` as `c ` lines ahead of the header.
pub fn write_wcnf_with_comments(formula: &Formula, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str("c ");
        out.push_str(c);
        out.push('\n');
    }
    let top = formula.num_soft() + 1;
    let _ = writeln!(
        out,
        "p wcnf {} {} {}",
        formula.num_vars(),
        formula.num_hard() + formula.num_soft(),
        top
    );
    let mut emit = |weight: usize, lits: &[Lit]| {
        let _ = write!(out, "{weight}");
        for l in lits {
            let _ = write!(out, " {l}");
        }
        out.push_str(" 0\n");
    };
    for c in formula.hard() {
        emit(top, c.lits());
    }
    for c in formula.soft() {
        emit(1, c.lits());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXACTLY_ONE: &str = "p wcnf 2 4 3\n3 1 2 0\n3 -1 -2 0\n1 1 0\n1 2 0\n";

    #[test]
    fn parses_example() {
        let f = parse_wcnf(EXACTLY_ONE).unwrap();
        assert_eq!(f.num_vars(), 2);
        let hard: Vec<_> = f.hard().iter().map(|c| c.to_dimacs()).collect();
        let soft: Vec<_> = f.soft().iter().map(|c| c.to_dimacs()).collect();
        assert_eq!(hard, vec![vec![1, 2], vec![-1, -2]]);
        assert_eq!(soft, vec![vec![1], vec![2]]);
        assert_eq!(write_wcnf(&f), EXACTLY_ONE);
    }

    #[test]
    fn empty_formula() {
        let f = parse_wcnf("p wcnf 0 0 2\n").unwrap();
        assert_eq!((f.num_vars(), f.num_hard(), f.num_soft()), (0, 0, 0));
        assert_eq!(write_wcnf(&Formula::new(0)), "p wcnf 0 0 1\n");
    }

    #[test]
    fn whitespace_and_comments_tolerated() {
        let text = "c hello\nc\n  p   wcnf 2  4 3 \n\n3  1 2   0\n\t3 -1 -2 0\nc mid\n1 1 0\n1 2 0";
        let doc = read_wcnf(text.as_bytes()).unwrap();
        assert_eq!(write_wcnf(&doc.formula), EXACTLY_ONE);
        assert_eq!(doc.comments, vec!["hello", "", "mid"]);
    }

    fn err_line(text: &str) -> (usize, String) {
        match parse_wcnf(text) {
            Err(Error::Parse { line, msg }) => (line, msg),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_weight() {
        let (line, msg) = err_line("p wcnf 2 4 3\n3 1 2 0\n2 1 0\n");
        assert_eq!(line, 3);
        assert!(msg.contains("weight neither 1 nor top"), "{msg}");
    }

    #[test]
    fn rejects_malformed_input() {
        assert_eq!(err_line("p cnf 2 1\n1 2 0\n").0, 1);
        assert_eq!(err_line("p wcnf 2 1\n").0, 1);
        let (line, msg) = err_line("p wcnf 2 1 3\n3 1 3 0\n");
        assert_eq!(line, 2);
        assert!(msg.contains("exceeds"));
        let (line, msg) = err_line("p wcnf 2 1 3\n3 1 2\n");
        assert_eq!(line, 2);
        assert!(msg.contains("missing 0"));
        assert!(err_line("p wcnf 2 2 3\n3 1 2 0\n").1.contains("declares 2"));
        assert!(err_line("3 1 2 0\n").1.contains("before header"));
        assert!(err_line("p wcnf 2 1 3\n3 1 0 2\n")
            .1
            .contains("after terminating"));
    }

    #[test]
    fn drops_tautologies_and_dedups() {
        let doc = read_wcnf("p wcnf 2 3 3\n3 1 -1 0\n1 2 2 1 0\n1 -2 2 0\n".as_bytes()).unwrap();
        assert_eq!(doc.dropped_tautologies, 2);
        assert_eq!(doc.formula.num_hard(), 0);
        assert_eq!(doc.formula.soft()[0].to_dimacs(), vec![2, 1]);
    }

    #[test]
    fn top_of_one_means_hard() {
        let f = parse_wcnf("p wcnf 1 1 1\n1 1 0\n").unwrap();
        assert_eq!((f.num_hard(), f.num_soft()), (1, 0));
    }
}

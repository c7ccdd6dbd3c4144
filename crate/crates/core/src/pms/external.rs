use std::io::{Read, Write};
use std::process::{Child, Command, Stdio};
use std::sync::mpsc;
use std::thread;
use std::time::Duration;

use log::debug;
use wait_timeout::ChildExt;

use super::{PmsStatus, SolverResult};
use crate::wcnf::write_wcnf;
use crate::{Error, Formula, Model, Result};

/// An external MaxSAT solver invoked as `argv`, where `{wcnf}` in any
/// argument is replaced by the instance path (appended if absent).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExternalSolver {
    pub argv: Vec<String>,
}

impl ExternalSolver {
    /// Splits a shell-style command template such as `open-wbo {wcnf}`.
    pub fn from_template(template: &str) -> Result<ExternalSolver> {
        let argv = shlex::split(template)
            .filter(|a| !a.is_empty())
            .ok_or_else(|| Error::Invalid(format!("bad solver command template `{template}`")))?;
        Ok(ExternalSolver { argv })
    }

    fn command_for(&self, path: &str) -> Vec<String> {
        let mut argv: Vec<String> = self
            .argv
            .iter()
            .map(|a| a.replace("{wcnf}", path))
            .collect();
        if !self.argv.iter().any(|a| a.contains("{wcnf}")) {
            argv.push(path.to_string());
        }
        argv
    }
}

/// Writes `formula` to a fresh temporary file, runs the solver on it under
/// `time_limit` and parses its MaxSAT-evaluation style output. Any witness
/// is checked against `formula`.
pub fn external_solve(
    formula: &Formula,
    solver: &ExternalSolver,
    time_limit: Option<Duration>,
) -> Result<SolverResult> {
    let mut file = tempfile::Builder::new().suffix(".wcnf").tempfile()?;
    file.write_all(write_wcnf(formula).as_bytes())?;
    file.flush()?;
    let path = file.path().to_string_lossy().into_owned();
    let argv = solver.command_for(&path);
    debug!("running {argv:?}");

    let mut cmd = Command::new(&argv[0]);
    cmd.args(&argv[1..])
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null());
    #[cfg(unix)]
    std::os::unix::process::CommandExt::process_group(&mut cmd, 0);
    let mut child = cmd
        .spawn()
        .map_err(|e| Error::Process(format!("cannot start `{}`: {e}", argv[0])))?;
    let mut stdout = child.stdout.take().expect("stdout is piped");
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stdout.read_to_end(&mut buf);
        let _ = tx.send(buf);
    });

    let timed_out = match time_limit {
        Some(limit) => match child.wait_timeout(limit)? {
            Some(_) => false,
            None => {
                kill_group(&mut child);
                child.wait()?;
                true
            }
        },
        None => {
            child.wait()?;
            false
        }
    };
    // Grandchildren may keep the pipe open; stop waiting for them.
    let output = rx.recv_timeout(Duration::from_secs(2)).unwrap_or_default();
    Ok(parse_solver_output(
        &String::from_utf8_lossy(&output),
        formula,
        timed_out,
    ))
}

/// Kills the solver and everything it started.
fn kill_group(child: &mut Child) {
    #[cfg(unix)]
    // SAFETY: plain syscall; the child leads its own process group.
    unsafe {
        libc::kill(-(child.id() as libc::pid_t), libc::SIGKILL);
    }
    let _ = child.kill();
}

/// Interprets a solver transcript: `s` gives the status, the last `o` line
/// the cost, `v` lines the witness (signed literals or a 0/1 string).
///
/// The exit code is not consulted. An optimum must come with a witness that
/// satisfies every hard clause and leaves exactly the reported number of
/// soft clauses unsatisfied; otherwise the result is downgraded to unknown
/// and the reason recorded in [`SolverResult::note`].
pub fn parse_solver_output(text: &str, formula: &Formula, timed_out: bool) -> SolverResult {
    let mut status = None;
    let mut cost = None;
    let mut v_tokens: Vec<&str> = Vec::new();
    let mut problems = Vec::new();

    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        let mut parts = line.splitn(2, char::is_whitespace);
        let tag = parts.next().unwrap_or("");
        let rest = parts.next().unwrap_or("").trim();
        match tag {
            "s" => {
                status = match rest {
                    "OPTIMUM FOUND" => Some(PmsStatus::Optimum),
                    "SATISFIABLE" => Some(PmsStatus::Satisfiable),
                    "UNSATISFIABLE" => Some(PmsStatus::UnsatHard),
                    "UNKNOWN" => Some(PmsStatus::Unknown),
                    other => {
                        problems.push(format!("line {}: unrecognised status `{other}`", i + 1));
                        Some(PmsStatus::Unknown)
                    }
                }
            }
            "o" => match rest.parse::<usize>() {
                Ok(c) => cost = Some(c),
                Err(_) => problems.push(format!("line {}: unparsable cost `{rest}`", i + 1)),
            },
            "v" => v_tokens.extend(rest.split_whitespace()),
            _ => {}
        }
    }

    let mut result = SolverResult {
        status: status.unwrap_or(PmsStatus::Unknown),
        min_unsat: cost,
        witness: None,
        timed_out,
        note: None,
    };
    if result.status == PmsStatus::UnsatHard {
        result.min_unsat = None;
        return result;
    }
    if !v_tokens.is_empty() {
        match parse_witness(&v_tokens, formula.num_vars()) {
            Ok(model) => result.witness = Some(model),
            Err(e) => problems.push(format!("unparsable witness: {e}")),
        }
    }
    if let Some(w) = &result.witness {
        let unsat = formula.unsat_soft_count(w);
        if let Some(clause) = formula.first_violated_hard(w) {
            problems.push(format!(
                "verification: witness violates hard clause {clause}"
            ));
            result.witness = None;
        } else if result.min_unsat.is_some_and(|c| c != unsat) {
            problems.push(format!(
                "verification: reported cost {} but witness leaves {unsat} soft clauses unsatisfied",
                result.min_unsat.unwrap()
            ));
            result.witness = None;
        } else {
            result.min_unsat = Some(unsat);
        }
    }
    // A solver killed at its limit often prints no status line; a verified
    // incumbent still counts.
    if status.is_none() && result.witness.is_some() && problems.is_empty() {
        result.status = PmsStatus::Satisfiable;
    }
    if result.status == PmsStatus::Optimum && result.witness.is_none() && problems.is_empty() {
        problems.push("verification: optimum reported without a witness".into());
    }
    if !problems.is_empty() {
        if matches!(result.status, PmsStatus::Optimum | PmsStatus::Satisfiable) {
            result.status = PmsStatus::Unknown;
        }
        result.note = Some(problems.join("; "));
    }
    result
}

fn parse_witness(tokens: &[&str], num_vars: usize) -> Result<Model> {
    // Post-2022 format: one token of 0/1 characters, one per variable.
    if tokens.len() == 1 && tokens[0].len() > 1 && tokens[0].bytes().all(|b| b == b'0' || b == b'1')
    {
        let bits = tokens[0].as_bytes();
        if bits.len() < num_vars {
            return Err(Error::Invalid(format!(
                "{} values for {num_vars} variables",
                bits.len()
            )));
        }
        return Ok(Model::new(
            bits[..num_vars].iter().map(|&b| b == b'1').collect(),
        ));
    }
    let mut lits = Vec::with_capacity(tokens.len());
    for tok in tokens {
        let l: i32 = tok
            .parse()
            .map_err(|_| Error::Invalid(format!("bad literal `{tok}`")))?;
        if l != 0 {
            lits.push(l);
        }
    }
    Model::from_dimacs(num_vars, &lits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_var() -> Formula {
        // Exactly one of x1, x2; soft x1 three times, x2 once.
        Formula::from_dimacs(2, &[&[1, 2], &[-1, -2]], &[&[1], &[1], &[1], &[2]]).unwrap()
    }

    #[test]
    fn template_substitution() {
        let s = ExternalSolver::from_template("solver --cpu-lim=10 '{wcnf}'").unwrap();
        assert_eq!(
            s.command_for("/tmp/a.wcnf"),
            vec!["solver", "--cpu-lim=10", "/tmp/a.wcnf"]
        );
        let s = ExternalSolver::from_template("solver -v").unwrap();
        assert_eq!(s.command_for("x"), vec!["solver", "-v", "x"]);
        assert!(ExternalSolver::from_template("").is_err());
    }

    #[test]
    fn bitstring_witness() {
        let r = parse_solver_output("o 1\ns OPTIMUM FOUND\nv 10\n", &two_var(), false);
        assert_eq!(r.status, PmsStatus::Optimum);
        assert_eq!(r.witness, Some(Model::new(vec![true, false])));
    }

    #[test]
    fn satisfiable_keeps_incumbent() {
        let r = parse_solver_output("o 3\no 1\ns SATISFIABLE\nv 1 -2 0\n", &two_var(), false);
        assert_eq!((r.status, r.min_unsat), (PmsStatus::Satisfiable, Some(1)));
    }
}

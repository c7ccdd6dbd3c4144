//! The `divtopk` command line.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 unsatisfiable hard
//! clauses, 3 time limit reached, 4 verification mismatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::apps::write_dimacs_graph;
use crate::bench::{run_manifest, Manifest};
use crate::ee::ee_encode;
use crate::gen::{gen_random_graph, gen_random_instance, RandomInstanceParams};
use crate::oracle::{brute_topk, DEFAULT_ORACLE_CAP};
use crate::solve::{
    external_solver, solve_instance, InputFormat, Method, Problem, SolveConfig, SOLVER_CMD_ENV,
};
use crate::wcnf::{write_wcnf, write_wcnf_with_comments};
use crate::{Error, Result, SolveStatus};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_TIMEOUT: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "divtopk", version, about = "Diversified top-k partial MaxSAT")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the partial MaxSAT encoding of a problem as WCNF.
    Encode {
        #[arg(value_enum)]
        kind: EncodeKind,
        input: PathBuf,
        #[arg(long)]
        k: usize,
        /// Output file; standard output if omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Solve a diversified top-k problem.
    Solve(SolveArgs),
    /// Generate a seeded random instance or graph.
    Gen {
        #[command(subcommand)]
        what: GenKind,
    },
    /// Compare memkc, ee-internal and brute force on a small instance.
    Verify {
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        from: FromArgs,
        /// Largest variable count the brute-force solver accepts.
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        cap: usize,
    },
    /// Run a benchmark manifest and print the result table.
    Bench {
        manifest: PathBuf,
        /// Worker threads; all cores by default.
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        csv: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum EncodeKind {
    Ee,
    Clique,
    Ca,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MethodArg {
    Memkc,
    EeInternal,
    EeExternal,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Memkc => Method::Memkc,
            MethodArg::EeInternal => Method::EeInternal,
            MethodArg::EeExternal => Method::EeExternal,
        }
    }
}

#[derive(Args, Debug)]
struct FromArgs {
    /// The input is a DIMACS edge graph.
    #[arg(long, conflicts_with = "from_ca")]
    from_clique: bool,
    /// The input is a covering array spec `M t s_1 ... s_M [N]`.
    #[arg(long)]
    from_ca: bool,
}

impl FromArgs {
    fn format(&self) -> InputFormat {
        if self.from_clique {
            InputFormat::Clique
        } else if self.from_ca {
            InputFormat::Ca
        } else {
            InputFormat::Wcnf
        }
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(value_enum)]
    method: MethodArg,
    input: PathBuf,
    #[arg(long)]
    k: usize,
    #[command(flatten)]
    from: FromArgs,
    /// Print the JSON report.
    #[arg(long)]
    json: bool,
    /// Keep models as found instead of growing them to maximal solutions.
    #[arg(long)]
    no_maximalize: bool,
    /// Disable dominance pruning in memkc.
    #[arg(long)]
    no_dominance: bool,
    /// Seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// External solver command; `{wcnf}` is replaced by the instance path.
    #[arg(long, env = SOLVER_CMD_ENV)]
    solver_cmd: Option<String>,
}

#[derive(Subcommand, Debug)]
enum GenKind {
    /// Random instance: hard clauses over distinct variables, one soft unit
    /// per variable.
    Instance {
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        hard: usize,
        #[arg(long, default_value_t = 3)]
        len: usize,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// G(n, p) random graph in DIMACS edge format.
    Graph {
        #[arg(long)]
        vertices: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

/// Runs the command line `args` (including the program name) and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Timeout => EXIT_TIMEOUT,
                Error::HardViolated { .. } | Error::Inconsistent(_) => EXIT_MISMATCH,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Encode {
            kind,
            input,
            k,
            out: path,
        } => {
            let (format, comments_of_map) = match kind {
                EncodeKind::Ee => (InputFormat::Wcnf, true),
                EncodeKind::Clique => (InputFormat::Clique, false),
                EncodeKind::Ca => (InputFormat::Ca, false),
            };
            let inst = Problem::load(&input, format)?.instance(k)?;
            let (f, text) = if comments_of_map {
                let (f, map) = ee_encode(&inst);
                let text = write_wcnf_with_comments(&f, &map.to_comments());
                (f, text)
            } else {
                let text = write_wcnf(&inst.formula);
                (inst.formula, text)
            };
            emit(&text, path.as_deref(), out)?;
            writeln!(
                err,
                "vars {} hard {} soft {}",
                f.num_vars(),
                f.num_hard(),
                f.num_soft()
            )?;
            Ok(EXIT_OK)
        }
        Command::Solve(args) => cmd_solve(args, out, err),
        Command::Gen { what } => {
            match what {
                GenKind::Instance {
                    vars,
                    hard,
                    len,
                    seed,
                    out: path,
                } => {
                    let p = RandomInstanceParams {
                        num_vars: vars,
                        num_hard: hard,
                        clause_len: len,
                        seed,
                    };
                    p.validate()?;
                    emit(&write_wcnf(&gen_random_instance(&p)), path.as_deref(), out)?;
                }
                GenKind::Graph {
                    vertices,
                    p,
                    seed,
                    out: path,
                } => {
                    let g = gen_random_graph(vertices, p, seed)?;
                    emit(&write_dimacs_graph(&g), path.as_deref(), out)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Verify {
            input,
            k,
            from,
            cap,
        } => {
            let inst = Problem::load(&input, from.format())?.instance(k)?;
            let oracle = brute_topk(&inst, cap)?;
            let cfg = SolveConfig::default();
            let objective = |m: Method| -> Result<usize> {
                let o = solve_instance(&inst, m, &cfg)?;
                o.solution.map(|s| s.objective).ok_or(Error::Timeout)
            };
            let a = objective(Method::Memkc)?;
            let b = objective(Method::EeInternal)?;
            let c = oracle.objective;
            let agree = a == b && b == c;
            writeln!(out, "memkc {a}")?;
            writeln!(out, "ee-internal {b}")?;
            writeln!(out, "oracle {c}")?;
            writeln!(out, "{}", if agree { "pass" } else { "FAIL" })?;
            Ok(if agree { EXIT_OK } else { EXIT_MISMATCH })
        }
        Command::Bench {
            manifest,
            workers,
            csv,
        } => {
            let text = std::fs::read_to_string(&manifest)?;
            let m = Manifest::parse(&text)?;
            let base = manifest.parent().unwrap_or(Path::new("."));
            let table = run_manifest(&m, base, workers)?;
            out.write_all(if csv { table.to_csv() } else { table.to_text() }.as_bytes())?;
            Ok(EXIT_OK)
        }
    }
}

fn cmd_solve(args: SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let problem = Problem::load(&args.input, args.from.format())?;
    let inst = problem.instance(args.k)?;
    let method: Method = args.method.into();
    let cfg = SolveConfig {
        maximalize: !args.no_maximalize,
        dominance: !args.no_dominance,
        time_limit: match args.time_limit {
            Some(s) if s.is_finite() && s >= 0.0 => Some(Duration::from_secs_f64(s)),
            Some(s) => return Err(Error::Invalid(format!("bad time limit {s}"))),
            None => None,
        },
        solver: if method == Method::EeExternal {
            external_solver(args.solver_cmd.as_deref())?
        } else {
            None
        },
        ..SolveConfig::default()
    };
    let outcome = solve_instance(&inst, method, &cfg)?;
    let decoded = match &outcome.solution {
        Some(sol) if sol.status != SolveStatus::InfeasibleHard => problem.decode(sol)?,
        _ => None,
    };
    let report = outcome.report(&inst, decoded);
    let text = if args.json {
        report.to_json() + "\n"
    } else {
        report.to_text()
    };
    out.write_all(text.as_bytes())?;
    if let Some(note) = &outcome.mismatch {
        writeln!(err, "error: solver output rejected: {note}")?;
        return Ok(EXIT_MISMATCH);
    }
    if outcome.timed_out {
        writeln!(err, "time limit reached")?;
        return Ok(EXIT_TIMEOUT);
    }
    match report.status {
        SolveStatus::InfeasibleHard => Ok(EXIT_INFEASIBLE),
        SolveStatus::Unknown => Ok(EXIT_TIMEOUT),
        _ => Ok(EXIT_OK),
    }
}

//! Command-line front end: validation, influence analysis, evaluation,
//! solving, LP export and instance generation.
//!
//! Every command is a pure function of its arguments and input bytes.
//! Exit codes: 0 success, 1 invalid input, 2 internal limit exceeded.

use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use depknap::milp::{build_model, export_lp, BuildOptions};
use depknap::numfmt::{format_number, round_sig};
use depknap::solver::solve_exhaustive_capped;
use depknap::{
    evaluate, generate_instance, influence_matrix, solve_bnb, validate, walk_closure,
    GeneratorParams, Instance, InstanceError, Proof, Selection, SolveError, SolveResult,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_LIMIT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "depknap", version, about = "Knapsack with signed fuzzy value dependencies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Bnb,
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report every invariant violation; exit 0 iff the instance is valid.
    Check {
        /// Instance JSON path, or `-` for standard input.
        input: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Signed strengths and overall influence matrix.
    Influence {
        input: String,
        /// Also report the closure over walks.
        #[arg(long)]
        walks: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Penalties, feasibility and objective of a selection.
    Eval {
        input: String,
        /// Comma-separated element ids.
        #[arg(long, conflicts_with_all = ["mask", "from_result"])]
        select: Option<String>,
        /// Bit string, one character per element, first element first.
        #[arg(long, conflicts_with = "from_result")]
        mask: Option<String>,
        /// Reuse the selection of a `solve --json` result file.
        #[arg(long)]
        from_result: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Optimal selection.
    Solve {
        input: String,
        #[arg(long, value_enum, default_value = "bnb")]
        method: Method,
        #[arg(long)]
        json: bool,
        /// Largest instance the exhaustive method accepts.
        #[arg(long, default_value_t = depknap::solver::DEFAULT_EXHAUSTIVE_CAP)]
        max_exhaustive: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Linearized integer program in LP format.
    ExportLp {
        input: String,
        /// Keep the auxiliary g variables instead of substituting g = x.
        #[arg(long)]
        keep_g: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Seeded random instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long, default_value_t = 0.3)]
        neg: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("unknown element id {0}")]
    UnknownId(String),
    #[error("{0}")]
    Selection(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("{0}")]
    Generate(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Read { .. } => "io",
            CliError::Write { .. } => "io",
            CliError::Instance(_) | CliError::Invalid(_) => "invalid_instance",
            CliError::UnknownId(_) | CliError::Selection(_) => "invalid_selection",
            CliError::Solve(SolveError::TooLarge { .. }) => "limit_exceeded",
            CliError::Solve(_) => "invalid_input",
            CliError::Generate(_) => "invalid_parameters",
        }
    }

    fn exit_code(&self) -> i32 {
        match self {
            CliError::Solve(SolveError::TooLarge { .. }) => EXIT_LIMIT,
            _ => EXIT_INVALID,
        }
    }
}

/// Runs the tool with `argv` (program name first). Returns the exit code.
pub fn run<I, S>(argv: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            return report(&CliError::Usage(e.to_string().trim_end().to_owned()), stderr);
        }
    };
    let (code, text, output) = match execute(cli.command, stdin) {
        Ok(r) => r,
        Err(e) => return report(&e, stderr),
    };
    match output {
        Some(path) => {
            if let Err(source) = fs::write(&path, text) {
                let path = path.display().to_string();
                return report(&CliError::Write { path, source }, stderr);
            }
        }
        None => {
            let _ = stdout.write_all(text.as_bytes());
        }
    }
    code
}

fn report(e: &CliError, stderr: &mut dyn Write) -> i32 {
    let v = json!({ "error": e.kind(), "message": e.to_string() });
    let _ = writeln!(stderr, "{v}");
    e.exit_code()
}

type Outcome = (i32, String, Option<PathBuf>);

fn execute(command: Command, stdin: &mut dyn Read) -> Result<Outcome, CliError> {
    match command {
        Command::Check { input, output } => {
            let text = read_input(&input, stdin)?;
            let violations: Vec<String> = match Instance::from_json(&text) {
                Ok(inst) => validate(&inst).iter().map(ToString::to_string).collect(),
                Err(InstanceError::Invalid(v)) => v.iter().map(ToString::to_string).collect(),
                Err(e) => return Err(e.into()),
            };
            let valid = violations.is_empty();
            let body = json!({ "valid": valid, "violations": violations });
            let code = if valid { EXIT_OK } else { EXIT_INVALID };
            Ok((code, to_json(&body), output))
        }
        Command::Influence {
            input,
            walks,
            format,
            output,
        } => {
            let inst = load(&input, stdin)?;
            let m = influence_matrix(inst.vdg());
            let w = walks.then(|| walk_closure(inst.vdg()));
            let text = match format {
                Format::Json => {
                    let mut body = json!({
                        "ids": ids(&inst),
                        "rho_pos": num_rows(&m.rho_pos_rows()),
                        "rho_neg": num_rows(&m.rho_neg_rows()),
                        "influence": num_rows(&m.influence_rows()),
                    });
                    if let Some(w) = &w {
                        body["walk_rho_pos"] = num_rows(&w.rho_pos_rows());
                        body["walk_rho_neg"] = num_rows(&w.rho_neg_rows());
                    }
                    to_json(&body)
                }
                Format::Table => {
                    let names = ids(&inst);
                    let mut t = String::new();
                    t += &table("rho_pos", &names, &m.rho_pos_rows());
                    t += &table("rho_neg", &names, &m.rho_neg_rows());
                    t += &table("influence", &names, &m.influence_rows());
                    if let Some(w) = &w {
                        t += &table("walk_rho_pos", &names, &w.rho_pos_rows());
                        t += &table("walk_rho_neg", &names, &w.rho_neg_rows());
                    }
                    t
                }
            };
            Ok((EXIT_OK, text, output))
        }
        Command::Eval {
            input,
            select,
            mask,
            from_result,
            output,
        } => {
            let inst = load(&input, stdin)?;
            let selection = match (select, mask, from_result) {
                (Some(list), _, _) => selection_from_ids(&inst, list.split(',').filter(|s| !s.is_empty()))?,
                (_, Some(bits), _) => selection_from_mask(&inst, &bits)?,
                (_, _, Some(path)) => {
                    let text = fs::read_to_string(&path).map_err(|source| CliError::Read {
                        path: path.display().to_string(),
                        source,
                    })?;
                    let r: ResultSelection = serde_json::from_str(&text)
                        .map_err(|e| CliError::Selection(format!("bad result file: {e}")))?;
                    selection_from_ids(&inst, r.selection.iter().map(String::as_str))?
                }
                _ => selection_from_ids(&inst, std::iter::empty())?,
            };
            let m = influence_matrix(inst.vdg());
            let ev = evaluate(&inst, &m, &selection).map_err(|e| CliError::Selection(e.to_string()))?;
            let body = json!({
                "selection": selected_ids(&inst, &selection),
                "mask": selection.to_string(),
                "penalties": nums(ev.penalties.as_slice()),
                "feasible": ev.feasible,
                "total_weight": num(ev.total_weight),
                "objective": num(ev.objective),
            });
            Ok((EXIT_OK, to_json(&body), output))
        }
        Command::Solve {
            input,
            method,
            json,
            max_exhaustive,
            output,
        } => {
            let inst = load(&input, stdin)?;
            let m = influence_matrix(inst.vdg());
            let r = match method {
                Method::Bnb => solve_bnb(&inst, &m)?,
                Method::Exhaustive => solve_exhaustive_capped(&inst, &m, max_exhaustive)?,
            };
            let text = if json {
                to_json(&solve_json(&inst, &r, method))
            } else {
                solve_text(&inst, &r, method)
            };
            Ok((EXIT_OK, text, output))
        }
        Command::ExportLp {
            input,
            keep_g,
            output,
        } => {
            let inst = load(&input, stdin)?;
            let m = influence_matrix(inst.vdg());
            let model = build_model(&inst, &m, BuildOptions { eliminate_g: !keep_g })
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            Ok((EXIT_OK, export_lp(&model), output))
        }
        Command::Gen {
            n,
            density,
            neg,
            seed,
            output,
        } => {
            let inst = generate_instance(GeneratorParams {
                n,
                density,
                negative_share: neg,
                seed,
            })
            .map_err(|e| CliError::Generate(e.to_string()))?;
            Ok((EXIT_OK, inst.to_json() + "\n", output))
        }
    }
}

#[derive(Deserialize)]
struct ResultSelection {
    selection: Vec<String>,
}

fn read_input(path: &str, stdin: &mut dyn Read) -> Result<String, CliError> {
    let mut text = String::new();
    let res = if path == "-" {
        stdin.read_to_string(&mut text).map(|_| ())
    } else {
        fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })?;
    Ok(text)
}

/// Reads and validates an instance.
fn load(path: &str, stdin: &mut dyn Read) -> Result<Instance, CliError> {
    let inst = Instance::from_json(&read_input(path, stdin)?)?;
    let v = validate(&inst);
    if !v.is_empty() {
        let msg = v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ");
        return Err(CliError::Invalid(msg));
    }
    Ok(inst)
}

fn selection_from_ids<'a>(
    inst: &Instance,
    ids: impl Iterator<Item = &'a str>,
) -> Result<Selection, CliError> {
    let mut idx = Vec::new();
    for id in ids {
        let id = id.trim();
        idx.push(inst.index_of(id).ok_or_else(|| CliError::UnknownId(id.to_owned()))?);
    }
    Ok(Selection::from_indices(inst.len(), idx))
}

fn selection_from_mask(inst: &Instance, bits: &str) -> Result<Selection, CliError> {
    let s = Selection::from_bits(bits)
        .ok_or_else(|| CliError::Selection(format!("mask {bits:?} must contain only 0 and 1")))?;
    if s.len() != inst.len() {
        return Err(CliError::Selection(format!(
            "mask has {} bits, instance has {} elements",
            s.len(),
            inst.len()
        )));
    }
    Ok(s)
}

fn ids(inst: &Instance) -> Vec<&str> {
    inst.elements().iter().map(|e| e.id.as_str()).collect()
}

fn selected_ids<'a>(inst: &'a Instance, s: &Selection) -> Vec<&'a str> {
    s.selected().map(|k| inst.elements()[k].id.as_str()).collect()
}

fn num(x: f64) -> Value {
    json!(round_sig(x))
}

fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

fn num_rows(rows: &[Vec<f64>]) -> Value {
    Value::Array(rows.iter().map(|r| nums(r)).collect())
}

fn to_json(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize") + "\n"
}

fn proof_name(p: Proof) -> &'static str {
    match p {
        Proof::Optimal => "optimal",
        Proof::SearchExhausted => "search_exhausted",
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Bnb => "bnb",
        Method::Exhaustive => "exhaustive",
    }
}

fn solve_json(inst: &Instance, r: &SolveResult, method: Method) -> Value {
    json!({
        "method": method_name(method),
        "selection": selected_ids(inst, &r.selection),
        "mask": r.selection.to_string(),
        "objective": num(r.objective),
        "penalties": nums(r.penalties.as_slice()),
        "total_weight": num(r.total_weight),
        "nodes_explored": r.nodes_explored,
        "proof": proof_name(r.proof),
    })
}

fn solve_text(inst: &Instance, r: &SolveResult, method: Method) -> String {
    let mut s = String::new();
    s += &format!("method:         {}\n", method_name(method));
    s += &format!("objective:      {}\n", format_number(r.objective));
    s += &format!("selection:      {}\n", selected_ids(inst, &r.selection).join(","));
    s += &format!(
        "total weight:   {} / {}\n",
        format_number(r.total_weight),
        format_number(inst.capacity())
    );
    s += &format!("nodes explored: {}\n", r.nodes_explored);
    s += &format!("proof:          {}\n", proof_name(r.proof));
    s
}

fn table(title: &str, names: &[&str], rows: &[Vec<f64>]) -> String {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| format!("{x:.4}")).collect())
        .collect();
    let width = names
        .iter()
        .map(|n| n.len())
        .chain(cells.iter().flatten().map(String::len))
        .max()
        .unwrap_or(1);
    let mut out = format!("{title}\n{:>width$}", "");
    for n in names {
        out += &format!(" {n:>width$}");
    }
    out.push('\n');
    for (n, row) in names.iter().zip(&cells) {
        out += &format!("{n:>width$}");
        for c in row {
            out += &format!(" {c:>width$}");
        }
        out.push('\n');
    }
    out.push('\n');
    out
}

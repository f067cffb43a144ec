//! Command-line front end.
//!
//! Exit codes: 0 success or equivalent, 1 not equivalent (or differing
//! oracle tables), 2 usage, input or budget errors.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use finitary::equivalence::{test_equivalence, test_equivalence_pfa, EquivalenceOptions, Verdict};
use finitary::io::{parse_model_with, ParseScalar};
use finitary::oracle::{brute_equiv, enumerate_probs, DEFAULT_BUDGET};
use finitary::{compile, compute_basis, Alphabet, AnyModel, Model, NumericMode, Scalar, Tolerance, Word};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIFFERENT: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// Version tag carried by every JSON document.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "finitary", version, about = "Equivalence testing for hidden Markov models, quantum random walks and probabilistic automata")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Tolerance for float-mode models (pivoting and probability comparison)
    #[arg(long, env = "FINITARY_TOLERANCE", default_value_t = finitary::DEFAULT_TOLERANCE, value_parser = parse_tolerance, global = true)]
    pub tolerance: f64,

    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    /// Print decimal approximations next to exact values
    #[arg(long, global = true)]
    pub decimal: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide whether two models generate the same process
    Equiv {
        model_a: PathBuf,
        model_b: PathBuf,
        /// On a dimension mismatch, search words up to length dim_A + dim_B for a witness
        #[arg(long)]
        search_witness: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Print the dimension of the process
    Dim {
        model: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Print the basis words I, J and the basic matrix P_IJ
    Basis {
        model: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Print the probability of a word (acceptance probability for automata)
    Prob {
        model: PathBuf,
        word: String,
        #[command(flatten)]
        common: Common,
    },
    /// Enumerate probabilities of all words up to a length, or compare two models on them
    Oracle {
        model_a: PathBuf,
        model_b: Option<PathBuf>,
        /// Maximal word length
        #[arg(short = 'L', long = "length")]
        length: usize,
        /// Maximal number of words to enumerate
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Check that a model file parses and satisfies its invariants
    Validate {
        model: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_tolerance(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t.is_finite() && t > 0.0 => Ok(t),
        _ => Err(format!("tolerance must be a positive number, got {s:?}")),
    }
}

/// Failure reported on stderr with exit code 2.
#[derive(Debug)]
pub struct Failure(pub String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let mut stdout = String::new();
    let mut notes = String::new();
    let code = match execute(&cli.command, &mut stdout, &mut notes) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(notes, "error: {msg}");
            EXIT_ERROR
        }
    };
    let _ = out.write_all(stdout.as_bytes());
    let _ = err.write_all(notes.as_bytes());
    code
}

fn load(path: &Path, tol: &Tolerance) -> Result<AnyModel, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    parse_model_with(&text, tol).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn execute(command: &Command, out: &mut String, notes: &mut String) -> Result<i32, Failure> {
    match command {
        Command::Equiv {
            model_a,
            model_b,
            search_witness,
            common,
        } => {
            let tol = Tolerance::uniform(common.tolerance);
            let a = load(model_a, &tol)?;
            let b = load(model_b, &tol)?;
            let opts = EquivalenceOptions {
                tolerance: tol,
                search_witness: *search_witness,
                ..EquivalenceOptions::default()
            };
            match (a, b) {
                (AnyModel::Exact(x), AnyModel::Exact(y)) => equiv(&x, &y, &opts, common, out, notes),
                (AnyModel::Float(x), AnyModel::Float(y)) => equiv(&x, &y, &opts, common, out, notes),
                (a, b) => Err(Failure(format!(
                    "numeric modes differ: {} is {}, {} is {}",
                    model_a.display(),
                    a.mode(),
                    model_b.display(),
                    b.mode()
                ))),
            }
        }
        Command::Dim { model, common } => {
            let tol = Tolerance::uniform(common.tolerance);
            match load(model, &tol)? {
                AnyModel::Exact(m) => dim(&m, &tol, common, out),
                AnyModel::Float(m) => dim(&m, &tol, common, out),
            }
        }
        Command::Basis { model, common } => {
            let tol = Tolerance::uniform(common.tolerance);
            match load(model, &tol)? {
                AnyModel::Exact(m) => basis(&m, &tol, common, out),
                AnyModel::Float(m) => basis(&m, &tol, common, out),
            }
        }
        Command::Prob { model, word, common } => {
            let tol = Tolerance::uniform(common.tolerance);
            match load(model, &tol)? {
                AnyModel::Exact(m) => prob(&m, word, common, out),
                AnyModel::Float(m) => prob(&m, word, common, out),
            }
        }
        Command::Oracle {
            model_a,
            model_b,
            length,
            budget,
            common,
        } => {
            let tol = Tolerance::uniform(common.tolerance);
            let a = load(model_a, &tol)?;
            let b = model_b.as_ref().map(|p| load(p, &tol)).transpose()?;
            match (a, b) {
                (AnyModel::Exact(x), None) => oracle_table(&x, *length, *budget, common, out, notes),
                (AnyModel::Float(x), None) => oracle_table(&x, *length, *budget, common, out, notes),
                (AnyModel::Exact(x), Some(AnyModel::Exact(y))) => {
                    oracle_compare(&x, &y, *length, *budget, &tol, common, out, notes)
                }
                (AnyModel::Float(x), Some(AnyModel::Float(y))) => {
                    oracle_compare(&x, &y, *length, *budget, &tol, common, out, notes)
                }
                _ => Err(Failure("numeric modes of the two models differ".into())),
            }
        }
        Command::Validate { model, common } => {
            let tol = Tolerance::uniform(common.tolerance);
            let m = load(model, &tol)?;
            let states = match &m {
                AnyModel::Exact(m) => size(m),
                AnyModel::Float(m) => size(m),
            };
            match common.format {
                Format::Text => {
                    let _ = writeln!(out, "valid {} ({}), {}", m.kind(), m.mode(), states.1);
                }
                Format::Json => emit(
                    out,
                    json!({
                        "schema": schema("validate"),
                        "valid": true,
                        "kind": m.kind().as_str(),
                        "mode": m.mode().as_str(),
                        "alphabet": m.alphabet().symbols(),
                        "size": states.0,
                    }),
                ),
            }
            Ok(EXIT_OK)
        }
    }
}

fn size<S: Scalar>(m: &Model<S>) -> (usize, String) {
    match m {
        Model::Hmm(h) => (h.states(), format!("n={}", h.states())),
        Model::Pfa(p) => (p.states(), format!("n={}", p.states())),
        Model::Qrw(q) => (q.coordinates(), format!("k={}", q.coordinates())),
    }
}

fn schema(command: &str) -> String {
    format!("finitary.{command}.v{SCHEMA_VERSION}")
}

fn emit(out: &mut String, value: Value) {
    out.push_str(&serde_json::to_string_pretty(&value).expect("json values serialize"));
    out.push('\n');
}

/// Value as written in model files; with `decimal`, exact values get their
/// decimal approximation appended.
fn show<S: ParseScalar>(x: &S, decimal: bool) -> String {
    let exact = x.format_literal();
    if decimal && S::is_exact() {
        format!("{exact} ({:?})", x.to_f64())
    } else {
        exact
    }
}

fn mode_label<S: Scalar>(tol: f64) -> String {
    match S::MODE {
        NumericMode::Exact => "exact".to_string(),
        NumericMode::Float => format!("within tolerance {tol:e}"),
    }
}

const PFA_NOTICE: &str =
    "note: automata are compared through their stop-symbol HMMs over the alphabet extended by '$'; '$' marks termination\n";

const SERIES_NOTICE: &str =
    "note: an automaton does not halt almost surely, so acceptance probabilities are compared directly instead of stop-symbol HMMs\n";

fn equiv<S: ParseScalar>(
    x: &Model<S>,
    y: &Model<S>,
    opts: &EquivalenceOptions,
    common: &Common,
    out: &mut String,
    notes: &mut String,
) -> Result<i32, Failure> {
    let (verdict, alphabet, pfa) = match (x, y) {
        (Model::Pfa(px), Model::Pfa(py)) => {
            let v = test_equivalence_pfa(px, py, opts)?;
            if v.via_stop_symbol {
                notes.push_str(PFA_NOTICE);
                let pfa = (v.pfa_witness.clone(), v.pfa_values.clone());
                (v.verdict, x.alphabet().with_stop_symbol(), Some(pfa))
            } else {
                notes.push_str(SERIES_NOTICE);
                (v.verdict, x.alphabet().clone(), None)
            }
        }
        (Model::Pfa(_), _) | (_, Model::Pfa(_)) => {
            notes.push_str(PFA_NOTICE);
            return Err(Failure(
                "an automaton can only be compared with another automaton; its stop-symbol HMM has the extra symbol '$'"
                    .into(),
            ));
        }
        _ => (test_equivalence(&compile(x), &compile(y), opts)?, x.alphabet().clone(), None),
    };
    let code = if verdict.equivalent { EXIT_OK } else { EXIT_DIFFERENT };
    let label = mode_label::<S>(common.tolerance);
    match common.format {
        Format::Text => text_verdict(&verdict, &alphabet, x.alphabet(), pfa.as_ref(), &label, common.decimal, out),
        Format::Json => {
            let mut doc = json!({
                "schema": schema("equiv"),
                "equivalent": verdict.equivalent,
                "exact": verdict.is_exact(),
                "tolerance": if verdict.is_exact() { Value::Null } else { json!(common.tolerance) },
                "reason": verdict.reason.as_str(),
                "dims": [verdict.dims.0, verdict.dims.1],
                "basis": { "rows": verdict.basis_size.0, "cols": verdict.basis_size.1 },
                "witness": verdict.witness.as_ref().map(|w| alphabet.format_word(w)),
                "values": verdict.values.as_ref().map(|(p, q)| [p.format_literal(), q.format_literal()]),
            });
            if let Some((w, vals)) = &pfa {
                doc["pfa_witness"] = json!(w.as_ref().map(|w| x.alphabet().format_word(w)));
                doc["pfa_values"] = json!(vals.as_ref().map(|(p, q)| [p.format_literal(), q.format_literal()]));
            }
            if let Some(e) = &verdict.search_error {
                doc["search_error"] = json!(e.to_string());
            }
            emit(out, doc);
        }
    }
    Ok(code)
}

#[allow(clippy::type_complexity)]
fn text_verdict<S: ParseScalar>(
    v: &Verdict<S>,
    alphabet: &Alphabet,
    user_alphabet: &Alphabet,
    pfa: Option<&(Option<Word>, Option<(S, S)>)>,
    label: &str,
    decimal: bool,
    out: &mut String,
) {
    let head = if v.equivalent { "equivalent" } else { "not equivalent" };
    let _ = writeln!(out, "{head} ({label})");
    let _ = writeln!(out, "reason: {}", v.reason);
    let _ = writeln!(out, "dims: {} {}", v.dims.0, v.dims.1);
    let _ = writeln!(out, "basis: |I|={} |J|={}", v.basis_size.0, v.basis_size.1);
    if let Some(w) = &v.witness {
        let label = if pfa.is_some() { "stop-symbol witness" } else { "witness" };
        let _ = writeln!(out, "{label}: {}", alphabet.format_word(w));
    }
    if let Some((p, q)) = &v.values {
        let _ = writeln!(out, "values: {} {}", show(p, decimal), show(q, decimal));
    }
    if let Some((w, vals)) = pfa {
        if let Some(w) = w {
            let _ = writeln!(out, "accepted-word witness: {}", user_alphabet.format_word(w));
        }
        if let Some((p, q)) = vals {
            let _ = writeln!(out, "acceptance: {} {}", show(p, decimal), show(q, decimal));
        }
    }
    if let Some(e) = &v.search_error {
        let _ = writeln!(out, "witness search: {e}");
    }
}

fn notice_pfa<S: Scalar>(m: &Model<S>, notes: &mut String) {
    if matches!(m, Model::Pfa(_)) {
        notes.push_str(PFA_NOTICE);
    }
}

fn dim<S: ParseScalar>(m: &Model<S>, tol: &Tolerance, common: &Common, out: &mut String) -> Result<i32, Failure> {
    let b = compute_basis(&compile(m), tol);
    match common.format {
        Format::Text => {
            let _ = writeln!(out, "{}", b.dim());
        }
        Format::Json => emit(
            out,
            json!({
                "schema": schema("dim"),
                "dim": b.dim(),
                "exact": S::is_exact(),
                "kind": m.kind().as_str(),
            }),
        ),
    }
    Ok(EXIT_OK)
}

fn basis<S: ParseScalar>(m: &Model<S>, tol: &Tolerance, common: &Common, out: &mut String) -> Result<i32, Failure> {
    let lr = compile(m);
    let b = compute_basis(&lr, tol);
    let alphabet = lr.alphabet();
    let words = |ws: &[Word]| ws.iter().map(|w| alphabet.format_word(w)).collect::<Vec<_>>();
    match common.format {
        Format::Text => {
            let _ = writeln!(out, "dim: {}", b.dim());
            let _ = writeln!(out, "I: {}", words(b.rows()).join(", "));
            let _ = writeln!(out, "J: {}", words(b.cols()).join(", "));
            let _ = writeln!(out, "P:");
            for row in b.matrix().iter_rows() {
                let cells: Vec<String> = row.iter().map(|x| show(x, common.decimal)).collect();
                let _ = writeln!(out, "  {}", cells.join(" "));
            }
        }
        Format::Json => emit(
            out,
            json!({
                "schema": schema("basis"),
                "dim": b.dim(),
                "exact": S::is_exact(),
                "I": words(b.rows()),
                "J": words(b.cols()),
                "P": b.matrix().iter_rows()
                    .map(|r| r.iter().map(ParseScalar::format_literal).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
                "generator": words(b.generator()),
                "row_iterations": b.stats().row_iterations,
                "column_iterations": b.stats().column_iterations,
            }),
        ),
    }
    Ok(EXIT_OK)
}

fn prob<S: ParseScalar>(m: &Model<S>, word: &str, common: &Common, out: &mut String) -> Result<i32, Failure> {
    let w = m.alphabet().parse_word(word)?;
    let p = match m {
        Model::Pfa(pfa) => pfa.acceptance(&w),
        _ => compile(m).prob(&w)?,
    };
    match common.format {
        Format::Text => {
            let _ = writeln!(out, "{}", show(&p, common.decimal));
        }
        Format::Json => emit(
            out,
            json!({
                "schema": schema("prob"),
                "word": m.alphabet().format_word(&w),
                "probability": p.format_literal(),
                "exact": S::is_exact(),
                "acceptance": matches!(m, Model::Pfa(_)),
            }),
        ),
    }
    Ok(EXIT_OK)
}

fn oracle_table<S: ParseScalar>(
    m: &Model<S>,
    length: usize,
    budget: usize,
    common: &Common,
    out: &mut String,
    notes: &mut String,
) -> Result<i32, Failure> {
    notice_pfa(m, notes);
    let lr = compile(m);
    let table = enumerate_probs(&lr, length, budget)?;
    let alphabet = lr.alphabet();
    match common.format {
        Format::Text => {
            for (w, p) in &table.entries {
                let _ = writeln!(out, "{} {}", alphabet.format_word(w), show(p, common.decimal));
            }
        }
        Format::Json => emit(
            out,
            json!({
                "schema": schema("oracle"),
                "length": length,
                "exact": S::is_exact(),
                "table": table.entries.iter()
                    .map(|(w, p)| json!([alphabet.format_word(w), p.format_literal()]))
                    .collect::<Vec<_>>(),
            }),
        ),
    }
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn oracle_compare<S: ParseScalar>(
    x: &Model<S>,
    y: &Model<S>,
    length: usize,
    budget: usize,
    tol: &Tolerance,
    common: &Common,
    out: &mut String,
    notes: &mut String,
) -> Result<i32, Failure> {
    notice_pfa(x, notes);
    let (lx, ly) = (compile(x), compile(y));
    let cmp = brute_equiv(&lx, &ly, length, budget, tol)?;
    let values = cmp
        .witness
        .as_ref()
        .map(|w| -> Result<(S, S), Failure> { Ok((lx.prob(w)?, ly.prob(w)?)) })
        .transpose()?;
    let alphabet = lx.alphabet();
    match common.format {
        Format::Text => match (&cmp.witness, &values) {
            (Some(w), Some((p, q))) => {
                let _ = writeln!(out, "differ at {}: {} {}", alphabet.format_word(w), show(p, common.decimal), show(q, common.decimal));
            }
            _ => {
                let _ = writeln!(out, "equal up to length {length} ({})", mode_label::<S>(common.tolerance));
            }
        },
        Format::Json => emit(
            out,
            json!({
                "schema": schema("oracle-compare"),
                "length": length,
                "exact": S::is_exact(),
                "equal": cmp.equal_up_to_len,
                "witness": cmp.witness.as_ref().map(|w| alphabet.format_word(w)),
                "values": values.as_ref().map(|(p, q)| [p.format_literal(), q.format_literal()]),
            }),
        ),
    }
    Ok(if cmp.equal_up_to_len { EXIT_OK } else { EXIT_DIFFERENT })
}

//! Line-oriented text format for models.
//!
//! ```text
//! kind: hmm
//! mode: exact
//! alphabet: a b
//! n: 2
//! pi: 1/2 1/2
//! M:
//!   1/2 1/2
//!   1 0
//! E:
//!   1 0
//!   1/3 2/3
//! ```
//!
//! Walks use `k`, `labels` (one symbol per coordinate), `U` (k rows of k
//! complex numbers) and `psi0`; automata use `n`, `pi`, `F` and one
//! `Ma <symbol>:` block of `n` rows per symbol. `#` starts a comment.
//! Numbers are whitespace separated; brackets and commas are ignored.
//!
//! In exact mode numbers are integers or `p/q`; in float mode they are
//! integers or decimals (`0.5`, `1e-3`). Complex numbers are written
//! `re+imi` / `re-imi`; the serializer always writes this full form.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::linalg::Matrix;
use crate::model::{
    AlphabetError, AnyModel, HmmModel, Model, ModelKind, PfaModel, QrwModel, Violations, Alphabet,
};
use crate::scalar::{Complex, NumericMode, Rational, Scalar, Tolerance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: unknown model kind {kind:?}")]
    UnknownKind { line: usize, kind: String },
    #[error("line {line}, column {column}: literal {literal:?} does not match {mode} mode")]
    MixedModes {
        line: usize,
        column: usize,
        literal: String,
        mode: NumericMode,
    },
    #[error("line {line}: {source}")]
    Alphabet {
        line: usize,
        #[source]
        source: AlphabetError,
    },
    #[error("invalid model: {0}")]
    Invalid(#[from] Violations),
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

#[derive(Clone, Debug)]
struct Token {
    text: String,
    line: usize,
    column: usize,
}

#[derive(Clone, Debug)]
struct Entry {
    line: usize,
    value: Vec<Token>,
    rows: Vec<Vec<Token>>,
}

fn tokenize(text: &str, line: usize, offset: usize) -> Vec<Token> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let chars: Vec<char> = text.chars().collect();
    for (i, &c) in chars.iter().chain(std::iter::once(&' ')).enumerate() {
        let sep = c.is_whitespace() || c == ',' || c == '[' || c == ']';
        match (sep, start) {
            (true, Some(s)) => {
                out.push(Token {
                    text: chars[s..i].iter().collect(),
                    line,
                    column: offset + s + 1,
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    out
}

/// Splits the file into `key: value` entries; lines without a colon are rows
/// of the most recent entry.
fn entries(text: &str) -> Result<HashMap<String, Entry>, ParseError> {
    let mut map: HashMap<String, Entry> = HashMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        match content.find(':') {
            Some(colon) => {
                let key = content[..colon].split_whitespace().collect::<Vec<_>>().join(" ");
                if key.is_empty() {
                    return Err(syntax(line, colon + 1, "missing key before ':'"));
                }
                if map.contains_key(&key) {
                    return Err(syntax(line, 1, format!("duplicate key {key:?}")));
                }
                let value_offset = content[..colon + 1].chars().count();
                let value = tokenize(&content[colon + 1..], line, value_offset);
                map.insert(
                    key.clone(),
                    Entry {
                        line,
                        value,
                        rows: Vec::new(),
                    },
                );
                current = Some(key);
            }
            None => {
                let Some(key) = &current else {
                    return Err(syntax(line, 1, "data row before any key"));
                };
                let entry = map.get_mut(key).expect("current key was inserted");
                if !entry.value.is_empty() {
                    return Err(syntax(line, 1, format!("unexpected row after {key:?}")));
                }
                entry.rows.push(tokenize(content, line, 0));
            }
        }
    }
    Ok(map)
}

struct Reader {
    map: HashMap<String, Entry>,
    mode: NumericMode,
}

impl Reader {
    fn take(&mut self, key: &str) -> Result<Entry, ParseError> {
        self.map
            .remove(key)
            .ok_or_else(|| syntax(0, 0, format!("missing key {key:?}")))
    }

    fn single(&mut self, key: &str) -> Result<Token, ParseError> {
        let entry = self.take(key)?;
        match (entry.value.len(), entry.rows.is_empty()) {
            (1, true) => Ok(entry.value.into_iter().next().expect("one token")),
            _ => Err(syntax(entry.line, 1, format!("{key} expects a single value"))),
        }
    }

    fn count(&mut self, key: &str) -> Result<usize, ParseError> {
        let tok = self.single(key)?;
        tok.text
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| syntax(tok.line, tok.column, format!("{key} must be a positive integer")))
    }

    fn list(&mut self, key: &str, len: usize) -> Result<Vec<Token>, ParseError> {
        let entry = self.take(key)?;
        if !entry.rows.is_empty() {
            return Err(syntax(entry.line, 1, format!("{key} expects its values on one line")));
        }
        if entry.value.len() != len {
            return Err(syntax(
                entry.line,
                1,
                format!("{key} expects {len} values, found {}", entry.value.len()),
            ));
        }
        Ok(entry.value)
    }

    fn rows(&mut self, key: &str, rows: usize, cols: usize) -> Result<Vec<Vec<Token>>, ParseError> {
        let entry = self.take(key)?;
        if !entry.value.is_empty() {
            return Err(syntax(entry.line, 1, format!("{key} expects its rows on the following lines")));
        }
        if entry.rows.len() != rows {
            return Err(syntax(
                entry.line,
                1,
                format!("{key} expects {rows} rows, found {}", entry.rows.len()),
            ));
        }
        for row in &entry.rows {
            if row.len() != cols {
                let line = row.first().map_or(entry.line, |t| t.line);
                return Err(syntax(
                    line,
                    1,
                    format!("{key} rows need {cols} values, found {}", row.len()),
                ));
            }
        }
        Ok(entry.rows)
    }

    fn finish(self) -> Result<(), ParseError> {
        let mut leftover: Vec<(&String, &Entry)> = self.map.iter().collect();
        leftover.sort_by_key(|(_, e)| e.line);
        match leftover.first() {
            Some((key, e)) => Err(syntax(e.line, 1, format!("unexpected key {key:?}"))),
            None => Ok(()),
        }
    }
}

fn is_float_literal(s: &str) -> bool {
    s.contains(['.', 'e', 'E']) || s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("nan")
}

/// Parses one real literal in the given mode.
pub trait ParseScalar: Scalar {
    fn parse_literal(text: &str) -> Result<Self, LiteralError>;
    fn format_literal(&self) -> String;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LiteralError {
    WrongMode,
    Malformed,
}

impl ParseScalar for Rational {
    fn parse_literal(text: &str) -> Result<Self, LiteralError> {
        if is_float_literal(text) {
            return Err(LiteralError::WrongMode);
        }
        let valid = {
            let body = text.strip_prefix(['-', '+']).unwrap_or(text);
            let mut parts = body.splitn(2, '/');
            let num = parts.next().unwrap_or("");
            let den = parts.next();
            !num.is_empty()
                && num.bytes().all(|b| b.is_ascii_digit())
                && den.is_none_or(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
        };
        if !valid {
            return Err(LiteralError::Malformed);
        }
        text.trim_start_matches('+')
            .parse::<Rational>()
            .map_err(|_| LiteralError::Malformed)
    }

    fn format_literal(&self) -> String {
        self.to_string()
    }
}

impl ParseScalar for f64 {
    fn parse_literal(text: &str) -> Result<Self, LiteralError> {
        if text.contains('/') {
            return Err(LiteralError::WrongMode);
        }
        match text.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(LiteralError::Malformed),
        }
    }

    fn format_literal(&self) -> String {
        let x = if *self == 0.0 { 0.0 } else { *self };
        format!("{x:?}")
    }
}

fn scalar<S: ParseScalar>(tok: &Token, mode: NumericMode) -> Result<S, ParseError> {
    S::parse_literal(&tok.text).map_err(|e| match e {
        LiteralError::WrongMode => ParseError::MixedModes {
            line: tok.line,
            column: tok.column,
            literal: tok.text.clone(),
            mode,
        },
        LiteralError::Malformed => syntax(tok.line, tok.column, format!("malformed number {:?}", tok.text)),
    })
}

/// Splits `re+imi` into real and imaginary literal text.
fn split_complex(text: &str) -> (String, String) {
    let Some(body) = text.strip_suffix('i') else {
        return (text.to_string(), "0".to_string());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).find(|&i| {
        (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E')
    });
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = im.strip_prefix('+').unwrap_or(im);
    let im = match im {
        "" => "1".to_string(),
        "-" => "-1".to_string(),
        other => other.to_string(),
    };
    (re.to_string(), im)
}

fn complex<S: ParseScalar>(tok: &Token, mode: NumericMode) -> Result<Complex<S>, ParseError> {
    let (re, im) = split_complex(&tok.text);
    let part = |text: String| Token {
        text,
        line: tok.line,
        column: tok.column,
    };
    let re = scalar(&part(re), mode).map_err(|e| rewrap(e, tok))?;
    let im = scalar(&part(im), mode).map_err(|e| rewrap(e, tok))?;
    Ok(Complex::new(re, im))
}

fn rewrap(e: ParseError, tok: &Token) -> ParseError {
    match e {
        ParseError::MixedModes { line, column, mode, .. } => ParseError::MixedModes {
            line,
            column,
            literal: tok.text.clone(),
            mode,
        },
        ParseError::Syntax { line, column, .. } => {
            syntax(line, column, format!("malformed complex number {:?}", tok.text))
        }
        other => other,
    }
}

fn alphabet_from(tokens: &[Token], line: usize) -> Result<Alphabet, ParseError> {
    Alphabet::new_user(tokens.iter().map(|t| t.text.clone()))
        .map_err(|source| ParseError::Alphabet { line, source })
}

fn parse_typed<S: ParseScalar>(
    kind: ModelKind,
    mut reader: Reader,
    tol: &Tolerance,
) -> Result<Model<S>, ParseError> {
    let mode = reader.mode;
    let alpha_entry = reader.take("alphabet")?;
    if alpha_entry.value.is_empty() || !alpha_entry.rows.is_empty() {
        return Err(syntax(alpha_entry.line, 1, "alphabet expects symbols on one line"));
    }
    let alphabet = alphabet_from(&alpha_entry.value, alpha_entry.line)?;
    let sigma = alphabet.len();
    let vec_of = |toks: Vec<Token>| -> Result<Vec<S>, ParseError> {
        toks.iter().map(|t| scalar::<S>(t, mode)).collect()
    };
    let mat_of = |rows: Vec<Vec<Token>>, cols: usize| -> Result<Matrix<S>, ParseError> {
        let rows = rows.into_iter().map(&vec_of).collect::<Result<Vec<_>, _>>()?;
        Ok(Matrix::from_rows(rows, cols).expect("row lengths checked by reader"))
    };

    let model = match kind {
        ModelKind::Hmm => {
            let n = reader.count("n")?;
            let pi = vec_of(reader.list("pi", n)?)?;
            let m = mat_of(reader.rows("M", n, n)?, n)?;
            let e = mat_of(reader.rows("E", n, sigma)?, sigma)?;
            reader.finish()?;
            Model::Hmm(HmmModel::new(alphabet, pi, m, e, tol)?)
        }
        ModelKind::Qrw => {
            let k = reader.count("k")?;
            let label_toks = reader.list("labels", k)?;
            let labels = label_toks
                .iter()
                .map(|t| {
                    alphabet.index_of(&t.text).ok_or_else(|| ParseError::Alphabet {
                        line: t.line,
                        source: AlphabetError::UnknownSymbol(t.text.clone()),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let rows = reader.rows("U", k, k)?;
            let rows = rows
                .iter()
                .map(|r| r.iter().map(|t| complex::<S>(t, mode)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            let u = Matrix::from_rows(rows, k).expect("row lengths checked by reader");
            let psi0 = reader
                .list("psi0", k)?
                .iter()
                .map(|t| complex::<S>(t, mode))
                .collect::<Result<Vec<_>, _>>()?;
            reader.finish()?;
            Model::Qrw(QrwModel::new(alphabet, labels, u, psi0, tol)?)
        }
        ModelKind::Pfa => {
            let n = reader.count("n")?;
            let pi = vec_of(reader.list("pi", n)?)?;
            let f = vec_of(reader.list("F", n)?)?;
            let mut mats = Vec::with_capacity(sigma);
            for symbol in alphabet.symbols() {
                mats.push(mat_of(reader.rows(&format!("Ma {symbol}"), n, n)?, n)?);
            }
            reader.finish()?;
            Model::Pfa(PfaModel::new(alphabet, pi, f, mats, tol)?)
        }
    };
    Ok(model)
}

/// Parses and validates a model, checking float-mode normalization with the
/// default tolerance.
pub fn parse_model(text: &str) -> Result<AnyModel, ParseError> {
    parse_model_with(text, &Tolerance::default())
}

pub fn parse_model_with(text: &str, tol: &Tolerance) -> Result<AnyModel, ParseError> {
    let mut map = entries(text)?;
    let kind_tok = take_single(&mut map, "kind")?;
    let kind = match kind_tok.text.as_str() {
        "hmm" => ModelKind::Hmm,
        "qrw" => ModelKind::Qrw,
        "pfa" => ModelKind::Pfa,
        other => {
            return Err(ParseError::UnknownKind {
                line: kind_tok.line,
                kind: other.to_string(),
            })
        }
    };
    let mode_tok = take_single(&mut map, "mode")?;
    let mode = match mode_tok.text.as_str() {
        "exact" => NumericMode::Exact,
        "float" => NumericMode::Float,
        other => {
            return Err(syntax(
                mode_tok.line,
                mode_tok.column,
                format!("mode must be exact or float, found {other:?}"),
            ))
        }
    };
    let reader = Reader { map, mode };
    Ok(match mode {
        NumericMode::Exact => AnyModel::Exact(parse_typed::<Rational>(kind, reader, tol)?),
        NumericMode::Float => AnyModel::Float(parse_typed::<f64>(kind, reader, tol)?),
    })
}

fn take_single(map: &mut HashMap<String, Entry>, key: &str) -> Result<Token, ParseError> {
    let entry = map
        .remove(key)
        .ok_or_else(|| syntax(1, 1, format!("missing key {key:?}")))?;
    if entry.value.len() != 1 || !entry.rows.is_empty() {
        return Err(syntax(entry.line, 1, format!("{key} expects a single value")));
    }
    Ok(entry.value.into_iter().next().expect("one token"))
}

struct Out(String);

impl Out {
    fn line(&mut self, s: impl fmt::Display) {
        self.0.push_str(&s.to_string());
        self.0.push('\n');
    }

    fn values<S: ParseScalar>(&mut self, key: &str, xs: &[S]) {
        let parts: Vec<String> = xs.iter().map(ParseScalar::format_literal).collect();
        self.line(format!("{key}: {}", parts.join(" ")));
    }

    fn matrix<S: ParseScalar>(&mut self, key: &str, m: &Matrix<S>) {
        self.line(format!("{key}:"));
        for row in m.iter_rows() {
            let parts: Vec<String> = row.iter().map(ParseScalar::format_literal).collect();
            self.line(format!("  {}", parts.join(" ")));
        }
    }
}

pub fn format_complex<S: ParseScalar>(z: &Complex<S>) -> String {
    let re = z.re.format_literal();
    let im = if z.im.is_negative() {
        format!("-{}", (S::zero() - z.im.clone()).format_literal())
    } else {
        format!("+{}", z.im.format_literal())
    };
    format!("{re}{im}i")
}

fn serialize_typed<S: ParseScalar>(model: &Model<S>, mode: NumericMode) -> String {
    let mut out = Out(String::new());
    out.line(format!("kind: {}", model.kind()));
    out.line(format!("mode: {mode}"));
    let alphabet = model.alphabet();
    out.line(format!("alphabet: {}", alphabet.symbols().join(" ")));
    match model {
        Model::Hmm(m) => {
            out.line(format!("n: {}", m.states()));
            out.values("pi", m.initial());
            out.matrix("M", m.transition());
            out.matrix("E", m.emission());
        }
        Model::Qrw(m) => {
            out.line(format!("k: {}", m.coordinates()));
            let labels: Vec<&str> = m.labels().iter().map(|&a| alphabet.symbol(a)).collect();
            out.line(format!("labels: {}", labels.join(" ")));
            out.line("U:");
            for row in m.unitary().iter_rows() {
                let parts: Vec<String> = row.iter().map(format_complex).collect();
                out.line(format!("  {}", parts.join(" ")));
            }
            let psi: Vec<String> = m.psi0().iter().map(format_complex).collect();
            out.line(format!("psi0: {}", psi.join(" ")));
        }
        Model::Pfa(m) => {
            out.line(format!("n: {}", m.states()));
            out.values("pi", m.initial());
            out.values("F", m.finals());
            for (symbol, mat) in alphabet.symbols().iter().zip(m.transitions()) {
                out.matrix(&format!("Ma {symbol}"), mat);
            }
        }
    }
    out.0
}

/// Canonical text for a model: fixed key order, lowest-terms rationals,
/// full-form complex numbers.
pub fn serialize_model(model: &AnyModel) -> String {
    match model {
        AnyModel::Exact(m) => serialize_typed(m, NumericMode::Exact),
        AnyModel::Float(m) => serialize_typed(m, NumericMode::Float),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const COIN: &str = "kind: hmm\nmode: exact\nalphabet: a b\nn: 1\npi: 1\nM:\n  1\nE:\n  1/2 1/2\n";

    #[test]
    fn minimal_hmm_round_trips() {
        let model = parse_model(COIN).unwrap();
        assert_eq!(model.kind(), ModelKind::Hmm);
        assert_eq!(serialize_model(&model), COIN);
    }

    #[test]
    fn bracketed_lists_and_comments() {
        let text = "# three states\nkind: hmm\nmode: exact\nalphabet: a\nn: 3\npi: [1/3, 1/3, 1/3]\n\
                    M:\n 1 0 0\n 0 1 0\n 0 0 1 # identity\nE:\n 1\n 1\n 1\n";
        assert!(parse_model(text).is_ok());
        let bad = text.replace("[1/3, 1/3, 1/3]", "[1/3, 1/3, 1/4]");
        match parse_model(&bad) {
            Err(ParseError::Invalid(v)) => assert_eq!(v.0[0].message, "pi sums to 11/12"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_unitary_walk() {
        let text = "kind: qrw\nmode: exact\nalphabet: a b\nk: 2\nlabels: a b\nU:\n  1+0i 1+0i\n  0+0i 1+0i\npsi0: 1+0i 0+0i\n";
        match parse_model(text) {
            Err(ParseError::Invalid(v)) => {
                assert_eq!(v.0[0].message, "unitarity violated at entry (0,0)")
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reserved_symbol_rejected() {
        let text = COIN.replace("alphabet: a b", "alphabet: a $");
        assert!(matches!(
            parse_model(&text),
            Err(ParseError::Alphabet {
                line: 3,
                source: AlphabetError::Reserved(_)
            })
        ));
    }

    #[test]
    fn mixed_modes_rejected() {
        let text = COIN.replace("1/2 1/2", "0.5 1/2");
        assert!(matches!(
            parse_model(&text),
            Err(ParseError::MixedModes { line: 9, column: 3, .. })
        ));
        let float = COIN.replace("exact", "float").replace("1/2 1/2", "0.5 1/2");
        assert!(matches!(
            parse_model(&float),
            Err(ParseError::MixedModes { line: 9, column: 7, .. })
        ));
    }

    #[test]
    fn unknown_kind_and_syntax_errors() {
        let text = COIN.replace("kind: hmm", "kind: dfa");
        assert!(matches!(parse_model(&text), Err(ParseError::UnknownKind { line: 1, .. })));
        let text = COIN.replace("  1/2 1/2", "  1/2");
        assert!(matches!(parse_model(&text), Err(ParseError::Syntax { line: 9, .. })));
        let text = COIN.replace("1/2 1/2", "1/2 x");
        assert!(matches!(
            parse_model(&text),
            Err(ParseError::Syntax { line: 9, column: 7, .. })
        ));
    }

    #[test]
    fn lowest_terms_on_output() {
        let text = COIN.replace("1/2 1/2", "2/4 3/6");
        assert_eq!(serialize_model(&parse_model(&text).unwrap()), COIN);
    }

    #[test]
    fn complex_literals() {
        assert_eq!(split_complex("1/2+-1/2i"), ("1/2".into(), "-1/2".into()));
        assert_eq!(split_complex("-1/2-1/2i"), ("-1/2".into(), "-1/2".into()));
        assert_eq!(split_complex("1e-3+2e-3i"), ("1e-3".into(), "2e-3".into()));
        assert_eq!(split_complex("3"), ("3".into(), "0".into()));
        assert_eq!(split_complex("i"), ("0".into(), "1".into()));
        assert_eq!(split_complex("-i"), ("0".into(), "-1".into()));
        let z = Complex::new(Rational::from_ratio(1, 2), Rational::from_ratio(-1, 2));
        assert_eq!(format_complex(&z), "1/2-1/2i");
        let z = Complex::new(Rational::from_int(0), Rational::from_int(1));
        assert_eq!(format_complex(&z), "0+1i");
    }

    #[test]
    fn float_formatting_keeps_mode() {
        assert_eq!(1.0f64.format_literal(), "1.0");
        assert_eq!((-0.0f64).format_literal(), "0.0");
        assert_eq!(f64::parse_literal("1.0").unwrap(), 1.0);
        assert!(is_float_literal(&1e-12f64.format_literal()));
    }
}

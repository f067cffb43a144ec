//! Model parametrizations: hidden Markov models, quantum random walks and
//! probabilistic automata, plus the shared [`Alphabet`] and [`Word`] types.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::linalg::Matrix;
use crate::scalar::{norm_sqr, sum, Complex, NumericMode, Rational, Scalar, Tolerance};

/// Reserved symbol appended to PFA alphabets by [`pfa_to_hmm`].
pub const STOP_SYMBOL: &str = "$";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlphabetError {
    #[error("alphabet is empty")]
    Empty,
    #[error("empty symbol token")]
    EmptyToken,
    #[error("symbol {0:?} contains whitespace")]
    Whitespace(String),
    #[error("duplicate symbol {0:?}")]
    Duplicate(String),
    #[error("symbol {0:?} is reserved")]
    Reserved(String),
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("symbol index {0} out of range")]
    IndexOutOfRange(usize),
}

/// Ordered set of distinct symbol tokens. The order is canonical for every
/// iteration over symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<I, T>(symbols: I) -> Result<Self, AlphabetError>
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(AlphabetError::Empty);
        }
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() {
                return Err(AlphabetError::EmptyToken);
            }
            if s.chars().any(char::is_whitespace) {
                return Err(AlphabetError::Whitespace(s.clone()));
            }
            if symbols[..i].contains(s) {
                return Err(AlphabetError::Duplicate(s.clone()));
            }
        }
        Ok(Alphabet { symbols })
    }

    /// Like [`Alphabet::new`] but also rejects the reserved stop symbol.
    pub fn new_user<I, T>(symbols: I) -> Result<Self, AlphabetError>
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        let alphabet = Alphabet::new(symbols)?;
        if alphabet.index_of(STOP_SYMBOL).is_some() {
            return Err(AlphabetError::Reserved(STOP_SYMBOL.to_string()));
        }
        Ok(alphabet)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, index: usize) -> &str {
        &self.symbols[index]
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == symbol)
    }

    /// This alphabet followed by [`STOP_SYMBOL`].
    pub fn with_stop_symbol(&self) -> Alphabet {
        let mut symbols = self.symbols.clone();
        symbols.push(STOP_SYMBOL.to_string());
        Alphabet { symbols }
    }

    pub fn stop_index(&self) -> Option<usize> {
        self.index_of(STOP_SYMBOL)
    }

    fn single_char(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1)
    }

    /// Parses a word. With single-character symbols the word may be written
    /// without separators (`"abba"`); otherwise symbols are separated by
    /// whitespace, commas or dots. `""` and `"□"` denote the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word, AlphabetError> {
        let text = text.trim();
        if text.is_empty() || text == Word::EMPTY_GLYPH {
            return Ok(Word::empty());
        }
        let separated = text.contains(|c: char| c.is_whitespace() || c == ',' || c == '.');
        let tokens: Vec<String> = if separated || !self.single_char() {
            text.split(|c: char| c.is_whitespace() || c == ',' || c == '.')
                .filter(|t| !t.is_empty())
                .map(str::to_string)
                .collect()
        } else {
            text.chars().map(String::from).collect()
        };
        tokens
            .iter()
            .map(|t| {
                self.index_of(t)
                    .ok_or_else(|| AlphabetError::UnknownSymbol(t.clone()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word::from)
    }

    /// Inverse of [`Alphabet::parse_word`]; the empty word prints as `□`.
    pub fn format_word(&self, word: &Word) -> String {
        if word.is_empty() {
            return Word::EMPTY_GLYPH.to_string();
        }
        let sep = if self.single_char() { "" } else { " " };
        word.iter()
            .map(|&i| self.symbol(i))
            .collect::<Vec<_>>()
            .join(sep)
    }

    pub fn check_word(&self, word: &Word) -> Result<(), AlphabetError> {
        match word.iter().find(|&&i| i >= self.len()) {
            Some(&i) => Err(AlphabetError::IndexOutOfRange(i)),
            None => Ok(()),
        }
    }
}

/// Finite sequence of symbol indices. Ordered by length first, then
/// lexicographically by symbol index.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<usize>);

impl Word {
    pub const EMPTY_GLYPH: &'static str = "□";

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, usize> {
        self.0.iter()
    }

    /// `a·self`
    pub fn prepend(&self, symbol: usize) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(symbol);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    /// `self·a`
    pub fn append(&self, symbol: usize) -> Word {
        let mut v = self.0.clone();
        v.push(symbol);
        Word(v)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Every word over `alphabet_size` symbols of length at most `max_len`,
    /// in length-then-lexicographic order.
    pub fn all_up_to(alphabet_size: usize, max_len: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        let mut level = vec![Word::empty()];
        for _ in 0..max_len {
            let next: Vec<Word> = level
                .iter()
                .flat_map(|w| (0..alphabet_size).map(move |a| w.append(a)))
                .collect();
            out.extend(next.iter().cloned());
            level = next;
        }
        out
    }
}

impl From<Vec<usize>> for Word {
    fn from(v: Vec<usize>) -> Self {
        Word(v)
    }
}

impl<'a> IntoIterator for &'a Word {
    type Item = &'a usize;
    type IntoIter = std::slice::Iter<'a, usize>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A single invariant violation with the offending field path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl Violation {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Violation {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Non-empty list of violations, returned when a model fails validation.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct Violations(pub Vec<Violation>);

impl fmt::Display for Violations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("; "))
    }
}

fn ok_or_violations(v: Vec<Violation>) -> Result<(), Violations> {
    if v.is_empty() {
        Ok(())
    } else {
        Err(Violations(v))
    }
}

fn check_nonnegative<S: Scalar>(out: &mut Vec<Violation>, path: String, x: &S, tol: &Tolerance) {
    let negative = if S::is_exact() {
        x.is_negative()
    } else {
        x.to_f64() < -tol.compare || !x.to_f64().is_finite()
    };
    if negative {
        out.push(Violation::new(path, format!("negative entry {x}")));
    }
}

fn check_distribution<S: Scalar>(
    out: &mut Vec<Violation>,
    path: &str,
    label: &str,
    values: &[S],
    tol: &Tolerance,
) {
    for (j, x) in values.iter().enumerate() {
        check_nonnegative(out, format!("{path}[{j}]"), x, tol);
    }
    let total = sum(values);
    if !total.approx_eq(&S::one(), tol) {
        out.push(Violation::new(path, format!("{label} sums to {total}")));
    }
}

fn check_shape<T>(out: &mut Vec<Violation>, path: &str, m: &Matrix<T>, rows: usize, cols: usize) -> bool {
    if m.rows() != rows || m.cols() != cols {
        out.push(Violation::new(
            path,
            format!("expected {rows}x{cols} matrix, found {}x{}", m.rows(), m.cols()),
        ));
        false
    } else {
        true
    }
}

/// Hidden Markov model: a state emits a symbol according to its emission
/// row, then moves according to its transition row.
#[derive(Clone, Debug, PartialEq)]
pub struct HmmModel<S> {
    alphabet: Alphabet,
    initial: Vec<S>,
    transition: Matrix<S>,
    emission: Matrix<S>,
}

impl<S: Scalar> HmmModel<S> {
    /// `transition` is `n x n`, `emission` is `n x |alphabet|`.
    pub fn new(
        alphabet: Alphabet,
        initial: Vec<S>,
        transition: Matrix<S>,
        emission: Matrix<S>,
        tol: &Tolerance,
    ) -> Result<Self, Violations> {
        let model = HmmModel {
            alphabet,
            initial,
            transition,
            emission,
        };
        ok_or_violations(model.violations(tol))?;
        Ok(model)
    }

    pub fn violations(&self, tol: &Tolerance) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.initial.len();
        if n == 0 {
            out.push(Violation::new("n", "model needs at least one state"));
        }
        let m_ok = check_shape(&mut out, "M", &self.transition, n, n);
        let e_ok = check_shape(&mut out, "E", &self.emission, n, self.alphabet.len());
        check_distribution(&mut out, "pi", "pi", &self.initial, tol);
        if m_ok {
            for (i, row) in self.transition.iter_rows().enumerate() {
                check_distribution(&mut out, &format!("M[{i}]"), &format!("M row {i}"), row, tol);
            }
        }
        if e_ok {
            for (i, row) in self.emission.iter_rows().enumerate() {
                check_distribution(&mut out, &format!("E[{i}]"), &format!("E row {i}"), row, tol);
            }
        }
        out
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn states(&self) -> usize {
        self.initial.len()
    }

    pub fn initial(&self) -> &[S] {
        &self.initial
    }

    pub fn transition(&self) -> &Matrix<S> {
        &self.transition
    }

    pub fn emission(&self) -> &Matrix<S> {
        &self.emission
    }
}

/// Quantum random walk: evolve with `U`, then collapse onto the coordinate
/// block of the emitted symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct QrwModel<S> {
    alphabet: Alphabet,
    labels: Vec<usize>,
    unitary: Matrix<Complex<S>>,
    psi0: Vec<Complex<S>>,
}

impl<S: Scalar> QrwModel<S> {
    /// `labels[m]` is the symbol index of coordinate `m`.
    pub fn new(
        alphabet: Alphabet,
        labels: Vec<usize>,
        unitary: Matrix<Complex<S>>,
        psi0: Vec<Complex<S>>,
        tol: &Tolerance,
    ) -> Result<Self, Violations> {
        let model = QrwModel {
            alphabet,
            labels,
            unitary,
            psi0,
        };
        ok_or_violations(model.violations(tol))?;
        Ok(model)
    }

    pub fn violations(&self, tol: &Tolerance) -> Vec<Violation> {
        let mut out = Vec::new();
        let k = self.labels.len();
        if k == 0 {
            out.push(Violation::new("k", "walk needs at least one coordinate"));
        }
        for (m, &a) in self.labels.iter().enumerate() {
            if a >= self.alphabet.len() {
                out.push(Violation::new(
                    format!("labels[{m}]"),
                    format!("symbol index {a} out of range"),
                ));
            }
        }
        for (a, symbol) in self.alphabet.symbols().iter().enumerate() {
            if !self.labels.contains(&a) {
                out.push(Violation::new(
                    "labels",
                    format!("symbol {symbol:?} labels no coordinate"),
                ));
            }
        }
        if self.psi0.len() != k {
            out.push(Violation::new(
                "psi0",
                format!("expected {k} entries, found {}", self.psi0.len()),
            ));
        } else {
            let norm = sum(&self.psi0.iter().map(norm_sqr).collect::<Vec<_>>());
            if !norm.approx_eq(&S::one(), tol) {
                out.push(Violation::new("psi0", format!("squared norm is {norm}, expected 1")));
            }
        }
        if check_shape(&mut out, "U", &self.unitary, k, k) {
            // (U U*)_{ij} = sum_l U_il conj(U_jl)
            'outer: for i in 0..k {
                for j in 0..k {
                    let mut re = S::zero();
                    let mut im = S::zero();
                    for l in 0..k {
                        let a = &self.unitary[(i, l)];
                        let b = &self.unitary[(j, l)];
                        re.add_product(&a.re, &b.re);
                        re.add_product(&a.im, &b.im);
                        im.add_product(&a.im, &b.re);
                        im.sub_product(&a.re, &b.im);
                    }
                    let target = if i == j { S::one() } else { S::zero() };
                    if !re.approx_eq(&target, tol) || !im.approx_eq(&S::zero(), tol) {
                        out.push(Violation::new(
                            "U",
                            format!("unitarity violated at entry ({i},{j})"),
                        ));
                        break 'outer;
                    }
                }
            }
        }
        out
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Dimension `k` of the wave-function space.
    pub fn coordinates(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn unitary(&self) -> &Matrix<Complex<S>> {
        &self.unitary
    }

    pub fn psi0(&self) -> &[Complex<S>] {
        &self.psi0
    }
}

/// Probabilistic automaton with per-state final probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct PfaModel<S> {
    alphabet: Alphabet,
    initial: Vec<S>,
    finals: Vec<S>,
    transitions: Vec<Matrix<S>>,
}

impl<S: Scalar> PfaModel<S> {
    /// `transitions[a]` is the `n x n` matrix of symbol `a`.
    pub fn new(
        alphabet: Alphabet,
        initial: Vec<S>,
        finals: Vec<S>,
        transitions: Vec<Matrix<S>>,
        tol: &Tolerance,
    ) -> Result<Self, Violations> {
        let model = PfaModel {
            alphabet,
            initial,
            finals,
            transitions,
        };
        ok_or_violations(model.violations(tol))?;
        Ok(model)
    }

    pub fn violations(&self, tol: &Tolerance) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.initial.len();
        if n == 0 {
            out.push(Violation::new("n", "automaton needs at least one state"));
        }
        check_distribution(&mut out, "pi", "pi", &self.initial, tol);
        if self.finals.len() != n {
            out.push(Violation::new(
                "F",
                format!("expected {n} entries, found {}", self.finals.len()),
            ));
        }
        for (j, x) in self.finals.iter().enumerate() {
            check_nonnegative(&mut out, format!("F[{j}]"), x, tol);
        }
        if self.transitions.len() != self.alphabet.len() {
            out.push(Violation::new(
                "Ma",
                format!(
                    "expected one matrix per symbol ({}), found {}",
                    self.alphabet.len(),
                    self.transitions.len()
                ),
            ));
            return out;
        }
        let mut shapes_ok = self.finals.len() == n;
        for (a, m) in self.transitions.iter().enumerate() {
            let path = format!("Ma {}", self.alphabet.symbol(a));
            shapes_ok &= check_shape(&mut out, &path, m, n, n);
            if m.rows() == n && m.cols() == n {
                for i in 0..n {
                    for j in 0..n {
                        check_nonnegative(&mut out, format!("{path}[{i}][{j}]"), &m[(i, j)], tol);
                    }
                }
            }
        }
        if shapes_ok {
            for s in 0..n {
                let mut total = self.finals[s].clone();
                for m in &self.transitions {
                    for x in m.row(s) {
                        total = total.add_ref(x);
                    }
                }
                if !total.approx_eq(&S::one(), tol) {
                    out.push(Violation::new(
                        format!("state {s}"),
                        format!("outgoing mass plus final probability of state {s} is {total}"),
                    ));
                }
            }
        }
        out
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn states(&self) -> usize {
        self.initial.len()
    }

    pub fn initial(&self) -> &[S] {
        &self.initial
    }

    pub fn finals(&self) -> &[S] {
        &self.finals
    }

    pub fn transitions(&self) -> &[Matrix<S>] {
        &self.transitions
    }

    /// Whether a run terminates with probability one: every state reachable
    /// from the initial distribution can reach a state with positive final
    /// probability.
    pub fn halts_almost_surely(&self) -> bool {
        let n = self.states();
        let step = |s: usize, t: usize| self.transitions.iter().any(|m| !m[(s, t)].is_zero());
        let mut reachable: Vec<bool> = self.initial.iter().map(|p| !p.is_zero()).collect();
        let mut stack: Vec<usize> = (0..n).filter(|&s| reachable[s]).collect();
        while let Some(s) = stack.pop() {
            let fresh: Vec<usize> = (0..n).filter(|&t| !reachable[t] && step(s, t)).collect();
            for t in fresh {
                reachable[t] = true;
                stack.push(t);
            }
        }
        let mut halts: Vec<bool> = self.finals.iter().map(|f| !f.is_zero()).collect();
        let mut changed = true;
        while changed {
            changed = false;
            for s in 0..n {
                if !halts[s] && (0..n).any(|t| halts[t] && step(s, t)) {
                    halts[s] = true;
                    changed = true;
                }
            }
        }
        (0..n).all(|s| !reachable[s] || halts[s])
    }

    /// Acceptance probability `pi^T M_{v1} ... M_{vt} F`.
    pub fn acceptance(&self, word: &Word) -> S {
        let mut row = self.initial.clone();
        for &a in word {
            row = self.transitions[a].left_mul(&row);
        }
        crate::scalar::dot(&row, &self.finals)
    }
}

/// Reduces a PFA over `Σ` to an HMM over `Σ ∪ {$}` whose probability of
/// `v$` equals the automaton's acceptance probability of `v`.
///
/// Hidden states are pairs (PFA state `s`, next symbol `a`) with positive
/// mass `r(s,a)` (row sum of `M_a` at `s`, or `F[s]` for `$`), plus one
/// absorbing dead state that emits `$` forever. State `(s,a)` emits `a` and
/// moves to `(s',b)` with probability `M_a[s,s'] r(s',b) / r(s,a)`; the
/// products telescope to `pi^T M_v F`.
pub fn pfa_to_hmm<S: Scalar>(pfa: &PfaModel<S>) -> HmmModel<S> {
    let sigma = pfa.alphabet.len();
    let stop = sigma;
    let n = pfa.states();
    let mass = |s: usize, a: usize| -> S {
        if a == stop {
            pfa.finals[s].clone()
        } else {
            sum(pfa.transitions[a].row(s))
        }
    };
    let mut states: Vec<(usize, usize, S)> = Vec::new();
    for s in 0..n {
        for a in 0..=sigma {
            let r = mass(s, a);
            if !r.is_zero() {
                states.push((s, a, r));
            }
        }
    }
    let dead = states.len();
    let size = dead + 1;
    let alphabet = pfa.alphabet.with_stop_symbol();

    let mut initial = vec![S::zero(); size];
    let mut emission = Matrix::zeros(size, sigma + 1);
    let mut transition = Matrix::zeros(size, size);
    for (x, (s, a, r)) in states.iter().enumerate() {
        initial[x] = pfa.initial[*s].mul_ref(r);
        emission[(x, *a)] = S::one();
        if *a == stop {
            transition[(x, dead)] = S::one();
            continue;
        }
        for (y, (t, _, r_next)) in states.iter().enumerate() {
            let step = &pfa.transitions[*a][(*s, *t)];
            if step.is_zero() {
                continue;
            }
            transition[(x, y)] = step.mul_ref(r_next) / r.clone();
        }
    }
    emission[(dead, stop)] = S::one();
    transition[(dead, dead)] = S::one();

    HmmModel {
        alphabet,
        initial,
        transition,
        emission,
    }
}

/// Any of the three model classes.
#[derive(Clone, Debug, PartialEq)]
pub enum Model<S> {
    Hmm(HmmModel<S>),
    Qrw(QrwModel<S>),
    Pfa(PfaModel<S>),
}

impl<S: Scalar> Model<S> {
    pub fn alphabet(&self) -> &Alphabet {
        match self {
            Model::Hmm(m) => m.alphabet(),
            Model::Qrw(m) => m.alphabet(),
            Model::Pfa(m) => m.alphabet(),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Hmm(_) => ModelKind::Hmm,
            Model::Qrw(_) => ModelKind::Qrw,
            Model::Pfa(_) => ModelKind::Pfa,
        }
    }

    pub fn violations(&self, tol: &Tolerance) -> Vec<Violation> {
        match self {
            Model::Hmm(m) => m.violations(tol),
            Model::Qrw(m) => m.violations(tol),
            Model::Pfa(m) => m.violations(tol),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Hmm,
    Qrw,
    Pfa,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Hmm => "hmm",
            ModelKind::Qrw => "qrw",
            ModelKind::Pfa => "pfa",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A model in whichever numeric mode its file declared.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyModel {
    Exact(Model<Rational>),
    Float(Model<f64>),
}

impl AnyModel {
    pub fn mode(&self) -> NumericMode {
        match self {
            AnyModel::Exact(_) => NumericMode::Exact,
            AnyModel::Float(_) => NumericMode::Float,
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            AnyModel::Exact(m) => m.kind(),
            AnyModel::Float(m) => m.kind(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        match self {
            AnyModel::Exact(m) => m.alphabet(),
            AnyModel::Float(m) => m.alphabet(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    fn mat(rows: Vec<Vec<Rational>>) -> Matrix<Rational> {
        Matrix::from_rows(rows, 0).unwrap()
    }

    #[test]
    fn alphabet_rules() {
        assert_eq!(Alphabet::new(Vec::<String>::new()), Err(AlphabetError::Empty));
        assert_eq!(
            Alphabet::new(["a", "a"]),
            Err(AlphabetError::Duplicate("a".into()))
        );
        assert_eq!(
            Alphabet::new_user(["a", "$"]),
            Err(AlphabetError::Reserved("$".into()))
        );
        assert!(Alphabet::new(["a", "$"]).is_ok());
    }

    #[test]
    fn word_parsing_and_formatting() {
        let sigma = ab();
        let w = sigma.parse_word("abba").unwrap();
        assert_eq!(w.symbols(), &[0, 1, 1, 0]);
        assert_eq!(sigma.format_word(&w), "abba");
        assert_eq!(sigma.parse_word("□").unwrap(), Word::empty());
        assert_eq!(sigma.format_word(&Word::empty()), "□");
        assert!(sigma.parse_word("abc").is_err());

        let long = Alphabet::new(["up", "down"]).unwrap();
        let w = long.parse_word("up down up").unwrap();
        assert_eq!(w.symbols(), &[0, 1, 0]);
        assert_eq!(long.format_word(&w), "up down up");
    }

    #[test]
    fn word_order_is_length_then_lex() {
        let mut words = vec![
            Word::from(vec![1]),
            Word::from(vec![0, 0]),
            Word::empty(),
            Word::from(vec![0]),
        ];
        words.sort();
        assert_eq!(
            words,
            vec![
                Word::empty(),
                Word::from(vec![0]),
                Word::from(vec![1]),
                Word::from(vec![0, 0])
            ]
        );
        assert_eq!(Word::all_up_to(2, 2).len(), 7);
    }

    #[test]
    fn valid_one_state_hmm() {
        let hmm = HmmModel::new(
            ab(),
            vec![q(1, 1)],
            mat(vec![vec![q(1, 1)]]),
            mat(vec![vec![q(1, 2), q(1, 2)]]),
            &Tolerance::default(),
        );
        assert!(hmm.is_ok());
    }

    #[test]
    fn hmm_row_sum_violation_reports_exact_sum() {
        let err = HmmModel::new(
            ab(),
            vec![q(1, 1), q(0, 1)],
            mat(vec![vec![q(1, 2), q(2, 5)], vec![q(0, 1), q(1, 1)]]),
            mat(vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]]),
            &Tolerance::default(),
        )
        .unwrap_err();
        assert_eq!(err.0.len(), 1);
        assert_eq!(err.0[0].message, "M row 0 sums to 9/10");
    }

    #[test]
    fn hmm_collects_every_violation() {
        let err = HmmModel::new(
            ab(),
            vec![q(1, 2)],
            mat(vec![vec![q(-1, 1)]]),
            mat(vec![vec![q(1, 2), q(1, 1)]]),
            &Tolerance::default(),
        )
        .unwrap_err();
        let paths: Vec<&str> = err.0.iter().map(|v| v.path.as_str()).collect();
        assert!(paths.contains(&"pi"));
        assert!(paths.contains(&"M[0][0]"));
        assert!(paths.contains(&"M[0]"));
        assert!(paths.contains(&"E[0]"));
    }

    fn c(re: Rational) -> Complex<Rational> {
        Complex::new(re, q(0, 1))
    }

    #[test]
    fn identity_walk_is_valid() {
        let u = Matrix::from_fn(2, 2, |i, j| c(if i == j { q(1, 1) } else { q(0, 1) }));
        let qrw = QrwModel::new(ab(), vec![0, 1], u, vec![c(q(1, 1)), c(q(0, 1))], &Tolerance::default());
        assert!(qrw.is_ok());
    }

    #[test]
    fn non_unitary_walk_is_rejected() {
        let u = Matrix::from_fn(2, 2, |_, _| c(q(1, 1)));
        let err = QrwModel::new(ab(), vec![0, 1], u, vec![c(q(1, 1)), c(q(0, 1))], &Tolerance::default())
            .unwrap_err();
        assert_eq!(err.0[0].message, "unitarity violated at entry (0,0)");
    }

    #[test]
    fn walk_requires_every_symbol_labelled() {
        let u = Matrix::from_fn(2, 2, |i, j| c(if i == j { q(1, 1) } else { q(0, 1) }));
        let err = QrwModel::new(ab(), vec![0, 0], u, vec![c(q(1, 1)), c(q(0, 1))], &Tolerance::default())
            .unwrap_err();
        assert!(err.0[0].message.contains("labels no coordinate"));
    }

    fn single_state_pfa(loop_mass: Rational, fin: Rational) -> PfaModel<Rational> {
        PfaModel::new(
            Alphabet::new(["a"]).unwrap(),
            vec![q(1, 1)],
            vec![fin],
            vec![mat(vec![vec![loop_mass]])],
            &Tolerance::default(),
        )
        .unwrap()
    }

    #[test]
    fn pfa_normalization_enforced() {
        let err = PfaModel::new(
            Alphabet::new(["a"]).unwrap(),
            vec![q(1, 1)],
            vec![q(1, 2)],
            vec![mat(vec![vec![q(1, 4)]])],
            &Tolerance::default(),
        )
        .unwrap_err();
        assert!(err.0[0].message.contains("is 3/4"));
    }

    #[test]
    fn pfa_reduction_is_a_valid_hmm() {
        let pfa = single_state_pfa(q(1, 2), q(1, 2));
        let hmm = pfa_to_hmm(&pfa);
        assert!(hmm.violations(&Tolerance::default()).is_empty());
        assert_eq!(hmm.alphabet().symbols(), &["a", "$"]);
        // (0,a), (0,$), dead
        assert_eq!(hmm.states(), 3);
    }

    #[test]
    fn pfa_acceptance_direct() {
        let pfa = single_state_pfa(q(1, 2), q(1, 2));
        assert_eq!(pfa.acceptance(&Word::from(vec![0])), q(1, 4));
        assert_eq!(pfa.acceptance(&Word::empty()), q(1, 2));
    }
}

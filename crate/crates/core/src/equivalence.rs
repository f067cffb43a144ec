//! Equivalence decision for two finitary processes.
//!
//! Compute a basis `(I, J)` for both processes. Different dimensions mean
//! different processes. Otherwise the processes are equal iff, on `X`'s basis,
//! `p(wv) = q(wv)` and `p(wav) = q(wav)` for all `v ∈ I`, `w ∈ J`, `a ∈ Σ`.
//! Equal `P_IJ = Q_IJ` together with equal dimensions makes `(I, J)` a basis
//! for `Y` as well.

use std::fmt;

use thiserror::Error;

use crate::basis::{compute_basis, Basis};
use crate::model::{pfa_to_hmm, Alphabet, PfaModel, Word};
use crate::oracle::{brute_equiv, OracleError, DEFAULT_BUDGET};
use crate::repr::{compile_acceptance, compile_hmm, LinearRepresentation};
use crate::scalar::{Scalar, Tolerance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquivalenceError {
    #[error("alphabets differ: {left:?} vs {right:?}")]
    AlphabetMismatch { left: Vec<String>, right: Vec<String> },
    #[error("numeric modes differ: {0} vs {1}")]
    ModeMismatch(crate::scalar::NumericMode, crate::scalar::NumericMode),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Reason {
    DimensionMismatch,
    BasicMatrixMismatch,
    InitialRowMismatch,
    OneStepMismatch,
    AllChecksPassed,
}

impl Reason {
    pub fn as_str(self) -> &'static str {
        match self {
            Reason::DimensionMismatch => "dimension-mismatch",
            Reason::BasicMatrixMismatch => "basic-matrix-mismatch",
            Reason::InitialRowMismatch => "initial-row-mismatch",
            Reason::OneStepMismatch => "one-step-mismatch",
            Reason::AllChecksPassed => "all-checks-passed",
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct EquivalenceOptions {
    pub tolerance: Tolerance,
    /// On a dimension mismatch, search all words up to length
    /// `dim_X + dim_Y` for a witness.
    pub search_witness: bool,
    pub search_budget: usize,
}

impl Default for EquivalenceOptions {
    fn default() -> Self {
        EquivalenceOptions {
            tolerance: Tolerance::default(),
            search_witness: false,
            search_budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict<S> {
    pub equivalent: bool,
    pub reason: Reason,
    /// A word `u` with `p(u) != q(u)`.
    pub witness: Option<Word>,
    /// `(p(u), q(u))` for the witness.
    pub values: Option<(S, S)>,
    pub dims: (usize, usize),
    /// `(|I|, |J|)` of the basis the checks ran on (`X`'s).
    pub basis_size: (usize, usize),
    /// Set when the dimension-mismatch witness search ran out of budget.
    pub search_error: Option<OracleError>,
}

impl<S: Scalar> Verdict<S> {
    /// Float-mode verdicts only hold up to the comparison tolerance.
    pub fn is_exact(&self) -> bool {
        S::is_exact()
    }
}

fn check_alphabets(x: &Alphabet, y: &Alphabet) -> Result<(), EquivalenceError> {
    if x == y {
        Ok(())
    } else {
        Err(EquivalenceError::AlphabetMismatch {
            left: x.symbols().to_vec(),
            right: y.symbols().to_vec(),
        })
    }
}

/// Decides whether two linear representations define the same process.
pub fn test_equivalence<S: Scalar>(
    x: &LinearRepresentation<S>,
    y: &LinearRepresentation<S>,
    opts: &EquivalenceOptions,
) -> Result<Verdict<S>, EquivalenceError> {
    check_alphabets(x.alphabet(), y.alphabet())?;
    let tol = &opts.tolerance;
    let (bx, by) = std::thread::scope(|scope| {
        let other = scope.spawn(|| compute_basis(y, tol));
        let bx = compute_basis(x, tol);
        (bx, other.join().expect("basis computation panicked"))
    });
    let dims = (bx.dim(), by.dim());
    let basis_size = (bx.rows().len(), bx.cols().len());

    if dims.0 != dims.1 {
        let mut verdict = Verdict {
            equivalent: false,
            reason: Reason::DimensionMismatch,
            witness: None,
            values: None,
            dims,
            basis_size,
            search_error: None,
        };
        if opts.search_witness {
            match brute_equiv(x, y, dims.0 + dims.1, opts.search_budget, tol) {
                Ok(found) => {
                    if let Some(w) = found.witness {
                        verdict.values = Some(values_at(x, y, &w));
                        verdict.witness = Some(w);
                    }
                }
                Err(e) => verdict.search_error = Some(e),
            }
        }
        return Ok(verdict);
    }

    let mismatch = first_mismatch(&bx, y, tol);
    Ok(match mismatch {
        None => Verdict {
            equivalent: true,
            reason: Reason::AllChecksPassed,
            witness: None,
            values: None,
            dims,
            basis_size,
            search_error: None,
        },
        Some((reason, word, p, q)) => Verdict {
            equivalent: false,
            reason,
            witness: Some(word),
            values: Some((p, q)),
            dims,
            basis_size,
            search_error: None,
        },
    })
}

fn values_at<S: Scalar>(x: &LinearRepresentation<S>, y: &LinearRepresentation<S>, w: &Word) -> (S, S) {
    (
        x.prob(w).expect("word over shared alphabet"),
        y.prob(w).expect("word over shared alphabet"),
    )
}

/// Runs the equality checks of `Y` against `X`'s basis in a fixed order:
/// the `w = □` column, the rest of `P_IJ`, then `p(wav)` by symbol.
fn first_mismatch<S: Scalar>(
    bx: &Basis<S>,
    y: &LinearRepresentation<S>,
    tol: &Tolerance,
) -> Option<(Reason, Word, S, S)> {
    // Y's forward vectors along J and backward vectors along I. J words
    // extend earlier J words by one symbol, I words likewise by prepending,
    // so each vector is one extension of a previously computed one.
    let fwd_y = extend_along(bx.cols(), y.init().to_vec(), |v, a| y.op(a).left_mul(v), false);
    let bwd_y = extend_along(bx.rows(), y.fin().to_vec(), |v, a| y.op(a).right_mul(v), true);

    let p = bx.matrix();
    for (j, w) in bx.cols().iter().enumerate() {
        let reason = if w.is_empty() {
            Reason::InitialRowMismatch
        } else {
            Reason::BasicMatrixMismatch
        };
        for (i, v) in bx.rows().iter().enumerate() {
            let qv = crate::scalar::dot(&fwd_y[j], &bwd_y[i]);
            if !p[(i, j)].approx_eq(&qv, tol) {
                return Some((reason, w.concat(v), p[(i, j)].clone(), qv));
            }
        }
    }
    for a in 0..y.alphabet().len() {
        let pa = bx.one_step(a);
        for (j, w) in bx.cols().iter().enumerate() {
            let shifted = y.op(a).left_mul(&fwd_y[j]);
            for (i, v) in bx.rows().iter().enumerate() {
                let qv = crate::scalar::dot(&shifted, &bwd_y[i]);
                if !pa[(i, j)].approx_eq(&qv, tol) {
                    return Some((
                        Reason::OneStepMismatch,
                        w.append(a).concat(v),
                        pa[(i, j)].clone(),
                        qv,
                    ));
                }
            }
        }
    }
    None
}

/// Vectors for `words`, each computed from the vector of its parent (the
/// word minus its last symbol, or minus its first when `prepend`). Falls back
/// to a full product when the parent is not in the list, which happens for
/// row words whose parent was dropped by row reduction.
fn extend_along<S: Scalar>(
    words: &[Word],
    seed: Vec<S>,
    step: impl Fn(&[S], usize) -> Vec<S>,
    prepend: bool,
) -> Vec<Vec<S>> {
    let mut out: Vec<Vec<S>> = Vec::with_capacity(words.len());
    for (idx, w) in words.iter().enumerate() {
        let symbols = w.symbols();
        let vector = if symbols.is_empty() {
            seed.clone()
        } else {
            let (parent, a) = if prepend {
                (Word::from(symbols[1..].to_vec()), symbols[0])
            } else {
                (Word::from(symbols[..symbols.len() - 1].to_vec()), symbols[symbols.len() - 1])
            };
            match words[..idx].iter().position(|u| *u == parent) {
                Some(k) => step(&out[k], a),
                None => {
                    let mut v = seed.clone();
                    if prepend {
                        for &b in symbols.iter().rev() {
                            v = step(&v, b);
                        }
                    } else {
                        for &b in symbols {
                            v = step(&v, b);
                        }
                    }
                    v
                }
            }
        };
        out.push(vector);
    }
    out
}

/// Same contract as [`test_equivalence`]; the test only depends on the
/// compiled representations, so models of different classes can be mixed.
pub fn cross_class_equivalence<S: Scalar>(
    x: &LinearRepresentation<S>,
    y: &LinearRepresentation<S>,
    opts: &EquivalenceOptions,
) -> Result<Verdict<S>, EquivalenceError> {
    test_equivalence(x, y, opts)
}

/// Verdict for two probabilistic automata.
#[derive(Clone, Debug, PartialEq)]
pub struct PfaVerdict<S> {
    /// Verdict on the stop-symbol HMMs over `Σ ∪ {$}`.
    pub verdict: Verdict<S>,
    /// A word over `Σ` with different acceptance probabilities.
    pub pfa_witness: Option<Word>,
    /// Acceptance probabilities of the PFA witness.
    pub pfa_values: Option<(S, S)>,
    /// False when the acceptance series were compared directly because an
    /// automaton does not halt almost surely; `verdict` then refers to
    /// those series over `Σ`.
    pub via_stop_symbol: bool,
}

/// Compares the acceptance functions of two automata.
///
/// When both automata halt almost surely, the stop-symbol HMMs are compared:
/// their processes are then determined by, and determine, the acceptance
/// function. An HMM witness of the form `v$...$` maps to the PFA word `v`;
/// any other HMM witness is a prefix-mass difference, and with
/// `search_witness` set the automata are compared directly on words up to
/// length `dim_X + dim_Y` to find a PFA word.
///
/// If either automaton can run forever, the stop-symbol processes also record
/// the mass that never terminates, so the acceptance series `pi^T M_v F` are
/// compared directly instead.
pub fn test_equivalence_pfa<S: Scalar>(
    x: &PfaModel<S>,
    y: &PfaModel<S>,
    opts: &EquivalenceOptions,
) -> Result<PfaVerdict<S>, EquivalenceError> {
    check_alphabets(x.alphabet(), y.alphabet())?;
    if !(x.halts_almost_surely() && y.halts_almost_surely()) {
        let verdict = test_equivalence(&compile_acceptance(x), &compile_acceptance(y), opts)?;
        return Ok(PfaVerdict {
            pfa_witness: verdict.witness.clone(),
            pfa_values: verdict.values.clone(),
            verdict,
            via_stop_symbol: false,
        });
    }
    let hx = compile_hmm(&pfa_to_hmm(x));
    let hy = compile_hmm(&pfa_to_hmm(y));
    let verdict = test_equivalence(&hx, &hy, opts)?;
    let stop = x.alphabet().len();
    let mut pfa_witness = verdict
        .witness
        .as_ref()
        .and_then(|w| strip_stop_suffix(w, stop));
    if pfa_witness.is_none() && !verdict.equivalent {
        // The HMM witness is a prefix event; the acceptance series differ too
        // and their own check usually names a word over Σ.
        let direct = test_equivalence(&compile_acceptance(x), &compile_acceptance(y), opts)?;
        pfa_witness = direct.witness;
    }
    if pfa_witness.is_none() && !verdict.equivalent && opts.search_witness {
        let max_len = verdict.dims.0 + verdict.dims.1;
        if crate::oracle::word_count(stop, max_len) <= opts.search_budget as u128 {
            pfa_witness = Word::all_up_to(stop, max_len)
                .into_iter()
                .find(|w| !x.acceptance(w).approx_eq(&y.acceptance(w), &opts.tolerance));
        }
    }
    let pfa_values = pfa_witness
        .as_ref()
        .map(|w| (x.acceptance(w), y.acceptance(w)));
    Ok(PfaVerdict {
        verdict,
        pfa_witness,
        pfa_values,
        via_stop_symbol: true,
    })
}

/// `v` for `v$^k` with `k >= 1` and no `$` inside `v`.
fn strip_stop_suffix(word: &Word, stop: usize) -> Option<Word> {
    let symbols = word.symbols();
    let first_stop = symbols.iter().position(|&a| a == stop)?;
    if symbols[first_stop..].iter().all(|&a| a == stop) {
        Some(Word::from(symbols[..first_stop].to_vec()))
    } else {
        None
    }
}

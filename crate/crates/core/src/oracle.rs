//! Brute-force reference computations.
//!
//! Everything here enumerates words explicitly and evaluates probabilities
//! with its own loops over the raw operators. Nothing is shared with the
//! forward/backward extension code in [`crate::repr`] or with the
//! incremental elimination in [`crate::basis`], so results can be used to
//! check those modules. Costs are exponential in the word length.

use std::collections::{BTreeMap, HashSet};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::linalg::{rank, Matrix};
use crate::model::Word;
use crate::repr::LinearRepresentation;
use crate::scalar::{Rational, Scalar, Tolerance};

/// Default cap on the number of enumerated words.
pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("enumerating words up to length {max_len} needs {needed} entries, budget is {budget}")]
    BudgetExceeded {
        max_len: usize,
        needed: u128,
        budget: usize,
    },
    #[error("alphabets differ")]
    AlphabetMismatch,
}

/// Number of words of length at most `max_len` over `sigma` symbols.
pub fn word_count(sigma: usize, max_len: usize) -> u128 {
    let mut total: u128 = 0;
    let mut level: u128 = 1;
    for _ in 0..=max_len {
        total = total.saturating_add(level);
        level = level.saturating_mul(sigma as u128);
    }
    total
}

fn check_budget(sigma: usize, max_len: usize, budget: usize) -> Result<(), OracleError> {
    let needed = word_count(sigma, max_len);
    if needed > budget as u128 {
        Err(OracleError::BudgetExceeded {
            max_len,
            needed,
            budget,
        })
    } else {
        Ok(())
    }
}

/// Probabilities of every word of length at most `max_len`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbTable<S> {
    pub max_len: usize,
    pub entries: BTreeMap<Word, S>,
}

impl<S: Scalar> ProbTable<S> {
    pub fn get(&self, word: &Word) -> Option<&S> {
        self.entries.get(word)
    }

    /// Sum of the probabilities of all words of length `len`.
    pub fn level_sum(&self, len: usize) -> S {
        let mut total = S::zero();
        for (w, p) in &self.entries {
            if w.len() == len {
                total = total.add_ref(p);
            }
        }
        total
    }
}

fn row_times<S: Scalar>(row: &[S], m: &Matrix<S>) -> Vec<S> {
    let n = m.cols();
    (0..n)
        .map(|j| {
            let mut acc = S::zero();
            for (i, x) in row.iter().enumerate() {
                acc.add_product(x, &m[(i, j)]);
            }
            acc
        })
        .collect()
}

fn times_col<S: Scalar>(m: &Matrix<S>, col: &[S]) -> Vec<S> {
    (0..m.rows())
        .map(|i| {
            let mut acc = S::zero();
            for (j, x) in col.iter().enumerate() {
                acc.add_product(&m[(i, j)], x);
            }
            acc
        })
        .collect()
}

fn inner<S: Scalar>(a: &[S], b: &[S]) -> S {
    let mut acc = S::zero();
    for (x, y) in a.iter().zip(b) {
        acc.add_product(x, y);
    }
    acc
}

/// `init · T_w` for every word of length at most `max_len`, level by level.
fn all_prefix_states<S: Scalar>(lr: &LinearRepresentation<S>, max_len: usize) -> Vec<(Word, Vec<S>)> {
    let sigma = lr.alphabet().len();
    let mut out = vec![(Word::empty(), lr.init().to_vec())];
    let mut start = 0;
    for _ in 0..max_len {
        let end = out.len();
        for idx in start..end {
            for a in 0..sigma {
                let (w, v) = &out[idx];
                let next = (w.append(a), row_times(v, &lr.ops()[a]));
                out.push(next);
            }
        }
        start = end;
    }
    out
}

/// `T_v · fin` for every word of length at most `max_len`.
fn all_suffix_states<S: Scalar>(lr: &LinearRepresentation<S>, max_len: usize) -> Vec<(Word, Vec<S>)> {
    let sigma = lr.alphabet().len();
    let mut out = vec![(Word::empty(), lr.fin().to_vec())];
    let mut start = 0;
    for _ in 0..max_len {
        let end = out.len();
        for idx in start..end {
            for a in 0..sigma {
                let (v, x) = &out[idx];
                let next = (v.prepend(a), times_col(&lr.ops()[a], x));
                out.push(next);
            }
        }
        start = end;
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// An exact representation with denominators cleared:
/// `T_a = ops[a] / den`, `init = init / init_den`, `fin = fin / fin_den`.
/// Enumerating integer vectors avoids a gcd per arithmetic operation.
struct IntegerForm {
    n: usize,
    ops: Vec<Vec<BigInt>>,
    den: BigInt,
    init: Vec<BigInt>,
    init_den: BigInt,
    fin: Vec<BigInt>,
    fin_den: BigInt,
}

fn common_denominator(values: &[Rational]) -> BigInt {
    values.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

fn scaled(values: &[Rational], den: &BigInt) -> Vec<BigInt> {
    values
        .iter()
        .map(|x| x.numer() * (den / x.denom()))
        .collect()
}

impl IntegerForm {
    fn new<S: Scalar>(lr: &LinearRepresentation<S>) -> Option<Self> {
        let exact = |xs: &[S]| xs.iter().map(Scalar::to_rational).collect::<Option<Vec<_>>>();
        let ops: Vec<Vec<Rational>> = lr
            .ops()
            .iter()
            .map(|m| exact(&m.to_rows().concat()))
            .collect::<Option<_>>()?;
        let init = exact(lr.init())?;
        let fin = exact(lr.fin())?;
        let den = common_denominator(&ops.concat());
        let init_den = common_denominator(&init);
        let fin_den = common_denominator(&fin);
        Some(IntegerForm {
            n: lr.dim(),
            ops: ops.iter().map(|m| scaled(m, &den)).collect(),
            init: scaled(&init, &init_den),
            fin: scaled(&fin, &fin_den),
            den,
            init_den,
            fin_den,
        })
    }

    fn row_times(&self, row: &[BigInt], a: usize) -> Vec<BigInt> {
        let m = &self.ops[a];
        (0..self.n)
            .map(|j| {
                let mut acc = BigInt::zero();
                for (i, x) in row.iter().enumerate() {
                    if !x.is_zero() {
                        acc += x * &m[i * self.n + j];
                    }
                }
                acc
            })
            .collect()
    }

    fn times_col(&self, a: usize, col: &[BigInt]) -> Vec<BigInt> {
        let m = &self.ops[a];
        (0..self.n)
            .map(|i| {
                let mut acc = BigInt::zero();
                for (j, x) in col.iter().enumerate() {
                    if !x.is_zero() {
                        acc += &m[i * self.n + j] * x;
                    }
                }
                acc
            })
            .collect()
    }

    /// `p(w)` for every word, from integer prefix states.
    fn probabilities(&self, sigma: usize, max_len: usize) -> Vec<(Word, Rational)> {
        let mut out = Vec::new();
        let mut level = vec![(Word::empty(), self.init.clone())];
        let mut scale = &self.init_den * &self.fin_den;
        for len in 0..=max_len {
            let mut next = Vec::with_capacity(if len < max_len { level.len() * sigma } else { 0 });
            for (w, state) in &level {
                let numer: BigInt = state.iter().zip(&self.fin).map(|(x, y)| x * y).sum();
                out.push((w.clone(), Rational::new(numer, scale.clone())));
                if len < max_len {
                    for a in 0..sigma {
                        next.push((w.append(a), self.row_times(state, a)));
                    }
                }
            }
            level = next;
            scale *= &self.den;
        }
        out
    }

    /// Distinct directions of the prefix (or suffix) states of all words up
    /// to `max_len`, each scaled to a primitive integer vector with positive
    /// leading entry. Scaling keeps the span; zero states are dropped.
    fn directions(&self, sigma: usize, max_len: usize, suffix: bool) -> Vec<Vec<BigInt>> {
        let seed = if suffix { &self.fin } else { &self.init };
        let mut seen: HashSet<Vec<BigInt>> = HashSet::new();
        let mut out = Vec::new();
        let mut level: Vec<Vec<BigInt>> = primitive(seed.clone()).into_iter().collect();
        for len in 0..=max_len {
            let mut next = Vec::new();
            for v in level {
                if !seen.insert(v.clone()) {
                    continue;
                }
                if len < max_len {
                    for a in 0..sigma {
                        let child = if suffix { self.times_col(a, &v) } else { self.row_times(&v, a) };
                        next.extend(primitive(child));
                    }
                }
                out.push(v);
            }
            level = next;
        }
        out
    }
}

fn primitive(mut v: Vec<BigInt>) -> Option<Vec<BigInt>> {
    let lead = v.iter().find(|x| !x.is_zero())?;
    let negative = lead.sign() == Sign::Minus;
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    for x in v.iter_mut() {
        *x = &*x / &g;
        if negative {
            *x = -&*x;
        }
    }
    debug_assert!(v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_positive()));
    Some(v)
}

/// Evaluates `p(v)` for every word with `|v| <= max_len`.
pub fn enumerate_probs<S: Scalar>(
    lr: &LinearRepresentation<S>,
    max_len: usize,
    budget: usize,
) -> Result<ProbTable<S>, OracleError> {
    check_budget(lr.alphabet().len(), max_len, budget)?;
    let entries = match IntegerForm::new(lr) {
        Some(form) => form
            .probabilities(lr.alphabet().len(), max_len)
            .into_iter()
            .map(|(w, p)| (w, S::from_rational(&p)))
            .collect(),
        None => all_prefix_states(lr, max_len)
            .into_iter()
            .map(|(w, state)| {
                let p = inner(&state, lr.fin());
                (w, p)
            })
            .collect(),
    };
    Ok(ProbTable { max_len, entries })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteComparison {
    pub equal_up_to_len: bool,
    /// First differing word in length-then-lexicographic order.
    pub witness: Option<Word>,
}

/// Compares two processes on every word of length at most `max_len`.
pub fn brute_equiv<S: Scalar>(
    x: &LinearRepresentation<S>,
    y: &LinearRepresentation<S>,
    max_len: usize,
    budget: usize,
    tol: &Tolerance,
) -> Result<BruteComparison, OracleError> {
    if x.alphabet() != y.alphabet() {
        return Err(OracleError::AlphabetMismatch);
    }
    let px = enumerate_probs(x, max_len, budget)?;
    let py = enumerate_probs(y, max_len, budget)?;
    let witness = px
        .entries
        .iter()
        .find(|(w, p)| !p.approx_eq(&py.entries[*w], tol))
        .map(|(w, _)| w.clone());
    Ok(BruteComparison {
        equal_up_to_len: witness.is_none(),
        witness,
    })
}

/// Rank of the Hankel block `[p(wv)]` with rows `v` and columns `w` ranging
/// over all words of length at most `max_len`.
///
/// The block factors as `F · B` with `F` the stacked prefix states `init·T_w`
/// and `B` the suffix states `T_v·fin`. Its rank equals the rank of
/// `F_r · B_c`, where `F_r` are rows spanning the row space of `F` and `B_c`
/// columns spanning the column space of `B`; both are picked from the full
/// enumeration with plain Gaussian elimination, which keeps the block small
/// enough to evaluate for long words. In exact mode the states are
/// enumerated as primitive integer vectors and duplicates are skipped, which
/// changes neither spans nor the rank.
pub fn hankel_rank<S: Scalar>(
    lr: &LinearRepresentation<S>,
    max_len: usize,
    budget: usize,
    tol: &Tolerance,
) -> Result<usize, OracleError> {
    check_budget(lr.alphabet().len(), max_len, budget)?;
    if let Some(form) = IntegerForm::new(lr) {
        let sigma = lr.alphabet().len();
        let to_rational = |vs: Vec<Vec<BigInt>>| -> Vec<Vec<Rational>> {
            vs.into_iter()
                .map(|v| v.into_iter().map(Rational::from_integer).collect())
                .collect()
        };
        let prefixes = to_rational(form.directions(sigma, max_len, false));
        let suffixes = to_rational(form.directions(sigma, max_len, true));
        let row_basis = spanning_subset(&prefixes, tol);
        let col_basis = spanning_subset(&suffixes, tol);
        let block: Vec<Vec<Rational>> = col_basis
            .iter()
            .map(|v| row_basis.iter().map(|w| inner(w, v)).collect())
            .collect();
        return Ok(rank(&block, tol).expect("block is rectangular"));
    }
    let prefixes: Vec<Vec<S>> = all_prefix_states(lr, max_len)
        .into_iter()
        .map(|(_, v)| v)
        .collect();
    let suffixes: Vec<Vec<S>> = all_suffix_states(lr, max_len)
        .into_iter()
        .map(|(_, v)| v)
        .collect();
    let row_basis = spanning_subset(&prefixes, tol);
    let col_basis = spanning_subset(&suffixes, tol);
    let block: Vec<Vec<S>> = col_basis
        .iter()
        .map(|v| row_basis.iter().map(|w| inner(w, v)).collect())
        .collect();
    Ok(rank(&block, tol).expect("block is rectangular"))
}

/// Greedy subset of `vectors` spanning the same space: a vector is kept when
/// it survives elimination against the reduced copies of those kept before.
fn spanning_subset<S: Scalar>(vectors: &[Vec<S>], tol: &Tolerance) -> Vec<Vec<S>> {
    let dim = vectors.first().map_or(0, Vec::len);
    let scale = vectors
        .iter()
        .flat_map(|v| v.iter().map(Scalar::magnitude))
        .fold(0.0, f64::max);
    let mut chosen = Vec::new();
    let mut reduced: Vec<(usize, Vec<S>)> = Vec::new();
    for v in vectors {
        if chosen.len() == dim {
            break;
        }
        let mut r = v.clone();
        for (p, row) in &reduced {
            if r[*p].is_zero() {
                continue;
            }
            let factor = r[*p].clone() / row[*p].clone();
            for (x, y) in r.iter_mut().zip(row) {
                x.sub_product(&factor, y);
            }
        }
        let pivot = if S::is_exact() {
            r.iter().position(|x| !x.is_zero())
        } else {
            r.iter()
                .enumerate()
                .max_by(|a, b| a.1.magnitude().total_cmp(&b.1.magnitude()))
                .filter(|(_, x)| !x.is_negligible(scale, tol))
                .map(|(i, _)| i)
        };
        if let Some(p) = pivot {
            reduced.push((p, r));
            chosen.push(v.clone());
        }
    }
    chosen
}

/// Explicit Hankel block `[p(wv)]_{v,w}` over words of length at most
/// `max_len`, each entry evaluated from scratch. Intended for small cases.
pub fn explicit_hankel<S: Scalar>(lr: &LinearRepresentation<S>, max_len: usize) -> Vec<Vec<S>> {
    let words = Word::all_up_to(lr.alphabet().len(), max_len);
    let eval = |u: &Word| -> S {
        let mut state = lr.init().to_vec();
        for &a in u {
            state = row_times(&state, &lr.ops()[a]);
        }
        inner(&state, lr.fin())
    };
    words
        .iter()
        .map(|v| words.iter().map(|w| eval(&w.concat(v))).collect())
        .collect()
}

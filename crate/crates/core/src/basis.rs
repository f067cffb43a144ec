//! Basis computation: a row generator `I`, a column basis `J`, and the
//! reduction of `I` to a row basis, giving the basic matrix
//! `P_IJ = [p(wv)]_{v∈I, w∈J}` whose size is the dimension of the process.
//!
//! Candidates are processed first-in first-out and symbols in alphabet
//! order, so bases are deterministic and consist of shortest-first words.
//! Each candidate carries its cached backward (row step) or forward (column
//! step) vector, so accepting a word costs one `O(n^2)` extension per symbol.

use std::collections::VecDeque;

use crate::linalg::{IndependenceTester, Matrix};
use crate::model::Word;
use crate::repr::{BackwardVector, ForwardVector, LinearRepresentation};
use crate::scalar::{dot, Scalar, Tolerance};

/// Output of the row-generator step.
#[derive(Clone, Debug)]
pub struct RowGenerator<S> {
    pub words: Vec<Word>,
    pub backward: Vec<BackwardVector<S>>,
    /// Candidates examined after the seed.
    pub iterations: usize,
}

/// Output of the column-basis step.
#[derive(Clone, Debug)]
pub struct ColumnBasis<S> {
    pub words: Vec<Word>,
    pub forward: Vec<ForwardVector<S>>,
    /// `|I| x |J|` matrix of `p(wv)` over the unreduced row generator.
    pub matrix: Matrix<S>,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisStats {
    pub row_iterations: usize,
    pub column_iterations: usize,
    /// Size of the row generator before reduction.
    pub generator_size: usize,
}

#[derive(Clone, Debug)]
pub struct Basis<S> {
    rows: Vec<Word>,
    cols: Vec<Word>,
    matrix: Matrix<S>,
    backward: Vec<BackwardVector<S>>,
    forward: Vec<ForwardVector<S>>,
    one_step: Vec<Matrix<S>>,
    generator: Vec<Word>,
    stats: BasisStats,
}

impl<S: Scalar> Basis<S> {
    /// `I`, the suffix words indexing rows.
    pub fn rows(&self) -> &[Word] {
        &self.rows
    }

    /// `J`, the prefix words indexing columns.
    pub fn cols(&self) -> &[Word] {
        &self.cols
    }

    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    /// `P_IJ`, entry `(i, j) = p(J[j] · I[i])`.
    pub fn matrix(&self) -> &Matrix<S> {
        &self.matrix
    }

    /// `p(J[j] · a · I[i])` at `(i, j)` of the matrix for symbol `a`.
    pub fn one_step(&self, symbol: usize) -> &Matrix<S> {
        &self.one_step[symbol]
    }

    pub fn backward(&self) -> &[BackwardVector<S>] {
        &self.backward
    }

    pub fn forward(&self) -> &[ForwardVector<S>] {
        &self.forward
    }

    /// The row generator before reduction, in construction order.
    pub fn generator(&self) -> &[Word] {
        &self.generator
    }

    pub fn stats(&self) -> &BasisStats {
        &self.stats
    }
}

/// Collects suffix words `v` whose backward vectors are linearly independent,
/// extending accepted words by prepending symbols.
///
/// Backward vectors serve as the generator tuples: for a compiled HMM they
/// are `(e_i^T T_v 1)_i`, for a compiled walk `(tr T_v Q_i)_i` over the
/// coordinate basis of Hermitian matrices.
pub fn row_generator<S: Scalar>(lr: &LinearRepresentation<S>, tol: &Tolerance) -> RowGenerator<S> {
    let mut tester = IndependenceTester::new(lr.dim(), *tol);
    let seed = BackwardVector {
        word: Word::empty(),
        coords: lr.fin().to_vec(),
    };
    let mut words = Vec::new();
    let mut backward = Vec::new();
    let mut queue = VecDeque::new();
    let mut iterations = 0;

    let accept = |bv: BackwardVector<S>,
                      words: &mut Vec<Word>,
                      backward: &mut Vec<BackwardVector<S>>,
                      queue: &mut VecDeque<BackwardVector<S>>| {
        for a in 0..lr.alphabet().len() {
            queue.push_back(BackwardVector {
                word: bv.word.prepend(a),
                coords: lr.op(a).right_mul(&bv.coords),
            });
        }
        words.push(bv.word.clone());
        backward.push(bv);
    };

    if tester.try_insert(&seed.coords).expect("fin has representation dimension") {
        accept(seed, &mut words, &mut backward, &mut queue);
    }
    while let Some(candidate) = queue.pop_front() {
        iterations += 1;
        if tester
            .try_insert(&candidate.coords)
            .expect("backward vectors have representation dimension")
        {
            accept(candidate, &mut words, &mut backward, &mut queue);
        }
    }
    RowGenerator {
        words,
        backward,
        iterations,
    }
}

/// Collects prefix words `w` whose vectors `q(w) = (p(wv))_{v∈I}` are
/// linearly independent, extending accepted words by appending symbols.
pub fn column_basis<S: Scalar>(
    lr: &LinearRepresentation<S>,
    generator: &RowGenerator<S>,
    tol: &Tolerance,
) -> ColumnBasis<S> {
    let rows = generator.backward.len();
    let mut tester = IndependenceTester::new(rows, *tol);
    let column = |fv: &ForwardVector<S>| -> Vec<S> {
        generator
            .backward
            .iter()
            .map(|bv| dot(&fv.coords, &bv.coords))
            .collect()
    };
    let mut words = Vec::new();
    let mut forward = Vec::new();
    let mut columns: Vec<Vec<S>> = Vec::new();
    let mut queue = VecDeque::new();
    let mut iterations = 0;

    let seed = ForwardVector {
        word: Word::empty(),
        coords: lr.init().to_vec(),
    };
    let mut pending = Some(seed);
    loop {
        let candidate = match pending.take() {
            Some(seed) => seed,
            None => match queue.pop_front() {
                Some(c) => {
                    iterations += 1;
                    c
                }
                None => break,
            },
        };
        let q = column(&candidate);
        if tester.try_insert(&q).expect("column vectors have |I| entries") {
            for a in 0..lr.alphabet().len() {
                queue.push_back(ForwardVector {
                    word: candidate.word.append(a),
                    coords: lr.op(a).left_mul(&candidate.coords),
                });
            }
            words.push(candidate.word.clone());
            forward.push(candidate);
            columns.push(q);
        }
    }
    let matrix = Matrix::from_fn(rows, columns.len(), |i, j| columns[j][i].clone());
    ColumnBasis {
        words,
        forward,
        matrix,
        iterations,
    }
}

/// Indices of the rows of `raw` kept when dropping every row that depends
/// linearly on the rows before it.
pub fn reduce_rows<S: Scalar>(raw: &Matrix<S>, tol: &Tolerance) -> Vec<usize> {
    let mut tester = IndependenceTester::new(raw.cols(), *tol);
    raw.iter_rows()
        .enumerate()
        .filter(|(_, row)| tester.try_insert(row).expect("rows have uniform length"))
        .map(|(i, _)| i)
        .collect()
}

/// Row generator, column basis and row reduction, plus the one-step
/// probabilities `p(wav)` needed by the equivalence test.
pub fn compute_basis<S: Scalar>(lr: &LinearRepresentation<S>, tol: &Tolerance) -> Basis<S> {
    let generator = row_generator(lr, tol);
    let columns = column_basis(lr, &generator, tol);
    let keep = reduce_rows(&columns.matrix, tol);

    let rows: Vec<Word> = keep.iter().map(|&i| generator.words[i].clone()).collect();
    let backward: Vec<BackwardVector<S>> = keep.iter().map(|&i| generator.backward[i].clone()).collect();
    let matrix = columns.matrix.select_rows(&keep);

    // p(wav) = (fwd(w) T_a) · bwd(v)
    let one_step = (0..lr.alphabet().len())
        .map(|a| {
            let shifted: Vec<Vec<S>> = columns
                .forward
                .iter()
                .map(|fv| lr.op(a).left_mul(&fv.coords))
                .collect();
            Matrix::from_fn(backward.len(), shifted.len(), |i, j| {
                dot(&shifted[j], &backward[i].coords)
            })
        })
        .collect();

    Basis {
        rows,
        cols: columns.words,
        matrix,
        backward,
        forward: columns.forward,
        one_step,
        stats: BasisStats {
            row_iterations: generator.iterations,
            column_iterations: columns.iterations,
            generator_size: generator.words.len(),
        },
        generator: generator.words,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rank;
    use crate::model::{Alphabet, HmmModel};
    use crate::repr::compile_hmm;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn hmm(pi: &[(i64, i64)], m: &[&[(i64, i64)]], e: &[&[(i64, i64)]], symbols: &[&str]) -> LinearRepresentation<Rational> {
        let conv = |row: &[(i64, i64)]| row.iter().map(|&(a, b)| q(a, b)).collect::<Vec<_>>();
        let model = HmmModel::new(
            Alphabet::new(symbols.iter().copied()).unwrap(),
            conv(pi),
            Matrix::from_rows(m.iter().map(|r| conv(r)).collect(), 0).unwrap(),
            Matrix::from_rows(e.iter().map(|r| conv(r)).collect(), 0).unwrap(),
            &Tolerance::default(),
        )
        .unwrap();
        compile_hmm(&model)
    }

    fn coin() -> LinearRepresentation<Rational> {
        hmm(&[(1, 1)], &[&[(1, 1)]], &[&[(1, 2), (1, 2)]], &["a", "b"])
    }

    fn always_a_two_state() -> LinearRepresentation<Rational> {
        hmm(
            &[(1, 2), (1, 2)],
            &[&[(1, 3), (2, 3)], &[(1, 2), (1, 2)]],
            &[&[(1, 1)], &[(1, 1)]],
            &["a"],
        )
    }

    fn distinct_emission() -> LinearRepresentation<Rational> {
        hmm(
            &[(1, 1), (0, 1)],
            &[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]],
            &[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)]],
            &["a", "b"],
        )
    }

    #[test]
    fn coin_basis_is_trivial() {
        let lr = coin();
        let gen = row_generator(&lr, &Tolerance::default());
        assert_eq!(gen.words, vec![Word::empty()]);
        let cols = column_basis(&lr, &gen, &Tolerance::default());
        assert_eq!(cols.words, vec![Word::empty()]);
        let basis = compute_basis(&lr, &Tolerance::default());
        assert_eq!(basis.dim(), 1);
        assert_eq!(basis.matrix().to_rows(), vec![vec![q(1, 1)]]);
    }

    #[test]
    fn one_symbol_emitter_has_dimension_one() {
        let basis = compute_basis(&always_a_two_state(), &Tolerance::default());
        assert_eq!(basis.rows(), &[Word::empty()]);
        assert_eq!(basis.dim(), 1);
    }

    #[test]
    fn distinct_emission_hmm_has_dimension_two() {
        let lr = distinct_emission();
        let gen = row_generator(&lr, &Tolerance::default());
        assert_eq!(gen.words.len(), 2);
        let basis = compute_basis(&lr, &Tolerance::default());
        assert_eq!(basis.dim(), 2);
        assert_eq!(basis.rows().len(), 2);
    }

    #[test]
    fn reduce_rows_examples() {
        let tol = Tolerance::default();
        let square = Matrix::from_rows(vec![vec![q(1, 1), q(0, 1)], vec![q(1, 2), q(1, 3)]], 2).unwrap();
        assert_eq!(reduce_rows(&square, &tol), vec![0, 1]);
        let column = Matrix::from_rows(vec![vec![q(1, 1)], vec![q(1, 2)]], 1).unwrap();
        assert_eq!(reduce_rows(&column, &tol), vec![0]);
    }

    #[test]
    fn reduction_needed_when_generators_overshoot() {
        // States emit differently but are re-drawn uniformly every step:
        // an i.i.d. fair coin, while the generator tells the states apart.
        let lr = hmm(
            &[(1, 2), (1, 2)],
            &[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]],
            &[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)]],
            &["a", "b"],
        );
        let basis = compute_basis(&lr, &Tolerance::default());
        assert_eq!(basis.stats().generator_size, 2);
        assert_eq!(basis.dim(), 1);
        assert_eq!(basis.rows().len(), 1);
    }

    #[test]
    fn basic_matrix_has_full_rank() {
        let basis = compute_basis(&distinct_emission(), &Tolerance::default());
        let tol = Tolerance::default();
        assert_eq!(rank(&basis.matrix().to_rows(), &tol).unwrap(), basis.dim());
        assert!(basis.matrix().is_square());
    }
}

//! Linear representations `p(v) = init · T_{v1} ··· T_{vt} · fin`.
//!
//! Every model class compiles to this form. Forward vectors are row vectors
//! `init · T_w`, backward vectors are column vectors `T_v · fin`, and
//! `p(wav) = fwd(w) · T_a · bwd(v)`.

use thiserror::Error;

use crate::linalg::Matrix;
use crate::model::{pfa_to_hmm, Alphabet, AlphabetError, HmmModel, Model, PfaModel, QrwModel, Word};
use crate::scalar::{dot, Complex, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReprError {
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
    #[error("representation dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("{0}")]
    Shape(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearRepresentation<S> {
    alphabet: Alphabet,
    ops: Vec<Matrix<S>>,
    init: Vec<S>,
    fin: Vec<S>,
}

/// `init · T_w` together with `w`.
#[derive(Clone, Debug, PartialEq)]
pub struct ForwardVector<S> {
    pub word: Word,
    pub coords: Vec<S>,
}

/// `T_v · fin` together with `v`.
#[derive(Clone, Debug, PartialEq)]
pub struct BackwardVector<S> {
    pub word: Word,
    pub coords: Vec<S>,
}

impl<S: Scalar> LinearRepresentation<S> {
    /// Assembles a representation from raw parts, checking only shapes.
    pub fn from_parts(
        alphabet: Alphabet,
        ops: Vec<Matrix<S>>,
        init: Vec<S>,
        fin: Vec<S>,
    ) -> Result<Self, ReprError> {
        let n = init.len();
        if fin.len() != n {
            return Err(ReprError::Shape(format!(
                "init has {n} entries but fin has {}",
                fin.len()
            )));
        }
        if ops.len() != alphabet.len() {
            return Err(ReprError::Shape(format!(
                "{} symbols but {} operators",
                alphabet.len(),
                ops.len()
            )));
        }
        if let Some(bad) = ops.iter().position(|m| m.rows() != n || m.cols() != n) {
            return Err(ReprError::Shape(format!(
                "operator {} is not {n}x{n}",
                alphabet.symbol(bad)
            )));
        }
        Ok(LinearRepresentation {
            alphabet,
            ops,
            init,
            fin,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn dim(&self) -> usize {
        self.init.len()
    }

    pub fn init(&self) -> &[S] {
        &self.init
    }

    pub fn fin(&self) -> &[S] {
        &self.fin
    }

    /// Per-symbol operators in alphabet order.
    pub fn ops(&self) -> &[Matrix<S>] {
        &self.ops
    }

    pub fn op(&self, symbol: usize) -> &Matrix<S> {
        &self.ops[symbol]
    }

    fn check_symbol(&self, symbol: usize) -> Result<(), ReprError> {
        if symbol < self.alphabet.len() {
            Ok(())
        } else {
            Err(AlphabetError::IndexOutOfRange(symbol).into())
        }
    }

    pub fn forward(&self, word: &Word) -> Result<ForwardVector<S>, ReprError> {
        self.alphabet.check_word(word)?;
        let mut coords = self.init.clone();
        for &a in word {
            coords = self.ops[a].left_mul(&coords);
        }
        Ok(ForwardVector {
            word: word.clone(),
            coords,
        })
    }

    /// `fwd(w) -> fwd(wa)` with one vector-matrix product.
    pub fn extend_forward(&self, fv: &ForwardVector<S>, symbol: usize) -> Result<ForwardVector<S>, ReprError> {
        self.check_symbol(symbol)?;
        self.check_len(fv.coords.len())?;
        Ok(ForwardVector {
            word: fv.word.append(symbol),
            coords: self.ops[symbol].left_mul(&fv.coords),
        })
    }

    pub fn backward(&self, word: &Word) -> Result<BackwardVector<S>, ReprError> {
        self.alphabet.check_word(word)?;
        let mut coords = self.fin.clone();
        for &a in word.symbols().iter().rev() {
            coords = self.ops[a].right_mul(&coords);
        }
        Ok(BackwardVector {
            word: word.clone(),
            coords,
        })
    }

    /// `bwd(v) -> bwd(av)` with one matrix-vector product.
    pub fn extend_backward(&self, symbol: usize, bv: &BackwardVector<S>) -> Result<BackwardVector<S>, ReprError> {
        self.check_symbol(symbol)?;
        self.check_len(bv.coords.len())?;
        Ok(BackwardVector {
            word: bv.word.prepend(symbol),
            coords: self.ops[symbol].right_mul(&bv.coords),
        })
    }

    fn check_len(&self, len: usize) -> Result<(), ReprError> {
        if len == self.dim() {
            Ok(())
        } else {
            Err(ReprError::DimensionMismatch(self.dim(), len))
        }
    }

    pub fn prob(&self, word: &Word) -> Result<S, ReprError> {
        let fv = self.forward(word)?;
        Ok(dot(&fv.coords, &self.fin))
    }

    /// `p(wav) = fwd(w) · T_a · bwd(v)`, or `p(wv)` when `symbol` is `None`.
    pub fn prob_bilinear(
        &self,
        fv: &ForwardVector<S>,
        symbol: Option<usize>,
        bv: &BackwardVector<S>,
    ) -> Result<S, ReprError> {
        self.check_len(fv.coords.len())?;
        self.check_len(bv.coords.len())?;
        match symbol {
            None => Ok(dot(&fv.coords, &bv.coords)),
            Some(a) => {
                self.check_symbol(a)?;
                Ok(dot(&fv.coords, &self.ops[a].right_mul(&bv.coords)))
            }
        }
    }

    /// `Σ_a T_a`.
    pub fn total_operator(&self) -> Matrix<S> {
        let n = self.dim();
        self.ops
            .iter()
            .fold(Matrix::zeros(n, n), |acc, m| acc.add(m))
    }
}

/// `(T_a)_{ij} = E[i,a] · M[i,j]`, `init = pi`, `fin = 1`.
pub fn compile_hmm<S: Scalar>(hmm: &HmmModel<S>) -> LinearRepresentation<S> {
    let n = hmm.states();
    let m = hmm.transition();
    let e = hmm.emission();
    let ops = (0..hmm.alphabet().len())
        .map(|a| Matrix::from_fn(n, n, |i, j| e[(i, a)].mul_ref(&m[(i, j)])))
        .collect();
    LinearRepresentation {
        alphabet: hmm.alphabet().clone(),
        ops,
        init: hmm.initial().to_vec(),
        fin: vec![S::one(); n],
    }
}

/// Real coordinates of the space of `k x k` Hermitian matrices.
///
/// For every pair `m1 <= m2` in row-major order the coordinate list holds
/// `Re Q[m1,m2]`, followed by `Im Q[m1,m2]` when `m1 < m2`; `k^2` numbers in
/// total.
#[derive(Clone, Debug)]
pub struct HermitianCoordinates {
    k: usize,
    // (m1, m2, is_imaginary) per coordinate
    layout: Vec<(usize, usize, bool)>,
}

impl HermitianCoordinates {
    pub fn new(k: usize) -> Self {
        let mut layout = Vec::with_capacity(k * k);
        for m1 in 0..k {
            for m2 in m1..k {
                layout.push((m1, m2, false));
                if m1 < m2 {
                    layout.push((m1, m2, true));
                }
            }
        }
        HermitianCoordinates { k, layout }
    }

    pub fn dim(&self) -> usize {
        self.layout.len()
    }

    pub fn encode<S: Scalar>(&self, q: &Matrix<Complex<S>>) -> Vec<S> {
        self.layout
            .iter()
            .map(|&(m1, m2, imag)| {
                let z = &q[(m1, m2)];
                if imag {
                    z.im.clone()
                } else {
                    z.re.clone()
                }
            })
            .collect()
    }

    pub fn decode<S: Scalar>(&self, coords: &[S]) -> Matrix<Complex<S>> {
        let zero = Complex::new(S::zero(), S::zero());
        let mut q = Matrix::filled(self.k, self.k, zero);
        for (&(m1, m2, imag), x) in self.layout.iter().zip(coords) {
            if imag {
                q[(m1, m2)].im = x.clone();
                q[(m2, m1)].im = S::zero() - x.clone();
            } else {
                q[(m1, m2)].re = x.clone();
                q[(m2, m1)].re = x.clone();
            }
        }
        q
    }

    /// Coordinates of the trace functional: one on real diagonal entries.
    pub fn trace_functional<S: Scalar>(&self) -> Vec<S> {
        self.layout
            .iter()
            .map(|&(m1, m2, imag)| if m1 == m2 && !imag { S::one() } else { S::zero() })
            .collect()
    }
}

fn complex_mul<S: Scalar>(a: &Matrix<Complex<S>>, b: &Matrix<Complex<S>>) -> Matrix<Complex<S>> {
    Matrix::from_fn(a.rows(), b.cols(), |i, j| {
        let mut re = S::zero();
        let mut im = S::zero();
        for l in 0..a.cols() {
            let x = &a[(i, l)];
            let y = &b[(l, j)];
            re.add_product(&x.re, &y.re);
            re.sub_product(&x.im, &y.im);
            im.add_product(&x.re, &y.im);
            im.add_product(&x.im, &y.re);
        }
        Complex::new(re, im)
    })
}

fn adjoint<S: Scalar>(a: &Matrix<Complex<S>>) -> Matrix<Complex<S>> {
    Matrix::from_fn(a.cols(), a.rows(), |i, j| a[(j, i)].conj())
}

/// Compiles a walk onto the `k^2`-dimensional real space of Hermitian
/// matrices.
///
/// `A_a` is the matrix of `Q -> (P_a U) Q (P_a U)*` in
/// [`HermitianCoordinates`]; the walk composes these in reverse letter order,
/// so `T_a = A_a^T` turns `tr(A_{vt} ··· A_{v1} Q_psi0)` into the usual
/// left-to-right product. `init` is `psi0 psi0*`, `fin` the trace.
pub fn compile_qrw<S: Scalar>(qrw: &QrwModel<S>) -> LinearRepresentation<S> {
    let k = qrw.coordinates();
    let coords = HermitianCoordinates::new(k);
    let n = coords.dim();
    let u = qrw.unitary();
    let ops = (0..qrw.alphabet().len())
        .map(|a| {
            let zero = Complex::new(S::zero(), S::zero());
            let pu = Matrix::from_fn(k, k, |i, j| {
                if qrw.labels()[i] == a {
                    u[(i, j)].clone()
                } else {
                    zero.clone()
                }
            });
            let pu_adj = adjoint(&pu);
            // Row j of T_a is the image of the j-th coordinate basis element.
            let rows: Vec<Vec<S>> = (0..n)
                .map(|j| {
                    let mut unit = vec![S::zero(); n];
                    unit[j] = S::one();
                    let q = coords.decode(&unit);
                    coords.encode(&complex_mul(&complex_mul(&pu, &q), &pu_adj))
                })
                .collect();
            Matrix::from_rows(rows, n).expect("rows have uniform length")
        })
        .collect();
    let psi = qrw.psi0();
    let q0 = Matrix::from_fn(k, k, |i, j| psi[i].clone() * psi[j].conj());
    LinearRepresentation {
        alphabet: qrw.alphabet().clone(),
        ops,
        init: coords.encode(&q0),
        fin: coords.trace_functional(),
    }
}

/// Compiles a PFA through its stop-symbol HMM.
pub fn compile_pfa<S: Scalar>(pfa: &PfaModel<S>) -> LinearRepresentation<S> {
    compile_hmm(&pfa_to_hmm(pfa))
}

/// The acceptance series `v -> pi^T M_v F` of a PFA as a representation over
/// `Σ`. Unlike the other compilations `p(□)` is the acceptance probability of
/// the empty word, not 1.
pub fn compile_acceptance<S: Scalar>(pfa: &PfaModel<S>) -> LinearRepresentation<S> {
    LinearRepresentation {
        alphabet: pfa.alphabet().clone(),
        ops: pfa.transitions().to_vec(),
        init: pfa.initial().to_vec(),
        fin: pfa.finals().to_vec(),
    }
}

pub fn compile<S: Scalar>(model: &Model<S>) -> LinearRepresentation<S> {
    match model {
        Model::Hmm(m) => compile_hmm(m),
        Model::Qrw(m) => compile_qrw(m),
        Model::Pfa(m) => compile_pfa(m),
    }
}

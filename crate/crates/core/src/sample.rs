//! Random models and transformations that preserve the generated process.
//!
//! Exact generators draw small integer weights so that denominators stay
//! small; walks use products of Householder reflections with Gaussian-integer
//! vectors, which keeps every unitary entry rational.

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::linalg::Matrix;
use crate::model::{Alphabet, HmmModel, PfaModel, QrwModel};
use crate::scalar::{Complex, Rational, Scalar, Tolerance};

/// `a`, `b`, `c`, ... of the given size.
pub fn letters(size: usize) -> Alphabet {
    assert!((1..=26).contains(&size), "alphabet size must be in 1..=26");
    Alphabet::new_user((0..size).map(|i| ((b'a' + i as u8) as char).to_string()))
        .expect("letters are valid symbols")
}

fn int(x: i64) -> Rational {
    Rational::from_int(x)
}

/// Normalized row of `len` entries from integer weights in `0..=max_weight`.
/// With `sparse` false every weight is at least 1.
pub fn random_distribution<R: Rng + ?Sized>(rng: &mut R, len: usize, max_weight: i64, sparse: bool) -> Vec<Rational> {
    let low = if sparse { 0 } else { 1 };
    loop {
        let weights: Vec<i64> = (0..len).map(|_| rng.gen_range(low..=max_weight)).collect();
        let total: i64 = weights.iter().sum();
        if total > 0 {
            return weights.iter().map(|&w| Rational::from_ratio(w, total)).collect();
        }
    }
}

fn exact() -> Tolerance {
    Tolerance::default()
}

pub fn random_hmm<R: Rng + ?Sized>(rng: &mut R, states: usize, symbols: usize) -> HmmModel<Rational> {
    let sparse = rng.gen_bool(0.5);
    let pi = random_distribution(rng, states, 3, sparse);
    let m = Matrix::from_rows((0..states).map(|_| random_distribution(rng, states, 3, sparse)).collect(), states)
        .expect("square");
    let e = Matrix::from_rows((0..states).map(|_| random_distribution(rng, symbols, 3, sparse)).collect(), symbols)
        .expect("n x sigma");
    HmmModel::new(letters(symbols), pi, m, e, &exact()).expect("normalized by construction")
}

/// Dense float HMM with strictly positive entries.
pub fn random_float_hmm<R: Rng + ?Sized>(rng: &mut R, states: usize, symbols: usize) -> HmmModel<f64> {
    let mut row = |len: usize| -> Vec<f64> {
        let w: Vec<f64> = (0..len).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|x| x / total).collect()
    };
    let pi = row(states);
    let m = Matrix::from_rows((0..states).map(|_| row(states)).collect(), states).expect("square");
    let e = Matrix::from_rows((0..states).map(|_| row(symbols)).collect(), symbols).expect("n x sigma");
    HmmModel::new(letters(symbols), pi, m, e, &Tolerance::default()).expect("normalized by construction")
}

/// Renames hidden state `s` to `perm[s]`.
pub fn permute_hmm<S: Scalar>(hmm: &HmmModel<S>, perm: &[usize]) -> HmmModel<S> {
    let n = hmm.states();
    let mut inv = vec![0; n];
    for (s, &t) in perm.iter().enumerate() {
        inv[t] = s;
    }
    let pi = (0..n).map(|t| hmm.initial()[inv[t]].clone()).collect();
    let m = Matrix::from_fn(n, n, |i, j| hmm.transition()[(inv[i], inv[j])].clone());
    let e = Matrix::from_fn(n, hmm.emission().cols(), |i, a| hmm.emission()[(inv[i], a)].clone());
    HmmModel::new(hmm.alphabet().clone(), pi, m, e, &Tolerance::default()).expect("permutation keeps normalization")
}

pub fn random_permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Splits state `s` into two copies that share its outgoing behaviour; mass
/// flowing into `s` goes to the copy with weight `lambda`, the rest to the new
/// last state.
pub fn split_state(hmm: &HmmModel<Rational>, s: usize, lambda: &Rational) -> HmmModel<Rational> {
    let n = hmm.states();
    let rest = Rational::one() - lambda;
    let share = |j: usize, x: &Rational| -> Rational {
        if j == s {
            x * lambda
        } else if j == n {
            x * &rest
        } else {
            x.clone()
        }
    };
    let src = |i: usize| if i == n { s } else { i };
    let pi = (0..=n).map(|j| share(j, &hmm.initial()[src(j)])).collect();
    let m = Matrix::from_fn(n + 1, n + 1, |i, j| share(j, &hmm.transition()[(src(i), src(j))]));
    let e = Matrix::from_fn(n + 1, hmm.emission().cols(), |i, a| hmm.emission()[(src(i), a)].clone());
    HmmModel::new(hmm.alphabet().clone(), pi, m, e, &exact()).expect("split keeps normalization")
}

/// Mixture of two models on disjoint state sets: start in `x` with
/// probability `lambda`, otherwise in `y`.
pub fn blend(x: &HmmModel<Rational>, y: &HmmModel<Rational>, lambda: &Rational) -> HmmModel<Rational> {
    assert_eq!(x.alphabet(), y.alphabet());
    let (nx, ny) = (x.states(), y.states());
    let rest = Rational::one() - lambda;
    let pi = x
        .initial()
        .iter()
        .map(|p| p * lambda)
        .chain(y.initial().iter().map(|p| p * &rest))
        .collect();
    let m = Matrix::from_fn(nx + ny, nx + ny, |i, j| match (i < nx, j < nx) {
        (true, true) => x.transition()[(i, j)].clone(),
        (false, false) => y.transition()[(i - nx, j - nx)].clone(),
        _ => Rational::zero(),
    });
    let e = Matrix::from_fn(nx + ny, x.emission().cols(), |i, a| {
        if i < nx {
            x.emission()[(i, a)].clone()
        } else {
            y.emission()[(i - nx, a)].clone()
        }
    });
    HmmModel::new(x.alphabet().clone(), pi, m, e, &exact()).expect("mixture keeps normalization")
}

/// Moves `delta` of emission mass of one state between two symbols, if that
/// keeps the row non-negative. Usually changes the process.
pub fn perturb_emission<R: Rng + ?Sized>(rng: &mut R, hmm: &HmmModel<Rational>, delta: &Rational) -> HmmModel<Rational> {
    let sigma = hmm.alphabet().len();
    let mut e = hmm.emission().clone();
    if sigma >= 2 {
        let s = rng.gen_range(0..hmm.states());
        let a = rng.gen_range(0..sigma);
        let b = (a + rng.gen_range(1..sigma)) % sigma;
        let moved = if &e[(s, a)] < delta { e[(s, a)].clone() } else { delta.clone() };
        e[(s, a)] = &e[(s, a)] - &moved;
        e[(s, b)] = &e[(s, b)] + &moved;
    }
    HmmModel::new(
        hmm.alphabet().clone(),
        hmm.initial().to_vec(),
        hmm.transition().clone(),
        e,
        &exact(),
    )
    .expect("mass moved within a row")
}

fn c(re: Rational, im: Rational) -> Complex<Rational> {
    Complex::new(re, im)
}

/// Unit complex number `((1-t^2) + 2ti) / (1+t^2)`.
pub fn rational_phase(t: &Rational) -> Complex<Rational> {
    let t2 = t * t;
    let den = Rational::one() + &t2;
    c((Rational::one() - &t2) / &den, (t * int(2)) / den)
}

fn random_phase<R: Rng + ?Sized>(rng: &mut R) -> Complex<Rational> {
    let choices = [(0, 1), (1, 1), (-1, 1), (1, 2), (-1, 2), (2, 1), (1, 3)];
    let (p, q) = choices[rng.gen_range(0..choices.len())];
    rational_phase(&Rational::from_ratio(p, q))
}

fn cmat_mul(a: &Matrix<Complex<Rational>>, b: &Matrix<Complex<Rational>>) -> Matrix<Complex<Rational>> {
    Matrix::from_fn(a.rows(), b.cols(), |i, j| {
        (0..a.cols()).fold(Complex::zero(), |acc, l| acc + &a[(i, l)] * &b[(l, j)])
    })
}

/// `I - 2 v v* / (v* v)` for a nonzero Gaussian-integer vector `v`.
fn householder<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Matrix<Complex<Rational>> {
    let v: Vec<Complex<Rational>> = loop {
        let v: Vec<Complex<Rational>> = (0..k)
            .map(|_| c(int(rng.gen_range(-2..=2)), int(rng.gen_range(-1..=1))))
            .collect();
        if v.iter().any(|z| !z.is_zero()) {
            break v;
        }
    };
    let norm: Rational = v.iter().map(|z| &z.re * &z.re + &z.im * &z.im).sum();
    let scale = int(2) / norm;
    Matrix::from_fn(k, k, |i, j| {
        let outer = &v[i] * v[j].conj();
        let id: Complex<Rational> = if i == j { Complex::one() } else { Complex::zero() };
        id - outer * scale.clone()
    })
}

/// Random unitary with rational entries: phases times two reflections times a
/// permutation.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Matrix<Complex<Rational>> {
    let perm = random_permutation(rng, k);
    let p = Matrix::from_fn(k, k, |i, j| if perm[j] == i { Complex::one() } else { Complex::zero() });
    let d: Vec<Complex<Rational>> = (0..k).map(|_| random_phase(rng)).collect();
    let d = Matrix::from_fn(k, k, |i, j| if i == j { d[i].clone() } else { Complex::zero() });
    let mut u = cmat_mul(&d, &householder(rng, k));
    if k > 1 && rng.gen_bool(0.5) {
        u = cmat_mul(&u, &householder(rng, k));
    }
    cmat_mul(&u, &p)
}

/// Random walk on `k` coordinates; every symbol labels at least one
/// coordinate, so `k >= symbols`.
pub fn random_qrw<R: Rng + ?Sized>(rng: &mut R, k: usize, symbols: usize) -> QrwModel<Rational> {
    assert!(k >= symbols);
    let mut labels: Vec<usize> = (0..symbols).collect();
    labels.extend((symbols..k).map(|_| rng.gen_range(0..symbols)));
    labels.shuffle(rng);
    let u = random_unitary(rng, k);
    let w = random_unitary(rng, k);
    let psi0 = (0..k).map(|i| w[(i, 0)].clone()).collect();
    QrwModel::new(letters(symbols), labels, u, psi0, &exact()).expect("unitary by construction")
}

/// Multiplies the initial vector by a global phase.
pub fn rephase_qrw(qrw: &QrwModel<Rational>, phase: &Complex<Rational>) -> QrwModel<Rational> {
    let psi0 = qrw.psi0().iter().map(|z| z * phase).collect();
    QrwModel::new(qrw.alphabet().clone(), qrw.labels().to_vec(), qrw.unitary().clone(), psi0, &exact())
        .expect("phase keeps the norm")
}

/// Conjugates the walk by a unitary `W` that commutes with every symbol
/// projection: `U' = W U W*`, `psi0' = W psi0`. `W` permutes and rephases
/// coordinates within each symbol's block.
pub fn conjugate_within_blocks<R: Rng + ?Sized>(rng: &mut R, qrw: &QrwModel<Rational>) -> QrwModel<Rational> {
    let k = qrw.coordinates();
    let labels = qrw.labels();
    let mut target: Vec<usize> = (0..k).collect();
    for a in 0..qrw.alphabet().len() {
        let block: Vec<usize> = (0..k).filter(|&m| labels[m] == a).collect();
        let mut shuffled = block.clone();
        shuffled.shuffle(rng);
        for (&from, &to) in block.iter().zip(&shuffled) {
            target[from] = to;
        }
    }
    let phases: Vec<Complex<Rational>> = (0..k).map(|_| random_phase(rng)).collect();
    let w = Matrix::from_fn(k, k, |i, j| {
        if target[j] == i {
            phases[j].clone()
        } else {
            Complex::zero()
        }
    });
    let w_adj = Matrix::from_fn(k, k, |i, j| w[(j, i)].conj());
    let u = cmat_mul(&cmat_mul(&w, qrw.unitary()), &w_adj);
    let psi0 = (0..k)
        .map(|i| (0..k).fold(Complex::zero(), |acc, l| acc + &w[(i, l)] * &qrw.psi0()[l]))
        .collect();
    QrwModel::new(qrw.alphabet().clone(), labels.to_vec(), u, psi0, &exact()).expect("conjugation keeps unitarity")
}

/// Single-coordinate walk over one symbol with `U = phase(s)`,
/// `psi0 = phase(t)`.
pub fn trivial_qrw(s: &Rational, t: &Rational) -> QrwModel<Rational> {
    let u = Matrix::from_fn(1, 1, |_, _| rational_phase(s));
    QrwModel::new(letters(1), vec![0], u, vec![rational_phase(t)], &exact()).expect("unit scalars")
}

pub fn random_pfa<R: Rng + ?Sized>(rng: &mut R, states: usize, symbols: usize) -> PfaModel<Rational> {
    let sparse = rng.gen_bool(0.5);
    let pi = random_distribution(rng, states, 3, sparse);
    let mut finals = Vec::with_capacity(states);
    let mut mats = vec![Matrix::zeros(states, states); symbols];
    for s in 0..states {
        let row = random_distribution(rng, symbols * states + 1, 3, sparse);
        for a in 0..symbols {
            for t in 0..states {
                mats[a][(s, t)] = row[a * states + t].clone();
            }
        }
        finals.push(row[symbols * states].clone());
    }
    PfaModel::new(letters(symbols), pi, finals, mats, &exact()).expect("normalized by construction")
}

pub fn permute_pfa(pfa: &PfaModel<Rational>, perm: &[usize]) -> PfaModel<Rational> {
    let n = pfa.states();
    let mut inv = vec![0; n];
    for (s, &t) in perm.iter().enumerate() {
        inv[t] = s;
    }
    let pi = (0..n).map(|t| pfa.initial()[inv[t]].clone()).collect();
    let f = (0..n).map(|t| pfa.finals()[inv[t]].clone()).collect();
    let mats = pfa
        .transitions()
        .iter()
        .map(|m| Matrix::from_fn(n, n, |i, j| m[(inv[i], inv[j])].clone()))
        .collect();
    PfaModel::new(pfa.alphabet().clone(), pi, f, mats, &exact()).expect("permutation keeps normalization")
}

/// Moves `delta` of one state's outgoing mass from one entry to another.
pub fn perturb_pfa<R: Rng + ?Sized>(rng: &mut R, pfa: &PfaModel<Rational>, delta: &Rational) -> PfaModel<Rational> {
    let n = pfa.states();
    let sigma = pfa.alphabet().len();
    let s = rng.gen_range(0..n);
    let mut row: Vec<Rational> = (0..sigma)
        .flat_map(|a| pfa.transitions()[a].row(s).to_vec())
        .chain(std::iter::once(pfa.finals()[s].clone()))
        .collect();
    let from = rng.gen_range(0..row.len());
    let to = (from + rng.gen_range(1..row.len())) % row.len();
    let moved = if &row[from] < delta { row[from].clone() } else { delta.clone() };
    row[from] = &row[from] - &moved;
    row[to] = &row[to] + &moved;
    let mut mats = pfa.transitions().to_vec();
    for (a, m) in mats.iter_mut().enumerate() {
        for t in 0..n {
            m[(s, t)] = row[a * n + t].clone();
        }
    }
    let mut f = pfa.finals().to_vec();
    f[s] = row[sigma * n].clone();
    PfaModel::new(pfa.alphabet().clone(), pfa.initial().to_vec(), f, mats, &exact()).expect("mass moved within a row")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn generators_validate() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let h = random_hmm(&mut rng, 3, 2);
            let perm = random_permutation(&mut rng, 3);
            permute_hmm(&h, &perm);
            split_state(&h, 1, &Rational::from_ratio(1, 3));
            blend(&h, &h, &Rational::from_ratio(2, 5));
            perturb_emission(&mut rng, &h, &Rational::from_ratio(1, 7));
            let q = random_qrw(&mut rng, 3, 2);
            rephase_qrw(&q, &rational_phase(&Rational::from_ratio(1, 2)));
            conjugate_within_blocks(&mut rng, &q);
            let p = random_pfa(&mut rng, 2, 2);
            perturb_pfa(&mut rng, &p, &Rational::from_ratio(1, 5));
        }
    }

    #[test]
    fn phases_have_unit_modulus() {
        for t in [int(0), int(3), Rational::from_ratio(-2, 7)] {
            let z = rational_phase(&t);
            assert_eq!(&z.re * &z.re + &z.im * &z.im, Rational::one());
        }
    }
}

//! Equivalence testing for finitary stochastic processes.
//!
//! Hidden Markov models, quantum random walks and probabilistic automata are
//! compiled to linear representations; a basis of the Hankel matrix decides
//! whether two models generate the same process.

pub mod basis;
pub mod equivalence;
pub mod io;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod repr;
pub mod sample;
pub mod scalar;

pub use basis::{compute_basis, Basis, BasisStats};
pub use equivalence::{
    cross_class_equivalence, test_equivalence, test_equivalence_pfa, EquivalenceError, EquivalenceOptions,
    PfaVerdict, Reason, Verdict,
};
pub use io::{parse_model, parse_model_with, serialize_model, ParseError};
pub use linalg::{IndependenceTester, Matrix};
pub use model::{
    pfa_to_hmm, Alphabet, AnyModel, HmmModel, Model, ModelKind, PfaModel, QrwModel, Violation, Violations, Word,
    STOP_SYMBOL,
};
pub use oracle::{brute_equiv, enumerate_probs, hankel_rank, OracleError, ProbTable};
pub use repr::{compile, LinearRepresentation};
pub use scalar::{Complex, NumericMode, Rational, Scalar, Tolerance, DEFAULT_TOLERANCE};

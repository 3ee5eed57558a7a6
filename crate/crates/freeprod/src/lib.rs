//! # freeprod
//!
//! Exact structure calculator and numerical verifier for reduced free
//! products of finite-dimensional tracial C*-algebras.
//!
//! Given two algebras `A` and `B`, each a weighted direct sum of matrix
//! blocks 𝕄_n (plus optional diffuse summands), the crate computes the
//! decomposition of the reduced free product `A * B` — its factor-like part,
//! its matrix-block atoms with exact rational weights, its boundary
//! *-homomorphisms — together with simplicity and unique-trace verdicts.
//! Every verdict is decided in exact rational arithmetic.
//!
//! The same answer is derived three more ways and cross-checked:
//!
//! * an independent induction engine peels matrix summands one at a time and
//!   rebuilds corners as compressed free products ([`structure::decompose_by_induction`]);
//! * a symbolic word calculus evaluates the free-product trace on words
//!   exactly from the freeness recursion ([`moments::word_trace`]);
//! * a random-matrix Monte Carlo oracle realizes both algebras at finite
//!   dimension with a Haar rotation and measures traces and spectra
//!   ([`oracle`]).
//!
//! See the `examples/` directory for runnable walkthroughs of each
//! capability, and the `freeprod` binary for the command-line interface.

pub mod algebra;
pub mod exact;
pub mod moments;
pub mod oracle;
pub mod structure;
pub mod cli;

pub use algebra::{ext_dim, mk_algebra, summand_trace, Side, Summand, SummandKind, TracialAlgebra};
pub use exact::{ExactMatrix, HaarPoly, Rational, Scalar};
pub use structure::{
    classify_pairs, compression_rewrite, decompose, decompose_by_induction, mixed_with_matrix,
    scalar_times_matrix, two_projection_structure, vn_decompose, AtomBlock, BoundaryMap,
    Decomposition, TwoProjectionStructure, VnDecomposition,
};

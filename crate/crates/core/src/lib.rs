//! Convergence analysis of forward, backward and symmetric Gauss-Seidel
//! iterations for nonstrictly diagonally dominant and general H-matrices.
//!
//! Verdicts come from structural theorems (comparison matrices, Frobenius
//! normal forms, ray patterns) and are checked against spectral radii from a
//! dense complex eigensolver.

#![allow(clippy::needless_range_loop)]

pub mod convergence;
pub mod corpus;
pub mod eigen;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod matrix;
pub mod mm;
pub mod precondition;
pub mod ray;
pub mod solver;
pub mod taxonomy;

pub use convergence::{analyze, numerical_verdict, theorem_verdict, ConvergenceReport, Status, Verdict};
pub use corpus::{CorpusClass, CorpusId};
pub use error::{Error, ParseError, Result};
pub use graph::{frobenius_normal_form, is_irreducible, FrobeniusForm, IndexSet};
pub use linalg::{determinant, iteration_matrix, schur_complement, split, IterationMethod, Splitting};
pub use matrix::ComplexMatrix;
pub use num_complex::Complex64;
pub use precondition::{Preconditioner, PreconditionerKind};
pub use ray::{construct_ray, ray_test, RayFamily, RayVerdict};
pub use solver::{solve, SolveResult, SolveStatus};
pub use taxonomy::{classify, classify_h, Classification, HClass};

//! The stationary scheme `x <- H x + f`, one triangular solve per half sweep.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{apply_l, apply_u, check_diagonal, solve_lower_in_place, solve_upper_in_place, IterationMethod};
use crate::matrix::{vec_norm_inf, ComplexMatrix, ZERO};
use crate::precondition::Preconditioner;

pub const DEFAULT_TOL: f64 = 1e-10;
/// Iterates larger than `BLOWUP * (1 + ||b||)` count as divergence.
pub const BLOWUP: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    Diverged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub x: Vec<Complex64>,
    pub iterations: usize,
    /// `||x^(i+1) - x^(i)||_inf` per sweep.
    pub history: Vec<f64>,
    pub status: SolveStatus,
    /// `||A x - b||_inf` for the original system.
    pub residual: f64,
}

/// `10 n ceil(1 / (1 - rho))` capped at one million, or `1e5` without an estimate.
pub fn default_maxit(n: usize, rho: Option<f64>) -> usize {
    match rho {
        Some(r) if r < 1.0 => {
            let factor = (1.0 / (1.0 - r)).ceil();
            let v = 10.0 * n as f64 * factor;
            if v.is_finite() {
                (v as usize).clamp(1, 1_000_000)
            } else {
                1_000_000
            }
        }
        Some(_) => 1_000_000,
        None => 100_000,
    }
}

/// One sweep `x <- H x + f` without forming `H`.
pub fn sweep(a: &ComplexMatrix, b: &[Complex64], method: IterationMethod, x: &[Complex64]) -> Vec<Complex64> {
    let n = a.order();
    match method {
        IterationMethod::Jacobi => {
            let lu = apply_l(a, x);
            let uu = apply_u(a, x);
            (0..n).map(|i| (lu[i] + uu[i] + b[i]) / a[(i, i)]).collect()
        }
        IterationMethod::Fgs => forward(a, b, x),
        IterationMethod::Bgs => backward(a, b, x),
        IterationMethod::Sgs => {
            let half = forward(a, b, x);
            backward(a, b, &half)
        }
    }
}

/// `(D - L) y = U x + b`.
fn forward(a: &ComplexMatrix, b: &[Complex64], x: &[Complex64]) -> Vec<Complex64> {
    let mut y: Vec<Complex64> = apply_u(a, x).iter().zip(b).map(|(u, b)| u + b).collect();
    solve_lower_in_place(a, &mut y);
    y
}

/// `(D - U) y = L x + b`.
fn backward(a: &ComplexMatrix, b: &[Complex64], x: &[Complex64]) -> Vec<Complex64> {
    let mut y: Vec<Complex64> = apply_l(a, x).iter().zip(b).map(|(l, b)| l + b).collect();
    solve_upper_in_place(a, &mut y);
    y
}

fn residual(a: &ComplexMatrix, b: &[Complex64], x: &[Complex64]) -> f64 {
    let ax = a.matvec(x);
    ax.iter().zip(b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
}

fn check_dims(a: &ComplexMatrix, b: &[Complex64], x0: &[Complex64]) -> Result<()> {
    let n = a.order();
    for len in [b.len(), x0.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, found: len });
        }
    }
    Ok(())
}

fn iterate(
    a: &ComplexMatrix,
    b: &[Complex64],
    method: IterationMethod,
    x0: &[Complex64],
    tol: f64,
    maxit: usize,
) -> (Vec<Complex64>, usize, Vec<f64>, SolveStatus) {
    let limit = BLOWUP * (1.0 + vec_norm_inf(b));
    let mut x = x0.to_vec();
    let mut history = Vec::new();
    for it in 1..=maxit {
        let next = sweep(a, b, method, &x);
        let step = next.iter().zip(&x).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        history.push(step);
        x = next;
        let size = vec_norm_inf(&x);
        if !size.is_finite() || size > limit {
            return (x, it, history, SolveStatus::Diverged);
        }
        if step <= tol {
            return (x, it, history, SolveStatus::Converged);
        }
    }
    (x, maxit, history, SolveStatus::MaxIterations)
}

pub fn solve(
    a: &ComplexMatrix,
    b: &[Complex64],
    method: IterationMethod,
    x0: &[Complex64],
    tol: f64,
    maxit: usize,
) -> Result<SolveResult> {
    check_diagonal(a)?;
    check_dims(a, b, x0)?;
    let (x, iterations, history, status) = iterate(a, b, method, x0, tol, maxit);
    let residual = residual(a, b, &x);
    Ok(SolveResult { x, iterations, history, status, residual })
}

/// Iterates on `P A x = P b`; the reported residual is that of `A x = b`.
pub fn preconditioned_solve(
    a: &ComplexMatrix,
    b: &[Complex64],
    p: &Preconditioner,
    method: IterationMethod,
    x0: &[Complex64],
    tol: f64,
    maxit: usize,
) -> Result<SolveResult> {
    check_dims(a, b, x0)?;
    if p.matrix.order() != a.order() {
        return Err(Error::DimensionMismatch { expected: a.order(), found: p.matrix.order() });
    }
    let at = p.apply(a);
    check_diagonal(&at)?;
    let pb = p.matrix.matvec(b);
    let (x, iterations, history, status) = iterate(&at, &pb, method, x0, tol, maxit);
    let residual = residual(a, b, &x);
    Ok(SolveResult { x, iterations, history, status, residual })
}

pub fn zeros(n: usize) -> Vec<Complex64> {
    vec![ZERO; n]
}

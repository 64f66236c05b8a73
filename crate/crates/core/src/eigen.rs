//! Dense nonsymmetric complex eigensolver.
//!
//! Pipeline: diagonal balancing (powers of two), Householder reduction to
//! upper Hessenberg form, then single-shift complex QR with Wilkinson shifts
//! and Givens bulge chasing until the Hessenberg matrix is upper triangular.
//! The unitary factor is accumulated so the result carries a backward-error
//! estimate `||M - (DQ) T (DQ)^{-1}||_F`.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ZERO};

/// Default QR sweep budget per unit of matrix order.
pub const DEFAULT_SWEEPS_PER_ORDER: usize = 30;

/// Environment override for the sweep budget multiplier.
pub const SWEEPS_ENV: &str = "HGS_EIG_SWEEPS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    pub spectral_radius: f64,
    pub residual_bound: f64,
}

fn sweeps_per_order() -> usize {
    static BUDGET: OnceLock<usize> = OnceLock::new();
    *BUDGET.get_or_init(|| {
        std::env::var(SWEEPS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&v| v > 0)
            .unwrap_or(DEFAULT_SWEEPS_PER_ORDER)
    })
}

/// All eigenvalues of `m` with the default sweep budget (`30 n`, or
/// `HGS_EIG_SWEEPS * n` when that variable is set).
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Spectrum> {
    eigenvalues_with_budget(m, sweeps_per_order() * m.order().max(1))
}

pub fn spectral_radius(m: &ComplexMatrix) -> Result<f64> {
    Ok(eigenvalues(m)?.spectral_radius)
}

pub fn eigenvalues_with_budget(m: &ComplexMatrix, max_sweeps: usize) -> Result<Spectrum> {
    let n = m.order();
    let mut h: Vec<Vec<Complex64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let scale = balance(&mut h);
    let mut q = identity(n);
    hessenberg(&mut h, &mut q);
    schur_qr(&mut h, &mut q, max_sweeps)?;

    let eigenvalues: Vec<Complex64> = (0..n).map(|i| h[i][i]).collect();
    let spectral_radius = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let residual_bound = backward_error(m, &h, &q, &scale);
    Ok(Spectrum { eigenvalues, spectral_radius, residual_bound })
}

fn identity(n: usize) -> Vec<Vec<Complex64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { Complex64::new(1.0, 0.0) } else { ZERO }).collect()).collect()
}

/// Parlett-Reinsch scaling `H <- D^{-1} H D` with `D` a power-of-two diagonal.
fn balance(h: &mut [Vec<Complex64>]) -> Vec<f64> {
    const RADIX: f64 = 2.0;
    let n = h.len();
    let mut d = vec![1.0; n];
    let mut converged = false;
    let mut rounds = 0;
    while !converged && rounds < 100 {
        converged = true;
        rounds += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += h[j][i].norm();
                    r += h[i][j].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let (mut cc, mut rr, mut f) = (c, r, 1.0);
            while cc < rr / RADIX {
                cc *= RADIX;
                rr /= RADIX;
                f *= RADIX;
            }
            while cc >= rr * RADIX {
                cc /= RADIX;
                rr *= RADIX;
                f /= RADIX;
            }
            // Accept only a meaningful reduction of the row+column norm.
            let new = cc + rr;
            if new < 0.95 * s {
                converged = false;
                d[i] *= f;
                for j in 0..n {
                    h[i][j] /= f;
                    h[j][i] *= f;
                }
            }
        }
    }
    d
}

/// Householder reduction to upper Hessenberg form, accumulating `Q` so that
/// `H_in = Q H_out Q^*`.
fn hessenberg(h: &mut [Vec<Complex64>], q: &mut [Vec<Complex64>]) {
    let n = h.len();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let xnorm = (k + 1..n).map(|i| h[i][k].norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let tail = (k + 2..n).map(|i| h[i][k].norm_sqr()).sum::<f64>();
        if tail == 0.0 {
            continue;
        }
        let x0 = h[k + 1][k];
        let phase = if x0 == ZERO { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[i][k]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // H <- P H with P = I - 2 v v^*, acting on rows k+1..n.
        for j in 0..n {
            let dot: Complex64 = v.iter().enumerate().map(|(t, vt)| vt.conj() * h[k + 1 + t][j]).sum();
            let f = dot * 2.0;
            for (t, vt) in v.iter().enumerate() {
                h[k + 1 + t][j] -= vt * f;
            }
        }
        // H <- H P, acting on columns k+1..n.
        for row in h.iter_mut() {
            let dot: Complex64 = v.iter().enumerate().map(|(t, vt)| row[k + 1 + t] * vt).sum();
            let f = dot * 2.0;
            for (t, vt) in v.iter().enumerate() {
                row[k + 1 + t] -= f * vt.conj();
            }
        }
        for row in q.iter_mut() {
            let dot: Complex64 = v.iter().enumerate().map(|(t, vt)| row[k + 1 + t] * vt).sum();
            let f = dot * 2.0;
            for (t, vt) in v.iter().enumerate() {
                row[k + 1 + t] -= f * vt.conj();
            }
        }
        h[k + 1][k] = alpha;
        for i in k + 2..n {
            h[i][k] = ZERO;
        }
    }
}

/// Complex Givens rotation `G = [[c, s], [-conj(s), c]]` with `G [a; b] = [r; 0]`.
#[derive(Clone, Copy)]
struct Givens {
    c: f64,
    s: Complex64,
}

impl Givens {
    fn new(a: Complex64, b: Complex64) -> Self {
        if b == ZERO {
            return Self { c: 1.0, s: ZERO };
        }
        if a == ZERO {
            return Self { c: 0.0, s: Complex64::new(1.0, 0.0) };
        }
        let an = a.norm();
        let rho = an.hypot(b.norm());
        Self { c: an / rho, s: (a / an) * b.conj() / rho }
    }

    fn rows(&self, h: &mut [Vec<Complex64>], p: usize, q: usize, cols: std::ops::Range<usize>) {
        for j in cols {
            let x = h[p][j];
            let y = h[q][j];
            h[p][j] = x * self.c + self.s * y;
            h[q][j] = -self.s.conj() * x + y * self.c;
        }
    }

    fn cols(&self, h: &mut [Vec<Complex64>], p: usize, q: usize, rows: std::ops::Range<usize>) {
        for row in &mut h[rows] {
            let x = row[p];
            let y = row[q];
            row[p] = x * self.c + y * self.s.conj();
            row[q] = -x * self.s + y * self.c;
        }
    }
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn schur_qr(h: &mut [Vec<Complex64>], q: &mut [Vec<Complex64>], max_sweeps: usize) -> Result<()> {
    let n = h.len();
    if n == 1 {
        return Ok(());
    }
    let ulp = f64::EPSILON;
    let hnorm = h.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    let small = f64::MIN_POSITIVE * (n as f64) / ulp;
    let mut hi = n - 1;
    let mut sweeps = 0usize;
    let mut since_deflation = 0usize;

    while hi > 0 {
        // Find the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[lo][lo - 1].norm();
            let mut diag = h[lo - 1][lo - 1].norm() + h[lo][lo].norm();
            if diag == 0.0 {
                diag = hnorm;
            }
            if sub <= (ulp * diag).max(small) {
                h[lo][lo - 1] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        if sweeps >= max_sweeps {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        since_deflation += 1;

        let shift = if since_deflation % 11 == 10 {
            // Exceptional shift to break cycles.
            h[hi][hi] + Complex64::new(0.75 * h[hi][hi - 1].norm(), 0.0)
        } else {
            wilkinson_shift(h[hi - 1][hi - 1], h[hi - 1][hi], h[hi][hi - 1], h[hi][hi])
        };

        // Implicit single-shift QR sweep over rows/columns lo..=hi.
        let mut x = h[lo][lo] - shift;
        let mut y = h[lo + 1][lo];
        for k in lo..hi {
            let g = Givens::new(x, y);
            let col_start = if k > lo { k - 1 } else { lo };
            g.rows(h, k, k + 1, col_start..n);
            let row_end = (k + 3).min(hi + 1);
            g.cols(h, k, k + 1, 0..row_end);
            g.cols(q, k, k + 1, 0..n);
            if k > lo {
                h[k + 1][k - 1] = ZERO;
            }
            if k + 1 < hi {
                x = h[k + 1][k];
                y = h[k + 2][k];
            }
        }
    }
    Ok(())
}

/// `||M - S Q T Q^* S^{-1}||_F` with `S` the balancing diagonal.
fn backward_error(m: &ComplexMatrix, t: &[Vec<Complex64>], q: &[Vec<Complex64>], scale: &[f64]) -> f64 {
    let n = m.order();
    // W = Q T
    let mut w = vec![vec![ZERO; n]; n];
    for i in 0..n {
        for k in 0..n {
            let qik = q[i][k];
            if qik == ZERO {
                continue;
            }
            for j in k..n {
                w[i][j] += qik * t[k][j];
            }
        }
    }
    let mut err = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut v = ZERO;
            for k in 0..n {
                v += w[i][k] * q[j][k].conj();
            }
            let rebuilt = v * scale[i] / scale[j];
            err += (m[(i, j)] - rebuilt).norm_sqr();
        }
    }
    err.sqrt()
}

//! Standard splitting, iteration matrices, LU-based determinant and Schur
//! complements.
//!
//! Sign convention: `A = D - L - U`, so `L` and `U` hold the *negated*
//! strictly lower and upper parts of `A`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::IndexSet;
use crate::matrix::{ComplexMatrix, ZERO};

/// Relative pivot tolerance used by the determinant and block solves.
pub const PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IterationMethod {
    Jacobi,
    #[serde(rename = "FGS")]
    Fgs,
    #[serde(rename = "BGS")]
    Bgs,
    #[serde(rename = "SGS")]
    Sgs,
}

impl IterationMethod {
    pub const ALL: [IterationMethod; 4] = [Self::Jacobi, Self::Fgs, Self::Bgs, Self::Sgs];
    pub const GAUSS_SEIDEL: [IterationMethod; 3] = [Self::Fgs, Self::Bgs, Self::Sgs];

    pub fn label(self) -> &'static str {
        match self {
            Self::Jacobi => "J",
            Self::Fgs => "FGS",
            Self::Bgs => "BGS",
            Self::Sgs => "SGS",
        }
    }
}

impl std::fmt::Display for IterationMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for IterationMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "j" | "jacobi" => Ok(Self::Jacobi),
            "fgs" => Ok(Self::Fgs),
            "bgs" => Ok(Self::Bgs),
            "sgs" => Ok(Self::Sgs),
            other => Err(format!("unknown method `{other}` (expected j, fgs, bgs or sgs)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Splitting {
    pub d: ComplexMatrix,
    pub l: ComplexMatrix,
    pub u: ComplexMatrix,
    pub diagonal_nonzero: bool,
}

impl Splitting {
    pub fn reassemble(&self) -> ComplexMatrix {
        self.d.sub(&self.l).sub(&self.u)
    }
}

pub fn split(a: &ComplexMatrix) -> Splitting {
    let n = a.order();
    let mut d = ComplexMatrix::zeros(n);
    let mut l = ComplexMatrix::zeros(n);
    let mut u = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let v = a[(i, j)];
            match i.cmp(&j) {
                std::cmp::Ordering::Equal => d[(i, j)] = v,
                std::cmp::Ordering::Greater => l[(i, j)] = -v,
                std::cmp::Ordering::Less => u[(i, j)] = -v,
            }
        }
    }
    let diagonal_nonzero = (0..n).all(|i| a[(i, i)] != ZERO);
    Splitting { d, l, u, diagonal_nonzero }
}

pub(crate) fn check_diagonal(a: &ComplexMatrix) -> Result<()> {
    match (0..a.order()).find(|&i| a[(i, i)] == ZERO) {
        Some(i) => Err(Error::ZeroDiagonal(i)),
        None => Ok(()),
    }
}

/// Solves `(D - L) x = rhs` in place, where `D - L` is the lower triangle of `a`.
pub(crate) fn solve_lower_in_place(a: &ComplexMatrix, x: &mut [Complex64]) {
    let n = a.order();
    for i in 0..n {
        let row = a.row(i);
        let mut s = x[i];
        for j in 0..i {
            s -= row[j] * x[j];
        }
        x[i] = s / row[i];
    }
}

/// Solves `(D - U) x = rhs` in place, where `D - U` is the upper triangle of `a`.
pub(crate) fn solve_upper_in_place(a: &ComplexMatrix, x: &mut [Complex64]) {
    let n = a.order();
    for i in (0..n).rev() {
        let row = a.row(i);
        let mut s = x[i];
        for j in i + 1..n {
            s -= row[j] * x[j];
        }
        x[i] = s / row[i];
    }
}

/// Column `j` of `-strict_lower(a)` i.e. of `L`.
fn l_column(a: &ComplexMatrix, j: usize) -> Vec<Complex64> {
    (0..a.order()).map(|i| if i > j { -a[(i, j)] } else { ZERO }).collect()
}

fn u_column(a: &ComplexMatrix, j: usize) -> Vec<Complex64> {
    (0..a.order()).map(|i| if i < j { -a[(i, j)] } else { ZERO }).collect()
}

fn from_columns(n: usize, cols: Vec<Vec<Complex64>>) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, |i, j| cols[j][i])
}

/// `H_J = D^{-1}(L+U)`, `H_FGS = (D-L)^{-1}U`, `H_BGS = (D-U)^{-1}L`,
/// `H_SGS = (D-U)^{-1} L (D-L)^{-1} U`.
pub fn iteration_matrix(a: &ComplexMatrix, method: IterationMethod) -> Result<ComplexMatrix> {
    check_diagonal(a)?;
    let n = a.order();
    let h = match method {
        IterationMethod::Jacobi => ComplexMatrix::from_fn(n, |i, j| if i == j { ZERO } else { -a[(i, j)] / a[(i, i)] }),
        IterationMethod::Fgs => {
            let cols = (0..n)
                .map(|j| {
                    let mut c = u_column(a, j);
                    solve_lower_in_place(a, &mut c);
                    c
                })
                .collect();
            from_columns(n, cols)
        }
        IterationMethod::Bgs => {
            let cols = (0..n)
                .map(|j| {
                    let mut c = l_column(a, j);
                    solve_upper_in_place(a, &mut c);
                    c
                })
                .collect();
            from_columns(n, cols)
        }
        IterationMethod::Sgs => {
            let cols = (0..n)
                .map(|j| {
                    let mut c = u_column(a, j);
                    solve_lower_in_place(a, &mut c);
                    let mut t = apply_l(a, &c);
                    solve_upper_in_place(a, &mut t);
                    t
                })
                .collect();
            from_columns(n, cols)
        }
    };
    Ok(h)
}

/// `L x` with `L = -strict_lower(a)`.
pub(crate) fn apply_l(a: &ComplexMatrix, x: &[Complex64]) -> Vec<Complex64> {
    let n = a.order();
    (0..n)
        .map(|i| {
            let row = a.row(i);
            -(0..i).map(|j| row[j] * x[j]).sum::<Complex64>()
        })
        .collect()
}

/// `U x` with `U = -strict_upper(a)`.
pub(crate) fn apply_u(a: &ComplexMatrix, x: &[Complex64]) -> Vec<Complex64> {
    let n = a.order();
    (0..n)
        .map(|i| {
            let row = a.row(i);
            -(i + 1..n).map(|j| row[j] * x[j]).sum::<Complex64>()
        })
        .collect()
}

/// LU factorisation with partial pivoting, `P A = L U` packed in one matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Vec<Vec<Complex64>>,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

impl Lu {
    /// Factors a (possibly rectangular-stored) square block. A pivot column whose
    /// candidates all fall below `PIVOT_TOL * scale` marks the factorisation singular.
    pub fn new(rows: Vec<Vec<Complex64>>, scale: f64) -> Self {
        let n = rows.len();
        let mut lu = rows;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular = false;
        let tol = PIVOT_TOL * scale.max(f64::MIN_POSITIVE);
        for k in 0..n {
            let (p, pmax) =
                (k..n).map(|i| (i, lu[i][k].norm())).fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax <= tol {
                singular = true;
                continue;
            }
            if p != k {
                lu.swap(p, k);
                perm.swap(p, k);
                sign = -sign;
            }
            let pivot = lu[k][k];
            for i in k + 1..n {
                let f = lu[i][k] / pivot;
                lu[i][k] = f;
                if f == ZERO {
                    continue;
                }
                let (upper, lower) = lu.split_at_mut(i);
                let rk = &upper[k];
                for (x, y) in lower[0][k + 1..].iter_mut().zip(&rk[k + 1..]) {
                    *x -= f * y;
                }
            }
        }
        Self { lu, perm, sign, singular }
    }

    pub fn from_matrix(a: &ComplexMatrix) -> Self {
        let n = a.order();
        Self::new((0..n).map(|i| a.row(i).to_vec()).collect(), a.norm_inf())
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn determinant(&self) -> Complex64 {
        if self.singular {
            return ZERO;
        }
        let mut d = Complex64::new(self.sign, 0.0);
        for (k, row) in self.lu.iter().enumerate() {
            d *= row[k];
        }
        d
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.singular {
            return Err(Error::SingularBlock);
        }
        let n = self.lu.len();
        if b.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: b.len() });
        }
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i][j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i][j] * x[j];
            }
            x[i] = s / self.lu[i][i];
        }
        Ok(x)
    }
}

/// Determinant by partial-pivoting elimination; exactly zero when a pivot
/// column is entirely below `1e-12 * ||A||_inf`.
pub fn determinant(a: &ComplexMatrix) -> Complex64 {
    Lu::from_matrix(a).determinant()
}

/// `A/alpha = A(alpha') - A(alpha', alpha) A(alpha)^{-1} A(alpha, alpha')`.
pub fn schur_complement(a: &ComplexMatrix, alpha: &IndexSet) -> Result<ComplexMatrix> {
    let n = a.order();
    let alpha = IndexSet::proper(alpha.as_slice().to_vec(), n)?;
    let comp = alpha.complement(n);
    let lu = Lu::new(a.block(alpha.as_slice(), alpha.as_slice()), a.norm_inf());
    if lu.is_singular() {
        return Err(Error::SingularBlock);
    }
    let ca = comp.as_slice();
    let aa = alpha.as_slice();
    // X = A(alpha)^{-1} A(alpha, alpha'), one column per index of alpha'.
    let x_cols: Vec<Vec<Complex64>> =
        ca.iter().map(|&j| lu.solve(&aa.iter().map(|&i| a[(i, j)]).collect::<Vec<_>>())).collect::<Result<_>>()?;
    let m = ca.len();
    Ok(ComplexMatrix::from_fn(m, |r, c| {
        let i = ca[r];
        let mut v = a[(i, ca[c])];
        for (k, &p) in aa.iter().enumerate() {
            v -= a[(i, p)] * x_cols[c][k];
        }
        v
    }))
}

/// Solves `A x = b` directly (reference solution for residual checks).
pub fn solve_dense(a: &ComplexMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    Lu::from_matrix(a).solve(b)
}

//! Gauss-type left preconditioners and the check that the preconditioned
//! matrix is an invertible H-matrix with spectral radii bounded by those of
//! the comparison matrix of the reduced system.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::convergence::numerically_convergent;
use crate::eigen;
use crate::error::{Error, Result};
use crate::graph::IndexSet;
use crate::linalg::{iteration_matrix, schur_complement, IterationMethod, Lu, PIVOT_TOL};
use crate::matrix::ComplexMatrix;
use crate::taxonomy::{classify_h, comparison_matrix, HClass};

/// Slack allowed when comparing a preconditioned radius with its reference.
pub const BOUND_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreconditionerKind {
    FirstColumn,
    GaussTransform,
    GaussChain,
    ColumnEliminator,
    SchurAlpha,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreconditionerParams {
    /// 0-based pivot index.
    Pivot(usize),
    Weights(Vec<f64>),
    Alpha(IndexSet),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preconditioner {
    pub kind: PreconditionerKind,
    pub matrix: ComplexMatrix,
    pub params: PreconditionerParams,
}

impl Preconditioner {
    pub fn identity(n: usize) -> Self {
        Self {
            kind: PreconditionerKind::FirstColumn,
            matrix: ComplexMatrix::identity(n),
            params: PreconditionerParams::Weights(vec![0.0; n]),
        }
    }

    pub fn apply(&self, a: &ComplexMatrix) -> ComplexMatrix {
        self.matrix.matmul(a)
    }
}

/// CLI-facing strategy names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    FirstColumn,
    GaussChain,
    ColumnK,
    SchurAlpha,
}

impl Strategy {
    pub fn label(self) -> &'static str {
        match self {
            Strategy::FirstColumn => "first-column",
            Strategy::GaussChain => "gauss-chain",
            Strategy::ColumnK => "column-k",
            Strategy::SchurAlpha => "schur-alpha",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Strategy::FirstColumn, Strategy::GaussChain, Strategy::ColumnK, Strategy::SchurAlpha]
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| Error::BadClass(format!("unknown strategy `{s}`")))
    }
}

fn pivot(a: &ComplexMatrix, k: usize) -> Result<Complex64> {
    if k >= a.order() {
        return Err(Error::BadIndexSet(format!("pivot {} out of range 1..={}", k + 1, a.order())));
    }
    let p = a[(k, k)];
    if p.norm() <= PIVOT_TOL * a.max_abs().max(f64::MIN_POSITIVE) {
        return Err(Error::ZeroPivot(k));
    }
    Ok(p)
}

/// Identity with `-w_i a_{i1}` in the first column below the diagonal.
pub fn first_column(a: &ComplexMatrix, weights: &[f64]) -> Result<Preconditioner> {
    let n = a.order();
    if weights.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: weights.len() });
    }
    pivot(a, 0)?;
    let mut p = ComplexMatrix::identity(n);
    for i in 1..n {
        p[(i, 0)] = -a[(i, 0)] * weights[i];
    }
    Ok(Preconditioner {
        kind: PreconditionerKind::FirstColumn,
        matrix: p,
        params: PreconditionerParams::Weights(weights.to_vec()),
    })
}

/// `M_k`: identity with `-tau_i = -a_ik / a_kk` below the pivot in column `k`.
pub fn gauss_transform(a: &ComplexMatrix, k: usize) -> Result<Preconditioner> {
    let akk = pivot(a, k)?;
    let n = a.order();
    let mut p = ComplexMatrix::identity(n);
    for i in k + 1..n {
        p[(i, k)] = -a[(i, k)] / akk;
    }
    Ok(Preconditioner { kind: PreconditionerKind::GaussTransform, matrix: p, params: PreconditionerParams::Pivot(k) })
}

/// `M_k ... M_1`, each factor taken from the partially eliminated matrix.
pub fn gauss_chain(a: &ComplexMatrix, k: usize) -> Result<Preconditioner> {
    let n = a.order();
    if k >= n {
        return Err(Error::BadIndexSet(format!("pivot {} out of range 1..={n}", k + 1)));
    }
    let mut work = a.clone();
    let mut p = ComplexMatrix::identity(n);
    for j in 0..=k {
        let m = gauss_transform(&work, j)?.matrix;
        work = m.matmul(&work);
        p = m.matmul(&p);
    }
    Ok(Preconditioner { kind: PreconditionerKind::GaussChain, matrix: p, params: PreconditionerParams::Pivot(k) })
}

/// Identity with `-a_ik / a_kk` at `(i, k)` for every `i != k`.
pub fn column_eliminator(a: &ComplexMatrix, k: usize) -> Result<Preconditioner> {
    let akk = pivot(a, k)?;
    let n = a.order();
    let mut p = ComplexMatrix::identity(n);
    for i in (0..n).filter(|&i| i != k) {
        p[(i, k)] = -a[(i, k)] / akk;
    }
    Ok(Preconditioner { kind: PreconditionerKind::ColumnEliminator, matrix: p, params: PreconditionerParams::Pivot(k) })
}

/// Identity with the block `-A(alpha', alpha) A(alpha)^{-1}` at rows `alpha'`,
/// columns `alpha`; this is the block eliminator conjugated back from the
/// ordering that puts `alpha` first.
pub fn schur_preconditioner(a: &ComplexMatrix, alpha: &IndexSet) -> Result<Preconditioner> {
    let n = a.order();
    let alpha = IndexSet::proper(alpha.as_slice().to_vec(), n)?;
    let comp = alpha.complement(n);
    let (aa, ca) = (alpha.as_slice(), comp.as_slice());
    // Rows of X solve X A(alpha) = A(alpha', alpha), i.e. A(alpha)^T x = row^T.
    let lu_t = Lu::new(aa.iter().map(|&j| aa.iter().map(|&i| a[(i, j)]).collect()).collect(), a.norm_inf());
    if lu_t.is_singular() {
        return Err(Error::SingularBlock);
    }
    let mut p = ComplexMatrix::identity(n);
    for &i in ca {
        let row: Vec<Complex64> = aa.iter().map(|&j| a[(i, j)]).collect();
        let x = lu_t.solve(&row)?;
        for (b, &j) in aa.iter().enumerate() {
            p[(i, j)] = -x[b];
        }
    }
    Ok(Preconditioner { kind: PreconditionerKind::SchurAlpha, matrix: p, params: PreconditionerParams::Alpha(alpha) })
}

/// Builds the preconditioner named by a CLI strategy. `k` is 0-based.
pub fn from_strategy(
    a: &ComplexMatrix,
    strategy: Strategy,
    k: Option<usize>,
    alpha: Option<&IndexSet>,
) -> Result<Preconditioner> {
    let n = a.order();
    match strategy {
        Strategy::FirstColumn => first_column(a, &vec![1.0; n]),
        Strategy::GaussChain => gauss_chain(a, k.unwrap_or(n.saturating_sub(2))),
        Strategy::ColumnK => column_eliminator(a, k.unwrap_or(0)),
        Strategy::SchurAlpha => {
            let alpha = alpha.ok_or_else(|| Error::BadIndexSet("schur-alpha needs an index set".into()))?;
            schur_preconditioner(a, alpha)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodBound {
    pub method: IterationMethod,
    /// `rho(H_X)` of the unpreconditioned matrix.
    pub rho_original: Option<f64>,
    /// `rho(H_X)` of the preconditioned matrix.
    pub rho_preconditioned: Option<f64>,
    /// `rho(H_X)` of the comparison matrix of the preconditioned matrix.
    pub rho_comparison: Option<f64>,
    /// `rho(H_X)` of the reference comparison matrix bounding the preconditioned radius.
    pub rho_reference: Option<f64>,
    pub bound_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreconditionReport {
    pub kind: PreconditionerKind,
    pub h_class: HClass,
    /// What `rho_reference` is computed from.
    pub reference: String,
    pub methods: Vec<MethodBound>,
    #[serde(skip)]
    pub preconditioned: ComplexMatrix,
}

impl PreconditionReport {
    pub fn method(&self, m: IterationMethod) -> Option<&MethodBound> {
        self.methods.iter().find(|b| b.method == m)
    }

    pub fn all_bounds_hold(&self) -> bool {
        self.methods.iter().all(|b| b.bound_holds)
    }
}

fn radius(a: &ComplexMatrix, m: IterationMethod) -> Option<f64> {
    iteration_matrix(a, m).ok().and_then(|h| eigen::spectral_radius(&h).ok())
}

/// Comparison matrices whose iteration radii bound those of `PA`.
fn references(a: &ComplexMatrix, p: &Preconditioner, at: &ComplexMatrix) -> (String, Vec<ComplexMatrix>) {
    match &p.params {
        PreconditionerParams::Pivot(k) if p.kind == PreconditionerKind::ColumnEliminator => {
            let k_set = IndexSet::new(vec![*k], a.order()).expect("pivot in range");
            if a.order() == 1 {
                return ("mu(PA)".into(), vec![comparison_matrix(at)]);
            }
            match schur_complement(a, &k_set) {
                Ok(s) => (format!("mu(A/{})", k + 1), vec![comparison_matrix(&s)]),
                Err(_) => ("mu(PA)".into(), vec![comparison_matrix(at)]),
            }
        }
        PreconditionerParams::Alpha(alpha) => match schur_complement(a, alpha) {
            Ok(s) => (
                format!("max(mu(A({alpha})), mu(A/{alpha}))"),
                vec![comparison_matrix(&a.principal(alpha)), comparison_matrix(&s)],
            ),
            Err(_) => ("mu(PA)".into(), vec![comparison_matrix(at)]),
        },
        _ => ("mu(PA)".into(), vec![comparison_matrix(at)]),
    }
}

/// Radii of all four schemes on `A`, `PA`, `mu(PA)` and the reference
/// comparison matrices, and whether `rho(PA) <= rho(reference) < 1` holds.
pub fn verify_preconditioned(a: &ComplexMatrix, p: &Preconditioner) -> PreconditionReport {
    let at = p.apply(a);
    let h_class = classify_h(&at);
    let mu_at = comparison_matrix(&at);
    let (reference, refs) = references(a, p, &at);
    let methods = std::thread::scope(|scope| {
        let handles: Vec<_> = IterationMethod::ALL
            .iter()
            .map(|&m| {
                let (at, mu_at, refs) = (&at, &mu_at, &refs);
                scope.spawn(move || {
                    let rho_reference =
                        refs.iter().map(|r| radius(r, m)).try_fold(0.0f64, |acc, r| r.map(|r| acc.max(r)));
                    let rho_preconditioned = radius(at, m);
                    let bound_holds = match (rho_preconditioned, rho_reference) {
                        (Some(pr), Some(rr)) => pr <= rr + BOUND_TOL && numerically_convergent(rr),
                        _ => false,
                    };
                    MethodBound {
                        method: m,
                        rho_original: radius(a, m),
                        rho_preconditioned,
                        rho_comparison: radius(mu_at, m),
                        rho_reference,
                        bound_holds,
                    }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("bound worker panicked")).collect()
    });
    PreconditionReport { kind: p.kind, h_class, reference, methods, preconditioned: at }
}

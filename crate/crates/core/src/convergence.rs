//! Theorem-based convergence verdicts, cross-checked against spectral radii.
//!
//! The rule chain, first match wins:
//!
//! 1. a zero diagonal entry: unknown (the schemes are undefined);
//! 2. Hermitian positive definite: converges;
//! 3. strictly or irreducibly diagonally dominant: converges;
//! 4. invertible H-matrix: converges;
//! 5. mixed H-matrix: per irreducible Frobenius block. Blocks with a
//!    nonsingular comparison matrix converge; 2x2 equipotent blocks diverge
//!    with unit spectral radius; larger equipotent blocks diverge exactly when
//!    their unit-diagonal form is a psi-ray (forward) or phi-ray (backward)
//!    matrix. For the symmetric scheme a zero-ray block diverges, and so does
//!    any block whose `2n x 2n` pencil (see `sgs_pencil_angle`) is singular
//!    for some unimodular eigenvalue; the zero-ray condition alone is not
//!    necessary. The spectral radius of the whole matrix is the maximum over
//!    blocks;
//! 6. not an H-matrix: unknown.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::eigen;
use crate::error::{Error, Result};
use crate::graph::{frobenius_normal_form, FrobeniusForm, IndexSet};
use crate::linalg::{check_diagonal, iteration_matrix, IterationMethod};
use crate::matrix::{ComplexMatrix, ZERO};
use crate::ray::{ray_test, solve_phases, RayAngle, RayFamily};
use crate::taxonomy::{classify, classify_m, comparison_matrix, Classification, DominanceTag, HClass, MTag};

/// `|rho - 1| <= UNIT_TOL` counts as `rho = 1`; convergence needs `rho < 1 - UNIT_TOL`.
pub const UNIT_TOL: f64 = 1e-8;

pub fn numerically_convergent(rho: f64) -> bool {
    rho < 1.0 - UNIT_TOL
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converges,
    Diverges,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Converges => "converges",
            Status::Diverges => "diverges",
            Status::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub id: String,
    pub citation: String,
}

impl Rule {
    fn new(id: &str, citation: &str) -> Self {
        Self { id: id.into(), citation: citation.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// The diverging irreducible block, as original indices.
    pub block: IndexSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ray_family: Option<RayFamily>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ray_angle: Option<RayAngle>,
    /// Spectral radius the theorem pins down for the block.
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub rule_chain: Vec<Rule>,
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl Verdict {
    fn unknown(rule: Rule, diagnostic: impl Into<String>) -> Self {
        Self { status: Status::Unknown, rule_chain: vec![rule], witness: None, diagnostic: Some(diagnostic.into()) }
    }

    fn converges(rule_chain: Vec<Rule>) -> Self {
        Self { status: Status::Converges, rule_chain, witness: None, diagnostic: None }
    }
}

/// Spectral radius of the iteration matrix and whether it is below one.
pub fn numerical_verdict(a: &ComplexMatrix, method: IterationMethod) -> Result<(f64, bool)> {
    let rho = eigen::spectral_radius(&iteration_matrix(a, method)?)?;
    Ok((rho, numerically_convergent(rho)))
}

fn ray_family_for(method: IterationMethod) -> RayFamily {
    match method {
        IterationMethod::Fgs => RayFamily::Psi,
        IterationMethod::Bgs => RayFamily::Phi,
        _ => RayFamily::Zero,
    }
}

fn method_tag(method: IterationMethod) -> &'static str {
    match method {
        IterationMethod::Jacobi => "jacobi",
        IterationMethod::Fgs => "forward",
        IterationMethod::Bgs => "backward",
        IterationMethod::Sgs => "symmetric",
    }
}

/// Verdict of one irreducible block with nonzero diagonal inside a mixed
/// H-matrix. `None` means the block converges.
fn block_divergence(block: &ComplexMatrix, indices: &IndexSet, method: IterationMethod) -> Option<(Witness, Rule)> {
    let m = classify_m(&comparison_matrix(block));
    if m.tag != MTag::SingularM {
        return None;
    }
    if block.order() == 2 {
        return Some((
            Witness { block: indices.clone(), ray_family: None, ray_angle: None, rho: 1.0 },
            Rule::new(
                "gde-2x2",
                "irreducible 2x2 generalized equipotent block: rho = |a12 a21| / |a11 a22| = 1 for all three schemes",
            ),
        ));
    }
    let d: Vec<_> = block.diag().iter().map(|z| z.inv()).collect();
    let unit = block.scale_rows(&d);
    let family = ray_family_for(method);
    let v = ray_test(&unit, family);
    if !v.member {
        if method == IterationMethod::Sgs {
            if let Some(angle) = sgs_pencil_angle(&unit) {
                return Some((
                    Witness { block: indices.clone(), ray_family: None, ray_angle: Some(angle), rho: 1.0 },
                    Rule::new(
                        "gde-sgs-pencil",
                        "generalized equipotent block whose pencil [[D-L, -U], [-e^{-i theta} L, D-U]] has a closed \
                         irreducible block in the zero-ray class: e^{i theta} is an eigenvalue of the symmetric \
                         scheme and rho = 1",
                    ),
                ));
            }
        }
        return None;
    }
    let (id, citation) = match family {
        RayFamily::Psi => ("gde-psi-ray", "generalized equipotent block whose unit-diagonal form is a psi-ray matrix: forward scheme has rho = 1"),
        RayFamily::Phi => ("gde-phi-ray", "generalized equipotent block whose unit-diagonal form is a phi-ray matrix: backward scheme has rho = 1"),
        _ => ("gde-zero-ray", "generalized equipotent block whose unit-diagonal form is a zero-ray matrix: the block is singular and the symmetric scheme has rho = 1"),
    };
    Some((
        Witness { block: indices.clone(), ray_family: Some(family), ray_angle: v.angle, rho: 1.0 },
        Rule::new(id, citation),
    ))
}

/// Angle `theta` for which the symmetric iteration matrix of the unit-diagonal
/// equipotent block `unit = I - L - U` has the eigenvalue `e^{i theta}`.
///
/// `e^{i theta}` is an eigenvalue exactly when
/// `C = [[I - L, -U], [-e^{-i theta} L, I - U]]` is singular. `C` is
/// equipotent, so it is singular exactly when some irreducible block of its
/// Frobenius form that no other block is reached from its rows is a zero-ray
/// matrix. The bottom-left entries carry the angle.
fn sgs_pencil_angle(unit: &ComplexMatrix) -> Option<RayAngle> {
    let n = unit.order();
    let c = ComplexMatrix::from_fn(2 * n, |r, s| {
        let (i, j) = (r % n, s % n);
        let top = r < n;
        let left = s < n;
        let keep = match (top, left) {
            (true, true) => j <= i,
            (true, false) => j > i,
            (false, true) => j < i,
            (false, false) => j >= i,
        };
        if keep {
            unit[(i, j)]
        } else {
            ZERO
        }
    });
    let fnf = frobenius_normal_form(&c);
    for block in &fnf.blocks {
        let idx = block.as_slice();
        if idx.len() < 2 {
            continue;
        }
        let closed = idx.iter().all(|&r| (0..2 * n).all(|s| c[(r, s)] == ZERO || block.contains(s)));
        if !closed {
            continue;
        }
        let sub = c.principal(block);
        let sol = solve_phases(&sub, |r, s| i64::from(idx[r] >= n && idx[s] < n));
        if sol.member {
            return Some(if sol.determined { RayAngle::Fixed(sol.chosen) } else { RayAngle::Free });
        }
    }
    None
}

fn theorem_verdict_with(
    a: &ComplexMatrix,
    method: IterationMethod,
    class: &Classification,
    fnf: &FrobeniusForm,
) -> Verdict {
    if method == IterationMethod::Jacobi {
        return Verdict::unknown(
            Rule::new("jacobi-numerical-only", "Jacobi convergence theory for general H-matrices is not decided here"),
            "Jacobi is checked numerically only",
        );
    }
    if let Err(Error::ZeroDiagonal(i)) = check_diagonal(a) {
        return Verdict::unknown(
            Rule::new("zero-diagonal", "the splitting needs a nonzero diagonal"),
            format!("diagonal entry {} is zero", i + 1),
        );
    }
    if class.hpd {
        return Verdict::converges(vec![Rule::new(
            "hpd",
            "Hermitian positive definite: forward, backward and symmetric Gauss-Seidel converge",
        )]);
    }
    if matches!(class.dominance.tag, DominanceTag::StrictlyDd | DominanceTag::IrreduciblyDd) {
        return Verdict::converges(vec![Rule::new(
            "strict-or-irreducible-dominance",
            "strictly or irreducibly diagonally dominant: Gauss-Seidel converges",
        )]);
    }
    match class.h_class {
        HClass::Invertible => {
            Verdict::converges(vec![Rule::new("invertible-h", "invertible H-matrix: Gauss-Seidel converges")])
        }
        HClass::NotH => Verdict::unknown(
            Rule::new("not-h", "outside the general H-matrix class no verdict applies"),
            "comparison matrix is not an M-matrix",
        ),
        HClass::Singular => Verdict::unknown(
            Rule::new("zero-diagonal", "the splitting needs a nonzero diagonal"),
            "singular H-matrix with a zero diagonal entry",
        ),
        HClass::Mixed => {
            let mut chain = vec![Rule::new(
                "mixed-h-blocks",
                "mixed H-matrix: decided on the irreducible blocks of the Frobenius normal form",
            )];
            for (indices, block) in fnf.blocks.iter().zip(&fnf.block_matrices) {
                if let Some((witness, rule)) = block_divergence(block, indices, method) {
                    chain.push(rule);
                    chain.push(Rule::new(
                        "block-max",
                        "the spectral radius is the maximum over the diagonal blocks of the Frobenius normal form",
                    ));
                    return Verdict {
                        status: Status::Diverges,
                        rule_chain: chain,
                        witness: Some(witness),
                        diagnostic: None,
                    };
                }
            }
            chain.push(Rule::new(
                "no-diverging-block",
                match method {
                    IterationMethod::Fgs => "no 2x2 generalized equipotent block and no generalized equipotent psi-ray block",
                    IterationMethod::Bgs => "no 2x2 generalized equipotent block and no generalized equipotent phi-ray block",
                    _ => "no 2x2 generalized equipotent block, no generalized equipotent zero-ray block and no singular unimodular pencil",
                },
            ));
            chain.push(Rule::new(
                "block-max",
                "the spectral radius is the maximum over the diagonal blocks of the Frobenius normal form",
            ));
            Verdict::converges(chain)
        }
    }
}

/// Theorem-based verdict for one Gauss-Seidel variant. Jacobi always yields
/// `Unknown`.
pub fn theorem_verdict(a: &ComplexMatrix, method: IterationMethod) -> Verdict {
    theorem_verdict_with(a, method, &classify(a), &frobenius_normal_form(a))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: IterationMethod,
    pub verdict: Verdict,
    /// Numerical spectral radius, absent when the iteration matrix is undefined.
    pub rho: Option<f64>,
    pub agree: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub classification: Classification,
    pub fnf: FrobeniusForm,
    pub methods: Vec<MethodReport>,
}

impl ConvergenceReport {
    pub fn method(&self, method: IterationMethod) -> Option<&MethodReport> {
        self.methods.iter().find(|m| m.method == method)
    }

    pub fn all_agree(&self) -> bool {
        self.methods.iter().all(|m| m.agree)
    }
}

/// `Unknown` never disagrees; otherwise the verdict must match `rho < 1 - 1e-8`.
pub fn agrees(status: Status, rho: Option<f64>) -> bool {
    match (status, rho) {
        (Status::Unknown, _) => true,
        (_, None) => false,
        (Status::Converges, Some(r)) => numerically_convergent(r),
        (Status::Diverges, Some(r)) => !numerically_convergent(r),
    }
}

fn method_report(
    a: &ComplexMatrix,
    method: IterationMethod,
    class: &Classification,
    fnf: &FrobeniusForm,
) -> MethodReport {
    let verdict = theorem_verdict_with(a, method, class, fnf);
    let (rho, diagnostic) = match numerical_verdict(a, method) {
        Ok((rho, _)) => (Some(rho), None),
        Err(e) => (None, Some(format!("{} iteration: {e}", method_tag(method)))),
    };
    let agree = agrees(verdict.status, rho);
    MethodReport { method, verdict, rho, agree, diagnostic }
}

/// Classification, Frobenius form and the four per-method verdicts. The
/// methods are evaluated on separate threads.
pub fn analyze(a: &ComplexMatrix) -> ConvergenceReport {
    analyze_methods(a, &IterationMethod::ALL)
}

pub fn analyze_methods(a: &ComplexMatrix, methods: &[IterationMethod]) -> ConvergenceReport {
    let classification = classify(a);
    let fnf = frobenius_normal_form(a);
    let methods = std::thread::scope(|scope| {
        let handles: Vec<_> = methods
            .iter()
            .map(|&m| {
                let (class, fnf) = (&classification, &fnf);
                scope.spawn(move || method_report(a, m, class, fnf))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("method worker panicked")).collect()
    });
    ConvergenceReport { classification, fnf, methods }
}

/// Whether every diagonal entry is nonzero.
pub fn has_nonzero_diagonal(a: &ComplexMatrix) -> bool {
    (0..a.order()).all(|i| a[(i, i)] != ZERO)
}

//! Matrix classes: comparison matrix, M-matrix verdicts, the general
//! H-matrix trichotomy, the row diagonal dominance ladder and generalized
//! (equipotent) scalings.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::eigen;
use crate::error::{Error, Result};
use crate::graph::{frobenius_normal_form, is_irreducible, IndexSet};
use crate::linalg::Lu;
use crate::matrix::{ComplexMatrix, ZERO};

/// Relative tolerance for row equality in the dominance tests.
pub const EQUALITY_TOL: f64 = 1e-9;
/// Relative tolerance separating `rho(B) < s`, `= s`, `> s`.
pub const M_TOL: f64 = 1e-9;
/// Hermitian symmetry tolerance for the HPD test.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DominanceTag {
    StrictlyDd,
    IrreduciblyDd,
    NonstrictDd,
    DiagonallyEquipotent,
    NotDd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceClass {
    pub tag: DominanceTag,
    /// Rows where `|a_ii| = sum_{j != i} |a_ij|` within tolerance.
    pub equality_rows: IndexSet,
}

impl DominanceClass {
    pub fn is_dominant(&self) -> bool {
        self.tag != DominanceTag::NotDd
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MTag {
    NotZ,
    NonsingularM,
    SingularM,
    NotM,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MClass {
    pub tag: MTag,
    /// `max_i z_ii`, so that `Z = sI - B` with `B >= 0`.
    pub s: f64,
    pub rho_b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HClass {
    Invertible,
    Singular,
    Mixed,
    NotH,
}

impl HClass {
    pub fn is_h(self) -> bool {
        self != HClass::NotH
    }

    pub fn label(self) -> &'static str {
        match self {
            HClass::Invertible => "invertible",
            HClass::Singular => "singular",
            HClass::Mixed => "mixed",
            HClass::NotH => "not-H",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GdScaling {
    pub exists: bool,
    /// Positive weights `alpha_i`, present when `exists`.
    pub weights: Option<Vec<f64>>,
    pub equipotent: bool,
}

impl GdScaling {
    fn none() -> Self {
        Self { exists: false, weights: None, equipotent: false }
    }
}

/// Everything the convergence rules need to know about a matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub order: usize,
    pub dominance: DominanceClass,
    pub comparison: MClass,
    pub h_class: HClass,
    pub gd: GdScaling,
    pub irreducible: bool,
    pub hpd: bool,
}

pub fn classify(a: &ComplexMatrix) -> Classification {
    let comparison = classify_m(&comparison_matrix(a));
    Classification {
        order: a.order(),
        dominance: dominance_class(a),
        comparison,
        h_class: h_class_from(a, comparison),
        gd: gd_scaling(a),
        irreducible: is_irreducible(a),
        hpd: is_hpd(a),
    }
}

/// `mu(A)`: `|a_ii|` on the diagonal, `-|a_ij|` elsewhere.
pub fn comparison_matrix(a: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.order(), |i, j| {
        let m = a[(i, j)].norm();
        Complex64::new(if i == j { m } else { -m }, 0.0)
    })
}

pub fn is_z_matrix(z: &ComplexMatrix) -> bool {
    let n = z.order();
    z.is_real() && (0..n).all(|i| (0..n).all(|j| i == j || z[(i, j)].re <= 0.0))
}

/// Spectral radius of a nonnegative matrix, taken block by block over its
/// Frobenius form so that every Perron root is simple. Falls back to the
/// Collatz-Wielandt upper bound if the QR iteration fails.
fn nonnegative_spectral_radius(b: &ComplexMatrix) -> f64 {
    frobenius_normal_form(b)
        .block_matrices
        .iter()
        .map(|blk| {
            if blk.order() == 1 {
                return blk[(0, 0)].re;
            }
            match eigen::spectral_radius(blk) {
                Ok(r) => r,
                Err(_) => collatz_wielandt_upper(blk),
            }
        })
        .fold(0.0, f64::max)
}

fn collatz_wielandt_upper(b: &ComplexMatrix) -> f64 {
    let n = b.order();
    let shift = 1e-3 * b.max_abs().max(f64::MIN_POSITIVE);
    let mut v = vec![1.0; n];
    let mut upper = f64::INFINITY;
    for _ in 0..10_000 {
        let w: Vec<f64> = (0..n).map(|i| (0..n).map(|j| b[(i, j)].re * v[j]).sum::<f64>() + shift * v[i]).collect();
        let hi = (0..n).map(|i| w[i] / v[i]).fold(0.0, f64::max);
        let lo = (0..n).map(|i| w[i] / v[i]).fold(f64::INFINITY, f64::min);
        upper = hi - shift;
        let norm = w.iter().cloned().fold(0.0, f64::max);
        v = w.iter().map(|x| (x / norm).max(f64::MIN_POSITIVE)).collect();
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    upper
}

/// M-matrix verdict for `Z = sI - B`, `s = max_i z_ii`.
pub fn classify_m(z: &ComplexMatrix) -> MClass {
    if !is_z_matrix(z) {
        return MClass { tag: MTag::NotZ, s: 0.0, rho_b: 0.0 };
    }
    let n = z.order();
    let s = (0..n).map(|i| z[(i, i)].re).fold(f64::NEG_INFINITY, f64::max);
    let b = ComplexMatrix::from_fn(n, |i, j| {
        let v = if i == j { s - z[(i, i)].re } else { -z[(i, j)].re };
        Complex64::new(v, 0.0)
    });
    let rho_b = nonnegative_spectral_radius(&b);
    let tol = M_TOL * s.max(1.0);
    let tag = if rho_b < s - tol {
        MTag::NonsingularM
    } else if (rho_b - s).abs() <= tol {
        MTag::SingularM
    } else {
        MTag::NotM
    };
    MClass { tag, s, rho_b }
}

fn h_class_from(a: &ComplexMatrix, m: MClass) -> HClass {
    match m.tag {
        MTag::NonsingularM => HClass::Invertible,
        MTag::SingularM => {
            if (0..a.order()).any(|i| a[(i, i)] == ZERO) {
                HClass::Singular
            } else {
                HClass::Mixed
            }
        }
        MTag::NotM | MTag::NotZ => HClass::NotH,
    }
}

pub fn classify_h(a: &ComplexMatrix) -> HClass {
    h_class_from(a, classify_m(&comparison_matrix(a)))
}

#[derive(Clone, Copy, PartialEq)]
enum RowRelation {
    Strict,
    Equal,
    Deficient,
}

fn row_relation(diag: f64, off: f64) -> RowRelation {
    let tol = EQUALITY_TOL * (diag + off);
    if (diag - off).abs() <= tol {
        RowRelation::Equal
    } else if diag > off {
        RowRelation::Strict
    } else {
        RowRelation::Deficient
    }
}

pub fn dominance_class(a: &ComplexMatrix) -> DominanceClass {
    let n = a.order();
    let rel: Vec<RowRelation> = (0..n)
        .map(|i| {
            let off: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].norm()).sum();
            row_relation(a[(i, i)].norm(), off)
        })
        .collect();
    let equality_rows =
        IndexSet::new((0..n).filter(|&i| rel[i] == RowRelation::Equal).collect(), n).expect("indices in range");
    let tag = if rel.contains(&RowRelation::Deficient) {
        DominanceTag::NotDd
    } else if equality_rows.is_empty() {
        DominanceTag::StrictlyDd
    } else if equality_rows.len() == n {
        DominanceTag::DiagonallyEquipotent
    } else if is_irreducible(a) {
        DominanceTag::IrreduciblyDd
    } else {
        DominanceTag::NonstrictDd
    };
    DominanceClass { tag, equality_rows }
}

/// Positive Perron vector of an irreducible nonnegative matrix with known
/// spectral radius, by shifted inverse iteration.
fn perron_vector(b: &ComplexMatrix, rho: f64) -> Vec<f64> {
    let n = b.order();
    if n == 1 {
        return vec![1.0];
    }
    let sigma = rho + 1e-7 * rho.max(1.0);
    let shifted = ComplexMatrix::from_fn(n, |i, j| {
        let d = if i == j { Complex64::new(sigma, 0.0) } else { ZERO };
        d - b[(i, j)]
    });
    let lu = Lu::from_matrix(&shifted);
    let mut v = vec![Complex64::new(1.0, 0.0); n];
    for _ in 0..60 {
        let Ok(w) = lu.solve(&v) else { break };
        let norm = w.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if norm == 0.0 || !norm.is_finite() {
            break;
        }
        let w: Vec<Complex64> = w.iter().map(|z| z / norm).collect();
        let change = w.iter().zip(&v).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        v = w;
        if change <= 1e-15 {
            break;
        }
    }
    v.iter().map(|z| z.re.abs().max(f64::MIN_POSITIVE)).collect()
}

/// Comparison matrix pieces of an irreducible block: `(mu, M verdict, Perron weights)`.
fn block_scaling(block: &ComplexMatrix) -> (ComplexMatrix, MClass, Vec<f64>) {
    let mu = comparison_matrix(block);
    let m = classify_m(&mu);
    let n = block.order();
    let b = ComplexMatrix::from_fn(n, |i, j| {
        let v = if i == j { m.s - mu[(i, i)].re } else { -mu[(i, j)].re };
        Complex64::new(v, 0.0)
    });
    let v = perron_vector(&b, m.rho_b);
    (mu, m, v)
}

/// Positive weights `alpha` with `alpha_i |a_ii| >= sum_{j != i} alpha_j |a_ij|`,
/// if any exist, and whether equality can hold in every row.
///
/// Row dominant inputs get unit weights. Otherwise the Frobenius blocks are
/// processed from last to first: a block whose comparison matrix is a singular
/// M-matrix takes its Perron null vector and admits no coupling into later
/// blocks; a nonsingular block absorbs its coupling exactly through
/// `mu(R) x = w` (or takes its strict Perron weights when uncoupled).
pub fn gd_scaling(a: &ComplexMatrix) -> GdScaling {
    let n = a.order();
    let dom = dominance_class(a);
    match dom.tag {
        DominanceTag::StrictlyDd => return GdScaling { exists: true, weights: Some(vec![1.0; n]), equipotent: false },
        DominanceTag::DiagonallyEquipotent => {
            return GdScaling { exists: true, weights: Some(vec![1.0; n]), equipotent: true }
        }
        _ => {}
    }

    let fnf = frobenius_normal_form(a);
    let mut weights = vec![0.0; n];
    let mut assigned = vec![false; n];
    let mut equipotent = true;
    for block in fnf.blocks.iter().rev() {
        let idx = block.as_slice();
        let coupling: Vec<f64> =
            idx.iter().map(|&i| (0..n).filter(|&j| assigned[j]).map(|j| a[(i, j)].norm() * weights[j]).sum()).collect();
        let coupled = coupling.iter().any(|&w| w > 0.0);
        let sub = a.principal(block);
        let (mu, m, perron) = block_scaling(&sub);
        let local = match m.tag {
            MTag::SingularM => {
                if coupled {
                    return GdScaling::none();
                }
                perron
            }
            MTag::NonsingularM => {
                if coupled {
                    let rhs: Vec<Complex64> = coupling.iter().map(|&w| Complex64::new(w, 0.0)).collect();
                    match Lu::from_matrix(&mu).solve(&rhs) {
                        Ok(x) if x.iter().all(|z| z.re > 0.0) => x.iter().map(|z| z.re).collect(),
                        _ => {
                            equipotent = false;
                            // Strict Perron weights scaled to dominate the coupling.
                            let slack: Vec<f64> = (0..idx.len()).map(|r| (m.s - m.rho_b) * perron[r]).collect();
                            let c = (0..idx.len()).map(|r| coupling[r] / slack[r]).fold(1.0, f64::max);
                            perron.iter().map(|p| p * c * 2.0).collect()
                        }
                    }
                } else {
                    equipotent = false;
                    perron
                }
            }
            MTag::NotM | MTag::NotZ => return GdScaling::none(),
        };
        for (r, &i) in idx.iter().enumerate() {
            weights[i] = local[r];
            assigned[i] = true;
        }
    }
    let max = weights.iter().cloned().fold(0.0, f64::max);
    if max > 0.0 {
        for w in weights.iter_mut() {
            *w /= max;
        }
    }
    GdScaling { exists: true, weights: Some(weights), equipotent }
}

/// Residual of the scaled row test: `alpha_i |a_ii| - sum_{j != i} alpha_j |a_ij|`
/// together with the row's absolute scale.
pub fn scaled_row_slack(a: &ComplexMatrix, weights: &[f64]) -> Vec<(f64, f64)> {
    let n = a.order();
    (0..n)
        .map(|i| {
            let diag = weights[i] * a[(i, i)].norm();
            let off: f64 = (0..n).filter(|&j| j != i).map(|j| weights[j] * a[(i, j)].norm()).sum();
            (diag - off, diag + off)
        })
        .collect()
}

/// Whether an irreducible block is generalized diagonally equipotent.
pub fn is_gde_block(r: &ComplexMatrix) -> Result<bool> {
    if !is_irreducible(r) {
        return Err(Error::NotIrreducible);
    }
    Ok(gd_scaling(r).equipotent)
}

/// Hermitian (to `1e-12` relative) and positive definite (Cholesky succeeds).
pub fn is_hpd(a: &ComplexMatrix) -> bool {
    let n = a.order();
    let scale = a.max_abs().max(1.0);
    for i in 0..n {
        for j in i..n {
            if (a[(i, j)] - a[(j, i)].conj()).norm() > HERMITIAN_TOL * scale {
                return false;
            }
        }
    }
    let mut l = vec![vec![ZERO; n]; n];
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[j][k].norm_sqr();
        }
        if d <= HERMITIAN_TOL * scale {
            return false;
        }
        let djj = d.sqrt();
        l[j][j] = Complex64::new(djj, 0.0);
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[i][k] * l[j][k].conj();
            }
            l[i][j] = s / djj;
        }
    }
    true
}

/// Random member of the equimodular set: same moduli, uniform phases on the
/// nonzero entries, deterministic in `seed`.
pub fn sample_equimodular(a: &ComplexMatrix, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ComplexMatrix::from_fn(a.order(), |i, j| {
        let z = a[(i, j)];
        if z == ZERO {
            return ZERO;
        }
        let r = z.norm();
        // Redraw phases whose rounded modulus drifts from `r`, so mu is preserved bit for bit.
        let mut w = z;
        for _ in 0..64 {
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            w = Complex64::from_polar(r, theta);
            if w.norm() == r {
                break;
            }
        }
        w
    })
}

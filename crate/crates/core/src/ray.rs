//! Ray pattern classes via unitary diagonal similarity.
//!
//! A matrix is a member of a family when some `D = diag(e^{i phi_r})` brings
//! it to the canonical form
//!
//! * `Theta`: `e^{i eta} (|D_A| e^{i theta} - |L_A| - |U_A|)`
//! * `Psi`:   `e^{i eta} (|D_A| - |L_A| - e^{i psi} |U_A|)`
//! * `Phi`:   `e^{i eta} (|D_A| - |U_A| - e^{i phi} |L_A|)`
//! * `Zero`:  `e^{i eta} (|D_A| - |L_A| - |U_A|)`
//!
//! Writing `delta` for the common phase of the nonzero diagonal, every nonzero
//! off-diagonal `m_rs` imposes
//! `arg m_rs + phi_s - phi_r = pi + delta + c_rs * angle (mod 2 pi)`
//! with `c_rs` in `{-1, 0, 1}` fixed by the family. Phases are propagated
//! along a spanning forest as `p_r + q_r * angle`; every remaining edge then
//! reads `R + K * angle = 0 (mod 2 pi)`.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ZERO};

/// Angle tolerance in radians.
pub const ANGLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RayFamily {
    Theta,
    Psi,
    Phi,
    Zero,
}

impl RayFamily {
    pub const ALL: [RayFamily; 4] = [Self::Theta, Self::Psi, Self::Phi, Self::Zero];

    fn coefficient(self, r: usize, s: usize) -> i64 {
        match self {
            RayFamily::Theta => -1,
            RayFamily::Psi => i64::from(r < s),
            RayFamily::Phi => i64::from(r > s),
            RayFamily::Zero => 0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            RayFamily::Theta => "theta",
            RayFamily::Psi => "psi",
            RayFamily::Phi => "phi",
            RayFamily::Zero => "zero",
        }
    }
}

impl fmt::Display for RayFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for RayFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "theta" => Ok(Self::Theta),
            "psi" => Ok(Self::Psi),
            "phi" => Ok(Self::Phi),
            "zero" => Ok(Self::Zero),
            other => Err(Error::BadClass(format!("unknown ray family `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RayAngle {
    Fixed(f64),
    /// Every angle is admissible.
    Free,
}

/// The constraint at `(row, col)` that fails worst. `row == col` marks a
/// diagonal entry whose phase differs from the first nonzero diagonal entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeViolation {
    pub row: usize,
    pub col: usize,
    /// Wrapped phase defect in `(-pi, pi]`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayVerdict {
    pub member: bool,
    pub family: RayFamily,
    /// Reported angle; absent for `Zero`.
    pub angle: Option<RayAngle>,
    /// All admissible angles in `[0, 2 pi)` when the angle is determined.
    pub admissible: Vec<f64>,
    /// Arguments of the certifying unitary diagonal.
    pub phases: Vec<f64>,
    pub eta: f64,
    pub violation: Option<EdgeViolation>,
}

impl RayVerdict {
    /// Angle used for the certificate: the fixed angle, or 0 when free or absent.
    pub fn certificate_angle(&self) -> f64 {
        match self.angle {
            Some(RayAngle::Fixed(a)) => a,
            _ => 0.0,
        }
    }

    pub fn admits(&self, angle: f64) -> bool {
        match self.angle {
            Some(RayAngle::Free) => self.member,
            Some(RayAngle::Fixed(_)) => {
                self.member && self.admissible.iter().any(|&a| wrap(a - angle).abs() <= ANGLE_TOL)
            }
            None => self.member,
        }
    }
}

/// Wraps to `(-pi, pi]`.
pub fn wrap(x: f64) -> f64 {
    let mut y = x.rem_euclid(TAU);
    if y > PI {
        y -= TAU;
    }
    y
}

/// Normalizes to `[0, 2 pi)`.
pub fn normalize(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y >= TAU {
        0.0
    } else {
        y
    }
}

/// Phase defect of the constraint at `(r, s)` under the verdict's certificate.
/// Diagonal entries are measured against the canonical diagonal phase.
pub fn edge_residual(m: &ComplexMatrix, verdict: &RayVerdict, r: usize, s: usize) -> f64 {
    let z = m[(r, s)];
    let angle = verdict.certificate_angle();
    let eta = verdict.eta;
    if r == s {
        let diag_phase = match verdict.family {
            RayFamily::Theta => eta + angle,
            _ => eta,
        };
        return wrap(z.arg() - diag_phase);
    }
    let c = match verdict.family {
        RayFamily::Theta => 0.0,
        f => f.coefficient(r, s) as f64,
    };
    let phi = &verdict.phases;
    wrap(z.arg() + phi[s] - phi[r] - PI - eta - c * angle)
}

struct Edge {
    row: usize,
    col: usize,
    r: f64,
    k: i64,
}

/// Outcome of solving the phase constraints for one coefficient pattern.
pub(crate) struct PhaseSolution {
    pub member: bool,
    /// Whether some constraint involves the angle.
    pub determined: bool,
    pub admissible: Vec<f64>,
    /// First admissible angle, or the best candidate for non-members.
    pub chosen: f64,
    pub delta: f64,
    pub p: Vec<f64>,
    pub q: Vec<i64>,
    pub violation: Option<EdgeViolation>,
}

/// Solves `arg m_rs + phi_s - phi_r = pi + delta + coeff(r, s) * angle
/// (mod 2 pi)` over the nonzero off-diagonal entries of `m`, with `delta`
/// the common phase the nonzero diagonal must share.
pub(crate) fn solve_phases(m: &ComplexMatrix, coeff: impl Fn(usize, usize) -> i64) -> PhaseSolution {
    let n = m.order();

    let mut violation: Option<EdgeViolation> = None;
    let note = |v: EdgeViolation, slot: &mut Option<EdgeViolation>| {
        if slot.is_none_or(|old| v.residual.abs() > old.residual.abs()) {
            *slot = Some(v);
        }
    };

    let mut delta = None;
    for i in 0..n {
        let z = m[(i, i)];
        if z == ZERO {
            continue;
        }
        match delta {
            None => delta = Some(z.arg()),
            Some(d) => {
                let res = wrap(z.arg() - d);
                if res.abs() > ANGLE_TOL {
                    note(EdgeViolation { row: i, col: i, residual: res }, &mut violation);
                }
            }
        }
    }
    let delta = delta.unwrap_or(0.0);

    // Spanning forest over the symmetrized pattern.
    let mut p = vec![0.0f64; n];
    let mut q = vec![0i64; n];
    let mut seen = vec![false; n];
    let mut tree = vec![vec![false; n]; n];
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(r) = queue.pop_front() {
            for s in 0..n {
                if s == r || seen[s] {
                    continue;
                }
                if m[(r, s)] != ZERO {
                    p[s] = PI + delta - m[(r, s)].arg() + p[r];
                    q[s] = q[r] + coeff(r, s);
                    tree[r][s] = true;
                } else if m[(s, r)] != ZERO {
                    p[s] = m[(s, r)].arg() + p[r] - PI - delta;
                    q[s] = q[r] - coeff(s, r);
                    tree[s][r] = true;
                } else {
                    continue;
                }
                seen[s] = true;
                queue.push_back(s);
            }
        }
    }

    let mut edges = Vec::new();
    for r in 0..n {
        for s in 0..n {
            if r == s || m[(r, s)] == ZERO || tree[r][s] {
                continue;
            }
            let res = m[(r, s)].arg() + p[s] - p[r] - PI - delta;
            let k = q[s] - q[r] - coeff(r, s);
            edges.push(Edge { row: r, col: s, r: wrap(res), k });
        }
    }

    let determining = edges.iter().filter(|e| e.k != 0).min_by_key(|e| e.k.abs());
    let candidates: Vec<f64> = match determining {
        Some(e) => {
            let kk = e.k.abs();
            let sign = e.k.signum() as f64;
            let mut c: Vec<f64> = (0..kk).map(|j| normalize(sign * (-e.r + TAU * j as f64) / kk as f64)).collect();
            c.sort_by(f64::total_cmp);
            c
        }
        None => vec![0.0],
    };

    let worst = |angle: f64| -> Option<EdgeViolation> {
        edges
            .iter()
            .map(|e| EdgeViolation { row: e.row, col: e.col, residual: wrap(e.r + e.k as f64 * angle) })
            .max_by(|a, b| a.residual.abs().total_cmp(&b.residual.abs()))
    };
    let within = |v: &Option<EdgeViolation>| v.is_none_or(|v| v.residual.abs() <= ANGLE_TOL);

    let mut admissible = Vec::new();
    let mut best: Option<(f64, Option<EdgeViolation>)> = None;
    for &c in &candidates {
        let w = worst(c);
        if within(&w) {
            admissible.push(c);
        }
        let score = w.map_or(0.0, |v| v.residual.abs());
        if best.as_ref().is_none_or(|(_, bw)| score < bw.map_or(0.0, |v| v.residual.abs())) {
            best = Some((c, w));
        }
    }

    let member = violation.is_none() && !admissible.is_empty();
    let chosen = if member {
        admissible[0]
    } else {
        let (c, w) = best.expect("at least one candidate");
        if let Some(v) = w {
            if v.residual.abs() > ANGLE_TOL {
                note(v, &mut violation);
            }
        }
        c
    };
    PhaseSolution {
        member,
        determined: determining.is_some(),
        admissible,
        chosen,
        delta,
        p,
        q,
        violation: if member { None } else { violation },
    }
}

/// Tests membership of `m` in the ray family. Non-membership is a verdict,
/// carried with the worst violated constraint.
pub fn ray_test(m: &ComplexMatrix, family: RayFamily) -> RayVerdict {
    let sol = solve_phases(m, |r, s| family.coefficient(r, s));
    let angle = match family {
        RayFamily::Zero => None,
        _ if !sol.determined => Some(RayAngle::Free),
        _ => Some(RayAngle::Fixed(sol.chosen)),
    };
    let angle_value = if sol.determined { sol.chosen } else { 0.0 };
    let phases: Vec<f64> = (0..m.order()).map(|r| wrap(sol.p[r] + sol.q[r] as f64 * angle_value)).collect();
    let eta = match family {
        RayFamily::Theta => wrap(sol.delta - angle_value),
        _ => sol.delta,
    };
    RayVerdict {
        member: sol.member,
        family,
        angle,
        admissible: if sol.member && sol.determined { sol.admissible } else { Vec::new() },
        phases,
        eta,
        violation: sol.violation,
    }
}

/// Unit-diagonal diagonally equipotent member of `family` with the given
/// angle, on an irreducible pattern. The pattern is a symmetric tridiagonal
/// backbone (plus the `(1,3)` pair for `Theta`, which pins the angle) with
/// random extra entries; moduli come from `moduli_seed` and the hiding
/// unitary diagonal similarity from `phase_seed`.
pub fn construct_ray(
    family: RayFamily,
    n: usize,
    angle: f64,
    moduli_seed: u64,
    phase_seed: u64,
) -> Result<ComplexMatrix> {
    if !angle.is_finite() || !(0.0..TAU).contains(&angle) {
        return Err(Error::BadAngle(angle));
    }
    if n < 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(moduli_seed);
    let mut moduli = vec![vec![0.0f64; n]; n];
    for i in 0..n - 1 {
        moduli[i][i + 1] = rng.gen_range(0.2..1.0);
        moduli[i + 1][i] = rng.gen_range(0.2..1.0);
    }
    if family == RayFamily::Theta && n >= 3 {
        moduli[0][2] = rng.gen_range(0.2..1.0);
        moduli[2][0] = rng.gen_range(0.2..1.0);
    }
    for r in 0..n {
        for s in 0..n {
            if r != s && moduli[r][s] == 0.0 && rng.gen_bool(0.25) {
                moduli[r][s] = rng.gen_range(0.05..1.0);
            }
        }
    }
    for row in moduli.iter_mut() {
        let total: f64 = row.iter().sum();
        for v in row.iter_mut() {
            *v /= total;
        }
    }

    let (eta, diag_phase) = match family {
        RayFamily::Theta => (-angle, 0.0),
        _ => (0.0, 0.0),
    };
    let mut phase_rng = ChaCha8Rng::seed_from_u64(phase_seed);
    let hide: Vec<f64> = (0..n).map(|_| phase_rng.gen_range(0.0..TAU)).collect();
    let canonical = ComplexMatrix::from_fn(n, |r, s| {
        if r == s {
            return Complex64::from_polar(1.0, diag_phase);
        }
        if moduli[r][s] == 0.0 {
            return ZERO;
        }
        let extra = match family {
            RayFamily::Theta => 0.0,
            f => f.coefficient(r, s) as f64 * angle,
        };
        -Complex64::from_polar(moduli[r][s], eta + extra)
    });
    // D C D^{-1} with D = diag(e^{i hide_r}); diagonal stays exactly 1.
    Ok(ComplexMatrix::from_fn(n, |r, s| {
        let z = canonical[(r, s)];
        if r == s || z == ZERO {
            z
        } else {
            z * Complex64::from_polar(1.0, hide[r] - hide[s])
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{self, CorpusId};
    use crate::linalg::split;

    fn unit_diagonal(a: &ComplexMatrix) -> ComplexMatrix {
        let d = a.diag();
        a.scale_rows(&d.iter().map(|z| z.inv()).collect::<Vec<_>>())
    }

    #[test]
    fn family61_is_psi_and_phi_ray_at_pi() {
        let a = corpus::get(&CorpusId::Family61(8)).unwrap();
        let m = unit_diagonal(&a);
        let psi = ray_test(&m, RayFamily::Psi);
        assert!(psi.member);
        assert_eq!(psi.admissible.len(), 1);
        assert!(wrap(psi.admissible[0] - PI).abs() < 1e-12);
        assert!(ray_test(&m, RayFamily::Phi).admits(PI));
        assert!(!ray_test(&m, RayFamily::Zero).member);
    }

    #[test]
    fn canonical_form_is_zero_ray_with_identity_phases() {
        let s = split(&ComplexMatrix::from_real_rows(&[[1.0, 0.3, 0.2], [0.5, 1.0, 0.4], [0.1, 0.6, 1.0]]));
        let m = ComplexMatrix::identity(3).sub(&s.l.abs()).sub(&s.u.abs());
        let v = ray_test(&m, RayFamily::Zero);
        assert!(v.member);
        assert!(v.phases.iter().all(|p| p.abs() < 1e-15));
        assert_eq!(v.angle, None);
    }

    #[test]
    fn round_trip_each_family() {
        for family in RayFamily::ALL {
            for n in 2..7 {
                let angle = 2.1;
                let m = construct_ray(family, n, angle, 11 + n as u64, 99).unwrap();
                let v = ray_test(&m, family);
                match family {
                    RayFamily::Zero => assert!(v.member),
                    _ => assert!(v.admits(angle), "{family} n={n} {v:?}"),
                }
                for r in 0..n {
                    for s in 0..n {
                        if m[(r, s)] != ZERO {
                            assert!(edge_residual(&m, &v, r, s).abs() <= ANGLE_TOL);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn theta_angle_is_unique_from_three() {
        let m = construct_ray(RayFamily::Theta, 5, 0.7, 3, 4).unwrap();
        let v = ray_test(&m, RayFamily::Theta);
        assert_eq!(v.admissible.len(), 1);
        assert!((v.admissible[0] - 0.7).abs() < 1e-9);
    }

    #[test]
    fn phi_member_is_not_zero_member() {
        let m = construct_ray(RayFamily::Phi, 5, 1.0, 1, 2).unwrap();
        assert!(ray_test(&m, RayFamily::Phi).admits(1.0));
        assert!(!ray_test(&m, RayFamily::Zero).member);
    }

    #[test]
    fn perturbed_phase_is_rejected_with_certificate() {
        let mut m = construct_ray(RayFamily::Psi, 4, 2.0, 5, 6).unwrap();
        m[(2, 1)] *= Complex64::from_polar(1.0, 0.01);
        let v = ray_test(&m, RayFamily::Psi);
        assert!(!v.member);
        let e = v.violation.unwrap();
        assert!(e.residual.abs() > ANGLE_TOL);
        assert!((edge_residual(&m, &v, e.row, e.col) - e.residual).abs() < 1e-12);
    }

    #[test]
    fn free_angle_on_tree_pattern() {
        let m = ComplexMatrix::from_real_rows(&[[1.0, -0.5], [0.0, 1.0]]);
        let v = ray_test(&m, RayFamily::Psi);
        assert!(v.member);
        assert_eq!(v.angle, Some(RayAngle::Free));
    }

    #[test]
    fn mismatched_diagonal_phase_is_rejected() {
        let m = ComplexMatrix::new(
            2,
            vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(-0.5, 0.0),
                Complex64::new(-0.5, 0.0),
                Complex64::new(0.0, 1.0),
            ],
        )
        .unwrap();
        let v = ray_test(&m, RayFamily::Zero);
        assert!(!v.member);
        let e = v.violation.unwrap();
        assert_eq!((e.row, e.col), (1, 1));
    }

    #[test]
    fn bad_angle() {
        assert_eq!(construct_ray(RayFamily::Psi, 3, 7.0, 0, 0), Err(Error::BadAngle(7.0)));
        assert!(construct_ray(RayFamily::Psi, 3, f64::NAN, 0, 0).is_err());
    }
}

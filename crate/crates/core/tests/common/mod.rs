//! Independent oracles shared by the integration tests. Nothing here calls
//! the eigensolver, the LU code or the ray solver of the library.

#![allow(dead_code, clippy::needless_range_loop)]

use std::f64::consts::{PI, TAU};

use hgs_core::{Complex64, ComplexMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Determinant by permutation expansion (Heap's algorithm with sign tracking).
pub fn leibniz_det(m: &[Vec<Complex64>]) -> Complex64 {
    let n = m.len();
    if n == 0 {
        return c(1.0, 0.0);
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut counters = vec![0usize; n];
    let mut sign = 1.0;
    let term = |perm: &[usize], sign: f64| -> Complex64 {
        perm.iter().enumerate().fold(c(sign, 0.0), |acc, (i, &j)| acc * m[i][j])
    };
    let mut total = term(&perm, sign);
    let mut i = 0;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            sign = -sign;
            total += term(&perm, sign);
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    total
}

/// Coefficients of `det(lambda I - A)`, highest degree first, from sums of
/// principal minors.
pub fn char_poly(a: &ComplexMatrix) -> Vec<Complex64> {
    let n = a.order();
    let mut coeffs = vec![c(0.0, 0.0); n + 1];
    coeffs[0] = c(1.0, 0.0);
    for mask in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let k = idx.len();
        let sub: Vec<Vec<Complex64>> = idx.iter().map(|&i| idx.iter().map(|&j| a[(i, j)]).collect()).collect();
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        coeffs[k] += leibniz_det(&sub) * sign;
    }
    coeffs
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().fold(c(0.0, 0.0), |acc, &k| acc * z + k)
}

/// Roots of a monic polynomial by Durand-Kerner, then Newton polishing.
pub fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[0];
    let p: Vec<Complex64> = coeffs.iter().map(|k| k / lead).collect();
    let radius = 1.0 + p[1..].iter().map(|k| k.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> =
        (0..n).map(|k| Complex64::from_polar(radius * 0.9, TAU * k as f64 / n as f64 + 0.4)).collect();
    for _ in 0..5000 {
        let mut change: f64 = 0.0;
        for i in 0..n {
            let mut den = c(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                continue;
            }
            let step = horner(&p, z[i]) / den;
            z[i] -= step;
            change = change.max(step.norm());
        }
        if change < 1e-15 * radius {
            break;
        }
    }
    let dp: Vec<Complex64> = (0..n).map(|k| p[k] * (n - k) as f64).collect();
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let d = horner(&dp, *zi);
            if d.norm() > 0.0 {
                let step = horner(&p, *zi) / d;
                if step.is_finite() && step.norm() < 1e-6 * (1.0 + zi.norm()) {
                    *zi -= step;
                }
            }
        }
    }
    z
}

/// Largest distance in the best one-to-one matching of two multisets
/// (exhaustive for small sizes).
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    let mut best = f64::INFINITY;
    let mut perm: Vec<usize> = (0..n).collect();
    fn go(k: usize, perm: &mut Vec<usize>, a: &[Complex64], b: &[Complex64], cur: f64, best: &mut f64) {
        if cur >= *best {
            return;
        }
        if k == perm.len() {
            *best = cur;
            return;
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            let d = (a[k] - b[perm[k]]).norm();
            go(k + 1, perm, a, b, cur.max(d), best);
            perm.swap(k, i);
        }
    }
    go(0, &mut perm, a, b, 0.0, &mut best);
    best
}

/// Companion matrix of `prod (x - r_i)`.
pub fn companion(roots: &[Complex64]) -> ComplexMatrix {
    let n = roots.len();
    let mut coeffs = vec![c(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![c(0.0, 0.0); coeffs.len() + 1];
        for (k, &v) in coeffs.iter().enumerate() {
            next[k] += v;
            next[k + 1] -= v * r;
        }
        coeffs = next;
    }
    ComplexMatrix::from_fn(n, |i, j| {
        if i == 0 {
            -coeffs[j + 1]
        } else if i == j + 1 {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

/// Roots in the annulus `0.1 <= |r| <= 2` pairwise at least `sep` apart.
pub fn separated_roots(rng: &mut ChaCha8Rng, n: usize, sep: f64) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::new();
    while out.len() < n {
        let z = Complex64::from_polar(rng.gen_range(0.1..2.0), rng.gen_range(0.0..TAU));
        if out.iter().all(|w| (w - z).norm() >= sep) {
            out.push(z);
        }
    }
    out
}

fn wrap(x: f64) -> f64 {
    let mut y = x.rem_euclid(TAU);
    if y > PI {
        y -= TAU;
    }
    y
}

fn eq_mod(a: f64, b: f64, tol: f64) -> bool {
    wrap(a - b).abs() <= tol
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    Theta,
    Psi,
    Phi,
}

/// Triple-index ray pattern conditions checked entry by entry on a matrix
/// with no zero entries. Returns the family angle when they hold.
pub fn triple_conditions(a: &ComplexMatrix, family: Family, tol: f64) -> Option<f64> {
    let n = a.order();
    assert!(n <= 6 && a.as_slice().iter().all(|z| z.norm() > 0.0));
    let check = |eta: f64| -> Option<f64> {
        let chi = |r: usize, s: usize| a[(r, s)].arg() - eta;
        let angle = match family {
            Family::Theta => chi(0, 0),
            _ => wrap(chi(0, 1) + chi(1, 0)).rem_euclid(TAU),
        };
        for r in 0..n {
            let diag = match family {
                Family::Theta => angle,
                _ => 0.0,
            };
            if !eq_mod(chi(r, r), diag, tol) {
                return None;
            }
            for s in 0..n {
                if s == r {
                    continue;
                }
                let pair = match family {
                    Family::Theta => 0.0,
                    _ => angle,
                };
                if !eq_mod(chi(r, s) + chi(s, r), pair, tol) {
                    return None;
                }
                for t in 0..n {
                    if t == r || t == s {
                        continue;
                    }
                    let cyclic = (r < s && s < t) || (s < t && t < r) || (t < r && r < s);
                    let lhs = chi(r, s) - chi(r, t);
                    let rhs = match family {
                        Family::Theta => chi(t, s) + PI,
                        Family::Psi if cyclic => chi(t, s) + PI,
                        Family::Psi => chi(t, s) - angle + PI,
                        Family::Phi if cyclic => chi(t, s) - angle + PI,
                        Family::Phi => chi(t, s) + PI,
                    };
                    if !eq_mod(lhs, rhs, tol) {
                        return None;
                    }
                    if family == Family::Theta && !eq_mod(chi(s, r) - chi(t, r), chi(s, t) + PI, tol) {
                        return None;
                    }
                }
            }
        }
        Some(angle.rem_euclid(TAU))
    };
    match family {
        Family::Theta => {
            // The pair condition fixes eta modulo pi.
            let base = (a[(0, 1)].arg() + a[(1, 0)].arg()) / 2.0;
            check(base).or_else(|| check(base + PI))
        }
        _ => check(a[(0, 0)].arg()),
    }
}

/// Dense canonical ray matrix hidden by a random unitary diagonal similarity.
pub fn dense_ray(rng: &mut ChaCha8Rng, n: usize, family: Family, angle: f64) -> ComplexMatrix {
    let eta: f64 = rng.gen_range(0.0..TAU);
    let hide: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..TAU)).collect();
    ComplexMatrix::from_fn(n, |r, s| {
        let (modulus, phase) = if r == s {
            let extra = if family == Family::Theta { angle } else { 0.0 };
            (rng.gen_range(1.0..3.0), eta + extra)
        } else {
            let extra = match family {
                Family::Psi if r < s => angle,
                Family::Phi if r > s => angle,
                _ => 0.0,
            };
            (rng.gen_range(0.1..1.0), eta + PI + extra)
        };
        Complex64::from_polar(modulus, phase + hide[r] - hide[s])
    })
}

/// Dense simplex on `max c.x, A x = b, x >= 0` with Bland's rule, two phases.
/// Returns the optimum, or `None` if infeasible.
pub fn simplex_max(a: &[Vec<f64>], b: &[f64], cost: &[f64]) -> Option<f64> {
    let m = a.len();
    let n = cost.len();
    // Phase one tableau with artificials; rows normalized to b >= 0.
    let width = n + m + 1;
    let mut t: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let s = if b[i] < 0.0 { -1.0 } else { 1.0 };
            let mut row = vec![0.0; width];
            for j in 0..n {
                row[j] = s * a[i][j];
            }
            row[n + i] = 1.0;
            row[width - 1] = s * b[i];
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();
    let eps = 1e-11;

    let pivot = |t: &mut Vec<Vec<f64>>, basis: &mut Vec<usize>, r: usize, col: usize| {
        let p = t[r][col];
        for v in t[r].iter_mut() {
            *v /= p;
        }
        for i in 0..t.len() {
            if i != r {
                let f = t[i][col];
                if f != 0.0 {
                    for j in 0..width {
                        t[i][j] -= f * t[r][j];
                    }
                }
            }
        }
        basis[r] = col;
    };

    let run = |t: &mut Vec<Vec<f64>>, basis: &mut Vec<usize>, obj: &[f64], allowed: usize| -> bool {
        for _ in 0..10_000 {
            let reduced: Vec<f64> =
                (0..allowed).map(|j| obj[j] - (0..m).map(|i| obj[basis[i]] * t[i][j]).sum::<f64>()).collect();
            let Some(col) = (0..allowed).find(|&j| reduced[j] > eps && !basis.contains(&j)) else {
                return true;
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..m {
                if t[i][col] > eps {
                    let ratio = t[i][width - 1] / t[i][col];
                    if best.is_none_or(|(bi, br)| ratio < br - 1e-15 || (ratio <= br + 1e-15 && basis[i] < basis[bi])) {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                Some((r, _)) => pivot(t, basis, r, col),
                None => return false,
            }
        }
        true
    };

    let mut phase1 = vec![0.0; n + m];
    for v in phase1.iter_mut().skip(n) {
        *v = -1.0;
    }
    run(&mut t, &mut basis, &phase1, n + m);
    let infeas: f64 = (0..m).filter(|&i| basis[i] >= n).map(|i| t[i][width - 1]).sum();
    if infeas > 1e-9 {
        return None;
    }
    for i in 0..m {
        if basis[i] >= n {
            if let Some(col) = (0..n).find(|&j| t[i][j].abs() > eps) {
                pivot(&mut t, &mut basis, i, col);
            }
        }
    }
    let mut obj = cost.to_vec();
    obj.extend(std::iter::repeat_n(0.0, m));
    // Artificials stay at zero: forbid them from entering.
    if !run(&mut t, &mut basis, &obj, n) {
        return Some(f64::INFINITY);
    }
    Some((0..m).filter(|&i| basis[i] < n).map(|i| cost[basis[i]] * t[i][width - 1]).sum())
}

/// Whether `mu(A) alpha = 0` has a solution with `alpha > 0`, decided by
/// maximizing the smallest weight under `sum alpha = 1` with a small slack
/// band `|mu(A) alpha| <= band` per row.
pub fn lp_equipotent(a: &ComplexMatrix, band: f64) -> bool {
    let n = a.order();
    let mu = |i: usize, j: usize| if i == j { a[(i, i)].norm() } else { -a[(i, j)].norm() };
    // Variables: alpha (n), t, s_i (n slacks alpha_i - t), p_i, q_i (band slacks).
    let nv = n + 1 + n + 2 * n;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..n {
        // mu alpha + p_i = band
        let mut r = vec![0.0; nv];
        for j in 0..n {
            r[j] = mu(i, j);
        }
        r[n + 1 + n + i] = 1.0;
        rows.push(r);
        rhs.push(band);
        // -mu alpha + q_i = band
        let mut r = vec![0.0; nv];
        for j in 0..n {
            r[j] = -mu(i, j);
        }
        r[n + 1 + 2 * n + i] = 1.0;
        rows.push(r);
        rhs.push(band);
    }
    for i in 0..n {
        // alpha_i - t - s_i = 0
        let mut r = vec![0.0; nv];
        r[i] = 1.0;
        r[n] = -1.0;
        r[n + 1 + i] = -1.0;
        rows.push(r);
        rhs.push(0.0);
    }
    let mut r = vec![0.0; nv];
    for v in r.iter_mut().take(n) {
        *v = 1.0;
    }
    rows.push(r);
    rhs.push(1.0);
    let mut cost = vec![0.0; nv];
    cost[n] = 1.0;
    match simplex_max(&rows, &rhs, &cost) {
        Some(t) => t > 1e-6,
        None => false,
    }
}

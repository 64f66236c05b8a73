//! Named matrices and seeded class-targeted generators.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::is_irreducible;
use crate::matrix::{ComplexMatrix, ZERO};
use crate::ray::{construct_ray, RayFamily};
use crate::taxonomy::{classify_h, dominance_class, gd_scaling, DominanceTag, HClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CorpusId {
    Ex11A,
    Ex11B,
    Ex12A,
    Ex12B,
    Family61(usize),
    Ex62,
}

impl CorpusId {
    /// Resolves a bare name, taking the family order from `n`.
    pub fn from_name(name: &str, n: Option<usize>) -> Result<Self> {
        match (name.parse::<CorpusId>(), n) {
            (Ok(CorpusId::Family61(_)), _) => Err(Error::BadId(name.into())),
            (Ok(id), _) => Ok(id),
            (Err(_), Some(n)) if name.eq_ignore_ascii_case("family61") => {
                if n < 2 {
                    Err(Error::BadId(format!("family61 needs n >= 2, got {n}")))
                } else {
                    Ok(CorpusId::Family61(n))
                }
            }
            (Err(e), _) => Err(e),
        }
    }
}

impl fmt::Display for CorpusId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusId::Ex11A => f.write_str("ex11A"),
            CorpusId::Ex11B => f.write_str("ex11B"),
            CorpusId::Ex12A => f.write_str("ex12A"),
            CorpusId::Ex12B => f.write_str("ex12B"),
            CorpusId::Family61(n) => write!(f, "family61({n})"),
            CorpusId::Ex62 => f.write_str("ex62"),
        }
    }
}

/// Accepts `ex11A`, `ex11B`, `ex12A`, `ex12B`, `ex62` and `family61(n)`.
impl FromStr for CorpusId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let lower = t.to_ascii_lowercase();
        match lower.as_str() {
            "ex11a" => return Ok(CorpusId::Ex11A),
            "ex11b" => return Ok(CorpusId::Ex11B),
            "ex12a" => return Ok(CorpusId::Ex12A),
            "ex12b" => return Ok(CorpusId::Ex12B),
            "ex62" => return Ok(CorpusId::Ex62),
            _ => {}
        }
        if let Some(arg) = lower.strip_prefix("family61(").and_then(|r| r.strip_suffix(')')) {
            let n: usize = arg.trim().parse().map_err(|_| Error::BadId(format!("bad family order in `{t}`")))?;
            if n < 2 {
                return Err(Error::BadId(format!("family61 needs n >= 2, got {n}")));
            }
            return Ok(CorpusId::Family61(n));
        }
        Err(Error::BadId(t.to_string()))
    }
}

/// Order of the family at which the generators stop being cheap to build.
const MAX_FAMILY_ORDER: usize = 1 << 14;

pub fn get(id: &CorpusId) -> Result<ComplexMatrix> {
    let m = match *id {
        CorpusId::Ex11A => ComplexMatrix::from_real_rows(&[[2.0, 1.0, 1.0], [-1.0, 2.0, 1.0], [-1.0, -1.0, 2.0]]),
        CorpusId::Ex11B => ComplexMatrix::from_real_rows(&[[2.0, -1.0, -1.0], [1.0, 2.0, -1.0], [1.0, 1.0, 2.0]]),
        CorpusId::Ex12A => ComplexMatrix::from_real_rows(&[[2.0, -1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]),
        CorpusId::Ex12B => ComplexMatrix::from_real_rows(&[[2.0, -1.0], [2.0, 1.0]]),
        CorpusId::Family61(n) => {
            if !(2..=MAX_FAMILY_ORDER).contains(&n) {
                return Err(Error::BadId(format!("family61 order {n} outside 2..={MAX_FAMILY_ORDER}")));
            }
            family61(n)
        }
        CorpusId::Ex62 => ComplexMatrix::from_real_rows(&[
            [5.0, -1.0, 1.0, 1.0, 1.0, -1.0],
            [1.0, 5.0, -1.0, 1.0, 1.0, 1.0],
            [1.0, 1.0, 5.0, -1.0, 1.0, 1.0],
            [0.0, 0.0, 0.0, 2.0, -1.0, 1.0],
            [0.0, 0.0, 0.0, 1.0, 2.0, -1.0],
            [0.0, 0.0, 0.0, 1.0, 1.0, 2.0],
        ]),
    };
    Ok(m)
}

/// Tridiagonal `[1, 2, -1]` with corner diagonal entries 1.
fn family61(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, |i, j| {
        let v = if i == j {
            if i == 0 || i == n - 1 {
                1.0
            } else {
                2.0
            }
        } else if j == i + 1 {
            -1.0
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        };
        Complex64::new(v, 0.0)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CorpusClass {
    Sdd,
    Idd,
    DeIrreducible,
    GdeIrreducible,
    MixedH,
    NotH,
}

impl CorpusClass {
    pub const ALL: [CorpusClass; 6] =
        [Self::Sdd, Self::Idd, Self::DeIrreducible, Self::GdeIrreducible, Self::MixedH, Self::NotH];

    pub fn label(self) -> &'static str {
        match self {
            CorpusClass::Sdd => "SDD",
            CorpusClass::Idd => "IDD",
            CorpusClass::DeIrreducible => "DE_irreducible",
            CorpusClass::GdeIrreducible => "GDE_irreducible",
            CorpusClass::MixedH => "MixedH",
            CorpusClass::NotH => "NotH",
        }
    }

    /// Whether `a` belongs to the class, judged by the taxonomy module.
    pub fn contains(self, a: &ComplexMatrix) -> bool {
        match self {
            CorpusClass::Sdd => dominance_class(a).tag == DominanceTag::StrictlyDd,
            CorpusClass::Idd => dominance_class(a).tag == DominanceTag::IrreduciblyDd,
            CorpusClass::DeIrreducible => {
                dominance_class(a).tag == DominanceTag::DiagonallyEquipotent && is_irreducible(a)
            }
            CorpusClass::GdeIrreducible => is_irreducible(a) && gd_scaling(a).equipotent,
            CorpusClass::MixedH => classify_h(a) == HClass::Mixed,
            CorpusClass::NotH => classify_h(a) == HClass::NotH,
        }
    }

    fn min_order(self) -> usize {
        2
    }
}

impl fmt::Display for CorpusClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for CorpusClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CorpusClass::ALL
            .into_iter()
            .find(|c| c.label().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::BadClass(s.to_string()))
    }
}

fn random_phase(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..TAU))
}

/// Random irreducible off-diagonal moduli: a random Hamiltonian cycle plus
/// extra entries with probability `density`.
fn irreducible_moduli(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; n]; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for k in 0..n {
        let (r, s) = (order[k], order[(k + 1) % n]);
        if r != s {
            m[r][s] = rng.gen_range(0.1..1.0);
        }
    }
    for (r, row) in m.iter_mut().enumerate() {
        for (s, v) in row.iter_mut().enumerate() {
            if r != s && *v == 0.0 && rng.gen_bool(density) {
                *v = rng.gen_range(0.1..1.0);
            }
        }
    }
    m
}

/// Assembles `|a_ii| = factor_i * sum_j |a_ij|` with random phases throughout.
fn assemble(rng: &mut ChaCha8Rng, moduli: &[Vec<f64>], factors: &[f64], real: bool) -> ComplexMatrix {
    let n = moduli.len();
    let phase = |rng: &mut ChaCha8Rng| {
        if real {
            Complex64::new(if rng.gen_bool(0.5) { 1.0 } else { -1.0 }, 0.0)
        } else {
            random_phase(rng)
        }
    };
    let mut a = ComplexMatrix::zeros(n);
    for r in 0..n {
        let off: f64 = moduli[r].iter().sum();
        let diag = if off == 0.0 { 1.0 } else { factors[r] * off };
        a[(r, r)] = phase(rng) * diag;
        for s in 0..n {
            if s != r && moduli[r][s] != 0.0 {
                a[(r, s)] = phase(rng) * moduli[r][s];
            }
        }
    }
    a
}

/// Irreducible DE block; a third of the time a ray member of a random family.
fn de_block(rng: &mut ChaCha8Rng, n: usize, real: bool) -> ComplexMatrix {
    if n >= 2 && rng.gen_bool(1.0 / 3.0) {
        let family =
            *[RayFamily::Psi, RayFamily::Phi, RayFamily::Zero, RayFamily::Theta].choose(rng).expect("nonempty");
        let angle = if real { [0.0, std::f64::consts::PI][rng.gen_range(0..2)] } else { rng.gen_range(0.0..TAU) };
        let m = construct_ray(family, n, angle, rng.gen(), rng.gen()).expect("valid ray parameters");
        // Left scaling by a random complex diagonal keeps D^{-1} A fixed.
        let d: Vec<Complex64> = (0..n).map(|_| random_phase(rng) * rng.gen_range(0.5..2.0)).collect();
        return m.scale_rows(&d);
    }
    let moduli = irreducible_moduli(rng, n, 0.4);
    assemble(rng, &moduli, &vec![1.0; n], real)
}

/// GDE block: a DE block with columns divided by random positive weights.
fn gde_block(rng: &mut ChaCha8Rng, n: usize, real: bool) -> ComplexMatrix {
    let de = de_block(rng, n, real);
    let w: Vec<Complex64> = (0..n).map(|_| Complex64::new(1.0 / rng.gen_range(0.3..3.0), 0.0)).collect();
    de.scale_columns(&w)
}

fn strict_block(rng: &mut ChaCha8Rng, n: usize, real: bool) -> ComplexMatrix {
    let moduli = if n == 1 { vec![vec![0.0]] } else { irreducible_moduli(rng, n, 0.3) };
    let factors: Vec<f64> = (0..n).map(|_| rng.gen_range(1.1..2.0)).collect();
    assemble(rng, &moduli, &factors, real)
}

/// Random member of `class`, deterministic in `seed`. Candidates are checked
/// against the taxonomy module and redrawn on the rare miss.
pub fn random_in_class(class: CorpusClass, n: usize, seed: u64) -> Result<ComplexMatrix> {
    if n < class.min_order() {
        return Err(Error::BadClass(format!("{class} needs n >= {}", class.min_order())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((class as u64) << 56));
    for _ in 0..64 {
        let real = rng.gen_bool(0.3);
        let a = match class {
            CorpusClass::Sdd => {
                let moduli: Vec<Vec<f64>> = (0..n)
                    .map(|r| {
                        (0..n)
                            .map(|s| if r != s && rng.gen_bool(0.6) { rng.gen_range(0.1..1.0) } else { 0.0 })
                            .collect()
                    })
                    .collect();
                let factors: Vec<f64> = (0..n).map(|_| rng.gen_range(1.05..2.5)).collect();
                assemble(&mut rng, &moduli, &factors, real)
            }
            CorpusClass::Idd => {
                let moduli = irreducible_moduli(&mut rng, n, 0.4);
                let mut factors = vec![1.0; n];
                for f in factors.iter_mut() {
                    if rng.gen_bool(0.4) {
                        *f = rng.gen_range(1.05..2.0);
                    }
                }
                let strict = rng.gen_range(0..n);
                factors[strict] = rng.gen_range(1.05..2.0);
                let equal = (strict + 1 + rng.gen_range(0..n - 1)) % n;
                factors[equal] = 1.0;
                assemble(&mut rng, &moduli, &factors, real)
            }
            CorpusClass::DeIrreducible => de_block(&mut rng, n, real),
            CorpusClass::GdeIrreducible => gde_block(&mut rng, n, real),
            CorpusClass::MixedH => mixed_h(&mut rng, n, real),
            CorpusClass::NotH => {
                let moduli = irreducible_moduli(&mut rng, n, 0.5);
                let factors: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..0.9)).collect();
                assemble(&mut rng, &moduli, &factors, real)
            }
        };
        if class.contains(&a) {
            return Ok(a);
        }
    }
    Err(Error::BadClass(format!("no {class} instance of order {n} found for seed {seed}")))
}

/// Block upper triangular matrix whose diagonal blocks are GDE or strictly
/// dominant (at least one GDE block of order >= 2), symmetrically permuted.
fn mixed_h(rng: &mut ChaCha8Rng, n: usize, real: bool) -> ComplexMatrix {
    let mut sizes = Vec::new();
    let mut left = n;
    while left > 0 {
        let s = if left <= 2 { left } else { rng.gen_range(1..=left) };
        sizes.push(s);
        left -= s;
    }
    let gde_at = {
        let big: Vec<usize> = (0..sizes.len()).filter(|&i| sizes[i] >= 2).collect();
        match big.choose(rng) {
            Some(&i) => i,
            None => {
                sizes = vec![n];
                0
            }
        }
    };
    let mut a = ComplexMatrix::zeros(n);
    let mut start = 0;
    let mut starts = Vec::new();
    for (b, &s) in sizes.iter().enumerate() {
        let block = if b == gde_at || (s >= 2 && rng.gen_bool(0.4)) {
            gde_block(rng, s, real)
        } else {
            strict_block(rng, s, real)
        };
        for i in 0..s {
            for j in 0..s {
                a[(start + i, start + j)] = block[(i, j)];
            }
        }
        starts.push(start);
        start += s;
    }
    for (b, &s0) in starts.iter().enumerate() {
        let end = s0 + sizes[b];
        for i in s0..end {
            for j in end..n {
                if rng.gen_bool(0.3) {
                    a[(i, j)] = random_phase(rng) * rng.gen_range(0.1..1.0);
                }
            }
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    a.permute_symmetric(&perm)
}

/// Irreducible GDE matrix with nonzero diagonal and `|det|` bounded away
/// from zero: a nonsingular mixed H-matrix.
pub fn random_nonsingular_mixed(n: usize, seed: u64) -> Result<ComplexMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d69_7865_6400_0000);
    for _ in 0..64 {
        let real = rng.gen_bool(0.3);
        let moduli = irreducible_moduli(&mut rng, n, 0.4);
        let de = assemble(&mut rng, &moduli, &vec![1.0; n], real);
        let w: Vec<Complex64> = (0..n).map(|_| Complex64::new(1.0 / rng.gen_range(0.3..3.0), 0.0)).collect();
        let a = de.scale_columns(&w);
        let scale = a.norm_inf().powi(n as i32);
        if classify_h(&a) == HClass::Mixed
            && is_irreducible(&a)
            && crate::linalg::determinant(&a).norm() > 1e-6 * scale
            && a.diag().iter().all(|&z| z != ZERO)
        {
            return Ok(a);
        }
    }
    Err(Error::BadClass(format!("no nonsingular mixed instance of order {n} for seed {seed}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_matrices() {
        let a = get(&CorpusId::Ex11A).unwrap();
        assert_eq!(a, ComplexMatrix::from_real_rows(&[[2.0, 1.0, 1.0], [-1.0, 2.0, 1.0], [-1.0, -1.0, 2.0]]));
        let f = get(&CorpusId::Family61(4)).unwrap();
        assert_eq!(
            f,
            ComplexMatrix::from_real_rows(&[
                [1.0, -1.0, 0.0, 0.0],
                [1.0, 2.0, -1.0, 0.0],
                [0.0, 1.0, 2.0, -1.0],
                [0.0, 0.0, 1.0, 1.0]
            ])
        );
        assert_eq!(get(&CorpusId::Ex62).unwrap().order(), 6);
        assert!(get(&CorpusId::Family61(1)).is_err());
    }

    #[test]
    fn ids_parse_and_print() {
        for id in
            [CorpusId::Ex11A, CorpusId::Ex11B, CorpusId::Ex12A, CorpusId::Ex12B, CorpusId::Ex62, CorpusId::Family61(9)]
        {
            assert_eq!(id.to_string().parse::<CorpusId>().unwrap(), id);
        }
        assert_eq!(CorpusId::from_name("family61", Some(100)).unwrap(), CorpusId::Family61(100));
        assert!(CorpusId::from_name("family61", Some(1)).is_err());
        assert!(CorpusId::from_name("family61", None).is_err());
        assert!("ex99".parse::<CorpusId>().is_err());
    }

    #[test]
    fn generators_hit_their_class() {
        for class in CorpusClass::ALL {
            for n in 2..7 {
                for seed in 0..5 {
                    let a = random_in_class(class, n, seed).unwrap();
                    assert!(class.contains(&a), "{class} n={n} seed={seed}");
                    assert_eq!(a, random_in_class(class, n, seed).unwrap());
                }
            }
        }
    }

    #[test]
    fn class_names_round_trip() {
        for class in CorpusClass::ALL {
            assert_eq!(class.label().parse::<CorpusClass>().unwrap(), class);
        }
        assert!("nope".parse::<CorpusClass>().is_err());
    }
}

//! Brute-force point counts of varieties over `F_{p^n}`.
//!
//! Projective points are enumerated once per class through the canonical
//! representative whose first nonzero coordinate is 1. Enumeration is split
//! into fixed-size chunks that run on the rayon pool; totals are exact
//! integer sums, so the result never depends on the chunking or thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ffield::{build_extension, ExtField, FieldError, FieldKernel, ZechField, ZECH_LIMIT};
use crate::fpoly;

/// Largest number of candidate tuples a single count may enumerate.
pub const CANDIDATE_LIMIT: u128 = 100_000_000;

const DEFAULT_CHUNK: u64 = 1 << 14;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("too large for brute force: {candidates} candidate points at n = {n} (limit {CANDIDATE_LIMIT})")]
    TooLarge { n: usize, candidates: u128 },
    #[error("invalid variety: {0}")]
    Invalid(String),
    #[error("hyperelliptic models need odd characteristic, got p = {0}")]
    EvenCharacteristic(u64),
    #[error("f is not squarefree over F_{0}")]
    NotSquarefree(u64),
    #[error("parse: {0}")]
    Parse(String),
}

/// Projective or affine ambient space of a given dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Ambient {
    Projective { dim: usize },
    Affine { dim: usize },
}

impl Ambient {
    /// Number of coordinates.
    pub fn coordinates(&self) -> usize {
        match *self {
            Ambient::Projective { dim } => dim + 1,
            Ambient::Affine { dim } => dim,
        }
    }
}

/// One monomial term: coefficient in `[0, p)` and exponent vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coeff: u64,
    pub exps: Vec<u32>,
}

/// A system of polynomial equations over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "VarietyFile", into = "VarietyFile")]
pub struct PolySystem {
    name: String,
    p: u64,
    ambient: Ambient,
    polys: Vec<Vec<Term>>,
}

/// On-disk form; coefficients may be any integers and are reduced mod p.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VarietyFile {
    pub name: String,
    pub p: u64,
    pub ambient: Ambient,
    pub polys: Vec<Vec<(i64, Vec<u32>)>>,
}

impl TryFrom<VarietyFile> for PolySystem {
    type Error = CountError;

    fn try_from(file: VarietyFile) -> Result<Self, CountError> {
        let polys = file
            .polys
            .into_iter()
            .map(|poly| {
                poly.into_iter()
                    .map(|(c, exps)| Term {
                        coeff: c.rem_euclid(file.p.max(1) as i64) as u64,
                        exps,
                    })
                    .collect()
            })
            .collect();
        PolySystem::new(file.name, file.p, file.ambient, polys)
    }
}

impl From<PolySystem> for VarietyFile {
    fn from(sys: PolySystem) -> Self {
        VarietyFile {
            name: sys.name,
            p: sys.p,
            ambient: sys.ambient,
            polys: sys
                .polys
                .into_iter()
                .map(|poly| poly.into_iter().map(|t| (t.coeff as i64, t.exps)).collect())
                .collect(),
        }
    }
}

impl PolySystem {
    pub fn new(
        name: impl Into<String>,
        p: u64,
        ambient: Ambient,
        polys: Vec<Vec<Term>>,
    ) -> Result<Self, CountError> {
        if !fpoly::is_prime(p) {
            return Err(FieldError::NotPrime(p).into());
        }
        let width = ambient.coordinates();
        for (i, poly) in polys.iter().enumerate() {
            let mut degree = None;
            for t in poly {
                if t.coeff >= p {
                    return Err(CountError::Invalid(format!(
                        "polynomial {i}: coefficient {} not reduced mod {p}",
                        t.coeff
                    )));
                }
                if t.exps.len() != width {
                    return Err(CountError::Invalid(format!(
                        "polynomial {i}: exponent vector of length {}, expected {width}",
                        t.exps.len()
                    )));
                }
                if let Ambient::Projective { .. } = ambient {
                    let d: u32 = t.exps.iter().sum();
                    if t.coeff != 0 && *degree.get_or_insert(d) != d {
                        return Err(CountError::Invalid(format!(
                            "polynomial {i} is not homogeneous"
                        )));
                    }
                }
            }
        }
        Ok(PolySystem {
            name: name.into(),
            p,
            ambient,
            polys,
        })
    }

    /// Parses the JSON variety format.
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn polys(&self) -> &[Vec<Term>] {
        &self.polys
    }

    /// Candidate tuples enumerated over `F_{p^n}`.
    pub fn candidates(&self, n: usize) -> u128 {
        let q = (self.p as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        let pow = |e: usize| q.checked_pow(e as u32).unwrap_or(u128::MAX);
        match self.ambient {
            Ambient::Affine { dim } => pow(dim),
            // (q^(N+1) - 1) / (q - 1) = sum_{j=0}^{N} q^j
            Ambient::Projective { dim } => (0..=dim).fold(0u128, |acc, j| acc.saturating_add(pow(j))),
        }
    }
}

/// Counts `N_1..N_m` over a base prime `q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountSequence {
    pub q: u64,
    pub counts: Vec<u64>,
}

impl CountSequence {
    /// CSV with header `n,q_n,N_n`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,q_n,N_n\n");
        let mut qn: u128 = 1;
        for (i, c) in self.counts.iter().enumerate() {
            qn *= self.q as u128;
            out.push_str(&format!("{},{},{}\n", i + 1, qn, c));
        }
        out
    }
}

/// Enumeration knobs. Neither affects the result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountOptions {
    pub chunk_size: u64,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            chunk_size: DEFAULT_CHUNK,
        }
    }
}

/// Field implementation chosen by order: Zech tables when they fit.
enum Kernel {
    Zech(ZechField),
    Generic(ExtField),
}

impl Kernel {
    fn new(p: u64, n: usize) -> Result<Self, FieldError> {
        let field = build_extension(p, n)?;
        if field.order() <= ZECH_LIMIT {
            Ok(Kernel::Zech(ZechField::new(&field)?))
        } else {
            Ok(Kernel::Generic(field))
        }
    }
}

/// Exact number of `F_{p^n}`-points of `sys`.
pub fn count_points(sys: &PolySystem, n: usize) -> Result<u64, CountError> {
    count_points_with(sys, n, CountOptions::default())
}

pub fn count_points_with(sys: &PolySystem, n: usize, opts: CountOptions) -> Result<u64, CountError> {
    let candidates = sys.candidates(n);
    if candidates > CANDIDATE_LIMIT {
        return Err(CountError::TooLarge { n, candidates });
    }
    Ok(match Kernel::new(sys.p, n)? {
        Kernel::Zech(f) => enumerate(&f, sys, opts.chunk_size),
        Kernel::Generic(f) => enumerate(&f, sys, opts.chunk_size),
    })
}

/// `count_points` for `n = 1..=n_max`.
pub fn count_sequence(sys: &PolySystem, n_max: usize) -> Result<CountSequence, CountError> {
    let counts = (1..=n_max)
        .map(|n| count_points(sys, n))
        .collect::<Result<_, _>>()?;
    Ok(CountSequence { q: sys.p, counts })
}

struct Compiled<E> {
    polys: Vec<Vec<(E, Vec<u32>)>>,
}

impl<E: Copy> Compiled<E> {
    fn new<F: FieldKernel<Elem = E>>(field: &F, sys: &PolySystem) -> Self {
        Compiled {
            polys: sys
                .polys
                .iter()
                .map(|poly| {
                    poly.iter()
                        .filter(|t| t.coeff != 0)
                        .map(|t| (field.from_prime(t.coeff), t.exps.clone()))
                        .collect()
                })
                .collect(),
        }
    }

    fn vanishes<F: FieldKernel<Elem = E>>(&self, field: &F, point: &[E]) -> bool {
        self.polys.iter().all(|poly| {
            let mut acc = field.zero();
            for (c, exps) in poly {
                let mut m = *c;
                for (&x, &e) in point.iter().zip(exps) {
                    if e != 0 {
                        m = field.mul(m, field.pow(x, e));
                    }
                }
                acc = field.add(acc, m);
            }
            field.is_zero(acc)
        })
    }
}

/// A block of points sharing the same fixed prefix: `fixed` leading
/// coordinates, then `free` coordinates ranging over the whole field.
struct Block<E> {
    prefix: Vec<E>,
    free: usize,
    size: u64,
}

fn enumerate<F: FieldKernel>(field: &F, sys: &PolySystem, chunk: u64) -> u64 {
    let q = field.order();
    let compiled = Compiled::new(field, sys);
    let one = field.from_prime(1);
    let blocks: Vec<Block<F::Elem>> = match sys.ambient {
        Ambient::Affine { dim } => vec![Block {
            prefix: Vec::new(),
            free: dim,
            size: q.pow(dim as u32),
        }],
        Ambient::Projective { dim } => (0..=dim)
            .map(|lead| {
                let mut prefix = vec![field.zero(); lead];
                prefix.push(one);
                Block {
                    prefix,
                    free: dim - lead,
                    size: q.pow((dim - lead) as u32),
                }
            })
            .collect(),
    };
    let chunk = chunk.max(1);
    let mut jobs = Vec::new();
    for (b, block) in blocks.iter().enumerate() {
        let mut start = 0;
        while start < block.size {
            let end = (start + chunk).min(block.size);
            jobs.push((b, start, end));
            start = end;
        }
    }
    jobs.par_iter()
        .map(|&(b, start, end)| count_range(field, &compiled, &blocks[b], start, end))
        .sum()
}

fn count_range<F: FieldKernel>(
    field: &F,
    compiled: &Compiled<F::Elem>,
    block: &Block<F::Elem>,
    start: u64,
    end: u64,
) -> u64 {
    let q = field.order();
    let fixed = block.prefix.len();
    let mut point = block.prefix.clone();
    // free coordinates as base-q digits of the index, last coordinate fastest
    let mut digits = vec![0u64; block.free];
    let mut rest = start;
    for d in digits.iter_mut().rev() {
        *d = rest % q;
        rest /= q;
    }
    point.extend(digits.iter().map(|&d| field.element(d)));
    let mut count = 0u64;
    for _ in start..end {
        if compiled.vanishes(field, &point) {
            count += 1;
        }
        // odometer increment
        for i in (0..block.free).rev() {
            digits[i] += 1;
            if digits[i] < q {
                point[fixed + i] = field.element(digits[i]);
                break;
            }
            digits[i] = 0;
            point[fixed + i] = field.element(0);
        }
    }
    count
}

/// `y^2 = f(x)` over an odd prime field, `f` squarefree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperellipticCurve {
    p: u64,
    f: Vec<u64>,
}

impl HyperellipticCurve {
    /// `f` is given lowest degree first; coefficients are reduced mod p.
    pub fn new(p: u64, f: &[i64]) -> Result<Self, CountError> {
        if !fpoly::is_prime(p) {
            return Err(FieldError::NotPrime(p).into());
        }
        if p == 2 {
            return Err(CountError::EvenCharacteristic(p));
        }
        let mut f: Vec<u64> = f.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect();
        fpoly::trim(&mut f);
        if fpoly::degree(&f).unwrap_or(0) == 0 {
            return Err(CountError::Invalid("f must be nonconstant".into()));
        }
        let g = fpoly::gcd(&f, &fpoly::derivative(&f, p), p);
        if g.len() != 1 {
            return Err(CountError::NotSquarefree(p));
        }
        Ok(HyperellipticCurve { p, f })
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    /// Coefficients of `f`, lowest degree first.
    pub fn f(&self) -> &[u64] {
        &self.f
    }

    pub fn degree(&self) -> usize {
        self.f.len() - 1
    }

    /// Genus of the smooth model.
    pub fn genus(&self) -> usize {
        (self.degree() - 1) / 2
    }

    /// A projective model whose point counts agree with the smooth model.
    ///
    /// Degrees 1, 2, 3 and 5 use the closure of `y^2 = f(x)` in `P^2`; it has
    /// the right number of points at infinity (singular there for degree 5).
    /// Degree 4 uses the intersection of two quadrics in `P^3` through
    /// `[1 : x : x^2 : y]`. Higher degrees return `None`.
    pub fn projective_model(&self) -> Option<PolySystem> {
        let d = self.degree() as u32;
        let p = self.p;
        let neg = |c: u64| (p - c) % p;
        let polys = match d {
            1 | 2 | 3 | 5 => {
                // y^2 z^(d-2) - sum a_i x^i z^(d-i), coordinates (x, y, z)
                let top = d.max(2);
                let mut terms = vec![Term {
                    coeff: 1,
                    exps: vec![0, 2, top - 2],
                }];
                for (i, &a) in self.f.iter().enumerate() {
                    if a != 0 {
                        terms.push(Term {
                            coeff: neg(a),
                            exps: vec![i as u32, 0, top - i as u32],
                        });
                    }
                }
                vec![terms]
            }
            4 => {
                // coordinates (z0, z1, z2, z3) = (1, x, x^2, y)
                let conic = vec![
                    Term { coeff: 1, exps: vec![1, 0, 1, 0] },
                    Term { coeff: neg(1), exps: vec![0, 2, 0, 0] },
                ];
                let a = &self.f;
                let mut quartic = vec![Term { coeff: 1, exps: vec![0, 0, 0, 2] }];
                let monomials = [
                    [2u32, 0, 0, 0], // a0 z0^2
                    [1, 1, 0, 0],    // a1 z0 z1
                    [1, 0, 1, 0],    // a2 z0 z2
                    [0, 1, 1, 0],    // a3 z1 z2
                    [0, 0, 2, 0],    // a4 z2^2
                ];
                for (c, m) in a.iter().zip(monomials) {
                    if *c != 0 {
                        quartic.push(Term { coeff: neg(*c), exps: m.to_vec() });
                    }
                }
                vec![conic, quartic]
            }
            _ => return None,
        };
        let dim = if d == 4 { 3 } else { 2 };
        PolySystem::new(
            format!("y^2 = f(x), deg {d} over F_{p}"),
            p,
            Ambient::Projective { dim },
            polys,
        )
        .ok()
    }
}

/// Points on the smooth model of `y^2 = f(x)` over `F_{p^n}`:
/// `sum_x (1 + chi(f(x)))` plus the points at infinity.
pub fn hyperelliptic_count(curve: &HyperellipticCurve, n: usize) -> Result<u64, CountError> {
    hyperelliptic_count_with(curve, n, CountOptions::default())
}

pub fn hyperelliptic_count_with(
    curve: &HyperellipticCurve,
    n: usize,
    opts: CountOptions,
) -> Result<u64, CountError> {
    Ok(match Kernel::new(curve.p, n)? {
        Kernel::Zech(f) => hyper_sum(&f, curve, opts.chunk_size),
        Kernel::Generic(f) => hyper_sum(&f, curve, opts.chunk_size),
    })
}

fn hyper_sum<F: FieldKernel>(field: &F, curve: &HyperellipticCurve, chunk: u64) -> u64 {
    let q = field.order();
    let coeffs: Vec<F::Elem> = curve.f.iter().map(|&c| field.from_prime(c)).collect();
    let chunk = chunk.max(1);
    let starts: Vec<u64> = (0..q).step_by(chunk as usize).collect();
    // sum of chi(f(x)) over x, as a signed total
    let char_sum: i64 = starts
        .par_iter()
        .map(|&s| {
            let mut acc = 0i64;
            for i in s..(s + chunk).min(q) {
                let x = field.element(i);
                let v = coeffs
                    .iter()
                    .rev()
                    .fold(field.zero(), |acc, &c| field.add(field.mul(acc, x), c));
                acc += field.quadratic_character(v) as i64;
            }
            acc
        })
        .sum();
    let affine = (q as i64 + char_sum) as u64;
    let at_infinity = if curve.degree() % 2 == 1 {
        1
    } else {
        let lead = field.from_prime(*curve.f.last().unwrap());
        (1 + field.quadratic_character(lead)) as u64
    };
    affine + at_infinity
}

/// A countable input: a polynomial system or a hyperelliptic curve.
///
/// JSON form is either the polynomial-system format or
/// `{"name": ..., "hyperelliptic": {"p": 3, "f": [a_0, a_1, ...]}}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Variety {
    System(PolySystem),
    Hyperelliptic { name: String, curve: HyperellipticCurve },
}

#[derive(Deserialize)]
struct HyperellipticFile {
    #[serde(default)]
    name: String,
    hyperelliptic: HyperellipticCoeffs,
}

#[derive(Deserialize)]
struct HyperellipticCoeffs {
    p: u64,
    f: Vec<i64>,
}

impl Variety {
    pub fn from_json(text: &str) -> Result<Self, CountError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CountError::Parse(e.to_string()))?;
        if value.get("hyperelliptic").is_some() {
            let file: HyperellipticFile =
                serde_json::from_value(value).map_err(|e| CountError::Parse(e.to_string()))?;
            let curve = HyperellipticCurve::new(file.hyperelliptic.p, &file.hyperelliptic.f)?;
            Ok(Variety::Hyperelliptic { name: file.name, curve })
        } else {
            serde_json::from_value(value)
                .map(Variety::System)
                .map_err(|e| CountError::Parse(e.to_string()))
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Variety::System(s) => s.name(),
            Variety::Hyperelliptic { name, .. } => name,
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Variety::System(s) => s.characteristic(),
            Variety::Hyperelliptic { curve, .. } => curve.characteristic(),
        }
    }

    /// Genus for curves, `None` otherwise.
    pub fn genus(&self) -> Option<usize> {
        match self {
            Variety::Hyperelliptic { curve, .. } => Some(curve.genus()),
            Variety::System(_) => None,
        }
    }

    /// Fastest exact count: the character sum for curves, enumeration
    /// otherwise.
    pub fn count(&self, n: usize) -> Result<u64, CountError> {
        match self {
            Variety::System(s) => count_points(s, n),
            Variety::Hyperelliptic { curve, .. } => hyperelliptic_count(curve, n),
        }
    }

    /// Count by enumerating a projective model, independent of [`count`](Self::count)
    /// for curves.
    pub fn brute_force(&self, n: usize) -> Result<u64, CountError> {
        match self {
            Variety::System(s) => count_points(s, n),
            Variety::Hyperelliptic { curve, .. } => match curve.projective_model() {
                Some(model) => count_points(&model, n),
                None => Err(CountError::Invalid("no projective model for this degree".into())),
            },
        }
    }

    pub fn count_sequence(&self, n_max: usize) -> Result<CountSequence, CountError> {
        let counts = (1..=n_max).map(|n| self.count(n)).collect::<Result<_, _>>()?;
        Ok(CountSequence {
            q: self.characteristic(),
            counts,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn projective_space(p: u64, dim: usize) -> PolySystem {
        PolySystem::new(format!("P^{dim}"), p, Ambient::Projective { dim }, vec![]).unwrap()
    }

    fn weierstrass_f5() -> PolySystem {
        // y^2 z = x^3 + x z^2 + z^3, coordinates (x, y, z)
        PolySystem::from_json(
            r#"{"name":"E","p":5,"ambient":{"kind":"projective","dim":2},
                "polys":[[[1,[0,2,1]],[-1,[3,0,0]],[-1,[1,0,2]],[-1,[0,0,3]]]]}"#,
        )
        .unwrap()
    }

    #[test]
    fn variety_json_forms() {
        let v = Variety::from_json(r#"{"name":"C","hyperelliptic":{"p":5,"f":[1,1,0,1]}}"#).unwrap();
        assert_eq!(v.genus(), Some(1));
        assert_eq!(v.count(1).unwrap(), 9);
        assert_eq!(v.brute_force(1).unwrap(), 9);
        let s = Variety::System(weierstrass_f5());
        assert_eq!(s.count_sequence(2).unwrap().counts, vec![9, 27]);
        assert!(matches!(Variety::from_json("{"), Err(CountError::Parse(_))));
        assert!(matches!(
            Variety::from_json(r#"{"hyperelliptic":{"p":5,"f":[0,0,1]}}"#),
            Err(CountError::NotSquarefree(5))
        ));
    }

    #[test]
    fn projective_space_counts() {
        assert_eq!(count_points(&projective_space(5, 1), 1).unwrap(), 6);
        assert_eq!(count_points(&projective_space(3, 2), 2).unwrap(), 91);
        assert_eq!(
            count_sequence(&projective_space(2, 1), 3).unwrap().counts,
            vec![3, 5, 9]
        );
        for &(p, dim, n) in &[(2u64, 3usize, 2usize), (3, 3, 1), (7, 2, 2), (2, 4, 3), (5, 1, 4)] {
            let q = p.pow(n as u32);
            let expected = (q.pow(dim as u32 + 1) - 1) / (q - 1);
            assert_eq!(count_points(&projective_space(p, dim), n).unwrap(), expected);
        }
    }

    #[test]
    fn affine_plane_counts() {
        let a2 = PolySystem::new("A^2", 3, Ambient::Affine { dim: 2 }, vec![]).unwrap();
        assert_eq!(count_sequence(&a2, 2).unwrap().counts, vec![9, 81]);
    }

    /// Direct enumeration of all 31 points of P^2(F_5), written independently
    /// of the chunked kernel.
    #[test]
    fn weierstrass_curve_over_f5() {
        let mut oracle = 0;
        for x in 0..5i64 {
            for y in 0..5i64 {
                for z in 0..5i64 {
                    let first = [x, y, z].into_iter().find(|&c| c != 0);
                    if first != Some(1) {
                        continue;
                    }
                    if (y * y * z - x * x * x - x * z * z - z * z * z).rem_euclid(5) == 0 {
                        oracle += 1;
                    }
                }
            }
        }
        assert_eq!(oracle, 9);
        let e = weierstrass_f5();
        assert_eq!(count_points(&e, 1).unwrap(), 9);
        // N_2 = q^2 + 1 - (a^2 - 2q) with a = -3
        assert_eq!(count_sequence(&e, 2).unwrap().counts, vec![9, 27]);
    }

    #[test]
    fn guard_names_candidate_count() {
        let p2 = projective_space(7, 2);
        match count_points(&p2, 5) {
            Err(CountError::TooLarge { n: 5, candidates }) => {
                let q = 7u128.pow(5);
                assert_eq!(candidates, q * q + q + 1);
            }
            other => panic!("expected guard error, got {other:?}"),
        }
        let err = count_sequence(&p2, 6).unwrap_err();
        assert!(err.to_string().contains("n = 5"), "{err}");
    }

    #[test]
    fn rejects_inhomogeneous_and_malformed() {
        let bad = r#"{"name":"b","p":5,"ambient":{"kind":"projective","dim":1},
                      "polys":[[[1,[2,0]],[1,[1,0]]]]}"#;
        assert!(PolySystem::from_json(bad).is_err());
        let short = r#"{"name":"b","p":5,"ambient":{"kind":"affine","dim":2},"polys":[[[1,[2]]]]}"#;
        assert!(PolySystem::from_json(short).is_err());
        let composite = r#"{"name":"b","p":6,"ambient":{"kind":"affine","dim":1},"polys":[]}"#;
        assert!(PolySystem::from_json(composite).is_err());
    }

    #[test]
    fn json_round_trip() {
        let e = weierstrass_f5();
        let text = serde_json::to_string(&e).unwrap();
        assert_eq!(PolySystem::from_json(&text).unwrap(), e);
    }

    #[test]
    fn chunking_does_not_change_counts() {
        let e = weierstrass_f5();
        for n in 1..=3 {
            let a = count_points_with(&e, n, CountOptions { chunk_size: 1 }).unwrap();
            let b = count_points_with(&e, n, CountOptions { chunk_size: 977 }).unwrap();
            let c = count_points(&e, n).unwrap();
            assert_eq!((a, b), (c, c));
        }
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let single = pool.install(|| count_points(&e, 3).unwrap());
        assert_eq!(single, count_points(&e, 3).unwrap());
    }

    #[test]
    fn hyperelliptic_examples() {
        let e = HyperellipticCurve::new(5, &[1, 1, 0, 1]).unwrap();
        assert_eq!(hyperelliptic_count(&e, 1).unwrap(), 9);
        let line = HyperellipticCurve::new(7, &[0, 1]).unwrap();
        assert_eq!(hyperelliptic_count(&line, 1).unwrap(), 8);
        assert_eq!(
            HyperellipticCurve::new(3, &[0, 0, 1]),
            Err(CountError::NotSquarefree(3))
        );
        assert_eq!(
            HyperellipticCurve::new(2, &[1, 1, 0, 1]),
            Err(CountError::EvenCharacteristic(2))
        );
    }

    /// Brute force over the 625 x-values of F_625 through the power-basis
    /// arithmetic, counting square roots directly rather than via chi.
    #[test]
    fn hyperelliptic_degree_four_extension_regression() {
        let f = build_extension(5, 4).unwrap();
        let mut squares = vec![0u64; f.order() as usize];
        for code in 0..f.order() {
            let y = f.decode(code);
            squares[f.encode(&f.mul(&y, &y)) as usize] += 1;
        }
        let mut oracle = 1; // one point at infinity, odd degree
        for code in 0..f.order() {
            let x = f.decode(code);
            let x3 = f.mul(&f.mul(&x, &x), &x);
            let v = f.add(&f.add(&x3, &x), &f.one());
            oracle += squares[f.encode(&v) as usize];
        }
        let e = HyperellipticCurve::new(5, &[1, 1, 0, 1]).unwrap();
        assert_eq!(hyperelliptic_count(&e, 4).unwrap(), oracle);
        assert_eq!(oracle, 675);
    }

    #[test]
    fn hyperelliptic_agrees_with_projective_models() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut trials = 0;
        while trials < 50 {
            let p = [3u64, 5, 7][rng.gen_range(0..3)];
            let deg = rng.gen_range(1..=5usize);
            let mut f: Vec<i64> = (0..deg).map(|_| rng.gen_range(0..p as i64)).collect();
            f.push(rng.gen_range(1..p as i64));
            let Ok(curve) = HyperellipticCurve::new(p, &f) else {
                continue;
            };
            trials += 1;
            let model = curve.projective_model().unwrap();
            for n in 1..=2 {
                assert_eq!(
                    hyperelliptic_count(&curve, n).unwrap(),
                    count_points(&model, n).unwrap(),
                    "p={p} f={f:?} n={n}"
                );
            }
        }
    }

    #[test]
    fn generic_kernel_matches_zech() {
        let f = build_extension(3, 4).unwrap();
        let z = ZechField::new(&f).unwrap();
        let sys = PolySystem::from_json(
            r#"{"name":"E3","p":3,"ambient":{"kind":"projective","dim":2},
                "polys":[[[1,[0,2,1]],[-1,[3,0,0]],[-1,[1,0,2]],[-1,[0,0,3]]]]}"#,
        )
        .unwrap();
        assert_eq!(enumerate(&f, &sys, 100), enumerate(&z, &sys, 100));
        let c = HyperellipticCurve::new(3, &[1, 2, 0, 0, 0, 1]).unwrap();
        assert_eq!(hyper_sum(&f, &c, 50), hyper_sum(&z, &c, 50));
    }
}

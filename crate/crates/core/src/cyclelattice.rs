//! Lattice models of numerical cycle groups and of middle cohomology.
//!
//! A [`GradedLattice`] holds `N^0, ..., N^k` as coordinate spaces over `Q`
//! with the intersection pairings `N^i x N^(k-i) -> Q`. A
//! [`MiddlePairing`] is a symmetric form on a middle-degree space together
//! with a spanning set for its algebraic part, and supports the orthogonal
//! splitting `x = x_alg + x_tr`.
//!
//! Everything here is exact.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{dot, fmt_rational, qserde, LinalgError, QMatrix, Q};
use crate::verdict::Verdict;

pub type QVector = Vec<Q>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("Gram matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("restricted Gram matrix is degenerate: {combination} pairs to zero with the span")]
    Degenerate { combination: String },
    #[error("vectors are linearly dependent: {combination} = 0")]
    Dependent { combination: String },
    #[error("all remaining vectors are isotropic against the current flag")]
    Isotropic,
    #[error("expected length {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid graded lattice: {0}")]
    Invalid(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `u^T G v`.
pub fn pair(gram: &QMatrix, u: &[Q], v: &[Q]) -> Q {
    dot(u, &gram.mul_vec(v))
}

/// `<x_i, x_j>` for the given vectors.
pub fn restricted_gram(gram: &QMatrix, xs: &[QVector]) -> QMatrix {
    let gx: Vec<QVector> = xs.iter().map(|x| gram.mul_vec(x)).collect();
    QMatrix::from_fn(xs.len(), xs.len(), |i, j| dot(&xs[i], &gx[j]))
}

fn check_symmetric(gram: &QMatrix) -> Result<(), LatticeError> {
    if !gram.is_square() {
        return Err(LatticeError::Dimension {
            expected: gram.rows(),
            got: gram.cols(),
        });
    }
    for i in 0..gram.rows() {
        for j in 0..i {
            if gram.get(i, j) != gram.get(j, i) {
                return Err(LatticeError::NotSymmetric(i, j));
            }
        }
    }
    Ok(())
}

fn check_lengths(gram: &QMatrix, xs: &[QVector]) -> Result<(), LatticeError> {
    match xs.iter().find(|x| x.len() != gram.rows()) {
        Some(x) => Err(LatticeError::Dimension {
            expected: gram.rows(),
            got: x.len(),
        }),
        None => Ok(()),
    }
}

/// Writes `c_1 x1 + c_2 x2 + ...` skipping zero coefficients.
fn combination(coeffs: &[Q]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| format!("({}) x{}", fmt_rational(c), i + 1))
        .collect();
    terms.join(" + ")
}

/// PASS iff the Gram matrix restricted to `span` has nonzero determinant.
pub fn nondegeneracy_check(gram: &QMatrix, span: &[QVector]) -> Result<Verdict, LatticeError> {
    check_symmetric(gram)?;
    check_lengths(gram, span)?;
    Ok(Verdict::from_bool(!restricted_gram(gram, span).det().is_zero()))
}

/// Vectors `y_j` in `span(xs)` with `<x_i, y_j> = delta_ij`.
pub fn dual_basis(gram: &QMatrix, xs: &[QVector]) -> Result<Vec<QVector>, LatticeError> {
    check_symmetric(gram)?;
    check_lengths(gram, xs)?;
    let g = restricted_gram(gram, xs);
    let inv = g.inverse().ok_or_else(|| LatticeError::Degenerate {
        combination: combination(&g.kernel()[0]),
    })?;
    // y_j = sum_k (G^-1)_(kj) x_k
    Ok((0..xs.len())
        .map(|j| span_combination(xs, &inv.col(j), gram.rows()))
        .collect())
}

fn span_combination(xs: &[QVector], coeffs: &[Q], dim: usize) -> QVector {
    let mut y = vec![Q::zero(); dim];
    for (x, c) in xs.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi += c * xi;
        }
    }
    y
}

fn axpy(y: &mut [Q], a: &Q, x: &[Q]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// The inductive construction: extend a dual basis one vector at a time.
///
/// The residue `z` of a new vector against the current dual pairs is
/// orthogonal to everything processed so far. If `<z, z> = 0`, a later
/// residue `z'` with `<z, z'> != 0` exists whenever the whole span is
/// nondegenerate, and the two are adjoined together as a 2x2 block.
pub fn dual_basis_inductive(gram: &QMatrix, xs: &[QVector]) -> Result<Vec<QVector>, LatticeError> {
    check_symmetric(gram)?;
    check_lengths(gram, xs)?;
    let m = xs.len();
    let mut done: Vec<usize> = Vec::with_capacity(m);
    let mut ys: Vec<Option<QVector>> = vec![None; m];
    let residue = |x: &QVector, done: &[usize], ys: &[Option<QVector>]| {
        let mut z = x.clone();
        for &i in done {
            let y = ys[i].as_ref().expect("processed");
            axpy(&mut z, &-pair(gram, &xs[i], x), y);
        }
        z
    };
    let degenerate = |upto: &[usize]| {
        let sub: Vec<QVector> = upto.iter().map(|&i| xs[i].clone()).collect();
        let g = restricted_gram(gram, &sub);
        LatticeError::Degenerate { combination: combination(&g.kernel()[0]) }
    };
    for a in 0..m {
        if ys[a].is_some() {
            continue;
        }
        let za = residue(&xs[a], &done, &ys);
        let s = pair(gram, &xs[a], &za);
        let block: Vec<(usize, QVector)> = if !s.is_zero() {
            vec![(a, za.iter().map(|c| c / &s).collect())]
        } else {
            let partner = (a + 1..m)
                .filter(|&b| ys[b].is_none())
                .map(|b| (b, residue(&xs[b], &done, &ys)))
                .find(|(_, zb)| !pair(gram, &za, zb).is_zero());
            let Some((b, zb)) = partner else {
                let all: Vec<usize> = (0..m).collect();
                return Err(degenerate(&all));
            };
            // y_a, y_b in span(z_a, z_b) solving the 2x2 block system
            let block = QMatrix::from_rows(vec![
                vec![pair(gram, &xs[a], &za), pair(gram, &xs[a], &zb)],
                vec![pair(gram, &xs[b], &za), pair(gram, &xs[b], &zb)],
            ])
            .expect("2x2");
            let inv = block.inverse().expect("determinant is -<z_a, z_b>^2");
            let combine = |j: usize| span_combination(&[za.clone(), zb.clone()], &inv.col(j), gram.rows());
            vec![(a, combine(0)), (b, combine(1))]
        };
        for &i in &done {
            let mut y = ys[i].take().expect("processed");
            for (j, yj) in &block {
                let c = -pair(gram, &xs[*j], &y);
                axpy(&mut y, &c, yj);
            }
            ys[i] = Some(y);
        }
        for (j, yj) in block {
            ys[j] = Some(yj);
            done.push(j);
        }
    }
    Ok(ys.into_iter().map(|y| y.expect("all processed")).collect())
}

/// Gram–Schmidt without normalization.
///
/// The pivot is the first remaining vector with nonzero self-pairing. When
/// every remaining vector is isotropic, the first pair `(i, j)` with
/// `<v_i, v_j> != 0` is merged into `v_i + v_j`, whose self-pairing is
/// `2 <v_i, v_j>`.
pub fn orthogonalize(basis: &[QVector], gram: &QMatrix) -> Result<Vec<QVector>, LatticeError> {
    check_symmetric(gram)?;
    check_lengths(gram, basis)?;
    let mut rest: Vec<QVector> = basis.to_vec();
    let mut out: Vec<QVector> = Vec::with_capacity(basis.len());
    while !rest.is_empty() {
        let pivot = match rest.iter().position(|v| !pair(gram, v, v).is_zero()) {
            Some(i) => rest.remove(i),
            None => {
                let hit = (0..rest.len())
                    .flat_map(|i| (i + 1..rest.len()).map(move |j| (i, j)))
                    .find(|&(i, j)| !pair(gram, &rest[i], &rest[j]).is_zero());
                let Some((i, j)) = hit else {
                    return Err(LatticeError::Isotropic);
                };
                let mut v = rest.remove(i);
                let other = rest[j - 1].clone();
                axpy(&mut v, &Q::one(), &other);
                v
            }
        };
        let s = pair(gram, &pivot, &pivot);
        for v in rest.iter_mut() {
            let c = -pair(gram, v, &pivot) / &s;
            axpy(v, &c, &pivot);
        }
        out.push(pivot);
    }
    Ok(out)
}

/// Middle-degree model: a symmetric nondegenerate form and its algebraic part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MiddlePairing {
    dim: usize,
    gram: QMatrix,
    alg_span: Vec<QVector>,
    orthogonal: Vec<QVector>,
}

impl MiddlePairing {
    /// `dim` is the even cohomological degree `2k'`; it is carried as data.
    pub fn new(dim: usize, gram: QMatrix, alg_span: Vec<QVector>) -> Result<Self, LatticeError> {
        check_symmetric(&gram)?;
        check_lengths(&gram, &alg_span)?;
        if dim % 2 != 0 {
            return Err(LatticeError::Invalid(format!("middle degree {dim} is odd")));
        }
        if gram.det().is_zero() {
            return Err(LatticeError::Degenerate {
                combination: combination(&gram.kernel()[0]),
            });
        }
        if !alg_span.is_empty() {
            let m = QMatrix::from_cols(&alg_span)?;
            if let Some(k) = m.kernel().first() {
                return Err(LatticeError::Dependent {
                    combination: combination(k),
                });
            }
            if nondegeneracy_check(&gram, &alg_span)? != Verdict::Pass {
                let g = restricted_gram(&gram, &alg_span);
                return Err(LatticeError::Degenerate {
                    combination: combination(&g.kernel()[0]),
                });
            }
        }
        let orthogonal = orthogonalize(&alg_span, &gram)?;
        Ok(MiddlePairing {
            dim,
            gram,
            alg_span,
            orthogonal,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &QMatrix {
        &self.gram
    }

    pub fn alg_span(&self) -> &[QVector] {
        &self.alg_span
    }

    /// The orthogonal basis `alpha_i` of the algebraic part.
    pub fn orthogonal_basis(&self) -> &[QVector] {
        &self.orthogonal
    }

    pub fn decompose(&self, x: &[Q]) -> Result<Decomposition, LatticeError> {
        if x.len() != self.rank() {
            return Err(LatticeError::Dimension {
                expected: self.rank(),
                got: x.len(),
            });
        }
        // x_alg = sum <x, a_i> / <a_i, a_i> a_i
        let mut x_alg = vec![Q::zero(); x.len()];
        for a in &self.orthogonal {
            let c = pair(&self.gram, x, a) / pair(&self.gram, a, a);
            axpy(&mut x_alg, &c, a);
        }
        let x_tr = x.iter().zip(&x_alg).map(|(a, b)| a - b).collect();
        Ok(Decomposition { x_alg, x_tr })
    }

    pub fn tau(&self, x: &[Q]) -> Result<QVector, LatticeError> {
        Ok(self.decompose(x)?.x_alg)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    #[serde(with = "qserde::vec")]
    pub x_alg: QVector,
    #[serde(with = "qserde::vec")]
    pub x_tr: QVector,
}

pub fn decompose(x: &[Q], mp: &MiddlePairing) -> Result<Decomposition, LatticeError> {
    mp.decompose(x)
}

/// Projection to the algebraic part.
pub fn tau(x: &[Q], mp: &MiddlePairing) -> Result<QVector, LatticeError> {
    mp.tau(x)
}

/// `N^0..N^k` with pairings `N^i x N^(k-i) -> Q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedLattice {
    k: usize,
    ranks: Vec<usize>,
    pairings: Vec<QMatrix>,
    ample: Vec<QVector>,
}

impl GradedLattice {
    /// Validates shapes, `pairing(i) = pairing(k-i)^T` and nondegeneracy.
    /// The ample classes `H^i` default to the first basis vector of each
    /// `N^i`, which is the right choice when every rank is 1.
    pub fn new(
        k: usize,
        ranks: Vec<usize>,
        pairings: Vec<QMatrix>,
        ample: Option<Vec<QVector>>,
    ) -> Result<Self, LatticeError> {
        let bad = |m: String| Err(LatticeError::Invalid(m));
        if ranks.len() != k + 1 || pairings.len() != k + 1 {
            return bad(format!(
                "need k + 1 = {} ranks and pairings, got {} and {}",
                k + 1,
                ranks.len(),
                pairings.len()
            ));
        }
        for i in 0..=k {
            if ranks[i] == 0 {
                return bad(format!("rank of N^{i} is zero"));
            }
            if ranks[i] != ranks[k - i] {
                return bad(format!("rank N^{i} = {} but rank N^{} = {}", ranks[i], k - i, ranks[k - i]));
            }
            let p = &pairings[i];
            if (p.rows(), p.cols()) != (ranks[i], ranks[k - i]) {
                return bad(format!("pairing {i} has shape {}x{}", p.rows(), p.cols()));
            }
            if p != &pairings[k - i].transpose() {
                return bad(format!("pairing {i} is not the transpose of pairing {}", k - i));
            }
            if p.det().is_zero() {
                return bad(format!("pairing {i} is degenerate"));
            }
        }
        let ample = match ample {
            Some(a) => {
                if a.len() != k + 1 || a.iter().zip(&ranks).any(|(v, &r)| v.len() != r) {
                    return bad("ample classes do not match the ranks".into());
                }
                a
            }
            None => ranks
                .iter()
                .map(|&r| {
                    let mut v = vec![Q::zero(); r];
                    v[0] = Q::one();
                    v
                })
                .collect(),
        };
        Ok(GradedLattice {
            k,
            ranks,
            pairings,
            ample,
        })
    }

    /// `N^*(P^k)`: ranks 1, `h^i . h^(k-i) = 1`.
    pub fn projective_space(k: usize) -> Self {
        let one = QMatrix::identity(1);
        GradedLattice::new(k, vec![1; k + 1], vec![one; k + 1], None).expect("valid by construction")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn rank(&self, i: usize) -> usize {
        self.ranks[i]
    }

    pub fn pairing(&self, i: usize) -> &QMatrix {
        &self.pairings[i]
    }

    /// The class `H^i` used for degree sequences.
    pub fn ample(&self, i: usize) -> &QVector {
        &self.ample[i]
    }

    /// `<u, v>` for `u` in `N^i`, `v` in `N^(k-i)`.
    pub fn intersect(&self, i: usize, u: &[Q], v: &[Q]) -> Result<Q, LatticeError> {
        if u.len() != self.ranks[i] || v.len() != self.ranks[self.k - i] {
            return Err(LatticeError::Dimension {
                expected: self.ranks[i],
                got: u.len(),
            });
        }
        Ok(dot(u, &self.pairings[i].mul_vec(v)))
    }
}

/// Lattice and middle-pairing input. Graded form: `k`, `ranks`,
/// `pairings` (optionally `ample`). Middle form: `dim`, `gram`, `alg_span`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LatticeFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranks: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairings: Option<Vec<QMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ample: Option<Vec<QMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<QMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alg_span: Option<QMatrix>,
}

impl LatticeFile {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn is_graded(&self) -> bool {
        self.pairings.is_some()
    }

    pub fn graded(&self) -> Result<GradedLattice, LatticeError> {
        let (Some(k), Some(ranks), Some(pairings)) = (self.k, &self.ranks, &self.pairings) else {
            return Err(LatticeError::Invalid("graded lattice needs k, ranks and pairings".into()));
        };
        // each ample class is written as a one-row matrix
        let ample = self
            .ample
            .as_ref()
            .map(|a| a.iter().map(|m| m.row(0)).collect());
        GradedLattice::new(k, ranks.clone(), pairings.clone(), ample)
    }

    pub fn middle(&self) -> Result<MiddlePairing, LatticeError> {
        let (Some(dim), Some(gram)) = (self.dim, &self.gram) else {
            return Err(LatticeError::Invalid("middle pairing needs dim and gram".into()));
        };
        let span = self.alg_span.as_ref().map(QMatrix::to_rows).unwrap_or_default();
        MiddlePairing::new(dim, gram.clone(), span)
    }

    pub fn from_graded(l: &GradedLattice) -> Self {
        LatticeFile {
            k: Some(l.k),
            ranks: Some(l.ranks.clone()),
            pairings: Some(l.pairings.clone()),
            ample: Some(
                l.ample
                    .iter()
                    .map(|v| QMatrix::from_rows(vec![v.clone()]).expect("one row"))
                    .collect(),
            ),
            ..Default::default()
        }
    }

    pub fn from_middle(m: &MiddlePairing) -> Self {
        LatticeFile {
            dim: Some(m.dim),
            gram: Some(m.gram.clone()),
            alg_span: (!m.alg_span.is_empty())
                .then(|| QMatrix::from_rows(m.alg_span.clone()).expect("equal lengths")),
            ..Default::default()
        }
    }
}

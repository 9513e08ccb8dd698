//! Correspondence models: monomial self-maps of `P^k` and graded matrix
//! actions on lattice models.
//!
//! A monomial map `[x^E_0 : ... : x^E_k]` is stored as its exponent matrix
//! `E` (row `i` is the exponent vector of the `i`-th coordinate). On the
//! torus `u_j = x_j / x_k` it acts by `u -> u^A` with
//! `A_(jl) = E_(jl) - E_(kl)`, `j, l < k`. Composition `f o g` has exponent
//! matrix `E_f E_g` before the common monomial factor is removed, and
//! torus matrix `A_f A_g` regardless.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclelattice::{GradedLattice, LatticeError, LatticeFile, QVector};
use crate::linalg::{q, QMatrix, Q};

/// Guard on the number of iterates.
pub const MAX_ITERATES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorrError {
    #[error("monomial map on P^{k} needs {expected} exponent vectors of length {expected}")]
    Shape { k: usize, expected: usize },
    #[error("exponent vectors have different total degrees")]
    NotHomogeneous,
    #[error("map is not dominant (singular torus matrix)")]
    NotDominant,
    #[error("iterate {n} is not dominant")]
    NotDominantAt { n: usize },
    #[error("maps live on P^{0} and P^{1}")]
    DimensionMismatch(usize, usize),
    #[error("n_max = {0} outside 1..={MAX_ITERATES}")]
    Guard(usize),
    #[error("action on N^{i} must be {rank}x{rank}")]
    ActionShape { i: usize, rank: usize },
    #[error("vector for N^{i} must have length {rank}, got {got}")]
    VectorLength { i: usize, rank: usize, got: usize },
    #[error("degree {i} outside 0..={k}")]
    Degree { i: usize, k: usize },
    #[error("N^0 and N^k must have rank 1")]
    EndRanks,
    #[error("exponent {0} does not fit the file format")]
    Overflow(BigInt),
    #[error("{0}")]
    Model(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// A dominant monomial self-map of `P^k` with no common monomial factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialMap {
    k: usize,
    exps: Vec<Vec<BigInt>>,
    degree: BigInt,
}

impl MonomialMap {
    /// Normalizes by removing the common monomial factor and rejects
    /// non-dominant maps.
    pub fn new(k: usize, exps: Vec<Vec<BigInt>>) -> Result<Self, CorrError> {
        if exps.len() != k + 1 || exps.iter().any(|e| e.len() != k + 1) {
            return Err(CorrError::Shape { k, expected: k + 1 });
        }
        if exps.iter().flatten().any(Signed::is_negative) {
            return Err(CorrError::Shape { k, expected: k + 1 });
        }
        let map = Self::reduce(k, exps)?;
        if map.torus_matrix().det().is_zero() {
            return Err(CorrError::NotDominant);
        }
        Ok(map)
    }

    pub fn from_u64(k: usize, exps: &[Vec<u64>]) -> Result<Self, CorrError> {
        Self::new(
            k,
            exps.iter()
                .map(|e| e.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    fn reduce(k: usize, mut exps: Vec<Vec<BigInt>>) -> Result<Self, CorrError> {
        for l in 0..=k {
            let m = exps.iter().map(|e| e[l].clone()).min().expect("k + 1 rows");
            if !m.is_zero() {
                for e in exps.iter_mut() {
                    e[l] -= &m;
                }
            }
        }
        let degree: BigInt = exps[0].iter().sum();
        if exps.iter().any(|e| e.iter().sum::<BigInt>() != degree) {
            return Err(CorrError::NotHomogeneous);
        }
        Ok(MonomialMap { k, exps, degree })
    }

    pub fn identity(k: usize) -> Self {
        let exps = (0..=k)
            .map(|i| (0..=k).map(|j| BigInt::from((i == j) as u8)).collect())
            .collect();
        MonomialMap {
            k,
            exps,
            degree: BigInt::one(),
        }
    }

    /// The standard Cremona involution `[x1 x2 : x2 x0 : x0 x1]`.
    pub fn cremona() -> Self {
        Self::from_u64(2, &[vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]).expect("dominant")
    }

    /// `[x0^d : ... : xk^d]`.
    pub fn power_map(k: usize, d: u64) -> Self {
        let exps: Vec<Vec<u64>> = (0..=k)
            .map(|i| (0..=k).map(|j| if i == j { d } else { 0 }).collect())
            .collect();
        Self::from_u64(k, &exps).expect("dominant")
    }

    /// The monomial map acting on the torus by `u -> u^A`, `A` in `GL(k, Q)`
    /// with integer entries.
    pub fn from_torus(a: &QMatrix) -> Result<Self, CorrError> {
        let k = a.rows();
        if !a.is_square() || !a.is_integral() {
            return Err(CorrError::Model("torus matrix must be square and integral".into()));
        }
        // shift every row by a common vector so all exponents are >= 0,
        // then homogenize with x_k
        let rows: Vec<Vec<BigInt>> = (0..k)
            .map(|j| (0..k).map(|l| a.get(j, l).to_integer()).collect())
            .chain(std::iter::once(vec![BigInt::zero(); k]))
            .collect();
        let shift: Vec<BigInt> = (0..k)
            .map(|l| {
                let m = rows.iter().map(|r| r[l].clone()).min().expect("rows");
                (-m).max(BigInt::zero())
            })
            .collect();
        let shifted: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| r.iter().zip(&shift).map(|(x, s)| x + s).collect())
            .collect();
        let top = shifted
            .iter()
            .map(|r| r.iter().sum::<BigInt>())
            .max()
            .expect("rows");
        let exps = shifted
            .into_iter()
            .map(|mut r| {
                let s: BigInt = r.iter().sum();
                r.push(&top - s);
                r
            })
            .collect();
        Self::new(k, exps)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn exps(&self) -> &[Vec<BigInt>] {
        &self.exps
    }

    pub fn degree(&self) -> &BigInt {
        &self.degree
    }

    /// `A_(jl) = E_(jl) - E_(kl)` for `j, l < k`.
    pub fn torus_matrix(&self) -> QMatrix {
        let k = self.k;
        QMatrix::from_fn(k, k, |j, l| Q::from_integer(&self.exps[j][l] - &self.exps[k][l]))
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.k)
    }

    pub fn to_file(&self) -> Result<MonomialFile, CorrError> {
        let monomials = self
            .exps
            .iter()
            .map(|e| {
                e.iter()
                    .map(|x| x.to_u64().ok_or_else(|| CorrError::Overflow(x.clone())))
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        Ok(MonomialFile { k: self.k, monomials })
    }
}

/// `{ "k": 2, "monomials": [[0,1,1],[1,0,1],[1,1,0]] }`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialFile {
    pub k: usize,
    pub monomials: Vec<Vec<u64>>,
}

impl MonomialFile {
    pub fn to_map(&self) -> Result<MonomialMap, CorrError> {
        MonomialMap::from_u64(self.k, &self.monomials)
    }
}

/// `f o g`: substitute `g` into `f`, then drop the common monomial factor.
pub fn compose_monomial(f: &MonomialMap, g: &MonomialMap) -> Result<MonomialMap, CorrError> {
    if f.k != g.k {
        return Err(CorrError::DimensionMismatch(f.k, g.k));
    }
    let k = f.k;
    let exps: Vec<Vec<BigInt>> = (0..=k)
        .map(|i| {
            (0..=k)
                .map(|l| (0..=k).map(|j| &f.exps[i][j] * &g.exps[j][l]).sum())
                .collect()
        })
        .collect();
    let h = MonomialMap::reduce(k, exps)?;
    if h.torus_matrix().det().is_zero() {
        return Err(CorrError::NotDominant);
    }
    Ok(h)
}

/// The common degree of `f o g` before the common factor is removed.
pub fn unreduced_degree(f: &MonomialMap, g: &MonomialMap) -> BigInt {
    &f.degree * &g.degree
}

/// `deg(f^n)` for `n = 1..=n_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    pub degs: Vec<BigInt>,
}

pub fn iterate_degrees(f: &MonomialMap, n_max: usize) -> Result<DegreeSequence, CorrError> {
    if n_max == 0 || n_max > MAX_ITERATES {
        return Err(CorrError::Guard(n_max));
    }
    let mut degs = vec![f.degree.clone()];
    let mut fn_ = f.clone();
    for n in 2..=n_max {
        fn_ = compose_monomial(f, &fn_).map_err(|e| match e {
            CorrError::NotDominant => CorrError::NotDominantAt { n },
            other => other,
        })?;
        degs.push(fn_.degree.clone());
    }
    Ok(DegreeSequence { degs })
}

/// Same as `torus_matrix`, named for symmetry with the other operations.
pub fn torus_matrix(f: &MonomialMap) -> QMatrix {
    f.torus_matrix()
}

/// Graded matrix action `f^*` on a lattice model.
///
/// For a functorial model `(f^n)^*` is `action(i)^n`; otherwise `per_n`
/// lists the actions of `(f^n)^*` for `n = 1, 2, ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedMatrixCorr {
    lattice: GradedLattice,
    actions: Vec<QMatrix>,
    functorial: bool,
    per_n: Vec<Vec<QMatrix>>,
}

impl GradedMatrixCorr {
    pub fn new(
        lattice: GradedLattice,
        actions: Vec<QMatrix>,
        functorial: bool,
        per_n: Vec<Vec<QMatrix>>,
    ) -> Result<Self, CorrError> {
        let k = lattice.k();
        if lattice.rank(0) != 1 || lattice.rank(k) != 1 {
            return Err(CorrError::EndRanks);
        }
        let check = |acts: &[QMatrix]| -> Result<(), CorrError> {
            if acts.len() != k + 1 {
                return Err(CorrError::Model(format!("need {} actions, got {}", k + 1, acts.len())));
            }
            for (i, a) in acts.iter().enumerate() {
                let r = lattice.rank(i);
                if (a.rows(), a.cols()) != (r, r) {
                    return Err(CorrError::ActionShape { i, rank: r });
                }
            }
            Ok(())
        };
        check(&actions)?;
        for acts in &per_n {
            check(acts)?;
        }
        Ok(GradedMatrixCorr {
            lattice,
            actions,
            functorial,
            per_n,
        })
    }

    pub fn lattice(&self) -> &GradedLattice {
        &self.lattice
    }

    pub fn k(&self) -> usize {
        self.lattice.k()
    }

    pub fn action(&self, i: usize) -> &QMatrix {
        &self.actions[i]
    }

    pub fn actions(&self) -> &[QMatrix] {
        &self.actions
    }

    pub fn is_functorial(&self) -> bool {
        self.functorial
    }

    pub fn per_n(&self) -> &[Vec<QMatrix>] {
        &self.per_n
    }

    /// `(f^n)^*` on `N^i`, if modeled.
    pub fn iterate_action(&self, n: usize, i: usize) -> Option<QMatrix> {
        if self.functorial {
            Some(self.actions[i].pow(n as u32))
        } else if n == 1 {
            Some(self.actions[i].clone())
        } else {
            self.per_n.get(n - 1).map(|a| a[i].clone())
        }
    }

    /// How many iterates the model supports (`usize::MAX` if functorial).
    pub fn iterates_available(&self) -> usize {
        if self.functorial {
            usize::MAX
        } else {
            self.per_n.len().max(1)
        }
    }

    fn check_vector(&self, i: usize, v: &[Q]) -> Result<(), CorrError> {
        let k = self.k();
        if i > k {
            return Err(CorrError::Degree { i, k });
        }
        let rank = self.lattice.rank(i);
        if v.len() != rank {
            return Err(CorrError::VectorLength { i, rank, got: v.len() });
        }
        Ok(())
    }

    pub fn pullback_class(&self, i: usize, v: &[Q]) -> Result<QVector, CorrError> {
        self.check_vector(i, v)?;
        Ok(self.actions[i].mul_vec(v))
    }

    /// Adjoint of the pullback on `N^(k-i)`: `<f^* a, b> = <a, f_* b>`.
    pub fn pushforward_class(&self, i: usize, v: &[Q]) -> Result<QVector, CorrError> {
        self.check_vector(i, v)?;
        let j = self.k() - i;
        let p = self.lattice.pairing(j);
        let a = &self.actions[j];
        let pinv = p.inverse().expect("pairings are nondegenerate");
        Ok(pinv.mul_vec(&a.transpose().mul_vec(&p.mul_vec(v))))
    }

    /// Checks `<f^* a, b> = <a, f_* b>` on basis vectors of every degree.
    pub fn is_adjoint_consistent(&self) -> bool {
        let k = self.k();
        (0..=k).all(|i| {
            let (ri, rj) = (self.lattice.rank(i), self.lattice.rank(k - i));
            (0..ri).all(|a| {
                (0..rj).all(|b| {
                    let ea = unit(ri, a);
                    let eb = unit(rj, b);
                    let lhs = self
                        .lattice
                        .intersect(i, &self.pullback_class(i, &ea).unwrap(), &eb)
                        .unwrap();
                    let rhs = self
                        .lattice
                        .intersect(i, &ea, &self.pushforward_class(k - i, &eb).unwrap())
                        .unwrap();
                    lhs == rhs
                })
            })
        })
    }
}

fn unit(n: usize, i: usize) -> QVector {
    (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()
}

/// Frobenius on `N^*(P^k)`: multiplication by `q^i` on `N^i`.
pub fn frobenius_model(q_: u64, k: usize) -> Result<GradedMatrixCorr, CorrError> {
    if q_ < 2 || k < 1 {
        return Err(CorrError::Model("frobenius model needs q >= 2 and k >= 1".into()));
    }
    let actions = (0..=k)
        .map(|i| QMatrix::scalar(Q::from_integer(num_traits::pow(BigInt::from(q_), i))))
        .collect();
    GradedMatrixCorr::new(GradedLattice::projective_space(k), actions, true, Vec::new())
}

/// The identity correspondence on a lattice.
pub fn identity_model(lattice: GradedLattice) -> Result<GradedMatrixCorr, CorrError> {
    let actions = (0..=lattice.k())
        .map(|i| QMatrix::identity(lattice.rank(i)))
        .collect();
    GradedMatrixCorr::new(lattice, actions, true, Vec::new())
}

fn binomial(n: usize, r: usize) -> Q {
    let mut c = BigInt::one();
    for t in 0..r {
        c = c * (n - t) / (t + 1);
    }
    Q::from_integer(c)
}

/// Künneth product `g x h` on `Y x Z`.
///
/// `N^p` is the direct sum of `N^i(Y) (x) N^j(Z)` over `i + j = p`, ordered
/// by increasing `i`, each block in Kronecker order. The ample class is
/// `H = H_Y + H_Z`, so `H^p = sum_i C(p, i) H_Y^i (x) H_Z^(p-i)`.
pub fn product_model(g: &GradedMatrixCorr, h: &GradedMatrixCorr) -> Result<GradedMatrixCorr, CorrError> {
    if !g.functorial || !h.functorial {
        return Err(CorrError::Model("product model needs functorial factors".into()));
    }
    let (ky, kz) = (g.k(), h.k());
    let (ly, lz) = (g.lattice(), h.lattice());
    let k = ky + kz;
    let blocks = |p: usize| -> Vec<(usize, usize)> {
        (0..=ky).filter(|&i| p >= i && p - i <= kz).map(|i| (i, p - i)).collect()
    };
    let ranks: Vec<usize> = (0..=k)
        .map(|p| blocks(p).iter().map(|&(i, j)| ly.rank(i) * lz.rank(j)).sum())
        .collect();
    let mut pairings = Vec::with_capacity(k + 1);
    let mut actions = Vec::with_capacity(k + 1);
    let mut ample = Vec::with_capacity(k + 1);
    for p in 0..=k {
        let mut pm = QMatrix::zeros(ranks[p], ranks[k - p]);
        let mut row = 0;
        for &(i, j) in &blocks(p) {
            let block = ly.pairing(i).kron(lz.pairing(j));
            // column offset of the (ky - i, kz - j) summand in N^(k-p)
            let col: usize = blocks(k - p)
                .iter()
                .take_while(|&&(a, _)| a < ky - i)
                .map(|&(a, b)| ly.rank(a) * lz.rank(b))
                .sum();
            for r in 0..block.rows() {
                for c in 0..block.cols() {
                    pm.set(row + r, col + c, block.get(r, c).clone());
                }
            }
            row += block.rows();
        }
        pairings.push(pm);
        actions.push(QMatrix::direct_sum(
            &blocks(p)
                .iter()
                .map(|&(i, j)| g.action(i).kron(h.action(j)))
                .collect::<Vec<_>>(),
        ));
        let mut hp = Vec::with_capacity(ranks[p]);
        for &(i, j) in &blocks(p) {
            let c = binomial(p, i);
            for a in ly.ample(i) {
                for b in lz.ample(j) {
                    hp.push(&c * a * b);
                }
            }
        }
        ample.push(hp);
    }
    let lattice = GradedLattice::new(k, ranks, pairings, Some(ample))?;
    GradedMatrixCorr::new(lattice, actions, true, Vec::new())
}

/// Graded model file: lattice fields plus `actions`, `functorial` and, for
/// non-functorial models, `per_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    #[serde(flatten)]
    pub lattice: LatticeFile,
    pub actions: Vec<QMatrix>,
    #[serde(default = "default_true")]
    pub functorial: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_n: Vec<Vec<QMatrix>>,
}

fn default_true() -> bool {
    true
}

impl ModelFile {
    pub fn to_model(&self) -> Result<GradedMatrixCorr, CorrError> {
        GradedMatrixCorr::new(
            self.lattice.graded()?,
            self.actions.clone(),
            self.functorial,
            self.per_n.clone(),
        )
    }

    pub fn from_model(c: &GradedMatrixCorr) -> Self {
        ModelFile {
            lattice: LatticeFile::from_graded(&c.lattice),
            actions: c.actions.clone(),
            functorial: c.functorial,
            per_n: c.per_n.clone(),
        }
    }
}

/// A 1x1 model scalar, for small hand-written models.
pub fn scalar(x: i64) -> QMatrix {
    QMatrix::scalar(q(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frac;
    use proptest::prelude::*;

    fn m(k: usize, rows: &[&[u64]]) -> MonomialMap {
        MonomialMap::from_u64(k, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn golden() -> MonomialMap {
        m(2, &[&[2, 1, 0], &[1, 1, 1], &[0, 0, 3]])
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    /// Oracle: exponent product then column minima, written out by hand.
    fn compose_oracle(f: &[Vec<i64>], g: &[Vec<i64>]) -> (Vec<Vec<i64>>, i64) {
        let n = f.len();
        let mut e = vec![vec![0i64; n]; n];
        for i in 0..n {
            for l in 0..n {
                for j in 0..n {
                    e[i][l] += f[i][j] * g[j][l];
                }
            }
        }
        let pre: i64 = e[0].iter().sum();
        for l in 0..n {
            let mn = (0..n).map(|i| e[i][l]).min().unwrap();
            for row in e.iter_mut() {
                row[l] -= mn;
            }
        }
        (e, pre)
    }

    #[test]
    fn cremona_squares_to_identity() {
        let c = MonomialMap::cremona();
        assert_eq!(c.degree(), &BigInt::from(2));
        assert_eq!(unreduced_degree(&c, &c), BigInt::from(4));
        let c2 = compose_monomial(&c, &c).unwrap();
        assert!(c2.is_identity());
        assert_eq!(c2.degree(), &BigInt::one());
    }

    #[test]
    fn identity_is_neutral() {
        let f = golden();
        assert_eq!(compose_monomial(&MonomialMap::identity(2), &f).unwrap(), f);
        assert_eq!(compose_monomial(&f, &MonomialMap::identity(2)).unwrap(), f);
    }

    #[test]
    fn golden_map_square() {
        let f = golden();
        let raw: Vec<Vec<i64>> = vec![vec![2, 1, 0], vec![1, 1, 1], vec![0, 0, 3]];
        let (oracle, pre) = compose_oracle(&raw, &raw);
        assert_eq!(pre, 9);
        let f2 = compose_monomial(&f, &f).unwrap();
        assert_eq!(unreduced_degree(&f, &f), BigInt::from(9));
        assert_eq!(f2.degree(), &BigInt::from(8));
        let got: Vec<Vec<BigInt>> = oracle.iter().map(|r| ints(r)).collect();
        assert_eq!(f2.exps(), &got[..]);
    }

    #[test]
    fn degree_sequences() {
        let d = iterate_degrees(&MonomialMap::cremona(), 8).unwrap();
        assert_eq!(d.degs, ints(&[2, 1, 2, 1, 2, 1, 2, 1]));
        let d = iterate_degrees(&golden(), 4).unwrap();
        assert_eq!(&d.degs[..2], &ints(&[3, 8])[..]);
        let d = iterate_degrees(&MonomialMap::power_map(2, 3), 5).unwrap();
        assert_eq!(d.degs, ints(&[3, 9, 27, 81, 243]));
        assert_eq!(iterate_degrees(&golden(), 65), Err(CorrError::Guard(65)));
        // 64 iterates of the golden map need more than 64-bit degrees
        let d = iterate_degrees(&golden(), 64).unwrap();
        assert!(d.degs[63].bits() > 64);
    }

    #[test]
    fn torus_matrices() {
        assert_eq!(golden().torus_matrix(), QMatrix::from_i64(&[&[2, 1], &[1, 1]]));
        let a = MonomialMap::cremona().torus_matrix();
        assert_eq!(a, QMatrix::from_i64(&[&[-1, 0], &[0, -1]]));
        assert_eq!(a.pow(2), QMatrix::identity(2));
        assert_eq!(MonomialMap::identity(3).torus_matrix(), QMatrix::identity(3));
    }

    #[test]
    fn from_torus_inverts_torus_matrix() {
        for a in [
            QMatrix::from_i64(&[&[2, 1], &[1, 1]]),
            QMatrix::from_i64(&[&[-1, 0], &[0, -1]]),
            QMatrix::from_i64(&[&[1, -1], &[0, 1]]),
            QMatrix::from_i64(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, -2]]),
        ] {
            assert_eq!(MonomialMap::from_torus(&a).unwrap().torus_matrix(), a);
        }
        assert_eq!(
            MonomialMap::from_torus(&QMatrix::from_i64(&[&[-1, 0], &[0, -1]])).unwrap(),
            MonomialMap::cremona()
        );
    }

    #[test]
    fn constructor_normalizes_and_validates() {
        let f = m(1, &[&[3, 1], &[2, 2]]);
        assert_eq!(f.exps(), &[ints(&[1, 0]), ints(&[0, 1])][..]);
        assert!(f.is_identity());
        assert_eq!(
            MonomialMap::from_u64(1, &[vec![2, 0], vec![0, 1]]),
            Err(CorrError::NotHomogeneous)
        );
        assert_eq!(
            MonomialMap::from_u64(1, &[vec![1, 1], vec![1, 1]]),
            Err(CorrError::NotDominant)
        );
        assert!(matches!(
            MonomialMap::from_u64(2, &[vec![1, 0, 0]]),
            Err(CorrError::Shape { .. })
        ));
    }

    #[test]
    fn monomial_file_round_trip() {
        let text = r#"{"k": 2, "monomials": [[0,1,1],[1,0,1],[1,1,0]]}"#;
        let f: MonomialFile = serde_json::from_str(text).unwrap();
        assert_eq!(f.to_map().unwrap(), MonomialMap::cremona());
        assert_eq!(MonomialMap::cremona().to_file().unwrap(), f);
    }

    #[test]
    fn frobenius_models() {
        let f = frobenius_model(5, 1).unwrap();
        assert_eq!(f.actions(), &[scalar(1), scalar(5)]);
        let f = frobenius_model(3, 3).unwrap();
        assert_eq!(f.actions(), &[scalar(1), scalar(3), scalar(9), scalar(27)]);
        let f = frobenius_model(7, 2).unwrap();
        assert_eq!(f.pullback_class(1, &[q(1)]).unwrap(), vec![q(7)]);
        assert_eq!(f.pushforward_class(1, &[q(1)]).unwrap(), vec![q(7)]);
        assert_eq!(f.pushforward_class(0, &[q(1)]).unwrap(), vec![q(49)]);
        assert!(f.is_adjoint_consistent());
        assert!(frobenius_model(1, 2).is_err());
    }

    #[test]
    fn identity_correspondence() {
        let l = GradedLattice::new(
            2,
            vec![1, 2, 1],
            vec![
                QMatrix::identity(1),
                QMatrix::from_i64(&[&[2, 1], &[1, 1]]),
                QMatrix::identity(1),
            ],
            None,
        )
        .unwrap();
        let c = identity_model(l).unwrap();
        let v = vec![frac(1, 2), q(-3)];
        assert_eq!(c.pullback_class(1, &v).unwrap(), v);
        assert_eq!(c.pushforward_class(1, &v).unwrap(), v);
    }

    #[test]
    fn products() {
        let f = product_model(&frobenius_model(5, 1).unwrap(), &frobenius_model(5, 2).unwrap()).unwrap();
        assert_eq!(f.lattice().ranks(), &[1, 2, 2, 1]);
        for p in 0..=3 {
            let qp = Q::from_integer(BigInt::from(5u64.pow(p as u32)));
            assert_eq!(f.action(p), &QMatrix::identity(f.lattice().rank(p)).scale(&qp));
        }
        assert!(f.is_adjoint_consistent());
        // ample H^1 = H_Y + H_Z, H^3 = 3 H_Y H_Z^2
        assert_eq!(f.lattice().ample(1), &vec![q(1), q(1)]);
        assert_eq!(f.lattice().ample(3), &vec![q(3)]);

        let id = identity_model(GradedLattice::projective_space(1)).unwrap();
        let ii = product_model(&id, &id).unwrap();
        assert!((0..=2).all(|p| ii.action(p) == &QMatrix::identity(ii.lattice().rank(p))));
    }

    #[test]
    fn product_spectra() {
        let g = GradedMatrixCorr::new(GradedLattice::projective_space(1), vec![scalar(1), scalar(2)], true, vec![]).unwrap();
        let h = GradedMatrixCorr::new(GradedLattice::projective_space(1), vec![scalar(1), scalar(3)], true, vec![]).unwrap();
        let f = product_model(&g, &h).unwrap();
        assert_eq!(f.action(1), &QMatrix::diagonal(&[q(3), q(2)]));
        assert_eq!(f.action(2), &scalar(6));
    }

    #[test]
    fn model_file_round_trip() {
        let f = product_model(&frobenius_model(2, 1).unwrap(), &frobenius_model(2, 1).unwrap()).unwrap();
        let text = serde_json::to_string(&ModelFile::from_model(&f)).unwrap();
        let back: ModelFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_model().unwrap(), f);
        let hand = r#"{"k": 1, "ranks": [1, 1], "pairings": [[["1"]], [["1"]]],
                       "actions": [[["1"]], [["4"]]]}"#;
        let c = serde_json::from_str::<ModelFile>(hand).unwrap().to_model().unwrap();
        assert!(c.is_functorial());
        assert_eq!(c.action(1), &scalar(4));
    }

    #[test]
    fn bad_actions_are_rejected() {
        let l = GradedLattice::projective_space(2);
        assert!(matches!(
            GradedMatrixCorr::new(l.clone(), vec![scalar(1), QMatrix::identity(2), scalar(1)], true, vec![]),
            Err(CorrError::ActionShape { i: 1, rank: 1 })
        ));
        let c = frobenius_model(3, 2).unwrap();
        assert!(matches!(c.pullback_class(1, &[q(1), q(2)]), Err(CorrError::VectorLength { .. })));
    }

    fn monomial_strategy() -> impl Strategy<Value = MonomialMap> {
        (1usize..=3, 1u64..=4)
            .prop_flat_map(|(k, d)| {
                let row = proptest::collection::vec(0u64..=d, k);
                (Just((k, d)), proptest::collection::vec(row, k + 1))
            })
            .prop_filter_map("homogeneous and dominant", |((k, d), rows)| {
                let exps: Vec<Vec<u64>> = rows
                    .into_iter()
                    .filter_map(|mut r| {
                        let s: u64 = r.iter().sum();
                        (s <= d).then(|| {
                            r.push(d - s);
                            r
                        })
                    })
                    .collect();
                (exps.len() == k + 1).then(|| MonomialMap::from_u64(k, &exps).ok()).flatten()
            })
    }

    fn same_k_triple() -> impl Strategy<Value = (MonomialMap, MonomialMap, MonomialMap)> {
        (monomial_strategy(), monomial_strategy(), monomial_strategy())
            .prop_filter("same k", |(a, b, c)| a.k() == b.k() && b.k() == c.k())
    }

    fn square_model(n: usize) -> impl Strategy<Value = (QMatrix, QMatrix)> {
        let entries = proptest::collection::vec(-5i64..=5, n * n);
        (entries.clone(), entries)
            .prop_map(move |(p, a)| {
                (
                    QMatrix::from_fn(n, n, |i, j| q(p[i * n + j])),
                    QMatrix::from_fn(n, n, |i, j| q(a[i * n + j])),
                )
            })
            .prop_filter("nondegenerate pairing", |(p, _)| !p.det().is_zero())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn composition_is_associative((f, g, h) in same_k_triple()) {
            let left = compose_monomial(&compose_monomial(&f, &g).unwrap(), &h).unwrap();
            let right = compose_monomial(&f, &compose_monomial(&g, &h).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn torus_matrix_is_multiplicative((f, g, _h) in same_k_triple()) {
            let fg = compose_monomial(&f, &g).unwrap();
            prop_assert_eq!(fg.torus_matrix(), &f.torus_matrix() * &g.torus_matrix());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn projection_formula((p, a) in square_model(4), u in proptest::collection::vec(-9i64..=9, 4), w in proptest::collection::vec(-9i64..=9, 4)) {
            // k = 3 with N^1, N^2 of rank 4 paired by p
            let l = GradedLattice::new(
                3,
                vec![1, 4, 4, 1],
                vec![QMatrix::identity(1), p.clone(), p.transpose(), QMatrix::identity(1)],
                None,
            ).unwrap();
            let a2 = &a.transpose() + &QMatrix::identity(4);
            let c = GradedMatrixCorr::new(l, vec![scalar(1), a, a2, scalar(3)], true, vec![]).unwrap();
            let u: QVector = u.into_iter().map(q).collect();
            let w: QVector = w.into_iter().map(q).collect();
            let lhs = c.lattice().intersect(1, &c.pullback_class(1, &u).unwrap(), &w).unwrap();
            let rhs = c.lattice().intersect(1, &u, &c.pushforward_class(2, &w).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert!(c.is_adjoint_consistent());
        }
    }
}

//! Dynamical degrees, spectral radii and the property checks that relate
//! them.
//!
//! `lambda_i` is estimated from exact intersection (or degree) sequences
//! `<(f^n)^* H^i, H^(k-i)>`; `chi_(2i)` is the spectral radius of the action
//! on `N^i`. Estimates keep their full convergence trace.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corr::{self, frobenius_model, CorrError, GradedMatrixCorr, MonomialMap};
use crate::counting::CountSequence;
use crate::cyclelattice::QVector;
use crate::linalg::{dot, fmt_rational, to_f64, QMatrix, Q};
use crate::roots::{self, RootError};
use crate::verdict::{round15, Verdict};
use crate::zeta::{self, Side, Weight, ZetaError};

/// Relative tolerance for comparisons that pass through the root solver.
pub const REL_TOL: f64 = 1e-6;
/// Relative slack in the log-concavity check.
pub const LOG_CONCAVITY_TOL: f64 = 1e-9;
/// Relative tolerance for truncated limsup estimators.
pub const LIMSUP_TOL: f64 = 0.05;
/// Tolerance for degree-growth estimates against a closed form.
pub const GROWTH_TOL: f64 = 0.02;
/// Largest `n` for trace sequences.
pub const TRACE_N_MAX: usize = 500;
/// Smallest spectral radius accepted by [`trace_limsup`].
pub const TRACE_SP_MIN: f64 = 1.05;
/// Largest search range for [`near_identity_powers`].
pub const K_MAX_LIMIT: u64 = 10_000_000;
/// Default number of iterates for intersection sequences.
pub const DEFAULT_ITERS: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DyndegError {
    #[error("sequence has {0} terms, at least 6 needed")]
    TooShort(usize),
    #[error("term {n} is {value}, but growth sequences must be positive")]
    NonPositive { n: usize, value: String },
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is singular")]
    Singular,
    #[error("p = {p} outside 0..={k}")]
    Degree { p: usize, k: usize },
    #[error("spectral radius {0} is below {TRACE_SP_MIN}")]
    Precondition(f64),
    #[error("{what} = {value} outside the allowed range")]
    Guard { what: &'static str, value: String },
    #[error("|mu| = {0} is not 1")]
    NotUnitModulus(f64),
    #[error("model is not functorial and has no per-n actions")]
    NotFunctorial,
    #[error("bases do not match the pairing: {0}")]
    Basis(String),
    #[error(transparent)]
    Roots(#[from] RootError),
    #[error(transparent)]
    Corr(#[from] CorrError),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
}

/// Natural logarithm of a positive big integer.
fn ln_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().expect("in range").ln()
    } else {
        let shift = bits - 64;
        (x >> shift).to_f64().expect("64 bits").ln() + shift as f64 * std::f64::consts::LN_2
    }
}

fn ln_q(x: &Q) -> f64 {
    ln_big(&x.numer().abs()) - ln_big(x.denom())
}

/// Maximum modulus of the eigenvalues of `m`.
pub fn spectral_radius(m: &QMatrix) -> Result<f64, DyndegError> {
    if !m.is_square() || m.rows() == 0 {
        return Err(DyndegError::NotSquare);
    }
    if m.rows() == 1 {
        return Ok(to_f64(&m.get(0, 0).abs()));
    }
    let poly = m.charpoly().clear_denominators().squarefree_part();
    Ok(roots::roots(&poly)?
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}

/// Eigenvalue moduli with multiplicity, largest first.
fn eigen_moduli(m: &QMatrix) -> Result<Vec<f64>, DyndegError> {
    let poly = m.charpoly().clear_denominators();
    let mut out = Vec::with_capacity(m.rows());
    for (part, mult) in poly.squarefree_decomposition() {
        for z in roots::roots(&part)? {
            out.extend(std::iter::repeat_n(z.norm(), mult as usize));
        }
    }
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// Geometric mean of one exact cycle of ratios.
    Periodic { period: usize },
    /// Largest root modulus of a confirmed linear recurrence of this order.
    Recurrence { order: usize },
    /// Geometric mean of the last four ratios.
    TrailingRatios,
}

/// How a growth-rate limit was estimated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub quantity: String,
    /// `s_(n+1) / s_n`.
    pub ratios: Vec<f64>,
    /// `s_n^(1/n)`.
    pub nth_roots: Vec<f64>,
    pub estimator: Estimator,
    /// Inclusive 1-based range of `n` the estimator used.
    pub window: (usize, usize),
    #[serde(rename = "final")]
    pub final_value: f64,
    /// The exact common ratio of a geometric tail.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    /// Relative change between the 4-ratio and 2-ratio means.
    pub window_sensitivity: f64,
}

/// Growth rate of a positive sequence `s_1, s_2, ...`.
///
/// If the exact ratio sequence ends in three identical cycles of some
/// period `P`, the result is the geometric mean over one cycle. Otherwise,
/// if the sequence satisfies a linear recurrence of order `L` with
/// `2L + 2 <= len`, it is the largest root modulus of that recurrence.
/// Failing both, it is the geometric mean of the last four ratios.
pub fn lambda_estimate(seq: &[Q]) -> Result<(f64, ConvergenceTrace), DyndegError> {
    let len = seq.len();
    if len < 6 {
        return Err(DyndegError::TooShort(len));
    }
    if let Some(n) = seq.iter().position(|s| !s.is_positive()) {
        return Err(DyndegError::NonPositive {
            n: n + 1,
            value: fmt_rational(&seq[n]),
        });
    }
    let exact: Vec<Q> = seq.windows(2).map(|w| &w[1] / &w[0]).collect();
    let logs: Vec<f64> = seq.iter().map(ln_q).collect();
    let ratios: Vec<f64> = exact.iter().map(to_f64).collect();
    let nth_roots: Vec<f64> = logs
        .iter()
        .enumerate()
        .map(|(i, l)| (l / (i + 1) as f64).exp())
        .collect();
    let m = exact.len();
    let period = (1..=m / 3).find(|&p| {
        let tail = &exact[m - 3 * p..];
        (0..2 * p).all(|t| tail[t] == tail[t + p])
    });
    let mean = |span: usize| ((logs[len - 1] - logs[len - 1 - span]) / span as f64).exp();
    let recurrence = match period {
        Some(_) => None,
        None => recurrence_radius(seq)?,
    };
    let (estimator, span) = match (period, recurrence) {
        (Some(p), _) => (Estimator::Periodic { period: p }, p),
        (None, Some((order, _))) => (Estimator::Recurrence { order }, len - 1),
        (None, None) => (Estimator::TrailingRatios, 4),
    };
    let final_value = match (period, recurrence) {
        (Some(1), _) => to_f64(&exact[m - 1]),
        (None, Some((_, r))) => r,
        _ => mean(span),
    };
    let sensitivity = match period {
        Some(_) => 0.0,
        None => ((mean(4) - mean(2)) / final_value).abs(),
    };
    let trace = ConvergenceTrace {
        quantity: String::new(),
        ratios: ratios.into_iter().map(round15).collect(),
        nth_roots: nth_roots.into_iter().map(round15).collect(),
        estimator,
        window: (len - span, len),
        final_value: round15(final_value),
        exact: (period == Some(1)).then(|| fmt_rational(&exact[m - 1])),
        window_sensitivity: round15(sensitivity),
    };
    Ok((final_value, trace))
}

/// Order and largest root modulus of the minimal recurrence of `seq`, if
/// it is confirmed by two spare terms.
fn recurrence_radius(seq: &[Q]) -> Result<Option<(usize, f64)>, DyndegError> {
    let Ok(poly) = zeta::min_recurrence(seq) else {
        return Ok(None);
    };
    let order = poly.degree().unwrap_or(0);
    if order == 0 || 2 * order + 2 > seq.len() {
        return Ok(None);
    }
    let radius = roots::roots(&poly.squarefree_part())?
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    Ok(Some((order, radius)))
}

/// Integer-sequence convenience wrapper.
pub fn lambda_estimate_int(seq: &[BigInt]) -> Result<(f64, ConvergenceTrace), DyndegError> {
    let q: Vec<Q> = seq.iter().cloned().map(Q::from_integer).collect();
    lambda_estimate(&q)
}

/// `lambda_p` of a monomial map with torus matrix `a`: the product of the
/// `p` largest eigenvalue moduli.
pub fn lambda_monomial(a: &QMatrix, p: usize) -> Result<f64, DyndegError> {
    if !a.is_square() {
        return Err(DyndegError::NotSquare);
    }
    let k = a.rows();
    if p > k {
        return Err(DyndegError::Degree { p, k });
    }
    let det = a.det();
    if det.is_zero() {
        return Err(DyndegError::Singular);
    }
    if p == 0 {
        return Ok(1.0);
    }
    if p == k {
        return Ok(to_f64(&det.abs()));
    }
    Ok(eigen_moduli(a)?[..p].iter().product())
}

/// `lambda_0..lambda_k` of a monomial map.
pub fn monomial_lambdas(a: &QMatrix) -> Result<Vec<f64>, DyndegError> {
    (0..=a.rows()).map(|p| lambda_monomial(a, p)).collect()
}

/// Exact `<(f^n)^* H^i, H^(k-i)>` for `n = 1..=n_max` (fewer if the model
/// has fewer iterates).
pub fn intersection_sequence(c: &GradedMatrixCorr, i: usize, n_max: usize) -> Vec<Q> {
    let l = c.lattice();
    let h = l.ample(i);
    let dual = l.ample(l.k() - i);
    let pair = |v: &QVector| dot(v, &l.pairing(i).mul_vec(dual));
    let n_max = n_max.min(c.iterates_available());
    if c.is_functorial() {
        let mut v = h.clone();
        (0..n_max)
            .map(|_| {
                v = c.action(i).mul_vec(&v);
                pair(&v)
            })
            .collect()
    } else {
        (1..=n_max)
            .map(|n| pair(&c.iterate_action(n, i).expect("n within range").mul_vec(h)))
            .collect()
    }
}

/// `chi_(2i)`: spectral radius of `f^*` on `N^i`, or for non-functorial
/// models a growth estimate of `||(f^n)^*||`.
pub fn chi(c: &GradedMatrixCorr, i: usize) -> Result<(f64, Option<ConvergenceTrace>), DyndegError> {
    if c.is_functorial() {
        return Ok((spectral_radius(c.action(i))?, None));
    }
    if c.per_n().is_empty() {
        return Err(DyndegError::NotFunctorial);
    }
    let norms: Vec<Q> = (1..=c.iterates_available())
        .map(|n| c.iterate_action(n, i).expect("in range").norm_l1())
        .collect();
    let (v, mut t) = lambda_estimate(&norms)?;
    t.quantity = format!("chi_{}", 2 * i);
    Ok((v, Some(t)))
}

/// `chi` in cohomological degree `degree`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chi {
    pub degree: usize,
    pub value: f64,
}

/// Outcome of one property check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub verdict: Verdict,
    pub value: f64,
    pub reference: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckResult {
    fn new(name: &str, verdict: Verdict, value: f64, reference: f64, tolerance: f64) -> Self {
        CheckResult {
            name: name.into(),
            verdict,
            value: round15(value),
            reference: round15(reference),
            tolerance,
            witness: None,
        }
    }

    fn with_witness(mut self, w: Option<String>) -> Self {
        self.witness = w;
        self
    }
}

/// `lambda_i lambda_(i+2) <= lambda_(i+1)^2` for all `i`.
pub fn check_log_concavity(lams: &[f64]) -> CheckResult {
    if lams.len() < 3 {
        return CheckResult::new("log_concavity", Verdict::Indeterminate, f64::NAN, 1.0, LOG_CONCAVITY_TOL)
            .with_witness(Some("need at least three degrees".into()));
    }
    let mut worst = 0.0f64;
    let mut witness = None;
    for i in 0..lams.len() - 2 {
        let (a, b, c) = (lams[i], lams[i + 1], lams[i + 2]);
        let r = a * c / (b * b);
        worst = worst.max(r);
        if a * c > b * b + LOG_CONCAVITY_TOL * b * b && witness.is_none() {
            witness = Some(format!("lambda_{i}, lambda_{}, lambda_{} = {a}, {b}, {c}", i + 1, i + 2));
        }
    }
    CheckResult::new("log_concavity", Verdict::from_bool(witness.is_none()), worst, 1.0, LOG_CONCAVITY_TOL)
        .with_witness(witness)
}

/// `max_(i+j=p) a_i b_j`.
fn convolution_max(a: &[f64], b: &[f64], p: usize) -> f64 {
    (0..a.len())
        .filter(|&i| p >= i && p - i < b.len())
        .map(|i| a[i] * b[p - i])
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `lambda_p(g x h) = max_(i+j=p) lambda_i(g) lambda_j(h)`.
pub fn check_product_formula(g: &[f64], h: &[f64], f: &[f64]) -> CheckResult {
    let mut worst = 0.0f64;
    let mut witness = None;
    if f.len() + 1 != g.len() + h.len() {
        return CheckResult::new("product_formula", Verdict::Fail, f64::NAN, 0.0, REL_TOL)
            .with_witness(Some(format!("{} product degrees for factors of {} and {}", f.len(), g.len(), h.len())));
    }
    for (p, &fp) in f.iter().enumerate() {
        let want = convolution_max(g, h, p);
        let err = ((fp - want) / want).abs();
        worst = worst.max(err);
        if err > REL_TOL && witness.is_none() {
            witness = Some(format!("lambda_{p} = {fp}, expected {want}"));
        }
    }
    CheckResult::new("product_formula", Verdict::from_bool(witness.is_none()), worst, 0.0, REL_TOL)
        .with_witness(witness)
}

/// `chi_d^2 <= max_(p+q=d) lambda_p lambda_q` for each modeled degree `d`.
pub fn check_dinh(chis: &[Chi], lams: &[f64]) -> CheckResult {
    let mut worst = 0.0f64;
    let mut witness = None;
    for c in chis {
        let bound = convolution_max(lams, lams, c.degree);
        let r = c.value * c.value / bound;
        worst = worst.max(r);
        if r > 1.0 + REL_TOL && witness.is_none() {
            witness = Some(format!("chi_{}^2 = {} > {bound}", c.degree, c.value * c.value));
        }
    }
    CheckResult::new("dinh_inequality", Verdict::from_bool(witness.is_none()), worst, 1.0, REL_TOL)
        .with_witness(witness)
}

/// `max_i chi_i = max_i lambda_i`.
pub fn check_max_equality(chis: &[Chi], lams: &[f64]) -> CheckResult {
    let mc = chis.iter().map(|c| c.value).fold(f64::NEG_INFINITY, f64::max);
    let ml = lams.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let err = ((mc - ml) / ml).abs();
    let ok = err <= REL_TOL;
    CheckResult::new("max_chi_equals_max_lambda", Verdict::from_bool(ok), mc, ml, REL_TOL)
        .with_witness((!ok).then(|| format!("max chi = {mc}, max lambda = {ml}")))
}

/// `chi_(2i) >= lambda_i` wherever both are modeled.
pub fn check_chi_dominates(chis: &[Chi], lams: &[f64]) -> CheckResult {
    let mut worst = f64::INFINITY;
    let mut witness = None;
    for c in chis.iter().filter(|c| c.degree % 2 == 0 && c.degree / 2 < lams.len()) {
        let l = lams[c.degree / 2];
        let r = c.value / l;
        worst = worst.min(r);
        if r < 1.0 - REL_TOL && witness.is_none() {
            witness = Some(format!("chi_{} = {} < lambda_{} = {l}", c.degree, c.value, c.degree / 2));
        }
    }
    CheckResult::new("chi_dominates_lambda", Verdict::from_bool(witness.is_none()), worst, 1.0, REL_TOL)
        .with_witness(witness)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyndegReport {
    pub lambdas: Vec<f64>,
    pub chis: Vec<Chi>,
    pub entropy: f64,
    /// `"chi"`, or `"lambda"` when no cohomological action is modeled.
    pub entropy_source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degrees: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda1_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unstable: Option<bool>,
    pub diagnostics: Vec<ConvergenceTrace>,
    pub checks: Vec<CheckResult>,
    pub verdict: Verdict,
}

/// `log max chi`, or `log max lambda` when `chis` is empty.
pub fn algebraic_entropy(report: &DyndegReport) -> f64 {
    let m = if report.chis.is_empty() {
        report.lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    } else {
        report.chis.iter().map(|c| c.value).fold(f64::NEG_INFINITY, f64::max)
    };
    m.ln()
}

fn finish(mut r: DyndegReport) -> DyndegReport {
    r.entropy = round15(algebraic_entropy(&r));
    r.lambdas = r.lambdas.iter().map(|&x| round15(x)).collect();
    r.chis = r.chis.iter().map(|c| Chi { degree: c.degree, value: round15(c.value) }).collect();
    r.checks.sort_by(|a, b| a.name.cmp(&b.name));
    r.verdict = Verdict::all(r.checks.iter().map(|c| c.verdict));
    r
}

/// Report for a monomial map: closed-form `lambda_p`, the degree sequence
/// and its growth estimate, and the instability flag `deg(f^2) < deg(f)^2`.
pub fn monomial_report(f: &MonomialMap, iters: usize) -> Result<DyndegReport, DyndegError> {
    let a = f.torus_matrix();
    let lambdas = monomial_lambdas(&a)?;
    let degs = corr::iterate_degrees(f, iters)?.degs;
    let (est, mut trace) = lambda_estimate_int(&degs)?;
    trace.quantity = "lambda_1".into();
    let unstable = degs.len() >= 2 && degs[1] < &degs[0] * &degs[0];
    let lam1 = lambdas[1];
    let growth = ((est - lam1) / lam1).abs();
    let checks = vec![
        check_log_concavity(&lambdas),
        CheckResult::new("lambda1_growth_estimate", Verdict::from_bool(growth <= GROWTH_TOL), est, lam1, GROWTH_TOL),
    ];
    Ok(finish(DyndegReport {
        lambdas,
        chis: Vec::new(),
        entropy: 0.0,
        entropy_source: "lambda".into(),
        degrees: Some(degs.iter().map(ToString::to_string).collect()),
        lambda1_estimate: Some(round15(est)),
        unstable: Some(unstable),
        diagnostics: vec![trace],
        checks,
        verdict: Verdict::Pass,
    }))
}

/// Dynamical degrees of a lattice model from its intersection sequences.
pub fn model_lambdas(c: &GradedMatrixCorr, iters: usize) -> Result<(Vec<f64>, Vec<ConvergenceTrace>), DyndegError> {
    let mut lams = Vec::with_capacity(c.k() + 1);
    let mut traces = Vec::with_capacity(c.k() + 1);
    for i in 0..=c.k() {
        let (v, mut t) = lambda_estimate(&intersection_sequence(c, i, iters))?;
        t.quantity = format!("lambda_{i}");
        lams.push(v);
        traces.push(t);
    }
    Ok((lams, traces))
}

/// `chi_0, chi_2, ..., chi_(2k)` of a lattice model.
pub fn model_chis(c: &GradedMatrixCorr) -> Result<(Vec<Chi>, Vec<ConvergenceTrace>), DyndegError> {
    let mut chis = Vec::with_capacity(c.k() + 1);
    let mut traces = Vec::new();
    for i in 0..=c.k() {
        let (v, t) = chi(c, i)?;
        chis.push(Chi { degree: 2 * i, value: v });
        traces.extend(t);
    }
    Ok((chis, traces))
}

/// Report for a lattice model with the checks that apply to any model.
pub fn model_report(c: &GradedMatrixCorr, iters: usize) -> Result<DyndegReport, DyndegError> {
    let (lambdas, mut diagnostics) = model_lambdas(c, iters)?;
    let (chis, chi_traces) = model_chis(c)?;
    diagnostics.extend(chi_traces);
    let mut checks = vec![
        check_dinh(&chis, &lambdas),
        check_max_equality(&chis, &lambdas),
        check_chi_dominates(&chis, &lambdas),
        CheckResult::new("projection_formula", Verdict::from_bool(c.is_adjoint_consistent()), 0.0, 0.0, 0.0),
    ];
    if lambdas.len() >= 3 {
        checks.push(check_log_concavity(&lambdas));
    }
    Ok(finish(DyndegReport {
        lambdas,
        chis,
        entropy: 0.0,
        entropy_source: "chi".into(),
        degrees: None,
        lambda1_estimate: None,
        unstable: None,
        diagnostics,
        checks,
        verdict: Verdict::Pass,
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceLimsup {
    pub estimate: f64,
    pub best_n: usize,
    pub spectral_radius: f64,
    pub window: (usize, usize),
    pub verdict: Verdict,
    /// `|Tr M^n|^(1/n)` for `n = 1..=n_max`.
    pub nth_roots: Vec<f64>,
    /// Exact traces, as rational strings.
    pub traces: Vec<String>,
}

/// `limsup |Tr M^n|^(1/n)` over the trailing half `ceil(n_max/2)..=n_max`,
/// compared with the spectral radius within 5%.
///
/// Early terms are excluded because `|Tr M|` can exceed `sp(M)` by a
/// factor up to the rank (`[[2,1],[1,1]]` has trace 3).
pub fn trace_limsup(m: &QMatrix, n_max: usize) -> Result<TraceLimsup, DyndegError> {
    if !(2..=TRACE_N_MAX).contains(&n_max) {
        return Err(DyndegError::Guard {
            what: "n_max",
            value: n_max.to_string(),
        });
    }
    let sp = spectral_radius(m)?;
    if sp < TRACE_SP_MIN {
        return Err(DyndegError::Precondition(sp));
    }
    let traces = zeta::power_sums(&m.charpoly().clear_denominators(), n_max)?;
    let nth_roots: Vec<f64> = traces
        .iter()
        .enumerate()
        .map(|(i, t)| {
            if t.is_zero() {
                0.0
            } else {
                (ln_q(t) / (i + 1) as f64).exp()
            }
        })
        .collect();
    let start = n_max.div_ceil(2);
    let (best_n, estimate) = (start..=n_max)
        .map(|n| (n, nth_roots[n - 1]))
        .fold((start, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    Ok(TraceLimsup {
        estimate: round15(estimate),
        best_n,
        spectral_radius: round15(sp),
        window: (start, n_max),
        verdict: Verdict::from_bool(((estimate - sp) / sp).abs() <= LIMSUP_TOL),
        nth_roots: nth_roots.into_iter().map(round15).collect(),
        traces: traces.iter().map(fmt_rational).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    Found,
    BoundNotReached,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearIdentity {
    pub ks: Vec<u64>,
    /// `ceil((8/eps)^m)`, saturating.
    pub pigeonhole_bound: u64,
    pub status: SearchStatus,
}

/// All `k <= k_max` with `max_i |mu_i^k - 1| < eps`.
pub fn near_identity_powers(mus: &[Complex64], eps: f64, k_max: u64) -> Result<NearIdentity, DyndegError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(DyndegError::Guard { what: "eps", value: eps.to_string() });
    }
    if k_max == 0 || k_max > K_MAX_LIMIT {
        return Err(DyndegError::Guard { what: "k_max", value: k_max.to_string() });
    }
    if let Some(mu) = mus.iter().find(|mu| (mu.norm() - 1.0).abs() > 1e-12) {
        return Err(DyndegError::NotUnitModulus(mu.norm()));
    }
    // |mu^k - 1| = 2 |sin(pi k theta)| with theta = arg(mu) / 2 pi
    let thetas: Vec<f64> = mus.iter().map(|mu| mu.arg() / (2.0 * PI)).collect();
    let ks: Vec<u64> = (1..=k_max)
        .filter(|&k| {
            thetas.iter().all(|t| {
                let f = (k as f64 * t).rem_euclid(1.0);
                2.0 * (PI * f).sin().abs() < eps
            })
        })
        .collect();
    let bound = (8.0 / eps).powi(mus.len() as i32).ceil();
    let pigeonhole_bound = if bound >= u64::MAX as f64 { u64::MAX } else { bound as u64 };
    let status = if !ks.is_empty() {
        SearchStatus::Found
    } else if k_max < pigeonhole_bound {
        SearchStatus::BoundNotReached
    } else {
        SearchStatus::Fail
    };
    Ok(NearIdentity { ks, pigeonhole_bound, status })
}

/// Constants in `C1 S <= ||f^*|| <= C2 S`, `S = sum_(p,q) |<f^* a_p, b_q>|`.
///
/// The norm is `||a|| = sum_q |<a, b_q>|`, i.e. `||L a||_1` where row `q`
/// of `L` is `(P b_q)^T`. Then `1/C1 = sum_p ||a_p||`, and `C2` bounds
/// `max_p |x_p|` over `||sum_p x_p a_p|| <= 1`, which is the largest entry
/// of `(L A)^-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormConstants {
    pub c1: Q,
    pub c2: Q,
    l: QMatrix,
    l_inv: QMatrix,
    alphas: Vec<QVector>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormSandwich {
    pub lower: String,
    pub norm: String,
    pub upper: String,
    pub verdict: Verdict,
}

pub fn norm_constants(alphas: &[QVector], betas: &[QVector], pairing: &QMatrix) -> Result<NormConstants, DyndegError> {
    let m = pairing.rows();
    if !pairing.is_square() || alphas.len() != m || betas.len() != m {
        return Err(DyndegError::Basis(format!("need {m} alphas and {m} betas for a {m}x{m} pairing")));
    }
    if alphas.iter().chain(betas).any(|v| v.len() != m) {
        return Err(DyndegError::Basis("vector length differs from the pairing size".into()));
    }
    let l = QMatrix::from_rows(betas.iter().map(|b| pairing.mul_vec(b)).collect()).expect("equal lengths");
    let a = QMatrix::from_cols(alphas).expect("equal lengths");
    let l_inv = l.inverse().ok_or_else(|| DyndegError::Basis("pairing against the betas is degenerate".into()))?;
    let la_inv = (&l * &a)
        .inverse()
        .ok_or_else(|| DyndegError::Basis("alphas are not a basis".into()))?;
    let norm = |v: &QVector| -> Q { l.mul_vec(v).iter().map(Signed::abs).sum() };
    let total: Q = alphas.iter().map(norm).sum();
    Ok(NormConstants {
        c1: total.recip(),
        c2: la_inv.max_abs(),
        l,
        l_inv,
        alphas: alphas.to_vec(),
    })
}

impl NormConstants {
    /// Operator norm of `f` for the pairing norm.
    pub fn operator_norm(&self, f: &QMatrix) -> Q {
        (&(&self.l * f) * &self.l_inv).norm_l1()
    }

    /// `sum_(p,q) |<f a_p, b_q>|`.
    pub fn pairing_sum(&self, f: &QMatrix) -> Q {
        self.alphas
            .iter()
            .map(|a| self.l.mul_vec(&f.mul_vec(a)).iter().map(Signed::abs).sum::<Q>())
            .sum()
    }

    pub fn evaluate(&self, f: &QMatrix) -> NormSandwich {
        let s = self.pairing_sum(f);
        let lower = &self.c1 * &s;
        let norm = self.operator_norm(f);
        let upper = &self.c2 * &s;
        NormSandwich {
            verdict: Verdict::from_bool(lower <= norm && norm <= upper),
            lower: fmt_rational(&lower),
            norm: fmt_rational(&norm),
            upper: fmt_rational(&upper),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeilDyndeg {
    pub q: u64,
    pub k: usize,
    /// Exact `lambda_i`.
    pub lambdas: Vec<String>,
    /// Exact `chi_(2i)`.
    pub chis: Vec<String>,
    /// Denominator roots of the zeta function of `P^k` from point counts.
    pub zeta_roots: Vec<String>,
    pub checks: Vec<CheckResult>,
    pub verdict: Verdict,
}

/// Frobenius on `N^*(P^k)` over `F_q`: `lambda_i = chi_(2i) = q^i` exactly,
/// cross-checked against the zeta function of `P^k` rebuilt from counts.
pub fn weil_from_dyndeg(q: u64, k: usize) -> Result<WeilDyndeg, DyndegError> {
    let model = frobenius_model(q, k)?;
    let qi: Vec<Q> = (0..=k).map(|i| Q::from_integer(num_traits::pow(BigInt::from(q), i))).collect();
    let mut lambdas = Vec::new();
    for i in 0..=k {
        let (_, t) = lambda_estimate(&intersection_sequence(&model, i, 8))?;
        lambdas.push(t.exact.unwrap_or_else(|| "inexact".into()));
    }
    let chis: Vec<String> = (0..=k).map(|i| fmt_rational(model.action(i).get(0, 0))).collect();
    let want: Vec<String> = qi.iter().map(fmt_rational).collect();
    let lam_ok = lambdas == want;
    let chi_ok = chis == want;

    // N_n(P^k) = sum_i q^(i n), enough terms to pin k + 1 roots
    let terms = 2 * (k + 1);
    let counts: Option<Vec<u64>> = (1..=terms as u32)
        .map(|n| {
            (0..=k as u32).try_fold(0u64, |acc, i| q.checked_pow(i * n).and_then(|x| acc.checked_add(x)))
        })
        .collect();
    let (zeta_roots, zeta_verdict) = match counts {
        Some(counts) => {
            let z = zeta::zeta_from_counts(&CountSequence { q, counts }, None)?;
            let roots: Vec<String> = z
                .factors
                .iter()
                .filter(|f| f.side == Side::Denominator)
                .map(|f| (-f.poly.coeff(1)).to_string())
                .collect();
            let ok = !z.numerator().is_zero()
                && z.numerator().degree() == Some(0)
                && z.factors.iter().enumerate().all(|(i, f)| {
                    f.side == Side::Denominator
                        && f.weight == Weight::Pure(2 * i as u32)
                        && f.multiplicity == 1
                        && f.poly.degree() == Some(1)
                })
                && roots == want;
            (roots, Verdict::from_bool(ok))
        }
        None => (Vec::new(), Verdict::Indeterminate),
    };
    let checks = vec![
        CheckResult::new("lambda_i_equals_q_i", Verdict::from_bool(lam_ok), 0.0, 0.0, 0.0)
            .with_witness((!lam_ok).then(|| format!("lambdas {lambdas:?}"))),
        CheckResult::new("chi_2i_equals_q_i", Verdict::from_bool(chi_ok), 0.0, 0.0, 0.0)
            .with_witness((!chi_ok).then(|| format!("chis {chis:?}"))),
        CheckResult::new("zeta_weights_match", zeta_verdict, 0.0, 0.0, 0.0),
    ];
    Ok(WeilDyndeg {
        q,
        k,
        verdict: Verdict::all(checks.iter().map(|c| c.verdict)),
        lambdas,
        chis,
        zeta_roots,
        checks,
    })
}

/// Every property check on the Frobenius model of `P^k` over `F_q`, sorted
/// by name.
pub fn frobenius_suite(q: u64, k: usize) -> Result<Vec<CheckResult>, DyndegError> {
    let model = frobenius_model(q, k)?;
    let report = model_report(&model, DEFAULT_ITERS)?;
    let mut checks = report.checks.clone();
    let expected = k as f64 * (q as f64).ln();
    let err = ((report.entropy - expected) / expected).abs();
    checks.push(CheckResult::new("entropy_k_log_q", Verdict::from_bool(err <= REL_TOL), report.entropy, expected, REL_TOL));
    if k >= 2 {
        // P^k as P^1 x P^(k-1) at the level of lattice data
        let g = frobenius_model(q, 1)?;
        let h = frobenius_model(q, k - 1)?;
        let gl = model_lambdas(&g, DEFAULT_ITERS)?.0;
        let hl = model_lambdas(&h, DEFAULT_ITERS)?.0;
        let fl = model_lambdas(&corr::product_model(&g, &h)?, DEFAULT_ITERS)?.0;
        checks.push(check_product_formula(&gl, &hl, &fl));
    }
    let w = weil_from_dyndeg(q, k)?;
    checks.extend(w.checks);
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(checks)
}

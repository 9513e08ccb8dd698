//! Simultaneous polynomial root finding (Aberth–Ehrlich) in `f64`.
//!
//! Only moduli comparisons downstream consume these roots; every trace and
//! count identity in the crate is checked with exact arithmetic instead.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::poly::IntPoly;

/// Relative backward-error target for accepted roots.
pub const RESIDUAL_TOL: f64 = 1e-12;

const MAX_ITERS: usize = 2000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("the zero polynomial has no isolated roots")]
    ZeroPolynomial,
    #[error("non-finite coefficient")]
    NonFinite,
    #[error("root iteration did not reach residual {RESIDUAL_TOL:e} (worst {worst:e})")]
    NoConvergence { worst: f64 },
}

/// All complex roots with multiplicity, sorted by (modulus, argument).
pub fn roots(poly: &IntPoly) -> Result<Vec<Complex64>, RootError> {
    roots_f64(&poly.to_f64())
}

/// `coeffs` lowest degree first.
pub fn roots_f64(coeffs: &[f64]) -> Result<Vec<Complex64>, RootError> {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(RootError::NonFinite);
    }
    let mut c: Vec<f64> = coeffs.to_vec();
    while c.last() == Some(&0.0) {
        c.pop();
    }
    if c.is_empty() {
        return Err(RootError::ZeroPolynomial);
    }
    let zeros = c.iter().take_while(|&&x| x == 0.0).count();
    let c: Vec<f64> = c[zeros..].to_vec();
    let mut out = vec![Complex64::new(0.0, 0.0); zeros];
    let n = c.len() - 1;
    match n {
        0 => {}
        1 => out.push(Complex64::new(-c[0] / c[1], 0.0)),
        _ => out.extend(aberth(&c)?),
    }
    out.sort_by(|a, b| {
        a.norm()
            .total_cmp(&b.norm())
            .then(a.arg().total_cmp(&b.arg()))
    });
    Ok(out)
}

/// `|p(z)| / sum |a_i| |z|^i`.
pub fn relative_residual(coeffs: &[f64], z: Complex64) -> f64 {
    let (v, _) = horner(coeffs, z);
    let r = z.norm();
    let scale = coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.abs());
    if scale == 0.0 {
        0.0
    } else {
        v.norm() / scale
    }
}

fn horner(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

fn aberth(c: &[f64]) -> Result<Vec<Complex64>, RootError> {
    let n = c.len() - 1;
    // initial circle at the geometric mean of the root moduli
    let radius = (c[0] / c[n]).abs().powf(1.0 / n as f64).max(f64::MIN_POSITIVE);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();
    let mut done = vec![false; n];
    for _ in 0..MAX_ITERS {
        if done.iter().all(|&d| d) {
            break;
        }
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (p, dp) = horner(c, z[k]);
            if p.norm() == 0.0 {
                done[k] = true;
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| Complex64::new(1.0, 0.0) / (z[k] - z[j]))
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                // coincident iterates; nudge off the collision
                z[k] += Complex64::from_polar(radius * 1e-3, k as f64);
                continue;
            }
            z[k] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * z[k].norm() {
                done[k] = true;
            }
        }
    }
    // Newton polish
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(c, *zk);
            if dp.norm() == 0.0 {
                break;
            }
            let next = *zk - p / dp;
            if relative_residual(c, next) <= relative_residual(c, *zk) {
                *zk = next;
            } else {
                break;
            }
        }
    }
    let worst = z
        .iter()
        .map(|&r| relative_residual(c, r))
        .fold(0.0, f64::max);
    if worst > RESIDUAL_TOL {
        return Err(RootError::NoConvergence { worst });
    }
    // snap numerically real roots of a real polynomial onto the axis
    for zk in z.iter_mut() {
        if zk.im.abs() <= 1e-14 * zk.norm().max(1.0) {
            let snapped = Complex64::new(zk.re, 0.0);
            if relative_residual(c, snapped) <= RESIDUAL_TOL {
                *zk = snapped;
            }
        }
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn quadratic_roots() {
        // T^2 + 3T + 5: (-3 +- i sqrt 11) / 2
        let r = roots(&IntPoly::from_i64(&[5, 3, 1])).unwrap();
        let s = 11f64.sqrt() / 2.0;
        assert!(close(r[0], Complex64::new(-1.5, -s), 1e-14));
        assert!(close(r[1], Complex64::new(-1.5, s), 1e-14));
        for z in r {
            assert!((z.norm() - 5f64.sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(roots(&IntPoly::zero()), Err(RootError::ZeroPolynomial));
        assert!(roots(&IntPoly::one()).unwrap().is_empty());
        let r = roots(&IntPoly::from_i64(&[0, 0, -4, 1])).unwrap();
        assert_eq!(r[0], Complex64::new(0.0, 0.0));
        assert_eq!(r[1], Complex64::new(0.0, 0.0));
        assert!(close(r[2], Complex64::new(4.0, 0.0), 1e-15));
    }

    #[test]
    fn cyclotomic_roots_on_unit_circle() {
        // T^12 - 1 and Phi_7
        for p in [
            IntPoly::from_i64(&[-1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1]),
            IntPoly::from_i64(&[1, 1, 1, 1, 1, 1, 1]),
        ] {
            let r = roots(&p).unwrap();
            assert_eq!(r.len(), p.degree().unwrap());
            for z in r {
                assert!((z.norm() - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn weil_type_polynomial_degree_eight() {
        // (T^2 + 3T + 5)^2-free product of four Weil-5 quadratics
        let mut p = IntPoly::one();
        for a in [-4i64, -1, 2, 3] {
            p = &p * &IntPoly::from_i64(&[5, a, 1]);
        }
        let r = roots(&p).unwrap();
        assert_eq!(r.len(), 8);
        for z in r {
            assert!((z.norm() - 5f64.sqrt()).abs() / 5f64.sqrt() < 1e-12);
        }
    }

    #[test]
    fn real_roots_are_real() {
        let r = roots(&IntPoly::from_i64(&[2, -3, 1])).unwrap();
        assert!(r.iter().all(|z| z.im == 0.0));
        assert!(close(r[0], Complex64::new(1.0, 0.0), 1e-15));
        assert!(close(r[1], Complex64::new(2.0, 0.0), 1e-15));
    }
}

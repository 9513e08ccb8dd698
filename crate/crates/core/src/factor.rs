//! Factorization of integer polynomials into irreducibles over `Q`.
//!
//! Numerical roots are grouped into real roots and conjugate pairs; products
//! of groups are tried in order of increasing degree, rounded to integer
//! candidates, and kept only when exact division succeeds. The first divisor
//! found at the smallest degree is irreducible, so the result is the full
//! factorization. Suited to the small degrees (up to ~20) that zeta and
//! characteristic polynomials reach here.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::FromPrimitive;
use thiserror::Error;

use crate::poly::IntPoly;
use crate::roots::{self, RootError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FactorError {
    #[error(transparent)]
    Roots(#[from] RootError),
    #[error("coefficients of a candidate factor exceed f64 integer precision")]
    Precision,
}

/// Irreducible primitive factors with multiplicities, ordered by degree and
/// then by coefficients. The content and sign are dropped.
pub fn factor(poly: &IntPoly) -> Result<Vec<(IntPoly, u32)>, FactorError> {
    let mut out = Vec::new();
    for (part, mult) in poly.squarefree_decomposition() {
        for f in factor_squarefree(&part)? {
            out.push((f, mult));
        }
    }
    out.sort_by(|(a, _), (b, _)| {
        a.degree()
            .cmp(&b.degree())
            .then_with(|| a.coeffs().cmp(b.coeffs()))
    });
    Ok(out)
}

/// Root clusters: a real root or a conjugate pair.
fn atoms(roots: &[Complex64]) -> Vec<Vec<Complex64>> {
    let mut used = vec![false; roots.len()];
    let mut out = Vec::new();
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let z = roots[i];
        if z.im == 0.0 {
            out.push(vec![z]);
            continue;
        }
        let partner = (0..roots.len())
            .filter(|&j| !used[j])
            .min_by(|&a, &b| {
                (roots[a] - z.conj())
                    .norm()
                    .total_cmp(&(roots[b] - z.conj()).norm())
            });
        match partner {
            Some(j) if (roots[j] - z.conj()).norm() <= 1e-6 * z.norm().max(1.0) => {
                used[j] = true;
                out.push(vec![z, roots[j]]);
            }
            _ => out.push(vec![z]),
        }
    }
    out
}

fn candidate(atoms: &[Vec<Complex64>], pick: &[usize]) -> Result<IntPoly, FactorError> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &a in pick {
        for &r in &atoms[a] {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (i, &ci) in c.iter().enumerate() {
                next[i + 1] += ci;
                next[i] -= ci * r;
            }
            c = next;
        }
    }
    let coeffs = c
        .iter()
        .map(|z| {
            let v = z.re.round();
            if v.abs() > 2f64.powi(52) {
                Err(FactorError::Precision)
            } else {
                Ok(BigInt::from_f64(v).expect("finite"))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(IntPoly::new(coeffs))
}

fn factor_squarefree(poly: &IntPoly) -> Result<Vec<IntPoly>, FactorError> {
    let mut rest = poly.primitive();
    let deg = rest.degree().unwrap_or(0);
    if deg <= 1 {
        return Ok(if deg == 1 { vec![rest] } else { vec![] });
    }
    let lead = rest.lead();
    if lead != BigInt::from(1) {
        // T -> T / lead keeps integer structure only for monic input; work
        // with the monic associate lead^(d-1) f(T / lead).
        return factor_nonmonic(&rest);
    }
    let mut atoms = atoms(&roots::roots(&rest)?);
    let mut out = Vec::new();
    let mut target = 1;
    loop {
        let remaining: usize = atoms.iter().map(Vec::len).sum();
        if remaining == 0 {
            break;
        }
        if target * 2 > remaining {
            out.push(rest.clone());
            break;
        }
        match find_subset(&atoms, target, &rest)? {
            Some((pick, factor)) => {
                rest = rest.div_exact(&factor).expect("checked divisor");
                let mut keep = Vec::new();
                for (i, a) in atoms.into_iter().enumerate() {
                    if !pick.contains(&i) {
                        keep.push(a);
                    }
                }
                atoms = keep;
                out.push(factor);
            }
            None => target += 1,
        }
    }
    Ok(out)
}

/// Searches subsets of atoms whose total degree equals `target`.
fn find_subset(
    atoms: &[Vec<Complex64>],
    target: usize,
    rest: &IntPoly,
) -> Result<Option<(Vec<usize>, IntPoly)>, FactorError> {
    fn rec(
        atoms: &[Vec<Complex64>],
        start: usize,
        left: usize,
        pick: &mut Vec<usize>,
        rest: &IntPoly,
    ) -> Result<Option<(Vec<usize>, IntPoly)>, FactorError> {
        if left == 0 {
            let f = candidate(atoms, pick)?;
            if f.degree().is_some() && rest.div_exact(&f).is_some() {
                return Ok(Some((pick.clone(), f)));
            }
            return Ok(None);
        }
        for i in start..atoms.len() {
            if atoms[i].len() > left {
                continue;
            }
            pick.push(i);
            if let Some(hit) = rec(atoms, i + 1, left - atoms[i].len(), pick, rest)? {
                return Ok(Some(hit));
            }
            pick.pop();
        }
        Ok(None)
    }
    rec(atoms, 0, target, &mut Vec::new(), rest)
}

fn factor_nonmonic(f: &IntPoly) -> Result<Vec<IntPoly>, FactorError> {
    let d = f.degree().unwrap();
    let a = f.lead();
    // g(T) = a^(d-1) f(T/a) is monic with integer coefficients
    let coeffs = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if i == d {
                BigInt::from(1)
            } else {
                c * num_traits::pow(a.clone(), d - 1 - i)
            }
        })
        .collect();
    let g = IntPoly::new(coeffs);
    let factors = factor_squarefree(&g)?;
    // undo: each monic factor h(T) of g maps to the primitive part of h(a T)
    Ok(factors
        .into_iter()
        .map(|h| {
            let scaled: Vec<BigInt> = h
                .coeffs()
                .iter()
                .enumerate()
                .map(|(i, c)| c * num_traits::pow(a.clone(), i))
                .collect();
            IntPoly::new(scaled).primitive()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    fn product(parts: &[(IntPoly, u32)]) -> IntPoly {
        parts
            .iter()
            .fold(IntPoly::one(), |acc, (f, m)| &acc * &f.pow(*m))
    }

    #[test]
    fn elliptic_recurrence_polynomial() {
        // (T-1)(T-5)(T^2+3T+5)
        let f = &(&p(&[-1, 1]) * &p(&[-5, 1])) * &p(&[5, 3, 1]);
        let parts = factor(&f).unwrap();
        assert_eq!(
            parts,
            vec![(p(&[-5, 1]), 1), (p(&[-1, 1]), 1), (p(&[5, 3, 1]), 1)]
        );
    }

    #[test]
    fn split_quartic_and_irreducible_quartic() {
        let split = &p(&[3, 0, 1]) * &p(&[3, 2, 1]);
        assert_eq!(factor(&split).unwrap().len(), 2);
        let irr = p(&[9, 6, 5, 2, 1]);
        let parts = factor(&irr).unwrap();
        assert_eq!(product(&parts), irr);
    }

    #[test]
    fn nonmonic_and_repeated() {
        let f = &p(&[1, 2]).pow(2) * &p(&[-1, 0, 3]);
        let parts = factor(&f).unwrap();
        assert_eq!(parts, vec![(p(&[1, 2]), 2), (p(&[-1, 0, 3]), 1)]);
    }

    #[test]
    fn cyclotomic_pieces_of_t12_minus_1() {
        let f = p(&[-1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1]);
        let parts = factor(&f).unwrap();
        let degrees: Vec<usize> = parts.iter().map(|(g, _)| g.degree().unwrap()).collect();
        // Phi_1, Phi_2, Phi_3, Phi_4, Phi_6, Phi_12
        assert_eq!(degrees, vec![1, 1, 2, 2, 2, 4]);
        assert_eq!(product(&parts), f);
    }
}

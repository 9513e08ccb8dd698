//! Exact arithmetic in `F_p` and `F_{p^n}`.
//!
//! An [`ExtField`] fixes one modulus per `(p, n)`: the lexicographically
//! smallest monic irreducible polynomial of degree `n`, where monic
//! polynomials are ordered by their coefficients read from `x^(n-1)` down to
//! the constant term. Elements are coordinate vectors in the power basis
//! `1, x, ..., x^(n-1)`.
//!
//! [`ZechField`] is the same field in logarithmic form, used by the point
//! counting kernels: multiplication is an addition of exponents and addition
//! goes through a Zech logarithm table.

use std::fmt;

use thiserror::Error;

use crate::fpoly;

/// Largest supported extension degree.
pub const MAX_DEGREE: usize = 16;
/// Largest supported field order, `2^40`.
pub const MAX_ORDER: u64 = 1 << 40;
/// Largest field order for which [`ZechField`] tables are built.
pub const ZECH_LIMIT: u64 = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree {0} outside 1..={MAX_DEGREE}")]
    DegreeOutOfRange(usize),
    #[error("field order {p}^{n} exceeds 2^40")]
    OrderTooLarge { p: u64, n: usize },
    #[error("modulus is not a monic irreducible polynomial of the requested degree")]
    BadModulus,
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("element has {got} coordinates, field expects {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("coordinate {value} not reduced mod {p}")]
    Unreduced { value: u64, p: u64 },
}

/// `F_p` for a prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if fpoly::is_prime(p) && p <= MAX_ORDER {
            Ok(PrimeField { p })
        } else {
            Err(FieldError::NotPrime(p))
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn reduce(&self, a: i64) -> u64 {
        a.rem_euclid(self.p as i64) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        fpoly::addmod(a, b, self.p)
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        fpoly::mulmod(a, b, self.p)
    }

    pub fn inv(&self, a: u64) -> Result<u64, FieldError> {
        fpoly::invmod(a, self.p).ok_or(FieldError::ZeroInverse)
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        fpoly::powmod(a, e, self.p)
    }
}

/// An element of `F_{p^n}` in the power basis of its field's modulus.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElem {
    coeffs: Vec<u64>,
}

impl FieldElem {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            terms.push(match (i, c) {
                (0, c) => format!("{c}"),
                (1, 1) => "x".to_string(),
                (1, c) => format!("{c}x"),
                (i, 1) => format!("x^{i}"),
                (i, c) => format!("{c}x^{i}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Binary/unary operations accepted by [`ExtField::apply`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    /// Inverse of the first operand; the second is ignored.
    Inv,
    /// First operand raised to the given exponent; the second is ignored.
    Pow(u128),
}

/// `F_p[x] / (modulus)` with an irreducible monic modulus of degree `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtField {
    p: u64,
    n: usize,
    modulus: Vec<u64>,
}

/// Builds `F_{p^n}` with the deterministic choice of modulus.
pub fn build_extension(p: u64, n: usize) -> Result<ExtField, FieldError> {
    ExtField::new(p, n)
}

impl ExtField {
    pub fn new(p: u64, n: usize) -> Result<Self, FieldError> {
        check_params(p, n)?;
        // Walk monic candidates in increasing code order, code = sum c_i p^i,
        // which compares the x^(n-1) coefficient first.
        let total = p.pow(n as u32);
        for code in 0..total {
            let mut f = Vec::with_capacity(n + 1);
            let mut c = code;
            for _ in 0..n {
                f.push(c % p);
                c /= p;
            }
            f.push(1);
            if n > 1 && f[0] == 0 {
                continue;
            }
            if fpoly::is_irreducible(&f, p) {
                return Ok(ExtField { p, n, modulus: f });
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    /// Uses a caller-supplied modulus (lowest coefficient first, monic).
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self, FieldError> {
        let n = modulus.len().saturating_sub(1);
        check_params(p, n)?;
        if modulus.last() != Some(&1)
            || modulus.iter().any(|&c| c >= p)
            || !fpoly::is_irreducible(&modulus, p)
        {
            return Err(FieldError::BadModulus);
        }
        Ok(ExtField { p, n, modulus })
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    /// Field order `p^n`.
    pub fn order(&self) -> u64 {
        self.p.pow(self.n as u32)
    }

    /// Modulus coefficients, lowest degree first.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn elem(&self, coeffs: &[u64]) -> Result<FieldElem, FieldError> {
        if coeffs.len() != self.n {
            return Err(FieldError::Dimension {
                expected: self.n,
                got: coeffs.len(),
            });
        }
        if let Some(&value) = coeffs.iter().find(|&&c| c >= self.p) {
            return Err(FieldError::Unreduced { value, p: self.p });
        }
        Ok(FieldElem {
            coeffs: coeffs.to_vec(),
        })
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem {
            coeffs: vec![0; self.n],
        }
    }

    pub fn one(&self) -> FieldElem {
        self.from_prime(1)
    }

    /// The class of `x`. For `n = 1` this is the root of the linear modulus.
    pub fn generator(&self) -> FieldElem {
        if self.n == 1 {
            self.from_prime(self.p - self.modulus[0] % self.p)
        } else {
            let mut coeffs = vec![0; self.n];
            coeffs[1] = 1;
            FieldElem { coeffs }
        }
    }

    pub fn from_prime(&self, c: u64) -> FieldElem {
        let mut coeffs = vec![0; self.n];
        coeffs[0] = c % self.p;
        FieldElem { coeffs }
    }

    /// Base-`p` code of an element, `sum c_i p^i`; a bijection onto `0..p^n`.
    pub fn encode(&self, a: &FieldElem) -> u64 {
        a.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.p + c)
    }

    pub fn decode(&self, mut code: u64) -> FieldElem {
        let mut coeffs = Vec::with_capacity(self.n);
        for _ in 0..self.n {
            coeffs.push(code % self.p);
            code /= self.p;
        }
        FieldElem { coeffs }
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldElem {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| fpoly::addmod(x, y, self.p))
                .collect(),
        }
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldElem {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| fpoly::submod(x, y, self.p))
                .collect(),
        }
    }

    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        self.sub(&self.zero(), a)
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let prod = fpoly::mulmod_poly(&a.coeffs, &b.coeffs, &self.modulus, self.p);
        self.pad(prod)
    }

    pub fn inv(&self, a: &FieldElem) -> Result<FieldElem, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        Ok(self.pow(a, self.order() as u128 - 2))
    }

    /// Square-and-multiply.
    pub fn pow(&self, a: &FieldElem, mut e: u128) -> FieldElem {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// The Frobenius `a -> a^p`.
    pub fn frobenius(&self, a: &FieldElem) -> FieldElem {
        self.pow(a, self.p as u128)
    }

    pub fn apply(&self, op: FieldOp, a: &FieldElem, b: &FieldElem) -> Result<FieldElem, FieldError> {
        match op {
            FieldOp::Add => Ok(self.add(a, b)),
            FieldOp::Mul => Ok(self.mul(a, b)),
            FieldOp::Inv => self.inv(a),
            FieldOp::Pow(e) => Ok(self.pow(a, e)),
        }
    }

    /// Multiplicative order of a nonzero element.
    pub fn is_primitive(&self, a: &FieldElem) -> bool {
        if a.is_zero() {
            return false;
        }
        let m = self.order() - 1;
        fpoly::prime_factors(m)
            .into_iter()
            .all(|r| self.pow(a, (m / r) as u128) != self.one())
    }

    fn pad(&self, mut v: Vec<u64>) -> FieldElem {
        v.resize(self.n, 0);
        FieldElem { coeffs: v }
    }
}

impl fmt::Display for ExtField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = FieldElem {
            coeffs: self.modulus.clone(),
        };
        write!(f, "F_{}^{} = F_{}[x]/({})", self.p, self.n, self.p, m)
    }
}

fn check_params(p: u64, n: usize) -> Result<(), FieldError> {
    if !fpoly::is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if n == 0 || n > MAX_DEGREE {
        return Err(FieldError::DegreeOutOfRange(n));
    }
    match p.checked_pow(n as u32) {
        Some(q) if q <= MAX_ORDER => Ok(()),
        _ => Err(FieldError::OrderTooLarge { p, n }),
    }
}

/// Element-level arithmetic used by the counting kernels. Elements are
/// indexed `0..order()`, with index 0 the zero element.
pub trait FieldKernel: Sync {
    type Elem: Copy + Eq + Send + Sync;

    fn order(&self) -> u64;
    fn characteristic(&self) -> u64;
    fn element(&self, index: u64) -> Self::Elem;
    fn zero(&self) -> Self::Elem;
    fn from_prime(&self, c: u64) -> Self::Elem;
    fn is_zero(&self, a: Self::Elem) -> bool;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn pow(&self, a: Self::Elem, e: u32) -> Self::Elem;
    /// Quadratic character `a^((q-1)/2)` in `{-1, 0, 1}`; odd characteristic only.
    fn quadratic_character(&self, a: Self::Elem) -> i32;
}

/// Generic fallback: elements are base-`p` codes, each operation decodes.
impl FieldKernel for ExtField {
    type Elem = u64;

    fn order(&self) -> u64 {
        ExtField::order(self)
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn element(&self, index: u64) -> u64 {
        index
    }
    fn zero(&self) -> u64 {
        0
    }
    fn from_prime(&self, c: u64) -> u64 {
        c % self.p
    }
    fn is_zero(&self, a: u64) -> bool {
        a == 0
    }
    fn add(&self, a: u64, b: u64) -> u64 {
        self.encode(&ExtField::add(self, &self.decode(a), &self.decode(b)))
    }
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.encode(&ExtField::mul(self, &self.decode(a), &self.decode(b)))
    }
    fn pow(&self, a: u64, e: u32) -> u64 {
        self.encode(&ExtField::pow(self, &self.decode(a), e as u128))
    }
    fn quadratic_character(&self, a: u64) -> i32 {
        if a == 0 {
            return 0;
        }
        let q = ExtField::order(self) as u128;
        let r = ExtField::pow(self, &self.decode(a), (q - 1) / 2);
        if r == self.one() {
            1
        } else {
            -1
        }
    }
}

/// `F_{p^n}` in logarithmic form relative to a primitive element `g`.
///
/// Code 0 is zero and code `k + 1` is `g^k`. `zech[k]` holds the code of
/// `1 + g^k`.
#[derive(Debug, Clone)]
pub struct ZechField {
    p: u64,
    order: u64,
    zech: Vec<u32>,
    prime_codes: Vec<u32>,
    half: u64,
}

impl ZechField {
    pub fn new(field: &ExtField) -> Result<Self, FieldError> {
        let q = field.order();
        if q > ZECH_LIMIT {
            return Err(FieldError::OrderTooLarge {
                p: field.p,
                n: field.n,
            });
        }
        let m = q - 1;
        let g = Self::primitive_element(field);
        let g_is_x = field.n > 1 && g == field.generator();

        // log_code[encode(g^k)] = k + 1
        let mut log_code = vec![0u32; q as usize];
        let mut cur = field.one();
        for k in 0..m {
            log_code[field.encode(&cur) as usize] = (k + 1) as u32;
            cur = if g_is_x {
                times_x(field, &cur)
            } else {
                field.mul(&cur, &g)
            };
        }
        let p = field.p;
        let mut zech = vec![0u32; m as usize];
        for code in 1..q {
            let k = log_code[code as usize] - 1;
            let c0 = code % p;
            let shifted = code - c0 + (c0 + 1) % p;
            zech[k as usize] = log_code[shifted as usize];
        }
        let prime_codes = (0..p).map(|c| log_code[c as usize]).collect();
        let half = if p == 2 { 0 } else { m / 2 };
        Ok(ZechField {
            p,
            order: q,
            zech,
            prime_codes,
            half,
        })
    }

    fn primitive_element(field: &ExtField) -> FieldElem {
        let x = field.generator();
        if field.is_primitive(&x) {
            return x;
        }
        (1..field.order())
            .map(|c| field.decode(c))
            .find(|a| field.is_primitive(a))
            .expect("multiplicative group is cyclic")
    }

    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            (1 + (a as u64 - 1 + self.half) % (self.order - 1)) as u32
        }
    }
}

fn times_x(field: &ExtField, a: &FieldElem) -> FieldElem {
    // shift up, then subtract top * modulus
    let n = field.n;
    let p = field.p;
    let top = a.coeffs[n - 1];
    let mut out = vec![0u64; n];
    for i in (1..n).rev() {
        out[i] = a.coeffs[i - 1];
    }
    if top != 0 {
        for (i, o) in out.iter_mut().enumerate() {
            *o = fpoly::submod(*o, fpoly::mulmod(top, field.modulus[i], p), p);
        }
    }
    FieldElem { coeffs: out }
}

impl FieldKernel for ZechField {
    type Elem = u32;

    fn order(&self) -> u64 {
        self.order
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    #[inline]
    fn element(&self, index: u64) -> u32 {
        index as u32
    }
    fn zero(&self) -> u32 {
        0
    }
    fn from_prime(&self, c: u64) -> u32 {
        self.prime_codes[(c % self.p) as usize]
    }
    #[inline]
    fn is_zero(&self, a: u32) -> bool {
        a == 0
    }
    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        if a == 0 {
            return b;
        }
        if b == 0 {
            return a;
        }
        let m = self.order - 1;
        let la = a as u64 - 1;
        let lb = b as u64 - 1;
        let d = (lb + m - la) % m;
        let z = self.zech[d as usize];
        if z == 0 {
            0
        } else {
            (1 + (la + z as u64 - 1) % m) as u32
        }
    }
    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let m = self.order - 1;
        (1 + (a as u64 - 1 + b as u64 - 1) % m) as u32
    }
    #[inline]
    fn pow(&self, a: u32, e: u32) -> u32 {
        if e == 0 {
            return self.from_prime(1);
        }
        if a == 0 {
            return 0;
        }
        let m = self.order - 1;
        (1 + ((a as u64 - 1) * (e as u64 % m)) % m) as u32
    }
    #[inline]
    fn quadratic_character(&self, a: u32) -> i32 {
        if a == 0 {
            0
        } else if (a - 1) % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_elem(f: &ExtField, rng: &mut ChaCha8Rng) -> FieldElem {
        f.decode(rng.gen_range(0..f.order()))
    }

    #[test]
    fn prime_field_cases() {
        assert_eq!(build_extension(2, 1).unwrap().modulus(), &[0, 1]);
        let f7 = PrimeField::new(7).unwrap();
        assert_eq!(f7.inv(3).unwrap(), 5);
        assert_eq!(f7.inv(0), Err(FieldError::ZeroInverse));
        let f5 = build_extension(5, 1).unwrap();
        assert_eq!(f5.pow(&f5.from_prime(2), 24), f5.one());
        assert_eq!(PrimeField::new(9), Err(FieldError::NotPrime(9)));
    }

    #[test]
    fn quadratic_over_f2() {
        let f4 = build_extension(2, 2).unwrap();
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        let w = f4.generator();
        assert_eq!(f4.mul(&w, &w), f4.elem(&[1, 1]).unwrap());
        assert_eq!(f4.frobenius(&w), f4.elem(&[1, 1]).unwrap());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(build_extension(6, 2), Err(FieldError::NotPrime(6)));
        assert_eq!(build_extension(3, 0), Err(FieldError::DegreeOutOfRange(0)));
        assert_eq!(build_extension(3, 17), Err(FieldError::DegreeOutOfRange(17)));
        assert_eq!(
            build_extension(1_048_583, 2),
            Err(FieldError::OrderTooLarge { p: 1_048_583, n: 2 })
        );
        assert!(ExtField::with_modulus(2, vec![1, 0, 1]).is_err()); // x^2+1 = (x+1)^2
    }

    /// Independent oracle: gcd(x^(p^d) - x, f) = 1 for every proper divisor d,
    /// plus a direct root search in F_p.
    #[test]
    fn octic_over_f5_is_irreducible() {
        let f = build_extension(5, 8).unwrap();
        let m = f.modulus().to_vec();
        assert_eq!(m.len(), 9);
        assert!((0..5).all(|x| fpoly::eval(&m, x, 5) != 0));
        let mut xp = vec![0u64, 1];
        for d in 1..8usize {
            xp = fpoly::powmod_poly(&xp, 5, &m, 5);
            if 8 % d == 0 {
                let g = fpoly::gcd(&fpoly::sub(&xp, &[0, 1], 5), &m, 5);
                assert_eq!(g, vec![1], "d = {d}");
            }
        }
        // and lexicographic minimality among irreducible candidates
        let code: u64 = m[..8].iter().rev().fold(0, |acc, &c| acc * 5 + c);
        for smaller in 0..code {
            let mut g: Vec<u64> = (0..8).map(|i| (smaller / 5u64.pow(i)) % 5).collect();
            g.push(1);
            assert!(!fpoly::is_irreducible(&g, 5));
        }
    }

    #[test]
    fn ring_axioms_on_random_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(p, n) in &[(2u64, 5usize), (3, 4), (5, 3), (7, 2), (13, 1), (101, 2)] {
            let f = build_extension(p, n).unwrap();
            for _ in 0..1000 {
                let a = random_elem(&f, &mut rng);
                let b = random_elem(&f, &mut rng);
                let c = random_elem(&f, &mut rng);
                assert_eq!(f.add(&a, &b), f.add(&b, &a));
                assert_eq!(f.mul(&a, &b), f.mul(&b, &a));
                assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
                assert_eq!(f.add(&f.add(&a, &b), &c), f.add(&a, &f.add(&b, &c)));
                assert_eq!(
                    f.mul(&a, &f.add(&b, &c)),
                    f.add(&f.mul(&a, &b), &f.mul(&a, &c))
                );
                if !a.is_zero() {
                    assert_eq!(f.mul(&f.inv(&a).unwrap(), &a), f.one());
                }
                // Frobenius is a ring homomorphism
                assert_eq!(
                    f.frobenius(&f.add(&a, &b)),
                    f.add(&f.frobenius(&a), &f.frobenius(&b))
                );
                assert_eq!(
                    f.frobenius(&f.mul(&a, &b)),
                    f.mul(&f.frobenius(&a), &f.frobenius(&b))
                );
            }
        }
    }

    #[test]
    fn frobenius_fixes_prime_field_and_has_order_n() {
        let f = build_extension(3, 5).unwrap();
        for c in 0..3 {
            assert_eq!(f.frobenius(&f.from_prime(c)), f.from_prime(c));
        }
        for code in 0..f.order() {
            let a = f.decode(code);
            let mut b = a.clone();
            for _ in 0..5 {
                b = f.frobenius(&b);
            }
            assert_eq!(a, b);
        }
    }

    #[test]
    fn multiplicative_group_order_exhaustive() {
        for &(p, n) in &[(2u64, 8usize), (3, 5), (5, 4), (7, 3), (251, 1), (17, 3)] {
            let f = build_extension(p, n).unwrap();
            let e = f.order() as u128 - 1;
            for code in 1..f.order() {
                assert_eq!(f.pow(&f.decode(code), e), f.one());
            }
        }
        // largest exhaustive case, 2^16
        let f = build_extension(2, 16).unwrap();
        for code in (1..f.order()).step_by(1) {
            assert_eq!(f.pow(&f.decode(code), 65535), f.one());
        }
    }

    #[test]
    fn apply_dispatch() {
        let f = build_extension(7, 1).unwrap();
        let three = f.from_prime(3);
        assert_eq!(f.apply(FieldOp::Inv, &three, &three).unwrap(), f.from_prime(5));
        assert_eq!(
            f.apply(FieldOp::Inv, &f.zero(), &three),
            Err(FieldError::ZeroInverse)
        );
        assert_eq!(f.apply(FieldOp::Pow(6), &three, &three).unwrap(), f.one());
    }

    /// The Zech representation is a ring isomorphic image of the power basis.
    #[test]
    fn zech_matches_power_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &(p, n) in &[(2u64, 6usize), (3, 4), (5, 2), (7, 3), (11, 1)] {
            let f = build_extension(p, n).unwrap();
            let z = ZechField::new(&f).unwrap();
            let g = ZechField::primitive_element(&f);
            let to_elem = |c: u32| {
                if c == 0 {
                    f.zero()
                } else {
                    f.pow(&g, c as u128 - 1)
                }
            };
            for c in 0..p {
                assert_eq!(to_elem(z.from_prime(c)), f.from_prime(c));
            }
            for _ in 0..500 {
                let a = rng.gen_range(0..f.order()) as u32;
                let b = rng.gen_range(0..f.order()) as u32;
                assert_eq!(to_elem(z.add(a, b)), f.add(&to_elem(a), &to_elem(b)));
                assert_eq!(to_elem(z.mul(a, b)), f.mul(&to_elem(a), &to_elem(b)));
                assert_eq!(to_elem(z.pow(a, 5)), f.pow(&to_elem(a), 5));
                assert_eq!(to_elem(z.neg(a)), f.neg(&to_elem(a)));
                if p != 2 {
                    assert_eq!(
                        z.quadratic_character(a),
                        FieldKernel::quadratic_character(&f, f.encode(&to_elem(a)))
                    );
                }
            }
        }
    }
}

//! Exact arithmetic in GF(p^k).
//!
//! Elements are stored as packed coefficient vectors in the polynomial basis
//! `1, x, ..., x^(k-1)`: the code of `c_0 + c_1 x + ... ` is `sum c_i p^i`.
//! Code order is the canonical element order used by every enumeration in
//! the crate. Fields of order at most 256 precompute addition and
//! multiplication tables; larger fields compute on the fly.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the field order.
pub const DEFAULT_MAX_ORDER: u64 = 1 << 16;

const TABLE_LIMIT: u32 = 256;

/// A field element, packed as base-p digits of its polynomial-basis coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[repr(transparent)]
pub struct FieldElement(pub u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn code(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Debug, Clone)]
struct Tables {
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

/// GF(p^k) with a fixed monic irreducible modulus.
#[derive(Debug, Clone)]
pub struct FiniteField {
    p: u32,
    k: u32,
    q: u32,
    /// Modulus coefficients, constant term first, monic (length k + 1).
    modulus: Vec<u32>,
    tables: Option<Tables>,
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for FiniteField {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime divisors in increasing order.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Returns `(p, k)` with `n = p^k`, or `None` when `n` is not a prime power.
pub fn as_prime_power(n: u64) -> Option<(u64, u32)> {
    let primes = prime_divisors(n);
    if primes.len() != 1 {
        return None;
    }
    let p = primes[0];
    let mut k = 0;
    let mut m = n;
    while m.is_multiple_of(p) {
        m /= p;
        k += 1;
    }
    Some((p, k))
}

// Polynomials over GF(p) as coefficient vectors, constant term first, trimmed.

fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn mod_inv_prime(a: u32, p: u32) -> u32 {
    // a^(p-2) mod p
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

/// Remainder of `a` modulo `b` over GF(p); `b` must be nonzero.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = mod_inv_prime(b[db], p) as u64;
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let factor = r[r.len() - 1] as u64 * lead_inv % p as u64;
        for (i, &bc) in b.iter().enumerate() {
            let sub = factor * bc as u64 % p as u64;
            let slot = &mut r[shift + i];
            *slot = ((*slot as u64 + p as u64 - sub) % p as u64) as u32;
        }
        poly_trim(&mut r);
    }
    r
}

fn poly_divmod(a: &[u32], b: &[u32], p: u32) -> (Vec<u32>, Vec<u32>) {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut quot = vec![0u32; r.len() - db];
    let lead_inv = mod_inv_prime(b[db], p) as u64;
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let factor = r[r.len() - 1] as u64 * lead_inv % p as u64;
        quot[shift] = factor as u32;
        for (i, &bc) in b.iter().enumerate() {
            let sub = factor * bc as u64 % p as u64;
            let slot = &mut r[shift + i];
            *slot = ((*slot as u64 + p as u64 - sub) % p as u64) as u32;
        }
        poly_trim(&mut r);
    }
    poly_trim(&mut quot);
    (quot, r)
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    let mut out: Vec<u32> = out.into_iter().map(|c| c as u32).collect();
    poly_trim(&mut out);
    out
}

fn poly_sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let n = a.len().max(b.len());
    let mut out: Vec<u32> = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    poly_trim(&mut out);
    out
}

/// Monic polynomial of degree `deg` whose lower coefficients are the base-p
/// digits of `code`.
fn monic_from_code(mut code: u64, deg: u32, p: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(deg as usize + 1);
    for _ in 0..deg {
        out.push((code % p as u64) as u32);
        code /= p as u64;
    }
    out.push(1);
    out
}

/// Irreducibility by trial division by every monic polynomial of degree at
/// most `deg / 2`.
pub fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let mut f = poly.to_vec();
    poly_trim(&mut f);
    let deg = match f.len() {
        0 => return false,
        n => (n - 1) as u32,
    };
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d);
        for code in 0..count {
            let g = monic_from_code(code, d, p);
            if poly_rem(&f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl FiniteField {
    /// GF(p^k) with the default order cap.
    pub fn new(p: u64, k: u32) -> Result<Self> {
        Self::with_max_order(p, k, DEFAULT_MAX_ORDER)
    }

    pub fn with_max_order(p: u64, k: u32, max_order: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::ZeroDegree);
        }
        let q = (p as u128).checked_pow(k).unwrap_or(u128::MAX);
        if q > max_order as u128 {
            return Err(Error::FieldTooLarge { p, k, max: max_order });
        }
        let p = p as u32;
        let q = q as u32;
        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            let count = (p as u64).pow(k);
            (0..count)
                .map(|code| monic_from_code(code, k, p))
                .find(|f| is_irreducible(f, p))
                .expect("irreducible polynomials exist in every degree")
        };
        let mut field = FiniteField { p, k, q, modulus, tables: None };
        if q <= TABLE_LIMIT {
            field.tables = Some(field.build_tables());
        }
        Ok(field)
    }

    /// Parses a field name: the order as a decimal prime power (`"4"`) or as
    /// `"p^k"` (`"2^2"`).
    pub fn parse(name: &str) -> Result<Self> {
        let s = name.trim();
        let bad = || Error::NotPrimePower(name.to_string());
        if let Some((base, exp)) = s.split_once('^') {
            let p: u64 = base.trim().parse().map_err(|_| bad())?;
            let k: u32 = exp.trim().parse().map_err(|_| bad())?;
            if !is_prime(p) || k == 0 {
                return Err(bad());
            }
            return Self::new(p, k);
        }
        let q: u64 = s.parse().map_err(|_| bad())?;
        let (p, k) = as_prime_power(q).ok_or_else(bad)?;
        Self::new(p, k)
    }

    fn build_tables(&self) -> Tables {
        let q = self.q as usize;
        let mut add = vec![0u16; q * q];
        let mut mul = vec![0u16; q * q];
        let mut neg = vec![0u16; q];
        let mut inv = vec![0u16; q];
        for a in 0..q {
            let fa = FieldElement(a as u32);
            neg[a] = self.slow_neg(fa).0 as u16;
            for b in 0..q {
                let fb = FieldElement(b as u32);
                add[a * q + b] = self.slow_add(fa, fb).0 as u16;
                mul[a * q + b] = self.slow_mul(fa, fb).0 as u16;
            }
        }
        for a in 1..q {
            inv[a] = self.inv_by_gcd(FieldElement(a as u32)).expect("nonzero").0 as u16;
        }
        Tables { add, mul, neg, inv }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Modulus coefficients, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn name(&self) -> String {
        self.q.to_string()
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    pub fn element(&self, code: u32) -> Result<FieldElement> {
        if code < self.q {
            Ok(FieldElement(code))
        } else {
            Err(Error::InvalidFieldElement { code, order: self.q })
        }
    }

    pub fn contains(&self, a: FieldElement) -> bool {
        a.0 < self.q
    }

    /// Polynomial-basis coordinates, length k.
    pub fn coeffs(&self, a: FieldElement) -> Vec<u32> {
        let mut code = a.0;
        (0..self.k)
            .map(|_| {
                let c = code % self.p;
                code /= self.p;
                c
            })
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() != self.k as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::BadFieldLiteral(format!("{coeffs:?}")));
        }
        Ok(self.pack(coeffs))
    }

    fn pack(&self, coeffs: &[u32]) -> FieldElement {
        let mut code = 0u32;
        for &c in coeffs.iter().rev() {
            code = code * self.p + c;
        }
        FieldElement(code)
    }

    /// Image of an integer under Z -> GF(p) -> GF(p^k).
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.p as i64) as u32)
    }

    fn slow_add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.k == 1 {
            return FieldElement((a.0 + b.0) % self.p);
        }
        let ca = self.coeffs(a);
        let cb = self.coeffs(b);
        let sum: Vec<u32> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % self.p).collect();
        self.pack(&sum)
    }

    fn slow_neg(&self, a: FieldElement) -> FieldElement {
        let c: Vec<u32> = self.coeffs(a).iter().map(|&x| (self.p - x) % self.p).collect();
        self.pack(&c)
    }

    fn slow_mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.k == 1 {
            return FieldElement(((a.0 as u64 * b.0 as u64) % self.p as u64) as u32);
        }
        let prod = poly_mul(&self.coeffs(a), &self.coeffs(b), self.p);
        let mut r = poly_rem(&prod, &self.modulus, self.p);
        r.resize(self.k as usize, 0);
        self.pack(&r)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        match &self.tables {
            Some(t) => FieldElement(t.add[(a.0 * self.q + b.0) as usize] as u32),
            None => self.slow_add(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.p == 2 {
            return a;
        }
        match &self.tables {
            Some(t) => FieldElement(t.neg[a.0 as usize] as u32),
            None => self.slow_neg(a),
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match &self.tables {
            Some(t) => FieldElement(t.mul[(a.0 * self.q + b.0) as usize] as u32),
            None => self.slow_mul(a, b),
        }
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut result = self.one();
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        result
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match &self.tables {
            Some(t) => Ok(FieldElement(t.inv[a.0 as usize] as u32)),
            None if self.k == 1 => Ok(FieldElement(mod_inv_prime(a.0, self.p))),
            None => self.inv_by_gcd(a),
        }
    }

    /// Inverse as `a^(q-2)`.
    pub fn inv_by_power(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.q as u64 - 2))
    }

    /// Inverse by the extended Euclidean algorithm on polynomials.
    pub fn inv_by_gcd(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let p = self.p;
        let mut r0 = self.modulus.clone();
        let mut r1 = self.coeffs(a);
        poly_trim(&mut r1);
        let mut s0: Vec<u32> = Vec::new();
        let mut s1: Vec<u32> = vec![1];
        while !r1.is_empty() {
            let (quot, rem) = poly_divmod(&r0, &r1, p);
            let s2 = poly_sub(&s0, &poly_mul(&quot, &s1, p), p);
            r0 = std::mem::replace(&mut r1, rem);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r0 is a nonzero constant since the modulus is irreducible
        let scale = mod_inv_prime(r0[0], p) as u64;
        let mut out: Vec<u32> = s0.iter().map(|&c| (c as u64 * scale % p as u64) as u32).collect();
        out.resize(self.k as usize, 0);
        Ok(self.pack(&out))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn frobenius(&self, a: FieldElement) -> FieldElement {
        self.pow(a, self.p as u64)
    }

    /// Prime fields print as integers, extensions as polynomials in `x`.
    pub fn format(&self, a: FieldElement) -> String {
        if self.k == 1 {
            return a.0.to_string();
        }
        let coeffs = self.coeffs(a);
        let terms: Vec<String> = coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| {
                let mono = match i {
                    0 => String::new(),
                    1 => "x".to_string(),
                    _ => format!("x^{i}"),
                };
                match (c, i) {
                    (_, 0) => c.to_string(),
                    (1, _) => mono,
                    _ => format!("{c}{mono}"),
                }
            })
            .collect();
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }

    /// Inverse of [`FiniteField::format`].
    pub fn parse_element(&self, s: &str) -> Result<FieldElement> {
        let bad = || Error::BadFieldLiteral(s.to_string());
        let s = s.trim();
        if self.k == 1 {
            let v: u64 = s.parse().map_err(|_| bad())?;
            if v >= self.p as u64 {
                return Err(bad());
            }
            return Ok(FieldElement(v as u32));
        }
        let mut coeffs = vec![0u32; self.k as usize];
        for term in s.split('+') {
            let term = term.trim();
            let (c, deg) = match term.find('x') {
                None => (term.parse::<u32>().map_err(|_| bad())?, 0usize),
                Some(pos) => {
                    let c = if pos == 0 { 1 } else { term[..pos].parse::<u32>().map_err(|_| bad())? };
                    let rest = &term[pos + 1..];
                    let deg = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^').ok_or_else(bad)?.parse::<usize>().map_err(|_| bad())?
                    };
                    (c, deg)
                }
            };
            if deg >= self.k as usize || c >= self.p {
                return Err(bad());
            }
            coeffs[deg] = (coeffs[deg] + c) % self.p;
        }
        Ok(self.pack(&coeffs))
    }
}

impl fmt::Display for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.q)
    }
}

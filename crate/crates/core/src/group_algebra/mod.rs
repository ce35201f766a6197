//! The group algebra `FG`.
//!
//! Elements are dense coefficient vectors indexed by group element. Products
//! are convolutions over the Cayley table; over GF(2) with `|G| <= 64` they
//! run on bitmasks with per-element byte tables. Invertibility is decided by
//! solving `L_a x = 1` where `L_a` is the left-regular matrix of `a`.

mod enumerate;
mod ideal;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite_field::{FieldElement, FiniteField};
use crate::groups::{FiniteGroup, Quotient, Subgroup};
use crate::linalg::{gf2_solve_small, solve_in_place, Matrix};

pub use enumerate::{cyclotomic_unit_count, field_summand_count, EnumerationBudget, Idempotents, DEFAULT_MAX_POINTS};
pub use ideal::IdealBasis;

pub(crate) use enumerate::par_scan;

/// An element of `FG`: one coefficient per group element.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlgebraElement {
    coeffs: Vec<FieldElement>,
}

impl AlgebraElement {
    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, g: usize) -> FieldElement {
        self.coeffs[g]
    }

    pub fn into_coeffs(self) -> Vec<FieldElement> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Group elements with a nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        (0..self.coeffs.len()).filter(|&g| !self.coeffs[g].is_zero()).collect()
    }
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let codes: Vec<u32> = self.coeffs.iter().map(|c| c.0).collect();
        write!(f, "AlgebraElement{codes:?}")
    }
}

/// Witness form of an algebra element: `(group label, field value)` pairs in
/// group order, zero terms omitted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SerializedElement(pub Vec<(String, String)>);

/// Precomputed bit-permutation tables for GF(2) products: entry
/// `[u][chunk][byte]` is the mask of `u * v` over the `v` in that byte.
#[derive(Debug)]
struct Gf2Kernel {
    chunks: usize,
    tables: Vec<u64>,
}

impl Gf2Kernel {
    fn new(group: &FiniteGroup) -> Self {
        let n = group.order();
        let chunks = n.div_ceil(8);
        let mut tables = vec![0u64; n * chunks * 256];
        for u in 0..n {
            for chunk in 0..chunks {
                for byte in 0..256usize {
                    let mut mask = 0u64;
                    for bit in 0..8 {
                        let v = chunk * 8 + bit;
                        if byte >> bit & 1 == 1 && v < n {
                            mask |= 1 << group.mul(u, v);
                        }
                    }
                    tables[(u * chunks + chunk) * 256 + byte] = mask;
                }
            }
        }
        Gf2Kernel { chunks, tables }
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        let bytes: [usize; 8] = std::array::from_fn(|i| (b >> (8 * i) & 0xff) as usize);
        let mut out = 0u64;
        let mut rest = a;
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let base = u * self.chunks * 256;
            for (chunk, &byte) in bytes.iter().enumerate().take(self.chunks) {
                out ^= self.tables[base + chunk * 256 + byte];
            }
        }
        out
    }
}

#[derive(Debug)]
struct Inner {
    field: Arc<FiniteField>,
    group: Arc<FiniteGroup>,
    gf2: Option<Gf2Kernel>,
}

/// `FG` for a finite field `F` and finite group `G`. Cheap to clone.
#[derive(Debug, Clone)]
pub struct GroupAlgebra {
    inner: Arc<Inner>,
}

impl GroupAlgebra {
    pub fn new(field: Arc<FiniteField>, group: Arc<FiniteGroup>) -> Self {
        let gf2 = (field.order() == 2 && group.order() <= 64).then(|| Gf2Kernel::new(&group));
        GroupAlgebra { inner: Arc::new(Inner { field, group, gf2 }) }
    }

    pub fn field(&self) -> &FiniteField {
        &self.inner.field
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.inner.group
    }

    pub fn field_arc(&self) -> Arc<FiniteField> {
        self.inner.field.clone()
    }

    pub fn group_arc(&self) -> Arc<FiniteGroup> {
        self.inner.group.clone()
    }

    pub fn dim(&self) -> usize {
        self.inner.group.order()
    }

    pub(crate) fn has_gf2_kernel(&self) -> bool {
        self.inner.gf2.is_some()
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement { coeffs: vec![FieldElement::ZERO; self.dim()] }
    }

    pub fn one(&self) -> AlgebraElement {
        self.basis(0)
    }

    /// The group element `g` as an algebra element.
    pub fn basis(&self, g: usize) -> AlgebraElement {
        let mut e = self.zero();
        e.coeffs[g] = FieldElement::ONE;
        e
    }

    pub fn scalar(&self, s: FieldElement) -> AlgebraElement {
        let mut e = self.zero();
        e.coeffs[0] = s;
        e
    }

    pub fn from_coeffs(&self, coeffs: Vec<FieldElement>) -> Result<AlgebraElement> {
        self.check_coeffs(&coeffs)?;
        Ok(AlgebraElement { coeffs })
    }

    /// Builds `sum c_g g` from `(g, c_g)` terms; repeated `g` accumulate.
    pub fn from_terms(&self, terms: &[(usize, FieldElement)]) -> AlgebraElement {
        let mut e = self.zero();
        for &(g, c) in terms {
            e.coeffs[g] = self.field().add(e.coeffs[g], c);
        }
        e
    }

    fn check_coeffs(&self, coeffs: &[FieldElement]) -> Result<()> {
        if coeffs.len() != self.dim() {
            return Err(Error::LengthMismatch { expected: self.dim(), got: coeffs.len() });
        }
        if let Some(bad) = coeffs.iter().find(|c| !self.field().contains(**c)) {
            return Err(Error::InvalidFieldElement { code: bad.0, order: self.field().order() });
        }
        Ok(())
    }

    pub fn check(&self, a: &AlgebraElement) -> Result<()> {
        self.check_coeffs(&a.coeffs)
    }

    pub fn add(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        let f = self.field();
        AlgebraElement { coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| f.add(x, y)).collect() }
    }

    pub fn sub(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        let f = self.field();
        AlgebraElement { coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| f.sub(x, y)).collect() }
    }

    pub fn neg(&self, a: &AlgebraElement) -> AlgebraElement {
        let f = self.field();
        AlgebraElement { coeffs: a.coeffs.iter().map(|&x| f.neg(x)).collect() }
    }

    pub fn scale(&self, s: FieldElement, a: &AlgebraElement) -> AlgebraElement {
        let f = self.field();
        AlgebraElement { coeffs: a.coeffs.iter().map(|&x| f.mul(s, x)).collect() }
    }

    /// Checked product: both operands must belong to this algebra.
    pub fn try_mul(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    /// Convolution product `c_w = sum_{uv = w} a_u b_v`.
    pub fn mul(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        let mut out = vec![FieldElement::ZERO; self.dim()];
        self.mul_slices(&a.coeffs, &b.coeffs, &mut out);
        AlgebraElement { coeffs: out }
    }

    pub(crate) fn mul_slices(&self, a: &[FieldElement], b: &[FieldElement], out: &mut [FieldElement]) {
        let n = self.dim();
        if let Some(k) = &self.inner.gf2 {
            let c = k.mul(to_mask(a), to_mask(b));
            for (g, slot) in out.iter_mut().enumerate() {
                *slot = FieldElement((c >> g & 1) as u32);
            }
            return;
        }
        let f = self.field();
        let group = self.group();
        let b_support: Vec<usize> = (0..n).filter(|&v| !b[v].is_zero()).collect();
        if f.degree() == 1 {
            let p = f.characteristic() as u64;
            let mut acc = vec![0u64; n];
            for (u, &au) in a.iter().enumerate() {
                if au.is_zero() {
                    continue;
                }
                for &v in &b_support {
                    let w = group.mul(u, v);
                    acc[w] += au.0 as u64 * b[v].0 as u64;
                }
                // keep the accumulators small for large p
                if p > 1 << 16 {
                    acc.iter_mut().for_each(|x| *x %= p);
                }
            }
            for (slot, x) in out.iter_mut().zip(acc) {
                *slot = FieldElement((x % p) as u32);
            }
            return;
        }
        out.iter_mut().for_each(|x| *x = FieldElement::ZERO);
        for (u, &au) in a.iter().enumerate() {
            if au.is_zero() {
                continue;
            }
            for &v in &b_support {
                let w = group.mul(u, v);
                out[w] = f.add(out[w], f.mul(au, b[v]));
            }
        }
    }

    pub(crate) fn gf2_mul_masks(&self, a: u64, b: u64) -> u64 {
        self.inner.gf2.as_ref().expect("GF(2) kernel").mul(a, b)
    }

    pub fn pow(&self, a: &AlgebraElement, mut e: u64) -> AlgebraElement {
        let mut result = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        result
    }

    /// `x` is nilpotent iff `x^|G| = 0`; checked by repeated squaring.
    pub fn is_nilpotent(&self, x: &AlgebraElement) -> bool {
        let mut y = x.clone();
        let mut power = 1usize;
        loop {
            if y.is_zero() {
                return true;
            }
            if power >= self.dim() {
                return false;
            }
            y = self.mul(&y, &y);
            power *= 2;
        }
    }

    pub fn augmentation(&self, a: &AlgebraElement) -> FieldElement {
        let f = self.field();
        a.coeffs.iter().fold(FieldElement::ZERO, |acc, &c| f.add(acc, c))
    }

    /// Matrix of `x -> a x` in the group basis: entry `(w, v)` is `a_{w v^-1}`.
    pub fn left_regular_matrix(&self, a: &AlgebraElement) -> Matrix {
        let n = self.dim();
        let g = self.group();
        let mut m = Matrix::zeros(n, n);
        for w in 0..n {
            for v in 0..n {
                m.set(w, v, a.coeffs[g.mul(w, g.inv(v))]);
            }
        }
        m
    }

    /// Two-sided inverse when `a` is a unit.
    pub fn try_inverse(&self, a: &AlgebraElement) -> Option<AlgebraElement> {
        let mut scratch = vec![FieldElement::ZERO; self.dim() * self.dim()];
        let mut out = vec![FieldElement::ZERO; self.dim()];
        self.inverse_slices(&a.coeffs, &mut scratch, &mut out).then_some(AlgebraElement { coeffs: out })
    }

    /// Solves `L_a x = 1` into `out`; `scratch` must hold `n*n` entries.
    pub(crate) fn inverse_slices(&self, a: &[FieldElement], scratch: &mut [FieldElement], out: &mut [FieldElement]) -> bool {
        let n = self.dim();
        let g = self.group();
        if self.inner.gf2.is_some() && n < 64 {
            return match self.gf2_inverse_mask(to_mask(a)) {
                Some(x) => {
                    for (i, slot) in out.iter_mut().enumerate() {
                        *slot = FieldElement((x >> i & 1) as u32);
                    }
                    true
                }
                None => false,
            };
        }
        for w in 0..n {
            for v in 0..n {
                scratch[w * n + v] = a[g.mul(w, g.inv(v))];
            }
        }
        out.iter_mut().for_each(|x| *x = FieldElement::ZERO);
        out[0] = FieldElement::ONE;
        solve_in_place(self.field(), scratch, n, out)
    }

    /// Inverse over GF(2) on bitmasks, `|G| < 64`.
    pub(crate) fn gf2_inverse_mask(&self, a: u64) -> Option<u64> {
        let n = self.dim();
        let g = self.group();
        let mut rows = [0u64; 64];
        for (w, row) in rows.iter_mut().enumerate().take(n) {
            let mut bits = 0u64;
            for v in 0..n {
                bits |= (a >> g.mul(w, g.inv(v)) & 1) << v;
            }
            if w == 0 {
                bits |= 1 << n;
            }
            *row = bits;
        }
        gf2_solve_small(&mut rows[..n], n)
    }

    /// Sum of the elements of `h`, each with coefficient 1.
    pub fn hat(&self, h: &Subgroup) -> AlgebraElement {
        let mut e = self.zero();
        for g in h.members().iter() {
            e.coeffs[g] = FieldElement::ONE;
        }
        e
    }

    pub fn commutes(&self, a: &AlgebraElement, b: &AlgebraElement) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    /// `1 + x`
    pub fn one_plus(&self, x: &AlgebraElement) -> AlgebraElement {
        self.add(&self.one(), x)
    }

    /// Image under the coefficient-collapsing map `FG -> F[G/N]`.
    pub fn collapse(&self, a: &AlgebraElement, quotient: &Quotient, target: &GroupAlgebra) -> AlgebraElement {
        let f = self.field();
        let mut out = target.zero();
        for (g, &c) in a.coeffs.iter().enumerate() {
            let k = quotient.coset_of[g];
            out.coeffs[k] = f.add(out.coeffs[k], c);
        }
        out
    }

    pub fn serialize(&self, a: &AlgebraElement) -> SerializedElement {
        SerializedElement(
            a.coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(g, &c)| (self.group().label(g).to_string(), self.field().format(c)))
                .collect(),
        )
    }

    pub fn deserialize(&self, s: &SerializedElement) -> Result<AlgebraElement> {
        let labels = self.group().label_map();
        let mut e = self.zero();
        for (label, value) in &s.0 {
            let g = *labels.get(label.as_str()).ok_or_else(|| Error::UnknownLabel(label.clone()))?;
            let c = self.field().parse_element(value)?;
            e.coeffs[g] = self.field().add(e.coeffs[g], c);
        }
        Ok(e)
    }

    /// Human-readable form, e.g. `1 + (x+1)*a^2`.
    pub fn display(&self, a: &AlgebraElement) -> String {
        let terms: Vec<String> = self
            .serialize(a)
            .0
            .into_iter()
            .map(|(g, c)| match (g.as_str(), c.as_str()) {
                ("1", _) => c,
                (_, "1") => g,
                _ if c.contains('+') => format!("({c})*{g}"),
                _ => format!("{c}*{g}"),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    /// Number of augmentation-1 coefficient vectors, `q^(|G|-1)`.
    pub fn normalized_points(&self) -> u128 {
        (self.field().order() as u128).pow(self.dim() as u32 - 1)
    }

    /// Little-endian base-q code of the non-identity coefficients: the
    /// coefficient of element 1 is the least significant digit.
    pub(crate) fn normalized_code(&self, a: &[FieldElement]) -> u64 {
        let q = self.field().order() as u64;
        a[1..].iter().rev().fold(0u64, |acc, c| acc * q + c.0 as u64)
    }

    /// Coefficients of the augmentation-`aug` element with the given code.
    pub(crate) fn decode_with_augmentation(&self, mut code: u64, aug: FieldElement, out: &mut [FieldElement]) {
        let f = self.field();
        let q = f.order() as u64;
        let mut sum = FieldElement::ZERO;
        for slot in out[1..].iter_mut() {
            let c = FieldElement((code % q) as u32);
            code /= q;
            *slot = c;
            sum = f.add(sum, c);
        }
        out[0] = f.sub(aug, sum);
    }
}

#[inline]
pub(crate) fn to_mask(a: &[FieldElement]) -> u64 {
    a.iter().enumerate().fold(0u64, |acc, (g, c)| acc | (c.0 as u64 & 1) << g)
}

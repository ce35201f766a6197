//! Relative augmentation ideals and general subspaces of `FG`.

use super::{AlgebraElement, GroupAlgebra};
use crate::error::Result;
use crate::finite_field::{FieldElement, FiniteField};
use crate::groups::Subgroup;
use crate::linalg::Matrix;

/// A subspace of `FG` given by a linearly independent spanning list, with
/// its reduced row-echelon form kept for membership tests.
#[derive(Debug, Clone)]
pub struct IdealBasis {
    basis: Vec<AlgebraElement>,
    rref: Matrix,
    pivots: Vec<usize>,
}

impl IdealBasis {
    /// Span of `elements`; dependent vectors are dropped.
    pub fn span(alg: &GroupAlgebra, elements: &[AlgebraElement]) -> Self {
        let f = alg.field();
        let mut basis = Vec::new();
        let mut echelon: Vec<(usize, Vec<FieldElement>)> = Vec::new();
        for e in elements {
            let mut v = e.coeffs().to_vec();
            reduce(f, &echelon, &mut v);
            let Some(pivot) = v.iter().position(|c| !c.is_zero()) else {
                continue;
            };
            let inv = f.inv(v[pivot]).expect("pivot is nonzero");
            v.iter_mut().for_each(|c| *c = f.mul(*c, inv));
            for (_, row) in echelon.iter_mut() {
                let factor = row[pivot];
                if !factor.is_zero() {
                    let neg = f.neg(factor);
                    for (slot, &x) in row.iter_mut().zip(&v) {
                        *slot = f.add(*slot, f.mul(neg, x));
                    }
                }
            }
            echelon.push((pivot, v));
            basis.push(e.clone());
        }
        echelon.sort_by_key(|(p, _)| *p);
        let pivots = echelon.iter().map(|(p, _)| *p).collect();
        let rows: Vec<Vec<FieldElement>> = echelon.into_iter().map(|(_, r)| r).collect();
        let rref = if rows.is_empty() { Matrix::zeros(0, alg.dim()) } else { Matrix::from_rows(&rows) };
        IdealBasis { basis, rref, pivots }
    }

    pub fn basis(&self) -> &[AlgebraElement] {
        &self.basis
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn rref(&self) -> &Matrix {
        &self.rref
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Exact linear membership test.
    pub fn contains(&self, field: &FiniteField, x: &AlgebraElement) -> bool {
        let mut v = x.coeffs().to_vec();
        for (i, &c) in self.pivots.iter().enumerate() {
            eliminate(field, c, self.rref.row(i), &mut v);
        }
        v.iter().all(|c| c.is_zero())
    }

    /// The combination `sum d_i b_i` where `d_i` are the base-q digits of
    /// `code`, least significant first.
    pub fn combination(&self, alg: &GroupAlgebra, mut code: u64) -> AlgebraElement {
        let f = alg.field();
        let q = f.order() as u64;
        let mut out = alg.zero();
        for b in &self.basis {
            let d = FieldElement((code % q) as u32);
            code /= q;
            if !d.is_zero() {
                out = alg.add(&out, &alg.scale(d, b));
            }
        }
        out
    }
}

fn eliminate(f: &FiniteField, pivot: usize, row: &[FieldElement], v: &mut [FieldElement]) {
    let factor = v[pivot];
    if factor.is_zero() {
        return;
    }
    let neg = f.neg(factor);
    for (slot, &r) in v.iter_mut().zip(row) {
        *slot = f.add(*slot, f.mul(neg, r));
    }
}

fn reduce(f: &FiniteField, echelon: &[(usize, Vec<FieldElement>)], v: &mut [FieldElement]) {
    for (pivot, row) in echelon {
        eliminate(f, *pivot, row, v);
    }
}

impl GroupAlgebra {
    /// Kernel of the collapse map `FG -> F[G/H]`, spanned by `g - r(g)` for
    /// `g` outside the set of least coset representatives.
    pub fn rel_aug_ideal(&self, h: &Subgroup) -> Result<IdealBasis> {
        let quotient = self.group().quotient(h)?;
        let vectors: Vec<AlgebraElement> = (0..self.dim())
            .filter(|&g| quotient.representatives[quotient.coset_of[g]] != g)
            .map(|g| self.sub(&self.basis(g), &self.basis(quotient.representatives[quotient.coset_of[g]])))
            .collect();
        Ok(IdealBasis::span(self, &vectors))
    }

    /// Membership in the kernel of `FG -> F[G/H]` by coset sums.
    pub fn in_rel_aug_ideal(&self, h: &Subgroup, x: &AlgebraElement) -> Result<bool> {
        let quotient = self.group().quotient(h)?;
        let f = self.field();
        let mut sums = vec![FieldElement::ZERO; quotient.representatives.len()];
        for (g, &c) in x.coeffs().iter().enumerate() {
            let k = quotient.coset_of[g];
            sums[k] = f.add(sums[k], c);
        }
        Ok(sums.iter().all(|s| s.is_zero()))
    }
}

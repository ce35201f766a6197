//! Dense linear algebra over GF(p^k), with a bit-packed GF(2) path.

use crate::finite_field::{FieldElement, FiniteField};

/// Row-major dense matrix over a finite field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![FieldElement::ZERO; rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<FieldElement>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        Matrix { rows: rows.len(), cols, data: rows.concat() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul_vec(&self, field: &FiniteField, v: &[FieldElement]) -> Vec<FieldElement> {
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).fold(FieldElement::ZERO, |acc, (&a, &b)| field.add(acc, field.mul(a, b))))
            .collect()
    }

    /// Reduces to reduced row-echelon form in place; returns pivot columns.
    pub fn rref(&mut self, field: &FiniteField) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(r, pr);
            let inv = field.inv(self.get(r, c)).expect("pivot is nonzero");
            for j in 0..self.cols {
                let v = field.mul(self.get(r, j), inv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c);
                if factor.is_zero() {
                    continue;
                }
                for j in 0..self.cols {
                    let v = field.sub(self.get(i, j), field.mul(factor, self.get(r, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self, field: &FiniteField) -> usize {
        self.clone().rref(field).len()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

/// Solves `A x = b` for square `A` (row-major, `n x n`) in place. On success
/// `b` holds `x`; returns `false` when `A` is singular. `a` is clobbered.
pub fn solve_in_place(field: &FiniteField, a: &mut [FieldElement], n: usize, b: &mut [FieldElement]) -> bool {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| !a[i * n + c].is_zero()) else {
            return false;
        };
        if pr != c {
            for j in c..n {
                a.swap(pr * n + j, c * n + j);
            }
            b.swap(pr, c);
        }
        let inv = field.inv(a[c * n + c]).expect("pivot is nonzero");
        if inv != FieldElement::ONE {
            for j in c..n {
                a[c * n + j] = field.mul(a[c * n + j], inv);
            }
            b[c] = field.mul(b[c], inv);
        }
        for i in 0..n {
            if i == c {
                continue;
            }
            let factor = a[i * n + c];
            if factor.is_zero() {
                continue;
            }
            let neg = field.neg(factor);
            for j in c..n {
                a[i * n + j] = field.add(a[i * n + j], field.mul(neg, a[c * n + j]));
            }
            b[i] = field.add(b[i], field.mul(neg, b[c]));
        }
    }
    true
}

/// Matrix over GF(2) with rows packed into 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64).max(1);
        BitMatrix { rows, cols, words, data: vec![0; rows * words] }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.data[r * self.words + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    /// Word-parallel elimination; returns the rank.
    pub fn rank(&self) -> usize {
        let mut m = self.data.clone();
        let w = self.words;
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let (word, bit) = (c / 64, c % 64);
            let Some(pr) = (r..self.rows).find(|&i| m[i * w + word] >> bit & 1 == 1) else {
                continue;
            };
            if pr != r {
                for k in 0..w {
                    m.swap(pr * w + k, r * w + k);
                }
            }
            for i in 0..self.rows {
                if i != r && m[i * w + word] >> bit & 1 == 1 {
                    for k in 0..w {
                        m[i * w + k] ^= m[r * w + k];
                    }
                }
            }
            r += 1;
        }
        r
    }
}

/// Solves an `n x n` GF(2) system with `n < 64`. Row `i` holds the
/// coefficients in bits `0..n` and the right-hand side in bit `n`. Returns
/// the solution bits, or `None` when singular.
pub fn gf2_solve_small(rows: &mut [u64], n: usize) -> Option<u64> {
    debug_assert!(n < 64);
    for c in 0..n {
        let pr = (c..n).find(|&i| rows[i] >> c & 1 == 1)?;
        rows.swap(pr, c);
        let pivot = rows[c];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != c && *row >> c & 1 == 1 {
                *row ^= pivot;
            }
        }
    }
    Some(rows.iter().enumerate().fold(0u64, |acc, (i, &row)| acc | (row >> n & 1) << i))
}

//! Budget-guarded scans over coefficient vectors.
//!
//! Scans run in parallel over disjoint code ranges and are gathered in code
//! order, so results do not depend on the number of workers.

use std::collections::HashMap;

use rayon::prelude::*;

use super::{AlgebraElement, GroupAlgebra};
use crate::error::{Error, Result};
use crate::finite_field::FieldElement;
use crate::groups::{gcd, FiniteGroup, Subgroup};

pub const DEFAULT_MAX_POINTS: u64 = 1 << 22;

const CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget {
    /// Cap on the number of coefficient vectors a scan may visit.
    pub max_points: u64,
    /// Cap on the number of stored units.
    pub max_unit_group: u64,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget { max_points: DEFAULT_MAX_POINTS, max_unit_group: DEFAULT_MAX_POINTS }
    }
}

impl EnumerationBudget {
    pub fn new(max_points: u64, max_unit_group: u64) -> Result<Self> {
        if max_points == 0 || max_unit_group == 0 {
            return Err(Error::Precondition("budgets must be positive".into()));
        }
        Ok(EnumerationBudget { max_points, max_unit_group })
    }

    pub fn check_points(&self, needed: u128) -> Result<()> {
        if needed > self.max_points as u128 {
            return Err(Error::BudgetExceeded { needed, budget: self.max_points });
        }
        Ok(())
    }
}

/// Runs `scan(start, end, out)` over `[0, total)` in chunks and concatenates
/// the outputs in range order.
pub(crate) fn par_scan<T, F>(total: u64, scan: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, u64, &mut Vec<T>) + Sync,
{
    let chunks = total.div_ceil(CHUNK);
    let parts: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut out = Vec::new();
            scan(c * CHUNK, ((c + 1) * CHUNK).min(total), &mut out);
            out
        })
        .collect();
    parts.into_iter().flatten().collect()
}

/// Idempotents of a subalgebra `FH`, in enumeration order, with primitivity.
#[derive(Debug, Clone)]
pub struct Idempotents {
    pub elements: Vec<AlgebraElement>,
    pub primitive: Vec<bool>,
}

impl Idempotents {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn primitive_count(&self) -> usize {
        self.primitive.iter().filter(|&&p| p).count()
    }

    pub fn primitive_elements(&self) -> impl Iterator<Item = &AlgebraElement> {
        self.elements.iter().zip(&self.primitive).filter(|(_, &p)| p).map(|(e, _)| e)
    }
}

impl GroupAlgebra {
    /// All nonzero nilpotent elements, in code order. Nilpotents have
    /// augmentation 0, so only that hyperplane is scanned.
    pub fn enumerate_nilpotents(&self, budget: &EnumerationBudget) -> Result<Vec<AlgebraElement>> {
        let n = self.dim();
        let q = self.field().order() as u128;
        budget.check_points(q.pow(n as u32))?;
        let total = self.normalized_points() as u64;
        if self.has_gf2_kernel() {
            let steps = n.next_power_of_two().trailing_zeros();
            let masks = par_scan(total, |start, end, out| {
                for code in start.max(1)..end {
                    let x = code << 1 | (code.count_ones() as u64 & 1);
                    let mut y = x;
                    for _ in 0..steps {
                        if y == 0 {
                            break;
                        }
                        y = self.gf2_mul_masks(y, y);
                    }
                    if y == 0 {
                        out.push(x);
                    }
                }
            });
            return Ok(masks.into_iter().map(|m| self.from_mask(m)).collect());
        }
        Ok(par_scan(total, |start, end, out| {
            let mut buf = vec![FieldElement::ZERO; n];
            for code in start.max(1)..end {
                self.decode_with_augmentation(code, FieldElement::ZERO, &mut buf);
                let x = AlgebraElement { coeffs: buf.clone() };
                if self.is_nilpotent(&x) {
                    out.push(x);
                }
            }
        }))
    }

    /// All `e` in `FH` with `e^2 = e`. Coefficients on the elements of `h`
    /// run as an odometer, the least group index fastest.
    pub fn enumerate_idempotents(&self, h: &Subgroup, budget: &EnumerationBudget) -> Result<Idempotents> {
        let q = self.field().order() as u64;
        let support = h.elements();
        let total = (q as u128).pow(support.len() as u32);
        budget.check_points(total)?;
        let elements = par_scan(total as u64, |start, end, out| {
            let mut e = self.zero();
            for code in start..end {
                let mut c = code;
                for &g in &support {
                    e.coeffs[g] = FieldElement((c % q) as u32);
                    c /= q;
                }
                if self.mul(&e, &e) == e {
                    out.push(e.clone());
                }
            }
        });
        let primitive = self.primitivity(&elements);
        Ok(Idempotents { elements, primitive })
    }

    /// `e` is primitive when it is nonzero and not `e1 + e2` for nonzero
    /// orthogonal idempotents `e1, e2` from the list.
    fn primitivity(&self, idempotents: &[AlgebraElement]) -> Vec<bool> {
        let index: HashMap<&AlgebraElement, usize> = idempotents.iter().enumerate().map(|(i, e)| (e, i)).collect();
        idempotents
            .par_iter()
            .map(|e| {
                if e.is_zero() {
                    return false;
                }
                !idempotents.iter().any(|e1| {
                    if e1.is_zero() || e1 == e {
                        return false;
                    }
                    let e2 = self.sub(e, e1);
                    !e2.is_zero()
                        && index.contains_key(&e2)
                        && self.mul(e1, &e2).is_zero()
                        && self.mul(&e2, e1).is_zero()
                })
            })
            .collect()
    }

    pub(crate) fn from_mask(&self, mask: u64) -> AlgebraElement {
        AlgebraElement { coeffs: (0..self.dim()).map(|g| FieldElement((mask >> g & 1) as u32)).collect() }
    }

}

/// Number of orbits of `d -> d^q` on the abelian subgroup `d`, which is the
/// number of simple summands of `F_q D` when `gcd(q, |D|) = 1`.
pub fn field_summand_count(group: &FiniteGroup, d: &Subgroup, q: u64) -> Result<usize> {
    if !group.is_abelian_subgroup(d) {
        return Err(Error::NotAbelian);
    }
    if gcd(q as usize, d.order()) != 1 {
        return Err(Error::Precondition(format!("gcd({q}, {}) != 1", d.order())));
    }
    let mut seen = vec![false; group.order()];
    let mut orbits = 0;
    for x in d.elements() {
        if seen[x] {
            continue;
        }
        orbits += 1;
        let mut y = x;
        while !seen[y] {
            seen[y] = true;
            let o = group.element_order(y) as u64;
            y = group.pow(y, (q % o) as i64);
        }
    }
    Ok(orbits)
}

/// `|V(FG)|` for abelian `G` with `gcd(q, |G|) = 1`: `FG` is a sum of
/// fields `F_{q^d}`, one per orbit of size `d` of `g -> g^q`, so
/// `|V| = prod (q^d - 1) / (q - 1)`. `None` on `u128` overflow.
pub fn cyclotomic_unit_count(group: &FiniteGroup, q: u64) -> Result<Option<u128>> {
    if !group.is_abelian() {
        return Err(Error::NotAbelian);
    }
    if gcd(q as usize, group.order()) != 1 {
        return Err(Error::Precondition(format!("gcd({q}, {}) != 1", group.order())));
    }
    let mut seen = vec![false; group.order()];
    let mut total: u128 = 1;
    for x in 0..group.order() {
        let mut d = 0u32;
        let mut y = x;
        while !seen[y] {
            seen[y] = true;
            d += 1;
            y = group.pow(y, (q % group.element_order(y) as u64) as i64);
        }
        if d > 0 {
            let Some(f) = (q as u128).checked_pow(d).and_then(|v| total.checked_mul(v - 1)) else {
                return Ok(None);
            };
            total = f;
        }
    }
    Ok(Some(total / (q as u128 - 1)))
}

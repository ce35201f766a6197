//! The normalized unit group `V(FG)`.
//!
//! An enumerated [`UnitGroup`] stores each unit once, addressed by position
//! in code order, with cached inverses and a dense code index. Small groups
//! additionally get a Cayley table on demand. [`ImplicitUnits`] covers the
//! sampled tier, where units are handled as algebra elements directly.

mod engel;
mod structure;

use std::sync::OnceLock;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::finite_field::FieldElement;
use crate::group_algebra::{par_scan, AlgebraElement, EnumerationBudget, GroupAlgebra};
use crate::groups::GroupOps;

pub use engel::{
    engel_group_test, engel_pair_test, engel_sampled_test, engel_trace, replay_witness, EngelMode, EngelOutcome, EngelVerdict, EngelWitness,
    DEFAULT_ENGEL_EXHAUSTIVE_MAX, DEFAULT_MAX_ENGEL_STEPS,
};
pub(crate) use structure::is_two_sided_ideal;
pub use structure::{order_law_formula, OnePlusIdeal, ProjectionReport, SubgroupMethod, UnitSubgroup};

/// Largest `|V|` for which a Cayley table is built.
pub const TABLE_MAX: usize = 4096;

const NONE: u32 = u32::MAX;

/// Groups whose elements can be drawn uniformly at random.
pub trait SampleUnits: GroupOps {
    fn sample(&self, rng: &mut ChaCha8Rng) -> Self::Elem;
}

/// Enumerated `V(FG)`; elements are positions `0..len`, position 0 is 1.
#[derive(Debug)]
pub struct UnitGroup {
    algebra: GroupAlgebra,
    codes: Vec<u32>,
    inverses: Vec<u32>,
    index: Vec<u32>,
    table: OnceLock<Vec<u16>>,
}

impl GroupAlgebra {
    /// Every augmentation-1 element that passes the unit test, in code order.
    pub fn enumerate_normalized_units(&self, budget: &EnumerationBudget) -> Result<UnitGroup> {
        UnitGroup::enumerate(self, budget)
    }
}

impl UnitGroup {
    pub fn enumerate(alg: &GroupAlgebra, budget: &EnumerationBudget) -> Result<Self> {
        let points = alg.normalized_points();
        budget.check_points(points)?;
        if points >= NONE as u128 {
            return Err(Error::BudgetExceeded { needed: points, budget: NONE as u64 - 1 });
        }
        let total = points as u64;
        let n = alg.dim();
        let pairs: Vec<(u32, u32)> = if alg.has_gf2_kernel() && n < 64 {
            par_scan(total, |start, end, out| {
                for code in start..end {
                    let mask = code << 1 | (1 ^ (code.count_ones() as u64 & 1));
                    if let Some(inv) = alg.gf2_inverse_mask(mask) {
                        out.push((code as u32, (inv >> 1) as u32));
                    }
                }
            })
        } else {
            par_scan(total, |start, end, out| {
                let mut buf = vec![FieldElement::ZERO; n];
                let mut scratch = vec![FieldElement::ZERO; n * n];
                let mut inv = vec![FieldElement::ZERO; n];
                for code in start..end {
                    alg.decode_with_augmentation(code, FieldElement::ONE, &mut buf);
                    if alg.inverse_slices(&buf, &mut scratch, &mut inv) {
                        out.push((code as u32, alg.normalized_code(&inv) as u32));
                    }
                }
            })
        };
        if pairs.len() as u64 > budget.max_unit_group {
            return Err(Error::BudgetExceeded { needed: pairs.len() as u128, budget: budget.max_unit_group });
        }
        let mut index = vec![NONE; total as usize];
        for (pos, &(code, _)) in pairs.iter().enumerate() {
            index[code as usize] = pos as u32;
        }
        let mut inverses = Vec::with_capacity(pairs.len());
        for &(_, inv) in &pairs {
            let pos = index[inv as usize];
            if pos == NONE {
                return Err(Error::Fault("inverse of a unit is not a unit".into()));
            }
            inverses.push(pos);
        }
        let codes = pairs.into_iter().map(|(c, _)| c).collect();
        Ok(UnitGroup { algebra: alg.clone(), codes, inverses, index, table: OnceLock::new() })
    }

    pub fn algebra(&self) -> &GroupAlgebra {
        &self.algebra
    }

    pub fn order(&self) -> usize {
        self.codes.len()
    }

    pub fn element(&self, i: usize) -> AlgebraElement {
        let mut buf = vec![FieldElement::ZERO; self.algebra.dim()];
        self.algebra.decode_with_augmentation(self.codes[i] as u64, FieldElement::ONE, &mut buf);
        self.algebra.from_coeffs(buf).expect("decoded coefficients are valid")
    }

    pub fn elements(&self) -> impl Iterator<Item = AlgebraElement> + '_ {
        (0..self.order()).map(|i| self.element(i))
    }

    /// Position of `x` in `V`, if `x` is a normalized unit.
    pub fn position(&self, x: &AlgebraElement) -> Option<usize> {
        if x.coeffs().len() != self.algebra.dim() || self.algebra.augmentation(x) != FieldElement::ONE {
            return None;
        }
        self.position_of_coeffs(x.coeffs())
    }

    fn position_of_coeffs(&self, c: &[FieldElement]) -> Option<usize> {
        let code = self.algebra.normalized_code(c) as usize;
        match self.index.get(code) {
            Some(&p) if p != NONE => Some(p as usize),
            _ => None,
        }
    }

    pub fn contains(&self, x: &AlgebraElement) -> bool {
        self.position(x).is_some()
    }

    #[inline]
    pub fn inv(&self, i: usize) -> usize {
        self.inverses[i] as usize
    }

    #[inline]
    pub fn mul(&self, i: usize, j: usize) -> usize {
        if let Some(t) = self.table.get() {
            return t[i * self.order() + j] as usize;
        }
        self.mul_direct(i, j)
    }

    fn mul_direct(&self, i: usize, j: usize) -> usize {
        let alg = &self.algebra;
        if alg.has_gf2_kernel() {
            let to_mask = |code: u32| (code as u64) << 1 | (1 ^ (code.count_ones() as u64 & 1));
            let m = alg.gf2_mul_masks(to_mask(self.codes[i]), to_mask(self.codes[j]));
            return self.index[(m >> 1) as usize] as usize;
        }
        let n = alg.dim();
        let mut a = vec![FieldElement::ZERO; n];
        let mut b = vec![FieldElement::ZERO; n];
        let mut c = vec![FieldElement::ZERO; n];
        alg.decode_with_augmentation(self.codes[i] as u64, FieldElement::ONE, &mut a);
        alg.decode_with_augmentation(self.codes[j] as u64, FieldElement::ONE, &mut b);
        alg.mul_slices(&a, &b, &mut c);
        self.position_of_coeffs(&c).expect("product of units is a unit")
    }

    /// Builds the Cayley table when `|V| <= TABLE_MAX`; returns whether one
    /// is available.
    pub fn ensure_table(&self) -> bool {
        use rayon::prelude::*;
        let n = self.order();
        if n > TABLE_MAX {
            return false;
        }
        self.table.get_or_init(|| {
            let rows: Vec<Vec<u16>> =
                (0..n).into_par_iter().map(|i| (0..n).map(|j| self.mul_direct(i, j) as u16).collect()).collect();
            rows.concat()
        });
        true
    }

    pub fn has_table(&self) -> bool {
        self.table.get().is_some()
    }

    pub fn pow(&self, i: usize, mut e: u64) -> usize {
        let mut result = 0;
        let mut base = i;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        result
    }

    /// Element order, found by stripping prime factors from `|V|`.
    pub fn element_order(&self, i: usize) -> u64 {
        let mut o = self.order() as u64;
        for r in crate::finite_field::prime_divisors(o) {
            while o.is_multiple_of(r) && self.pow(i, o / r) == 0 {
                o /= r;
            }
        }
        o
    }

    pub fn comm(&self, x: usize, y: usize) -> usize {
        let t = self.mul(self.inv(x), self.inv(y));
        self.mul(self.mul(t, x), y)
    }
}

impl GroupOps for UnitGroup {
    type Elem = usize;

    fn identity(&self) -> usize {
        0
    }

    fn op(&self, a: &usize, b: &usize) -> usize {
        self.mul(*a, *b)
    }

    fn inverse(&self, a: &usize) -> usize {
        self.inv(*a)
    }
}

impl SampleUnits for UnitGroup {
    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        rng.gen_range(0..self.order())
    }
}

/// `V(FG)` without enumeration: elements are algebra elements of
/// augmentation 1 that pass the unit test.
#[derive(Debug, Clone)]
pub struct ImplicitUnits {
    algebra: GroupAlgebra,
}

impl ImplicitUnits {
    pub fn new(algebra: GroupAlgebra) -> Self {
        ImplicitUnits { algebra }
    }

    pub fn algebra(&self) -> &GroupAlgebra {
        &self.algebra
    }

    pub fn contains(&self, x: &AlgebraElement) -> bool {
        self.algebra.check(x).is_ok()
            && self.algebra.augmentation(x) == FieldElement::ONE
            && self.algebra.try_inverse(x).is_some()
    }

    /// A uniformly random augmentation-1 vector, conditioned on being a unit.
    pub fn sample_with_inverse(&self, rng: &mut ChaCha8Rng) -> (AlgebraElement, AlgebraElement) {
        let alg = &self.algebra;
        let q = alg.field().order();
        let mut buf = vec![FieldElement::ZERO; alg.dim()];
        loop {
            let mut sum = FieldElement::ZERO;
            for slot in buf[1..].iter_mut() {
                *slot = FieldElement(rng.gen_range(0..q));
                sum = alg.field().add(sum, *slot);
            }
            buf[0] = alg.field().sub(FieldElement::ONE, sum);
            let x = alg.from_coeffs(buf.clone()).expect("valid coefficients");
            if let Some(inv) = alg.try_inverse(&x) {
                return (x, inv);
            }
        }
    }
}

impl GroupOps for ImplicitUnits {
    type Elem = AlgebraElement;

    fn identity(&self) -> AlgebraElement {
        self.algebra.one()
    }

    fn op(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        self.algebra.mul(a, b)
    }

    fn inverse(&self, a: &AlgebraElement) -> AlgebraElement {
        self.algebra.try_inverse(a).expect("element of V is a unit")
    }
}

impl SampleUnits for ImplicitUnits {
    fn sample(&self, rng: &mut ChaCha8Rng) -> AlgebraElement {
        self.sample_with_inverse(rng).0
    }
}

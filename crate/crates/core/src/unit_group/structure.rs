//! Subgroups of an enumerated `V(FG)`: closures, the lower central series,
//! `1 + J` for an ideal `J`, and the collapse onto `V(F[G/N])`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::UnitGroup;
use crate::error::{Error, Result};
use crate::group_algebra::{AlgebraElement, EnumerationBudget, GroupAlgebra, IdealBasis};
use crate::groups::{invariants_from_orders, p_part, Subgroup};

/// A subgroup of `V` as a membership bitmap plus a generating list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitSubgroup {
    bits: Vec<u64>,
    len: usize,
    generators: Vec<usize>,
}

impl UnitSubgroup {
    fn trivial(n: usize) -> Self {
        let mut bits = vec![0u64; n.div_ceil(64)];
        bits[0] = 1;
        UnitSubgroup { bits, len: 1, generators: Vec::new() }
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    fn insert(&mut self, i: usize) -> bool {
        let fresh = !self.contains(i);
        if fresh {
            self.bits[i / 64] |= 1 << (i % 64);
            self.len += 1;
        }
        fresh
    }

    pub fn order(&self) -> usize {
        self.len
    }

    pub fn is_trivial(&self) -> bool {
        self.len == 1
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn elements(&self) -> Vec<usize> {
        (0..self.bits.len() * 64).filter(|&i| self.contains(i)).collect()
    }

    pub fn is_subset(&self, other: &UnitSubgroup) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }
}

/// How a `1 + J` subgroup check was carried out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubgroupMethod {
    /// Closure and conjugation computed in `V`.
    Direct,
    /// `J` verified to be a two-sided ideal on a basis, which makes
    /// `1 + J` a normal subgroup once all its elements are units.
    IdealBasis,
}

/// `1 + J` inside `V`, with the outcome of each verification.
#[derive(Debug, Clone)]
pub struct OnePlusIdeal {
    pub subgroup: UnitSubgroup,
    pub is_subgroup: bool,
    pub is_normal: bool,
    pub p_part_of_v: u128,
    pub order_matches_p_part: bool,
    pub method: SubgroupMethod,
}

/// Outcome of comparing `V(FG)` with `V(F[G/N])` through the collapse map.
#[derive(Debug, Clone, Serialize)]
pub struct ProjectionReport {
    pub order_v: u64,
    pub kernel_order: u64,
    pub image_order: u64,
    pub quotient_units: u64,
    pub lands_in_units: bool,
    pub surjective: bool,
    pub kernel_is_one_plus_ideal: bool,
    pub order_law: bool,
    pub quotient_invariants: Option<Vec<u64>>,
    pub cokernel_invariants: Option<Vec<u64>>,
}

impl ProjectionReport {
    pub fn holds(&self) -> bool {
        self.lands_in_units
            && self.surjective
            && self.kernel_is_one_plus_ideal
            && self.order_law
            && self.quotient_invariants == self.cokernel_invariants
    }
}

impl UnitGroup {
    /// Smallest subgroup containing `gens`.
    pub fn subgroup_closure(&self, gens: &[usize]) -> UnitSubgroup {
        let mut h = UnitSubgroup::trivial(self.order());
        for &g in gens {
            self.extend(&mut h, g);
        }
        h
    }

    /// Adds `g` to the subgroup, closing under right multiplication by
    /// the generators.
    fn extend(&self, h: &mut UnitSubgroup, g: usize) {
        if h.contains(g) {
            return;
        }
        h.generators.push(g);
        let mut frontier = h.elements();
        let gens = h.generators.clone();
        while let Some(e) = frontier.pop() {
            for &s in &gens {
                let t = self.mul(e, s);
                if h.insert(t) {
                    frontier.push(t);
                }
            }
        }
    }

    /// Greedy generating set: each element not yet covered is added.
    pub fn generating_set(&self) -> Vec<usize> {
        let mut h = UnitSubgroup::trivial(self.order());
        for g in 1..self.order() {
            if h.len == self.order() {
                break;
            }
            self.extend(&mut h, g);
        }
        h.generators
    }

    pub fn whole(&self) -> UnitSubgroup {
        self.subgroup_closure(&self.generating_set())
    }

    /// Normal closure in `V` of the subgroup generated by `gens`.
    pub fn normal_closure(&self, gens: &[usize], v_gens: &[usize]) -> UnitSubgroup {
        let mut h = self.subgroup_closure(gens);
        loop {
            let mut grew = false;
            let current = h.generators.clone();
            for &s in &current {
                for &v in v_gens {
                    let c = self.mul(self.mul(self.inv(v), s), v);
                    if !h.contains(c) {
                        self.extend(&mut h, c);
                        grew = true;
                    }
                }
            }
            if !grew {
                return h;
            }
        }
    }

    /// `[N, V]` for a normal subgroup `N`.
    fn commutator_with_v(&self, n: &UnitSubgroup, v_gens: &[usize]) -> UnitSubgroup {
        let comms: Vec<usize> = n.generators.iter().flat_map(|&a| v_gens.iter().map(move |&b| (a, b))).map(|(a, b)| self.comm(a, b)).collect();
        self.normal_closure(&comms, v_gens)
    }

    /// `gamma_1 = V, gamma_{k+1} = [gamma_k, V]`, up to the first repeat.
    pub fn lower_central_series(&self) -> Vec<UnitSubgroup> {
        let v_gens = self.generating_set();
        let mut series = vec![self.subgroup_closure(&v_gens)];
        loop {
            let last = series.last().expect("nonempty");
            if last.is_trivial() {
                return series;
            }
            let next = self.commutator_with_v(last, &v_gens);
            if next.len == last.len {
                return series;
            }
            series.push(next);
        }
    }

    /// Nilpotency class of `V`, or `None` when the series stalls above 1.
    pub fn nilpotency_class(&self, cap: usize) -> Result<Option<usize>> {
        if self.order() > cap {
            return Err(Error::BudgetExceeded { needed: self.order() as u128, budget: cap as u64 });
        }
        self.ensure_table();
        let series = self.lower_central_series();
        Ok(series.last().filter(|s| s.is_trivial()).map(|_| series.len() - 1))
    }

    /// `V'`, the subgroup generated by all commutators.
    pub fn derived_subgroup(&self) -> UnitSubgroup {
        let v_gens = self.generating_set();
        let whole = self.subgroup_closure(&v_gens);
        self.commutator_with_v(&whole, &v_gens)
    }

    pub fn is_abelian(&self) -> bool {
        let gens = self.generating_set();
        gens.iter().all(|&a| gens.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Invariant factors of an abelian `V`.
    pub fn abelian_invariants(&self) -> Result<Vec<u64>> {
        if !self.is_abelian() {
            return Err(Error::NotAbelian);
        }
        let orders: Vec<u64> = (0..self.order()).into_par_iter().map(|i| self.element_order(i)).collect();
        invariants_from_orders(&orders)
    }

    /// `{1 + z : z in span J}` with subgroup, normality and order checks.
    /// Every `1 + z` must be a unit.
    pub fn one_plus_ideal_subgroup(&self, ideal: &IdealBasis, p: u64) -> Result<OnePlusIdeal> {
        let alg = self.algebra();
        let q = alg.field().order() as u128;
        let size = q.checked_pow(ideal.dimension() as u32).filter(|&s| s <= self.order() as u128).ok_or_else(|| {
            Error::Fault(format!("1 + J has {} elements but |V| = {}", q.pow(ideal.dimension().min(40) as u32), self.order()))
        })? as u64;
        let positions: Vec<Option<usize>> = (0..size)
            .into_par_iter()
            .map(|code| self.position(&alg.one_plus(&ideal.combination(alg, code))))
            .collect();
        let mut subgroup = UnitSubgroup { bits: vec![0; self.order().div_ceil(64)], len: 0, generators: Vec::new() };
        for (code, pos) in positions.into_iter().enumerate() {
            let pos = pos.ok_or_else(|| Error::Fault(format!("1 + z is not a unit for span code {code}")))?;
            subgroup.insert(pos);
        }
        let (is_subgroup, is_normal, method) = if self.ensure_table() {
            let v_gens = self.generating_set();
            let members = subgroup.elements();
            let mut span = UnitSubgroup::trivial(self.order());
            for &m in &members {
                self.extend(&mut span, m);
            }
            let closed = span.bits == subgroup.bits;
            let normal = span
                .generators
                .iter()
                .all(|&a| v_gens.iter().all(|&v| subgroup.contains(self.mul(self.mul(self.inv(v), a), v))));
            subgroup.generators = span.generators;
            (closed, normal, SubgroupMethod::Direct)
        } else {
            let two_sided = is_two_sided_ideal(alg, ideal);
            (two_sided, two_sided, SubgroupMethod::IdealBasis)
        };
        let p_part_of_v = p_part(self.order() as u128, p as u128);
        Ok(OnePlusIdeal {
            order_matches_p_part: subgroup.len as u128 == p_part_of_v,
            subgroup,
            is_subgroup,
            is_normal,
            p_part_of_v,
            method,
        })
    }

    /// Compares `V(FG)` with `V(F[G/N])` through the collapse map. `ideal`
    /// must be `J(N)`.
    pub fn natural_projection_check(&self, normal: &Subgroup, ideal: &IdealBasis, budget: &EnumerationBudget) -> Result<ProjectionReport> {
        let alg = self.algebra();
        let quotient = alg.group().quotient(normal)?;
        let target = GroupAlgebra::new(alg.field_arc(), Arc::new(quotient.group.clone()));
        let w = target.enumerate_normalized_units(budget)?;
        let images: Vec<Option<usize>> =
            (0..self.order()).into_par_iter().map(|i| w.position(&alg.collapse(&self.element(i), &quotient, &target))).collect();
        let lands_in_units = images.iter().all(Option::is_some);
        let mut hit = vec![false; w.order()];
        let mut first_preimage = vec![usize::MAX; w.order()];
        let mut kernel_order = 0u64;
        let mut kernel_is_one_plus_ideal = true;
        for (i, img) in images.iter().enumerate() {
            let Some(j) = *img else { continue };
            hit[j] = true;
            if first_preimage[j] == usize::MAX {
                first_preimage[j] = i;
            }
            if j == 0 {
                kernel_order += 1;
                let z = alg.sub(&self.element(i), &alg.one());
                kernel_is_one_plus_ideal &= ideal.contains(alg.field(), &z);
            }
        }
        let q = alg.field().order() as u128;
        kernel_is_one_plus_ideal &= kernel_order as u128 == q.pow(ideal.dimension() as u32);
        let surjective = hit.iter().all(|&h| h);
        let order_law = self.order() as u128 == kernel_order as u128 * w.order() as u128;
        let (quotient_invariants, cokernel_invariants) = if quotient.group.is_abelian() && lands_in_units && surjective {
            let coset_orders: Vec<u64> = first_preimage.iter().map(|&v| self.order_modulo(v, ideal)).collect();
            (Some(w.abelian_invariants()?), invariants_from_orders(&coset_orders).ok())
        } else {
            (None, None)
        };
        Ok(ProjectionReport {
            order_v: self.order() as u64,
            kernel_order,
            image_order: hit.iter().filter(|&&h| h).count() as u64,
            quotient_units: w.order() as u64,
            lands_in_units,
            surjective,
            kernel_is_one_plus_ideal,
            order_law,
            quotient_invariants,
            cokernel_invariants,
        })
    }

    /// Least `m >= 1` with `v^m - 1` in `J`.
    fn order_modulo(&self, v: usize, ideal: &IdealBasis) -> u64 {
        let alg = self.algebra();
        let mut m = 1;
        let mut cur = v;
        while !ideal.contains(alg.field(), &alg.sub(&self.element(cur), &alg.one())) {
            cur = self.mul(cur, v);
            m += 1;
        }
        m
    }
}

/// `FG * J` and `J * FG` lie in `J`, checked on basis elements.
pub(crate) fn is_two_sided_ideal(alg: &GroupAlgebra, ideal: &IdealBasis) -> bool {
    let f = alg.field();
    ideal.basis().iter().all(|b| {
        (0..alg.dim()).all(|g| {
            let e = alg.basis(g);
            ideal.contains(f, &alg.mul(&e, b)) && ideal.contains(f, &alg.mul(b, &e))
        })
    })
}

/// `|V(FG)|` from the order law, `q^(|G| - [G:P]) * |V(F[G/P])|`.
pub fn order_law_formula(q: u64, group_order: usize, p_order: usize, quotient_units: u64) -> u128 {
    (q as u128).pow((group_order - group_order / p_order) as u32) * quotient_units as u128
}

impl GroupAlgebra {
    /// Whether `x` and its collapse in `F[G/N]` are both units or both not.
    pub fn unit_iff_collapse_unit(&self, x: &AlgebraElement, normal: &Subgroup) -> Result<(bool, bool)> {
        let quotient = self.group().quotient(normal)?;
        let target = GroupAlgebra::new(self.field_arc(), Arc::new(quotient.group.clone()));
        let y = self.collapse(x, &quotient, &target);
        Ok((self.try_inverse(x).is_some(), target.try_inverse(&y).is_some()))
    }
}

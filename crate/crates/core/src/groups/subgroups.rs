use std::collections::HashSet;

use super::{is_power_of, ElementSet, FiniteGroup, Subgroup};
use crate::error::{Error, Result};
use crate::finite_field::prime_divisors;

/// Largest group order for which the full subgroup lattice is computed.
pub const LATTICE_MAX_ORDER: usize = 64;

/// A quotient group together with the projection from the parent.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub group: FiniteGroup,
    /// Parent element -> coset index in `group`.
    pub coset_of: Vec<usize>,
    /// Coset index -> least parent element in the coset.
    pub representatives: Vec<usize>,
}

impl FiniteGroup {
    /// Smallest subgroup containing `gens`.
    pub fn closure(&self, gens: &[usize]) -> Subgroup {
        let mut set = ElementSet::from_indices([0]);
        let mut list = vec![0usize];
        let gens: Vec<usize> = gens.iter().copied().filter(|&g| g != 0).collect();
        let mut i = 0;
        while i < list.len() {
            let e = list[i];
            for &g in &gens {
                let x = self.mul(e, g);
                if set.insert(x) {
                    list.push(x);
                }
            }
            i += 1;
        }
        Subgroup::from_set_unchecked(set)
    }

    /// `Some` when the set is closed under products (hence a subgroup).
    pub fn subgroup_from_set(&self, set: ElementSet) -> Option<Subgroup> {
        if !set.contains(0) {
            return None;
        }
        let members: Vec<usize> = set.iter().collect();
        for &a in &members {
            for &b in &members {
                if !set.contains(self.mul(a, b)) {
                    return None;
                }
            }
        }
        Some(Subgroup::from_set_unchecked(set))
    }

    pub fn join(&self, a: &Subgroup, b: &Subgroup) -> Subgroup {
        let gens: Vec<usize> = a.members().iter().chain(b.members().iter()).collect();
        self.closure(&gens)
    }

    pub fn is_normal(&self, h: &Subgroup) -> bool {
        let members = h.elements();
        (0..self.order()).all(|g| members.iter().all(|&x| h.contains(self.conjugate(x, g))))
    }

    pub fn is_abelian_subgroup(&self, h: &Subgroup) -> bool {
        let m = h.elements();
        m.iter().all(|&a| m.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn center(&self) -> Subgroup {
        let n = self.order();
        let set = ElementSet::from_indices((0..n).filter(|&z| (0..n).all(|g| self.mul(z, g) == self.mul(g, z))));
        Subgroup::from_set_unchecked(set)
    }

    pub fn centralizer(&self, h: &Subgroup) -> Subgroup {
        let m = h.elements();
        let set = ElementSet::from_indices(
            (0..self.order()).filter(|&g| m.iter().all(|&x| self.mul(g, x) == self.mul(x, g))),
        );
        Subgroup::from_set_unchecked(set)
    }

    pub fn normalizer(&self, h: &Subgroup) -> Subgroup {
        let m = h.elements();
        let set = ElementSet::from_indices((0..self.order()).filter(|&g| m.iter().all(|&x| h.contains(self.conjugate(x, g)))));
        Subgroup::from_set_unchecked(set)
    }

    /// Subgroup generated by all commutators `(a, b)` with `a` in `h`, `b` in `k`.
    pub fn commutator_subgroup(&self, h: &Subgroup, k: &Subgroup) -> Subgroup {
        let mut comms = ElementSet::empty();
        for a in h.members().iter() {
            for b in k.members().iter() {
                comms.insert(self.commutator(a, b));
            }
        }
        self.closure(&comms.iter().collect::<Vec<_>>())
    }

    pub fn derived_subgroup(&self) -> Subgroup {
        let g = self.whole();
        self.commutator_subgroup(&g, &g)
    }

    /// `G = g_1 >= g_2 >= ...` until it stabilizes.
    pub fn lower_central_series(&self) -> Vec<Subgroup> {
        let g = self.whole();
        let mut series = vec![g];
        loop {
            let last = *series.last().unwrap();
            let next = self.commutator_subgroup(&last, &g);
            if next == last {
                return series;
            }
            series.push(next);
        }
    }

    /// Nilpotency class, `None` when the lower central series stops above 1.
    pub fn nilpotency_class(&self) -> Option<usize> {
        let series = self.lower_central_series();
        if series.last().unwrap().is_trivial() {
            Some(series.len() - 1)
        } else {
            None
        }
    }

    pub fn is_nilpotent(&self) -> bool {
        self.nilpotency_class().is_some()
    }

    pub fn cyclic_subgroups(&self) -> Vec<Subgroup> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for g in 0..self.order() {
            let c = self.closure(&[g]);
            if seen.insert(c) {
                out.push(c);
            }
        }
        out.sort();
        out
    }

    /// Every subgroup exactly once, sorted by order then member list. Built by
    /// joining cyclic subgroups onto known subgroups until nothing new appears.
    pub fn all_subgroups(&self) -> Result<Vec<Subgroup>> {
        if self.order() > LATTICE_MAX_ORDER {
            return Err(Error::LatticeBudget { order: self.order(), max: LATTICE_MAX_ORDER });
        }
        let cyclic = self.cyclic_subgroups();
        let mut seen: HashSet<Subgroup> = cyclic.iter().copied().collect();
        let mut list = cyclic.clone();
        let mut i = 0;
        while i < list.len() {
            let s = list[i];
            for c in &cyclic {
                if c.is_subgroup_of(&s) {
                    continue;
                }
                let j = self.join(&s, c);
                if seen.insert(j) {
                    list.push(j);
                }
            }
            i += 1;
        }
        list.sort();
        Ok(list)
    }

    /// A Sylow `r`-subgroup. When the `r`-elements form a subgroup it is
    /// returned; otherwise the least candidate in [`Subgroup`] order from the
    /// lattice, or, above the lattice budget, one grown greedily through
    /// normalizers.
    pub fn sylow_subgroup(&self, r: usize) -> Subgroup {
        let n = self.order();
        if r < 2 || !n.is_multiple_of(r) {
            return Subgroup::trivial();
        }
        let target = super::p_part(n as u128, r as u128) as usize;
        let r_elements = ElementSet::from_indices((0..n).filter(|&g| is_power_of(self.element_order(g), r)));
        if r_elements.len() == target {
            if let Some(s) = self.subgroup_from_set(r_elements) {
                return s;
            }
        }
        if let Ok(lattice) = self.all_subgroups() {
            if let Some(s) = lattice.into_iter().find(|s| s.order() == target) {
                return s;
            }
        }
        let mut h = Subgroup::trivial();
        while h.order() < target {
            let norm = self.normalizer(&h);
            let next = norm
                .members()
                .iter()
                .filter(|&x| !h.contains(x) && r_elements.contains(x))
                .map(|x| self.join(&h, &self.closure(&[x])))
                .find(|j| is_power_of(j.order(), r))
                .expect("a non-Sylow r-subgroup has a proper r-overgroup in its normalizer");
            h = next;
        }
        h
    }

    /// `(Syl_p(G), A)` when `G` is the internal direct product of a normal
    /// Sylow `p`-subgroup and a central subgroup of `p'`-order.
    pub fn central_p_complement(&self, p: usize) -> Option<(Subgroup, Subgroup)> {
        let n = self.order();
        let sylow = self.sylow_subgroup(p);
        if !self.is_normal(&sylow) {
            return None;
        }
        let coprime = ElementSet::from_indices((0..n).filter(|&g| !self.element_order(g).is_multiple_of(p)));
        let a = self.subgroup_from_set(coprime)?;
        if sylow.order() * a.order() != n || !a.is_subgroup_of(&self.center()) {
            return None;
        }
        Some((sylow, a))
    }

    /// The group `G/N` with cosets indexed by increasing least representative.
    pub fn quotient(&self, normal: &Subgroup) -> Result<Quotient> {
        if !self.is_normal(normal) {
            return Err(Error::NotNormal);
        }
        let n = self.order();
        let members = normal.elements();
        let rep_of: Vec<usize> = (0..n).map(|g| members.iter().map(|&h| self.mul(g, h)).min().unwrap()).collect();
        let mut representatives: Vec<usize> = rep_of.clone();
        representatives.sort_unstable();
        representatives.dedup();
        let mut coset_of = vec![0usize; n];
        for g in 0..n {
            coset_of[g] = representatives.binary_search(&rep_of[g]).unwrap();
        }
        let m = representatives.len();
        let rows: Vec<Vec<usize>> = representatives
            .iter()
            .map(|&a| representatives.iter().map(|&b| coset_of[self.mul(a, b)]).collect())
            .collect();
        let labels = representatives.iter().map(|&r| self.label(r).to_string()).collect();
        let group = FiniteGroup::from_table(format!("{}/N{}", self.name(), normal.order()), &rows, Some(labels))?;
        debug_assert_eq!(group.order(), m);
        Ok(Quotient { group, coset_of, representatives })
    }

    /// The subgroup as a standalone group, with elements in increasing parent
    /// order. Returns the group and the embedding into the parent.
    pub fn subgroup_as_group(&self, h: &Subgroup) -> (FiniteGroup, Vec<usize>) {
        let embed = h.elements();
        let pos = |x: usize| embed.binary_search(&x).unwrap();
        let rows: Vec<Vec<usize>> = embed.iter().map(|&a| embed.iter().map(|&b| pos(self.mul(a, b))).collect()).collect();
        let labels = embed.iter().map(|&x| self.label(x).to_string()).collect();
        let group = FiniteGroup::from_table(format!("{}<{}>", self.name(), h.order()), &rows, Some(labels))
            .expect("subgroup tables are valid");
        (group, embed)
    }

    /// Primes dividing the order.
    pub fn prime_divisors(&self) -> Vec<usize> {
        prime_divisors(self.order() as u64).into_iter().map(|p| p as usize).collect()
    }
}

#[cfg(test)]
mod tests {
    use crate::groups::{GroupSpec, Subgroup};

    use super::*;

    fn g(s: &str) -> FiniteGroup {
        GroupSpec::parse(s).unwrap().build().unwrap()
    }

    #[test]
    fn commutator_examples() {
        let s3 = g("S3");
        let t = s3.index_of_label("(12)").unwrap();
        let c = s3.index_of_label("(123)").unwrap();
        let comm = s3.commutator(t, c);
        assert_eq!(s3.element_order(comm), 3);
        for x in 0..6 {
            assert_eq!(s3.commutator(x, x), 0);
        }
        let c6 = g("C6");
        for x in 0..6 {
            for y in 0..6 {
                assert_eq!(c6.commutator(x, y), 0);
            }
        }
    }

    #[test]
    fn derived_and_center() {
        assert!(g("C7").derived_subgroup().is_trivial());
        let s3 = g("S3");
        let d = s3.derived_subgroup();
        assert_eq!(d.order(), 3);
        assert!(s3.is_normal(&d));
        assert!(s3.center().is_trivial());
        let d4 = g("D4");
        let r2 = d4.index_of_label("r^2").unwrap();
        let expected = Subgroup::from_set_unchecked(ElementSet::from_indices([0, r2]));
        assert_eq!(d4.derived_subgroup(), expected);
        assert_eq!(d4.center(), expected);
        assert_eq!(g("C2xC4").center().order(), 8);
    }

    #[test]
    fn lattice_counts() {
        assert_eq!(g("C5").all_subgroups().unwrap().len(), 2);
        assert_eq!(g("C6").all_subgroups().unwrap().len(), 4);
        assert_eq!(g("S3").all_subgroups().unwrap().len(), 6);
        assert_eq!(g("D4").all_subgroups().unwrap().len(), 10);
        assert_eq!(g("Q8").all_subgroups().unwrap().len(), 6);
        assert_eq!(g("C2xC2xC2").all_subgroups().unwrap().len(), 16);
        assert_eq!(g("S4").all_subgroups().unwrap().len(), 30);
        assert!(matches!(g("C2xC2xC2xC3xC3").all_subgroups(), Err(Error::LatticeBudget { .. })));
    }

    #[test]
    fn lattice_matches_subset_brute_force() {
        // every subset of a group of order <= 8 that contains 1 and is closed
        for name in ["S3", "D4", "Q8", "C2xC4", "C8"] {
            let grp = g(name);
            let n = grp.order();
            let mut brute = Vec::new();
            for mask in 0u32..(1 << n) {
                if mask & 1 == 0 {
                    continue;
                }
                let set = ElementSet::from_indices((0..n).filter(|&i| mask >> i & 1 == 1));
                if let Some(s) = grp.subgroup_from_set(set) {
                    brute.push(s);
                }
            }
            brute.sort();
            assert_eq!(grp.all_subgroups().unwrap(), brute, "{name}");
        }
    }

    #[test]
    fn sylow_examples() {
        let c6 = g("C6");
        assert_eq!(c6.sylow_subgroup(2).order(), 2);
        assert_eq!(c6.sylow_subgroup(5).order(), 1);
        let s3 = g("S3");
        let p3 = s3.sylow_subgroup(3);
        assert_eq!(p3, s3.derived_subgroup());
        assert!(s3.is_normal(&p3));
        let p2 = s3.sylow_subgroup(2);
        assert_eq!(p2.order(), 2);
        // least member list among the three Sylow 2-subgroups
        let least = s3.all_subgroups().unwrap().into_iter().find(|s| s.order() == 2).unwrap();
        assert_eq!(p2, least);
        let d4c3 = g("D4xC3");
        let p = d4c3.sylow_subgroup(2);
        assert_eq!(p.order(), 8);
        assert!(d4c3.is_normal(&p));
        assert!(!d4c3.is_abelian_subgroup(&p));
    }

    #[test]
    fn sylow_orders_exact_for_all_primes() {
        for name in ["S4", "D4xC3", "C2xC3", "Q12", "S3xC3", "D6"] {
            let grp = g(name);
            for r in grp.prime_divisors() {
                let s = grp.sylow_subgroup(r);
                assert_eq!(s.order() as u128, crate::groups::p_part(grp.order() as u128, r as u128), "{name} r={r}");
                assert!(grp.subgroup_from_set(*s.members()).is_some());
            }
        }
    }

    #[test]
    fn greedy_sylow_above_lattice_budget() {
        // S4 x C3 has order 72 > 64, Sylow 2-subgroups are not unique
        let grp = g("S4xC3");
        let s = grp.sylow_subgroup(2);
        assert_eq!(s.order(), 8);
        assert!(grp.subgroup_from_set(*s.members()).is_some());
        assert_eq!(grp.sylow_subgroup(3).order(), 9);
    }

    #[test]
    fn nilpotency_examples() {
        assert_eq!(g("C5").nilpotency_class(), Some(1));
        assert_eq!(g("C1").nilpotency_class(), Some(0));
        assert_eq!(g("D4").nilpotency_class(), Some(2));
        assert_eq!(g("SD16").nilpotency_class(), Some(3));
        assert_eq!(g("S3").nilpotency_class(), None);
        let s3 = g("S3");
        let series = s3.lower_central_series();
        assert_eq!(series.iter().map(|s| s.order()).collect::<Vec<_>>(), vec![6, 3]);
    }

    #[test]
    fn central_complement_examples() {
        let (p, a) = g("C6").central_p_complement(2).unwrap();
        assert_eq!((p.order(), a.order()), (2, 3));
        let d4c3 = g("D4xC3");
        let (p, a) = d4c3.central_p_complement(2).unwrap();
        assert_eq!((p.order(), a.order()), (8, 3));
        assert!(g("S3").central_p_complement(3).is_none());
        assert!(g("S3").central_p_complement(2).is_none());
    }

    #[test]
    fn nilpotent_groups_are_products_of_sylows() {
        for name in ["C12", "D4xC3", "Q8xC3", "C2xC3", "SD16", "C2xC4", "D4xS3"] {
            let grp = g(name);
            let sylows: Vec<Subgroup> = grp.prime_divisors().iter().map(|&r| grp.sylow_subgroup(r)).collect();
            let internal_product = sylows.iter().all(|s| grp.is_normal(s))
                && sylows.iter().enumerate().all(|(i, a)| {
                    sylows[i + 1..].iter().all(|b| {
                        a.elements().iter().all(|&x| b.elements().iter().all(|&y| grp.mul(x, y) == grp.mul(y, x)))
                    })
                });
            assert_eq!(internal_product, grp.is_nilpotent(), "{name}");
            if grp.is_nilpotent() {
                let all: Vec<usize> = sylows.iter().flat_map(|s| s.elements()).collect();
                assert_eq!(grp.closure(&all).order(), grp.order());
            }
        }
        // D4 x C3: the 2'-part is central, so the chain stops after one step
        let d4c3 = g("D4xC3");
        assert!(d4c3.central_p_complement(2).is_some());
        assert!(d4c3.central_p_complement(3).is_none());
    }

    #[test]
    fn derived_quotient_is_abelian() {
        for name in ["S3", "D4", "Q8", "S4", "SD16", "D4xC3"] {
            let grp = g(name);
            let d = grp.derived_subgroup();
            assert!(grp.is_normal(&d));
            let q = grp.quotient(&d).unwrap();
            assert!(q.group.is_abelian(), "{name}");
            assert_eq!(q.group.order() * d.order(), grp.order());
        }
    }

    #[test]
    fn quotient_requires_normal() {
        let s3 = g("S3");
        let p2 = s3.sylow_subgroup(2);
        assert!(matches!(s3.quotient(&p2), Err(Error::NotNormal)));
    }

    #[test]
    fn subgroup_as_group_embeds() {
        let d4 = g("D4");
        let z = d4.center();
        let (grp, embed) = d4.subgroup_as_group(&z);
        assert_eq!(grp.order(), 2);
        assert_eq!(embed[0], 0);
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(embed[grp.mul(a, b)], d4.mul(embed[a], embed[b]));
            }
        }
    }
}

//! Abelian invariants from the element-order census.
//!
//! For a finite abelian group the number of elements killed by `r^j`, for
//! every prime `r` and every `j`, determines the group up to isomorphism.

use super::{FiniteGroup, Subgroup};
use crate::error::{Error, Result};
use crate::finite_field::prime_divisors;

fn exact_log(mut count: u64, r: u64) -> Option<u32> {
    let mut k = 0;
    while count > 1 {
        if !count.is_multiple_of(r) {
            return None;
        }
        count /= r;
        k += 1;
    }
    Some(k)
}

/// Invariant factors `d_1 | d_2 | ... | d_m` (all > 1, product = group
/// order) of an abelian group given by the multiset of its element orders.
/// Fails when the census is not that of an abelian group.
pub fn invariants_from_orders(orders: &[u64]) -> Result<Vec<u64>> {
    let n = orders.len() as u64;
    let mut per_prime: Vec<Vec<u64>> = Vec::new();
    for r in prime_divisors(n) {
        let full = super::p_part(n as u128, r as u128) as u64;
        // s[j] = log_r #{x : x^(r^j) = 1}
        let mut s = vec![0u32];
        let mut rj = 1u64;
        loop {
            rj *= r;
            let count = orders.iter().filter(|&&o| rj.is_multiple_of(o)).count() as u64;
            if count > full {
                return Err(Error::NotAbelian);
            }
            let log = exact_log(count, r).ok_or(Error::NotAbelian)?;
            s.push(log);
            if count == full {
                break;
            }
            if s.len() > 64 {
                return Err(Error::NotAbelian);
            }
        }
        // at_least[j] = number of cyclic factors of order >= r^j
        let at_least: Vec<u32> = (1..s.len()).map(|j| s[j].checked_sub(s[j - 1]).ok_or(Error::NotAbelian)).collect::<Result<_>>()?;
        let mut powers = Vec::new();
        for j in 0..at_least.len() {
            let next = at_least.get(j + 1).copied().unwrap_or(0);
            let exactly = at_least[j].checked_sub(next).ok_or(Error::NotAbelian)?;
            for _ in 0..exactly {
                powers.push(r.pow(j as u32 + 1));
            }
        }
        // largest first
        powers.sort_unstable_by(|a, b| b.cmp(a));
        per_prime.push(powers);
    }
    let width = per_prime.iter().map(Vec::len).max().unwrap_or(0);
    let mut factors: Vec<u64> = (0..width).map(|i| per_prime.iter().map(|ps| ps.get(i).copied().unwrap_or(1)).product()).collect();
    factors.reverse();
    if factors.iter().product::<u64>() != n.max(1) {
        return Err(Error::NotAbelian);
    }
    Ok(factors)
}

impl FiniteGroup {
    pub fn abelian_invariants(&self, h: &Subgroup) -> Result<Vec<u64>> {
        if !self.is_abelian_subgroup(h) {
            return Err(Error::NotAbelian);
        }
        let orders: Vec<u64> = h.elements().iter().map(|&x| self.element_order(x) as u64).collect();
        invariants_from_orders(&orders)
    }

    pub fn group_abelian_invariants(&self) -> Result<Vec<u64>> {
        self.abelian_invariants(&self.whole())
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use crate::groups::GroupSpec;

    use super::*;

    fn inv(s: &str) -> Result<Vec<u64>> {
        GroupSpec::parse(s).unwrap().build().unwrap().group_abelian_invariants()
    }

    #[test]
    fn examples() {
        assert_eq!(inv("C2xC2").unwrap(), vec![2, 2]);
        assert_eq!(inv("C6").unwrap(), vec![6]);
        assert_eq!(inv("C2xC3").unwrap(), vec![6]);
        assert_eq!(inv("C2xC4").unwrap(), vec![2, 4]);
        assert_eq!(inv("C2xC2xC2").unwrap(), vec![2, 2, 2]);
        assert_eq!(inv("C4xC6").unwrap(), vec![2, 12]);
        assert_eq!(inv("C1").unwrap(), Vec::<u64>::new());
        assert_eq!(inv("S3"), Err(Error::NotAbelian));
    }

    #[test]
    fn non_abelian_census_is_rejected() {
        // S3 census: 1, three involutions, two 3-cycles
        assert!(invariants_from_orders(&[1, 2, 2, 2, 3, 3]).is_err());
    }

    #[test]
    fn subgroup_invariants() {
        let d4 = GroupSpec::parse("D4").unwrap().build().unwrap();
        assert_eq!(d4.abelian_invariants(&d4.center()).unwrap(), vec![2]);
        assert!(d4.abelian_invariants(&d4.whole()).is_err());
    }

    proptest! {
        #[test]
        fn relabeling_preserves_invariants(seed in any::<u64>(), which in 0usize..5) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let name = ["C2xC4", "C2xC2xC2", "C12", "C2xC6", "C3xC3"][which];
            let grp = GroupSpec::parse(name).unwrap().build().unwrap();
            let n = grp.order();
            let mut rest: Vec<usize> = (1..n).collect();
            rest.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let perm: Vec<usize> = std::iter::once(0).chain(rest).collect();
            let relabeled = grp.relabel(&perm).unwrap();
            prop_assert_eq!(relabeled.group_abelian_invariants().unwrap(), grp.group_abelian_invariants().unwrap());
        }
    }
}

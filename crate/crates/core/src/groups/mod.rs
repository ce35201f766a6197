//! Finite groups as validated Cayley tables.

mod abelian;
mod constructors;
mod subgroups;

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use abelian::invariants_from_orders;
pub use constructors::{CayleyFile, GroupSpec};
pub use subgroups::{Quotient, LATTICE_MAX_ORDER};

/// Largest supported group order.
pub const MAX_GROUP_ORDER: usize = 256;

/// Minimal group interface shared by Cayley-table groups and unit groups.
pub trait GroupOps {
    type Elem: Clone + Eq + Hash + fmt::Debug;

    fn identity(&self) -> Self::Elem;
    fn op(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inverse(&self, a: &Self::Elem) -> Self::Elem;

    /// `a^-1 b^-1 a b`
    fn comm(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let ia = self.inverse(a);
        let ib = self.inverse(b);
        let t = self.op(&ia, &ib);
        let t = self.op(&t, a);
        self.op(&t, b)
    }
}

/// Membership bitmask over the elements of a group of order at most 256.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ElementSet([u64; 4]);

impl ElementSet {
    pub fn empty() -> Self {
        ElementSet([0; 4])
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        let mut s = Self::empty();
        for i in it {
            s.insert(i);
        }
        s
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.0[i >> 6] >> (i & 63) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) -> bool {
        let had = self.contains(i);
        self.0[i >> 6] |= 1 << (i & 63);
        !had
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    pub fn intersection(&self, other: &ElementSet) -> ElementSet {
        let mut out = *self;
        for (a, b) in out.0.iter_mut().zip(&other.0) {
            *a &= b;
        }
        out
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..256).filter(move |&i| self.contains(i))
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A subgroup, stored as its membership mask. Operations that need the
/// product take the parent group explicitly.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Subgroup {
    members: ElementSet,
}

impl Subgroup {
    pub(crate) fn from_set_unchecked(members: ElementSet) -> Self {
        Subgroup { members }
    }

    pub fn trivial() -> Self {
        Subgroup { members: ElementSet::from_indices([0]) }
    }

    pub fn members(&self) -> &ElementSet {
        &self.members
    }

    pub fn contains(&self, g: usize) -> bool {
        self.members.contains(g)
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn elements(&self) -> Vec<usize> {
        self.members.iter().collect()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.members.is_subset(&other.members)
    }
}

impl PartialOrd for Subgroup {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Subgroups order by size, then by their sorted member lists.
impl Ord for Subgroup {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| self.members.iter().cmp(other.members.iter()))
    }
}

/// A group given by its multiplication table; element 0 is the identity.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    n: usize,
    table: Vec<u16>,
    inv: Vec<u16>,
    labels: Vec<String>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup").field("name", &self.name).field("order", &self.n).finish()
    }
}

impl FiniteGroup {
    /// Validates a Cayley table: Latin square, identity at index 0,
    /// associativity.
    pub fn from_table(name: impl Into<String>, rows: &[Vec<usize>], labels: Option<Vec<String>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidTable("empty table".into()));
        }
        if n > MAX_GROUP_ORDER {
            return Err(Error::GroupTooLarge { order: n, max: MAX_GROUP_ORDER });
        }
        let mut table = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidTable(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            for &x in row {
                if x >= n {
                    return Err(Error::InvalidTable(format!("entry {x} out of range in row {i}")));
                }
                table.push(x as u16);
            }
        }
        for i in 0..n {
            if table[i] as usize != i || table[i * n] as usize != i {
                return Err(Error::InvalidTable("index 0 is not the identity".into()));
            }
        }
        for i in 0..n {
            let mut seen_row = vec![false; n];
            let mut seen_col = vec![false; n];
            for j in 0..n {
                let r = table[i * n + j] as usize;
                let c = table[j * n + i] as usize;
                if std::mem::replace(&mut seen_row[r], true) {
                    return Err(Error::InvalidTable(format!("row {i} is not a permutation")));
                }
                if std::mem::replace(&mut seen_col[c], true) {
                    return Err(Error::InvalidTable(format!("column {i} is not a permutation")));
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = table[a * n + b] as usize;
                for c in 0..n {
                    let bc = table[b * n + c] as usize;
                    if table[ab * n + c] != table[a * n + bc] {
                        return Err(Error::InvalidTable(format!("not associative at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        let mut inv = vec![0u16; n];
        for a in 0..n {
            let row = &table[a * n..(a + 1) * n];
            inv[a] = row.iter().position(|&x| x == 0).expect("latin square") as u16;
        }
        let labels = match labels {
            Some(l) if l.len() != n => {
                return Err(Error::InvalidTable(format!("{} labels for {n} elements", l.len())));
            }
            Some(l) => {
                let mut uniq = std::collections::HashSet::new();
                if !l.iter().all(|s| uniq.insert(s.as_str())) {
                    return Err(Error::InvalidTable("duplicate labels".into()));
                }
                l
            }
            None => (0..n).map(|i| if i == 0 { "1".to_string() } else { format!("g{i}") }).collect(),
        };
        Ok(FiniteGroup { name: name.into(), n, table, inv, labels })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    pub fn label(&self, g: usize) -> &str {
        &self.labels[g]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn label_map(&self) -> HashMap<&str, usize> {
        self.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect()
    }

    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        (0..self.n).map(|a| (0..self.n).map(|b| self.mul(a, b)).collect()).collect()
    }

    pub fn pow(&self, a: usize, e: i64) -> usize {
        let base = if e < 0 { self.inv(a) } else { a };
        let mut result = 0;
        for _ in 0..e.unsigned_abs() {
            result = self.mul(result, base);
        }
        result
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// `x^-1 y^-1 x y`
    pub fn commutator(&self, x: usize, y: usize) -> usize {
        let t = self.mul(self.inv(x), self.inv(y));
        self.mul(self.mul(t, x), y)
    }

    /// `g^-1 x g`
    pub fn conjugate(&self, x: usize, g: usize) -> usize {
        self.mul(self.mul(self.inv(g), x), g)
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.n).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn exponent(&self) -> usize {
        (0..self.n).map(|g| self.element_order(g)).fold(1, lcm)
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup::from_set_unchecked(ElementSet::from_indices(0..self.n))
    }

    /// Renames elements by `perm` (old index -> new index); `perm[0]` must be 0.
    pub fn relabel(&self, perm: &[usize]) -> Result<FiniteGroup> {
        if perm.len() != self.n || perm[0] != 0 {
            return Err(Error::InvalidTable("relabeling must fix the identity".into()));
        }
        let mut rows = vec![vec![0; self.n]; self.n];
        let mut labels = vec![String::new(); self.n];
        for a in 0..self.n {
            labels[perm[a]] = self.labels[a].clone();
            for b in 0..self.n {
                rows[perm[a]][perm[b]] = perm[self.mul(a, b)];
            }
        }
        FiniteGroup::from_table(self.name.clone(), &rows, Some(labels))
    }
}

impl GroupOps for FiniteGroup {
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

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// True when `n` is a power of `p` (including `p^0 = 1`).
pub fn is_power_of(n: usize, p: usize) -> bool {
    let mut m = n;
    while m > 1 && m.is_multiple_of(p) {
        m /= p;
    }
    m == 1
}

/// The `p`-part of `n`.
pub fn p_part(n: u128, p: u128) -> u128 {
    let mut m = n;
    let mut out = 1;
    while m > 0 && m.is_multiple_of(p) {
        m /= p;
        out *= p;
    }
    out
}

/// Group data as serialized in Cayley-table files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableDocument {
    pub n: usize,
    pub table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl From<&FiniteGroup> for TableDocument {
    fn from(g: &FiniteGroup) -> Self {
        TableDocument { n: g.order(), table: g.table_rows(), labels: Some(g.labels().to_vec()) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_tables() {
        assert!(FiniteGroup::from_table("x", &[], None).is_err());
        // identity not at 0
        let t = vec![vec![1, 0], vec![0, 1]];
        assert!(FiniteGroup::from_table("x", &t, None).is_err());
        // latin square that is not associative: loop of order 5
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let err = FiniteGroup::from_table("loop", &t, None).unwrap_err();
        assert!(err.to_string().contains("associative"), "{err}");
        let t = vec![vec![0, 1], vec![1, 1]];
        assert!(FiniteGroup::from_table("x", &t, None).is_err());
        let t = vec![vec![0, 1], vec![1, 0]];
        assert!(FiniteGroup::from_table("x", &t, Some(vec!["e".into()])).is_err());
        assert!(FiniteGroup::from_table("x", &t, Some(vec!["e".into(), "e".into()])).is_err());
    }

    #[test]
    fn element_set_ops() {
        let mut s = ElementSet::empty();
        assert!(s.insert(200));
        assert!(!s.insert(200));
        s.insert(3);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![3, 200]);
        assert_eq!(s.len(), 2);
        let t = ElementSet::from_indices([3, 4, 200]);
        assert!(s.is_subset(&t));
        assert!(!t.is_subset(&s));
        assert_eq!(s.intersection(&t), s);
    }

    #[test]
    fn helpers() {
        assert!(is_power_of(1, 3));
        assert!(is_power_of(27, 3));
        assert!(!is_power_of(12, 2));
        assert_eq!(p_part(24, 2), 8);
        assert_eq!(p_part(24, 5), 1);
        assert_eq!(lcm(4, 6), 12);
    }
}

//! Named group constructors and the group-name grammar.
//!
//! Grammar: factors joined by `x` (direct product), each one of
//! `C<n>` cyclic, `D<n>` dihedral of order 2n, `Q<4m>` dicyclic (so `Q8` is
//! the quaternion group), `SD<2^m>` semidihedral, `S<n>` symmetric with
//! n <= 4, or `file:<path>` for a Cayley-table file.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::{FiniteGroup, TableDocument, MAX_GROUP_ORDER};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    Cyclic(usize),
    /// Dihedral group of order `2n`.
    Dihedral(usize),
    /// Dicyclic group of the given order (divisible by 4).
    Quaternion(usize),
    /// Semidihedral group of the given order (a power of 2, at least 16).
    Semidihedral(usize),
    Symmetric(usize),
    Product(Vec<GroupSpec>),
    File(PathBuf),
}

impl GroupSpec {
    pub fn parse(spec: &str) -> Result<Self> {
        let malformed = |reason: &str| Error::MalformedSpec { spec: spec.to_string(), reason: reason.to_string() };
        let s = spec.trim();
        if s.is_empty() {
            return Err(malformed("empty spec"));
        }
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(GroupSpec::File(PathBuf::from(path)));
        }
        let factors: Vec<&str> = s.split(['x', '×']).map(str::trim).collect();
        if factors.len() > 1 {
            let parts = factors
                .iter()
                .map(|f| {
                    if f.is_empty() {
                        Err(malformed("empty factor"))
                    } else {
                        parse_factor(f).map_err(|r| malformed(&r))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(GroupSpec::Product(parts));
        }
        parse_factor(s).map_err(|r| malformed(&r))
    }

    /// Order without building the table, where it is known up front.
    pub fn order_hint(&self) -> Option<usize> {
        match self {
            GroupSpec::Cyclic(n) => Some(*n),
            GroupSpec::Dihedral(n) => Some(2 * n),
            GroupSpec::Quaternion(n) | GroupSpec::Semidihedral(n) => Some(*n),
            GroupSpec::Symmetric(n) => Some((1..=*n).product()),
            GroupSpec::Product(fs) => fs.iter().map(|f| f.order_hint()).product(),
            GroupSpec::File(_) => None,
        }
    }

    pub fn build(&self) -> Result<FiniteGroup> {
        if let Some(order) = self.order_hint() {
            if order > MAX_GROUP_ORDER {
                return Err(Error::GroupTooLarge { order, max: MAX_GROUP_ORDER });
            }
        }
        let name = self.to_string();
        match self {
            GroupSpec::Cyclic(n) => cyclic(*n),
            GroupSpec::Dihedral(n) => metacyclic(&name, *n, 2, 0, n - 1, ("r", "s")),
            GroupSpec::Quaternion(order) => {
                let n = order / 2;
                metacyclic(&name, n, 2, n / 2, n - 1, ("a", "b"))
            }
            GroupSpec::Semidihedral(order) => {
                let n = order / 2;
                metacyclic(&name, n, 2, 0, n / 2 - 1, ("a", "b"))
            }
            GroupSpec::Symmetric(n) => symmetric(*n),
            GroupSpec::Product(fs) => {
                let groups = fs.iter().map(|f| f.build()).collect::<Result<Vec<_>>>()?;
                direct_product(&name, &groups)
            }
            GroupSpec::File(path) => CayleyFile::load(path),
        }
    }
}

fn parse_factor(s: &str) -> std::result::Result<GroupSpec, String> {
    let (head, digits) = s
        .find(|c: char| c.is_ascii_digit())
        .map(|i| s.split_at(i))
        .ok_or_else(|| format!("factor {s:?} has no size"))?;
    let n: usize = digits.parse().map_err(|_| format!("bad size in {s:?}"))?;
    if n == 0 {
        return Err(format!("zero size in {s:?}"));
    }
    match head {
        "C" => Ok(GroupSpec::Cyclic(n)),
        "D" => Ok(GroupSpec::Dihedral(n)),
        "Q" if n.is_multiple_of(4) => Ok(GroupSpec::Quaternion(n)),
        "Q" => Err(format!("dicyclic order {n} is not divisible by 4")),
        "SD" if n >= 16 && n.is_power_of_two() => Ok(GroupSpec::Semidihedral(n)),
        "SD" => Err(format!("semidihedral order {n} must be a power of 2, at least 16")),
        "S" if n <= 4 => Ok(GroupSpec::Symmetric(n)),
        "S" => Err(format!("symmetric degree {n} exceeds 4")),
        _ => Err(format!("unknown constructor {head:?}")),
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic(n) => write!(f, "C{n}"),
            GroupSpec::Dihedral(n) => write!(f, "D{n}"),
            GroupSpec::Quaternion(n) => write!(f, "Q{n}"),
            GroupSpec::Semidihedral(n) => write!(f, "SD{n}"),
            GroupSpec::Symmetric(n) => write!(f, "S{n}"),
            GroupSpec::Product(fs) => {
                let parts: Vec<String> = fs.iter().map(|g| g.to_string()).collect();
                write!(f, "{}", parts.join("x"))
            }
            GroupSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GroupSpec::parse(s)
    }
}

fn power_label(sym: &str, e: usize) -> String {
    match e {
        0 => String::new(),
        1 => sym.to_string(),
        _ => format!("{sym}^{e}"),
    }
}

fn cyclic(n: usize) -> Result<FiniteGroup> {
    let rows: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    let labels = (0..n).map(|i| if i == 0 { "1".to_string() } else { power_label("a", i) }).collect();
    FiniteGroup::from_table(format!("C{n}"), &rows, Some(labels))
}

/// Elements `b^e a^i` (index `e*n + i`) with `a^n = 1`, `b^m = a^t` and
/// `b^-1 a b = a^r`.
fn metacyclic(name: &str, n: usize, m: usize, t: usize, r: usize, syms: (&str, &str)) -> Result<FiniteGroup> {
    let order = n * m;
    // r^e mod n
    let rpow: Vec<usize> = (0..m)
        .scan(1 % n.max(1), |acc, _| {
            let cur = *acc;
            *acc = *acc * r % n;
            Some(cur)
        })
        .collect();
    let mut rows = vec![vec![0; order]; order];
    for x in 0..order {
        let (e1, i1) = (x / n, x % n);
        for y in 0..order {
            let (e2, i2) = (y / n, y % n);
            let mut e = e1 + e2;
            let mut i = i1 * rpow[e2] + i2;
            if e >= m {
                e -= m;
                i += t;
            }
            rows[x][y] = e * n + i % n;
        }
    }
    let labels = (0..order)
        .map(|x| {
            let (e, i) = (x / n, x % n);
            let s = format!("{}{}", power_label(syms.1, e), power_label(syms.0, i));
            if s.is_empty() {
                "1".to_string()
            } else {
                s
            }
        })
        .collect();
    FiniteGroup::from_table(name, &rows, Some(labels))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn cycle_label(perm: &[usize]) -> String {
    let mut seen = vec![false; perm.len()];
    let mut out = String::new();
    for start in 0..perm.len() {
        if seen[start] || perm[start] == start {
            continue;
        }
        out.push('(');
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            out.push_str(&(x + 1).to_string());
            x = perm[x];
        }
        out.push(')');
    }
    if out.is_empty() {
        "1".to_string()
    } else {
        out
    }
}

/// Permutations in lexicographic order; the product `gh` applies `g` first.
fn symmetric(n: usize) -> Result<FiniteGroup> {
    let perms = permutations(n);
    let index: std::collections::HashMap<&Vec<usize>, usize> = perms.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let rows: Vec<Vec<usize>> = perms
        .iter()
        .map(|g| {
            perms
                .iter()
                .map(|h| {
                    let gh: Vec<usize> = (0..n).map(|x| h[g[x]]).collect();
                    index[&gh]
                })
                .collect()
        })
        .collect();
    let labels = perms.iter().map(|p| cycle_label(p)).collect();
    FiniteGroup::from_table(format!("S{n}"), &rows, Some(labels))
}

/// Direct product with mixed-radix indexing; the last factor varies fastest.
fn direct_product(name: &str, groups: &[FiniteGroup]) -> Result<FiniteGroup> {
    let order: usize = groups.iter().map(|g| g.order()).product();
    if order > MAX_GROUP_ORDER {
        return Err(Error::GroupTooLarge { order, max: MAX_GROUP_ORDER });
    }
    let split = |mut x: usize| -> Vec<usize> {
        let mut parts = vec![0; groups.len()];
        for (slot, g) in parts.iter_mut().zip(groups).rev() {
            *slot = x % g.order();
            x /= g.order();
        }
        parts
    };
    let join = |parts: &[usize]| -> usize { parts.iter().zip(groups).fold(0, |acc, (&p, g)| acc * g.order() + p) };
    let coords: Vec<Vec<usize>> = (0..order).map(split).collect();
    let rows: Vec<Vec<usize>> = coords
        .iter()
        .map(|a| {
            coords
                .iter()
                .map(|b| {
                    let prod: Vec<usize> = groups.iter().enumerate().map(|(i, g)| g.mul(a[i], b[i])).collect();
                    join(&prod)
                })
                .collect()
        })
        .collect();
    let labels = coords
        .iter()
        .map(|c| {
            let parts: Vec<&str> = c.iter().zip(groups).map(|(&i, g)| g.label(i)).collect();
            format!("({})", parts.join(","))
        })
        .collect();
    FiniteGroup::from_table(name, &rows, Some(labels))
}

/// Cayley-table documents: JSON `{"n", "table", "labels"?}`, or plain text
/// with the order on the first line, then `n` rows of indices, then an
/// optional `labels:` line.
pub struct CayleyFile;

impl CayleyFile {
    pub fn load(path: &Path) -> Result<FiniteGroup> {
        let text = std::fs::read_to_string(path)?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "file".into());
        Self::parse(&name, &text)
    }

    pub fn parse(name: &str, text: &str) -> Result<FiniteGroup> {
        let doc = if text.trim_start().starts_with('{') {
            serde_json::from_str::<TableDocument>(text)?
        } else {
            Self::parse_text(text)?
        };
        if doc.table.len() != doc.n {
            return Err(Error::InvalidTable(format!("declared n = {} but {} rows", doc.n, doc.table.len())));
        }
        FiniteGroup::from_table(name, &doc.table, doc.labels)
    }

    fn parse_text(text: &str) -> Result<TableDocument> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let n: usize = lines
            .next()
            .ok_or_else(|| Error::InvalidTable("empty document".into()))?
            .parse()
            .map_err(|_| Error::InvalidTable("first line must be the order".into()))?;
        let mut table = Vec::with_capacity(n);
        let mut labels = None;
        for line in lines {
            if let Some(rest) = line.strip_prefix("labels:") {
                labels = Some(rest.split_whitespace().map(String::from).collect());
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| Error::InvalidTable(format!("bad entry {t:?}"))))
                .collect::<Result<Vec<_>>>()?;
            table.push(row);
        }
        Ok(TableDocument { n, table, labels })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_round_trip() {
        for s in ["C8", "D4", "Q8", "S3", "SD16", "D4xC3", "C2xC2xC2"] {
            assert_eq!(GroupSpec::parse(s).unwrap().to_string(), s);
        }
        assert_eq!(GroupSpec::parse("D4×C3").unwrap().to_string(), "D4xC3");
    }

    #[test]
    fn malformed_specs() {
        for s in ["", "X3", "C", "C0", "S5", "Q6", "SD8", "C2x", "xC2", "D4xx"] {
            assert!(matches!(GroupSpec::parse(s), Err(Error::MalformedSpec { .. })), "{s}");
        }
        assert!(matches!(GroupSpec::parse("C300").unwrap().build(), Err(Error::GroupTooLarge { .. })));
    }

    #[test]
    fn constructor_orders() {
        let cases = [("C6", 6), ("D4", 8), ("Q8", 8), ("Q12", 12), ("S3", 6), ("S4", 24), ("SD16", 16), ("D4xC3", 24), ("C1", 1), ("S1", 1)];
        for (s, n) in cases {
            let g = GroupSpec::parse(s).unwrap().build().unwrap();
            assert_eq!(g.order(), n, "{s}");
        }
        assert!(GroupSpec::parse("C6").unwrap().build().unwrap().is_abelian());
        assert!(!GroupSpec::parse("Q8").unwrap().build().unwrap().is_abelian());
    }

    #[test]
    fn quaternion_has_one_involution() {
        let q8 = GroupSpec::parse("Q8").unwrap().build().unwrap();
        let involutions = (0..8).filter(|&g| q8.element_order(g) == 2).count();
        assert_eq!(involutions, 1);
        let d4 = GroupSpec::parse("D4").unwrap().build().unwrap();
        assert_eq!((0..8).filter(|&g| d4.element_order(g) == 2).count(), 5);
        let sd = GroupSpec::parse("SD16").unwrap().build().unwrap();
        assert_eq!(sd.exponent(), 8);
        assert_eq!((0..16).filter(|&g| sd.element_order(g) == 2).count(), 5);
    }

    #[test]
    fn symmetric_labels() {
        let s3 = GroupSpec::parse("S3").unwrap().build().unwrap();
        assert_eq!(s3.label(0), "1");
        let mut labels: Vec<_> = s3.labels().to_vec();
        labels.sort();
        assert_eq!(labels, vec!["(12)", "(123)", "(13)", "(132)", "(23)", "1"]);
    }

    #[test]
    fn cayley_text_and_json() {
        let text = "3\n0 1 2\n1 2 0\n2 0 1\nlabels: e a b\n";
        let g = CayleyFile::parse("c3", text).unwrap();
        assert_eq!(g.order(), 3);
        assert_eq!(g.label(1), "a");
        let json = r#"{"n": 2, "table": [[0, 1], [1, 0]]}"#;
        assert_eq!(CayleyFile::parse("c2", json).unwrap().order(), 2);
        let bad = r#"{"n": 3, "table": [[0, 1], [1, 0]]}"#;
        assert!(CayleyFile::parse("bad", bad).is_err());
    }
}

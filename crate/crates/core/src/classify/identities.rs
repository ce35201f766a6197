//! Closed forms for iterated commutators `(u, a, ..., a)` of special units,
//! checked against direct computation in `FG`.

use serde_json::json;

use super::CheckOutcome;
use crate::error::{Error, Result};
use crate::group_algebra::{AlgebraElement, GroupAlgebra};

fn check_index(alg: &GroupAlgebra, g: usize) -> Result<()> {
    if g >= alg.group().order() {
        return Err(Error::Precondition(format!("group element {g} out of range")));
    }
    Ok(())
}

/// `(u, a, ..., a)` with `m` copies of the basis element `a`.
fn iterated_commutator(alg: &GroupAlgebra, u: &AlgebraElement, a: usize, m: u64) -> Option<AlgebraElement> {
    let group = alg.group();
    let a_el = alg.basis(a);
    let a_inv = alg.basis(group.inv(a));
    let mut c = u.clone();
    for _ in 0..m {
        let ci = alg.try_inverse(&c)?;
        c = alg.mul(&alg.mul(&ci, &a_inv), &alg.mul(&c, &a_el));
    }
    Some(c)
}

fn compare(alg: &GroupAlgebra, name: &str, lhs: Option<AlgebraElement>, rhs: AlgebraElement) -> CheckOutcome {
    match lhs {
        None => CheckOutcome::fail(name, "an intermediate term is not a unit", json!({ "rhs": alg.serialize(&rhs) })),
        Some(lhs) => CheckOutcome::check(name, lhs == rhs, "closed form differs from the commutator", || {
            json!({ "lhs": alg.serialize(&lhs), "rhs": alg.serialize(&rhs) })
        }),
    }
}

/// `(1 + x, a, ..., a) = 1 + x (a - 1)^m` for `x = â g (a - 1)`, where `â`
/// sums the cyclic subgroup generated by `a`. Holds over every field.
/// `x` vanishes unless `g` moves `<a>`; that case is skipped.
pub fn commutator_power_identity(alg: &GroupAlgebra, a: usize, g: usize, m: u64) -> Result<CheckOutcome> {
    const NAME: &str = "commutator-power-identity";
    check_index(alg, a)?;
    check_index(alg, g)?;
    let group = alg.group();
    let a_minus_1 = alg.sub(&alg.basis(a), &alg.one());
    let x = alg.mul(&alg.mul(&alg.hat(&group.closure(&[a])), &alg.basis(g)), &a_minus_1);
    if x.is_zero() {
        return Ok(CheckOutcome::skipped(NAME, "degenerate: x = 0"));
    }
    let lhs = iterated_commutator(alg, &alg.one_plus(&x), a, m);
    let rhs = alg.one_plus(&alg.mul(&x, &alg.pow(&a_minus_1, m)));
    Ok(compare(alg, NAME, lhs, rhs).with_details(json!({ "a": group.label(a), "g": group.label(g), "m": m })))
}

/// `(1 + e g, a, ..., a) = 1 + e g (b - 1)^n` with `b = g^-1 a^-1 g a`.
///
/// Requires `e g e = 0` and that `e`, `a`, `b` commute pairwise, as happens
/// for `e` in `FT`, `a` in `T` and `T` abelian normal. Skipped otherwise.
pub fn idempotent_commutator_identity(alg: &GroupAlgebra, e: &AlgebraElement, g: usize, a: usize, n: u64) -> Result<CheckOutcome> {
    const NAME: &str = "idempotent-commutator-identity";
    alg.check(e)?;
    check_index(alg, a)?;
    check_index(alg, g)?;
    let group = alg.group();
    let b = group.commutator(g, a);
    let eg = alg.mul(e, &alg.basis(g));
    let (a_el, b_el) = (alg.basis(a), alg.basis(b));
    let unmet = if !alg.mul(&eg, e).is_zero() {
        Some("e g e is not 0")
    } else if !alg.commutes(e, &a_el) {
        Some("e does not commute with a")
    } else if !alg.commutes(e, &b_el) {
        Some("e does not commute with b")
    } else if group.mul(a, b) != group.mul(b, a) {
        Some("a does not commute with b")
    } else {
        None
    };
    if let Some(why) = unmet {
        return Ok(CheckOutcome::skipped(NAME, format!("not-applicable: {why}")));
    }
    let lhs = iterated_commutator(alg, &alg.one_plus(&eg), a, n);
    let rhs = alg.one_plus(&alg.mul(&eg, &alg.pow(&alg.sub(&b_el, &alg.one()), n)));
    Ok(compare(alg, NAME, lhs, rhs).with_details(json!({ "a": group.label(a), "g": group.label(g), "b": group.label(b), "n": n })))
}

/// For `c` central of order `p = char F` and `q = p^m`:
/// `(1 + g ĉ, h, ..., h) = 1 + ĉ (h^-q g h^q - g)` with `q` copies of `h`.
///
/// Every intermediate step `k` is also compared with
/// `1 + ĉ sum_i (-1)^(k-i) C(k, i) h^-i g h^i`.
pub fn binomial_collapse_identity(alg: &GroupAlgebra, c: usize, g: usize, h: usize, m: u32) -> Result<CheckOutcome> {
    const NAME: &str = "binomial-collapse-identity";
    check_index(alg, c)?;
    check_index(alg, g)?;
    check_index(alg, h)?;
    let group = alg.group();
    let f = alg.field();
    let p = f.characteristic() as usize;
    if group.element_order(c) != p {
        return Ok(CheckOutcome::skipped(NAME, "not-applicable: c does not have order p"));
    }
    if !group.center().contains(c) {
        return Ok(CheckOutcome::skipped(NAME, "not-applicable: c is not central"));
    }
    let q = (p as u64).checked_pow(m).filter(|&q| q <= 1 << 12).ok_or_else(|| Error::Precondition("p^m too large".into()))?;
    let c_hat = alg.hat(&group.closure(&[c]));
    let conj = |i: u64| group.conjugate(g, group.pow(h, i as i64));
    let (h_el, h_inv) = (alg.basis(h), alg.basis(group.inv(h)));
    let mut cur = alg.one_plus(&alg.mul(&alg.basis(g), &c_hat));
    // binomial rows mod p
    let mut row = vec![f.one()];
    for k in 1..=q {
        let Some(ci) = alg.try_inverse(&cur) else {
            return Ok(CheckOutcome::fail(NAME, "an intermediate term is not a unit", json!({ "step": k })));
        };
        cur = alg.mul(&alg.mul(&ci, &h_inv), &alg.mul(&cur, &h_el));
        let mut next = vec![f.one(); k as usize + 1];
        for i in 1..k as usize {
            next[i] = f.add(row[i - 1], row[i]);
        }
        row = next;
        let sum = (0..=k).fold(alg.zero(), |acc, i| {
            let coeff = if (k - i) % 2 == 0 { row[i as usize] } else { f.neg(row[i as usize]) };
            alg.add(&acc, &alg.scale(coeff, &alg.basis(conj(i))))
        });
        let expected = alg.one_plus(&alg.mul(&c_hat, &sum));
        if cur != expected {
            return Ok(CheckOutcome::fail(NAME, "binomial expansion differs from the commutator", json!({
                "step": k, "lhs": alg.serialize(&cur), "rhs": alg.serialize(&expected)
            })));
        }
    }
    let collapsed = alg.one_plus(&alg.mul(&c_hat, &alg.sub(&alg.basis(conj(q)), &alg.basis(g))));
    Ok(compare(alg, NAME, Some(cur), collapsed).with_details(json!({
        "c": group.label(c), "g": group.label(g), "h": group.label(h), "q": q
    })))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::super::Status;
    use super::*;
    use crate::finite_field::{FieldElement, FiniteField};
    use crate::groups::GroupSpec;

    fn algebra(q: &str, g: &str) -> GroupAlgebra {
        GroupAlgebra::new(Arc::new(FiniteField::parse(q).unwrap()), Arc::new(GroupSpec::parse(g).unwrap().build().unwrap()))
    }

    #[test]
    fn commutator_power_holds_everywhere() {
        for (q, g) in [("2", "S3"), ("3", "S3"), ("2", "D4"), ("5", "Q8"), ("4", "C2xC4")] {
            let alg = algebra(q, g);
            let n = alg.group().order();
            let mut passed = 0;
            for a in 0..n {
                for x in 0..n {
                    for m in 0..=4 {
                        let out = commutator_power_identity(&alg, a, x, m).unwrap();
                        assert_ne!(out.status, Status::Fail, "{q} {g} {a} {x} {m}: {out:?}");
                        passed += usize::from(out.status == Status::Pass);
                    }
                }
            }
            // x = 0 exactly when every cyclic subgroup is normal
            let dedekind = alg.group().cyclic_subgroups().iter().all(|h| alg.group().is_normal(h));
            assert_eq!(passed == 0, dedekind, "{q} {g}");
        }
    }

    #[test]
    fn commutator_power_s3_example() {
        for q in ["2", "3"] {
            let alg = algebra(q, "S3");
            let group = alg.group();
            let a = (0..6).find(|&x| group.element_order(x) == 3).unwrap();
            let g = (0..6).find(|&x| group.element_order(x) == 2).unwrap();
            // <a> is normal, so x = 0 here; the reflection pair is the live one
            assert_eq!(commutator_power_identity(&alg, a, g, 1).unwrap().status, Status::Skipped);
            for m in 0..=4 {
                assert_eq!(commutator_power_identity(&alg, g, a, m).unwrap().status, Status::Pass);
            }
        }
    }

    #[test]
    fn binomial_collapse_on_d4() {
        let alg = algebra("2", "D4");
        let group = alg.group();
        let center = group.center();
        let c = center.elements().into_iter().find(|&z| z != 0).unwrap();
        for g in 0..8 {
            for h in 0..8 {
                for m in 0..=3 {
                    let out = binomial_collapse_identity(&alg, c, g, h, m).unwrap();
                    assert_eq!(out.status, Status::Pass, "{g} {h} {m}: {out:?}");
                }
            }
        }
        let non_central = (0..8).find(|&x| !center.contains(x) && group.element_order(x) == 2).unwrap();
        assert_eq!(binomial_collapse_identity(&alg, non_central, 1, 2, 1).unwrap().status, Status::Skipped);
        assert_eq!(binomial_collapse_identity(&alg, 0, 1, 2, 1).unwrap().status, Status::Skipped);
    }

    #[test]
    fn binomial_collapse_odd_characteristic() {
        let alg = algebra("3", "C3xS3");
        let group = alg.group();
        let c = group.center().elements().into_iter().find(|&z| z != 0).unwrap();
        for g in 0..group.order() {
            for h in 0..group.order() {
                let out = binomial_collapse_identity(&alg, c, g, h, 1).unwrap();
                assert_eq!(out.status, Status::Pass, "{out:?}");
            }
        }
    }

    #[test]
    fn idempotent_variant_on_s3_over_gf4() {
        let alg = algebra("4", "S3");
        let group = alg.group();
        let t = group.sylow_subgroup(3);
        let r = t.elements().into_iter().find(|&x| x != 0).unwrap();
        let s = (0..6).find(|&x| !t.contains(x)).unwrap();
        let t_elems = t.elements();
        let mut applied = 0;
        for code in 0..64u32 {
            let terms: Vec<(usize, FieldElement)> =
                t_elems.iter().enumerate().map(|(i, &g)| (g, FieldElement((code >> (2 * i)) & 3))).collect();
            let e = alg.from_terms(&terms);
            for n in 1..=4 {
                let out = idempotent_commutator_identity(&alg, &e, s, r, n).unwrap();
                assert_ne!(out.status, Status::Fail, "{out:?}");
                if out.status == Status::Pass {
                    applied += 1;
                }
            }
        }
        // the two nontrivial primitive idempotents of F C3 satisfy e s e = 0
        assert!(applied >= 8);
        assert_eq!(idempotent_commutator_identity(&alg, &alg.one(), s, r, 1).unwrap().status, Status::Skipped);
    }

    #[test]
    fn bad_indices_are_errors() {
        let alg = algebra("2", "S3");
        assert!(commutator_power_identity(&alg, 6, 0, 1).is_err());
        assert!(binomial_collapse_identity(&alg, 0, 0, 9, 1).is_err());
    }
}

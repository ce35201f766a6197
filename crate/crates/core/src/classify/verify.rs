//! Verifiers that re-derive the structural consequences of an Engel `V(FG)`
//! by brute force.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::case::CaseData;
use super::CheckOutcome;
use crate::error::{Error, Result};
use crate::finite_field::FieldElement;
use crate::group_algebra::{field_summand_count, GroupAlgebra, IdealBasis};
use crate::groups::{gcd, is_power_of, p_part, FiniteGroup, Subgroup};
use crate::unit_group::{is_two_sided_ideal, order_law_formula, SampleUnits, UnitGroup};

fn labels(group: &FiniteGroup, h: &Subgroup) -> Vec<String> {
    h.elements().into_iter().map(|g| group.label(g).to_string()).collect()
}

fn not_engel(names: &[&str]) -> Vec<CheckOutcome> {
    names.iter().map(|n| CheckOutcome::skipped(*n, "not-applicable: V is not Engel")).collect()
}

/// How the existence of a nonzero nilpotent element was decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NilpotentGate {
    /// Exhaustive scan of the augmentation ideal.
    Enumerated,
    /// `p` divides `|G|`: the sum over a subgroup of order `p` squares to 0.
    HatOfOrderP,
    /// Non-modular: `FG` is semisimple, and commutative exactly when `G` is.
    Semisimple,
}

/// Whether `FG` has a nonzero nilpotent element.
pub fn has_nonzero_nilpotent(case: &CaseData) -> (bool, NilpotentGate) {
    if let Ok(nil) = case.algebra.enumerate_nilpotents(&case.config.budget) {
        return (!nil.is_empty(), NilpotentGate::Enumerated);
    }
    let group = case.algebra.group();
    let p = case.characteristic();
    if group.order().is_multiple_of(p) {
        let c = (0..group.order()).find(|&g| group.element_order(g) == p).expect("Cauchy");
        let hat = case.algebra.hat(&group.closure(&[c]));
        debug_assert!(case.algebra.mul(&hat, &hat).is_zero());
        return (true, NilpotentGate::HatOfOrderP);
    }
    (!group.is_abelian(), NilpotentGate::Semisimple)
}

/// Subgroups of order prime to `p`: abelian, all their subgroups normal in
/// `G`, and all idempotents of `FH` central in `FG`.
pub fn verify_coprime_subgroups(case: &CaseData) -> Vec<CheckOutcome> {
    const NAMES: [&str; 3] = ["coprime-subgroups-abelian", "coprime-subgroups-normal", "coprime-idempotents-central"];
    if !case.engel.engel {
        return not_engel(&NAMES);
    }
    let alg = &case.algebra;
    let group = alg.group();
    let p = case.characteristic();
    let lattice = match group.all_subgroups() {
        Ok(l) => l,
        Err(e) => return NAMES.iter().map(|n| CheckOutcome::skipped(*n, format!("budget: {e}"))).collect(),
    };
    let admissible: Vec<&Subgroup> = lattice.iter().filter(|h| gcd(h.order(), p) == 1).collect();
    let count = json!({ "admissible_subgroups": admissible.len() });

    let abelian = admissible.iter().find_map(|h| {
        let els = h.elements();
        els.iter().flat_map(|&x| els.iter().map(move |&y| (x, y))).find(|&(x, y)| group.mul(x, y) != group.mul(y, x)).map(|(x, y)| {
            json!({ "subgroup": labels(group, h), "x": group.label(x), "y": group.label(y) })
        })
    });
    let abelian_outcome = match abelian {
        None => CheckOutcome::pass(NAMES[0]).with_details(count.clone()),
        Some(w) => CheckOutcome::fail(NAMES[0], "a coprime subgroup is not abelian", w),
    };

    let normal = admissible.iter().find_map(|h| {
        lattice.iter().filter(|k| k.is_subgroup_of(h)).find_map(|k| {
            (0..group.order()).find_map(|g| {
                k.elements().into_iter().find(|&x| !k.contains(group.conjugate(x, g))).map(|x| {
                    json!({ "subgroup": labels(group, h), "inner": labels(group, k), "conjugator": group.label(g), "element": group.label(x) })
                })
            })
        })
    });
    let normal_outcome = match normal {
        None => CheckOutcome::pass(NAMES[1]).with_details(count),
        Some(w) => CheckOutcome::fail(NAMES[1], "a subgroup of a coprime subgroup is not normal", w),
    };

    let mut checked = 0usize;
    let mut over_budget = 0usize;
    let mut central_witness = None;
    'outer: for h in &admissible {
        let idem = match alg.enumerate_idempotents(h, &case.config.budget) {
            Ok(i) => i,
            Err(_) => {
                over_budget += 1;
                continue;
            }
        };
        for e in &idem.elements {
            checked += 1;
            if let Some(g) = (0..group.order()).find(|&g| !alg.commutes(e, &alg.basis(g))) {
                central_witness = Some(json!({ "subgroup": labels(group, h), "idempotent": alg.serialize(e), "g": group.label(g) }));
                break 'outer;
            }
        }
    }
    let details = json!({ "idempotents_checked": checked, "subgroups_over_budget": over_budget });
    let central_outcome = match central_witness {
        Some(w) => CheckOutcome::fail(NAMES[2], "an idempotent of a coprime subalgebra is not central", w),
        None if checked == 0 && over_budget > 0 => CheckOutcome::skipped(NAMES[2], "budget: idempotent enumeration"),
        None => CheckOutcome::pass(NAMES[2]).with_details(details),
    };
    vec![abelian_outcome, normal_outcome, central_outcome]
}

/// With a nonzero nilpotent element and `V` Engel: `V` is nilpotent and
/// `G = P x A` with `A` central and `G' <= P`.
pub fn verify_nilpotent_elements(case: &CaseData) -> Vec<CheckOutcome> {
    const NAMES: [&str; 4] = ["v-nilpotent", "sylow-nontrivial", "derived-in-sylow", "central-complement"];
    let (has_nilpotent, gate) = has_nonzero_nilpotent(case);
    if !has_nilpotent {
        return NAMES
            .iter()
            .map(|n| CheckOutcome::skipped(*n, "not-applicable: FG has no nonzero nilpotent element").with_details(json!({ "gate": gate })))
            .collect();
    }
    if !case.engel.engel {
        return not_engel(&NAMES);
    }
    let group = case.algebra.group();
    let p = case.characteristic();
    let sylow = group.sylow_subgroup(p);
    let derived = group.derived_subgroup();
    let v_nilpotent = match case.v_class {
        Some(Some(c)) => CheckOutcome::pass(NAMES[0]).with_details(json!({ "class": c })),
        Some(None) => CheckOutcome::fail(
            NAMES[0],
            "lower central series of V stalls above 1",
            json!({ "series_orders": case.units.as_ref().map(|v| v.lower_central_series().iter().map(|s| s.order()).collect::<Vec<_>>()) }),
        ),
        None => CheckOutcome::skipped(NAMES[0], "budget: V too large for the lower central series"),
    };
    vec![
        v_nilpotent,
        CheckOutcome::check(NAMES[1], !sylow.is_trivial(), "Sylow p-subgroup is trivial", || json!({ "p": p })),
        CheckOutcome::check(NAMES[2], derived.is_subgroup_of(&sylow), "G' is not inside the Sylow p-subgroup", || {
            json!({ "derived": labels(group, &derived), "sylow": labels(group, &sylow) })
        }),
        CheckOutcome::check(NAMES[3], group.central_p_complement(p).is_some(), "no central p'-complement", || {
            json!({ "sylow": labels(group, &sylow), "center": labels(group, &group.center()) })
        }),
    ]
}

/// `|V(FG)| = q^(|G| - [G:P]) |V(F[G/P])|` for a normal Sylow `P`.
pub fn verify_order_law(case: &CaseData) -> Vec<CheckOutcome> {
    const NAME: &str = "order-law";
    let alg = &case.algebra;
    let group = alg.group();
    let p = case.characteristic();
    if !case.is_modular() {
        return vec![CheckOutcome::skipped(NAME, "not-applicable: non-modular")];
    }
    let sylow = group.sylow_subgroup(p);
    if !group.is_normal(&sylow) {
        return vec![CheckOutcome::skipped(NAME, "not-applicable: Sylow p-subgroup is not normal")];
    }
    let result = (|| -> Result<CheckOutcome> {
        let quotient = group.quotient(&sylow)?;
        let target = GroupAlgebra::new(alg.field_arc(), Arc::new(quotient.group.clone()));
        let w = target.enumerate_normalized_units(&case.config.budget)?;
        let q = alg.field().order() as u64;
        let formula = order_law_formula(q, group.order(), sylow.order(), w.order() as u64);
        if let Some(v) = &case.units {
            let ok = v.order() as u128 == formula;
            return Ok(CheckOutcome::check(NAME, ok, "enumerated |V| differs from the order law", || {
                json!({ "enumerated": v.order(), "formula": formula.to_string() })
            })
            .with_details(json!({ "enumerated": v.order(), "formula": formula.to_string(), "quotient_units": w.order() })));
        }
        // Sampled tier: x is a unit exactly when its image in F[G/P] is.
        let mut rng = ChaCha8Rng::seed_from_u64(case.config.seed);
        let samples = case.config.samples.min(10_000);
        let qf = alg.field().order();
        for i in 0..samples {
            let mut coeffs: Vec<FieldElement> = (0..alg.dim()).map(|_| FieldElement(rng.gen_range(0..qf))).collect();
            let aug = alg.augmentation(&alg.from_coeffs(coeffs.clone())?);
            coeffs[0] = alg.field().add(coeffs[0], alg.field().sub(FieldElement::ONE, aug));
            let x = alg.from_coeffs(coeffs)?;
            let (unit, image_unit) = alg.unit_iff_collapse_unit(&x, &sylow)?;
            if unit != image_unit {
                return Ok(CheckOutcome::fail(NAME, "unit status differs from that of the image", json!({
                    "sample": i, "x": alg.serialize(&x), "unit": unit, "image_unit": image_unit
                })));
            }
        }
        Ok(CheckOutcome::pass(NAME).with_details(json!({
            "formula": formula.to_string(), "quotient_units": w.order(), "formula_derived": true, "samples": samples
        })))
    })();
    vec![result.unwrap_or_else(|e| CheckOutcome::skipped(NAME, format!("budget: {e}")))]
}

/// Sylow structure of an Engel `V(FG)` in the modular case.
pub fn verify_sylow_structure(case: &CaseData) -> Vec<CheckOutcome> {
    const NAMES: [&str; 5] = [
        "derived-in-one-plus-ideal",
        "sylow-is-one-plus-ideal",
        "coprime-sylows-central",
        "sylow-direct-product",
        "quotient-matches-coprime-part",
    ];
    let alg = &case.algebra;
    let group = alg.group();
    let p = case.characteristic();
    let sylow = group.sylow_subgroup(p);
    let derived = group.derived_subgroup();
    let gate = if !case.is_modular() {
        Some("not-applicable: non-modular")
    } else if !is_power_of(derived.order(), p) {
        Some("not-applicable: G' is not a p-group")
    } else if !group.is_normal(&sylow) {
        Some("not-applicable: Sylow p-subgroup is not normal")
    } else if !case.engel.engel {
        Some("not-applicable: V is not Engel")
    } else {
        None
    };
    if let Some(reason) = gate {
        return NAMES.iter().map(|n| CheckOutcome::skipped(*n, reason)).collect();
    }
    let mut out = Vec::new();
    out.push(guard(NAMES[0], || derived_in_one_plus_ideal(case, &derived)));
    out.push(guard(NAMES[1], || sylow_is_one_plus_ideal(case, &sylow)));
    let offending = group
        .prime_divisors()
        .into_iter()
        .filter(|&r| r != p)
        .map(|r| (r, group.sylow_subgroup(r)))
        .find(|(_, s)| !s.is_subgroup_of(&group.center()));
    out.push(CheckOutcome::check(NAMES[2], offending.is_none(), "a Sylow subgroup for another prime is not central", || {
        let (r, s) = offending.expect("present on failure");
        json!({ "prime": r, "sylow": labels(group, &s), "center": labels(group, &group.center()) })
    }));
    let split = group.central_p_complement(p);
    out.push(CheckOutcome::check(NAMES[3], split.is_some(), "G is not P x D", || json!({ "sylow": labels(group, &sylow) })));
    out.push(match split {
        Some((_, d)) => guard(NAMES[4], || quotient_matches_coprime_part(case, &sylow, &d)),
        None => CheckOutcome::skipped(NAMES[4], "not-applicable: no complement D"),
    });
    out
}

fn guard(name: &str, f: impl FnOnce() -> Result<CheckOutcome>) -> CheckOutcome {
    f().unwrap_or_else(|e| match e {
        Error::BudgetExceeded { .. } | Error::LatticeBudget { .. } => CheckOutcome::skipped(name, format!("budget: {e}")),
        other => CheckOutcome::fail(name, format!("error: {other}"), json!({ "error": other.to_string() })),
    })
}

fn derived_in_one_plus_ideal(case: &CaseData, derived: &Subgroup) -> Result<CheckOutcome> {
    const NAME: &str = "derived-in-one-plus-ideal";
    let alg = &case.algebra;
    let ideal = alg.rel_aug_ideal(derived)?;
    let f = alg.field();
    let in_ideal = |x: &crate::group_algebra::AlgebraElement| ideal.contains(f, &alg.sub(x, &alg.one()));
    if let Some(v) = case.units.as_ref().filter(|v| v.order() <= case.config.engel_exhaustive_max) {
        v.ensure_table();
        let member: Vec<bool> = v.elements().map(|x| in_ideal(&x)).collect();
        let n = v.order();
        for x in 0..n {
            for y in 0..n {
                let c = v.comm(x, y);
                if !member[c] {
                    return Ok(CheckOutcome::fail(NAME, "a commutator of V lies outside 1 + J(G')", json!({
                        "x": alg.serialize(&v.element(x)), "y": alg.serialize(&v.element(y))
                    })));
                }
            }
        }
        return Ok(CheckOutcome::pass(NAME).with_details(json!({ "mode": "exhaustive", "pairs": (n * n) as u64 })));
    }
    let samples = case.config.samples;
    let check = |x: crate::group_algebra::AlgebraElement, y: crate::group_algebra::AlgebraElement| -> Option<Value> {
        let xi = alg.try_inverse(&x).expect("unit");
        let yi = alg.try_inverse(&y).expect("unit");
        let c = alg.mul(&alg.mul(&xi, &yi), &alg.mul(&x, &y));
        (!in_ideal(&c)).then(|| json!({ "x": alg.serialize(&x), "y": alg.serialize(&y) }))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(case.config.seed ^ 0x5eed);
    for _ in 0..samples {
        let (x, y) = match &case.units {
            Some(v) => (v.element(v.sample(&mut rng)), v.element(v.sample(&mut rng))),
            None => (case.implicit.sample(&mut rng), case.implicit.sample(&mut rng)),
        };
        if let Some(w) = check(x, y) {
            return Ok(CheckOutcome::fail(NAME, "a sampled commutator lies outside 1 + J(G')", w));
        }
    }
    Ok(CheckOutcome::pass(NAME).with_details(json!({ "mode": "sampled", "pairs": samples, "seed": case.config.seed })))
}

fn sylow_is_one_plus_ideal(case: &CaseData, sylow: &Subgroup) -> Result<CheckOutcome> {
    const NAME: &str = "sylow-is-one-plus-ideal";
    let alg = &case.algebra;
    let p = case.characteristic() as u64;
    let ideal = alg.rel_aug_ideal(sylow)?;
    if let Some(v) = &case.units {
        let s = v.one_plus_ideal_subgroup(&ideal, p)?;
        let ok = s.is_subgroup && s.is_normal && s.order_matches_p_part;
        let details = json!({
            "order": s.subgroup.order(), "p_part_of_v": s.p_part_of_v.to_string(), "method": s.method,
            "is_subgroup": s.is_subgroup, "is_normal": s.is_normal,
        });
        return Ok(CheckOutcome::check(NAME, ok, "1 + J(P) is not the normal Sylow p-subgroup of V", || details.clone())
            .with_details(details));
    }
    // Formula tier: J(P) is a two-sided ideal, sampled 1 + z are units, and
    // |V| / q^dim J(P) = |V(F[G/P])| is prime to p.
    let two_sided = is_two_sided_ideal(alg, &ideal);
    let quotient = alg.group().quotient(sylow)?;
    let target = GroupAlgebra::new(alg.field_arc(), Arc::new(quotient.group.clone()));
    let w = target.enumerate_normalized_units(&case.config.budget)?;
    let coprime_rest = p_part(w.order() as u128, p as u128) == 1;
    let mut rng = ChaCha8Rng::seed_from_u64(case.config.seed ^ 0x1dea1);
    let samples = case.config.samples.min(10_000);
    let qf = alg.field().order();
    let random_member = |rng: &mut ChaCha8Rng| {
        ideal.basis().iter().fold(alg.zero(), |acc, b| alg.add(&acc, &alg.scale(FieldElement(rng.gen_range(0..qf)), b)))
    };
    let bad = (0..samples).map(|_| random_member(&mut rng)).find(|z| alg.try_inverse(&alg.one_plus(z)).is_none());
    let ok = two_sided && coprime_rest && bad.is_none();
    let details = json!({
        "ideal_dimension": ideal.dimension(), "two_sided": two_sided, "quotient_units": w.order(),
        "unit_samples": samples, "formula_derived": true,
    });
    Ok(CheckOutcome::check(NAME, ok, "1 + J(P) does not have the Sylow order", || {
        json!({ "non_unit": bad.as_ref().map(|z| alg.serialize(&alg.one_plus(z))), "two_sided": two_sided, "coprime_rest": coprime_rest })
    })
    .with_details(details))
}

fn quotient_matches_coprime_part(case: &CaseData, sylow: &Subgroup, d: &Subgroup) -> Result<CheckOutcome> {
    const NAME: &str = "quotient-matches-coprime-part";
    let alg = &case.algebra;
    let group = alg.group();
    let quotient = group.quotient(sylow)?;
    let vq = GroupAlgebra::new(alg.field_arc(), Arc::new(quotient.group.clone())).enumerate_normalized_units(&case.config.budget)?;
    let (dg, _) = group.subgroup_as_group(d);
    let vd = GroupAlgebra::new(alg.field_arc(), Arc::new(dg)).enumerate_normalized_units(&case.config.budget)?;
    let inv_q = vq.abelian_invariants()?;
    let inv_d = vd.abelian_invariants()?;
    let n = field_summand_count(group, d, alg.field().order() as u64)?;
    let ok = vq.order() == vd.order() && inv_q == inv_d;
    let details = json!({ "quotient_units": vq.order(), "coprime_units": vd.order(), "invariants": inv_q, "summands": n });
    Ok(CheckOutcome::check(NAME, ok, "V(F[G/P]) and V(FD) differ", || json!({ "quotient": inv_q, "coprime": inv_d }))
        .with_details(details))
}

/// In the modular case: `V` nilpotent exactly when `G` is nilpotent with
/// `G'` a `p`-group, and `V / (1 + J(P))` matches `V(F[G/P])` and `V(FD)`.
pub fn verify_modular_criterion(case: &CaseData) -> Vec<CheckOutcome> {
    const NAMES: [&str; 2] = ["nilpotency-criterion", "projection-isomorphism"];
    if !case.is_modular() {
        return NAMES.iter().map(|n| CheckOutcome::skipped(*n, "not-applicable: non-modular")).collect();
    }
    let alg = &case.algebra;
    let group = alg.group();
    let p = case.characteristic();
    let group_side = group.is_nilpotent() && is_power_of(group.derived_subgroup().order(), p);
    let criterion = match case.v_class {
        Some(class) => CheckOutcome::check(NAMES[0], class.is_some() == group_side, "V nilpotency disagrees with the group criterion", || {
            json!({ "v_class": class, "group_nilpotent": group.is_nilpotent(), "derived_order": group.derived_subgroup().order() })
        })
        .with_details(json!({ "v_nilpotent": class.is_some(), "group_side": group_side })),
        None => CheckOutcome::skipped(NAMES[0], "budget: V too large for the lower central series"),
    };
    let sylow = group.sylow_subgroup(p);
    let projection = if !group.is_normal(&sylow) {
        CheckOutcome::skipped(NAMES[1], "not-applicable: Sylow p-subgroup is not normal")
    } else if let Some(v) = &case.units {
        guard(NAMES[1], || projection_isomorphism(case, v, &sylow))
    } else {
        CheckOutcome::skipped(NAMES[1], "budget: V not enumerated")
    };
    vec![criterion, projection]
}

fn projection_isomorphism(case: &CaseData, v: &UnitGroup, sylow: &Subgroup) -> Result<CheckOutcome> {
    const NAME: &str = "projection-isomorphism";
    let alg = &case.algebra;
    let group = alg.group();
    let ideal: IdealBasis = alg.rel_aug_ideal(sylow)?;
    let report = v.natural_projection_check(sylow, &ideal, &case.config.budget)?;
    let mut ok = report.holds();
    let mut coprime_invariants = None;
    if let Some((_, d)) = group.central_p_complement(case.characteristic()) {
        let (dg, _) = group.subgroup_as_group(&d);
        let vd = GroupAlgebra::new(alg.field_arc(), Arc::new(dg)).enumerate_normalized_units(&case.config.budget)?;
        let inv = vd.abelian_invariants()?;
        ok &= report.cokernel_invariants.as_ref() == Some(&inv);
        coprime_invariants = Some(inv);
    }
    let details = json!({ "projection": report, "coprime_invariants": coprime_invariants });
    Ok(CheckOutcome::check(NAME, ok, "V / (1 + J(P)) does not match", || details.clone()).with_details(details))
}

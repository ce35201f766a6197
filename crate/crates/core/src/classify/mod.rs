//! Structural predictions for `V(FG)` and verifiers that compare them with
//! brute force.

mod case;
mod identities;
mod verify;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::finite_field::FiniteField;
use crate::groups::{is_power_of, FiniteGroup, Subgroup, LATTICE_MAX_ORDER};

pub use case::{replay_engel_witness, CaseData, CheckConfig, EngelSummary, UnitsTier};
pub use identities::{binomial_collapse_identity, commutator_power_identity, idempotent_commutator_identity};
pub use verify::{
    has_nonzero_nilpotent, verify_coprime_subgroups, verify_modular_criterion, verify_nilpotent_elements,
    verify_order_law, verify_sylow_structure, NilpotentGate,
};

/// Which clause decided a prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rationale {
    /// `p` divides `|G|`: nilpotent `G` with `G'` a `p`-group.
    Modular,
    /// Non-modular with the torsion part central.
    CentralTorsion,
    /// Non-modular, prime field of Mersenne characteristic with power action.
    Mersenne,
    /// Non-modular and no clause applies.
    None,
}

/// Subchecks of the Mersenne clause, reported even when it cannot fire.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MersenneTrace {
    pub prime_field: bool,
    /// `t` with `p = 2^t - 1`, when it exists.
    pub mersenne_exponent: Option<u32>,
    pub exponent_divides: bool,
    /// Order of the abelian normal subgroup the action was tested on.
    pub action_subgroup_order: usize,
    pub action: bool,
    pub torsion_abelian: bool,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub locally_nilpotent: bool,
    pub rationale: Rationale,
    pub modular: bool,
    pub group_nilpotent: bool,
    pub derived_is_p_group: bool,
    pub torsion_abelian: bool,
    pub torsion_central: bool,
    pub mersenne: MersenneTrace,
}

/// Predicts whether `V(FG)` is (locally) nilpotent from `G` and `F` alone.
pub fn predict_locally_nilpotent(group: &FiniteGroup, field: &FiniteField) -> Prediction {
    let p = field.characteristic() as usize;
    let modular = group.order().is_multiple_of(p);
    let group_nilpotent = group.is_nilpotent();
    let derived_is_p_group = is_power_of(group.derived_subgroup().order(), p);
    let torsion_abelian = group.is_abelian();
    // the torsion part of a finite group is the whole group
    let torsion_central = torsion_abelian;
    let mersenne = mersenne_trace(group, field);
    let (locally_nilpotent, rationale) = if modular {
        (group_nilpotent && derived_is_p_group, Rationale::Modular)
    } else if group_nilpotent && torsion_abelian && torsion_central {
        (true, Rationale::CentralTorsion)
    } else if group_nilpotent && mersenne.holds {
        (true, Rationale::Mersenne)
    } else {
        (false, Rationale::None)
    };
    Prediction {
        locally_nilpotent,
        rationale,
        modular,
        group_nilpotent,
        derived_is_p_group,
        torsion_abelian,
        torsion_central,
        mersenne,
    }
}

fn mersenne_trace(group: &FiniteGroup, field: &FiniteField) -> MersenneTrace {
    let p = field.characteristic() as u64;
    let prime_field = field.degree() == 1;
    let mersenne_exponent = (p + 1).is_power_of_two().then(|| (p + 1).trailing_zeros());
    let exponent_divides = (p * p - 1).is_multiple_of(group.exponent() as u64);
    let a = action_subgroup(group);
    let centralizer = group.centralizer(&a);
    let action = (0..group.order())
        .filter(|&g| !centralizer.contains(g))
        .all(|g| a.elements().into_iter().all(|x| group.conjugate(x, g) == group.pow(x, p as i64)));
    let torsion_abelian = group.is_abelian();
    MersenneTrace {
        prime_field,
        mersenne_exponent,
        exponent_divides,
        action_subgroup_order: a.order(),
        action,
        torsion_abelian,
        holds: prime_field && mersenne_exponent.is_some() && exponent_divides && action && torsion_abelian,
    }
}

/// The abelian normal subgroup of largest order, least member list on ties.
/// Taken from the subgroup lattice when it is within budget, otherwise from
/// the cyclic subgroups.
pub fn action_subgroup(group: &FiniteGroup) -> Subgroup {
    let candidates =
        if group.order() <= LATTICE_MAX_ORDER { group.all_subgroups().unwrap_or_default() } else { group.cyclic_subgroups() };
    candidates
        .into_iter()
        .filter(|h| group.is_normal(h) && group.is_abelian_subgroup(h))
        .min_by(|a, b| b.order().cmp(&a.order()).then_with(|| a.cmp(b)))
        .unwrap_or_else(Subgroup::trivial)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// Result of one named check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl CheckOutcome {
    pub fn pass(name: impl Into<String>) -> Self {
        CheckOutcome { name: name.into(), status: Status::Pass, reason: None, details: None, witness: None }
    }

    pub fn fail(name: impl Into<String>, reason: impl Into<String>, witness: Value) -> Self {
        CheckOutcome { name: name.into(), status: Status::Fail, reason: Some(reason.into()), details: None, witness: Some(witness) }
    }

    pub fn skipped(name: impl Into<String>, reason: impl Into<String>) -> Self {
        CheckOutcome { name: name.into(), status: Status::Skipped, reason: Some(reason.into()), details: None, witness: None }
    }

    /// Pass when `ok`, otherwise fail with `witness`.
    pub fn check(name: impl Into<String>, ok: bool, reason: impl Into<String>, witness: impl FnOnce() -> Value) -> Self {
        if ok {
            Self::pass(name)
        } else {
            Self::fail(name, reason, witness())
        }
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = Some(details);
        self
    }

    pub fn with_reason(mut self, reason: impl Into<String>) -> Self {
        self.reason = Some(reason.into());
        self
    }

    pub fn is_fail(&self) -> bool {
        self.status == Status::Fail
    }
}

//! Shared brute-force data for one `(G, F)` case.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group_algebra::{AlgebraElement, EnumerationBudget, GroupAlgebra, SerializedElement};
use crate::groups::GroupOps;
use crate::unit_group::{
    engel_sampled_test, engel_trace, replay_witness, EngelMode, EngelVerdict, EngelWitness, ImplicitUnits, UnitGroup,
    DEFAULT_ENGEL_EXHAUSTIVE_MAX, DEFAULT_MAX_ENGEL_STEPS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckConfig {
    pub budget: EnumerationBudget,
    pub engel_exhaustive_max: usize,
    pub samples: u64,
    pub seed: u64,
    pub max_engel_steps: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            budget: EnumerationBudget::default(),
            engel_exhaustive_max: DEFAULT_ENGEL_EXHAUSTIVE_MAX,
            samples: 100_000,
            seed: 42,
            max_engel_steps: DEFAULT_MAX_ENGEL_STEPS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitsTier {
    /// `V` enumerated and small enough for exhaustive pair tests.
    Exhaustive,
    /// Engel and commutator properties tested on seeded samples.
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngelSummary {
    pub engel: bool,
    pub exhaustive: bool,
    pub max_depth: usize,
    pub pairs_tested: u64,
    pub undecided: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

/// Everything the verifiers share about one case.
#[derive(Debug)]
pub struct CaseData {
    pub algebra: GroupAlgebra,
    pub config: CheckConfig,
    pub units: Option<UnitGroup>,
    pub implicit: ImplicitUnits,
    pub tier: UnitsTier,
    pub engel: EngelSummary,
    /// `Some(class)` when the lower central series of `V` was computed.
    pub v_class: Option<Option<usize>>,
}

impl CaseData {
    pub fn build(algebra: GroupAlgebra, config: CheckConfig) -> Result<Self> {
        let units = match algebra.enumerate_normalized_units(&config.budget) {
            Ok(v) => Some(v),
            Err(Error::BudgetExceeded { .. }) => None,
            Err(e) => return Err(e),
        };
        let implicit = ImplicitUnits::new(algebra.clone());
        let small = units.as_ref().filter(|v| v.order() <= config.engel_exhaustive_max);
        let tier = if small.is_some() { UnitsTier::Exhaustive } else { UnitsTier::Sampled };
        let engel = match (&units, small) {
            (_, Some(v)) => {
                let verdict = v.engel_test(EngelMode::Exhaustive { cap: config.engel_exhaustive_max })?;
                summarize(&verdict, |w| witness_json(&algebra, v, w, |i| v.element(*i)))
            }
            (Some(v), None) => {
                let verdict = v.engel_test(EngelMode::Sampled {
                    count: config.samples,
                    seed: config.seed,
                    max_steps: config.max_engel_steps,
                })?;
                summarize(&verdict, |w| witness_json(&algebra, v, w, |i| v.element(*i)))
            }
            (None, None) => {
                let verdict = engel_sampled_test(&implicit, config.samples, config.seed, config.max_engel_steps);
                summarize(&verdict, |w| witness_json(&algebra, &implicit, w, |x| x.clone()))
            }
        };
        let v_class = match small {
            Some(v) => Some(v.nilpotency_class(config.engel_exhaustive_max)?),
            None => None,
        };
        Ok(CaseData { algebra, config, units, implicit, tier, engel, v_class })
    }

    /// Exact `|V|` when enumerated.
    pub fn v_order(&self) -> Option<u64> {
        self.units.as_ref().map(|v| v.order() as u64)
    }

    pub fn characteristic(&self) -> usize {
        self.algebra.field().characteristic() as usize
    }

    pub fn is_modular(&self) -> bool {
        self.algebra.dim().is_multiple_of(self.characteristic())
    }
}

fn summarize<E>(verdict: &EngelVerdict<E>, witness: impl FnOnce(&EngelWitness<E>) -> Value) -> EngelSummary {
    EngelSummary {
        engel: verdict.engel,
        exhaustive: verdict.exhaustive,
        max_depth: verdict.max_depth,
        pairs_tested: verdict.pairs_tested,
        undecided: verdict.undecided,
        witness: verdict.witness.as_ref().map(witness),
    }
}

/// `{x, y, start, period, trace}` with `trace = c_0, ..., c_{start+period}`.
pub(crate) fn witness_json<G: GroupOps>(
    alg: &GroupAlgebra,
    g: &G,
    w: &EngelWitness<G::Elem>,
    to_element: impl Fn(&G::Elem) -> AlgebraElement,
) -> Value {
    let ser = |e: &G::Elem| alg.serialize(&to_element(e));
    let trace: Vec<SerializedElement> = engel_trace(g, &w.x, &w.y, w.start + w.period).iter().map(ser).collect();
    json!({
        "x": ser(&w.x),
        "y": ser(&w.y),
        "start": w.start,
        "period": w.period,
        "trace": trace,
    })
}

/// Re-runs an Engel witness from its serialized form: the trace must match
/// a fresh computation, contain no 1, and close up at `start + period`.
pub fn replay_engel_witness(algebra: &GroupAlgebra, witness: &Value) -> Result<bool> {
    let bad = |what: &str| Error::Precondition(format!("malformed witness: {what}"));
    let element = |key: &str| -> Result<AlgebraElement> {
        let s: SerializedElement = serde_json::from_value(witness.get(key).ok_or_else(|| bad(key))?.clone())?;
        algebra.deserialize(&s)
    };
    let x = element("x")?;
    let y = element("y")?;
    let start = witness.get("start").and_then(Value::as_u64).ok_or_else(|| bad("start"))? as usize;
    let period = witness.get("period").and_then(Value::as_u64).ok_or_else(|| bad("period"))? as usize;
    let imp = ImplicitUnits::new(algebra.clone());
    if !imp.contains(&x) || !imp.contains(&y) {
        return Ok(false);
    }
    let recorded: Vec<SerializedElement> = serde_json::from_value(witness.get("trace").ok_or_else(|| bad("trace"))?.clone())?;
    let fresh: Vec<SerializedElement> = engel_trace(&imp, &x, &y, start + period).iter().map(|c| algebra.serialize(c)).collect();
    Ok(recorded == fresh && replay_witness(&imp, &EngelWitness { x, y, start, period }))
}

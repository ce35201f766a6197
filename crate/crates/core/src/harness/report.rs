//! Per-case reports and the suite document.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{build_corpus, CorpusCase, SuiteConfig};
use crate::classify::{
    binomial_collapse_identity, commutator_power_identity, has_nonzero_nilpotent, predict_locally_nilpotent,
    replay_engel_witness, verify_coprime_subgroups, verify_modular_criterion, verify_nilpotent_elements, verify_order_law,
    verify_sylow_structure, CaseData, CheckConfig, CheckOutcome, EngelSummary, Prediction, Status, UnitsTier,
};
use crate::error::{Error, Result};
use crate::finite_field::FiniteField;
use crate::group_algebra::{cyclotomic_unit_count, GroupAlgebra};
use crate::groups::GroupSpec;
use crate::unit_group::order_law_formula;

/// Seeded instances per identity and case.
pub const IDENTITY_INSTANCES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Exhaustive,
    Sampled,
    /// The case could not be run; see `error`.
    Skipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnitCountSource {
    Enumerated,
    OrderLaw,
    Cyclotomic,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitCount {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u128>,
    pub source: UnitCountSource,
    pub formula_derived: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observed {
    pub engel: EngelSummary,
    /// `None` when neither the lower central series nor a witness decided it.
    pub v_nilpotent: Option<bool>,
    pub v_nilpotency_class: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseStatus {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub group: String,
    pub group_order: usize,
    pub field: String,
    pub tier: Tier,
    pub status: CaseStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<UnitCount>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prediction: Option<Prediction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observed: Option<Observed>,
    pub checks: Vec<CheckOutcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

impl CaseReport {
    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

impl Summary {
    pub fn of(reports: &[CaseReport]) -> Self {
        let mut s = Summary::default();
        for c in reports.iter().flat_map(|r| &r.checks) {
            match c.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::Skipped => s.skipped += 1,
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub config: SuiteConfig,
    pub summary: Summary,
    pub cases: Vec<CaseReport>,
}

fn field_label(f: &FiniteField) -> String {
    format!("GF({})", f.name())
}

// FNV-1a, so per-case seeds do not depend on the std hasher.
fn case_seed(seed: u64, group: &str, field: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in group.bytes().chain(*b"|").chain(field.bytes()) {
        h ^= b as u64;
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    seed ^ h
}

/// Runs every check on one case. Errors and panics become a failing report.
pub fn run_case(case: &CorpusCase, config: &CheckConfig, verbose: bool, timings: bool) -> CaseReport {
    isolate(case, timings, || case_report(case, config, verbose))
}

fn isolate(case: &CorpusCase, timings: bool, f: impl FnOnce() -> Result<CaseReport>) -> CaseReport {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f));
    let mut report = match outcome {
        Ok(Ok(r)) => r,
        Ok(Err(e)) => error_report(case, e.to_string()),
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            error_report(case, format!("panic: {msg}"))
        }
    };
    if timings {
        report.wall_time_ms = Some(start.elapsed().as_millis() as u64);
    }
    report
}

fn error_report(case: &CorpusCase, msg: String) -> CaseReport {
    CaseReport {
        group: case.spec.clone(),
        group_order: case.group.order(),
        field: field_label(&case.field),
        tier: Tier::Skipped,
        status: CaseStatus::Fail,
        units: None,
        prediction: None,
        observed: None,
        checks: vec![CheckOutcome::fail("case-error", msg.clone(), json!({ "error": msg }))],
        error: Some(msg),
        trace: None,
        wall_time_ms: None,
    }
}

fn case_report(case: &CorpusCase, config: &CheckConfig, verbose: bool) -> Result<CaseReport> {
    let alg = GroupAlgebra::new(case.field.clone(), case.group.clone());
    let prediction = predict_locally_nilpotent(&case.group, &case.field);
    let data = CaseData::build(alg, *config)?;
    let v_nilpotent = match data.v_class {
        Some(class) => Some(class.is_some()),
        None if !data.engel.engel => Some(false),
        None => None,
    };
    let observed = Observed { engel: data.engel.clone(), v_nilpotent, v_nilpotency_class: data.v_class.flatten() };

    let mut checks = vec![soundness(&prediction, &data), engel_matches_nilpotency(&data), witness_replay(&data)];
    checks.extend(verify_order_law(&data));
    checks.extend(verify_coprime_subgroups(&data));
    checks.extend(verify_nilpotent_elements(&data));
    checks.extend(verify_sylow_structure(&data));
    checks.extend(verify_modular_criterion(&data));
    let field = field_label(&case.field);
    checks.extend(identity_checks(&data.algebra, case_seed(config.seed, &case.spec, &field))?);

    let status = if checks.iter().any(CheckOutcome::is_fail) { CaseStatus::Fail } else { CaseStatus::Pass };
    let tier = match data.tier {
        UnitsTier::Exhaustive => Tier::Exhaustive,
        UnitsTier::Sampled => Tier::Sampled,
    };
    Ok(CaseReport {
        group: case.spec.clone(),
        group_order: case.group.order(),
        field,
        tier,
        status,
        units: Some(unit_count(&data)),
        prediction: Some(prediction),
        observed: Some(observed),
        checks,
        error: None,
        trace: verbose.then(|| trace(&data)),
        wall_time_ms: None,
    })
}

fn soundness(prediction: &Prediction, data: &CaseData) -> CheckOutcome {
    const NAME: &str = "prediction-matches-brute-force";
    let predicted = prediction.locally_nilpotent;
    let witness = || json!({ "predicted": predicted, "v_class": data.v_class, "engel": data.engel });
    match data.v_class {
        Some(class) => CheckOutcome::check(NAME, predicted == class.is_some(), "prediction disagrees with the lower central series of V", witness)
            .with_details(json!({ "evidence": "exhaustive", "v_nilpotent": class.is_some(), "class": class })),
        None if !data.engel.engel => CheckOutcome::check(NAME, !predicted, "predicted nilpotent but a non-Engel pair exists", witness)
            .with_details(json!({ "evidence": "sampled", "v_nilpotent": false })),
        None if predicted => CheckOutcome::pass(NAME).with_details(json!({
            "evidence": "sampled", "probabilistic": true, "pairs_tested": data.engel.pairs_tested, "undecided": data.engel.undecided
        })),
        None => CheckOutcome::skipped(NAME, format!("sampled: no non-Engel pair among {} samples", data.engel.pairs_tested)),
    }
}

fn engel_matches_nilpotency(data: &CaseData) -> CheckOutcome {
    const NAME: &str = "engel-matches-nilpotency";
    match data.v_class {
        Some(class) if data.engel.exhaustive => {
            CheckOutcome::check(NAME, data.engel.engel == class.is_some(), "Engel verdict disagrees with nilpotency of V", || {
                json!({ "engel": data.engel, "v_class": class })
            })
            .with_details(json!({ "engel": data.engel.engel, "v_nilpotent": class.is_some() }))
        }
        _ => CheckOutcome::skipped(NAME, "sampled tier"),
    }
}

fn witness_replay(data: &CaseData) -> CheckOutcome {
    const NAME: &str = "engel-witness-replay";
    match &data.engel.witness {
        None => CheckOutcome::skipped(NAME, "not-applicable: no Engel witness"),
        Some(w) => match replay_engel_witness(&data.algebra, w) {
            Ok(true) => CheckOutcome::pass(NAME),
            Ok(false) => CheckOutcome::fail(NAME, "witness does not replay", w.clone()),
            Err(e) => CheckOutcome::fail(NAME, format!("witness does not parse: {e}"), w.clone()),
        },
    }
}

fn identity_checks(alg: &GroupAlgebra, seed: u64) -> Result<Vec<CheckOutcome>> {
    let group = alg.group();
    let n = group.order();
    let p = alg.field().characteristic() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = 20 * IDENTITY_INSTANCES;

    let live = group.cyclic_subgroups().iter().any(|h| !group.is_normal(h));
    let commutator = if !live {
        CheckOutcome::skipped("commutator-power-identity", "not-applicable: every cyclic subgroup is normal")
    } else {
        sample_identity("commutator-power-identity", budget, || {
            let (a, g, m) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(1..=4));
            commutator_power_identity(alg, a, g, m)
        })?
    };

    let central: Vec<usize> = group.center().elements().into_iter().filter(|&c| group.element_order(c) == p).collect();
    let binomial = if central.is_empty() {
        CheckOutcome::skipped("binomial-collapse-identity", "not-applicable: no central element of order p")
    } else {
        let max_m = if p <= 3 { 3 } else { 2 };
        sample_identity("binomial-collapse-identity", budget, || {
            let c = central[rng.gen_range(0..central.len())];
            binomial_collapse_identity(alg, c, rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..=max_m))
        })?
    };
    Ok(vec![commutator, binomial])
}

/// Draws until `IDENTITY_INSTANCES` admissible instances passed, one
/// failed, or `budget` draws were spent.
fn sample_identity(name: &str, budget: usize, mut draw: impl FnMut() -> Result<CheckOutcome>) -> Result<CheckOutcome> {
    let mut passed = 0;
    let mut drawn = 0;
    while passed < IDENTITY_INSTANCES && drawn < budget {
        drawn += 1;
        let out = draw()?;
        match out.status {
            Status::Pass => passed += 1,
            Status::Fail => return Ok(out),
            Status::Skipped => {}
        }
    }
    if passed == 0 {
        return Ok(CheckOutcome::skipped(name, format!("not-applicable: no admissible instance in {drawn} draws")));
    }
    Ok(CheckOutcome::pass(name).with_details(json!({ "instances": passed, "draws": drawn })))
}

fn unit_count(data: &CaseData) -> UnitCount {
    if let Some(order) = data.v_order() {
        return UnitCount { order: Some(order as u128), source: UnitCountSource::Enumerated, formula_derived: false };
    }
    let alg = &data.algebra;
    let group = alg.group();
    let q = alg.field().order() as u64;
    let formula = |order, source| UnitCount { order, source, formula_derived: true };
    if data.is_modular() {
        let sylow = group.sylow_subgroup(data.characteristic());
        if group.is_normal(&sylow) {
            let quotient_units = group.quotient(&sylow).and_then(|quotient| {
                GroupAlgebra::new(alg.field_arc(), Arc::new(quotient.group)).enumerate_normalized_units(&data.config.budget)
            });
            if let Ok(w) = quotient_units {
                let order = order_law_formula(q, group.order(), sylow.order(), w.order() as u64);
                return formula(Some(order), UnitCountSource::OrderLaw);
            }
        }
    } else if group.is_abelian() {
        if let Ok(Some(order)) = cyclotomic_unit_count(group, q) {
            return formula(Some(order), UnitCountSource::Cyclotomic);
        }
    }
    UnitCount { order: None, source: UnitCountSource::Unknown, formula_derived: false }
}

fn trace(data: &CaseData) -> Value {
    let group = data.algebra.group();
    let (nilpotent_elements, gate) = has_nonzero_nilpotent(data);
    let units = data.units.as_ref().filter(|v| v.order() <= data.config.engel_exhaustive_max).map(|v| {
        json!({
            "lower_central_series": v.lower_central_series().iter().map(|s| s.order()).collect::<Vec<_>>(),
            "derived_order": v.derived_subgroup().order(),
            "abelian_invariants": v.abelian_invariants().ok(),
        })
    });
    json!({
        "group": {
            "lower_central_series": group.lower_central_series().iter().map(|s| s.order()).collect::<Vec<_>>(),
            "derived_order": group.derived_subgroup().order(),
            "center_order": group.center().order(),
            "exponent": group.exponent(),
        },
        "nonzero_nilpotents": nilpotent_elements,
        "nilpotent_gate": gate,
        "units": units,
    })
}

/// Runs the whole corpus. Case order is fixed by [`build_corpus`] and the
/// gather is ordered, so the result does not depend on the worker count.
pub fn run_suite(config: &SuiteConfig) -> Result<Vec<CaseReport>> {
    let corpus = build_corpus(config)?;
    let checks = config.check_config()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
    Ok(pool.install(|| corpus.par_iter().map(|case| run_case(case, &checks, false, config.timings)).collect()))
}

/// A single case with verbose traces.
pub fn analyze_case(group: &str, field: &str, config: &SuiteConfig) -> Result<CaseReport> {
    config.validate()?;
    let spec = GroupSpec::parse(group)?;
    let case = CorpusCase { spec: group.to_string(), group: Arc::new(spec.build()?), field: Arc::new(FiniteField::parse(field)?) };
    Ok(run_case(&case, &config.check_config()?, true, config.timings))
}

pub fn suite_document(config: &SuiteConfig, reports: Vec<CaseReport>) -> ReportDocument {
    ReportDocument { config: config.clone(), summary: Summary::of(&reports), cases: reports }
}

impl ReportDocument {
    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }
}

pub fn write_report(config: &SuiteConfig, reports: Vec<CaseReport>, path: &Path) -> Result<ReportDocument> {
    let doc = suite_document(config, reports);
    std::fs::write(path, doc.to_json()?)?;
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteConfig {
        SuiteConfig { max_group_order: 6, fields: vec!["2".into(), "3".into()], samples: 2000, ..SuiteConfig::default() }
    }

    fn case(g: &str, q: &str) -> CaseReport {
        analyze_case(g, q, &SuiteConfig { samples: 2000, ..SuiteConfig::default() }).unwrap()
    }

    #[test]
    fn c2_over_gf2_passes() {
        let r = case("C2", "2");
        assert_eq!(r.status, CaseStatus::Pass);
        assert_eq!(r.units.as_ref().unwrap().order, Some(2));
        assert!(r.prediction.as_ref().unwrap().locally_nilpotent);
        assert!(r.checks.iter().all(|c| c.status != Status::Fail));
        assert!(r.trace.is_some());
    }

    #[test]
    fn s3_over_gf2_has_a_witness() {
        let r = case("S3", "2");
        assert_eq!(r.status, CaseStatus::Pass, "{:#?}", r.checks);
        assert!(!r.prediction.as_ref().unwrap().locally_nilpotent);
        let engel = &r.observed.as_ref().unwrap().engel;
        assert!(!engel.engel);
        let w = engel.witness.as_ref().unwrap();
        assert!(w["trace"].as_array().unwrap().len() >= 2);
        assert_eq!(r.check("engel-witness-replay").unwrap().status, Status::Pass);
    }

    #[test]
    fn formula_counts_are_flagged() {
        let config = SuiteConfig { unit_budget: 16, samples: 500, ..SuiteConfig::default() };
        let r = analyze_case("C2xC3", "2", &config).unwrap();
        let units = r.units.unwrap();
        assert_eq!((units.order, units.source, units.formula_derived), (Some(24), UnitCountSource::OrderLaw, true));
        assert_eq!(r.tier, Tier::Sampled);
        let r = analyze_case("C5", "4", &config).unwrap();
        let units = r.units.unwrap();
        assert_eq!((units.order, units.source), (Some(3 * 15 * 15 / 3), UnitCountSource::Cyclotomic));
        let r = analyze_case("S3", "5", &config).unwrap();
        assert_eq!(r.units.unwrap().source, UnitCountSource::Unknown);
    }

    #[test]
    fn errors_are_isolated() {
        let c2 = CorpusCase {
            spec: "C2".into(),
            group: Arc::new(GroupSpec::parse("C2").unwrap().build().unwrap()),
            field: Arc::new(FiniteField::parse("2").unwrap()),
        };
        let r = isolate(&c2, true, || panic!("boom"));
        assert_eq!((r.status, r.tier), (CaseStatus::Fail, Tier::Skipped));
        assert_eq!(r.error.as_deref(), Some("panic: boom"));
        assert!(r.checks[0].witness.is_some() && r.wall_time_ms.is_some());
        let r = isolate(&c2, false, || Err(Error::NotAbelian));
        assert_eq!(r.checks[0].status, Status::Fail);
        assert!(r.wall_time_ms.is_none());
    }

    #[test]
    fn suite_is_deterministic_across_workers() {
        let one = SuiteConfig { workers: Some(1), ..small() };
        let four = SuiteConfig { workers: Some(4), ..small() };
        let a = suite_document(&one, run_suite(&one).unwrap()).to_json().unwrap();
        let b = suite_document(&four, run_suite(&four).unwrap()).to_json().unwrap();
        assert_eq!(a, b);
        let doc: ReportDocument = serde_json::from_str(&a).unwrap();
        assert_eq!(doc.summary.fail, 0, "{a}");
        assert_eq!(doc.cases.len(), 18);
    }

    #[test]
    fn empty_and_single_documents() {
        let config = SuiteConfig::default();
        let doc = suite_document(&config, Vec::new());
        let text = doc.to_json().unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["cases"], json!([]));
        assert_eq!(v["summary"], json!({ "pass": 0, "fail": 0, "skipped": 0 }));

        let mut r = case("C1", "2");
        r.checks.retain(|c| c.status == Status::Pass);
        r.checks.truncate(1);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        let doc = write_report(&config, vec![r], &path).unwrap();
        assert_eq!(doc.summary, Summary { pass: 1, fail: 0, skipped: 0 });
        let back: ReportDocument = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(back, doc);
    }
}

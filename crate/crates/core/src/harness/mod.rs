//! Corpus construction, suite execution and the JSON report.

mod report;

use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::classify::CheckConfig;
use crate::error::{Error, Result};
use crate::finite_field::FiniteField;
use crate::group_algebra::EnumerationBudget;
use crate::groups::{FiniteGroup, GroupSpec};

pub use report::{
    analyze_case, run_case, run_suite, suite_document, write_report, CaseReport, CaseStatus, Observed, ReportDocument, Summary,
    Tier, UnitCount, UnitCountSource, IDENTITY_INSTANCES,
};

/// Built-in corpus beyond the cyclic groups.
pub const BUILTIN_GROUPS: [&str; 9] = ["C2xC2", "C2xC4", "C2xC2xC2", "S3", "D4", "Q8", "C2xC3", "SD16", "D4xC3"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    pub max_group_order: usize,
    pub fields: Vec<String>,
    pub unit_budget: u64,
    pub engel_exhaustive_max: usize,
    pub samples: u64,
    pub seed: u64,
    pub group_files: Vec<PathBuf>,
    /// Worker threads; `None` uses every core. Not part of the report.
    #[serde(skip)]
    pub workers: Option<usize>,
    /// Record per-case wall time. Off by default since it breaks byte
    /// identity between runs.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub timings: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            max_group_order: 16,
            fields: ["2", "3", "4", "5"].map(String::from).to_vec(),
            unit_budget: 1 << 22,
            engel_exhaustive_max: 4096,
            samples: 100_000,
            seed: 42,
            group_files: Vec::new(),
            workers: None,
            timings: false,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: u64, what: &str| {
            if v == 0 {
                Err(Error::Precondition(format!("{what} must be positive")))
            } else {
                Ok(())
            }
        };
        positive(self.max_group_order as u64, "max group order")?;
        positive(self.unit_budget, "unit budget")?;
        positive(self.engel_exhaustive_max as u64, "Engel exhaustive maximum")?;
        positive(self.samples, "sample count")?;
        if self.workers == Some(0) {
            return Err(Error::Precondition("worker count must be positive".into()));
        }
        if self.fields.is_empty() {
            return Err(Error::Precondition("field list is empty".into()));
        }
        self.parsed_fields().map(|_| ())
    }

    pub fn parsed_fields(&self) -> Result<Vec<Arc<FiniteField>>> {
        let mut fields = self.fields.iter().map(|f| FiniteField::parse(f).map(Arc::new)).collect::<Result<Vec<_>>>()?;
        fields.sort_by_key(|f| f.order());
        fields.dedup_by_key(|f| f.order());
        Ok(fields)
    }

    pub fn check_config(&self) -> Result<CheckConfig> {
        Ok(CheckConfig {
            budget: EnumerationBudget::new(self.unit_budget, self.unit_budget)?,
            engel_exhaustive_max: self.engel_exhaustive_max,
            samples: self.samples,
            seed: self.seed,
            ..CheckConfig::default()
        })
    }
}

/// One `(G, F)` pair of the corpus.
#[derive(Debug, Clone)]
pub struct CorpusCase {
    pub spec: String,
    pub group: Arc<FiniteGroup>,
    pub field: Arc<FiniteField>,
}

/// Built-in groups of order at most `max_group_order` plus the user files,
/// crossed with the field list, ordered by group order, spec name, field
/// order.
pub fn build_corpus(config: &SuiteConfig) -> Result<Vec<CorpusCase>> {
    config.validate()?;
    let fields = config.parsed_fields()?;
    let mut groups: Vec<(String, Arc<FiniteGroup>)> = Vec::new();
    let cyclic = (1..=config.max_group_order).map(|n| format!("C{n}"));
    for name in cyclic.chain(BUILTIN_GROUPS.iter().map(|s| s.to_string())) {
        let spec = GroupSpec::parse(&name)?;
        if spec.order_hint().is_some_and(|n| n <= config.max_group_order) {
            groups.push((name, Arc::new(spec.build()?)));
        }
    }
    for path in &config.group_files {
        let spec = GroupSpec::File(path.clone());
        groups.push((spec.to_string(), Arc::new(spec.build()?)));
    }
    groups.sort_by(|a, b| a.1.order().cmp(&b.1.order()).then_with(|| a.0.cmp(&b.0)));
    groups.dedup_by(|a, b| a.0 == b.0);
    Ok(groups
        .into_iter()
        .flat_map(|(spec, group)| {
            fields.iter().map(move |f| CorpusCase { spec: spec.clone(), group: group.clone(), field: f.clone() })
        })
        .collect())
}

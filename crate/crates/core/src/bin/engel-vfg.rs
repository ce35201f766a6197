use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use engel_vfg::harness::{analyze_case, run_suite, suite_document, CaseStatus, SuiteConfig};
use engel_vfg::groups::CayleyFile;

#[derive(Parser)]
#[command(name = "engel-vfg", version, about = "Engel and nilpotency checks for unit groups of finite group algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the corpus and write the JSON report.
    Verify {
        #[command(flatten)]
        budgets: Budgets,
        #[arg(long, default_value_t = 16)]
        max_group_order: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
        fields: Vec<String>,
        /// Extra Cayley-table files added to the corpus.
        #[arg(long = "group-file")]
        group_files: Vec<PathBuf>,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One case with verbose traces.
    Analyze {
        #[command(flatten)]
        budgets: Budgets,
        #[arg(long)]
        group: String,
        #[arg(long)]
        field: String,
    },
    /// Load a Cayley table and check the group axioms.
    Group {
        #[arg(long)]
        cayley: PathBuf,
        #[arg(long)]
        validate: bool,
    },
}

#[derive(Args)]
struct Budgets {
    #[arg(long, default_value_t = 1 << 22)]
    unit_budget: u64,
    #[arg(long, default_value_t = 4096)]
    engel_exhaustive_max: usize,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    workers: Option<usize>,
    /// Record per-case wall time (reports are then not byte-identical).
    #[arg(long)]
    timings: bool,
}

impl Budgets {
    fn config(&self) -> SuiteConfig {
        SuiteConfig {
            unit_budget: self.unit_budget,
            engel_exhaustive_max: self.engel_exhaustive_max,
            samples: self.samples,
            seed: self.seed,
            workers: self.workers,
            timings: self.timings,
            ..SuiteConfig::default()
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(true)` iff nothing failed.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Verify { budgets, max_group_order, fields, group_files, out } => {
            let config = SuiteConfig { max_group_order, fields, group_files, ..budgets.config() };
            let reports = run_suite(&config)?;
            let doc = suite_document(&config, reports);
            let text = doc.to_json()?;
            match out {
                Some(path) => {
                    std::fs::write(&path, &text).with_context(|| format!("writing {}", path.display()))?;
                    let s = doc.summary;
                    eprintln!("{} cases: {} pass, {} fail, {} skipped", doc.cases.len(), s.pass, s.fail, s.skipped);
                }
                None => print!("{text}"),
            }
            Ok(doc.summary.fail == 0)
        }
        Command::Analyze { budgets, group, field } => {
            let report = analyze_case(&group, &field, &budgets.config())?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(report.status == CaseStatus::Pass)
        }
        Command::Group { cayley, validate } => {
            let g = CayleyFile::load(&cayley).with_context(|| format!("loading {}", cayley.display()))?;
            let mut summary = json!({ "name": g.name(), "order": g.order() });
            if validate {
                summary["valid"] = json!(true);
                summary["abelian"] = json!(g.is_abelian());
                summary["nilpotency_class"] = json!(g.nilpotency_class());
                summary["derived_order"] = json!(g.derived_subgroup().order());
                summary["center_order"] = json!(g.center().order());
                summary["exponent"] = json!(g.exponent());
            }
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(true)
        }
    }
}

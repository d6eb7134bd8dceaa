use std::path::PathBuf;

use clap::Parser;
use serde::Serialize;

use cloudlabel_core::io::validate_sequence;
use cloudlabel_core::ontology::ClassOntology;

use crate::config::FileConfig;
use crate::report;

#[derive(Debug, Parser)]
pub struct Args {
    /// Sequence directory to check.
    pub sequence: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Serialize)]
struct Summary {
    command: &'static str,
    sequence: PathBuf,
    passed: bool,
    stems_checked: usize,
    violations: Vec<String>,
}

pub fn run(args: Args, _config: &FileConfig) -> anyhow::Result<bool> {
    let ontology = ClassOntology::benchmark();
    let result = validate_sequence(&args.sequence, &ontology);
    let passed = result.passed();
    report::emit(
        &Summary {
            command: "validate-sequence",
            sequence: args.sequence.clone(),
            passed,
            stems_checked: result.stems_checked,
            violations: result.violations.iter().map(|v| v.to_string()).collect(),
        },
        args.report.as_deref(),
    )?;
    Ok(passed)
}

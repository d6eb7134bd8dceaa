//! JSON run summaries: printed to stdout and optionally mirrored to a file.

use std::path::Path;

use anyhow::Context;
use serde::Serialize;

pub fn emit<T: Serialize>(summary: &T, report_path: Option<&Path>) -> anyhow::Result<()> {
    let json = serde_json::to_string_pretty(summary)?;
    println!("{json}");
    if let Some(path) = report_path {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).ok();
        }
        std::fs::write(path, &json).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

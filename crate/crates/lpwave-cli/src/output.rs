//! Report emission: JSON for machines, CSV tables for plotting. Files are
//! written atomically (temp file + rename) so a crashed run never leaves a
//! truncated report behind.

use anyhow::Context;
use lpwave::experiments::ExperimentReport;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::OutputFormat;

fn write_atomic(path: &Path, data: &str) -> anyhow::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let file_name = path
        .file_name()
        .and_then(|n| n.to_str())
        .context("output path has no file name")?;
    let tmp = dir.join(format!(".{file_name}.tmp-{}", std::process::id()));
    fs::write(&tmp, data).with_context(|| format!("cannot write {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("cannot move report into {}", path.display()))?;
    Ok(())
}

/// One CSV table per measured series, with the stable column order
/// `index,measured,threshold,pass`. A leading `#` comment embeds the
/// resolved configuration without disturbing the schema.
fn render_csv(report: &ExperimentReport) -> Vec<(String, String)> {
    let config_line = serde_json::to_string(&report.parameters).unwrap_or_default();
    report
        .series
        .iter()
        .map(|table| {
            let mut out = format!("# {} {}\n", report.name, config_line);
            out.push_str("index,measured,threshold,pass\n");
            for row in &table.rows {
                let threshold = row
                    .threshold
                    .map(|v| v.to_string())
                    .unwrap_or_default();
                let pass = row
                    .pass
                    .map(|v| v.to_string())
                    .unwrap_or_default();
                let _ = writeln!(out, "{},{},{},{}", row.index, row.measured, threshold, pass);
            }
            (format!("{}_{}.csv", report.name, table.name), out)
        })
        .collect()
}

/// Writes the report files and returns the paths written.
pub fn emit(
    report: &ExperimentReport,
    out_dir: Option<&Path>,
    format: OutputFormat,
) -> anyhow::Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let Some(dir) = out_dir else {
        return Ok(written);
    };
    if matches!(format, OutputFormat::Json | OutputFormat::Both) {
        let path = dir.join(format!("{}.json", report.name));
        write_atomic(&path, &serde_json::to_string_pretty(report)?)?;
        written.push(path);
    }
    if matches!(format, OutputFormat::Csv | OutputFormat::Both) {
        for (name, data) in render_csv(report) {
            let path = dir.join(name);
            write_atomic(&path, &data)?;
            written.push(path);
        }
    }
    Ok(written)
}

//! CSV and markdown rendering of a [`BenchReport`].

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{BenchError, Result};
use crate::runner::{BenchReport, BenchRow, RowStatus, Scheme};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Markdown,
}

impl FromStr for Format {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "markdown" | "md" => Ok(Format::Markdown),
            other => Err(BenchError::Usage(format!(
                "unknown format {other:?} (expected csv or markdown)"
            ))),
        }
    }
}

pub const CSV_HEADER: [&str; 8] = [
    "scheme",
    "nPivot",
    "messageCount",
    "totalMs",
    "perMessageMs",
    "ringOpCount",
    "maxAbsDecryptError",
    "status",
];

pub fn emit_report(report: &BenchReport, format: Format) -> String {
    match format {
        Format::Csv => emit_csv(report),
        Format::Markdown => emit_markdown(report),
    }
}

fn n_pivot_cell(row: &BenchRow) -> String {
    row.n_pivot
        .map_or_else(|| "-".to_string(), |n| n.to_string())
}

fn status_cell(row: &BenchRow) -> String {
    match &row.status {
        RowStatus::Passed => "ok".into(),
        RowStatus::Failed(why) => format!("failed: {why}"),
    }
}

fn emit_csv(report: &BenchReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for row in &report.rows {
        w.write_record([
            row.scheme.to_string(),
            n_pivot_cell(row),
            row.message_count.to_string(),
            format!("{:.4}", row.total_ms),
            format!("{:.6}", row.per_message_ms),
            row.ring_ops.total().to_string(),
            format!("{:.3e}", row.max_abs_decrypt_error),
            status_cell(row),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

fn ratio_cell(report: &BenchReport, row: &BenchRow) -> String {
    report
        .ratio_over_ckks(row)
        .map_or_else(|| "-".into(), |r| format!("{r:.2}"))
}

fn emit_markdown(report: &BenchReport) -> String {
    let p = &report.params;
    let mut out = String::new();
    let _ = writeln!(out, "# Encryption benchmark: {}", report.workload);
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "N = {}, log2 q = {}, delta = 2^{}, radix = {}, seed = {}, repeat = {}",
        p.n,
        128 - p.q.leading_zeros(),
        p.delta.trailing_zeros(),
        p.radix,
        report.seed,
        report.repeat
    );
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "| Scheme | nPivot | Messages | Overall Time (ms) | Time / Message (ms) | Ratio over CkksEnc | Ring ops | Max abs error | Status |"
    );
    let _ = writeln!(out, "|---|---:|---:|---:|---:|---:|---:|---:|---|");
    for row in &report.rows {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {:.3} | {:.4} | {} | {} | {:.3e} | {} |",
            row.scheme.label(),
            n_pivot_cell(row),
            row.message_count,
            row.total_ms,
            row.per_message_ms,
            ratio_cell(report, row),
            row.ring_ops.total(),
            row.max_abs_decrypt_error,
            status_cell(row).replace('|', "/"),
        );
    }

    let rache: Vec<&BenchRow> = report
        .rows
        .iter()
        .filter(|r| r.scheme == Scheme::Rache)
        .collect();
    if !rache.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(out, "## Rache scalability");
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "| Messages | nPivot | RacheEnc (ms) | Ratio over CkksEnc |"
        );
        let _ = writeln!(out, "|---:|---:|---:|---:|");
        for row in rache {
            let time = if row.passed() {
                format!("{:.3}", row.total_ms)
            } else {
                "failed".into()
            };
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} |",
                row.message_count,
                n_pivot_cell(row),
                time,
                ratio_cell(report, row)
            );
        }
    }
    out
}

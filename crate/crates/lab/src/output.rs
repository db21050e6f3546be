//! CSV emission. Every file is UTF-8 with a header row and LF endings.

use std::fs;
use std::path::Path;

use precision_core::eval::Summary;
use precision_core::AlgorithmSpec;

use crate::config::ExperimentConfig;
use crate::error::{LabError, Result};
use crate::runner::Row;

/// Result columns. The first ten are fixed; the rest complete the echo.
pub const ROW_HEADER: [&str; 13] = [
    "algorithm",
    "d",
    "counters",
    "prob_mode",
    "delay",
    "initial_value",
    "seed",
    "mse",
    "recall_k",
    "recirc_ratio",
    "lookup_bits",
    "k",
    "trace",
];

pub const METRICS: [&str; 3] = ["mse", "recall_k", "recirc_ratio"];

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Vec<u8> {
    w.into_inner().expect("in-memory writer cannot fail")
}

fn spec_columns(spec: &AlgorithmSpec) -> [String; 6] {
    let dash = || "-".to_string();
    let (mode, bits) = match spec {
        AlgorithmSpec::Precision {
            prob_mode,
            lookup_bits,
            ..
        } => (prob_mode.to_string(), lookup_bits.to_string()),
        _ => (dash(), dash()),
    };
    [
        spec.ways().to_string(),
        spec.counters().map_or_else(dash, |c| c.to_string()),
        mode,
        spec.delay().to_string(),
        spec.initial_value().to_string(),
        bits,
    ]
}

fn metric(row: &Row, name: &str) -> f64 {
    match name {
        "mse" => row.report.mse,
        "recall_k" => row.report.recall_at_k.unwrap_or(f64::NAN),
        "recirc_ratio" => row.report.recirc_ratio,
        _ => unreachable!("unknown metric {name}"),
    }
}

fn record(
    spec: &AlgorithmSpec,
    seed: &str,
    values: [String; 3],
    k: usize,
    trace: &str,
) -> Vec<String> {
    let [d, counters, mode, delay, init, bits] = spec_columns(spec);
    let [mse, recall, ratio] = values;
    vec![
        spec.name().to_string(),
        d,
        counters,
        mode,
        delay,
        init,
        seed.to_string(),
        mse,
        recall,
        ratio,
        bits,
        k.to_string(),
        trace.to_string(),
    ]
}

fn row_record(row: &Row) -> Vec<String> {
    record(
        &row.cell.spec,
        &row.cell.seed.to_string(),
        METRICS.map(|m| metric(row, m).to_string()),
        row.k,
        &row.trace,
    )
}

/// `mean±sd` over the rows, echoing the first row's configuration.
fn summary_record(rows: &[Row]) -> Vec<String> {
    let first = &rows[0];
    let values = METRICS.map(|m| {
        let v: Vec<f64> = rows.iter().map(|r| metric(r, m)).collect();
        Summary::of(&v).to_string()
    });
    record(&first.cell.spec, "summary", values, first.k, "")
}

/// Per-seed rows followed by a summary row.
pub fn run_csv(rows: &[Row]) -> Vec<u8> {
    let mut w = writer();
    w.write_record(ROW_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record(row_record(r)).expect("in-memory write");
    }
    if !rows.is_empty() {
        w.write_record(summary_record(rows))
            .expect("in-memory write");
    }
    finish(w)
}

/// One row per cell, no summaries.
pub fn matrix_csv(rows: &[Row]) -> Vec<u8> {
    let mut w = writer();
    w.write_record(ROW_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record(row_record(r)).expect("in-memory write");
    }
    finish(w)
}

/// `counters` down the side, one column per algorithm holding the mean of
/// `metric` over seeds.
pub fn plot_csv(cfg: &ExperimentConfig, rows: &[Row], metric_name: &str) -> Vec<u8> {
    let mut w = writer();
    let mut header = vec!["counters".to_string()];
    header.extend(cfg.descriptors.iter().map(|d| d.to_string()));
    w.write_record(&header).expect("in-memory write");
    for &c in &cfg.counters {
        let mut rec = vec![c.to_string()];
        for a in 0..cfg.descriptors.len() {
            let v: Vec<f64> = rows
                .iter()
                .filter(|r| r.cell.algorithm == a && r.cell.spec.counters() == Some(c))
                .map(|r| metric(r, metric_name))
                .collect();
            rec.push(Summary::of(&v).mean.to_string());
        }
        w.write_record(&rec).expect("in-memory write");
    }
    finish(w)
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| LabError::io(path, e))
}

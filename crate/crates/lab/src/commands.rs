//! The four subcommands, minus argument parsing.

use std::io::Write;
use std::path::{Path, PathBuf};

use precision_core::traces::{compute_stats, generate_zipf, TraceStats, ZipfSpec};

use crate::bounds::{bounds_csv, render, run_bounds, BoundsParams};
use crate::config::ExperimentConfig;
use crate::error::{LabError, Result};
use crate::output::{matrix_csv, plot_csv, run_csv, write_file, METRICS};
use crate::runner::{compare_cells, run_cells, single_cells};
use crate::trace_io::save_csv;

fn stdout_bytes(bytes: &[u8]) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(bytes)
        .and_then(|_| out.flush())
        .map_err(|e| LabError::io("<stdout>", e))
}

fn sidecar(path: &Path) -> PathBuf {
    path.with_extension("config.json")
}

pub fn generate(spec: &ZipfSpec, out: &Path) -> Result<TraceStats> {
    if !(spec.alpha.is_finite() && spec.alpha >= 0.0) {
        return Err(LabError::usage(format!(
            "alpha must be a finite value >= 0, got {}",
            spec.alpha
        )));
    }
    let trace = generate_zipf(spec)?;
    save_csv(&trace, out)?;
    let stats = compute_stats(&trace);
    let mut msg = format!(
        "wrote {} packets, {} distinct flows to {}\n",
        stats.packets(),
        stats.distinct(),
        out.display()
    );
    for k in [1, 10, 100, 1000] {
        if k <= stats.distinct() {
            msg.push_str(&format!("F_{k} = {}\n", stats.f_k(k)?));
        }
    }
    stdout_bytes(msg.as_bytes())?;
    Ok(stats)
}

/// One algorithm over every seed. Returns the CSV path.
pub fn run(cfg: &ExperimentConfig, out: Option<PathBuf>) -> Result<PathBuf> {
    let cells = single_cells(cfg)?;
    let rows = run_cells(cfg, &cells)?;
    let csv = run_csv(&rows);
    let path = out.unwrap_or_else(|| cfg.out_dir.join("run.csv"));
    write_file(&path, &csv)?;
    write_file(&sidecar(&path), cfg.to_json().as_bytes())?;
    stdout_bytes(&csv)?;
    Ok(path)
}

/// Algorithms x memory grid x seeds, plus one plot-data file per metric.
/// Returns every path written.
pub fn compare(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let cells = compare_cells(cfg)?;
    let rows = run_cells(cfg, &cells)?;
    let matrix = cfg.out_dir.join("compare.csv");
    write_file(&matrix, &matrix_csv(&rows))?;
    let mut written = vec![matrix.clone()];
    let mut shown = String::new();
    for m in METRICS {
        let path = cfg.out_dir.join(format!("plot_{m}.csv"));
        let data = plot_csv(cfg, &rows, m);
        shown.push_str(&format!("# {m}\n{}", String::from_utf8_lossy(&data)));
        write_file(&path, &data)?;
        written.push(path);
    }
    let echo = sidecar(&matrix);
    write_file(&echo, cfg.to_json().as_bytes())?;
    written.push(echo);
    stdout_bytes(shown.as_bytes())?;
    Ok(written)
}

/// Runs the checks, writes `bounds.csv`, and fails if any check fails.
pub fn bounds(params: &BoundsParams, out_dir: &Path) -> Result<()> {
    let rows = run_bounds(params)?;
    write_file(&out_dir.join("bounds.csv"), &bounds_csv(&rows))?;
    stdout_bytes(render(&rows).as_bytes())?;
    let failed = rows.iter().filter(|r| !r.result.within_bound).count();
    if failed > 0 {
        return Err(LabError::BoundViolated(format!(
            "{failed} of {} checks failed",
            rows.len()
        )));
    }
    Ok(())
}

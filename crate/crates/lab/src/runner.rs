//! Runs (algorithm, memory, seed) cells on a bounded worker pool. Results
//! come back in cell order regardless of scheduling.

use std::collections::BTreeMap;
use std::sync::Arc;

use precision_core::eval::{run_on_arrival, EvalOptions, EvalReport};
use precision_core::traces::Trace;
use precision_core::AlgorithmSpec;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, TraceSource};
use crate::error::{LabError, Result};

/// One unit of work.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    /// Index into the config's algorithm list.
    pub algorithm: usize,
    pub spec: AlgorithmSpec,
    pub seed: u64,
}

/// One evaluated cell.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub cell: Cell,
    pub k: usize,
    pub trace: String,
    pub report: EvalReport,
}

/// Traces keyed by seed, shared across the cells that use them.
pub struct TraceSet {
    source: TraceSource,
    traces: BTreeMap<u64, Arc<Trace>>,
}

impl TraceSet {
    pub fn build(source: &TraceSource, seeds: &[u64]) -> Result<Self> {
        let traces = if source.depends_on_seed() {
            seeds
                .par_iter()
                .map(|&s| source.materialize(s).map(|t| (s, Arc::new(t))))
                .collect::<Result<BTreeMap<_, _>>>()?
        } else {
            let t = Arc::new(source.materialize(0)?);
            seeds.iter().map(|&s| (s, Arc::clone(&t))).collect()
        };
        Ok(TraceSet {
            source: source.clone(),
            traces,
        })
    }

    pub fn get(&self, seed: u64) -> &Trace {
        &self.traces[&seed]
    }

    pub fn describe(&self, seed: u64) -> String {
        self.source.describe(seed)
    }
}

pub fn evaluate(spec: &AlgorithmSpec, trace: &Trace, seed: u64, k: usize) -> Result<EvalReport> {
    let mut alg = spec.build(seed)?;
    Ok(run_on_arrival(
        &mut alg,
        trace,
        &EvalOptions {
            k: Some(k),
            sample_every: None,
        },
    )?)
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| LabError::usage(format!("cannot start worker pool: {e}")))
}

/// Evaluates every cell; a failing cell fails the whole run.
pub fn run_cells(cfg: &ExperimentConfig, cells: &[Cell]) -> Result<Vec<Row>> {
    pool(cfg.threads)?.install(|| {
        let traces = TraceSet::build(&cfg.trace, &cfg.seed_list())?;
        cells
            .par_iter()
            .map(|cell| {
                let report = evaluate(&cell.spec, traces.get(cell.seed), cell.seed, cfg.k)?;
                Ok(Row {
                    cell: cell.clone(),
                    k: cfg.k,
                    trace: traces.describe(cell.seed),
                    report,
                })
            })
            .collect()
    })
}

/// Cells for a single algorithm, one per seed.
pub fn single_cells(cfg: &ExperimentConfig) -> Result<Vec<Cell>> {
    if cfg.descriptors.len() != 1 {
        return Err(LabError::usage(format!(
            "run takes exactly one algorithm, got {}",
            cfg.descriptors.len()
        )));
    }
    if cfg.counters.len() > 1 {
        return Err(LabError::usage(
            "run takes a single --counters value; use compare for a grid",
        ));
    }
    let spec = cfg.descriptors[0].to_spec(cfg.counters.first().copied())?;
    Ok(cfg
        .seed_list()
        .into_iter()
        .map(|seed| Cell {
            algorithm: 0,
            spec: spec.clone(),
            seed,
        })
        .collect())
}

/// Algorithms x memory sizes x seeds, in that nesting order. Every algorithm
/// must be buildable at every memory size.
pub fn compare_cells(cfg: &ExperimentConfig) -> Result<Vec<Cell>> {
    if cfg.counters.is_empty() {
        return Err(LabError::usage("compare needs a memory grid (--counters)"));
    }
    let mut cells = Vec::new();
    for (i, d) in cfg.descriptors.iter().enumerate() {
        if d.pins_memory() {
            return Err(LabError::usage(format!(
                "mismatched memory grid: `{}` fixes its own size; compare sets memory from --counters",
                cfg.algorithms[i]
            )));
        }
        if d.name() == "exact" {
            return Err(LabError::usage(
                "mismatched memory grid: `exact` has no memory size",
            ));
        }
        for &c in &cfg.counters {
            let spec = d.to_spec(Some(c)).map_err(|e| {
                LabError::usage(format!("mismatched memory grid at {c} counters: {e}"))
            })?;
            for seed in cfg.seed_list() {
                cells.push(Cell {
                    algorithm: i,
                    spec: spec.clone(),
                    seed,
                });
            }
        }
    }
    Ok(cells)
}

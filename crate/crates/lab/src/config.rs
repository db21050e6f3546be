//! Experiment configuration. A JSON file supplies a base, command-line
//! flags override it field by field, and the result is validated once.

use std::fs;
use std::path::{Path, PathBuf};

use precision_core::traces::{generate_zipf, Trace, ZipfSpec};
use serde::{Deserialize, Serialize};

use crate::descriptor::Descriptor;
use crate::error::{LabError, Result};
use crate::trace_io::load_csv;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "PRECISION_OUT_DIR";

pub const DEFAULT_ALPHA: f64 = 1.0;
pub const DEFAULT_UNIVERSE: u64 = 100_000;
pub const DEFAULT_LENGTH: usize = 1_000_000;
pub const DEFAULT_K: usize = 32;
pub const DEFAULT_SEEDS: usize = 10;
pub const DEFAULT_SEED: u64 = 1;

/// Trace fields as they appear in a config file or on the command line.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialTrace {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub universe: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length: Option<usize>,
}

impl PartialTrace {
    fn has_zipf(&self) -> bool {
        self.alpha.is_some() || self.universe.is_some() || self.length.is_some()
    }

    fn overlay(self, top: PartialTrace) -> PartialTrace {
        if top.file.is_some() {
            return PartialTrace {
                file: top.file,
                ..PartialTrace::default()
            };
        }
        let file = if top.has_zipf() { None } else { self.file };
        PartialTrace {
            file,
            alpha: top.alpha.or(self.alpha),
            universe: top.universe.or(self.universe),
            length: top.length.or(self.length),
        }
    }
}

/// Every field optional; used for both the file and the flags.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    #[serde(default)]
    pub trace: PartialTrace,
    pub algorithms: Option<Vec<String>>,
    pub counters: Option<Vec<usize>>,
    pub k: Option<usize>,
    pub seeds: Option<usize>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl PartialConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| LabError::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            reason: e.to_string(),
        })
    }

    /// `top` wins wherever it has a value.
    pub fn overlay(self, top: PartialConfig) -> PartialConfig {
        PartialConfig {
            trace: self.trace.overlay(top.trace),
            algorithms: top.algorithms.or(self.algorithms),
            counters: top.counters.or(self.counters),
            k: top.k.or(self.k),
            seeds: top.seeds.or(self.seeds),
            seed: top.seed.or(self.seed),
            out_dir: top.out_dir.or(self.out_dir),
            threads: top.threads.or(self.threads),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TraceSource {
    Zipf {
        alpha: f64,
        universe: u64,
        length: usize,
    },
    File {
        path: PathBuf,
    },
}

impl TraceSource {
    /// Echo of the trace a given seed produces.
    pub fn describe(&self, seed: u64) -> String {
        match self {
            TraceSource::Zipf {
                alpha,
                universe,
                length,
            } => format!("zipf(alpha={alpha},universe={universe},length={length},seed={seed})"),
            TraceSource::File { path } => format!("file({})", path.display()),
        }
    }

    /// Zipf traces are drawn with the run seed; files are seed-independent.
    pub fn materialize(&self, seed: u64) -> Result<Trace> {
        match self {
            TraceSource::Zipf {
                alpha,
                universe,
                length,
            } => Ok(generate_zipf(&ZipfSpec {
                alpha: *alpha,
                universe: *universe,
                length: *length,
                seed,
            })?),
            TraceSource::File { path } => Ok(load_csv(path)?.trace),
        }
    }

    pub fn depends_on_seed(&self) -> bool {
        matches!(self, TraceSource::Zipf { .. })
    }
}

/// A validated experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub trace: TraceSource,
    pub algorithms: Vec<String>,
    #[serde(skip)]
    pub descriptors: Vec<Descriptor>,
    pub counters: Vec<usize>,
    pub k: usize,
    pub seeds: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub threads: usize,
}

impl ExperimentConfig {
    /// Fills defaults and validates. The output directory falls back to
    /// `$PRECISION_OUT_DIR`, then the working directory.
    pub fn resolve(p: PartialConfig) -> Result<Self> {
        let trace = match p.trace.file {
            Some(path) => TraceSource::File { path },
            None => {
                let alpha = p.trace.alpha.unwrap_or(DEFAULT_ALPHA);
                if !(alpha.is_finite() && alpha >= 0.0) {
                    return Err(LabError::usage(format!(
                        "alpha must be a finite value >= 0, got {alpha}"
                    )));
                }
                let universe = p.trace.universe.unwrap_or(DEFAULT_UNIVERSE);
                let length = p.trace.length.unwrap_or(DEFAULT_LENGTH);
                if universe == 0 || length == 0 {
                    return Err(LabError::usage("universe and length must be at least 1"));
                }
                TraceSource::Zipf {
                    alpha,
                    universe,
                    length,
                }
            }
        };
        let algorithms = p.algorithms.unwrap_or_default();
        if algorithms.is_empty() {
            return Err(LabError::usage(format!(
                "no algorithm given; valid names: {}",
                precision_core::AlgorithmSpec::NAMES.join(", ")
            )));
        }
        let descriptors = algorithms
            .iter()
            .map(|a| a.parse())
            .collect::<Result<Vec<Descriptor>>>()?;
        let counters = p.counters.unwrap_or_default();
        if counters.contains(&0) {
            return Err(LabError::usage("counters must be at least 1"));
        }
        let k = p.k.unwrap_or(DEFAULT_K);
        let seeds = p.seeds.unwrap_or(DEFAULT_SEEDS);
        if k == 0 || seeds == 0 {
            return Err(LabError::usage("k and seeds must be at least 1"));
        }
        let out_dir = p
            .out_dir
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        Ok(ExperimentConfig {
            trace,
            algorithms,
            descriptors,
            counters,
            k,
            seeds,
            seed: p.seed.unwrap_or(DEFAULT_SEED),
            out_dir,
            threads: p.threads.unwrap_or(0),
        })
    }

    /// `seed, seed + 1, ...`, one per repetition.
    pub fn seed_list(&self) -> Vec<u64> {
        (0..self.seeds as u64)
            .map(|i| self.seed.wrapping_add(i))
            .collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }
}

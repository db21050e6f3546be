//! Algorithm descriptors: a name with optional parameters, as in
//! `precision(d=2,mode=pow2,delay=100,init=100)`.

use std::fmt;
use std::str::FromStr;

use precision_core::{AlgorithmSpec, PrecisionConfig, ProbMode};

use crate::error::{LabError, Result};

const DEFAULT_WAYS: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    SpaceSaving,
    Rap,
    RapDWay,
    HashPipe,
    HashParallel,
    Precision,
    Exact,
}

impl Kind {
    fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "space-saving" | "spacesaving" => Kind::SpaceSaving,
            "rap" => Kind::Rap,
            "rap-dway" => Kind::RapDWay,
            "hashpipe" => Kind::HashPipe,
            "hashparallel" => Kind::HashParallel,
            "precision" => Kind::Precision,
            "exact" => Kind::Exact,
            _ => {
                return Err(LabError::usage(format!(
                    "unknown algorithm `{name}`; valid names: {}",
                    AlgorithmSpec::NAMES.join(", ")
                )))
            }
        })
    }

    fn name(self) -> &'static str {
        match self {
            Kind::SpaceSaving => "space-saving",
            Kind::Rap => "rap",
            Kind::RapDWay => "rap-dway",
            Kind::HashPipe => "hashpipe",
            Kind::HashParallel => "hashparallel",
            Kind::Precision => "precision",
            Kind::Exact => "exact",
        }
    }

    fn has_ways(self) -> bool {
        matches!(
            self,
            Kind::RapDWay | Kind::HashPipe | Kind::HashParallel | Kind::Precision
        )
    }

    fn accepts(self, key: &str) -> bool {
        match key {
            "counters" => self != Kind::Exact,
            "d" | "width" => self.has_ways(),
            "delay" => matches!(self, Kind::HashParallel | Kind::Precision),
            "init" | "mode" | "lookup_bits" => self == Kind::Precision,
            _ => false,
        }
    }
}

/// A parsed descriptor. Memory may be left open and supplied later.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Descriptor {
    kind: Kind,
    d: Option<usize>,
    width: Option<usize>,
    counters: Option<usize>,
    initial_value: u64,
    prob_mode: ProbMode,
    delay: u64,
    lookup_bits: u32,
}

fn number<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| {
        LabError::usage(format!(
            "`{key}` expects a non-negative integer, got `{value}`"
        ))
    })
}

impl FromStr for Descriptor {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = match s.find('(') {
            Some(open) => {
                let rest = s[open + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| LabError::usage(format!("unbalanced parentheses in `{s}`")))?;
                (&s[..open], rest)
            }
            None => (s, ""),
        };
        let kind = Kind::parse(name.trim())?;
        let mut out = Descriptor {
            kind,
            d: None,
            width: None,
            counters: None,
            initial_value: 0,
            prob_mode: ProbMode::Exact,
            delay: 0,
            lookup_bits: PrecisionConfig::DEFAULT_LOOKUP_BITS,
        };
        for part in args.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| LabError::usage(format!("expected key=value, got `{part}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !kind.accepts(key) {
                return Err(LabError::usage(format!(
                    "`{}` does not take parameter `{key}`",
                    kind.name()
                )));
            }
            match key {
                "d" => out.d = Some(number(key, value)?),
                "width" => out.width = Some(number(key, value)?),
                "counters" => out.counters = Some(number(key, value)?),
                "init" => out.initial_value = number(key, value)?,
                "delay" => out.delay = number(key, value)?,
                "lookup_bits" => out.lookup_bits = number(key, value)?,
                "mode" => {
                    out.prob_mode = value.parse().map_err(|_| {
                        LabError::usage(format!("unknown probability mode `{value}`"))
                    })?
                }
                _ => unreachable!(),
            }
        }
        Ok(out)
    }
}

impl Descriptor {
    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    /// True when the descriptor fixes its own memory size.
    pub fn pins_memory(&self) -> bool {
        self.width.is_some() || self.counters.is_some()
    }

    fn ways(&self) -> usize {
        if self.kind.has_ways() {
            self.d.unwrap_or(DEFAULT_WAYS)
        } else {
            1
        }
    }

    /// Builds the spec, taking memory from the descriptor or else from
    /// `counters`.
    pub fn to_spec(&self, counters: Option<usize>) -> Result<AlgorithmSpec> {
        let d = self.ways();
        let pinned = match (self.width, self.counters) {
            (Some(w), Some(c)) if w * d != c => {
                return Err(LabError::usage(format!(
                    "{}: width={w} with d={d} gives {} counters, not {c}",
                    self.name(),
                    w * d
                )))
            }
            (Some(w), _) => Some(w * d),
            (None, c) => c,
        };
        let total = match (pinned, counters) {
            (Some(p), Some(c)) if p != c => {
                return Err(LabError::usage(format!(
                    "{} is pinned to {p} counters but {c} were requested",
                    self.name()
                )))
            }
            (Some(p), _) => Some(p),
            (None, c) => c,
        };
        let spec = match self.kind {
            Kind::Exact => return Ok(AlgorithmSpec::Exact),
            Kind::SpaceSaving => AlgorithmSpec::SpaceSaving { capacity: 1 },
            Kind::Rap => AlgorithmSpec::Rap { capacity: 1 },
            Kind::RapDWay => AlgorithmSpec::RapDWay {
                d,
                entries_per_way: 1,
            },
            Kind::HashPipe => AlgorithmSpec::HashPipe {
                d,
                entries_per_way: 1,
            },
            Kind::HashParallel => AlgorithmSpec::HashParallel {
                d,
                entries_per_way: 1,
                delay: self.delay,
            },
            Kind::Precision => AlgorithmSpec::Precision {
                d,
                entries_per_way: 1,
                initial_value: self.initial_value,
                prob_mode: self.prob_mode,
                delay: self.delay,
                lookup_bits: self.lookup_bits,
            },
        };
        let total = total.ok_or_else(|| {
            LabError::usage(format!(
                "{}: memory size not given (use --counters)",
                self.name()
            ))
        })?;
        spec.with_counters(total)
            .map_err(|e| LabError::usage(format!("{}: {e}", self.name())))
    }
}

/// Canonical form without memory size; used as a series label.
impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.ways();
        match self.kind {
            Kind::SpaceSaving | Kind::Rap | Kind::Exact => f.write_str(self.name()),
            Kind::RapDWay | Kind::HashPipe => write!(f, "{}(d={d})", self.name()),
            Kind::HashParallel => write!(f, "hashparallel(d={d},delay={})", self.delay),
            Kind::Precision => write!(
                f,
                "precision(d={d},mode={},delay={},init={},lookup_bits={})",
                self.prob_mode, self.delay, self.initial_value, self.lookup_bits
            ),
        }
    }
}

//! One flow token per line, no header, LF line endings.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use precision_core::traces::Trace;
use precision_core::FlowId;

use crate::error::{LabError, Result};

/// A loaded trace plus the token behind each dense flow id.
#[derive(Clone, Debug)]
pub struct LoadedTrace {
    pub trace: Trace,
    /// `tokens[id]` is the text that was mapped to `FlowId(id)`.
    pub tokens: Vec<String>,
}

/// Reads a trace, numbering tokens by first appearance.
pub fn load_csv(path: impl AsRef<Path>) -> Result<LoadedTrace> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| LabError::io(path, e))?;
    let mut ids: HashMap<String, u64> = HashMap::new();
    let mut tokens = Vec::new();
    let mut flows = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| LabError::Parse {
            path: path.to_path_buf(),
            line: lineno,
            reason: e.to_string(),
        })?;
        let token = line.trim();
        if token.is_empty() {
            return Err(LabError::Parse {
                path: path.to_path_buf(),
                line: lineno,
                reason: "blank line".into(),
            });
        }
        let next = tokens.len() as u64;
        let id = *ids.entry(token.to_owned()).or_insert_with(|| {
            tokens.push(token.to_owned());
            next
        });
        flows.push(FlowId(id));
    }
    if flows.is_empty() {
        return Err(LabError::Parse {
            path: path.to_path_buf(),
            line: 1,
            reason: "empty trace".into(),
        });
    }
    let trace = Trace::new(flows)?;
    Ok(LoadedTrace { trace, tokens })
}

/// Writes each packet's flow id in decimal.
pub fn save_csv(trace: &Trace, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| LabError::io(path, e))?;
    let mut out = BufWriter::new(file);
    for f in trace.flows() {
        writeln!(out, "{}", f.0).map_err(|e| LabError::io(path, e))?;
    }
    out.flush().map_err(|e| LabError::io(path, e))
}

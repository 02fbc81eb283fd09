//! Line-oriented circuit text format.
//!
//! One gate per line, zero-indexed qubits, `#` starts a comment:
//!
//! ```text
//! H 0
//! S 1
//! CNOT 0 1
//! T 2
//! U1 0 re00 im00 re01 im01 re10 im10 re11 im11
//! ```

use crate::error::{Error, Result};

/// A non-empty line split into its mnemonic and arguments, with its 1-based line number.
pub(crate) struct GateLine<'a> {
    pub line: usize,
    pub op: &'a str,
    pub args: Vec<&'a str>,
}

pub(crate) fn gate_lines(text: &str) -> impl Iterator<Item = GateLine<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            return None;
        }
        let mut parts = body.split_whitespace();
        let op = parts.next()?;
        Some(GateLine {
            line: i + 1,
            op,
            args: parts.collect(),
        })
    })
}

impl GateLine<'_> {
    pub fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            message: message.into(),
        }
    }

    pub fn expect_args(&self, count: usize) -> Result<()> {
        if self.args.len() == count {
            Ok(())
        } else {
            Err(self.err(format!(
                "{} takes {count} argument(s), got {}",
                self.op,
                self.args.len()
            )))
        }
    }

    pub fn qubit(&self, idx: usize) -> Result<usize> {
        self.args[idx]
            .parse()
            .map_err(|_| self.err(format!("bad qubit index {:?}", self.args[idx])))
    }

    pub fn real(&self, idx: usize) -> Result<f64> {
        self.args[idx]
            .parse()
            .map_err(|_| self.err(format!("bad number {:?}", self.args[idx])))
    }
}

//! Reader and writer for an OpenQASM 2 subset.
//!
//! Accepted: the `OPENQASM 2.0;` header and `include` lines (ignored), one
//! `qreg`, at most one `creg`, the gates `id x y z h s sdg t tdg rx ry rz
//! u1 p cx cz cp swap ccx`, `barrier`, and `measure q[i] -> c[j]`. Angles are
//! expressions over numbers and `pi` with `+ - * / ^` and parentheses.
//! A `ctrl(k) @` prefix adds `k` leading control qubits to any gate; the
//! writer uses it for control patterns the named gates cannot express.

mod lexer;
mod parser;
mod writer;

use std::fmt;

use crate::circuit::QuantumCircuit;

pub use crate::circuit::invert_circuit;
pub use writer::serialize;

/// 1-based source position (columns count characters).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub severity: Severity,
}

impl ParseDiagnostic {
    pub(crate) fn error(pos: Pos, message: impl Into<String>) -> Self {
        ParseDiagnostic {
            line: pos.line,
            column: pos.column,
            message: message.into(),
            severity: Severity::Error,
        }
    }

    pub(crate) fn warning(pos: Pos, message: impl Into<String>) -> Self {
        ParseDiagnostic {
            severity: Severity::Warning,
            ..ParseDiagnostic::error(pos, message)
        }
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {sev}: {}", self.line, self.column, self.message)
    }
}

/// All diagnostics of a failed parse (errors and any warnings).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseErrors(pub Vec<ParseDiagnostic>);

impl fmt::Display for ParseErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseErrors {}

/// A successful parse with its warnings.
#[derive(Clone, Debug, PartialEq)]
pub struct Parsed {
    pub circuit: QuantumCircuit,
    pub warnings: Vec<ParseDiagnostic>,
}

/// Parses a program, keeping warnings.
pub fn parse_full(source: &str) -> Result<Parsed, ParseErrors> {
    parser::parse_program(source)
}

/// Parses a program into a circuit.
pub fn parse(source: &str) -> Result<QuantumCircuit, ParseErrors> {
    parse_full(source).map(|p| p.circuit)
}

/// Parses raw bytes; invalid UTF-8 is reported at its position.
pub fn parse_bytes(bytes: &[u8]) -> Result<QuantumCircuit, ParseErrors> {
    match std::str::from_utf8(bytes) {
        Ok(s) => parse(s),
        Err(e) => {
            let valid = std::str::from_utf8(&bytes[..e.valid_up_to()]).unwrap_or("");
            let line = valid.matches('\n').count() + 1;
            let column = valid.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
            Err(ParseErrors(vec![ParseDiagnostic::error(
                Pos { line, column },
                "invalid UTF-8",
            )]))
        }
    }
}

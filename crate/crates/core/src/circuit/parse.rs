//! Line-oriented circuit text format.
//!
//! ```text
//! # GHZ preparation
//! qubits 3
//! h 2; cx 2 1; cx 1 0
//! rz 0.25 1
//! ```
//!
//! Statements end at a newline or `;`. The first statement declares the
//! register size. Gate statements are `<name> [<angle>] <qubit>...`, with
//! controls listed before the target.

use std::fmt;

use thiserror::Error;

use super::{Circuit, CircuitError, Gate, GateKind};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    MissingHeader,
    DuplicateHeader,
    UnknownGate(String),
    BadNumber(String),
    MissingOperand(&'static str),
    Invalid(CircuitError),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::MissingHeader => f.write_str("expected `qubits <n>` header"),
            ParseErrorKind::DuplicateHeader => f.write_str("duplicate `qubits` header"),
            ParseErrorKind::UnknownGate(name) => write!(f, "unknown gate `{name}`"),
            ParseErrorKind::BadNumber(tok) => write!(f, "invalid number `{tok}`"),
            ParseErrorKind::MissingOperand(what) => write!(f, "missing {what}"),
            ParseErrorKind::Invalid(e) => e.fmt(f),
        }
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

/// Splits one line into `;`-separated statements of whitespace tokens,
/// tracking 1-based columns.
fn statements(line: &str) -> Vec<Vec<Token<'_>>> {
    let line = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut offset = 0;
    for stmt in line.split(';') {
        let mut toks = Vec::new();
        let mut start = None;
        for (i, ch) in stmt.char_indices().chain(std::iter::once((stmt.len(), ' '))) {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(i),
                (true, Some(s)) => {
                    toks.push(Token {
                        text: &stmt[s..i],
                        column: offset + s + 1,
                    });
                    start = None;
                }
                _ => {}
            }
        }
        if !toks.is_empty() {
            out.push(toks);
        }
        offset += stmt.len() + 1;
    }
    out
}

pub fn parse_circuit(text: &str) -> Result<Circuit, ParseError> {
    let mut circuit: Option<Circuit> = None;
    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        for toks in statements(line) {
            let err = |column: usize, kind: ParseErrorKind| ParseError {
                line: line_no,
                column,
                kind,
            };
            let head = &toks[0];
            if head.text.eq_ignore_ascii_case("qubits") {
                if circuit.is_some() {
                    return Err(err(head.column, ParseErrorKind::DuplicateHeader));
                }
                let tok = toks
                    .get(1)
                    .ok_or_else(|| err(head.column, ParseErrorKind::MissingOperand("qubit count")))?;
                let n: usize = tok
                    .text
                    .parse()
                    .map_err(|_| err(tok.column, ParseErrorKind::BadNumber(tok.text.into())))?;
                if let Some(extra) = toks.get(2) {
                    return Err(err(extra.column, ParseErrorKind::BadNumber(extra.text.into())));
                }
                circuit = Some(
                    Circuit::new(n).map_err(|e| err(tok.column, ParseErrorKind::Invalid(e)))?,
                );
                continue;
            }
            let c = circuit
                .as_mut()
                .ok_or_else(|| err(head.column, ParseErrorKind::MissingHeader))?;
            let kind: GateKind = head
                .text
                .parse()
                .map_err(|name| err(head.column, ParseErrorKind::UnknownGate(name)))?;
            let np = kind.num_params();
            if toks.len() < 1 + np {
                return Err(err(head.column, ParseErrorKind::MissingOperand("angle")));
            }
            let params = toks[1..1 + np]
                .iter()
                .map(|t| {
                    t.text
                        .parse::<f64>()
                        .map_err(|_| err(t.column, ParseErrorKind::BadNumber(t.text.into())))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut qubits = Vec::new();
            for t in &toks[1 + np..] {
                let q: usize = t
                    .text
                    .parse()
                    .map_err(|_| err(t.column, ParseErrorKind::BadNumber(t.text.into())))?;
                if q >= c.num_qubits() {
                    return Err(err(
                        t.column,
                        ParseErrorKind::Invalid(CircuitError::QubitOutOfRange {
                            index: q,
                            num_qubits: c.num_qubits(),
                        }),
                    ));
                }
                qubits.push(q);
            }
            let split = match kind {
                GateKind::Swap => 0,
                _ => qubits.len().saturating_sub(1),
            };
            let targets = qubits.split_off(split);
            let gate = Gate::new(kind, params, qubits, targets)
                .map_err(|e| err(head.column, ParseErrorKind::Invalid(e)))?;
            c.push(gate)
                .map_err(|e| err(head.column, ParseErrorKind::Invalid(e)))?;
        }
    }
    circuit.ok_or(ParseError {
        line: text.lines().count().max(1),
        column: 1,
        kind: ParseErrorKind::MissingHeader,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ghz_one_liner() {
        let c = parse_circuit("qubits 3; h 2; cx 2 1; cx 1 0").unwrap();
        assert_eq!(c.num_qubits(), 3);
        assert_eq!(
            c.gates(),
            &[Gate::h(2), Gate::cx(2, 1).unwrap(), Gate::cx(1, 0).unwrap()]
        );
    }

    #[test]
    fn empty_circuit() {
        let c = parse_circuit("qubits 1;").unwrap();
        assert_eq!(c.num_qubits(), 1);
        assert!(c.is_empty());
    }

    #[test]
    fn out_of_range_qubit_reports_position() {
        let e = parse_circuit("qubits 2; h 5").unwrap_err();
        assert_eq!((e.line, e.column), (1, 13));
        assert!(matches!(
            e.kind,
            ParseErrorKind::Invalid(CircuitError::QubitOutOfRange { index: 5, num_qubits: 2 })
        ));
    }

    #[test]
    fn comments_angles_and_multiline() {
        let src = "# header comment\nqubits 4   # four wires\nrx -0.5 3\n\nmcx 3 2 1 0; swap 0 2\n";
        let c = parse_circuit(src).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.gates()[0].params(), &[-0.5]);
        assert_eq!(c.gates()[1].controls(), &[3, 2, 1]);
        assert_eq!(c.gates()[1].targets(), &[0]);
        assert_eq!(c.gates()[2].targets(), &[0, 2]);
    }

    #[test]
    fn syntax_errors() {
        let e = parse_circuit("h 0").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::MissingHeader);

        let e = parse_circuit("qubits 2\nccz 0 1").unwrap_err();
        assert_eq!((e.line, e.column), (2, 1));
        assert_eq!(e.kind, ParseErrorKind::UnknownGate("ccz".into()));

        let e = parse_circuit("qubits 2\ncx 0").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Invalid(CircuitError::Arity { .. })));

        let e = parse_circuit("qubits 2\nrx zero 1").unwrap_err();
        assert_eq!((e.line, e.column), (2, 4));

        let e = parse_circuit("qubits 2\nrz").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::MissingOperand("angle"));

        assert_eq!(
            parse_circuit("qubits 2; qubits 3").unwrap_err().kind,
            ParseErrorKind::DuplicateHeader
        );
        assert!(parse_circuit("qubits 0").is_err());
        assert!(parse_circuit("").is_err());
    }
}

//! Text formats: single formulas, circuits and dataset files.
//!
//! A circuit file has one node per line (`<id> INPUT <attr>`,
//! `<id> AND <id> <id> ...`, `<id> OR <id> <id> ...`) and ends with
//! `OUTPUT <id>`. Anything else is read as formula syntax. Dataset files
//! hold one formula per line. In all three, `#` starts a comment.

use std::collections::HashMap;
use std::fmt::Write as _;

use boolmin_core::{Circuit, CircuitError, CircuitIssue, CircuitNode, Formula, Gate, ParseError};

/// A parsed input file.
#[derive(Clone, Debug)]
pub enum Input {
    /// Formula syntax.
    Formula(Formula),
    /// Circuit syntax, already validated.
    Circuit(Circuit),
}

impl Input {
    /// The formula to optimize; circuits are unfolded.
    pub fn into_formula(self) -> Result<Formula, InputError> {
        match self {
            Input::Formula(f) => Ok(f),
            Input::Circuit(c) => c.unfold().map_err(InputError::Circuit),
        }
    }
}

/// Unreadable input.
#[derive(Debug, thiserror::Error)]
pub enum InputError {
    /// Formula syntax error.
    #[error("line {line}: {source}")]
    Formula {
        /// 1-based line.
        line: usize,
        /// Parser diagnostic.
        source: ParseError,
    },
    /// Circuit syntax error.
    #[error("line {line}: {message}")]
    CircuitSyntax {
        /// 1-based line.
        line: usize,
        /// What is wrong.
        message: String,
    },
    /// Structurally invalid circuit.
    #[error("invalid circuit: {}", describe_issues(.0))]
    InvalidCircuit(Vec<CircuitIssue>),
    /// Circuit could not be unfolded.
    #[error("{0}")]
    Circuit(CircuitError),
    /// Nothing but comments and blank lines.
    #[error("input is empty")]
    Empty,
}

fn describe_issues(issues: &[CircuitIssue]) -> String {
    issues.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn is_circuit(text: &str) -> bool {
    text.lines()
        .map(strip_comment)
        .any(|l| l.split_whitespace().next() == Some("OUTPUT"))
}

/// Parses a formula or, if an `OUTPUT` line is present, a circuit.
pub fn parse_input(text: &str) -> Result<Input, InputError> {
    if is_circuit(text) {
        parse_circuit(text).map(Input::Circuit)
    } else {
        parse_formula(text).map(Input::Formula)
    }
}

/// Parses one formula, which may span several lines.
pub fn parse_formula(text: &str) -> Result<Formula, InputError> {
    let body: Vec<&str> = text.lines().map(strip_comment).collect();
    if body.iter().all(|l| l.is_empty()) {
        return Err(InputError::Empty);
    }
    // Comments are stripped line by line, so line numbers survive the join.
    let joined = body.join("\n");
    Formula::parse(&joined).map_err(|source| {
        let line = 1 + joined[..source.position.min(joined.len())].matches('\n').count();
        InputError::Formula { line, source }
    })
}

/// Parses and validates a circuit.
pub fn parse_circuit(text: &str) -> Result<Circuit, InputError> {
    let syntax = |line: usize, message: String| InputError::CircuitSyntax { line, message };
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut raw: Vec<(String, Result<String, (Gate, Vec<(String, usize)>)>)> = Vec::new();
    let mut output: Option<(String, usize)> = None;
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let tokens: Vec<&str> = strip_comment(line).split_whitespace().collect();
        match tokens.as_slice() {
            [] => continue,
            ["OUTPUT", id] => {
                if output.is_some() {
                    return Err(syntax(n, "second OUTPUT line".into()));
                }
                output = Some((id.to_string(), n));
            }
            ["OUTPUT", ..] => return Err(syntax(n, "expected `OUTPUT <id>`".into())),
            _ if output.is_some() => return Err(syntax(n, "node after OUTPUT".into())),
            [id, "INPUT", attr] => {
                if ids.insert(id.to_string(), raw.len()).is_some() {
                    return Err(syntax(n, format!("duplicate id `{id}`")));
                }
                raw.push((id.to_string(), Ok(attr.to_string())));
            }
            [_, "INPUT", ..] => return Err(syntax(n, "expected `<id> INPUT <attribute>`".into())),
            [id, kind @ ("AND" | "OR"), args @ ..] => {
                if args.is_empty() {
                    return Err(syntax(n, format!("gate `{id}` has no inputs")));
                }
                if ids.insert(id.to_string(), raw.len()).is_some() {
                    return Err(syntax(n, format!("duplicate id `{id}`")));
                }
                let gate = if *kind == "AND" { Gate::And } else { Gate::Or };
                raw.push((
                    id.to_string(),
                    Err((gate, args.iter().map(|a| (a.to_string(), n)).collect())),
                ));
            }
            _ => return Err(syntax(n, "expected INPUT, AND, OR or OUTPUT".into())),
        }
    }
    let Some((out, out_line)) = output else {
        return Err(InputError::Empty);
    };
    let lookup = |id: &str, line: usize| {
        ids.get(id)
            .copied()
            .ok_or_else(|| syntax(line, format!("unknown id `{id}`")))
    };
    let output = lookup(&out, out_line)?;
    let mut nodes = Vec::with_capacity(raw.len());
    for (id, node) in raw {
        let node = match node {
            Ok(attr) => CircuitNode::Input(attr.into()),
            Err((gate, args)) => CircuitNode::Gate(
                gate,
                args.iter()
                    .map(|(a, line)| lookup(a, *line))
                    .collect::<Result<_, _>>()?,
            ),
        };
        nodes.push((id, node));
    }
    let circuit = Circuit::new(nodes, output);
    circuit.validate().map_err(InputError::InvalidCircuit)?;
    Ok(circuit)
}

/// Writes `c` in circuit syntax.
pub fn write_circuit(c: &Circuit) -> String {
    let mut out = String::new();
    for (id, node) in c.ids().iter().zip(c.nodes()) {
        match node {
            CircuitNode::Input(attr) => writeln!(out, "{id} INPUT {attr}"),
            CircuitNode::Gate(gate, args) => {
                let kind = if *gate == Gate::And { "AND" } else { "OR" };
                let args: Vec<&str> = args.iter().map(|&a| c.ids()[a].as_str()).collect();
                writeln!(out, "{id} {kind} {}", args.join(" "))
            }
        }
        .expect("writing to a String");
    }
    writeln!(out, "OUTPUT {}", c.ids()[c.output()]).expect("writing to a String");
    out
}

/// Reads a dataset: one formula per non-blank, non-comment line.
pub fn read_dataset(text: &str) -> Result<Vec<Formula>, InputError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !strip_comment(l).is_empty())
        .map(|(i, l)| Formula::parse(strip_comment(l)).map_err(|source| InputError::Formula { line: i + 1, source }))
        .collect()
}

/// Writes a dataset with `header` lines as leading comments.
pub fn write_dataset(header: &[String], formulas: &[Formula]) -> String {
    let mut out = String::new();
    for h in header {
        writeln!(out, "# {h}").expect("writing to a String");
    }
    for f in formulas {
        writeln!(out, "{}", f.to_text()).expect("writing to a String");
    }
    out
}

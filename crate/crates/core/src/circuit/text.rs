//! Line-oriented text dump of a [`Circuit`].
//!
//! ```text
//! CIRCUIT qubits=3 clbits=1
//! REG board q0..q1
//! H q0
//! CX q0 -> q1
//! MEASURE q1 -> c0
//! RY(1.5707963267948966e0) q2 ? c0=1
//! READOUT q0..q1
//! ```
//!
//! Register ranges are inclusive. Angles use 17 significant digits so the
//! dump round-trips bit for bit. `#` starts a comment.

use std::fmt::Write as _;
use std::ops::Range;

use thiserror::Error;

use super::{Circuit, CircuitError, Condition, GateKind, Instruction, Operation, RegisterKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error(transparent)]
    Invalid(#[from] CircuitError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

fn fmt_angle(t: f64) -> String {
    format!("{t:.16e}")
}

fn fmt_condition(out: &mut String, cond: &Option<Condition>) {
    if let Some(c) = cond {
        out.push_str(" ?");
        for (i, &(bit, value)) in c.terms().iter().enumerate() {
            let _ = write!(
                out,
                "{}c{bit}={}",
                if i == 0 { " " } else { "," },
                value as u8
            );
        }
    }
}

fn fmt_range(prefix: char, r: &Range<usize>) -> String {
    format!("{prefix}{}..{prefix}{}", r.start, r.end - 1)
}

pub(super) fn emit(circuit: &Circuit) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "CIRCUIT qubits={} clbits={}",
        circuit.num_qubits, circuit.num_clbits
    );
    for reg in &circuit.registers {
        let prefix = match reg.kind {
            RegisterKind::Qubit => 'q',
            RegisterKind::Clbit => 'c',
        };
        let _ = writeln!(out, "REG {} {}", reg.name, fmt_range(prefix, &reg.range));
    }
    for inst in &circuit.instructions {
        emit_instruction(&mut out, inst);
        out.push('\n');
    }
    if let Some(r) = &circuit.readout {
        out.push_str("READOUT ");
        out.push_str(&fmt_range('q', &r.qubits));
        fmt_condition(&mut out, &r.condition);
        out.push('\n');
    }
    out
}

fn emit_instruction(out: &mut String, inst: &Instruction) {
    let target = inst.targets[0];
    match inst.op {
        Operation::Measure { clbit } => {
            let _ = write!(out, "MEASURE q{target} -> c{clbit}");
        }
        Operation::Reset => {
            let _ = write!(out, "RESET q{target}");
        }
        Operation::Gate(kind) => {
            out.push_str(kind.name());
            if let Some(t) = kind.angle() {
                let _ = write!(out, "({})", fmt_angle(t));
            }
            if inst.controls.is_empty() {
                let _ = write!(out, " q{target}");
            } else {
                for (i, c) in inst.controls.iter().enumerate() {
                    let _ = write!(out, "{}q{c}", if i == 0 { " " } else { "," });
                }
                let _ = write!(out, " -> q{target}");
            }
        }
    }
    fmt_condition(out, &inst.condition);
}

fn syntax(msg: impl Into<String>) -> ParseErrorKind {
    ParseErrorKind::Syntax(msg.into())
}

fn parse_index(token: &str, prefix: char) -> Result<usize, ParseErrorKind> {
    let digits = token
        .strip_prefix(prefix)
        .ok_or_else(|| syntax(format!("expected {prefix}<index>, found {token:?}")))?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(syntax(format!("bad index {token:?}")));
    }
    digits
        .parse()
        .map_err(|_| syntax(format!("index {token:?} is too large")))
}

fn parse_range(token: &str, prefix: char) -> Result<Range<usize>, ParseErrorKind> {
    let (a, b) = token
        .split_once("..")
        .ok_or_else(|| syntax(format!("expected a range, found {token:?}")))?;
    let (a, b) = (parse_index(a, prefix)?, parse_index(b, prefix)?);
    if b < a {
        return Err(syntax(format!("range {token:?} is reversed")));
    }
    let end = b
        .checked_add(1)
        .ok_or_else(|| syntax("range end overflows"))?;
    Ok(a..end)
}

fn parse_condition(text: &str) -> Result<Condition, ParseErrorKind> {
    let terms = text
        .split(',')
        .map(|term| {
            let (bit, value) = term
                .trim()
                .split_once('=')
                .ok_or_else(|| syntax(format!("expected c<index>=<0|1>, found {term:?}")))?;
            let value = match value {
                "0" => false,
                "1" => true,
                other => {
                    return Err(syntax(format!(
                        "condition value must be 0 or 1, found {other:?}"
                    )))
                }
            };
            Ok((parse_index(bit, 'c')?, value))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Condition::new(terms))
}

fn parse_header(line: &str) -> Result<(usize, usize), ParseErrorKind> {
    let mut tokens = line.split_whitespace();
    if tokens.next() != Some("CIRCUIT") {
        return Err(syntax("expected `CIRCUIT qubits=<Q> clbits=<C>` header"));
    }
    let mut field = |name: &str| -> Result<usize, ParseErrorKind> {
        let tok = tokens
            .next()
            .ok_or_else(|| syntax(format!("missing {name}=")))?;
        let v = tok
            .strip_prefix(name)
            .and_then(|t| t.strip_prefix('='))
            .ok_or_else(|| syntax(format!("expected {name}=<int>, found {tok:?}")))?;
        v.parse()
            .map_err(|_| syntax(format!("bad {name} value {v:?}")))
    };
    let q = field("qubits")?;
    let c = field("clbits")?;
    if tokens.next().is_some() {
        return Err(syntax("trailing tokens after header"));
    }
    Ok((q, c))
}

/// Splits `NAME(<angle>)` into the name and the parsed angle.
fn split_mnemonic(token: &str) -> Result<(&str, Option<f64>), ParseErrorKind> {
    match token.split_once('(') {
        None => Ok((token, None)),
        Some((name, rest)) => {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| syntax(format!("unclosed angle in {token:?}")))?;
            let angle = inner
                .parse::<f64>()
                .map_err(|_| syntax(format!("bad angle {inner:?}")))?;
            Ok((name, Some(angle)))
        }
    }
}

fn parse_instruction(body: &str) -> Result<Instruction, ParseErrorKind> {
    let (ops, condition) = match body.split_once('?') {
        Some((ops, cond)) => (ops.trim(), Some(parse_condition(cond.trim())?)),
        None => (body, None),
    };
    let (head, rest) = ops
        .split_once(' ')
        .ok_or_else(|| syntax(format!("missing operands in {ops:?}")))?;
    let (name, angle) = split_mnemonic(head)?;
    let (lhs, rhs) = match rest.split_once("->") {
        Some((l, r)) => (l.trim(), Some(r.trim())),
        None => (rest.trim(), None),
    };
    let lhs: Vec<&str> = lhs.split(',').map(str::trim).collect();

    let plain_gate = |kind: fn(f64) -> GateKind| -> Result<Instruction, ParseErrorKind> {
        let target = match (angle, rhs, lhs.as_slice()) {
            (_, None, [q]) => parse_index(q, 'q')?,
            _ => return Err(syntax(format!("{name} takes a single qubit"))),
        };
        Ok(Instruction::gate(
            kind(angle.unwrap_or(0.0)),
            vec![],
            target,
        ))
    };
    let controlled = |kind: GateKind| -> Result<Instruction, ParseErrorKind> {
        let target = rhs.ok_or_else(|| syntax(format!("{name} needs `-> q<target>`")))?;
        let controls = lhs
            .iter()
            .map(|q| parse_index(q, 'q'))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Instruction::gate(kind, controls, parse_index(target, 'q')?))
    };
    let needs_angle = matches!(name, "RY" | "CP" | "MCRY");
    if needs_angle != angle.is_some() {
        return Err(syntax(if needs_angle {
            format!("{name} needs an angle")
        } else {
            format!("{name} takes no angle")
        }));
    }
    let theta = angle.unwrap_or(0.0);

    let mut inst = match name {
        "X" => plain_gate(|_| GateKind::X)?,
        "H" => plain_gate(|_| GateKind::H)?,
        "RY" => plain_gate(GateKind::Ry)?,
        "RESET" => {
            let mut i = plain_gate(|_| GateKind::X)?;
            i.op = Operation::Reset;
            i
        }
        "MEASURE" => {
            let (q, c) = match (lhs.as_slice(), rhs) {
                ([q], Some(c)) => (parse_index(q, 'q')?, parse_index(c, 'c')?),
                _ => return Err(syntax("expected `MEASURE q<i> -> c<j>`")),
            };
            Instruction::measure(q, c)
        }
        "CX" => controlled(GateKind::Cx)?,
        "CZ" => controlled(GateKind::Cz)?,
        "CP" => controlled(GateKind::Cp(theta))?,
        "MCX" => controlled(GateKind::Mcx)?,
        "MCRY" => controlled(GateKind::Mcry(theta))?,
        other => return Err(syntax(format!("unknown operation {other:?}"))),
    };
    inst.condition = condition;
    Ok(inst)
}

#[derive(PartialEq, PartialOrd)]
enum Section {
    Header,
    Body,
    Done,
}

pub(super) fn parse(input: &str) -> Result<Circuit, ParseError> {
    let mut circuit: Option<Circuit> = None;
    let mut section = Section::Header;
    let mut last_line = 0;
    for (i, raw) in input.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let at = |kind: ParseErrorKind| ParseError {
            line: line_no,
            kind,
        };
        let line = raw.split_once('#').map_or(raw, |(code, _)| code).trim();
        if line.is_empty() {
            continue;
        }
        let Some(c) = circuit.as_mut() else {
            let (q, cl) = parse_header(line).map_err(at)?;
            circuit = Some(Circuit::new(q, cl).map_err(|e| at(e.into()))?);
            continue;
        };
        if section == Section::Done {
            return Err(at(syntax("nothing may follow READOUT")));
        }
        if let Some(rest) = line.strip_prefix("REG ") {
            if section != Section::Header {
                return Err(at(syntax("REG lines must precede instructions")));
            }
            let mut parts = rest.split_whitespace();
            let (Some(name), Some(range), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(at(syntax("expected `REG <name> q<a>..q<b>`")));
            };
            let (kind, prefix) = if range.starts_with('c') {
                (RegisterKind::Clbit, 'c')
            } else {
                (RegisterKind::Qubit, 'q')
            };
            let range = parse_range(range, prefix).map_err(at)?;
            c.add_register(name, kind, range)
                .map_err(|e| at(e.into()))?;
        } else if let Some(rest) = line.strip_prefix("READOUT ") {
            let (range, cond) = match rest.split_once('?') {
                Some((r, cond)) => (r.trim(), Some(parse_condition(cond.trim()).map_err(at)?)),
                None => (rest.trim(), None),
            };
            let range = parse_range(range, 'q').map_err(at)?;
            c.set_readout(range, cond).map_err(|e| at(e.into()))?;
            section = Section::Done;
        } else {
            section = Section::Body;
            let inst = parse_instruction(line).map_err(at)?;
            c.append(inst).map_err(|e| at(e.into()))?;
        }
    }
    circuit.ok_or(ParseError {
        line: last_line.max(1),
        kind: syntax("missing CIRCUIT header"),
    })
}

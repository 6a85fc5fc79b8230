//! Gate-level circuit IR with classical bits, mid-circuit measurement and
//! classically conditioned instructions.
//!
//! Qubit and clbit indices are 0-based. A circuit may end with a terminal
//! [`Readout`] of a contiguous qubit range; the simulator reports that range
//! as the observed board bits without spending classical bits on it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Range;

use thiserror::Error;

mod text;

pub use text::{ParseError, ParseErrorKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    X,
    H,
    Ry(f64),
    Cx,
    Cz,
    Cp(f64),
    /// Multi-controlled X; a Toffoli is `Mcx` with two controls.
    Mcx,
    Mcry(f64),
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::H => "H",
            GateKind::Ry(_) => "RY",
            GateKind::Cx => "CX",
            GateKind::Cz => "CZ",
            GateKind::Cp(_) => "CP",
            GateKind::Mcx => "MCX",
            GateKind::Mcry(_) => "MCRY",
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            GateKind::Ry(t) | GateKind::Cp(t) | GateKind::Mcry(t) => Some(t),
            _ => None,
        }
    }

    fn control_arity(&self) -> Arity {
        match self {
            GateKind::X | GateKind::H | GateKind::Ry(_) => Arity::Exactly(0),
            GateKind::Cx | GateKind::Cz | GateKind::Cp(_) => Arity::Exactly(1),
            GateKind::Mcx | GateKind::Mcry(_) => Arity::AtLeastOne,
        }
    }
}

#[derive(Clone, Copy)]
enum Arity {
    Exactly(usize),
    AtLeastOne,
}

impl Arity {
    fn admits(self, k: usize) -> bool {
        match self {
            Arity::Exactly(m) => k == m,
            Arity::AtLeastOne => k >= 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Operation {
    Gate(GateKind),
    Measure { clbit: usize },
    Reset,
}

impl Operation {
    pub fn is_gate(&self) -> bool {
        matches!(self, Operation::Gate(_))
    }
}

/// Conjunction of `clbit == value` terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Condition(Vec<(usize, bool)>);

impl Condition {
    pub fn new(terms: Vec<(usize, bool)>) -> Self {
        Self(terms)
    }

    /// Every listed clbit must read 1.
    pub fn all_ones(clbits: impl IntoIterator<Item = usize>) -> Self {
        Self(clbits.into_iter().map(|c| (c, true)).collect())
    }

    pub fn terms(&self) -> &[(usize, bool)] {
        &self.0
    }

    pub fn is_satisfied_by(&self, clbits: &[bool]) -> bool {
        self.0.iter().all(|&(c, v)| clbits[c] == v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instruction {
    pub op: Operation,
    pub controls: Vec<usize>,
    pub targets: Vec<usize>,
    pub condition: Option<Condition>,
}

impl Instruction {
    pub fn gate(kind: GateKind, controls: Vec<usize>, target: usize) -> Self {
        Self {
            op: Operation::Gate(kind),
            controls,
            targets: vec![target],
            condition: None,
        }
    }

    pub fn x(q: usize) -> Self {
        Self::gate(GateKind::X, vec![], q)
    }

    pub fn h(q: usize) -> Self {
        Self::gate(GateKind::H, vec![], q)
    }

    pub fn ry(theta: f64, q: usize) -> Self {
        Self::gate(GateKind::Ry(theta), vec![], q)
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self::gate(GateKind::Cx, vec![control], target)
    }

    pub fn cz(control: usize, target: usize) -> Self {
        Self::gate(GateKind::Cz, vec![control], target)
    }

    pub fn cp(theta: f64, control: usize, target: usize) -> Self {
        Self::gate(GateKind::Cp(theta), vec![control], target)
    }

    pub fn mcx(controls: Vec<usize>, target: usize) -> Self {
        Self::gate(GateKind::Mcx, controls, target)
    }

    pub fn mcry(theta: f64, controls: Vec<usize>, target: usize) -> Self {
        Self::gate(GateKind::Mcry(theta), controls, target)
    }

    /// `X`, `CX` or `MCX` depending on how many controls are given.
    pub fn controlled_x(controls: &[usize], target: usize) -> Self {
        match controls {
            [] => Self::x(target),
            [c] => Self::cx(*c, target),
            _ => Self::mcx(controls.to_vec(), target),
        }
    }

    /// `RY` when uncontrolled, otherwise `MCRY`.
    pub fn controlled_ry(theta: f64, controls: &[usize], target: usize) -> Self {
        if controls.is_empty() {
            Self::ry(theta, target)
        } else {
            Self::mcry(theta, controls.to_vec(), target)
        }
    }

    pub fn measure(qubit: usize, clbit: usize) -> Self {
        Self {
            op: Operation::Measure { clbit },
            controls: vec![],
            targets: vec![qubit],
            condition: None,
        }
    }

    pub fn reset(qubit: usize) -> Self {
        Self {
            op: Operation::Reset,
            controls: vec![],
            targets: vec![qubit],
            condition: None,
        }
    }

    pub fn with_condition(mut self, condition: Condition) -> Self {
        self.condition = Some(condition);
        self
    }

    /// Instruction with the extra controls prepended, or `None` for
    /// operations that cannot be quantum-controlled.
    pub fn with_controls(&self, extra: &[usize]) -> Option<Self> {
        if extra.is_empty() {
            return Some(self.clone());
        }
        let Operation::Gate(kind) = self.op else {
            return None;
        };
        let mut controls = extra.to_vec();
        controls.extend_from_slice(&self.controls);
        let target = self.targets[0];
        let mut out = match kind {
            GateKind::X | GateKind::Cx | GateKind::Mcx => Self::controlled_x(&controls, target),
            GateKind::Ry(t) | GateKind::Mcry(t) => Self::mcry(t, controls, target),
            _ => return None,
        };
        out.condition = self.condition.clone();
        Some(out)
    }

    /// Every qubit the instruction touches.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.controls.iter().chain(&self.targets).copied()
    }

    /// Every clbit the instruction reads or writes.
    pub fn clbits(&self) -> impl Iterator<Item = usize> + '_ {
        let written = match self.op {
            Operation::Measure { clbit } => Some(clbit),
            _ => None,
        };
        written.into_iter().chain(
            self.condition
                .iter()
                .flat_map(|c| c.0.iter().map(|&(b, _)| b)),
        )
    }

    fn validate(
        &self,
        num_qubits: usize,
        num_clbits: usize,
        written: &BTreeSet<usize>,
    ) -> Result<(), CircuitError> {
        let (expected_controls, name) = match self.op {
            Operation::Gate(kind) => {
                if let Some(t) = kind.angle() {
                    if !t.is_finite() {
                        return Err(CircuitError::NonFiniteAngle(kind.name()));
                    }
                }
                (kind.control_arity(), kind.name())
            }
            Operation::Measure { .. } => (Arity::Exactly(0), "MEASURE"),
            Operation::Reset => (Arity::Exactly(0), "RESET"),
        };
        if !expected_controls.admits(self.controls.len()) || self.targets.len() != 1 {
            return Err(CircuitError::Arity {
                op: name,
                controls: self.controls.len(),
                targets: self.targets.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for q in self.qubits() {
            if q >= num_qubits {
                return Err(CircuitError::QubitOutOfRange {
                    qubit: q,
                    num_qubits,
                });
            }
            if !seen.insert(q) {
                return Err(CircuitError::Overlap { qubit: q });
            }
        }
        if let Operation::Measure { clbit } = self.op {
            if clbit >= num_clbits {
                return Err(CircuitError::ClbitOutOfRange { clbit, num_clbits });
            }
        }
        if let Some(cond) = &self.condition {
            validate_condition(cond, num_clbits, written)?;
        }
        Ok(())
    }
}

fn validate_condition(
    cond: &Condition,
    num_clbits: usize,
    written: &BTreeSet<usize>,
) -> Result<(), CircuitError> {
    if cond.0.is_empty() {
        return Err(CircuitError::EmptyCondition);
    }
    let mut seen = BTreeSet::new();
    for &(c, _) in &cond.0 {
        if c >= num_clbits {
            return Err(CircuitError::ClbitOutOfRange {
                clbit: c,
                num_clbits,
            });
        }
        if !seen.insert(c) {
            return Err(CircuitError::DuplicateConditionBit(c));
        }
        if !written.contains(&c) {
            return Err(CircuitError::ConditionBeforeMeasure(c));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("a circuit needs at least one qubit")]
    ZeroQubits,
    #[error("qubit q{qubit} is out of range for a {num_qubits}-qubit circuit")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("clbit c{clbit} is out of range for a circuit with {num_clbits} clbits")]
    ClbitOutOfRange { clbit: usize, num_clbits: usize },
    #[error("qubit q{qubit} is used more than once in one instruction")]
    Overlap { qubit: usize },
    #[error(
        "{op} takes a different operand shape than {controls} control(s) and {targets} target(s)"
    )]
    Arity {
        op: &'static str,
        controls: usize,
        targets: usize,
    },
    #[error("{0} angle must be finite")]
    NonFiniteAngle(&'static str),
    #[error("condition has no terms")]
    EmptyCondition,
    #[error("clbit c{0} appears twice in one condition")]
    DuplicateConditionBit(usize),
    #[error("condition reads c{0} before any measurement writes it")]
    ConditionBeforeMeasure(usize),
    #[error("register name {0:?} is not an identifier")]
    InvalidRegisterName(String),
    #[error("register {0:?} is defined twice")]
    DuplicateRegister(String),
    #[error("range {start}..{end} is empty or exceeds the circuit")]
    BadRange { start: usize, end: usize },
    #[error("circuit already has a readout")]
    DuplicateReadout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegisterKind {
    Qubit,
    Clbit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub kind: RegisterKind,
    pub range: Range<usize>,
}

/// Terminal observation of a qubit range, optionally gated by clbits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Readout {
    pub qubits: Range<usize>,
    pub condition: Option<Condition>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    num_clbits: usize,
    instructions: Vec<Instruction>,
    registers: Vec<Register>,
    readout: Option<Readout>,
    written: BTreeSet<usize>,
}

impl Circuit {
    pub fn new(num_qubits: usize, num_clbits: usize) -> Result<Self, CircuitError> {
        if num_qubits == 0 {
            return Err(CircuitError::ZeroQubits);
        }
        Ok(Self {
            num_qubits,
            num_clbits,
            instructions: Vec::new(),
            registers: Vec::new(),
            readout: None,
            written: BTreeSet::new(),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_clbits(&self) -> usize {
        self.num_clbits
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn register(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }

    pub fn readout(&self) -> Option<&Readout> {
        self.readout.as_ref()
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Validates and appends; on error the circuit is unchanged.
    pub fn append(&mut self, instruction: Instruction) -> Result<(), CircuitError> {
        instruction.validate(self.num_qubits, self.num_clbits, &self.written)?;
        if let Operation::Measure { clbit } = instruction.op {
            self.written.insert(clbit);
        }
        self.instructions.push(instruction);
        Ok(())
    }

    pub fn extend(
        &mut self,
        instructions: impl IntoIterator<Item = Instruction>,
    ) -> Result<(), CircuitError> {
        instructions.into_iter().try_for_each(|i| self.append(i))
    }

    pub fn add_register(
        &mut self,
        name: &str,
        kind: RegisterKind,
        range: Range<usize>,
    ) -> Result<(), CircuitError> {
        let valid_name = name
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid_name {
            return Err(CircuitError::InvalidRegisterName(name.to_owned()));
        }
        if self.register(name).is_some() {
            return Err(CircuitError::DuplicateRegister(name.to_owned()));
        }
        let width = match kind {
            RegisterKind::Qubit => self.num_qubits,
            RegisterKind::Clbit => self.num_clbits,
        };
        if range.is_empty() || range.end > width {
            return Err(CircuitError::BadRange {
                start: range.start,
                end: range.end,
            });
        }
        self.registers.push(Register {
            name: name.to_owned(),
            kind,
            range,
        });
        Ok(())
    }

    /// Sets the terminal readout. Conditions may only reference clbits that
    /// some measurement already writes.
    pub fn set_readout(
        &mut self,
        qubits: Range<usize>,
        condition: Option<Condition>,
    ) -> Result<(), CircuitError> {
        if self.readout.is_some() {
            return Err(CircuitError::DuplicateReadout);
        }
        if qubits.is_empty() || qubits.end > self.num_qubits {
            return Err(CircuitError::BadRange {
                start: qubits.start,
                end: qubits.end,
            });
        }
        if let Some(c) = &condition {
            validate_condition(c, self.num_clbits, &self.written)?;
        }
        self.readout = Some(Readout { qubits, condition });
        Ok(())
    }

    /// Copy of the circuit without the instruction at `index`. Returns
    /// `None` if dropping it breaks a later condition.
    pub fn without_instruction(&self, index: usize) -> Option<Self> {
        let mut out = Self {
            instructions: Vec::new(),
            readout: None,
            written: BTreeSet::new(),
            ..self.clone()
        };
        for (i, inst) in self.instructions.iter().enumerate() {
            if i != index {
                out.append(inst.clone()).ok()?;
            }
        }
        if let Some(r) = &self.readout {
            out.set_readout(r.qubits.clone(), r.condition.clone())
                .ok()?;
        }
        Some(out)
    }

    /// Per-kind count of unitary gates; measurements and resets excluded.
    pub fn gate_counts(&self) -> BTreeMap<&'static str, usize> {
        let mut counts = BTreeMap::new();
        for inst in &self.instructions {
            if let Operation::Gate(kind) = inst.op {
                *counts.entry(kind.name()).or_insert(0) += 1;
            }
        }
        counts
    }

    /// Longest chain of instructions that pairwise share a qubit or clbit.
    pub fn depth(&self) -> usize {
        let mut qubit_level = vec![0usize; self.num_qubits];
        let mut clbit_level: BTreeMap<usize, usize> = BTreeMap::new();
        let mut depth = 0;
        for inst in &self.instructions {
            let level = 1 + inst
                .qubits()
                .map(|q| qubit_level[q])
                .chain(
                    inst.clbits()
                        .map(|c| clbit_level.get(&c).copied().unwrap_or(0)),
                )
                .max()
                .unwrap_or(0);
            for q in inst.qubits() {
                qubit_level[q] = level;
            }
            for c in inst.clbits() {
                clbit_level.insert(c, level);
            }
            depth = depth.max(level);
        }
        depth
    }

    pub fn emit_text(&self) -> String {
        text::emit(self)
    }

    pub fn parse_text(input: &str) -> Result<Self, ParseError> {
        text::parse(input)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.emit_text())
    }
}

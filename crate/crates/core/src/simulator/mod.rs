//! Exact sparse-amplitude execution of dynamic circuits.
//!
//! Exact mode keeps one [`Branch`] per measurement history. A measurement
//! splits each branch into at most two children weighted by the outcome
//! probabilities; conditioned instructions only act on branches whose
//! classical bits match. Branches are grouped only at readout.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::algorithms::PostSelection;
use crate::bits::BitString;
use crate::board::{BoardError, BoardLayout};
use crate::circuit::{Circuit, Instruction, Operation};
use crate::oracle::Solution;

mod shots;
mod state;

pub use shots::{run_shots, ShotCounts};
pub use state::{SparseState, MAX_QUBITS, PRUNE_THRESHOLD};

/// Default cap on live branches.
pub const DEFAULT_MAX_BRANCHES: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("{num_qubits} qubits exceed the simulator limit of {max}")]
    TooManyQubits { num_qubits: usize, max: usize },
    #[error("instruction is not a unitary gate")]
    NotUnitary,
    #[error("instruction addresses a qubit outside the state")]
    QubitOutOfRange,
    #[error("branch count {branches} exceeds the cap of {cap}")]
    ResourceLimit { branches: usize, cap: usize },
    #[error("post-selected outcome {board} does not decode to a board: {source}")]
    DecodeFailure {
        board: BitString,
        source: BoardError,
    },
    #[error("post-selected outcome with clbits {0} has no board readout")]
    MissingReadout(BitString),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub max_branches: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            max_branches: DEFAULT_MAX_BRANCHES,
        }
    }
}

/// One measurement history: classical bits, conditional state and the
/// probability of reaching it.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub clbits: Vec<bool>,
    pub state: SparseState,
    pub weight: f64,
}

impl Branch {
    pub fn root(circuit: &Circuit) -> Result<Self, SimError> {
        Ok(Self {
            clbits: vec![false; circuit.num_clbits()],
            state: SparseState::zero(circuit.num_qubits())?,
            weight: 1.0,
        })
    }

    fn admits(&self, inst: &Instruction) -> bool {
        inst.condition
            .as_ref()
            .is_none_or(|c| c.is_satisfied_by(&self.clbits))
    }
}

/// Splits `branch` on the value of `qubit`, recording it in `clbit`.
/// Zero-probability outcomes are dropped.
pub fn measure(branch: &Branch, qubit: usize, clbit: Option<usize>) -> Vec<Branch> {
    [false, true]
        .into_iter()
        .filter_map(|value| {
            let (p, state) = branch.state.collapse(qubit, value);
            (p > 0.0).then(|| {
                let mut clbits = branch.clbits.clone();
                if let Some(c) = clbit {
                    clbits[c] = value;
                }
                Branch {
                    clbits,
                    state,
                    weight: branch.weight * p,
                }
            })
        })
        .collect()
}

fn reset(branch: &Branch, qubit: usize) -> Vec<Branch> {
    let mut out = measure(branch, qubit, None);
    for b in &mut out {
        if b.state.probability_of_one(qubit) > 0.0 {
            b.state.flip(qubit);
        }
    }
    out
}

/// One grouped terminal result. `board` is `None` when the circuit has no
/// readout or its readout condition failed on this branch.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub clbits: BitString,
    pub board: Option<BitString>,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunMetadata {
    /// Gate applications summed over branches.
    pub gate_applications: usize,
    /// Per instruction, the total weight of branches it was applied to.
    pub weighted_applications: Vec<f64>,
    /// Branches ever created, including the root.
    pub branches_explored: usize,
    /// Largest stored amplitude count seen in any branch.
    pub max_support: usize,
    pub pruned_probability: f64,
    pub wall_time: Duration,
}

impl RunMetadata {
    pub fn weighted_applications_in(&self, range: std::ops::Range<usize>) -> f64 {
        self.weighted_applications[range]
            .iter()
            .fold(0.0, |s, w| s + w)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub outcomes: Vec<Outcome>,
    pub total_probability: f64,
    pub metadata: RunMetadata,
}

pub fn run_exact(circuit: &Circuit, config: &SimConfig) -> Result<RunResult, SimError> {
    run_exact_observed(circuit, config, |_, _| {})
}

/// [`run_exact`] with a callback after every instruction, receiving the
/// instruction index and the live branches.
pub fn run_exact_observed(
    circuit: &Circuit,
    config: &SimConfig,
    mut observe: impl FnMut(usize, &[Branch]),
) -> Result<RunResult, SimError> {
    let start = Instant::now();
    let mut meta = RunMetadata {
        weighted_applications: vec![0.0; circuit.len()],
        branches_explored: 1,
        ..Default::default()
    };
    let mut branches = vec![Branch::root(circuit)?];
    meta.max_support = 1;

    for (index, inst) in circuit.instructions().iter().enumerate() {
        match inst.op {
            Operation::Gate(_) => {
                for b in branches.iter_mut().filter(|b| b.admits(inst)) {
                    meta.pruned_probability += b.weight * b.state.apply_gate(inst)?;
                    meta.gate_applications += 1;
                    meta.weighted_applications[index] += b.weight;
                    meta.max_support = meta.max_support.max(b.state.support());
                }
            }
            Operation::Measure { clbit } => {
                branches = split_all(branches, inst, &mut meta, config, |b| {
                    measure(b, inst.targets[0], Some(clbit))
                })?;
            }
            Operation::Reset => {
                branches = split_all(branches, inst, &mut meta, config, |b| {
                    reset(b, inst.targets[0])
                })?;
            }
        }
        observe(index, &branches);
    }

    let outcomes = read_out(circuit, &branches);
    let total_probability = outcomes
        .iter()
        .map(|o| o.probability)
        .fold(0.0, |s, p| s + p);
    meta.wall_time = start.elapsed();
    Ok(RunResult {
        outcomes,
        total_probability,
        metadata: meta,
    })
}

fn split_all(
    branches: Vec<Branch>,
    inst: &Instruction,
    meta: &mut RunMetadata,
    config: &SimConfig,
    split: impl Fn(&Branch) -> Vec<Branch>,
) -> Result<Vec<Branch>, SimError> {
    let mut out = Vec::with_capacity(branches.len());
    for b in branches {
        if b.admits(inst) {
            let children = split(&b);
            meta.branches_explored += children.len();
            out.extend(children);
        } else {
            out.push(b);
        }
        if out.len() > config.max_branches {
            return Err(SimError::ResourceLimit {
                branches: out.len(),
                cap: config.max_branches,
            });
        }
    }
    Ok(out)
}

/// Conditional readout distribution of one branch, not yet weighted.
pub(crate) fn board_distribution(
    circuit: &Circuit,
    branch: &Branch,
) -> Vec<(Option<BitString>, f64)> {
    let readout = circuit.readout().filter(|r| {
        r.condition
            .as_ref()
            .is_none_or(|c| c.is_satisfied_by(&branch.clbits))
    });
    let Some(readout) = readout else {
        return vec![(None, branch.state.norm_sqr())];
    };
    let mut dist: BTreeMap<BitString, f64> = BTreeMap::new();
    for (key, amp) in branch.state.sorted() {
        let bits = BitString::from_bools(
            readout
                .qubits
                .clone()
                .map(|q| key >> q & 1 == 1)
                .collect::<Vec<_>>(),
        );
        *dist.entry(bits).or_insert(0.0) += amp.norm_sqr();
    }
    dist.into_iter().map(|(b, p)| (Some(b), p)).collect()
}

fn read_out(circuit: &Circuit, branches: &[Branch]) -> Vec<Outcome> {
    let mut grouped: BTreeMap<(BitString, Option<BitString>), f64> = BTreeMap::new();
    for b in branches {
        let clbits = BitString::from_bools(b.clbits.clone());
        for (board, p) in board_distribution(circuit, b) {
            *grouped.entry((clbits.clone(), board)).or_insert(0.0) += b.weight * p;
        }
    }
    grouped
        .into_iter()
        .map(|((clbits, board), probability)| Outcome {
            clbits,
            board,
            probability,
        })
        .collect()
}

/// Solutions sorted by column vector, with summed probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractedSolutions {
    pub solutions: Vec<(Solution, f64)>,
    pub success_probability: f64,
}

/// Keeps post-selected outcomes and decodes their boards. A decode failure
/// means a circuit builder let a non-solution through.
pub fn extract_solutions(
    result: &RunResult,
    layout: &BoardLayout,
    post: &PostSelection,
) -> Result<ExtractedSolutions, SimError> {
    collect_solutions(
        result
            .outcomes
            .iter()
            .map(|o| (&o.clbits, o.board.as_ref(), o.probability)),
        layout,
        post,
    )
}

pub(crate) fn collect_solutions<'a>(
    outcomes: impl Iterator<Item = (&'a BitString, Option<&'a BitString>, f64)>,
    layout: &BoardLayout,
    post: &PostSelection,
) -> Result<ExtractedSolutions, SimError> {
    let mut found: BTreeMap<Solution, f64> = BTreeMap::new();
    for (clbits, board, p) in outcomes {
        if !post.matches(clbits) {
            continue;
        }
        let board = board.ok_or_else(|| SimError::MissingReadout(clbits.clone()))?;
        let solution =
            layout
                .decode_solution(board.as_slice())
                .map_err(|source| SimError::DecodeFailure {
                    board: board.clone(),
                    source,
                })?;
        *found.entry(solution).or_insert(0.0) += p;
    }
    // An empty f64 `sum` is -0.0.
    let success_probability = found.values().fold(0.0, |s, p| s + p);
    Ok(ExtractedSolutions {
        solutions: found.into_iter().collect(),
        success_probability,
    })
}

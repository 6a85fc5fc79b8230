//! Seeded shot sampling.
//!
//! Each shot walks one path through the circuit's measurements, drawing from
//! its own ChaCha stream (`seed`, stream = shot index). The measurement tree
//! is expanded lazily and memoised, so repeated paths reuse the evolved
//! states instead of re-simulating them.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    board_distribution, collect_solutions, measure, reset, Branch, ExtractedSolutions, SimConfig,
    SimError,
};
use crate::algorithms::PostSelection;
use crate::bits::BitString;
use crate::board::BoardLayout;
use crate::circuit::{Circuit, Operation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotCounts {
    pub shots: u64,
    pub seed: u64,
    pub counts: BTreeMap<(BitString, Option<BitString>), u64>,
    /// Measurement-tree nodes evaluated while sampling.
    pub nodes_expanded: usize,
}

impl ShotCounts {
    /// Fraction of shots whose clbits satisfy `post`.
    pub fn frequency(&self, post: &PostSelection) -> f64 {
        let hits: u64 = self
            .counts
            .iter()
            .filter(|((c, _), _)| post.matches(c))
            .map(|(_, n)| n)
            .sum();
        hits as f64 / self.shots as f64
    }

    /// Observed solutions with their empirical frequencies.
    pub fn solutions(
        &self,
        layout: &BoardLayout,
        post: &PostSelection,
    ) -> Result<ExtractedSolutions, SimError> {
        let shots = self.shots as f64;
        collect_solutions(
            self.counts
                .iter()
                .map(|((c, b), &n)| (c, b.as_ref(), n as f64 / shots)),
            layout,
            post,
        )
    }
}

enum Node {
    Pending {
        pc: usize,
        branch: Branch,
    },
    Split(Vec<(f64, usize)>),
    Terminal {
        clbits: BitString,
        boards: Vec<(Option<BitString>, f64)>,
    },
}

struct Tree<'c> {
    circuit: &'c Circuit,
    nodes: Vec<Node>,
    cap: usize,
}

impl Tree<'_> {
    /// Runs node `id` forward to its next split or to the end.
    fn expand(&mut self, id: usize) -> Result<(), SimError> {
        if !matches!(self.nodes[id], Node::Pending { .. }) {
            return Ok(());
        }
        let Node::Pending { pc, mut branch } =
            std::mem::replace(&mut self.nodes[id], Node::Split(Vec::new()))
        else {
            unreachable!("checked above");
        };
        let insts = self.circuit.instructions();
        for (index, inst) in insts.iter().enumerate().skip(pc) {
            if !branch.admits(inst) {
                continue;
            }
            let children = match inst.op {
                Operation::Gate(_) => {
                    branch.state.apply_gate(inst)?;
                    continue;
                }
                Operation::Measure { clbit } => measure(&branch, inst.targets[0], Some(clbit)),
                Operation::Reset => reset(&branch, inst.targets[0]),
            };
            let mut edges = Vec::with_capacity(children.len());
            for mut child in children {
                let p = child.weight / branch.weight;
                child.weight = 1.0;
                edges.push((p, self.nodes.len()));
                self.nodes.push(Node::Pending {
                    pc: index + 1,
                    branch: child,
                });
            }
            if self.nodes.len() > self.cap {
                return Err(SimError::ResourceLimit {
                    branches: self.nodes.len(),
                    cap: self.cap,
                });
            }
            self.nodes[id] = Node::Split(edges);
            return Ok(());
        }
        let boards = board_distribution(self.circuit, &branch);
        self.nodes[id] = Node::Terminal {
            clbits: BitString::from_bools(branch.clbits),
            boards,
        };
        Ok(())
    }

    fn sample(&mut self, rng: &mut ChaCha8Rng) -> Result<(BitString, Option<BitString>), SimError> {
        let mut id = 0;
        loop {
            self.expand(id)?;
            match &self.nodes[id] {
                Node::Split(edges) => {
                    id = pick(edges.iter().map(|&(p, child)| (child, p)), rng.random())
                }
                Node::Terminal { clbits, boards } => {
                    let idx = pick(
                        boards.iter().enumerate().map(|(i, (_, p))| (i, *p)),
                        rng.random(),
                    );
                    return Ok((clbits.clone(), boards[idx].0.clone()));
                }
                Node::Pending { .. } => unreachable!("expanded above"),
            }
        }
    }
}

/// Inverse-CDF choice; rounding slack falls to the last item.
fn pick<T: Copy>(items: impl Iterator<Item = (T, f64)>, u: f64) -> T {
    let items: Vec<(T, f64)> = items.collect();
    let total: f64 = items.iter().map(|&(_, p)| p).sum();
    let target = u * total;
    let mut acc = 0.0;
    for &(item, p) in &items {
        acc += p;
        if target < acc {
            return item;
        }
    }
    items.last().expect("nonempty distribution").0
}

pub fn run_shots(
    circuit: &Circuit,
    shots: u64,
    seed: u64,
    config: &SimConfig,
) -> Result<ShotCounts, SimError> {
    let mut tree = Tree {
        circuit,
        nodes: vec![Node::Pending {
            pc: 0,
            branch: Branch::root(circuit)?,
        }],
        cap: config.max_branches,
    };
    let mut counts = BTreeMap::new();
    for shot in 0..shots {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(shot);
        *counts.entry(tree.sample(&mut rng)?).or_insert(0) += 1;
    }
    Ok(ShotCounts {
        shots,
        seed,
        counts,
        nodes_expanded: tree.nodes.len(),
    })
}

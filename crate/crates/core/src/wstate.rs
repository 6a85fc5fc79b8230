//! W-state preparation on arbitrary qubit subsets.
//!
//! Both strategies move a single excitation through two-qubit splitting
//! blocks: `RY` on the receiving qubit controlled by the holder, then `CX`
//! back onto the holder. The chain hands the excitation down the target list
//! one qubit at a time; the tree halves the remaining set at every level so
//! all blocks of one level run in parallel.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::circuit::Instruction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WStrategy {
    #[default]
    Chain,
    Tree,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WStateError {
    #[error("a W-state needs at least one target qubit")]
    NoTargets,
    #[error("qubit q{0} is listed twice")]
    Duplicate(usize),
    #[error("qubit q{0} is both a control and a target")]
    ControlTargetOverlap(usize),
}

/// Angle that leaves amplitude `sqrt(1 - moved)` on the holder and moves
/// `sqrt(moved)` onto the receiver.
fn split_angle(moved: usize, total: usize) -> f64 {
    2.0 * ((moved as f64) / (total as f64)).sqrt().asin()
}

fn push_split(
    out: &mut Vec<Instruction>,
    controls: &[usize],
    holder: usize,
    receiver: usize,
    theta: f64,
) {
    let mut ry_controls = controls.to_vec();
    ry_controls.push(holder);
    out.push(Instruction::mcry(theta, ry_controls, receiver));
    let mut cx_controls = controls.to_vec();
    cx_controls.push(receiver);
    out.push(Instruction::controlled_x(&cx_controls, holder));
}

fn chain(out: &mut Vec<Instruction>, controls: &[usize], targets: &[usize]) {
    let n = targets.len();
    for k in 1..n {
        // Holder targets[k-1] carries the remaining n-k+1 shares; keep one.
        push_split(
            out,
            controls,
            targets[k - 1],
            targets[k],
            split_angle(n - k, n - k + 1),
        );
    }
}

fn tree_level(out: &mut [Vec<Instruction>], level: usize, controls: &[usize], targets: &[usize]) {
    let n = targets.len();
    if n <= 1 {
        return;
    }
    let (left, right) = targets.split_at(n.div_ceil(2));
    let mut block = Vec::with_capacity(2);
    push_split(
        &mut block,
        controls,
        left[0],
        right[0],
        split_angle(right.len(), n),
    );
    out[level].extend(block);
    tree_level(out, level + 1, controls, left);
    tree_level(out, level + 1, controls, right);
}

fn check(controls: &[usize], targets: &[usize]) -> Result<(), WStateError> {
    if targets.is_empty() {
        return Err(WStateError::NoTargets);
    }
    let mut seen = BTreeSet::new();
    for &q in targets {
        if !seen.insert(q) {
            return Err(WStateError::Duplicate(q));
        }
    }
    let mut seen_controls = BTreeSet::new();
    for &c in controls {
        if seen.contains(&c) {
            return Err(WStateError::ControlTargetOverlap(c));
        }
        if !seen_controls.insert(c) {
            return Err(WStateError::Duplicate(c));
        }
    }
    Ok(())
}

/// Prepares `|W_n>` on `targets`, which must start in `|0...0>`.
pub fn build_w(targets: &[usize], strategy: WStrategy) -> Result<Vec<Instruction>, WStateError> {
    build_controlled_w(&[], targets, strategy)
}

/// Like [`build_w`], but every emitted gate also requires all `controls`
/// to be 1. On any other control pattern the sequence is the identity.
pub fn build_controlled_w(
    controls: &[usize],
    targets: &[usize],
    strategy: WStrategy,
) -> Result<Vec<Instruction>, WStateError> {
    check(controls, targets)?;
    let mut out = vec![Instruction::controlled_x(controls, targets[0])];
    match strategy {
        WStrategy::Chain => chain(&mut out, controls, targets),
        WStrategy::Tree => {
            let levels = ceil_log2(targets.len());
            let mut by_level = vec![Vec::new(); levels];
            tree_level(&mut by_level, 0, controls, targets);
            out.extend(by_level.into_iter().flatten());
        }
    }
    Ok(out)
}

fn ceil_log2(n: usize) -> usize {
    (usize::BITS - (n.max(1) - 1).leading_zeros()) as usize
}

/// Upper bound on the circuit depth of [`build_w`] for `n` targets.
pub fn w_depth_bound(n: usize, strategy: WStrategy) -> usize {
    match strategy {
        WStrategy::Chain => 2 * n.max(1) - 1,
        WStrategy::Tree => 1 + 2 * ceil_log2(n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Circuit, GateKind, Operation};

    #[test]
    fn log2() {
        assert_eq!(
            [1, 2, 3, 4, 5, 6, 8, 9].map(ceil_log2),
            [0, 1, 2, 2, 3, 3, 3, 4]
        );
    }

    #[test]
    fn w1_is_a_single_x() {
        assert_eq!(
            build_w(&[7], WStrategy::Chain).unwrap(),
            vec![Instruction::x(7)]
        );
        assert_eq!(
            build_w(&[7], WStrategy::Tree).unwrap(),
            vec![Instruction::x(7)]
        );
        assert_eq!(
            build_controlled_w(&[0, 5], &[10], WStrategy::Chain).unwrap(),
            vec![Instruction::mcx(vec![0, 5], 10)]
        );
    }

    #[test]
    fn chain_gate_shape() {
        let gates = build_w(&[0, 1, 2], WStrategy::Chain).unwrap();
        assert_eq!(gates.len(), 5);
        assert_eq!(gates[0], Instruction::x(0));
        match gates[1].op {
            Operation::Gate(GateKind::Mcry(t)) => {
                assert!((t - 2.0 * (2.0f64 / 3.0).sqrt().asin()).abs() < 1e-15)
            }
            _ => panic!("expected MCRY"),
        }
        assert_eq!(gates[1].controls, vec![0]);
        assert_eq!(gates[2], Instruction::cx(1, 0));
    }

    #[test]
    fn controls_are_added_everywhere() {
        let gates = build_controlled_w(&[0], &[5, 6, 7], WStrategy::Tree).unwrap();
        assert!(gates.iter().all(|g| g.controls.first() == Some(&0)));
        assert_eq!(
            gates,
            build_controlled_w(&[0], &[5, 6, 7], WStrategy::Tree).unwrap()
        );
        assert_eq!(
            build_controlled_w(&[], &[1, 2], WStrategy::Chain),
            build_w(&[1, 2], WStrategy::Chain)
        );
    }

    #[test]
    fn rejects_bad_operands() {
        assert_eq!(build_w(&[], WStrategy::Chain), Err(WStateError::NoTargets));
        assert_eq!(
            build_w(&[1, 1], WStrategy::Tree),
            Err(WStateError::Duplicate(1))
        );
        assert_eq!(
            build_controlled_w(&[2], &[1, 2], WStrategy::Chain),
            Err(WStateError::ControlTargetOverlap(2))
        );
    }

    #[test]
    fn depths_respect_bounds() {
        for n in 1..=16 {
            for strategy in [WStrategy::Chain, WStrategy::Tree] {
                let mut c = Circuit::new(n, 0).unwrap();
                c.extend(build_w(&(0..n).collect::<Vec<_>>(), strategy).unwrap())
                    .unwrap();
                assert!(
                    c.depth() <= w_depth_bound(n, strategy),
                    "n={n} {strategy:?}"
                );
                if strategy == WStrategy::Chain {
                    assert_eq!(c.depth(), w_depth_bound(n, strategy));
                }
            }
        }
    }
}

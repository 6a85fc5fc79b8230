//! Circuit builders for the three N-Queens constructions.
//!
//! * [`build_pipeline`]: one W-state per row, column parity ancillas, then
//!   one Toffoli-checked ancilla per row pair.
//! * [`build_direct_column`]: a tree of controlled W-states that only ever
//!   produces permutation boards, followed by the same diagonal check.
//! * [`build_quantum_backtracking`]: the same tree, but each row's W-state
//!   also skips diagonally attacked columns; a single flag ancilla marks the
//!   branches that reached the last row.
//!
//! Branching for the two tree builders is enumerated classically while the
//! circuit is emitted, in depth-first order with ascending columns. Board
//! qubit `(r, c)` is wire `(r-1)*n + c-1`; ancillas follow the board.

use std::ops::Range;

use crate::bits::BitString;
use crate::board::{BoardLayout, ExclusionMode};
use crate::circuit::{Circuit, Condition, Instruction, Operation, RegisterKind};
use crate::wstate::{build_controlled_w, build_w, WStrategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Pipeline,
    Direct,
    Backtracking,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [
        Algorithm::Pipeline,
        Algorithm::Direct,
        Algorithm::Backtracking,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Pipeline => "pipeline",
            Algorithm::Direct => "direct",
            Algorithm::Backtracking => "backtracking",
        }
    }
}

/// Column-check gate flavour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ColumnGate {
    /// `CX` from each column qubit onto its ancilla.
    #[default]
    Cx,
    /// `H`, then `CZ` from each column qubit, then `H`.
    Cz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineOptions {
    pub column_gate: ColumnGate,
    /// Gate the diagonal stage and board readout on the column clbits.
    pub dynamic: bool,
    pub w_strategy: WStrategy,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            column_gate: ColumnGate::Cx,
            dynamic: true,
            w_strategy: WStrategy::Chain,
        }
    }
}

/// Wire and clbit assignment for every ancilla of one construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AncillaPlan {
    pub column_ancillas: Vec<usize>,
    /// One per row pair, in `(1,2), (1,3), ..., (n-1,n)` order.
    pub diagonal_ancillas: Vec<usize>,
    pub row_pairs: Vec<(usize, usize)>,
    pub backtracking_ancilla: Option<usize>,
    pub column_clbits: Vec<usize>,
    pub diagonal_clbits: Vec<usize>,
    pub backtracking_clbit: Option<usize>,
}

impl AncillaPlan {
    pub fn num_ancillas(&self) -> usize {
        self.column_ancillas.len()
            + self.diagonal_ancillas.len()
            + usize::from(self.backtracking_ancilla.is_some())
    }

    pub fn num_clbits(&self) -> usize {
        self.column_clbits.len()
            + self.diagonal_clbits.len()
            + usize::from(self.backtracking_clbit.is_some())
    }
}

pub fn ancilla_plan(layout: &BoardLayout, algorithm: Algorithm) -> AncillaPlan {
    let n = layout.n();
    let board = layout.num_cells();
    let row_pairs: Vec<(usize, usize)> = (1..=n)
        .flat_map(|r| (r + 1..=n).map(move |s| (r, s)))
        .collect();
    let pairs = row_pairs.len();
    let columns = match algorithm {
        Algorithm::Pipeline => n - 1,
        _ => 0,
    };
    let diagonals = match algorithm {
        Algorithm::Backtracking => 0,
        _ => pairs,
    };
    // A 1x1 board is its own solution; no flag is needed.
    let flag = algorithm == Algorithm::Backtracking && n > 1;
    AncillaPlan {
        column_ancillas: (board..board + columns).collect(),
        diagonal_ancillas: (board + columns..board + columns + diagonals).collect(),
        row_pairs: if diagonals > 0 { row_pairs } else { Vec::new() },
        backtracking_ancilla: flag.then_some(board),
        column_clbits: (0..columns).collect(),
        diagonal_clbits: (columns..columns + diagonals).collect(),
        backtracking_clbit: flag.then_some(0),
    }
}

/// Outcomes that count as solutions: every listed clbit must match.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PostSelection {
    pub required: Vec<(usize, bool)>,
}

impl PostSelection {
    pub fn all_ones(clbits: Vec<usize>) -> Self {
        Self {
            required: clbits.into_iter().map(|c| (c, true)).collect(),
        }
    }

    pub fn matches(&self, clbits: &BitString) -> bool {
        self.required.iter().all(|&(c, v)| clbits.get(c) == Some(v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage {
    pub name: &'static str,
    pub range: Range<usize>,
}

/// A finished construction together with the data needed to interpret it.
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltCircuit {
    pub algorithm: Algorithm,
    pub circuit: Circuit,
    pub post_selection: PostSelection,
    pub plan: AncillaPlan,
    /// Instruction index ranges of the named construction stages.
    pub stages: Vec<Stage>,
}

impl BuiltCircuit {
    pub fn stage(&self, name: &str) -> Option<Range<usize>> {
        self.stages
            .iter()
            .find(|s| s.name == name)
            .map(|s| s.range.clone())
    }

    /// Drops the `k`-th controlled gate of a stage. Used to check that the
    /// verification harness notices a broken circuit.
    pub fn skip_controlled_gate(&self, stage: &str, k: usize) -> Option<Self> {
        let range = self.stage(stage)?;
        let index = range
            .clone()
            .filter(|&i| {
                let inst = &self.circuit.instructions()[i];
                inst.op.is_gate() && !inst.controls.is_empty()
            })
            .nth(k)?;
        let circuit = self.circuit.without_instruction(index)?;
        let stages = self
            .stages
            .iter()
            .map(|s| {
                let shift = |x: usize| if x > index { x - 1 } else { x };
                Stage {
                    name: s.name,
                    range: shift(s.range.start)..shift(s.range.end),
                }
            })
            .collect();
        Some(Self {
            circuit,
            stages,
            ..self.clone()
        })
    }
}

struct Builder {
    circuit: Circuit,
    stages: Vec<Stage>,
}

impl Builder {
    fn new(num_qubits: usize, num_clbits: usize) -> Self {
        let circuit = Circuit::new(num_qubits, num_clbits).expect("board has at least one qubit");
        Self {
            circuit,
            stages: Vec::new(),
        }
    }

    fn stage(&mut self, name: &'static str, insts: impl IntoIterator<Item = Instruction>) {
        let start = self.circuit.len();
        self.circuit
            .extend(insts)
            .expect("builders emit in-range, operand-disjoint instructions");
        self.stages.push(Stage {
            name,
            range: start..self.circuit.len(),
        });
    }

    fn register(&mut self, name: &str, kind: RegisterKind, items: &[usize]) {
        if let (Some(&first), Some(&last)) = (items.first(), items.last()) {
            self.circuit
                .add_register(name, kind, first..last + 1)
                .expect("register ranges are contiguous and unique");
        }
    }

    fn finish(
        mut self,
        layout: &BoardLayout,
        algorithm: Algorithm,
        plan: AncillaPlan,
        post_selection: PostSelection,
        readout_condition: Option<Condition>,
    ) -> BuiltCircuit {
        self.circuit
            .set_readout(0..layout.num_cells(), readout_condition)
            .expect("readout condition only reads measured clbits");
        BuiltCircuit {
            algorithm,
            circuit: self.circuit,
            post_selection,
            plan,
            stages: self.stages,
        }
    }
}

fn with_condition(insts: Vec<Instruction>, cond: &Option<Condition>) -> Vec<Instruction> {
    match cond {
        Some(c) => insts
            .into_iter()
            .map(|i| i.with_condition(c.clone()))
            .collect(),
        None => insts,
    }
}

fn wires(layout: &BoardLayout, row: usize, cols: impl IntoIterator<Item = usize>) -> Vec<usize> {
    cols.into_iter().map(|c| layout.wire(row, c)).collect()
}

/// One W-state per row: uniform over the `n^n` one-queen-per-row boards.
pub fn build_row_stage(layout: &BoardLayout, strategy: WStrategy) -> Vec<Instruction> {
    let n = layout.n();
    (1..=n)
        .flat_map(|r| build_w(&wires(layout, r, 1..=n), strategy).expect("row wires are distinct"))
        .collect()
}

/// Leaves column ancilla `j` holding the parity of column `j`, for
/// `j = 1..n-1`. The last column is implied by the others.
pub fn build_column_stage(
    layout: &BoardLayout,
    plan: &AncillaPlan,
    mode: ColumnGate,
) -> Vec<Instruction> {
    let n = layout.n();
    let mut out = Vec::new();
    if mode == ColumnGate::Cz {
        out.extend(plan.column_ancillas.iter().map(|&a| Instruction::h(a)));
    }
    for (j, &anc) in plan.column_ancillas.iter().enumerate() {
        for r in 1..=n {
            let q = layout.wire(r, j + 1);
            out.push(match mode {
                ColumnGate::Cx => Instruction::cx(q, anc),
                ColumnGate::Cz => Instruction::cz(q, anc),
            });
        }
    }
    if mode == ColumnGate::Cz {
        out.extend(plan.column_ancillas.iter().map(|&a| Instruction::h(a)));
    }
    out
}

/// Sets each row-pair ancilla to 1, then flips it with one Toffoli per
/// diagonally aligned cell pair between the two rows.
pub fn build_diagonal_stage(layout: &BoardLayout, plan: &AncillaPlan) -> Vec<Instruction> {
    let mut out: Vec<Instruction> = plan
        .diagonal_ancillas
        .iter()
        .map(|&a| Instruction::x(a))
        .collect();
    for (&(r, s), &anc) in plan.row_pairs.iter().zip(&plan.diagonal_ancillas) {
        let pairs = layout
            .diagonal_pairs(r, s)
            .expect("row pairs are ordered and in range");
        for (a, b) in pairs {
            out.push(Instruction::mcx(
                vec![layout.wire(a.row, a.col), layout.wire(b.row, b.col)],
                anc,
            ));
        }
    }
    out
}

fn measure_all(qubits: &[usize], clbits: &[usize]) -> Vec<Instruction> {
    qubits
        .iter()
        .zip(clbits)
        .map(|(&q, &c)| Instruction::measure(q, c))
        .collect()
}

pub fn build_pipeline(layout: &BoardLayout, options: &PipelineOptions) -> BuiltCircuit {
    let plan = ancilla_plan(layout, Algorithm::Pipeline);
    let mut b = Builder::new(layout.num_cells() + plan.num_ancillas(), plan.num_clbits());
    b.register(
        "board",
        RegisterKind::Qubit,
        &(0..layout.num_cells()).collect::<Vec<_>>(),
    );
    b.register("col_anc", RegisterKind::Qubit, &plan.column_ancillas);
    b.register("diag_anc", RegisterKind::Qubit, &plan.diagonal_ancillas);
    b.register("col_bits", RegisterKind::Clbit, &plan.column_clbits);
    b.register("diag_bits", RegisterKind::Clbit, &plan.diagonal_clbits);

    b.stage("rows", build_row_stage(layout, options.w_strategy));
    b.stage(
        "columns",
        build_column_stage(layout, &plan, options.column_gate),
    );
    b.stage(
        "column_measure",
        measure_all(&plan.column_ancillas, &plan.column_clbits),
    );
    let gate = (options.dynamic && !plan.column_clbits.is_empty())
        .then(|| Condition::all_ones(plan.column_clbits.iter().copied()));
    b.stage(
        "diagonals",
        with_condition(build_diagonal_stage(layout, &plan), &gate),
    );
    b.stage(
        "diagonal_measure",
        measure_all(&plan.diagonal_ancillas, &plan.diagonal_clbits),
    );

    let post = PostSelection::all_ones(
        plan.column_clbits
            .iter()
            .chain(&plan.diagonal_clbits)
            .copied()
            .collect(),
    );
    b.finish(layout, Algorithm::Pipeline, plan, post, gate)
}

/// Emits the depth-first tree of controlled W-states. Rows whose open
/// column set is empty end the branch with nothing emitted.
fn branch_tree(layout: &BoardLayout, mode: ExclusionMode, out: &mut Vec<Instruction>) {
    fn descend(
        layout: &BoardLayout,
        mode: ExclusionMode,
        prefix: &mut Vec<usize>,
        controls: &mut Vec<usize>,
        out: &mut Vec<Instruction>,
    ) {
        let row = prefix.len() + 1;
        if row > layout.n() {
            return;
        }
        let open = layout
            .allowed_columns(prefix, mode)
            .expect("prefix columns are distinct");
        if open.is_empty() {
            return;
        }
        let targets = wires(layout, row, open.iter().copied());
        out.extend(
            build_controlled_w(controls, &targets, WStrategy::Chain)
                .expect("controls lie on earlier rows"),
        );
        for (c, q) in open.into_iter().zip(targets) {
            prefix.push(c);
            controls.push(q);
            descend(layout, mode, prefix, controls, out);
            controls.pop();
            prefix.pop();
        }
    }
    descend(layout, mode, &mut Vec::new(), &mut Vec::new(), out);
}

pub fn build_direct_column(layout: &BoardLayout) -> BuiltCircuit {
    let plan = ancilla_plan(layout, Algorithm::Direct);
    let mut b = Builder::new(layout.num_cells() + plan.num_ancillas(), plan.num_clbits());
    b.register(
        "board",
        RegisterKind::Qubit,
        &(0..layout.num_cells()).collect::<Vec<_>>(),
    );
    b.register("diag_anc", RegisterKind::Qubit, &plan.diagonal_ancillas);
    b.register("diag_bits", RegisterKind::Clbit, &plan.diagonal_clbits);

    let mut tree = Vec::new();
    branch_tree(layout, ExclusionMode::ColumnOnly, &mut tree);
    b.stage("permutations", tree);
    b.stage("diagonals", build_diagonal_stage(layout, &plan));
    b.stage(
        "diagonal_measure",
        measure_all(&plan.diagonal_ancillas, &plan.diagonal_clbits),
    );

    let post = PostSelection::all_ones(plan.diagonal_clbits.clone());
    b.finish(layout, Algorithm::Direct, plan, post, None)
}

pub fn build_quantum_backtracking(layout: &BoardLayout) -> BuiltCircuit {
    let plan = ancilla_plan(layout, Algorithm::Backtracking);
    let mut b = Builder::new(layout.num_cells() + plan.num_ancillas(), plan.num_clbits());
    b.register(
        "board",
        RegisterKind::Qubit,
        &(0..layout.num_cells()).collect::<Vec<_>>(),
    );

    let mut tree = Vec::new();
    branch_tree(layout, ExclusionMode::ColumnAndDiagonal, &mut tree);
    b.stage("backtracking", tree);

    let mut post = PostSelection::default();
    if let (Some(flag), Some(bit)) = (plan.backtracking_ancilla, plan.backtracking_clbit) {
        b.register("bt_anc", RegisterKind::Qubit, &[flag]);
        b.register("bt_bit", RegisterKind::Clbit, &[bit]);
        let n = layout.n();
        b.stage(
            "flag",
            (1..=n).map(|c| Instruction::cx(layout.wire(n, c), flag)),
        );
        b.stage("flag_measure", [Instruction::measure(flag, bit)]);
        post = PostSelection::all_ones(vec![bit]);
    }
    b.finish(layout, Algorithm::Backtracking, plan, post, None)
}

/// Builds `algorithm`; `options` only affects the pipeline.
pub fn build(
    layout: &BoardLayout,
    algorithm: Algorithm,
    options: &PipelineOptions,
) -> BuiltCircuit {
    match algorithm {
        Algorithm::Pipeline => build_pipeline(layout, options),
        Algorithm::Direct => build_direct_column(layout),
        Algorithm::Backtracking => build_quantum_backtracking(layout),
    }
}

/// Number of measurements in a circuit; handy for sanity checks on dumps.
pub fn measurement_count(circuit: &Circuit) -> usize {
    circuit
        .instructions()
        .iter()
        .filter(|i| matches!(i.op, Operation::Measure { .. }))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;

    fn layout(n: usize) -> BoardLayout {
        BoardLayout::new(n).unwrap()
    }

    #[test]
    fn plan_sizes() {
        let p = ancilla_plan(&layout(4), Algorithm::Pipeline);
        assert_eq!(
            (
                p.column_ancillas.len(),
                p.diagonal_ancillas.len(),
                p.backtracking_ancilla
            ),
            (3, 6, None)
        );
        assert_eq!(p.column_ancillas, vec![16, 17, 18]);
        assert_eq!(
            p.row_pairs,
            vec![(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]
        );
        let p = ancilla_plan(&layout(8), Algorithm::Pipeline);
        assert_eq!(
            (p.column_ancillas.len(), p.diagonal_ancillas.len()),
            (7, 28)
        );
        let p = ancilla_plan(&layout(4), Algorithm::Direct);
        assert_eq!((p.column_ancillas.len(), p.diagonal_ancillas.len()), (0, 6));
        let p = ancilla_plan(&layout(5), Algorithm::Backtracking);
        assert_eq!(p.num_ancillas(), 1);
        assert_eq!(p.backtracking_ancilla, Some(25));
    }

    #[test]
    fn pipeline_shape() {
        let built = build_pipeline(&layout(4), &PipelineOptions::default());
        assert_eq!(
            (built.circuit.num_qubits(), built.circuit.num_clbits()),
            (25, 9)
        );
        assert_eq!(built.post_selection.required.len(), 9);
        assert_eq!(measurement_count(&built.circuit), 9);
        let diag = built.stage("diagonals").unwrap();
        assert!(built.circuit.instructions()[diag]
            .iter()
            .all(|i| i.condition.is_some()));
    }

    #[test]
    fn column_stage_gate_totals() {
        let l = layout(4);
        let plan = ancilla_plan(&l, Algorithm::Pipeline);
        let count = |mode| {
            let mut c = Circuit::new(25, 0).unwrap();
            c.extend(build_column_stage(&l, &plan, mode)).unwrap();
            c.gate_counts()
        };
        let cx = count(ColumnGate::Cx);
        assert_eq!(cx.get("CX"), Some(&12));
        assert_eq!(cx.len(), 1);
        let cz = count(ColumnGate::Cz);
        assert_eq!((cz.get("CZ"), cz.get("H")), (Some(&12), Some(&6)));
    }

    #[test]
    fn diagonal_toffoli_count() {
        for n in 2..=8 {
            let l = layout(n);
            let plan = ancilla_plan(&l, Algorithm::Pipeline);
            let stage = build_diagonal_stage(&l, &plan);
            let toffolis = stage
                .iter()
                .filter(|i| i.op == Operation::Gate(GateKind::Mcx) && i.controls.len() == 2)
                .count();
            let expected: usize = (1..n).map(|d| 2 * (n - d) * (n - d)).sum();
            assert_eq!(toffolis, expected);
            if n == 4 {
                assert_eq!(toffolis, 28);
            }
        }
    }

    #[test]
    fn direct_final_row_gate() {
        let built = build_direct_column(&layout(4));
        // Branch (1, 2, 3) closes with an MCX onto (4, 4).
        assert!(built
            .circuit
            .instructions()
            .contains(&Instruction::mcx(vec![0, 5, 10], 15)));
    }

    #[test]
    fn single_cell_boards_degenerate() {
        for algorithm in Algorithm::ALL {
            let built = build(&layout(1), algorithm, &PipelineOptions::default());
            assert_eq!(built.circuit.instructions(), &[Instruction::x(0)]);
            assert_eq!(
                (built.circuit.num_qubits(), built.circuit.num_clbits()),
                (1, 0)
            );
            assert!(built.post_selection.required.is_empty());
        }
    }

    #[test]
    fn skipping_a_gate_shifts_stages() {
        let built = build_pipeline(&layout(4), &PipelineOptions::default());
        let broken = built.skip_controlled_gate("diagonals", 2).unwrap();
        assert_eq!(broken.circuit.len(), built.circuit.len() - 1);
        let (a, b) = (
            built.stage("diagonal_measure").unwrap(),
            broken.stage("diagonal_measure").unwrap(),
        );
        assert_eq!((b.start, b.end), (a.start - 1, a.end - 1));
        assert!(built.skip_controlled_gate("diagonals", 1000).is_none());
    }

    #[test]
    fn post_selection_matching() {
        let post = PostSelection::all_ones(vec![0, 2]);
        assert!(post.matches(&"101".parse().unwrap()));
        assert!(!post.matches(&"100".parse().unwrap()));
        assert!(!post.matches(&"1".parse().unwrap()));
        assert!(PostSelection::default().matches(&BitString::zeros(0)));
    }
}

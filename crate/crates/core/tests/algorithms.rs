use std::collections::BTreeMap;

use wqueens::algorithms::{
    ancilla_plan, build, build_column_stage, build_diagonal_stage, build_direct_column,
    build_pipeline, build_quantum_backtracking, build_row_stage, Algorithm, ColumnGate,
    PipelineOptions,
};
use wqueens::board::BoardLayout;
use wqueens::oracle::{self, Solution};
use wqueens::simulator::{
    self, extract_solutions, run_exact, run_exact_observed, SimConfig, SparseState,
};
use wqueens::wstate::WStrategy;

fn layout(n: usize) -> BoardLayout {
    BoardLayout::new(n).unwrap()
}

/// Every assignment of one column per row (`n^n` of them).
fn row_assignments(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..n.pow(n as u32)).map(move |mut code| {
        (0..n)
            .map(|_| {
                let c = code % n + 1;
                code /= n;
                c
            })
            .collect()
    })
}

fn is_permutation(cols: &[usize]) -> bool {
    let mut seen = vec![false; cols.len() + 1];
    cols.iter().all(|&c| !std::mem::replace(&mut seen[c], true))
}

fn board_key(n: usize, cols: &[usize]) -> u128 {
    cols.iter()
        .enumerate()
        .fold(0, |k, (r, &c)| k | 1 << (r * n + c - 1))
}

fn solution_map(
    n: usize,
    algorithm: Algorithm,
    options: &PipelineOptions,
) -> BTreeMap<Solution, f64> {
    let l = layout(n);
    let built = build(&l, algorithm, options);
    let run = run_exact(&built.circuit, &SimConfig::default()).unwrap();
    extract_solutions(&run, &l, &built.post_selection)
        .unwrap()
        .solutions
        .into_iter()
        .collect()
}

fn assert_same_distribution(a: &BTreeMap<Solution, f64>, b: &BTreeMap<Solution, f64>, tol: f64) {
    assert_eq!(a.keys().collect::<Vec<_>>(), b.keys().collect::<Vec<_>>());
    for (s, p) in a {
        assert!((p - b[s]).abs() < tol, "{s}: {p} vs {}", b[s]);
    }
}

#[test]
fn row_stage_spans_one_queen_per_row() {
    for n in 1..=5 {
        let l = layout(n);
        let mut s = SparseState::zero(n * n).unwrap();
        s.apply_all(&build_row_stage(&l, WStrategy::Chain)).unwrap();
        assert_eq!(s.support(), n.pow(n as u32));
        let amp = (n as f64).powf(-(n as f64) / 2.0);
        for cols in row_assignments(n) {
            let a = s.amplitude(board_key(n, &cols));
            assert!((a.re - amp).abs() < 1e-12, "n={n} {cols:?}");
        }
    }
    let mut s = SparseState::zero(16).unwrap();
    s.apply_all(&build_row_stage(&layout(4), WStrategy::Tree))
        .unwrap();
    assert_eq!(s.support(), 256);
    assert!(s.iter().all(|(_, a)| (a.re - 1.0 / 16.0).abs() < 1e-12));
}

#[test]
fn column_parity_is_sound_and_complete() {
    for n in 1..=5 {
        let l = layout(n);
        let plan = ancilla_plan(&l, Algorithm::Pipeline);
        let width = n * n + plan.num_ancillas();
        for mode in [ColumnGate::Cx, ColumnGate::Cz] {
            let stage = build_column_stage(&l, &plan, mode);
            for cols in row_assignments(n) {
                let mut s = SparseState::basis(width, board_key(n, &cols)).unwrap();
                s.apply_all(&stage).unwrap();
                let entries = s.sorted();
                assert_eq!(
                    entries.len(),
                    1,
                    "column stage keeps basis states basis states"
                );
                let key = entries[0].0;
                let all_ones = plan.column_ancillas.iter().all(|&a| key >> a & 1 == 1);
                assert_eq!(all_ones, is_permutation(&cols), "n={n} {mode:?} {cols:?}");
            }
        }
    }
}

#[test]
fn column_parity_example() {
    // Column counts (2, 0, 1, 1): two queens in column 1.
    let l = layout(4);
    let plan = ancilla_plan(&l, Algorithm::Pipeline);
    let mut s = SparseState::basis(25, board_key(4, &[1, 1, 3, 4])).unwrap();
    s.apply_all(&build_column_stage(&l, &plan, ColumnGate::Cx))
        .unwrap();
    let key = s.sorted()[0].0;
    let ancillas: Vec<u128> = plan.column_ancillas.iter().map(|&a| key >> a & 1).collect();
    assert_eq!(ancillas, vec![0, 0, 1]);

    let mut s = SparseState::basis(25, board_key(4, &[2, 4, 1, 3])).unwrap();
    s.apply_all(&build_column_stage(&l, &plan, ColumnGate::Cz))
        .unwrap();
    let key = s.sorted()[0].0;
    assert!(plan.column_ancillas.iter().all(|&a| key >> a & 1 == 1));
}

#[test]
fn diagonal_ancillas_flag_exactly_the_attacking_pairs() {
    for n in 2..=5 {
        let l = layout(n);
        let plan = ancilla_plan(&l, Algorithm::Pipeline);
        let stage = build_diagonal_stage(&l, &plan);
        let width = n * n + plan.num_ancillas();
        for cols in row_assignments(n).filter(|c| is_permutation(c)) {
            let mut s = SparseState::basis(width, board_key(n, &cols)).unwrap();
            s.apply_all(&stage).unwrap();
            let key = s.sorted()[0].0;
            for (&(r, t), &anc) in plan.row_pairs.iter().zip(&plan.diagonal_ancillas) {
                let attacked = cols[r - 1].abs_diff(cols[t - 1]) == t - r;
                assert_eq!(
                    key >> anc & 1 == 0,
                    attacked,
                    "n={n} {cols:?} pair ({r},{t})"
                );
            }
        }
    }
    // [1,2,3,4]: rows 1 and 2 share a main diagonal.
    let l = layout(4);
    let plan = ancilla_plan(&l, Algorithm::Pipeline);
    let mut s = SparseState::basis(25, board_key(4, &[1, 2, 3, 4])).unwrap();
    s.apply_all(&build_diagonal_stage(&l, &plan)).unwrap();
    assert_eq!(s.sorted()[0].0 >> plan.diagonal_ancillas[0] & 1, 0);
}

#[test]
fn all_builders_agree_with_the_oracle() {
    for n in 1..=6 {
        let expected = oracle::solve_classical(n).unwrap();
        for algorithm in Algorithm::ALL {
            let found: Vec<Solution> = solution_map(n, algorithm, &PipelineOptions::default())
                .into_keys()
                .collect();
            assert_eq!(found, expected, "n={n} {}", algorithm.name());
        }
    }
}

#[test]
fn cx_and_cz_columns_give_identical_distributions() {
    for n in 1..=5 {
        let cx = solution_map(
            n,
            Algorithm::Pipeline,
            &PipelineOptions {
                column_gate: ColumnGate::Cx,
                ..Default::default()
            },
        );
        let cz = solution_map(
            n,
            Algorithm::Pipeline,
            &PipelineOptions {
                column_gate: ColumnGate::Cz,
                ..Default::default()
            },
        );
        assert_same_distribution(&cx, &cz, 1e-9);
    }
}

#[test]
fn dynamic_gating_preserves_the_distribution() {
    for n in 1..=5 {
        let on = solution_map(
            n,
            Algorithm::Pipeline,
            &PipelineOptions {
                dynamic: true,
                ..Default::default()
            },
        );
        let off = solution_map(
            n,
            Algorithm::Pipeline,
            &PipelineOptions {
                dynamic: false,
                ..Default::default()
            },
        );
        assert_same_distribution(&on, &off, 1e-9);
    }
}

#[test]
fn tree_w_states_in_the_pipeline() {
    for n in 1..=5 {
        let chain = solution_map(n, Algorithm::Pipeline, &PipelineOptions::default());
        let tree = solution_map(
            n,
            Algorithm::Pipeline,
            &PipelineOptions {
                w_strategy: WStrategy::Tree,
                ..Default::default()
            },
        );
        assert_same_distribution(&chain, &tree, 1e-9);
    }
}

#[test]
fn direct_column_prepares_uniform_permutations() {
    for n in 1..=5 {
        let l = layout(n);
        let built = build_direct_column(&l);
        let stage = built.stage("permutations").unwrap();
        let mut s = SparseState::zero(built.circuit.num_qubits()).unwrap();
        s.apply_all(&built.circuit.instructions()[stage]).unwrap();
        let perms: Vec<Vec<usize>> = row_assignments(n).filter(|c| is_permutation(c)).collect();
        assert_eq!(s.support(), perms.len());
        let amp = 1.0 / (perms.len() as f64).sqrt();
        for p in &perms {
            assert!(
                (s.amplitude(board_key(n, p)).re - amp).abs() < 1e-10,
                "n={n} {p:?}"
            );
        }
    }
    // n = 2: (|1001> + |0110>) / sqrt 2 with q1 printed first.
    let built = build_direct_column(&layout(2));
    let mut s = SparseState::zero(built.circuit.num_qubits()).unwrap();
    s.apply_all(&built.circuit.instructions()[built.stage("permutations").unwrap()])
        .unwrap();
    let keys: Vec<u128> = s.sorted().into_iter().map(|(k, _)| k & 0b1111).collect();
    assert_eq!(keys, vec![0b0110, 0b1001]);
}

#[test]
fn backtracking_probabilities_match_the_branch_oracle() {
    for n in 1..=6 {
        let found = solution_map(n, Algorithm::Backtracking, &PipelineOptions::default());
        for (s, p) in &found {
            let exact =
                oracle::ratio_to_f64(&oracle::backtracking_branch_probability(n, s).unwrap());
            assert!((p - exact).abs() < 1e-12, "n={n} {s}: {p} vs {exact}");
        }
        let total: f64 = found.values().sum();
        let oracle_total: f64 = oracle::solve_classical(n)
            .unwrap()
            .iter()
            .map(|s| oracle::ratio_to_f64(&oracle::backtracking_branch_probability(n, s).unwrap()))
            .sum();
        assert!((total - oracle_total).abs() < 1e-12);
    }
    let four: f64 = solution_map(4, Algorithm::Backtracking, &PipelineOptions::default())
        .values()
        .sum();
    assert!((four - 0.5).abs() < 1e-12);
}

#[test]
fn success_probabilities() {
    for n in 1..=5 {
        let count = oracle::count_solutions(n).unwrap() as f64;
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        let pipe: f64 = solution_map(n, Algorithm::Pipeline, &PipelineOptions::default())
            .values()
            .sum();
        assert!(
            (pipe - count / (n as f64).powi(n as i32)).abs() < 1e-9,
            "n={n}"
        );
        let direct: f64 = solution_map(n, Algorithm::Direct, &PipelineOptions::default())
            .values()
            .sum();
        assert!((direct - count / fact).abs() < 1e-9, "n={n}");
    }
}

#[test]
fn norms_sparsity_and_pruning_during_execution() {
    for n in 1..=5 {
        let l = layout(n);
        let (done, dead) = oracle::backtracking_leaves(n).unwrap();
        let limits = [
            (Algorithm::Pipeline, n.pow(n as u32)),
            (Algorithm::Direct, (1..=n).product::<usize>()),
            (Algorithm::Backtracking, done.len() + dead.len()),
        ];
        for (algorithm, limit) in limits {
            let built = build(&l, algorithm, &PipelineOptions::default());
            let mut worst = 0;
            let run = run_exact_observed(&built.circuit, &SimConfig::default(), |i, branches| {
                let total: f64 = branches.iter().map(|b| b.weight * b.state.norm_sqr()).sum();
                assert!(
                    (total - 1.0).abs() < 1e-9,
                    "n={n} {} after {i}: {total}",
                    algorithm.name()
                );
                let weights: f64 = branches.iter().map(|b| b.weight).sum();
                assert!((weights - 1.0).abs() < 1e-9);
                worst = worst.max(branches.iter().map(|b| b.state.support()).max().unwrap());
            })
            .unwrap();
            assert!(
                worst <= limit,
                "n={n} {}: support {worst} > {limit}",
                algorithm.name()
            );
            assert!(run.metadata.pruned_probability <= 1e-12);
            assert!((run.total_probability - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn dead_branches_leave_rows_empty() {
    let l = layout(4);
    let built = build_quantum_backtracking(&l);
    let run = run_exact(&built.circuit, &SimConfig::default()).unwrap();
    let rejected: Vec<_> = run
        .outcomes
        .iter()
        .filter(|o| !built.post_selection.matches(&o.clbits))
        .collect();
    assert!(!rejected.is_empty());
    for o in rejected {
        let board = o.board.as_ref().unwrap();
        let last_row = &board.as_slice()[12..];
        assert!(last_row.iter().all(|&b| !b));
        assert!(l.decode_solution(board.as_slice()).is_err());
    }
}

#[test]
fn pipeline_outcomes_at_n4() {
    let l = layout(4);
    let built = build_pipeline(&l, &PipelineOptions::default());
    let run = run_exact(&built.circuit, &SimConfig::default()).unwrap();
    let columns_pass: Vec<_> = run
        .outcomes
        .iter()
        .filter(|o| o.clbits.as_slice()[..3].iter().all(|&b| b))
        .collect();
    assert_eq!(columns_pass.len(), 24);
    let solutions: Vec<_> = columns_pass
        .iter()
        .filter(|o| o.clbits.as_slice().iter().all(|&b| b))
        .collect();
    assert_eq!(solutions.len(), 2);
    for o in solutions {
        assert!((o.probability - 1.0 / 256.0).abs() < 1e-12);
    }
    let extracted = extract_solutions(&run, &l, &built.post_selection).unwrap();
    assert_eq!(
        extracted
            .solutions
            .iter()
            .map(|(s, _)| s.clone())
            .collect::<Vec<_>>(),
        vec![Solution(vec![2, 4, 1, 3]), Solution(vec![3, 1, 4, 2])]
    );
    assert!((extracted.success_probability - 2.0 / 256.0).abs() < 1e-12);
}

#[test]
fn direct_column_at_n2_has_two_rejected_outcomes() {
    let l = layout(2);
    let built = build_direct_column(&l);
    let run = run_exact(&built.circuit, &SimConfig::default()).unwrap();
    assert_eq!(run.outcomes.len(), 2);
    assert!(run
        .outcomes
        .iter()
        .all(|o| (o.probability - 0.5).abs() < 1e-12 && !built.post_selection.matches(&o.clbits)));
    let extracted = extract_solutions(&run, &l, &built.post_selection).unwrap();
    assert!(extracted.solutions.is_empty());
    assert_eq!(extracted.success_probability, 0.0);
}

#[test]
fn no_solutions_for_three() {
    for algorithm in Algorithm::ALL {
        assert!(solution_map(3, algorithm, &PipelineOptions::default()).is_empty());
    }
}

#[test]
fn a_dropped_toffoli_is_caught_as_a_decode_failure() {
    let l = layout(4);
    let built = build_pipeline(&l, &PipelineOptions::default());
    // Third Toffoli of pair (1,2) guards cells (1,2)-(2,3); [2,3,1,4]
    // attacks on that pair only.
    let broken = built.skip_controlled_gate("diagonals", 2).unwrap();
    let run = run_exact(&broken.circuit, &SimConfig::default()).unwrap();
    assert!(
        matches!(
            extract_solutions(&run, &l, &broken.post_selection),
            Err(simulator::SimError::DecodeFailure { .. })
        ) || extract_solutions(&run, &l, &broken.post_selection)
            .unwrap()
            .solutions
            .len()
            == 3
    );
}

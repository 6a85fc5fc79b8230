use std::fmt::Write as _;
use std::process::ExitCode;
use std::time::Instant;

use wqueens::algorithms::{self, BuiltCircuit};
use wqueens::oracle::{self, Solution, KNOWN_SOLUTION_COUNTS};
use wqueens::report::{CircuitStats, Report, SolutionEntry};
use wqueens::simulator::{self, ExtractedSolutions, SimConfig};
use wqueens::{Algorithm, BoardLayout, PipelineOptions};

use crate::{board_size, BenchArgs, CircuitArgs, Failure, Mode, SolveArgs, VerifyArgs};

fn stats(built: &BuiltCircuit, branches_explored: usize) -> CircuitStats {
    let c = &built.circuit;
    CircuitStats {
        qubits: c.num_qubits(),
        clbits: c.num_clbits(),
        gate_histogram: c
            .gate_counts()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
        depth: c.depth(),
        branches_explored,
    }
}

/// Solutions found by an exact run, with decode failures reported as
/// mismatches.
fn exact_solutions(
    built: &BuiltCircuit,
    layout: &BoardLayout,
    config: &SimConfig,
) -> Result<(ExtractedSolutions, usize), Failure> {
    let run = simulator::run_exact(&built.circuit, config)?;
    let found = simulator::extract_solutions(&run, layout, &built.post_selection)?;
    Ok((found, run.metadata.branches_explored))
}

pub fn solve(args: &SolveArgs) -> Result<ExitCode, Failure> {
    let layout = args.build.layout()?;
    let n = layout.n();
    let algorithm = Algorithm::from(args.build.algorithm);
    let start = Instant::now();
    let built = algorithms::build(&layout, algorithm, &args.build.options());
    let config = args.run.config();
    let (found, branches) = match args.mode {
        Mode::Exact => exact_solutions(&built, &layout, &config)?,
        Mode::Shots => {
            let counts = simulator::run_shots(&built.circuit, args.shots, args.seed, &config)?;
            (
                counts.solutions(&layout, &built.post_selection)?,
                counts.nodes_expanded,
            )
        }
    };
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;

    let expected = oracle::solve_classical(n).map_err(|e| Failure::Usage(e.to_string()))?;
    let listed: Vec<Solution> = found.solutions.iter().map(|(s, _)| s.clone()).collect();
    let shots = args.mode == Mode::Shots;
    let report = Report {
        n,
        algorithm: algorithm.name().to_string(),
        mode: if shots { "shots" } else { "exact" }.to_string(),
        seed: shots.then_some(args.seed),
        shots: shots.then_some(args.shots),
        solutions: found
            .solutions
            .iter()
            .map(|(cols, p)| SolutionEntry {
                cols: cols.clone(),
                probability: *p,
            })
            .collect(),
        success_probability: found.success_probability,
        oracle_count: expected.len(),
        oracle_match: listed == expected,
        circuit: stats(&built, branches),
        wall_time_ms,
    };

    let mut out = String::new();
    writeln!(
        out,
        "n = {n}, algorithm = {}, mode = {}",
        report.algorithm, report.mode
    )
    .unwrap();
    for entry in &report.solutions {
        writeln!(out, "\n{}  p = {:.16e}", entry.cols, entry.probability).unwrap();
        out.push_str(&layout.render(&entry.cols));
    }
    writeln!(out, "\nsolutions: {}", report.solutions.len()).unwrap();
    writeln!(
        out,
        "success_probability: {:.16e}",
        report.success_probability
    )
    .unwrap();
    writeln!(out, "oracle_count: {}", report.oracle_count).unwrap();
    writeln!(out, "oracle_match: {}", report.oracle_match).unwrap();
    print!("{out}");

    if let Some(path) = &args.json {
        std::fs::write(path, report.to_json() + "\n")?;
    }
    Ok(if report.oracle_match {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

pub fn circuit(args: &CircuitArgs) -> Result<ExitCode, Failure> {
    let layout = args.build.layout()?;
    let built = algorithms::build(&layout, args.build.algorithm.into(), &args.build.options());
    if !args.stats {
        print!("{}", built.circuit.emit_text());
        return Ok(ExitCode::SUCCESS);
    }
    let c = &built.circuit;
    println!("qubits: {}", c.num_qubits());
    println!("clbits: {}", c.num_clbits());
    println!("instructions: {}", c.len());
    println!("depth: {}", c.depth());
    println!("gates:");
    for (name, count) in c.gate_counts() {
        println!("  {name}: {count}");
    }
    Ok(ExitCode::SUCCESS)
}

/// Stage and controlled-gate index dropped by `--inject-fault`.
fn fault_site(algorithm: Algorithm) -> (&'static str, usize) {
    match algorithm {
        Algorithm::Pipeline | Algorithm::Direct => ("diagonals", 2),
        Algorithm::Backtracking => ("backtracking", 0),
    }
}

pub fn verify(args: &VerifyArgs) -> Result<ExitCode, Failure> {
    let n_max = board_size(args.n_max, args.force)?;
    let config = args.run.config();
    let fault = args.inject_fault.map(Algorithm::from);

    let mut rows = Vec::new();
    let mut first_failure = None;
    for n in 1..=n_max {
        let layout = BoardLayout::new(n).map_err(|e| Failure::Usage(e.to_string()))?;
        let expected = oracle::solve_classical(n).map_err(|e| Failure::Usage(e.to_string()))?;
        let table_ok = KNOWN_SOLUTION_COUNTS
            .get(n - 1)
            .is_none_or(|&k| k == expected.len());
        let mut cells = Vec::new();
        let mut seen: Vec<Vec<Solution>> = Vec::new();
        for algorithm in Algorithm::ALL {
            let mut built = algorithms::build(&layout, algorithm, &PipelineOptions::default());
            if fault == Some(algorithm) {
                let (stage, k) = fault_site(algorithm);
                if let Some(broken) = built.skip_controlled_gate(stage, k) {
                    built = broken;
                }
            }
            let problem = match exact_solutions(&built, &layout, &config) {
                Ok((found, _)) => {
                    let listed: Vec<Solution> =
                        found.solutions.into_iter().map(|(s, _)| s).collect();
                    let problem = if listed != expected {
                        Some(format!(
                            "found {} solutions, oracle has {}",
                            listed.len(),
                            expected.len()
                        ))
                    } else if !table_ok {
                        Some(format!(
                            "oracle count {} disagrees with the reference table",
                            expected.len()
                        ))
                    } else {
                        None
                    };
                    seen.push(listed);
                    problem
                }
                Err(Failure::Mismatch(msg)) => Some(msg),
                Err(e) => return Err(e),
            };
            cells.push(problem.is_none());
            if let (Some(msg), None) = (&problem, &first_failure) {
                first_failure = Some(format!("n={n} algorithm={}: {msg}", algorithm.name()));
            }
        }
        let agree = seen.len() == Algorithm::ALL.len() && seen.windows(2).all(|w| w[0] == w[1]);
        if !agree && first_failure.is_none() {
            first_failure = Some(format!("n={n}: algorithms disagree"));
        }
        cells.push(agree);
        rows.push((n, expected.len(), cells));
    }

    println!(
        "{:>3}  {:>5}  {:<9} {:<9} {:<13} agree",
        "n", "count", "pipeline", "direct", "backtracking"
    );
    let mut passed = 0;
    for (n, count, cells) in &rows {
        let marks: Vec<&str> = cells
            .iter()
            .map(|&ok| if ok { "pass" } else { "FAIL" })
            .collect();
        passed += cells[..Algorithm::ALL.len()]
            .iter()
            .filter(|&&ok| ok)
            .count();
        println!(
            "{n:>3}  {count:>5}  {:<9} {:<9} {:<13} {}",
            marks[0], marks[1], marks[2], marks[3]
        );
    }
    let total = rows.len() * Algorithm::ALL.len();
    println!("{passed}/{total} cells passed");
    match first_failure {
        None => Ok(ExitCode::SUCCESS),
        Some(msg) => Err(Failure::Mismatch(format!("first failure: {msg}"))),
    }
}

pub fn bench(args: &BenchArgs) -> Result<ExitCode, Failure> {
    let n_max = board_size(args.n_max, args.force)?;
    let config = args.run.config();
    println!(
        "{:>3}  {:<12} {:>7} {:>7} {:>7} {:>10}",
        "n", "algorithm", "qubits", "gates", "depth", "exact_ms"
    );
    for n in 1..=n_max {
        let layout = BoardLayout::new(n).map_err(|e| Failure::Usage(e.to_string()))?;
        for algorithm in Algorithm::ALL {
            let built = algorithms::build(&layout, algorithm, &PipelineOptions::default());
            let c = &built.circuit;
            let gates: usize = c.gate_counts().values().sum();
            let start = Instant::now();
            simulator::run_exact(c, &config)?;
            let ms = start.elapsed().as_secs_f64() * 1e3;
            println!(
                "{n:>3}  {:<12} {:>7} {gates:>7} {:>7} {ms:>10.2}",
                algorithm.name(),
                c.num_qubits(),
                c.depth()
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

use wqueens::algorithms::build;
use wqueens::circuit::Circuit;
use wqueens::simulator::{run_exact, SimConfig};
use wqueens::wstate::WStrategy;
use wqueens::{Algorithm, BoardLayout, ColumnGate, PipelineOptions};

#[test]
fn readme_example_parses() {
    let text =
        "CIRCUIT qubits=5 clbits=1\nREG board q0..q3\nX q0\nMCRY(1.5707963267948968e0) q0 -> q1\n\
                MCX q0,q3 -> q4\nMEASURE q4 -> c0\nX q2 ? c0=1\nREADOUT q0..q3\n";
    let c = Circuit::parse_text(text).unwrap();
    assert_eq!(c.len(), 5);
    assert_eq!(c.emit_text(), text);
}

#[test]
fn every_builder_round_trips_and_reruns_identically() {
    let variants = [
        PipelineOptions::default(),
        PipelineOptions {
            column_gate: ColumnGate::Cz,
            ..Default::default()
        },
        PipelineOptions {
            dynamic: false,
            ..Default::default()
        },
        PipelineOptions {
            w_strategy: WStrategy::Tree,
            ..Default::default()
        },
    ];
    for n in 1..=5 {
        let layout = BoardLayout::new(n).unwrap();
        for algorithm in Algorithm::ALL {
            for options in &variants {
                let built = build(&layout, algorithm, options);
                let text = built.circuit.emit_text();
                let parsed = Circuit::parse_text(&text).unwrap();
                assert_eq!(parsed, built.circuit, "n={n} {}", algorithm.name());
                if n <= 4 {
                    let a = run_exact(&built.circuit, &SimConfig::default()).unwrap();
                    let b = run_exact(&parsed, &SimConfig::default()).unwrap();
                    assert_eq!(a.outcomes, b.outcomes);
                }
            }
        }
    }
}

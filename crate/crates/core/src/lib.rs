//! N-Queens as a quantum circuit.
//!
//! The crate builds three circuit constructions for placing `n` queens on an
//! `n x n` board, executes them on an exact sparse simulator that supports
//! mid-circuit measurement and classically conditioned gates, and checks the
//! post-selected boards against a classical solver.
//!
//! ```
//! use wqueens::{algorithms, board::BoardLayout, simulator};
//!
//! let layout = BoardLayout::new(4).unwrap();
//! let built = algorithms::build_quantum_backtracking(&layout);
//! let run = simulator::run_exact(&built.circuit, &Default::default()).unwrap();
//! let found = simulator::extract_solutions(&run, &layout, &built.post_selection).unwrap();
//! assert_eq!(found.solutions.len(), 2);
//! assert!((found.success_probability - 0.5).abs() < 1e-12);
//! ```

pub mod algorithms;
pub mod bits;
pub mod board;
pub mod circuit;
pub mod oracle;
pub mod report;
pub mod simulator;
pub mod wstate;

pub use algorithms::{Algorithm, BuiltCircuit, ColumnGate, PipelineOptions, PostSelection};
pub use bits::BitString;
pub use board::BoardLayout;
pub use circuit::Circuit;
pub use oracle::Solution;

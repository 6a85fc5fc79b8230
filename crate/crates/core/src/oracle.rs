//! Classical ground truth for N-Queens.
//!
//! Everything here is computed without touching the circuit builders or the
//! simulator: a bitmask backtracking solver, the closed-form search-space
//! sizes, and exact rational branch probabilities for the backtracking
//! circuit.

use std::fmt;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Published solution counts for n = 1..=8.
pub const KNOWN_SOLUTION_COUNTS: [usize; 8] = [1, 0, 0, 2, 10, 4, 40, 92];

/// Largest board handled by [`count_solutions`].
pub const MAX_ORACLE_N: usize = 10;

/// One queen column per row, 1-based: `cols[r]` is the column of row `r + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Solution(pub Vec<usize>);

impl Solution {
    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn cols(&self) -> &[usize] {
        &self.0
    }

    /// Checks the permutation and diagonal invariants.
    pub fn is_valid(&self) -> bool {
        let n = self.0.len();
        let mut seen = vec![false; n + 1];
        for &c in &self.0 {
            if c < 1 || c > n || seen[c] {
                return false;
            }
            seen[c] = true;
        }
        for r in 0..n {
            for s in r + 1..n {
                if self.0[r].abs_diff(self.0[s]) == s - r {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("board size must be at least 1")]
    ZeroBoard,
    #[error("board size {0} exceeds the supported maximum of {MAX_ORACLE_N}")]
    TooLarge(usize),
    #[error("{0} is not a valid solution for n = {1}")]
    InvalidSolution(Solution, usize),
}

struct Search {
    n: usize,
    full: u32,
    cols: Vec<usize>,
    found: Vec<Solution>,
}

impl Search {
    // Masks are indexed by 0-based column; diagonals shift by one per row.
    fn place(&mut self, row: usize, used: u32, down: u32, up: u32) {
        if row == self.n {
            self.found.push(Solution(self.cols.clone()));
            return;
        }
        let mut free = self.full & !(used | down | up);
        while free != 0 {
            let bit = free & free.wrapping_neg();
            free ^= bit;
            self.cols.push(bit.trailing_zeros() as usize + 1);
            self.place(
                row + 1,
                used | bit,
                ((down | bit) << 1) & self.full,
                (up | bit) >> 1,
            );
            self.cols.pop();
        }
    }
}

/// Every solution, lexicographically sorted.
pub fn solve_classical(n: usize) -> Result<Vec<Solution>, OracleError> {
    check_n(n)?;
    let mut search = Search {
        n,
        full: (1u32 << n) - 1,
        cols: Vec::with_capacity(n),
        found: Vec::new(),
    };
    search.place(0, 0, 0, 0);
    // Low bits are tried first, so the output is already ordered.
    debug_assert!(search.found.windows(2).all(|w| w[0] < w[1]));
    Ok(search.found)
}

pub fn count_solutions(n: usize) -> Result<usize, OracleError> {
    solve_classical(n).map(|s| s.len())
}

fn check_n(n: usize) -> Result<(), OracleError> {
    match n {
        0 => Err(OracleError::ZeroBoard),
        n if n > MAX_ORACLE_N => Err(OracleError::TooLarge(n)),
        _ => Ok(()),
    }
}

/// Sizes of the three nested search spaces for an `n x n` board.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchSpace {
    /// Any subset of cells occupied: `2^(n^2)`.
    pub all_placements: BigUint,
    /// One queen per row: `n^n`.
    pub row_valid: BigUint,
    /// One queen per row and column: `n!`.
    pub row_and_column_valid: BigUint,
}

pub fn search_space_sizes(n: usize) -> Result<SearchSpace, OracleError> {
    if n == 0 {
        return Err(OracleError::ZeroBoard);
    }
    let big_n = BigUint::from(n);
    Ok(SearchSpace {
        all_placements: BigUint::one() << (n * n),
        row_valid: big_n.pow(n as u32),
        row_and_column_valid: (1..=n).map(BigUint::from).product(),
    })
}

/// Columns of row `prefix.len() + 1` that no queen in `prefix` attacks.
pub fn candidate_columns(n: usize, prefix: &[usize]) -> Vec<usize> {
    let row = prefix.len();
    let mut blocked = 0u64;
    for (r, &c) in prefix.iter().enumerate() {
        let d = row - r;
        blocked |= 1 << c;
        if c > d {
            blocked |= 1 << (c - d);
        }
        if c + d <= n {
            blocked |= 1 << (c + d);
        }
    }
    (1..=n).filter(|c| blocked & (1 << c) == 0).collect()
}

/// Squared amplitude the backtracking circuit assigns to `solution`: the
/// product over rows of `1 / |candidates|` along the solution's own prefix.
pub fn backtracking_branch_probability(
    n: usize,
    solution: &Solution,
) -> Result<Ratio<u128>, OracleError> {
    check_n(n)?;
    if solution.n() != n || !solution.is_valid() {
        return Err(OracleError::InvalidSolution(solution.clone(), n));
    }
    let mut p = Ratio::one();
    for row in 0..n {
        let candidates = candidate_columns(n, &solution.0[..row]);
        debug_assert!(candidates.contains(&solution.0[row]));
        p /= candidates.len() as u128;
    }
    Ok(p)
}

pub fn ratio_to_f64(r: &Ratio<u128>) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// Column prefixes, one per search-tree leaf.
pub type Leaves = Vec<Vec<usize>>;

/// Every leaf of the backtracking search tree: completed solutions and dead
/// prefixes whose next row has no candidate.
pub fn backtracking_leaves(n: usize) -> Result<(Leaves, Leaves), OracleError> {
    check_n(n)?;
    fn walk(
        n: usize,
        prefix: &mut Vec<usize>,
        done: &mut Vec<Vec<usize>>,
        dead: &mut Vec<Vec<usize>>,
    ) {
        if prefix.len() == n {
            done.push(prefix.clone());
            return;
        }
        let candidates = candidate_columns(n, prefix);
        if candidates.is_empty() {
            dead.push(prefix.clone());
        }
        for c in candidates {
            prefix.push(c);
            walk(n, prefix, done, dead);
            prefix.pop();
        }
    }
    let (mut done, mut dead) = (Vec::new(), Vec::new());
    walk(n, &mut Vec::new(), &mut done, &mut dead);
    Ok((done, dead))
}

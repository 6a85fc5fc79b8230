//! Chessboard ↔ qubit layout.
//!
//! Cells are numbered row-major from 1 in the top-left corner to `n^2` in the
//! bottom-right corner. The 1-based numbering is kept on this API; circuit
//! builders subtract one when they address physical qubits.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::oracle::Solution;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoardError {
    #[error("board size must be at least 1")]
    ZeroBoard,
    #[error("cell ({row}, {col}) is outside the {n}x{n} board")]
    CellOutOfBounds { row: usize, col: usize, n: usize },
    #[error("row {0} is outside the board")]
    RowOutOfBounds(usize),
    #[error("column {0} is outside the board")]
    ColumnOutOfBounds(usize),
    #[error("row pair ({0}, {1}) must satisfy r < s")]
    RowOrder(usize, usize),
    #[error("prefix has {len} entries but the board only has {n} rows")]
    PrefixTooLong { len: usize, n: usize },
    #[error("column {0} appears more than once in the prefix")]
    DuplicatePrefix(usize),
    #[error("expected {expected} board bits, got {found}")]
    BitLength { expected: usize, found: usize },
    #[error("row {0} does not hold exactly one queen")]
    NotOneHotRow(usize),
    #[error("column {0} does not hold exactly one queen")]
    NotOneHotColumn(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellCoord {
    pub row: usize,
    pub col: usize,
}

impl CellCoord {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiagonalDirection {
    /// `row - col` is constant.
    Main,
    /// `row + col` is constant.
    Anti,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagonal {
    pub direction: DiagonalDirection,
    /// `row - col` for [`DiagonalDirection::Main`], `row + col` for
    /// [`DiagonalDirection::Anti`].
    pub offset: isize,
    /// Cells ordered by increasing row.
    pub cells: Vec<CellCoord>,
}

/// Rule applied by [`BoardLayout::allowed_columns`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExclusionMode {
    /// Remove columns already used by the prefix.
    ColumnOnly,
    /// Additionally remove columns diagonal to any prefix queen.
    ColumnAndDiagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoardLayout {
    n: usize,
}

impl BoardLayout {
    pub fn new(n: usize) -> Result<Self, BoardError> {
        if n == 0 {
            return Err(BoardError::ZeroBoard);
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_cells(&self) -> usize {
        self.n * self.n
    }

    fn check_cell(&self, cell: CellCoord) -> Result<(), BoardError> {
        if (1..=self.n).contains(&cell.row) && (1..=self.n).contains(&cell.col) {
            Ok(())
        } else {
            Err(BoardError::CellOutOfBounds {
                row: cell.row,
                col: cell.col,
                n: self.n,
            })
        }
    }

    /// 1-based qubit number of `cell`.
    pub fn qubit_index(&self, cell: CellCoord) -> Result<usize, BoardError> {
        self.check_cell(cell)?;
        Ok((cell.row - 1) * self.n + cell.col)
    }

    /// Inverse of [`Self::qubit_index`].
    pub fn cell_of(&self, qubit_index: usize) -> Option<CellCoord> {
        if qubit_index == 0 || qubit_index > self.num_cells() {
            return None;
        }
        let k = qubit_index - 1;
        Some(CellCoord::new(k / self.n + 1, k % self.n + 1))
    }

    /// 0-based circuit qubit for a cell already known to be in bounds.
    pub(crate) fn wire(&self, row: usize, col: usize) -> usize {
        debug_assert!((1..=self.n).contains(&row) && (1..=self.n).contains(&col));
        (row - 1) * self.n + col - 1
    }

    pub fn row_qubits(&self, r: usize) -> Result<Vec<usize>, BoardError> {
        if !(1..=self.n).contains(&r) {
            return Err(BoardError::RowOutOfBounds(r));
        }
        Ok(((r - 1) * self.n + 1..=r * self.n).collect())
    }

    pub fn column_qubits(&self, c: usize) -> Result<Vec<usize>, BoardError> {
        if !(1..=self.n).contains(&c) {
            return Err(BoardError::ColumnOutOfBounds(c));
        }
        Ok((0..self.n).map(|r| r * self.n + c).collect())
    }

    /// All main diagonals (by increasing `row - col`) followed by all anti
    /// diagonals (by increasing `row + col`). `4n - 2` entries for `n >= 2`;
    /// a 1x1 board yields one single-cell diagonal per direction.
    pub fn enumerate_diagonals(&self) -> Vec<Diagonal> {
        let n = self.n as isize;
        let mut out = Vec::with_capacity(4 * self.n);
        for offset in -(n - 1)..=(n - 1) {
            let cells = (1..=n)
                .filter_map(|row| {
                    let col = row - offset;
                    (1..=n)
                        .contains(&col)
                        .then(|| CellCoord::new(row as usize, col as usize))
                })
                .collect();
            out.push(Diagonal {
                direction: DiagonalDirection::Main,
                offset,
                cells,
            });
        }
        for offset in 2..=2 * n {
            let cells = (1..=n)
                .filter_map(|row| {
                    let col = offset - row;
                    (1..=n)
                        .contains(&col)
                        .then(|| CellCoord::new(row as usize, col as usize))
                })
                .collect();
            out.push(Diagonal {
                direction: DiagonalDirection::Anti,
                offset,
                cells,
            });
        }
        out
    }

    /// Cell pairs between rows `r < s` that share a diagonal, ordered by the
    /// row-`r` column and then the row-`s` column.
    pub fn diagonal_pairs(
        &self,
        r: usize,
        s: usize,
    ) -> Result<Vec<(CellCoord, CellCoord)>, BoardError> {
        if r >= s {
            return Err(BoardError::RowOrder(r, s));
        }
        if s > self.n {
            return Err(BoardError::RowOutOfBounds(s));
        }
        if r == 0 {
            return Err(BoardError::RowOutOfBounds(r));
        }
        let d = s - r;
        let mut pairs = Vec::with_capacity(2 * (self.n - d));
        for c in 1..=self.n {
            if c > d {
                pairs.push((CellCoord::new(r, c), CellCoord::new(s, c - d)));
            }
            if c + d <= self.n {
                pairs.push((CellCoord::new(r, c), CellCoord::new(s, c + d)));
            }
        }
        Ok(pairs)
    }

    /// Columns still open for row `prefix.len() + 1`, ascending.
    pub fn allowed_columns(
        &self,
        prefix: &[usize],
        mode: ExclusionMode,
    ) -> Result<BTreeSet<usize>, BoardError> {
        if prefix.len() >= self.n {
            return Err(BoardError::PrefixTooLong {
                len: prefix.len(),
                n: self.n,
            });
        }
        let mut seen = BTreeSet::new();
        for &c in prefix {
            if !(1..=self.n).contains(&c) {
                return Err(BoardError::ColumnOutOfBounds(c));
            }
            if !seen.insert(c) {
                return Err(BoardError::DuplicatePrefix(c));
            }
        }
        let next_row = prefix.len() + 1;
        Ok((1..=self.n)
            .filter(|c| !seen.contains(c))
            .filter(|&c| match mode {
                ExclusionMode::ColumnOnly => true,
                ExclusionMode::ColumnAndDiagonal => prefix
                    .iter()
                    .enumerate()
                    .all(|(i, &pc)| pc.abs_diff(c) != next_row - (i + 1)),
            })
            .collect())
    }

    /// Translates `n^2` board bits (qubit 1 first) into a solution vector.
    pub fn decode_solution(&self, board_bits: &[bool]) -> Result<Solution, BoardError> {
        if board_bits.len() != self.num_cells() {
            return Err(BoardError::BitLength {
                expected: self.num_cells(),
                found: board_bits.len(),
            });
        }
        let mut cols = Vec::with_capacity(self.n);
        for (r, row) in board_bits.chunks(self.n).enumerate() {
            let mut ones = row.iter().enumerate().filter(|(_, &b)| b);
            match (ones.next(), ones.next()) {
                (Some((c, _)), None) => cols.push(c + 1),
                _ => return Err(BoardError::NotOneHotRow(r + 1)),
            }
        }
        let mut taken = vec![false; self.n + 1];
        for &c in &cols {
            if std::mem::replace(&mut taken[c], true) {
                return Err(BoardError::NotOneHotColumn(c));
            }
        }
        Ok(Solution(cols))
    }

    /// `Q`/`.` grid, one rank per line, top row first.
    pub fn render(&self, solution: &Solution) -> String {
        let mut out = String::with_capacity(self.n * (self.n + 1));
        for &c in solution.cols() {
            for col in 1..=self.n {
                out.push(if col == c { 'Q' } else { '.' });
            }
            out.push('\n');
        }
        out
    }
}

//! Row-convex polyominoes stored as one column interval per row.
//!
//! Rows are numbered `1..=k` from the top, columns `1..=ℓ` from the left.
//! Every row is a single nonempty interval, so row-convexity holds by
//! construction. Columns are capped at [`MAX_COLUMNS`] so that a row fits in
//! one machine word.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Widest supported polyomino.
pub const MAX_COLUMNS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyominoError {
    #[error("polyomino has no rows")]
    EmptyShape,
    #[error("row {0} is empty (end column before start column)")]
    EmptyRow(usize),
    #[error("row {0} has a column bound below 1")]
    NonPositiveBound(usize),
    #[error("row {0} extends past column {MAX_COLUMNS}")]
    TooWide(usize),
    #[error("row index {index} out of range for a polyomino with {rows} rows")]
    IndexOutOfRange { index: usize, rows: usize },
    #[error("polyomino is not column-convex")]
    NotColumnConvex,
}

/// A cell, addressed matrix-style: `row` grows downward, `col` grows rightward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub const fn new(row: usize, col: usize) -> Self {
        Cell { row, col }
    }
}

impl From<(usize, usize)> for Cell {
    fn from((row, col): (usize, usize)) -> Self {
        Cell { row, col }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// Closed column interval `[start, end]` occupied by one row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RowInterval {
    start: usize,
    end: usize,
}

impl RowInterval {
    /// Builds an interval; `row` is only used to label errors.
    pub fn new(start: usize, end: usize, row: usize) -> Result<Self, PolyominoError> {
        if start == 0 || end == 0 {
            return Err(PolyominoError::NonPositiveBound(row));
        }
        if end < start {
            return Err(PolyominoError::EmptyRow(row));
        }
        if end > MAX_COLUMNS {
            return Err(PolyominoError::TooWide(row));
        }
        Ok(RowInterval { start, end })
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.end
    }

    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains_col(&self, col: usize) -> bool {
        self.start <= col && col <= self.end
    }

    /// `self ⊆ other` as column sets.
    pub fn is_within(&self, other: &RowInterval) -> bool {
        other.start <= self.start && self.end <= other.end
    }

    pub fn comparable(&self, other: &RowInterval) -> bool {
        self.is_within(other) || other.is_within(self)
    }

    /// Bit `c - 1` set for every column `c` of the interval.
    pub fn mask(&self) -> u64 {
        span_mask(self.start, self.end)
    }

    pub fn columns(&self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end
    }
}

/// Bits `start-1 ..= end-1`.
pub(crate) fn span_mask(start: usize, end: usize) -> u64 {
    debug_assert!(1 <= start && start <= end && end <= MAX_COLUMNS);
    let len = end - start + 1;
    let ones = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
    ones << (start - 1)
}

/// Shape classification by row comparability and exceptional rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShapeClass {
    Moon,
    AlmostMoon {
        exceptional_row: usize,
    },
    /// Comparable rows, two or more exceptional rows (a layer polyomino).
    RowComparableOnly,
    General,
}

impl ShapeClass {
    /// Moon or almost-moon.
    pub fn is_almost_moon(&self) -> bool {
        matches!(self, ShapeClass::Moon | ShapeClass::AlmostMoon { .. })
    }
}

impl fmt::Display for ShapeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeClass::Moon => write!(f, "moon"),
            ShapeClass::AlmostMoon { exceptional_row } => {
                write!(f, "almost-moon (exceptional row {exceptional_row})")
            }
            ShapeClass::RowComparableOnly => write!(f, "row-comparable"),
            ShapeClass::General => write!(f, "general"),
        }
    }
}

/// An immutable row-convex polyomino.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Polyomino {
    rows: Vec<RowInterval>,
    /// `offsets[r]` = number of cells in rows above row `r + 1`.
    offsets: Vec<usize>,
    min_col: usize,
    max_col: usize,
}

impl Polyomino {
    /// Builds a polyomino from `(start_col, end_col)` pairs, top row first.
    pub fn new(intervals: &[(usize, usize)]) -> Result<Self, PolyominoError> {
        let rows = intervals
            .iter()
            .enumerate()
            .map(|(i, &(s, e))| RowInterval::new(s, e, i + 1))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_rows(rows)
    }

    pub fn from_rows(rows: Vec<RowInterval>) -> Result<Self, PolyominoError> {
        if rows.is_empty() {
            return Err(PolyominoError::EmptyShape);
        }
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        let mut acc = 0;
        for r in &rows {
            offsets.push(acc);
            acc += r.len();
        }
        offsets.push(acc);
        let min_col = rows.iter().map(|r| r.start).min().unwrap();
        let max_col = rows.iter().map(|r| r.end).max().unwrap();
        Ok(Polyomino {
            rows,
            offsets,
            min_col,
            max_col,
        })
    }

    /// Number of rows, `k`.
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// Rightmost occupied column, `ℓ`. Column vectors have this length.
    pub fn width(&self) -> usize {
        self.max_col
    }

    pub fn min_col(&self) -> usize {
        self.min_col
    }

    pub fn cell_count(&self) -> usize {
        self.offsets[self.rows.len()]
    }

    pub fn rows(&self) -> &[RowInterval] {
        &self.rows
    }

    pub fn intervals(&self) -> Vec<(usize, usize)> {
        self.rows.iter().map(|r| (r.start, r.end)).collect()
    }

    /// Row `r` (1-based).
    pub fn row(&self, r: usize) -> Result<RowInterval, PolyominoError> {
        self.check_row(r)?;
        Ok(self.rows[r - 1])
    }

    pub(crate) fn row_unchecked(&self, r: usize) -> RowInterval {
        self.rows[r - 1]
    }

    pub(crate) fn check_row(&self, r: usize) -> Result<(), PolyominoError> {
        if r == 0 || r > self.rows.len() {
            Err(PolyominoError::IndexOutOfRange {
                index: r,
                rows: self.rows.len(),
            })
        } else {
            Ok(())
        }
    }

    pub fn row_lengths(&self) -> Vec<usize> {
        self.rows.iter().map(RowInterval::len).collect()
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.row >= 1 && cell.row <= self.rows.len() && self.rows[cell.row - 1].contains_col(cell.col)
    }

    /// Position of `cell` in row-major order, if it belongs to the shape.
    pub fn cell_index(&self, cell: Cell) -> Option<usize> {
        if !self.contains(cell) {
            return None;
        }
        let r = &self.rows[cell.row - 1];
        Some(self.offsets[cell.row - 1] + cell.col - r.start)
    }

    /// Inverse of [`Polyomino::cell_index`].
    pub fn cell_at(&self, index: usize) -> Option<Cell> {
        if index >= self.cell_count() {
            return None;
        }
        let row = self.offsets.partition_point(|&o| o <= index);
        let start = self.rows[row - 1].start;
        Some(Cell::new(row, start + index - self.offsets[row - 1]))
    }

    pub(crate) fn row_offset(&self, r: usize) -> usize {
        self.offsets[r - 1]
    }

    /// All cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.columns().map(move |c| Cell::new(i + 1, c)))
    }

    /// Rows containing column `col`, top to bottom.
    pub fn column_rows(&self, col: usize) -> Vec<usize> {
        (1..=self.rows.len())
            .filter(|&r| self.rows[r - 1].contains_col(col))
            .collect()
    }

    /// Number of cells in each column `1..=ℓ`.
    pub fn column_lengths(&self) -> Vec<usize> {
        let mut lens = vec![0; self.max_col];
        for r in &self.rows {
            for c in r.columns() {
                lens[c - 1] += 1;
            }
        }
        lens
    }

    pub fn rows_comparable(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, a)| self.rows[i + 1..].iter().all(|b| a.comparable(b)))
    }

    /// Rows with a strictly longer row somewhere above and somewhere below.
    pub fn exceptional_rows(&self) -> Vec<usize> {
        let lens = self.row_lengths();
        let k = lens.len();
        let mut prefix_max = vec![0; k];
        let mut suffix_max = vec![0; k];
        for i in 1..k {
            prefix_max[i] = prefix_max[i - 1].max(lens[i - 1]);
        }
        for i in (0..k.saturating_sub(1)).rev() {
            suffix_max[i] = suffix_max[i + 1].max(lens[i + 1]);
        }
        (0..k)
            .filter(|&i| prefix_max[i] > lens[i] && suffix_max[i] > lens[i])
            .map(|i| i + 1)
            .collect()
    }

    pub fn is_column_convex(&self) -> bool {
        (self.min_col..=self.max_col).all(|c| {
            let rows = self.column_rows(c);
            rows.windows(2).all(|w| w[1] == w[0] + 1)
        })
    }

    pub fn classify(&self) -> ShapeClass {
        if !self.rows_comparable() {
            return ShapeClass::General;
        }
        // Comparable rows of equal length coincide.
        debug_assert!(self
            .rows
            .iter()
            .enumerate()
            .all(|(i, a)| self.rows[i + 1..].iter().all(|b| a.len() != b.len() || a == b)));
        match self.exceptional_rows().as_slice() {
            [] => ShapeClass::Moon,
            [r] => ShapeClass::AlmostMoon { exceptional_row: *r },
            _ => ShapeClass::RowComparableOnly,
        }
    }

    /// Exchanges rows `i` and `i + 1`.
    pub fn swap_adjacent_rows(&self, i: usize) -> Result<Polyomino, PolyominoError> {
        if i == 0 || i >= self.rows.len() {
            return Err(PolyominoError::IndexOutOfRange {
                index: i,
                rows: self.rows.len(),
            });
        }
        let mut rows = self.rows.clone();
        rows.swap(i - 1, i);
        Polyomino::from_rows(rows)
    }

    /// Column `c` maps to `min_col + max_col - c`; the column range is kept.
    pub fn mirror_col(&self, col: usize) -> usize {
        self.min_col + self.max_col - col
    }

    /// Left-right reflection.
    pub fn mirror(&self) -> Polyomino {
        let rows = self
            .rows
            .iter()
            .map(|r| RowInterval {
                start: self.mirror_col(r.end),
                end: self.mirror_col(r.start),
            })
            .collect();
        Polyomino::from_rows(rows).expect("mirror of a valid shape")
    }

    /// Rotation by 180°: reverses the rows and mirrors the columns.
    pub fn rotate180(&self) -> Polyomino {
        let mut m = self.mirror();
        m.rows.reverse();
        Polyomino::from_rows(m.rows).expect("rotation of a valid shape")
    }

    /// Cell position under [`Polyomino::rotate180`].
    pub fn rotate_cell(&self, cell: Cell) -> Cell {
        Cell::new(self.rows.len() + 1 - cell.row, self.mirror_col(cell.col))
    }

    /// Exchanges rows and columns. Column `c` becomes row `c - min_col + 1`.
    pub fn transpose(&self) -> Result<Polyomino, PolyominoError> {
        if !self.is_column_convex() {
            return Err(PolyominoError::NotColumnConvex);
        }
        let rows = (self.min_col..=self.max_col)
            .map(|c| {
                let rs = self.column_rows(c);
                RowInterval {
                    start: rs[0],
                    end: *rs.last().unwrap(),
                }
            })
            .collect::<Vec<_>>();
        if rows.iter().any(|r| r.end > MAX_COLUMNS) {
            return Err(PolyominoError::TooWide(0));
        }
        Polyomino::from_rows(rows)
    }

    /// Cell position under [`Polyomino::transpose`].
    pub fn transpose_cell(&self, cell: Cell) -> Cell {
        Cell::new(cell.col + 1 - self.min_col, cell.row)
    }

    /// Every cell whose column lies in row `r`'s interval.
    pub fn column_strip(&self, r: usize) -> Result<Vec<Cell>, PolyominoError> {
        let strip = self.row(r)?;
        Ok(self.cells().filter(|c| strip.contains_col(c.col)).collect())
    }
}

impl fmt::Display for Polyomino {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            for c in 1..=self.max_col {
                f.write_str(if r.contains_col(c) { "#" } else { "." })?;
            }
        }
        Ok(())
    }
}

/// Every row-comparable polyomino with at most `max_rows` rows inside
/// columns `1..=max_cols`, ordered lexicographically by interval list.
pub fn comparable_shapes_within(max_rows: usize, max_cols: usize) -> Vec<Polyomino> {
    let max_cols = max_cols.min(MAX_COLUMNS);
    let intervals: Vec<RowInterval> = (1..=max_cols)
        .flat_map(|s| (s..=max_cols).map(move |e| RowInterval { start: s, end: e }))
        .collect();
    let mut out = Vec::new();
    let mut stack: Vec<RowInterval> = Vec::new();
    extend_comparable(&intervals, max_rows, &mut stack, &mut out);
    out.sort_by(|a, b| a.rows.cmp(&b.rows));
    out
}

fn extend_comparable(
    intervals: &[RowInterval],
    max_rows: usize,
    stack: &mut Vec<RowInterval>,
    out: &mut Vec<Polyomino>,
) {
    if !stack.is_empty() {
        out.push(Polyomino::from_rows(stack.clone()).unwrap());
    }
    if stack.len() == max_rows {
        return;
    }
    for iv in intervals {
        if stack.iter().all(|r| r.comparable(iv)) {
            stack.push(*iv);
            extend_comparable(intervals, max_rows, stack, out);
            stack.pop();
        }
    }
}

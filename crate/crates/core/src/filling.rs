//! 01-fillings and their enumeration.
//!
//! A filling stores one `u64` per row; bit `c - 1` is the content of column
//! `c`. Bits outside the row's interval are always clear.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::polyomino::{Cell, Polyomino};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FillingError {
    #[error("cell {0} is not in the polyomino")]
    CellOutsideShape(Cell),
    #[error("constraint vector has length {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("row {0} is too long to enumerate all of its subsets")]
    EnumerationTooLarge(usize),
    #[error("row mask count {found} does not match the {expected} rows of the shape")]
    RowCountMismatch { expected: usize, found: usize },
}

/// A polyomino with a 0/1 value in every cell.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Filling {
    shape: Arc<Polyomino>,
    rows: Vec<u64>,
}

impl Filling {
    pub fn empty(shape: impl Into<Arc<Polyomino>>) -> Self {
        let shape = shape.into();
        let rows = vec![0; shape.row_count()];
        Filling { shape, rows }
    }

    /// Filling whose 1-cells are exactly `ones`.
    pub fn from_cells<I>(shape: impl Into<Arc<Polyomino>>, ones: I) -> Result<Self, FillingError>
    where
        I: IntoIterator,
        I::Item: Into<Cell>,
    {
        let mut f = Filling::empty(shape);
        for cell in ones {
            let cell = cell.into();
            if !f.shape.contains(cell) {
                return Err(FillingError::CellOutsideShape(cell));
            }
            f.rows[cell.row - 1] |= 1 << (cell.col - 1);
        }
        Ok(f)
    }

    /// Filling from absolute-column row masks.
    pub fn from_row_masks(shape: impl Into<Arc<Polyomino>>, rows: Vec<u64>) -> Result<Self, FillingError> {
        let shape = shape.into();
        if rows.len() != shape.row_count() {
            return Err(FillingError::RowCountMismatch {
                expected: shape.row_count(),
                found: rows.len(),
            });
        }
        for (i, &m) in rows.iter().enumerate() {
            let outside = m & !shape.rows()[i].mask();
            if outside != 0 {
                let col = outside.trailing_zeros() as usize + 1;
                return Err(FillingError::CellOutsideShape(Cell::new(i + 1, col)));
            }
        }
        Ok(Filling { shape, rows })
    }

    pub(crate) fn from_parts_unchecked(shape: Arc<Polyomino>, rows: Vec<u64>) -> Self {
        debug_assert_eq!(rows.len(), shape.row_count());
        Filling { shape, rows }
    }

    pub fn shape(&self) -> &Polyomino {
        &self.shape
    }

    pub fn shape_arc(&self) -> &Arc<Polyomino> {
        &self.shape
    }

    /// Row `r` (1-based) as an absolute-column mask.
    pub fn row_mask(&self, r: usize) -> u64 {
        self.rows[r - 1]
    }

    pub fn row_masks(&self) -> &[u64] {
        &self.rows
    }

    pub fn get(&self, cell: Cell) -> bool {
        self.shape.contains(cell) && self.rows[cell.row - 1] >> (cell.col - 1) & 1 == 1
    }

    pub fn with(&self, cell: Cell, value: bool) -> Result<Filling, FillingError> {
        if !self.shape.contains(cell) {
            return Err(FillingError::CellOutsideShape(cell));
        }
        let mut out = self.clone();
        let bit = 1u64 << (cell.col - 1);
        if value {
            out.rows[cell.row - 1] |= bit;
        } else {
            out.rows[cell.row - 1] &= !bit;
        }
        Ok(out)
    }

    /// 1-cells in row-major order.
    pub fn ones(&self) -> Vec<Cell> {
        let mut out = Vec::with_capacity(self.count_ones());
        for (i, &m) in self.rows.iter().enumerate() {
            let mut m = m;
            while m != 0 {
                let c = m.trailing_zeros() as usize + 1;
                out.push(Cell::new(i + 1, c));
                m &= m - 1;
            }
        }
        out
    }

    pub fn count_ones(&self) -> usize {
        self.rows.iter().map(|m| m.count_ones() as usize).sum()
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.rows.iter().map(|m| m.count_ones() as usize).collect()
    }

    /// Column sums over `1..=ℓ`.
    pub fn col_sums(&self) -> Vec<usize> {
        let mut sums = vec![0; self.shape.width()];
        for &m in &self.rows {
            let mut m = m;
            while m != 0 {
                sums[m.trailing_zeros() as usize] += 1;
                m &= m - 1;
            }
        }
        sums
    }

    /// Bit `i` set iff the `i`-th cell in row-major order is a 1-cell.
    /// Only meaningful for shapes with at most 64 cells.
    pub fn index_mask(&self) -> u64 {
        debug_assert!(self.shape.cell_count() <= 64);
        let mut out = 0u64;
        for (i, &m) in self.rows.iter().enumerate() {
            let r = self.shape.rows()[i];
            out |= (m >> (r.start() - 1)) << self.shape.row_offset(i + 1);
        }
        out
    }

    /// Inverse of [`Filling::index_mask`].
    pub fn from_index_mask(shape: &Arc<Polyomino>, mask: u64) -> Filling {
        let rows = shape
            .rows()
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let chunk = mask >> shape.row_offset(i + 1);
                let len_mask = if r.len() == 64 { u64::MAX } else { (1u64 << r.len()) - 1 };
                (chunk & len_mask) << (r.start() - 1)
            })
            .collect();
        Filling::from_parts_unchecked(shape.clone(), rows)
    }

    /// Left-right reflection of shape and filling.
    pub fn mirror(&self) -> Filling {
        let shape = Arc::new(self.shape.mirror());
        let rows = self.rows.iter().map(|&m| self.mirror_mask(m)).collect();
        Filling { shape, rows }
    }

    fn mirror_mask(&self, m: u64) -> u64 {
        let mut out = 0;
        let mut m = m;
        while m != 0 {
            let c = m.trailing_zeros() as usize + 1;
            out |= 1 << (self.shape.mirror_col(c) - 1);
            m &= m - 1;
        }
        out
    }

    pub fn rotate180(&self) -> Filling {
        let shape = Arc::new(self.shape.rotate180());
        let rows = self.rows.iter().rev().map(|&m| self.mirror_mask(m)).collect();
        Filling { shape, rows }
    }

    /// Transpose of shape and filling; requires a column-convex shape.
    pub fn transpose(&self) -> Result<Filling, crate::polyomino::PolyominoError> {
        let shape = Arc::new(self.shape.transpose()?);
        let ones = self.ones().into_iter().map(|c| self.shape.transpose_cell(c));
        Ok(Filling::from_cells(shape, ones).expect("transposed cells lie in the transposed shape"))
    }
}

impl fmt::Debug for Filling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Filling(\n{self}\n)")
    }
}

impl fmt::Display for Filling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.shape.width();
        for (i, r) in self.shape.rows().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            for c in 1..=width {
                let ch = if !r.contains_col(c) {
                    '.'
                } else if self.rows[i] >> (c - 1) & 1 == 1 {
                    '1'
                } else {
                    '0'
                };
                write!(f, "{ch}")?;
            }
        }
        Ok(())
    }
}

/// Which fillings to enumerate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FillConstraint {
    /// Exactly `n` 1-cells.
    TotalOnes(usize),
    /// Column sums over `1..=ℓ`, arbitrary row sums.
    ColSums(Vec<usize>),
    RowColSums {
        rows: Vec<usize>,
        cols: Vec<usize>,
    },
    /// Every row sum and every column sum equals 1.
    Restricted,
    All,
}

/// Largest row enumerated subset-by-subset when its row sum is free.
const MAX_FREE_ROW: usize = 24;

/// Enumerates the fillings of `shape` that satisfy `constraint`, each exactly
/// once, in a fixed row-major backtracking order.
pub fn enumerate(shape: impl Into<Arc<Polyomino>>, constraint: &FillConstraint) -> Result<Fillings, FillingError> {
    let shape = shape.into();
    let k = shape.row_count();
    let l = shape.width();
    let check_len = |v: &Vec<usize>, expected: usize| {
        if v.len() != expected {
            Err(FillingError::DimensionMismatch {
                expected,
                found: v.len(),
            })
        } else {
            Ok(())
        }
    };
    let (row_sums, col_sums, total) = match constraint {
        FillConstraint::All => (None, None, None),
        FillConstraint::TotalOnes(n) => (None, None, Some(*n)),
        FillConstraint::ColSums(c) => {
            check_len(c, l)?;
            (None, Some(c.clone()), None)
        }
        FillConstraint::RowColSums { rows, cols } => {
            check_len(rows, k)?;
            check_len(cols, l)?;
            (Some(rows.clone()), Some(cols.clone()), None)
        }
        FillConstraint::Restricted => (Some(vec![1; k]), Some(vec![1; l]), None),
    };
    let options = shape
        .rows()
        .iter()
        .enumerate()
        .map(|(i, r)| match &row_sums {
            Some(rs) => Ok(subsets_of_size(r.start(), r.len(), rs[i])),
            None if r.len() > MAX_FREE_ROW => Err(FillingError::EnumerationTooLarge(i + 1)),
            None => Ok(all_subsets(r.start(), r.len())),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Fillings::new(shape, options, col_sums, total, None))
}

/// Fillings with at most one 1 in every row.
pub fn enumerate_sparse_rows(shape: impl Into<Arc<Polyomino>>) -> Fillings {
    let shape = shape.into();
    let options = shape
        .rows()
        .iter()
        .map(|r| std::iter::once(0).chain(r.columns().map(|c| 1u64 << (c - 1))).collect())
        .collect();
    Fillings::new(shape, options, None, None, None)
}

/// Fillings with at most `max_ones` 1-cells.
pub fn enumerate_at_most(shape: impl Into<Arc<Polyomino>>, max_ones: usize) -> Result<Fillings, FillingError> {
    let shape = shape.into();
    let options = shape
        .rows()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            if r.len() > MAX_FREE_ROW {
                Err(FillingError::EnumerationTooLarge(i + 1))
            } else {
                Ok(all_subsets(r.start(), r.len()))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Fillings::new(shape, options, None, None, Some(max_ones)))
}

fn all_subsets(start: usize, len: usize) -> Vec<u64> {
    (0..1u64 << len).map(|m| m << (start - 1)).collect()
}

fn subsets_of_size(start: usize, len: usize, size: usize) -> Vec<u64> {
    let mut out = Vec::new();
    if size > len {
        return out;
    }
    // Gosper's hack over `len` bits, ascending.
    if size == 0 {
        out.push(0);
        return out;
    }
    let limit: u128 = 1u128 << len;
    let mut m: u128 = (1u128 << size) - 1;
    while m < limit {
        out.push((m as u64) << (start - 1));
        let c = m & m.wrapping_neg();
        let r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
    }
    out
}

/// Lazy backtracking enumerator: one option (a row mask) is chosen per row,
/// top to bottom, with pruning on column sums and 1-counts.
pub struct Fillings {
    shape: Arc<Polyomino>,
    options: Vec<Vec<u64>>,
    col_target: Option<Vec<usize>>,
    total_target: Option<usize>,
    total_max: Option<usize>,
    /// `col_capacity[d][c]` = rows strictly below depth `d` covering column `c + 1`.
    col_capacity: Vec<Vec<usize>>,
    /// Largest number of ones the rows strictly below depth `d` can hold.
    ones_capacity: Vec<usize>,
    choice: Vec<usize>,
    col_used: Vec<usize>,
    ones_used: usize,
    depth: usize,
    finished: bool,
}

impl Fillings {
    fn new(
        shape: Arc<Polyomino>,
        options: Vec<Vec<u64>>,
        col_target: Option<Vec<usize>>,
        total_target: Option<usize>,
        total_max: Option<usize>,
    ) -> Self {
        let k = shape.row_count();
        let l = shape.width();
        let mut col_capacity = vec![vec![0; l]; k];
        let mut ones_capacity = vec![0; k];
        for d in (0..k.saturating_sub(1)).rev() {
            col_capacity[d] = col_capacity[d + 1].clone();
            let below = &options[d + 1];
            let union = below.iter().fold(0u64, |a, &m| a | m);
            for (c, cap) in col_capacity[d].iter_mut().enumerate() {
                if union >> c & 1 == 1 {
                    *cap += 1;
                }
            }
            let most = below.iter().map(|m| m.count_ones() as usize).max().unwrap_or(0);
            ones_capacity[d] = ones_capacity[d + 1] + most;
        }
        Fillings {
            finished: options.iter().any(Vec::is_empty),
            shape,
            options,
            col_target,
            total_target,
            total_max,
            col_capacity,
            ones_capacity,
            choice: vec![0; k],
            col_used: vec![0; l],
            ones_used: 0,
            depth: 0,
        }
    }

    fn apply(&mut self, mask: u64, sign: bool) {
        let mut m = mask;
        while m != 0 {
            let c = m.trailing_zeros() as usize;
            if sign {
                self.col_used[c] += 1;
            } else {
                self.col_used[c] -= 1;
            }
            m &= m - 1;
        }
        let n = mask.count_ones() as usize;
        if sign {
            self.ones_used += n;
        } else {
            self.ones_used -= n;
        }
    }

    /// Whether the partial assignment through depth `d` can still complete.
    fn feasible(&self, d: usize) -> bool {
        if let Some(max) = self.total_max {
            if self.ones_used > max {
                return false;
            }
        }
        if let Some(n) = self.total_target {
            if self.ones_used > n || self.ones_used + self.ones_capacity[d] < n {
                return false;
            }
        }
        if let Some(target) = &self.col_target {
            let cap = &self.col_capacity[d];
            for (c, &t) in target.iter().enumerate() {
                let used = self.col_used[c];
                if used > t || used + cap[c] < t {
                    return false;
                }
            }
        }
        true
    }

    fn pop_and_advance(&mut self) {
        self.depth -= 1;
        let d = self.depth;
        let mask = self.options[d][self.choice[d]];
        self.apply(mask, false);
        self.choice[d] += 1;
    }
}

impl Iterator for Fillings {
    type Item = Filling;

    fn next(&mut self) -> Option<Filling> {
        if self.finished {
            return None;
        }
        let k = self.options.len();
        loop {
            if self.depth == k {
                let rows = (0..k).map(|d| self.options[d][self.choice[d]]).collect();
                let out = Filling::from_parts_unchecked(self.shape.clone(), rows);
                self.pop_and_advance();
                return Some(out);
            }
            let d = self.depth;
            let mut placed = false;
            while self.choice[d] < self.options[d].len() {
                let mask = self.options[d][self.choice[d]];
                self.apply(mask, true);
                if self.feasible(d) {
                    placed = true;
                    break;
                }
                self.apply(mask, false);
                self.choice[d] += 1;
            }
            if placed {
                self.depth += 1;
                if self.depth < k {
                    self.choice[self.depth] = 0;
                }
            } else if d == 0 {
                self.finished = true;
                return None;
            } else {
                self.pop_and_advance();
            }
        }
    }
}

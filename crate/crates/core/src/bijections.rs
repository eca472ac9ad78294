//! The row-swap map `f`, the chain-preserving bijection `φ`, and the
//! coupling bijection `ψ` between fillings of two polyominoes that differ by
//! one interchange of adjacent rows.
//!
//! Notation for a swap of rows `i`, `i+1`: `R_s` is the shorter row, `R_l`
//! the longer one. The filling of `R_s` is `α`; the filling of `R_l` splits
//! into the left flank `γ`, the part `β` over the columns of `R_s`, and the
//! right flank `δ`.

use std::fmt;
use std::ops::RangeInclusive;
use std::sync::Arc;

use thiserror::Error;

use crate::chains::{ChainCounter, Direction, Search};
use crate::filling::Filling;
use crate::polyomino::{Cell, Polyomino, PolyominoError, RowInterval};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BijectionError {
    #[error("filling does not fill the context's source shape")]
    ShapeMismatch,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("filling is not in case II")]
    NotCaseII,
    #[error("internal assertion failed: {0}")]
    InternalAssertion(String),
    #[error("row {row} has {sum} ones; at most one is allowed")]
    RowSumTooLarge { row: usize, sum: usize },
    #[error(transparent)]
    Shape(#[from] PolyominoError),
}

/// A validated adjacent-row swap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwapContext {
    source: Arc<Polyomino>,
    target: Arc<Polyomino>,
    i: usize,
    s_row: usize,
    l_row: usize,
    short: RowInterval,
    long: RowInterval,
}

/// Builds the context for swapping rows `i` and `i + 1` of `shape`.
///
/// Both the shape and its image must have comparable rows and at most one
/// exceptional row, and that row must be one of the two swapped rows.
pub fn make_swap_context(shape: impl Into<Arc<Polyomino>>, i: usize) -> Result<SwapContext, BijectionError> {
    let source: Arc<Polyomino> = shape.into();
    let target = Arc::new(source.swap_adjacent_rows(i)?);
    for (name, p) in [("source", &source), ("target", &target)] {
        if !p.rows_comparable() {
            return Err(BijectionError::PreconditionViolated(format!(
                "{name} shape has incomparable rows"
            )));
        }
        let exceptional = p.exceptional_rows();
        if exceptional.len() > 1 {
            return Err(BijectionError::PreconditionViolated(format!(
                "{name} shape has exceptional rows {exceptional:?}"
            )));
        }
        if let Some(&r) = exceptional.iter().find(|&&r| r != i && r != i + 1) {
            return Err(BijectionError::PreconditionViolated(format!(
                "{name} shape has exceptional row {r} outside the swapped pair"
            )));
        }
    }
    let (a, b) = (source.row_unchecked(i), source.row_unchecked(i + 1));
    let (s_row, l_row) = if a.len() <= b.len() { (i, i + 1) } else { (i + 1, i) };
    let (short, long) = (source.row_unchecked(s_row), source.row_unchecked(l_row));
    Ok(SwapContext {
        source,
        target,
        i,
        s_row,
        l_row,
        short,
        long,
    })
}

impl SwapContext {
    pub fn source(&self) -> &Arc<Polyomino> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Polyomino> {
        &self.target
    }

    pub fn index(&self) -> usize {
        self.i
    }

    /// Row of `R_s` in the source shape.
    pub fn s_row(&self) -> usize {
        self.s_row
    }

    /// Row of `R_l` in the source shape.
    pub fn l_row(&self) -> usize {
        self.l_row
    }

    /// Equal-length rows: source and target coincide and every map is the identity.
    pub fn is_trivial(&self) -> bool {
        self.short.len() == self.long.len()
    }

    /// Columns of `R_s`, which carry both `α` and `β`.
    pub fn alpha_cols(&self) -> RangeInclusive<usize> {
        self.short.columns()
    }

    pub fn gamma_cols(&self) -> RangeInclusive<usize> {
        self.long.start()..=self.short.start() - 1
    }

    pub fn delta_cols(&self) -> RangeInclusive<usize> {
        self.short.end() + 1..=self.long.end()
    }

    /// Cells of the source shape in the columns of `R_s`.
    pub fn strip(&self) -> Vec<Cell> {
        self.source.column_strip(self.s_row).expect("row index validated")
    }

    /// The context for swapping back.
    pub fn reverse(&self) -> SwapContext {
        make_swap_context(self.target.clone(), self.i).expect("the reverse of a valid context is valid")
    }

    fn overlap(&self) -> u64 {
        self.short.mask()
    }

    fn check(&self, m: &Filling) -> Result<(), BijectionError> {
        if m.shape() != &*self.source {
            return Err(BijectionError::ShapeMismatch);
        }
        Ok(())
    }

    /// Row of the long row in the target shape (where `R_s` used to be).
    fn target_long_row(&self) -> usize {
        self.s_row
    }

    fn target_short_row(&self) -> usize {
        self.l_row
    }
}

impl fmt::Display for SwapContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "swap rows {} and {} (R_s = row {}, R_l = row {})",
            self.i,
            self.i + 1,
            self.s_row,
            self.l_row
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseLabel {
    /// `ne(f(M)) = ne(M)`
    I,
    /// `ne(f(M)) = ne(M) + 1`
    II,
    /// `ne(f(M)) = ne(M) - 1`
    III,
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseLabel::I => "I",
            CaseLabel::II => "II",
            CaseLabel::III => "III",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemCellReport {
    /// `ne` of the source filling.
    pub k: usize,
    /// 1-cells of the long row of `f(M)` lying on a `(k+1)`-chain.
    pub problem_cells: Vec<Cell>,
    /// The cells of the short row of `f(M)` in the same columns.
    pub landing_cells: Vec<Cell>,
}

fn ones_in(mask: u64) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let c = m.trailing_zeros() as usize + 1;
            m &= m - 1;
            c
        })
    })
}

/// Replaces rows `i`, `i+1` of `m`'s row masks and re-homes them on `shape`.
fn rebuild(m: &Filling, shape: &Arc<Polyomino>, i: usize, upper: u64, lower: u64) -> Filling {
    let mut rows = m.row_masks().to_vec();
    rows[i - 1] = upper;
    rows[i] = lower;
    Filling::from_parts_unchecked(shape.clone(), rows)
}

/// The map `f`: the long row of the image is `γ·α·δ`, the short row is `β`.
pub fn f_map(ctx: &SwapContext, m: &Filling) -> Result<Filling, BijectionError> {
    ctx.check(m)?;
    Ok(f_unchecked(ctx, m))
}

fn f_unchecked(ctx: &SwapContext, m: &Filling) -> Filling {
    if ctx.is_trivial() {
        return m.clone();
    }
    let overlap = ctx.overlap();
    let short = m.row_mask(ctx.s_row);
    let long = m.row_mask(ctx.l_row);
    let new_long = (long & !overlap) | (short & overlap);
    let new_short = long & overlap;
    let (upper, lower) = if ctx.target_long_row() == ctx.i {
        (new_long, new_short)
    } else {
        (new_short, new_long)
    };
    rebuild(m, &ctx.target, ctx.i, upper, lower)
}

pub fn case_label(ctx: &SwapContext, m: &Filling) -> Result<CaseLabel, BijectionError> {
    case_label_with(ctx, m, &Search)
}

pub fn case_label_with(
    ctx: &SwapContext,
    m: &Filling,
    counter: &dyn ChainCounter,
) -> Result<CaseLabel, BijectionError> {
    ctx.check(m)?;
    let image = f_unchecked(ctx, m);
    label_from(counter.ne(m), counter.ne(&image))
}

fn label_from(before: usize, after: usize) -> Result<CaseLabel, BijectionError> {
    match after as isize - before as isize {
        0 => Ok(CaseLabel::I),
        1 => Ok(CaseLabel::II),
        -1 => Ok(CaseLabel::III),
        _ => Err(BijectionError::InternalAssertion(format!(
            "ne changed from {before} to {after} under f"
        ))),
    }
}

pub fn problem_cells(ctx: &SwapContext, m: &Filling) -> Result<ProblemCellReport, BijectionError> {
    problem_cells_with(ctx, m, &Search)
}

pub fn problem_cells_with(
    ctx: &SwapContext,
    m: &Filling,
    counter: &dyn ChainCounter,
) -> Result<ProblemCellReport, BijectionError> {
    ctx.check(m)?;
    let image = f_unchecked(ctx, m);
    let k = counter.ne(m);
    if counter.ne(&image) != k + 1 {
        return Err(BijectionError::NotCaseII);
    }
    problem_report(ctx, &image, k, counter)
}

fn problem_report(
    ctx: &SwapContext,
    image: &Filling,
    k: usize,
    counter: &dyn ChainCounter,
) -> Result<ProblemCellReport, BijectionError> {
    let long_row = ctx.target_long_row();
    let short_row = ctx.target_short_row();
    let mut problem = Vec::new();
    let mut landing = Vec::new();
    for col in ones_in(image.row_mask(long_row)) {
        let cell = Cell::new(long_row, col);
        if counter.longest_through(image, cell, Direction::Ne) != k + 1 {
            continue;
        }
        if !ctx.short.contains_col(col) {
            return Err(BijectionError::InternalAssertion(format!(
                "problem cell {cell} lies outside α"
            )));
        }
        let land = Cell::new(short_row, col);
        if image.get(land) {
            return Err(BijectionError::InternalAssertion(format!(
                "landing cell {land} is a 1-cell"
            )));
        }
        problem.push(cell);
        landing.push(land);
    }
    if problem.is_empty() {
        return Err(BijectionError::InternalAssertion(
            "case II filling without problem cells".into(),
        ));
    }
    Ok(ProblemCellReport {
        k,
        problem_cells: problem,
        landing_cells: landing,
    })
}

/// The bijection `φ` from fillings of the source shape to fillings of the
/// target shape, preserving `ne` and column sums.
pub fn phi(ctx: &SwapContext, m: &Filling) -> Result<Filling, BijectionError> {
    phi_with(ctx, m, &Search)
}

pub fn phi_with(ctx: &SwapContext, m: &Filling, counter: &dyn ChainCounter) -> Result<Filling, BijectionError> {
    ctx.check(m)?;
    if ctx.is_trivial() {
        return Ok(m.clone());
    }
    let k = counter.ne(m);
    let out = phi_inner(ctx, m, k, counter, true)?;
    if counter.ne(&out) != k {
        return Err(BijectionError::InternalAssertion(format!(
            "φ changed ne from {k} to {}",
            counter.ne(&out)
        )));
    }
    if !same_col_sums(ctx, m, &out) {
        return Err(BijectionError::InternalAssertion("φ changed column sums".into()));
    }
    Ok(out)
}

fn phi_inner(
    ctx: &SwapContext,
    m: &Filling,
    k: usize,
    counter: &dyn ChainCounter,
    outer: bool,
) -> Result<Filling, BijectionError> {
    let image = f_unchecked(ctx, m);
    let k_image = counter.ne(&image);
    match label_from(k, k_image)? {
        CaseLabel::I => Ok(image),
        CaseLabel::II => {
            let report = problem_report(ctx, &image, k, counter)?;
            let mut rows = image.row_masks().to_vec();
            for (p, l) in report.problem_cells.iter().zip(&report.landing_cells) {
                rows[p.row - 1] &= !(1u64 << (p.col - 1));
                rows[l.row - 1] |= 1u64 << (l.col - 1);
            }
            Ok(Filling::from_parts_unchecked(ctx.target.clone(), rows))
        }
        CaseLabel::III => {
            if !outer {
                return Err(BijectionError::InternalAssertion("nested case III".into()));
            }
            let back = ctx.reverse();
            // f(M) is a case II filling for the reverse swap.
            let inner = phi_inner(&back, &image, k_image, counter, false)?;
            if label_from(k_image, counter.ne(&f_unchecked(&back, &image)))? != CaseLabel::II {
                return Err(BijectionError::InternalAssertion("inner φ is not case II".into()));
            }
            Ok(f_unchecked(ctx, &inner))
        }
    }
}

/// Column sums agree; the maps only ever touch rows `i` and `i+1`.
fn same_col_sums(ctx: &SwapContext, a: &Filling, b: &Filling) -> bool {
    let i = ctx.i;
    let (a1, a2, b1, b2) = (a.row_mask(i), a.row_mask(i + 1), b.row_mask(i), b.row_mask(i + 1));
    let untouched = a
        .row_masks()
        .iter()
        .zip(b.row_masks())
        .enumerate()
        .all(|(r, (x, y))| r + 1 == i || r == i || x == y);
    untouched && a1 & a2 == b1 & b2 && a1 ^ a2 == b1 ^ b2
}

/// Checks the row-sum bound of the coupling regime on the listed rows.
fn check_row_sums(m: &Filling, rows: impl IntoIterator<Item = usize>) -> Result<(), BijectionError> {
    for row in rows {
        let sum = m.row_mask(row).count_ones() as usize;
        if sum > 1 {
            return Err(BijectionError::RowSumTooLarge { row, sum });
        }
    }
    Ok(())
}

/// The coupling filling `M′`: `α` and `β` exchanged. Requires row sums of
/// `R_s` and `R_l` at most one.
pub fn coupling(ctx: &SwapContext, m: &Filling) -> Result<Filling, BijectionError> {
    ctx.check(m)?;
    check_row_sums(m, [ctx.s_row, ctx.l_row])?;
    Ok(exchange_unchecked(ctx, m))
}

/// The `α`/`β` exchange without the row-sum bound.
pub fn exchange_segments(ctx: &SwapContext, m: &Filling) -> Result<Filling, BijectionError> {
    ctx.check(m)?;
    Ok(exchange_unchecked(ctx, m))
}

fn exchange_unchecked(ctx: &SwapContext, m: &Filling) -> Filling {
    let overlap = ctx.overlap();
    let short = m.row_mask(ctx.s_row);
    let long = m.row_mask(ctx.l_row);
    let new_short = long & overlap;
    let new_long = (long & !overlap) | short;
    let (upper, lower) = if ctx.s_row == ctx.i {
        (new_short, new_long)
    } else {
        (new_long, new_short)
    };
    rebuild(m, &ctx.source, ctx.i, upper, lower)
}

/// A coupling for unrestricted row sums: over the columns of `R_s` where
/// `α` or `β` has a 1, the sequence of column patterns is reversed.
pub fn reversal_coupling(ctx: &SwapContext, m: &Filling) -> Result<Filling, BijectionError> {
    ctx.check(m)?;
    let short = m.row_mask(ctx.s_row);
    let long = m.row_mask(ctx.l_row);
    let overlap = ctx.overlap();
    let cols: Vec<usize> = ones_in((short | long) & overlap).collect();
    let bit = |mask: u64, c: usize| mask >> (c - 1) & 1;
    let mut new_short = 0;
    let mut new_long = long & !overlap;
    for (&to, &from) in cols.iter().zip(cols.iter().rev()) {
        new_short |= bit(short, from) << (to - 1);
        new_long |= bit(long, from) << (to - 1);
    }
    let (upper, lower) = if ctx.s_row == ctx.i {
        (new_short, new_long)
    } else {
        (new_long, new_short)
    };
    Ok(rebuild(m, &ctx.source, ctx.i, upper, lower))
}

/// Rows `i`, `i+1` exchanged together with their fillings.
pub fn swap_with_fillings(ctx: &SwapContext, m: &Filling) -> Result<Filling, BijectionError> {
    ctx.check(m)?;
    Ok(rebuild(m, &ctx.target, ctx.i, m.row_mask(ctx.i + 1), m.row_mask(ctx.i)))
}

/// The bijection `ψ` for fillings whose row sums are all at most one.
/// Preserves `ne` and column sums and exchanges row sums `i`, `i+1`.
pub fn psi(ctx: &SwapContext, m: &Filling) -> Result<Filling, BijectionError> {
    psi_with(ctx, m, &Search)
}

pub fn psi_with(ctx: &SwapContext, m: &Filling, counter: &dyn ChainCounter) -> Result<Filling, BijectionError> {
    ctx.check(m)?;
    check_row_sums(m, 1..=ctx.source.row_count())?;
    let alpha = m.row_mask(ctx.s_row);
    let beta = m.row_mask(ctx.l_row) & ctx.overlap();
    let n = rebuild(m, &ctx.target, ctx.i, m.row_mask(ctx.i + 1), m.row_mask(ctx.i));
    let k = counter.ne(m);
    let out = if alpha == 0 || beta == 0 || alpha == beta || counter.ne(&n) == k {
        n
    } else {
        f_unchecked(ctx, m)
    };
    if counter.ne(&out) != k {
        return Err(BijectionError::InternalAssertion(format!(
            "ψ changed ne from {k} to {}",
            counter.ne(&out)
        )));
    }
    if !same_col_sums(ctx, m, &out) {
        return Err(BijectionError::InternalAssertion("ψ changed column sums".into()));
    }
    let mut expected = m.row_sums();
    expected.swap(ctx.i - 1, ctx.i);
    if out.row_sums() != expected {
        return Err(BijectionError::InternalAssertion(
            "ψ did not exchange the row sums".into(),
        ));
    }
    Ok(out)
}

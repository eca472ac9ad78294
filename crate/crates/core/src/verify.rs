//! Exhaustive property checks on a single shape, and sweeps over every
//! row-comparable shape in a bounding box.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::bijections::{
    case_label_with, coupling, exchange_segments, f_map, make_swap_context, phi_with, psi_with, BijectionError,
    SwapContext,
};
use crate::chains::{
    brute_force_longest, compatible, is_valid_chain, longest, ChainCounter, Direction, GridOracleTable, Search,
    ShapeTables, MAX_TABLE_CELLS,
};
use crate::distribution::{composed_phi_with, composed_psi_with, ferrers_route, sort_path};
use crate::filling::{enumerate, enumerate_at_most, enumerate_sparse_rows, FillConstraint, Filling, FillingError};
use crate::polyomino::{comparable_shapes_within, Cell, Polyomino, ShapeClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Property {
    /// `f` followed by the reverse `f` is the identity.
    FInvolution,
    /// `|ne(f(M)) - ne(M)| <= 1`.
    DeltaNeBound,
    /// `φ` preserves `ne`, column sums and case labels, and is inverted by the reverse `φ`.
    Theorem1,
    /// `ψ` preserves `ne` and column sums, exchanges row sums, and is inverted by the reverse `ψ`.
    Theorem2,
    /// `{ne(M), ne(M′)} = {ne(N), ne(N′)}` for the coupling filling `M′`.
    CouplingLemma,
    /// `ne` distributions agree after carrying fillings to the sorted and Ferrers shapes with `φ`.
    Corollary1Distribution,
    /// `ne` distributions agree, with permuted row sums, along the sorting path with `ψ`.
    Corollary2Distribution,
    /// The `ne` distribution over fillings with `n` ones matches the Ferrers shape with the same column lengths.
    ColumnMultisetInvariance,
    /// Pairwise compatibility matches the full grid condition, and chain search matches the grid oracle.
    PairwiseGrid,
    /// Rotation by 180° preserves `ne` and `se` and commutes with `f`, `φ` and `ψ`.
    Rotate180Invariance,
}

impl Property {
    pub const ALL: [Property; 10] = [
        Property::FInvolution,
        Property::DeltaNeBound,
        Property::Theorem1,
        Property::Theorem2,
        Property::CouplingLemma,
        Property::Corollary1Distribution,
        Property::Corollary2Distribution,
        Property::ColumnMultisetInvariance,
        Property::PairwiseGrid,
        Property::Rotate180Invariance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::FInvolution => "f-involution",
            Property::DeltaNeBound => "delta-ne-bound",
            Property::Theorem1 => "theorem1",
            Property::Theorem2 => "theorem2",
            Property::CouplingLemma => "coupling-lemma",
            Property::Corollary1Distribution => "corollary1-distribution",
            Property::Corollary2Distribution => "corollary2-distribution",
            Property::ColumnMultisetInvariance => "column-multiset-invariance",
            Property::PairwiseGrid => "pairwise-grid",
            Property::Rotate180Invariance => "rotate180-invariance",
        }
    }

    /// Whether the property needs a swap index.
    pub fn needs_swap(self) -> bool {
        matches!(
            self,
            Property::FInvolution
                | Property::DeltaNeBound
                | Property::Theorem1
                | Property::Theorem2
                | Property::CouplingLemma
        )
    }

    /// Whether sweeps run the property once per swap rather than once per shape.
    pub fn per_swap(self) -> bool {
        self.needs_swap() || self == Property::Rotate180Invariance
    }

    /// Whether the property lives in the regime of row sums at most one.
    pub fn sparse_rows(self) -> bool {
        matches!(
            self,
            Property::Theorem2 | Property::CouplingLemma | Property::Corollary2Distribution
        )
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown property {0:?}")]
pub struct UnknownProperty(pub String);

impl FromStr for Property {
    type Err = UnknownProperty;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Property::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| UnknownProperty(s.to_string()))
    }
}

/// The fillings a property is checked over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FillingClass {
    All,
    Constraint(FillConstraint),
    Single(Filling),
    /// Every row sum at most one.
    SparseRows,
    /// Every row sum at most one and at most `n` ones in total.
    SparseRowsAtMost(usize),
    AtMostOnes(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyParams {
    /// Row index `i` of the swap, for per-swap properties.
    pub swap: Option<usize>,
    pub class: FillingClass,
    /// For the coupling lemma: exchange segments even when rows hold several ones.
    pub relaxed: bool,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            swap: None,
            class: FillingClass::All,
            relaxed: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error(transparent)]
    Filling(#[from] FillingError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Report {
    Pass { checked: u64 },
    Fail { message: String, witnesses: Vec<Filling> },
}

impl Report {
    pub fn passed(&self) -> bool {
        matches!(self, Report::Pass { .. })
    }
}

enum Halt {
    Fail(String, Vec<Filling>),
    Error(VerifyError),
}

impl From<VerifyError> for Halt {
    fn from(e: VerifyError) -> Self {
        Halt::Error(e)
    }
}

impl From<FillingError> for Halt {
    fn from(e: FillingError) -> Self {
        Halt::Error(e.into())
    }
}

fn precondition(msg: impl Into<String>) -> Halt {
    Halt::Error(VerifyError::PreconditionViolated(msg.into()))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String, witnesses: impl FnOnce() -> Vec<Filling>) -> Result<(), Halt> {
    if ok {
        Ok(())
    } else {
        Err(Halt::Fail(msg(), witnesses()))
    }
}

/// Bijection errors: precondition breaches abort, anything else is a
/// counterexample at `m`.
fn bij(m: &Filling) -> impl Fn(BijectionError) -> Halt + '_ {
    move |e| match e {
        BijectionError::PreconditionViolated(s) => precondition(s),
        BijectionError::RowSumTooLarge { .. } | BijectionError::Shape(_) => precondition(e.to_string()),
        other => Halt::Fail(other.to_string(), vec![m.clone()]),
    }
}

type Stream = Box<dyn Iterator<Item = Filling>>;

fn class_fillings(shape: &Arc<Polyomino>, class: &FillingClass) -> Result<Stream, Halt> {
    Ok(match class {
        FillingClass::All => Box::new(enumerate(shape.clone(), &FillConstraint::All)?),
        FillingClass::Constraint(c) => Box::new(enumerate(shape.clone(), c)?),
        FillingClass::Single(f) => {
            if f.shape() != &**shape {
                return Err(precondition("the filling does not fill the shape"));
            }
            Box::new(std::iter::once(f.clone()))
        }
        FillingClass::SparseRows => Box::new(enumerate_sparse_rows(shape.clone())),
        FillingClass::SparseRowsAtMost(n) => {
            let n = *n;
            Box::new(enumerate_sparse_rows(shape.clone()).filter(move |f| f.count_ones() <= n))
        }
        FillingClass::AtMostOnes(n) => Box::new(enumerate_at_most(shape.clone(), *n)?),
    })
}

fn for_each(fillings: Stream, mut check: impl FnMut(&Filling) -> Result<(), Halt>) -> Result<u64, Halt> {
    let mut checked = 0;
    for m in fillings {
        check(&m)?;
        checked += 1;
    }
    Ok(checked)
}

fn swap_context(shape: &Arc<Polyomino>, params: &VerifyParams) -> Result<SwapContext, Halt> {
    let i = params
        .swap
        .ok_or_else(|| precondition("this property needs a swap index"))?;
    make_swap_context(shape.clone(), i).map_err(|e| precondition(e.to_string()))
}

/// Exhaustively checks `property` on `shape` with direct chain search.
pub fn verify(property: Property, shape: &Arc<Polyomino>, params: &VerifyParams) -> Result<Report, VerifyError> {
    verify_with(property, shape, params, &Search)
}

pub fn verify_with(
    property: Property,
    shape: &Arc<Polyomino>,
    params: &VerifyParams,
    counter: &dyn ChainCounter,
) -> Result<Report, VerifyError> {
    let outcome = match property {
        Property::FInvolution => f_involution(shape, params),
        Property::DeltaNeBound => delta_ne_bound(shape, params, counter),
        Property::Theorem1 => theorem1(shape, params, counter),
        Property::Theorem2 => theorem2(shape, params, counter),
        Property::CouplingLemma => coupling_lemma(shape, params, counter),
        Property::Corollary1Distribution => corollary1(shape, params, counter),
        Property::Corollary2Distribution => corollary2(shape, params, counter),
        Property::ColumnMultisetInvariance => column_multiset(shape, params, counter),
        Property::PairwiseGrid => pairwise_grid(shape, params, counter),
        Property::Rotate180Invariance => rotate180(shape, params, counter),
    };
    match outcome {
        Ok(checked) => Ok(Report::Pass { checked }),
        Err(Halt::Fail(message, witnesses)) => Ok(Report::Fail { message, witnesses }),
        Err(Halt::Error(e)) => Err(e),
    }
}

fn f_involution(shape: &Arc<Polyomino>, params: &VerifyParams) -> Result<u64, Halt> {
    let ctx = swap_context(shape, params)?;
    let back = ctx.reverse();
    for_each(class_fillings(shape, &params.class)?, |m| {
        let n = f_map(&ctx, m).map_err(bij(m))?;
        let again = f_map(&back, &n).map_err(bij(m))?;
        ensure(
            &again == m,
            || "f is not inverted by the reverse f".into(),
            || vec![m.clone(), n, again],
        )
    })
}

fn delta_ne_bound(shape: &Arc<Polyomino>, params: &VerifyParams, c: &dyn ChainCounter) -> Result<u64, Halt> {
    let ctx = swap_context(shape, params)?;
    for_each(class_fillings(shape, &params.class)?, |m| {
        let n = f_map(&ctx, m).map_err(bij(m))?;
        let (a, b) = (c.ne(m), c.ne(&n));
        ensure(
            a.abs_diff(b) <= 1,
            || format!("ne(M)={a} ne(f(M))={b}"),
            || vec![m.clone(), n],
        )
    })
}

fn theorem1(shape: &Arc<Polyomino>, params: &VerifyParams, c: &dyn ChainCounter) -> Result<u64, Halt> {
    let ctx = swap_context(shape, params)?;
    let back = ctx.reverse();
    for_each(class_fillings(shape, &params.class)?, |m| {
        let out = phi_with(&ctx, m, c).map_err(bij(m))?;
        let pair = || vec![m.clone(), out.clone()];
        let (a, b) = (c.ne(m), c.ne(&out));
        ensure(a == b, || format!("φ maps ne={a} to ne={b}"), pair)?;
        ensure(m.col_sums() == out.col_sums(), || "φ changed column sums".into(), pair)?;
        let again = phi_with(&back, &out, c).map_err(bij(m))?;
        ensure(&again == m, || "φ is not inverted by the reverse φ".into(), pair)?;
        let before = case_label_with(&ctx, m, c).map_err(bij(m))?;
        let after = case_label_with(&back, &out, c).map_err(bij(m))?;
        ensure(
            before == after,
            || format!("φ maps a case {before} filling to case {after}"),
            pair,
        )
    })
}

fn check_sparse(m: &Filling) -> Result<(), Halt> {
    match m.row_sums().iter().position(|&s| s > 1) {
        Some(r) => Err(precondition(format!("row {} holds more than one 1", r + 1))),
        None => Ok(()),
    }
}

fn theorem2(shape: &Arc<Polyomino>, params: &VerifyParams, c: &dyn ChainCounter) -> Result<u64, Halt> {
    let ctx = swap_context(shape, params)?;
    let back = ctx.reverse();
    let i = ctx.index();
    for_each(class_fillings(shape, &params.class)?, |m| {
        check_sparse(m)?;
        let out = psi_with(&ctx, m, c).map_err(bij(m))?;
        let pair = || vec![m.clone(), out.clone()];
        let (a, b) = (c.ne(m), c.ne(&out));
        ensure(a == b, || format!("ψ maps ne={a} to ne={b}"), pair)?;
        ensure(m.col_sums() == out.col_sums(), || "ψ changed column sums".into(), pair)?;
        let mut rows = m.row_sums();
        rows.swap(i - 1, i);
        ensure(
            rows == out.row_sums(),
            || "ψ did not exchange the row sums".into(),
            pair,
        )?;
        let again = psi_with(&back, &out, c).map_err(bij(m))?;
        ensure(&again == m, || "ψ is not inverted by the reverse ψ".into(), pair)
    })
}

fn coupling_lemma(shape: &Arc<Polyomino>, params: &VerifyParams, c: &dyn ChainCounter) -> Result<u64, Halt> {
    let ctx = swap_context(shape, params)?;
    for_each(class_fillings(shape, &params.class)?, |m| {
        let m2 = if params.relaxed {
            exchange_segments(&ctx, m)
        } else {
            coupling(&ctx, m)
        }
        .map_err(bij(m))?;
        let n = f_map(&ctx, &m2).map_err(bij(m))?;
        let n2 = f_map(&ctx, m).map_err(bij(m))?;
        let (a, b, x, y) = (c.ne(m), c.ne(&m2), c.ne(&n), c.ne(&n2));
        ensure(
            a.min(b) == x.min(y) && a.max(b) == x.max(y),
            || format!("ne(M)={a} ne(M')={b} ne(N)={x} ne(N')={y}"),
            || vec![m.clone(), m2.clone(), n.clone(), n2.clone()],
        )
    })
}

fn almost_moon(shape: &Polyomino) -> Result<(), Halt> {
    match shape.classify() {
        ShapeClass::Moon | ShapeClass::AlmostMoon { .. } => Ok(()),
        other => Err(precondition(format!("shape is {other}, not a moon or almost-moon"))),
    }
}

type Histogram<K> = BTreeMap<K, u64>;

fn histogram<K: Ord>(fillings: Stream, c: &dyn ChainCounter, key: impl Fn(&Filling) -> K) -> Histogram<(K, usize)> {
    let mut h = BTreeMap::new();
    for f in fillings {
        *h.entry((key(&f), c.ne(&f))).or_insert(0) += 1;
    }
    h
}

fn compare<K: Ord + fmt::Debug>(what: &str, left: &Histogram<K>, right: &Histogram<K>) -> Result<(), Halt> {
    if left == right {
        return Ok(());
    }
    let diff = left
        .keys()
        .chain(right.keys())
        .find(|k| left.get(*k) != right.get(*k))
        .expect("maps differ");
    Err(Halt::Fail(
        format!(
            "{what}: {diff:?} counted {} vs {}",
            left.get(diff).copied().unwrap_or(0),
            right.get(diff).copied().unwrap_or(0)
        ),
        Vec::new(),
    ))
}

fn corollary1(shape: &Arc<Polyomino>, params: &VerifyParams, c: &dyn ChainCounter) -> Result<u64, Halt> {
    almost_moon(shape)?;
    let route = ferrers_route(shape.clone()).map_err(|e| precondition(e.to_string()))?;
    let mut sorted_images = HashSet::new();
    let mut ferrers_images = HashSet::new();
    let mut by_cols = BTreeMap::new();
    let mut by_count = BTreeMap::new();
    let checked = for_each(class_fillings(shape, &params.class)?, |m| {
        let k = c.ne(m);
        let sorted = composed_phi_with(&route.rows_sorted, m, c).map_err(bij(m))?;
        let pair = || vec![m.clone(), sorted.clone()];
        ensure(c.ne(&sorted) == k, || "ne changed along the sorting path".into(), pair)?;
        ensure(
            sorted.col_sums() == m.col_sums(),
            || "column sums changed along the sorting path".into(),
            pair,
        )?;
        ensure(
            sorted_images.insert(sorted.row_masks().to_vec()),
            || "two fillings share an image at the sorted shape".into(),
            pair,
        )?;
        let far = route.transport_sorted(&sorted, c).map_err(bij(m))?;
        let pair = || vec![m.clone(), far.clone()];
        ensure(
            c.ne(&far) == k,
            || "ne changed on the way to the Ferrers shape".into(),
            pair,
        )?;
        ensure(
            far.count_ones() == m.count_ones(),
            || "the number of ones changed".into(),
            pair,
        )?;
        ensure(
            ferrers_images.insert(far.row_masks().to_vec()),
            || "two fillings share an image at the Ferrers shape".into(),
            pair,
        )?;
        *by_cols.entry((m.col_sums(), k)).or_insert(0) += 1;
        *by_count.entry((m.count_ones(), k)).or_insert(0) += 1;
        Ok(())
    })?;
    let column_closed = matches!(
        &params.class,
        FillingClass::All
            | FillingClass::AtMostOnes(_)
            | FillingClass::Constraint(FillConstraint::TotalOnes(_) | FillConstraint::ColSums(_) | FillConstraint::All)
    );
    if column_closed {
        let end = route.rows_sorted.end();
        let theirs = histogram(class_fillings(end, &params.class)?, c, Filling::col_sums);
        compare("distribution at the sorted shape", &by_cols, &theirs)?;
        if !matches!(params.class, FillingClass::Constraint(FillConstraint::ColSums(_))) {
            let theirs = histogram(class_fillings(route.ferrers(), &params.class)?, c, Filling::count_ones);
            compare("distribution at the Ferrers shape", &by_count, &theirs)?;
        }
    }
    Ok(checked)
}

fn corollary2(shape: &Arc<Polyomino>, params: &VerifyParams, c: &dyn ChainCounter) -> Result<u64, Halt> {
    almost_moon(shape)?;
    let path = sort_path(shape.clone()).map_err(|e| precondition(e.to_string()))?;
    let mut images = HashSet::new();
    let mut ours = BTreeMap::new();
    let checked = for_each(class_fillings(shape, &params.class)?, |m| {
        check_sparse(m)?;
        let k = c.ne(m);
        let out = composed_psi_with(&path, m, c).map_err(bij(m))?;
        let pair = || vec![m.clone(), out.clone()];
        ensure(c.ne(&out) == k, || "ne changed along the sorting path".into(), pair)?;
        ensure(
            out.col_sums() == m.col_sums(),
            || "column sums changed along the sorting path".into(),
            pair,
        )?;
        let rows = path.permute(&m.row_sums());
        ensure(
            out.row_sums() == rows,
            || "row sums were not permuted along the path".into(),
            pair,
        )?;
        ensure(
            images.insert(out.row_masks().to_vec()),
            || "two fillings share an image at the sorted shape".into(),
            pair,
        )?;
        *ours.entry(((rows, m.col_sums()), k)).or_insert(0) += 1;
        Ok(())
    })?;
    let target = match &params.class {
        FillingClass::SparseRows | FillingClass::SparseRowsAtMost(_) => Some(params.class.clone()),
        FillingClass::Constraint(FillConstraint::Restricted) => Some(params.class.clone()),
        FillingClass::Constraint(FillConstraint::RowColSums { rows, cols }) => {
            Some(FillingClass::Constraint(FillConstraint::RowColSums {
                rows: path.permute(rows),
                cols: cols.clone(),
            }))
        }
        _ => None,
    };
    if let Some(class) = target {
        let theirs = histogram(class_fillings(path.end(), &class)?, c, |f| (f.row_sums(), f.col_sums()));
        compare("distribution at the sorted shape", &ours, &theirs)?;
    }
    Ok(checked)
}

/// The Ferrers shape (rows left-justified and descending) whose column
/// lengths are the nonzero column lengths of `shape`, sorted.
pub fn ferrers_with_columns_of(shape: &Polyomino) -> Polyomino {
    let mut cols: Vec<usize> = shape.column_lengths().into_iter().filter(|&h| h > 0).collect();
    cols.sort_unstable_by(|a, b| b.cmp(a));
    let rows: Vec<(usize, usize)> = (1..=cols[0])
        .map(|r| (1, cols.iter().filter(|&&h| h >= r).count()))
        .collect();
    Polyomino::new(&rows).expect("a Ferrers diagram is a valid shape")
}

fn column_multiset(shape: &Arc<Polyomino>, params: &VerifyParams, c: &dyn ChainCounter) -> Result<u64, Halt> {
    almost_moon(shape)?;
    let count_closed = matches!(
        params.class,
        FillingClass::All
            | FillingClass::AtMostOnes(_)
            | FillingClass::Constraint(FillConstraint::All | FillConstraint::TotalOnes(_))
    );
    if !count_closed {
        return Err(precondition("needs fillings grouped by their number of ones"));
    }
    for i in 1..shape.row_count() {
        if let Ok(ctx) = make_swap_context(shape.clone(), i) {
            ensure(
                ctx.target().column_lengths() == shape.column_lengths(),
                || format!("swap {i} changed the column lengths"),
                Vec::new,
            )?;
        }
    }
    let ferrers = Arc::new(ferrers_with_columns_of(shape));
    let mut a: Vec<usize> = shape.column_lengths().into_iter().filter(|&h| h > 0).collect();
    let mut b = ferrers.column_lengths();
    a.sort_unstable();
    b.sort_unstable();
    ensure(a == b, || "Ferrers shape has other column lengths".into(), Vec::new)?;
    let ours = histogram(class_fillings(shape, &params.class)?, c, Filling::count_ones);
    let theirs = histogram(class_fillings(&ferrers, &params.class)?, c, Filling::count_ones);
    compare("distribution at the Ferrers shape", &ours, &theirs)?;
    Ok(ours.values().sum())
}

fn pairwise_grid(shape: &Arc<Polyomino>, params: &VerifyParams, c: &dyn ChainCounter) -> Result<u64, Halt> {
    let cells: Vec<Cell> = shape.cells().collect();
    let n = cells.len();
    let small = n <= MAX_TABLE_CELLS;
    let mut checked = 0;
    for dir in [Direction::Ne, Direction::Se] {
        let adjacency: Vec<u64> = cells
            .iter()
            .map(|&a| {
                cells
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| compatible(shape, a, b, dir))
                    .fold(0u64, |m, (j, _)| m | 1 << j)
            })
            .collect();
        let oracle = if small {
            Some(GridOracleTable::new(shape, dir).expect("size checked"))
        } else {
            None
        };
        let subset_check = |set: u64| -> Result<(), Halt> {
            let pairwise = (0..n)
                .filter(|j| set >> j & 1 == 1)
                .all(|j| (set & !(1 << j)) & !adjacency[j] == 0);
            let grid = match &oracle {
                Some(t) => t.is_chain(set),
                None => {
                    let mut list: Vec<Cell> = (0..n).filter(|j| set >> j & 1 == 1).map(|j| cells[j]).collect();
                    list.sort_by_key(|c| (c.col, c.row));
                    is_valid_chain(shape, &list, dir).expect("cells lie in the shape")
                }
            };
            ensure(
                pairwise == grid,
                || format!("{dir} cells of {set:#b}: pairwise {pairwise}, grid {grid}"),
                || vec![Filling::from_index_mask(shape, set)],
            )
        };
        if params.class == FillingClass::All && small {
            for set in 0..1u64 << n {
                subset_check(set)?;
            }
        }
        checked = for_each(class_fillings(shape, &params.class)?, |m| {
            if !(params.class == FillingClass::All && small) {
                let ones = m.index_mask();
                if ones.count_ones() > 20 {
                    return Err(precondition("too many ones for subset checks"));
                }
                let mut sub = ones;
                loop {
                    subset_check(sub)?;
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & ones;
                }
            }
            let expected = match &oracle {
                Some(t) => t.longest(m),
                None => brute_force_longest(m, dir).map_err(|e| precondition(e.to_string()))?,
            };
            let (searched, counted) = (longest(m, dir), c.longest(m, dir));
            ensure(
                searched == expected && counted == expected,
                || format!("{dir}: search {searched}, counter {counted}, oracle {expected}"),
                || vec![m.clone()],
            )
        })?;
    }
    Ok(checked)
}

fn rotate180(shape: &Arc<Polyomino>, params: &VerifyParams, c: &dyn ChainCounter) -> Result<u64, Halt> {
    let rotated = Arc::new(shape.rotate180());
    let k = shape.row_count();
    let contexts = match params.swap {
        Some(_) => {
            let ctx = swap_context(shape, params)?;
            let rot = make_swap_context(rotated.clone(), k - ctx.index()).map_err(|e| precondition(e.to_string()))?;
            Some((ctx, rot))
        }
        None => None,
    };
    for_each(class_fillings(shape, &params.class)?, |m| {
        let r = m.rotate180();
        ensure(
            r.shape() == &*rotated,
            || "rotated filling has the wrong shape".into(),
            || vec![m.clone()],
        )?;
        for dir in [Direction::Ne, Direction::Se] {
            let (a, b) = (c.longest(m, dir), c.longest(&r, dir));
            ensure(
                a == b,
                || format!("{dir} {a} becomes {b} under rotation"),
                || vec![m.clone(), r.clone()],
            )?;
        }
        if let Some((ctx, rot)) = &contexts {
            let pair = || vec![m.clone(), r.clone()];
            let f1 = f_map(rot, &r).map_err(bij(m))?;
            let f2 = f_map(ctx, m).map_err(bij(m))?.rotate180();
            ensure(f1 == f2, || "f does not commute with rotation".into(), pair)?;
            let p1 = phi_with(rot, &r, c).map_err(bij(m))?;
            let p2 = phi_with(ctx, m, c).map_err(bij(m))?.rotate180();
            ensure(p1 == p2, || "φ does not commute with rotation".into(), pair)?;
            if m.row_sums().iter().all(|&s| s <= 1) {
                let s1 = psi_with(rot, &r, c).map_err(bij(m))?;
                let s2 = psi_with(ctx, m, c).map_err(bij(m))?.rotate180();
                ensure(s1 == s2, || "ψ does not commute with rotation".into(), pair)?;
            }
        }
        Ok(())
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepConfig {
    pub max_rows: usize,
    pub max_cols: usize,
    /// Restricts every filling class to at most this many ones.
    pub max_ones: Option<usize>,
    pub props: Vec<Property>,
    /// Worker threads; the report does not depend on it.
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub unit: String,
    pub message: String,
    pub witnesses: Vec<Filling>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertySummary {
    pub property: Property,
    /// Shapes or swaps checked.
    pub units: usize,
    /// Fillings checked.
    pub instances: u64,
    pub violations: usize,
    pub first_violation: Option<Violation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepReport {
    pub shapes: usize,
    pub contexts: usize,
    pub summaries: Vec<PropertySummary>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.summaries.iter().all(|s| s.violations == 0)
    }
}

impl fmt::Display for SweepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "shapes {} swaps {}", self.shapes, self.contexts)?;
        for s in &self.summaries {
            let verdict = if s.violations == 0 { "PASS" } else { "FAIL" };
            write!(
                f,
                "{verdict} {} units={} fillings={} violations={}",
                s.property, s.units, s.instances, s.violations
            )?;
            if let Some(v) = &s.first_violation {
                write!(f, "\n  first: {} {}", v.unit, v.message)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn sweep_class(property: Property, max_ones: Option<usize>) -> FillingClass {
    match (property.sparse_rows(), max_ones) {
        (true, None) => FillingClass::SparseRows,
        (true, Some(n)) => FillingClass::SparseRowsAtMost(n),
        (false, None) => FillingClass::All,
        (false, Some(n)) => FillingClass::AtMostOnes(n),
    }
}

/// Shapes whose chain tables a property needs.
fn table_shapes(property: Property, shape: &Arc<Polyomino>, ctx: Option<&SwapContext>) -> Vec<Arc<Polyomino>> {
    let mut out = vec![shape.clone()];
    if let Some(ctx) = ctx {
        out.push(ctx.target().clone());
    }
    match property {
        Property::Rotate180Invariance => {
            let more: Vec<_> = out.iter().map(|s| Arc::new(s.rotate180())).collect();
            out.extend(more);
        }
        Property::Corollary1Distribution => {
            if let Ok(route) = ferrers_route(shape.clone()) {
                for seq in [&route.rows_sorted, &route.columns_sorted] {
                    out.extend(seq.steps().iter().map(|s| s.target().clone()));
                }
                out.push(route.transposed.clone());
            }
        }
        Property::Corollary2Distribution => {
            if let Ok(path) = sort_path(shape.clone()) {
                out.extend(path.steps().iter().map(|s| s.target().clone()));
            }
        }
        Property::ColumnMultisetInvariance => out.push(Arc::new(ferrers_with_columns_of(shape))),
        _ => {}
    }
    out
}

struct Unit {
    property: Property,
    shape: Arc<Polyomino>,
    swap: Option<usize>,
}

fn run_unit(unit: &Unit, max_ones: Option<usize>) -> (u64, Option<Violation>) {
    let ctx = unit.swap.and_then(|i| make_swap_context(unit.shape.clone(), i).ok());
    let directions: &[Direction] = match unit.property {
        Property::PairwiseGrid | Property::Rotate180Invariance => &[Direction::Ne, Direction::Se],
        _ => &[Direction::Ne],
    };
    let mut tables = ShapeTables::new();
    for s in table_shapes(unit.property, &unit.shape, ctx.as_ref()) {
        tables.add(&s, directions);
    }
    let params = VerifyParams {
        swap: unit.swap,
        class: sweep_class(unit.property, max_ones),
        relaxed: false,
    };
    let name = match unit.swap {
        Some(i) => format!("{:?} swap {i}", unit.shape.intervals()),
        None => format!("{:?}", unit.shape.intervals()),
    };
    match verify_with(unit.property, &unit.shape, &params, &tables) {
        Ok(Report::Pass { checked }) => (checked, None),
        Ok(Report::Fail { message, witnesses }) => (
            0,
            Some(Violation {
                unit: name,
                message,
                witnesses,
            }),
        ),
        Err(e) => (
            0,
            Some(Violation {
                unit: name,
                message: e.to_string(),
                witnesses: Vec::new(),
            }),
        ),
    }
}

/// A shape together with a row index `i` whose swap with `i + 1` is valid.
pub type SwapSite = (Arc<Polyomino>, usize);

/// Every row-comparable shape with at most `max_rows` rows inside columns
/// `1..=max_cols`, and every valid swap on them.
pub fn sweep_family(max_rows: usize, max_cols: usize) -> (Vec<Arc<Polyomino>>, Vec<SwapSite>) {
    let shapes: Vec<Arc<Polyomino>> = comparable_shapes_within(max_rows, max_cols)
        .into_iter()
        .map(Arc::new)
        .collect();
    let contexts = shapes
        .iter()
        .flat_map(|s| (1..s.row_count()).map(move |i| (s.clone(), i)))
        .filter(|(s, i)| make_swap_context(s.clone(), *i).is_ok())
        .collect();
    (shapes, contexts)
}

/// Checks every requested property over the whole family. Per-swap
/// properties run on every valid swap; pairwise-grid on every shape; the
/// remaining per-shape properties on every shape that admits a valid swap.
pub fn sweep(config: &SweepConfig) -> SweepReport {
    let (shapes, contexts) = sweep_family(config.max_rows, config.max_cols);
    let swappable: Vec<Arc<Polyomino>> = shapes
        .iter()
        .filter(|s| contexts.iter().any(|(c, _)| Arc::ptr_eq(c, s)))
        .cloned()
        .collect();
    let mut units = Vec::new();
    for &property in &config.props {
        if property.per_swap() {
            units.extend(contexts.iter().map(|(s, i)| Unit {
                property,
                shape: s.clone(),
                swap: Some(*i),
            }));
        } else {
            let family = if property == Property::PairwiseGrid {
                &shapes
            } else {
                &swappable
            };
            units.extend(family.iter().map(|s| Unit {
                property,
                shape: s.clone(),
                swap: None,
            }));
        }
    }
    let run = || -> Vec<(u64, Option<Violation>)> { units.par_iter().map(|u| run_unit(u, config.max_ones)).collect() };
    let results = match rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.max(1))
        .build()
    {
        Ok(pool) => pool.install(run),
        Err(_) => run(),
    };
    let mut summaries: Vec<PropertySummary> = config
        .props
        .iter()
        .map(|&property| PropertySummary {
            property,
            units: 0,
            instances: 0,
            violations: 0,
            first_violation: None,
        })
        .collect();
    for (unit, (checked, violation)) in units.iter().zip(results) {
        let s = summaries
            .iter_mut()
            .find(|s| s.property == unit.property)
            .expect("summary per property");
        s.units += 1;
        s.instances += checked;
        if let Some(v) = violation {
            s.violations += 1;
            s.first_violation.get_or_insert(v);
        }
    }
    SweepReport {
        shapes: shapes.len(),
        contexts: contexts.len(),
        summaries,
    }
}

//! Northeast and southeast chains.
//!
//! A chain is a set of 1-cells, strictly monotone in both coordinates, whose
//! full row × column grid lies inside the polyomino. The main search relies
//! on the fact that a monotone cell list satisfies the grid condition iff
//! every pair of its cells does: the grid of the whole list is the union of
//! the 2 × 2 grids of its pairs. [`brute_force_longest`] and
//! [`GridOracleTable`] check the full grid directly and serve as oracles.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::filling::Filling;
use crate::polyomino::{Cell, Polyomino};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("cell {0} is not in the polyomino")]
    CellOutsideShape(Cell),
    #[error("cell {0} is not a 1-cell")]
    NotAOneCell(Cell),
    #[error("{ones} 1-cells exceed the brute-force bound of {bound}")]
    TooManyOnes { ones: usize, bound: usize },
    #[error("shape has {cells} cells; lookup tables support at most {max}")]
    ShapeTooLarge { cells: usize, max: usize },
}

/// Default bound on the number of 1-cells for [`brute_force_longest`].
pub const BRUTE_FORCE_BOUND: usize = 20;

/// Largest shape (in cells) for which [`ChainTable`] is built.
pub const MAX_TABLE_CELLS: usize = 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Up and to the right: rows decrease as columns increase.
    Ne,
    /// Down and to the right: rows increase as columns increase.
    Se,
}

impl Direction {
    /// Whether `b` follows `a` in this direction (`b` strictly to the right).
    fn follows(self, a: Cell, b: Cell) -> bool {
        b.col > a.col
            && match self {
                Direction::Ne => b.row < a.row,
                Direction::Se => b.row > a.row,
            }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Ne => "ne",
            Direction::Se => "se",
        })
    }
}

/// A certified chain, cells ordered left to right.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chain {
    cells: Vec<Cell>,
    direction: Direction,
}

impl Chain {
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.cells.iter().map(Cell::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// Size of a largest chain plus the lexicographically least witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LongestChain {
    pub size: usize,
    pub witness: Option<Chain>,
}

/// Checks monotonicity along the list and the full grid condition.
pub fn is_valid_chain(shape: &Polyomino, cells: &[Cell], direction: Direction) -> Result<bool, ChainError> {
    if let Some(&c) = cells.iter().find(|&&c| !shape.contains(c)) {
        return Err(ChainError::CellOutsideShape(c));
    }
    Ok(valid_in_shape(shape, cells, direction))
}

fn valid_in_shape(shape: &Polyomino, cells: &[Cell], direction: Direction) -> bool {
    if !cells.windows(2).all(|w| direction.follows(w[0], w[1])) {
        return false;
    }
    cells
        .iter()
        .all(|a| cells.iter().all(|b| shape.contains(Cell::new(a.row, b.col))))
}

/// Whether two cells form a 2-chain in `direction`, in either order.
pub fn compatible(shape: &Polyomino, a: Cell, b: Cell, direction: Direction) -> bool {
    let (a, b) = if a.col <= b.col { (a, b) } else { (b, a) };
    direction.follows(a, b) && shape.contains(Cell::new(a.row, b.col)) && shape.contains(Cell::new(b.row, a.col))
}

/// The corner test that suffices in moon polyominoes: only the two corners
/// of the bounding rectangle are checked.
pub fn corner_condition(shape: &Polyomino, cells: &[Cell], direction: Direction) -> bool {
    if !cells.windows(2).all(|w| direction.follows(w[0], w[1])) {
        return false;
    }
    match (cells.first(), cells.last()) {
        (Some(first), Some(last)) => {
            shape.contains(Cell::new(first.row, last.col)) && shape.contains(Cell::new(last.row, first.col))
        }
        _ => true,
    }
}

type Bits = Vec<u64>;

fn popcount(b: &[u64]) -> usize {
    b.iter().map(|w| w.count_ones() as usize).sum()
}

fn first_set(b: &[u64]) -> Option<usize> {
    b.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

fn members(b: &[u64]) -> Vec<usize> {
    let mut out = Vec::new();
    for (i, &w) in b.iter().enumerate() {
        let mut w = w;
        while w != 0 {
            out.push(i * 64 + w.trailing_zeros() as usize);
            w &= w - 1;
        }
    }
    out
}

/// Compatibility graph over the 1-cells of a filling, vertices sorted by
/// (column, row); `forward[v]` holds the later vertices compatible with `v`.
struct ChainGraph {
    cells: Vec<Cell>,
    /// Row `v` occupies `forward[v * words..(v + 1) * words]`.
    forward: Vec<u64>,
    words: usize,
}

impl ChainGraph {
    fn new(shape: &Polyomino, mut cells: Vec<Cell>, direction: Direction) -> Self {
        cells.sort_by_key(|c| (c.col, c.row));
        let n = cells.len();
        let words = n.div_ceil(64).max(1);
        let mut forward = vec![0u64; n * words];
        for i in 0..n {
            for j in i + 1..n {
                if compatible(shape, cells[i], cells[j], direction) {
                    forward[i * words + j / 64] |= 1 << (j % 64);
                }
            }
        }
        ChainGraph { cells, forward, words }
    }

    fn row(&self, v: usize) -> &[u64] {
        &self.forward[v * self.words..(v + 1) * self.words]
    }

    fn all(&self) -> Bits {
        let mut bits = vec![0u64; self.words];
        for j in 0..self.cells.len() {
            bits[j / 64] |= 1 << (j % 64);
        }
        bits
    }

    fn largest(&self, cand: &[u64]) -> usize {
        let mut best = 0;
        if self.words == 1 {
            self.extend_word(cand[0], 0, &mut best);
        } else {
            self.extend(cand, 0, &mut best);
        }
        best
    }

    fn extend_word(&self, cand: u64, size: usize, best: &mut usize) {
        *best = (*best).max(size);
        let mut rest = cand;
        while rest != 0 {
            if size + rest.count_ones() as usize <= *best {
                return;
            }
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            self.extend_word(rest & self.forward[v], size + 1, best);
        }
    }

    fn extend(&self, cand: &[u64], size: usize, best: &mut usize) {
        *best = (*best).max(size);
        let mut rest = cand.to_vec();
        while let Some(v) = first_set(&rest) {
            if size + popcount(&rest) <= *best {
                return;
            }
            rest[v / 64] &= !(1 << (v % 64));
            let next: Bits = rest.iter().zip(self.row(v)).map(|(a, b)| a & b).collect();
            self.extend(&next, size + 1, best);
        }
    }

    /// Lexicographically least chain of size `m`, greedily.
    fn least_witness(&self, m: usize) -> Vec<Cell> {
        let mut chosen = Vec::with_capacity(m);
        let mut cand = self.all();
        for step in 0..m {
            let mut opts = members(&cand);
            opts.sort_by_key(|&v| self.cells[v]);
            let need = m - step - 1;
            let pick = opts
                .into_iter()
                .find_map(|v| {
                    let next: Bits = cand.iter().zip(self.row(v)).map(|(a, b)| a & b).collect();
                    (self.largest(&next) >= need).then_some((v, next))
                })
                .expect("a maximum chain extends the chosen prefix");
            chosen.push(self.cells[pick.0]);
            cand = pick.1;
        }
        chosen
    }
}

/// Largest chain of 1-cells with its lexicographically least witness.
pub fn longest_chain(f: &Filling, direction: Direction) -> LongestChain {
    let graph = ChainGraph::new(f.shape(), f.ones(), direction);
    let size = graph.largest(&graph.all());
    let witness = (size > 0).then(|| Chain {
        cells: graph.least_witness(size),
        direction,
    });
    LongestChain { size, witness }
}

/// Size of a largest chain of 1-cells.
pub fn longest(f: &Filling, direction: Direction) -> usize {
    let graph = ChainGraph::new(f.shape(), f.ones(), direction);
    graph.largest(&graph.all())
}

/// Size of the largest northeast chain, `ne(F)`.
pub fn ne(f: &Filling) -> usize {
    longest(f, Direction::Ne)
}

/// Size of the largest southeast chain, `se(F)`.
pub fn se(f: &Filling) -> usize {
    longest(f, Direction::Se)
}

/// Size of the largest chain of 1-cells containing `cell`.
pub fn max_chain_through(f: &Filling, cell: Cell, direction: Direction) -> Result<usize, ChainError> {
    if !f.shape().contains(cell) {
        return Err(ChainError::CellOutsideShape(cell));
    }
    if !f.get(cell) {
        return Err(ChainError::NotAOneCell(cell));
    }
    let shape = f.shape();
    let partners: Vec<Cell> = f
        .ones()
        .into_iter()
        .filter(|&u| u != cell && compatible(shape, cell, u, direction))
        .collect();
    let graph = ChainGraph::new(shape, partners, direction);
    Ok(1 + graph.largest(&graph.all()))
}

/// Oracle: tries every subset of 1-cells against the full grid condition.
pub fn brute_force_longest(f: &Filling, direction: Direction) -> Result<usize, ChainError> {
    brute_force_longest_bounded(f, direction, BRUTE_FORCE_BOUND)
}

pub fn brute_force_longest_bounded(f: &Filling, direction: Direction, bound: usize) -> Result<usize, ChainError> {
    let mut ones = f.ones();
    if ones.len() > bound {
        return Err(ChainError::TooManyOnes {
            ones: ones.len(),
            bound,
        });
    }
    ones.sort_by_key(|c| (c.col, c.row));
    let n = ones.len();
    let mut best = 0;
    let mut subset = Vec::with_capacity(n);
    for mask in 1u64..(1u64 << n) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        subset.clear();
        subset.extend((0..n).filter(|i| mask >> i & 1 == 1).map(|i| ones[i]));
        if valid_in_shape(f.shape(), &subset, direction) {
            best = size;
        }
    }
    Ok(best)
}

/// `longest(F)` for every filling `F` of one small shape, by dynamic
/// programming over subsets of cells with the pairwise compatibility graph.
#[derive(Debug, Clone)]
pub struct ChainTable {
    shape: Arc<Polyomino>,
    direction: Direction,
    /// Neighbourhoods in row-major cell indices.
    adjacency: Vec<u64>,
    values: Vec<u8>,
}

impl ChainTable {
    pub fn new(shape: Arc<Polyomino>, direction: Direction) -> Result<Self, ChainError> {
        let n = shape.cell_count();
        if n > MAX_TABLE_CELLS {
            return Err(ChainError::ShapeTooLarge {
                cells: n,
                max: MAX_TABLE_CELLS,
            });
        }
        let cells: Vec<Cell> = shape.cells().collect();
        let adjacency: Vec<u64> = cells
            .iter()
            .map(|&a| {
                cells
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| compatible(&shape, a, b, direction))
                    .fold(0u64, |m, (j, _)| m | 1 << j)
            })
            .collect();
        let mut values = vec![0u8; 1 << n];
        for s in 1usize..(1 << n) {
            let v = s.trailing_zeros() as usize;
            let without = values[s & (s - 1)];
            let with = 1 + values[s & adjacency[v] as usize];
            values[s] = without.max(with);
        }
        Ok(ChainTable {
            shape,
            direction,
            adjacency,
            values,
        })
    }

    pub fn shape(&self) -> &Arc<Polyomino> {
        &self.shape
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn longest(&self, f: &Filling) -> usize {
        self.values[f.index_mask() as usize] as usize
    }

    pub fn longest_in_mask(&self, mask: u64) -> usize {
        self.values[mask as usize] as usize
    }

    /// Largest chain through the 1-cell `cell`.
    pub fn longest_through(&self, f: &Filling, cell: Cell) -> usize {
        let idx = self.shape.cell_index(cell).expect("cell in shape");
        1 + self.values[(f.index_mask() & self.adjacency[idx]) as usize] as usize
    }
}

/// `longest(F)` for every filling of one small shape, computed from the
/// full grid condition: every subset of cells is tested with
/// [`is_valid_chain`], then a subset-maximum transform spreads the sizes.
#[derive(Debug, Clone)]
pub struct GridOracleTable {
    values: Vec<u8>,
    chains: Vec<u64>,
}

impl GridOracleTable {
    pub fn new(shape: &Polyomino, direction: Direction) -> Result<Self, ChainError> {
        let n = shape.cell_count();
        if n > MAX_TABLE_CELLS {
            return Err(ChainError::ShapeTooLarge {
                cells: n,
                max: MAX_TABLE_CELLS,
            });
        }
        let cells: Vec<Cell> = shape.cells().collect();
        let mut values = vec![0u8; 1 << n];
        let mut chains = vec![0u64; (1usize << n).div_ceil(64)];
        let mut subset = Vec::with_capacity(n);
        for (s, value) in values.iter_mut().enumerate() {
            subset.clear();
            subset.extend((0..n).filter(|i| s >> i & 1 == 1).map(|i| cells[i]));
            subset.sort_by_key(|c| (c.col, c.row));
            if valid_in_shape(shape, &subset, direction) {
                *value = subset.len() as u8;
                chains[s / 64] |= 1 << (s % 64);
            }
        }
        for bit in 0..n {
            for s in 0..values.len() {
                if s >> bit & 1 == 1 {
                    values[s] = values[s].max(values[s ^ (1 << bit)]);
                }
            }
        }
        Ok(GridOracleTable { values, chains })
    }

    /// Whether the cells with row-major indices in `mask` form a chain.
    pub fn is_chain(&self, mask: u64) -> bool {
        self.chains[mask as usize / 64] >> (mask % 64) & 1 == 1
    }

    pub fn longest(&self, f: &Filling) -> usize {
        self.values[f.index_mask() as usize] as usize
    }
}

/// Source of chain sizes for the bijections: either a direct search or
/// precomputed tables.
pub trait ChainCounter: Sync {
    fn longest(&self, f: &Filling, direction: Direction) -> usize;

    fn longest_through(&self, f: &Filling, cell: Cell, direction: Direction) -> usize {
        max_chain_through(f, cell, direction).expect("cell is a 1-cell")
    }

    fn ne(&self, f: &Filling) -> usize {
        self.longest(f, Direction::Ne)
    }
}

/// Direct search on every call.
#[derive(Debug, Clone, Copy, Default)]
pub struct Search;

impl ChainCounter for Search {
    fn longest(&self, f: &Filling, direction: Direction) -> usize {
        longest(f, direction)
    }
}

/// Lookup tables for a handful of shapes, with search as a fallback.
#[derive(Debug, Clone, Default)]
pub struct ShapeTables {
    tables: Vec<ChainTable>,
}

impl ShapeTables {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds tables for `shape` when it is small enough; returns whether it did.
    pub fn add(&mut self, shape: &Arc<Polyomino>, directions: &[Direction]) -> bool {
        if shape.cell_count() > MAX_TABLE_CELLS {
            return false;
        }
        for &d in directions {
            if self.find(shape, d).is_none() {
                self.tables
                    .push(ChainTable::new(shape.clone(), d).expect("size checked"));
            }
        }
        true
    }

    fn find(&self, shape: &Arc<Polyomino>, direction: Direction) -> Option<&ChainTable> {
        let mut same = self.tables.iter().filter(|t| t.direction == direction);
        same.clone()
            .find(|t| Arc::ptr_eq(&t.shape, shape))
            .or_else(|| same.find(|t| *t.shape == **shape))
    }
}

impl ChainCounter for ShapeTables {
    fn longest(&self, f: &Filling, direction: Direction) -> usize {
        match self.find(f.shape_arc(), direction) {
            Some(t) => t.longest(f),
            None => longest(f, direction),
        }
    }

    fn longest_through(&self, f: &Filling, cell: Cell, direction: Direction) -> usize {
        match self.find(f.shape_arc(), direction) {
            Some(t) => t.longest_through(f, cell),
            None => max_chain_through(f, cell, direction).expect("cell is a 1-cell"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filling::{enumerate, FillConstraint};

    fn fig1b() -> Arc<Polyomino> {
        Arc::new(Polyomino::new(&[(3, 5), (2, 6), (1, 7), (4, 5), (2, 5), (5, 5)]).unwrap())
    }

    fn cells(list: &[(usize, usize)]) -> Vec<Cell> {
        list.iter().copied().map(Cell::from).collect()
    }

    fn fig3() -> Filling {
        let ones = [
            (3, 1),
            (5, 2),
            (2, 2),
            (1, 3),
            (4, 4),
            (3, 4),
            (2, 5),
            (1, 5),
            (2, 6),
            (3, 7),
        ];
        Filling::from_cells(fig1b(), ones).unwrap()
    }

    #[test]
    fn validity_examples() {
        let shape = fig1b();
        assert_eq!(
            is_valid_chain(&shape, &cells(&[(5, 2), (3, 4), (2, 5)]), Direction::Ne),
            Ok(true)
        );
        // (4,2) is outside the shape: row 4 covers columns 4-5 only.
        assert_eq!(
            is_valid_chain(&shape, &cells(&[(5, 2), (4, 4), (2, 5)]), Direction::Ne),
            Ok(false)
        );
        assert_eq!(is_valid_chain(&shape, &cells(&[(3, 1)]), Direction::Ne), Ok(true));
        assert_eq!(
            is_valid_chain(&shape, &cells(&[(1, 1)]), Direction::Ne),
            Err(ChainError::CellOutsideShape(Cell::new(1, 1)))
        );
        // Wrong orientation.
        assert_eq!(
            is_valid_chain(&shape, &cells(&[(2, 5), (3, 4)]), Direction::Ne),
            Ok(false)
        );
        assert_eq!(
            is_valid_chain(&shape, &cells(&[(1, 3), (2, 5)]), Direction::Se),
            Ok(true)
        );
    }

    #[test]
    fn fig3_statistics() {
        let f = fig3();
        let ne_chain = longest_chain(&f, Direction::Ne);
        assert_eq!(ne_chain.size, 3);
        assert_eq!(
            ne_chain.witness.unwrap().cells(),
            cells(&[(5, 2), (3, 4), (2, 5)]).as_slice()
        );
        let se_chain = longest_chain(&f, Direction::Se);
        assert_eq!(se_chain.size, 2);
        assert_eq!(se_chain.witness.unwrap().cells(), cells(&[(1, 3), (2, 5)]).as_slice());
        assert_eq!(brute_force_longest(&f, Direction::Ne), Ok(3));
        assert_eq!(brute_force_longest(&f, Direction::Se), Ok(2));
    }

    #[test]
    fn chain_through() {
        let f = fig3();
        assert_eq!(max_chain_through(&f, Cell::new(5, 2), Direction::Ne), Ok(3));
        assert_eq!(max_chain_through(&f, Cell::new(3, 1), Direction::Ne), Ok(1));
        assert_eq!(
            max_chain_through(&f, Cell::new(4, 5), Direction::Ne),
            Err(ChainError::NotAOneCell(Cell::new(4, 5)))
        );
        let single = Filling::from_cells(fig1b(), [(3, 3)]).unwrap();
        assert_eq!(max_chain_through(&single, Cell::new(3, 3), Direction::Ne), Ok(1));
    }

    #[test]
    fn empty_and_tiny() {
        let empty = Filling::empty(fig1b());
        assert_eq!(
            longest_chain(&empty, Direction::Ne),
            LongestChain { size: 0, witness: None }
        );
        assert_eq!(se(&empty), 0);
        let one = Filling::from_cells(fig1b(), [(2, 2)]).unwrap();
        assert_eq!(brute_force_longest(&one, Direction::Ne), Ok(1));
        assert_eq!(brute_force_longest(&empty, Direction::Se), Ok(0));
    }

    #[test]
    fn brute_force_bound() {
        let shape = Arc::new(Polyomino::new(&[(1, 7); 3]).unwrap());
        let full = Filling::from_cells(shape.clone(), shape.cells()).unwrap();
        assert_eq!(
            brute_force_longest(&full, Direction::Ne),
            Err(ChainError::TooManyOnes { ones: 21, bound: 20 })
        );
        assert_eq!(brute_force_longest_bounded(&full, Direction::Ne, 21), Ok(3));
    }

    #[test]
    fn fig10_filling() {
        let shape = Arc::new(Polyomino::new(&[(1, 8), (1, 8), (2, 7), (1, 8), (1, 8), (1, 8), (2, 7)]).unwrap());
        let m = Filling::from_cells(shape, [(6, 1), (7, 2), (3, 3), (4, 4), (1, 5), (5, 6), (3, 7), (2, 8)]).unwrap();
        assert_eq!(brute_force_longest(&m, Direction::Ne), Ok(3));
        assert_eq!(ne(&m), 3);
    }

    #[test]
    fn tables_agree_with_search_and_oracle() {
        let shapes = [
            Polyomino::new(&[(1, 2), (1, 3), (1, 3), (1, 3)]).unwrap(),
            Polyomino::new(&[(1, 3), (1, 2), (1, 3), (1, 3)]).unwrap(),
            Polyomino::new(&[(2, 3), (1, 4), (2, 2), (1, 4)]).unwrap(),
        ];
        for shape in shapes {
            let shape = Arc::new(shape);
            for dir in [Direction::Ne, Direction::Se] {
                let table = ChainTable::new(shape.clone(), dir).unwrap();
                let oracle = GridOracleTable::new(&shape, dir).unwrap();
                for f in enumerate(shape.clone(), &FillConstraint::All).unwrap() {
                    let v = longest(&f, dir);
                    assert_eq!(table.longest(&f), v, "{f}");
                    assert_eq!(oracle.longest(&f), v, "{f}");
                    for c in f.ones() {
                        assert_eq!(table.longest_through(&f, c), max_chain_through(&f, c, dir).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn table_size_limit() {
        let big = Arc::new(Polyomino::new(&[(1, 8); 3]).unwrap());
        assert!(matches!(
            ChainTable::new(big, Direction::Ne),
            Err(ChainError::ShapeTooLarge { cells: 24, .. })
        ));
    }
}

//! Exact `ne` and `(ne, se)` distributions, and the adjacent-swap paths
//! that carry an almost-moon polyomino to a shape with descending rows.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::bijections::{make_swap_context, phi_with, psi_with, BijectionError, SwapContext};
use crate::chains::{ChainCounter, Direction, Search};
use crate::filling::{enumerate, FillConstraint, Filling, FillingError};
use crate::polyomino::{Polyomino, ShapeClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistributionKind {
    /// `Σ q^ne`
    Univariate,
    /// `Σ x^ne y^se`
    Bivariate,
}

/// A generating polynomial with exact nonnegative coefficients. Univariate
/// polynomials store exponent pairs `(a, 0)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DistributionPolynomial {
    kind: DistributionKind,
    coefficients: BTreeMap<(usize, usize), u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse polynomial term {term:?}")]
pub struct PolynomialParseError {
    pub term: String,
}

impl DistributionPolynomial {
    pub fn new(kind: DistributionKind) -> Self {
        DistributionPolynomial {
            kind,
            coefficients: BTreeMap::new(),
        }
    }

    /// Builds a polynomial from `(exponents, coefficient)` terms.
    pub fn from_terms(kind: DistributionKind, terms: &[((usize, usize), u64)]) -> Self {
        let mut p = Self::new(kind);
        for &((a, b), c) in terms {
            p.add_term(a, b, c);
        }
        p
    }

    pub fn kind(&self) -> DistributionKind {
        self.kind
    }

    /// Adds `c · x^a y^b` (or `c · q^a`; `b` is ignored when univariate).
    pub fn add_term(&mut self, a: usize, b: usize, c: u64) {
        if c == 0 {
            return;
        }
        let b = match self.kind {
            DistributionKind::Univariate => 0,
            DistributionKind::Bivariate => b,
        };
        *self.coefficients.entry((a, b)).or_insert(0) += c;
    }

    pub fn coefficient(&self, a: usize, b: usize) -> u64 {
        self.coefficients.get(&(a, b)).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((usize, usize), u64)> + '_ {
        self.coefficients.iter().map(|(&e, &c)| (e, c))
    }

    /// Sum of coefficients: the number of fillings counted.
    pub fn total(&self) -> u64 {
        self.coefficients.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn merge(&mut self, other: &DistributionPolynomial) {
        for ((a, b), c) in other.terms() {
            self.add_term(a, b, c);
        }
    }

    /// The `ne` marginal `Σ q^ne`.
    pub fn marginal(&self) -> DistributionPolynomial {
        let mut out = Self::new(DistributionKind::Univariate);
        for ((a, _), c) in self.terms() {
            out.add_term(a, 0, c);
        }
        out
    }

    /// Exponent pairs whose coefficient differs from that of the swapped
    /// pair, as `((a, b), coeff(a, b), coeff(b, a))` with `a < b`.
    pub fn asymmetries(&self) -> Vec<((usize, usize), u64, u64)> {
        let mut pairs: Vec<(usize, usize)> = self
            .coefficients
            .keys()
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .filter(|(a, b)| a != b)
            .collect();
        pairs.sort();
        pairs.dedup();
        pairs
            .into_iter()
            .map(|(a, b)| ((a, b), self.coefficient(a, b), self.coefficient(b, a)))
            .filter(|(_, x, y)| x != y)
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetries().is_empty()
    }
}

impl fmt::Display for DistributionPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .terms()
            .map(|((a, b), c)| match self.kind {
                DistributionKind::Univariate => format!("{c}*q^{a}"),
                DistributionKind::Bivariate => format!("{c}*x^{a}*y^{b}"),
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

impl FromStr for DistributionPolynomial {
    type Err = PolynomialParseError;

    /// Parses the text form produced by `Display`. A polynomial without any
    /// `y` factor is read as univariate.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let kind = if s.contains('y') || s.contains('x') && !s.contains('q') {
            DistributionKind::Bivariate
        } else {
            DistributionKind::Univariate
        };
        let mut p = Self::new(kind);
        if s == "0" {
            return Ok(p);
        }
        for term in s.split('+') {
            let term = term.trim();
            let err = || PolynomialParseError { term: term.to_string() };
            let mut coeff = 1u64;
            let (mut a, mut b) = (0usize, 0usize);
            for (n, factor) in term.split('*').enumerate() {
                let factor = factor.trim();
                let (var, exp) = match factor.split_once('^') {
                    Some((v, e)) => (v, e.parse::<usize>().map_err(|_| err())?),
                    None if factor.chars().all(|c| c.is_ascii_digit()) && n == 0 => {
                        coeff = factor.parse().map_err(|_| err())?;
                        continue;
                    }
                    None => (factor, 1),
                };
                match (var, kind) {
                    ("q", DistributionKind::Univariate) | ("x", _) => a = exp,
                    ("y", DistributionKind::Bivariate) => b = exp,
                    _ => return Err(err()),
                }
            }
            p.add_term(a, b, coeff);
        }
        Ok(p)
    }
}

/// Accumulates the distribution of a stream of fillings.
pub fn distribution_of<I>(fillings: I, kind: DistributionKind, counter: &dyn ChainCounter) -> DistributionPolynomial
where
    I: IntoIterator<Item = Filling>,
{
    let mut p = DistributionPolynomial::new(kind);
    for f in fillings {
        let ne = counter.longest(&f, Direction::Ne);
        let se = match kind {
            DistributionKind::Univariate => 0,
            DistributionKind::Bivariate => counter.longest(&f, Direction::Se),
        };
        p.add_term(ne, se, 1);
    }
    p
}

/// Exact distribution over every filling satisfying `constraint`.
pub fn distribution(
    shape: impl Into<Arc<Polyomino>>,
    constraint: &FillConstraint,
    kind: DistributionKind,
) -> Result<DistributionPolynomial, FillingError> {
    Ok(distribution_of(enumerate(shape, constraint)?, kind, &Search))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetryReport {
    pub polynomial: DistributionPolynomial,
    pub asymmetries: Vec<((usize, usize), u64, u64)>,
}

impl SymmetryReport {
    pub fn is_symmetric(&self) -> bool {
        self.asymmetries.is_empty()
    }
}

/// Whether the `(ne, se)` distribution is symmetric in `x` and `y`.
pub fn joint_symmetry_check(
    shape: impl Into<Arc<Polyomino>>,
    constraint: &FillConstraint,
) -> Result<SymmetryReport, FillingError> {
    let polynomial = distribution(shape, constraint, DistributionKind::Bivariate)?;
    let asymmetries = polynomial.asymmetries();
    Ok(SymmetryReport {
        polynomial,
        asymmetries,
    })
}

/// A chain of validated adjacent-row swaps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwapSequence {
    start: Arc<Polyomino>,
    steps: Vec<SwapContext>,
    end: Arc<Polyomino>,
    permutation: Vec<usize>,
}

impl SwapSequence {
    pub fn start(&self) -> &Arc<Polyomino> {
        &self.start
    }

    pub fn steps(&self) -> &[SwapContext] {
        &self.steps
    }

    pub fn end(&self) -> &Arc<Polyomino> {
        &self.end
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `permutation()[p - 1]` is the original index of the row that ends at
    /// position `p`.
    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    /// Row indices `i` of the swaps, in order.
    pub fn indices(&self) -> Vec<usize> {
        self.steps.iter().map(SwapContext::index).collect()
    }

    /// A vector indexed by original rows, rearranged to the end positions.
    pub fn permute<T: Clone>(&self, values: &[T]) -> Vec<T> {
        self.permutation.iter().map(|&r| values[r - 1].clone()).collect()
    }
}

struct PathBuilder {
    start: Arc<Polyomino>,
    current: Arc<Polyomino>,
    steps: Vec<SwapContext>,
    permutation: Vec<usize>,
}

impl PathBuilder {
    fn new(shape: Arc<Polyomino>) -> Self {
        let k = shape.row_count();
        PathBuilder {
            start: shape.clone(),
            current: shape,
            steps: Vec::new(),
            permutation: (1..=k).collect(),
        }
    }

    fn len(&self, r: usize) -> usize {
        self.current.rows()[r - 1].len()
    }

    fn swap(&mut self, i: usize) -> Result<(), BijectionError> {
        let ctx = make_swap_context(self.current.clone(), i)?;
        self.current = ctx.target().clone();
        self.permutation.swap(i - 1, i);
        self.steps.push(ctx);
        Ok(())
    }

    fn finish(self) -> SwapSequence {
        SwapSequence {
            start: self.start,
            steps: self.steps,
            end: self.current,
            permutation: self.permutation,
        }
    }
}

/// Adjacent swaps taking a moon or almost-moon polyomino to the shape with
/// the same rows in descending length order: first the exceptional row
/// moves down past every longer row, then the shortest remaining row is
/// moved to the bottom, repeatedly.
pub fn sort_path(shape: impl Into<Arc<Polyomino>>) -> Result<SwapSequence, BijectionError> {
    let shape: Arc<Polyomino> = shape.into();
    let mut b = PathBuilder::new(shape.clone());
    match shape.classify() {
        ShapeClass::Moon => {}
        ShapeClass::AlmostMoon { exceptional_row } => {
            let mut pos = exceptional_row;
            let k = shape.row_count();
            while (pos + 1..=k).any(|r| b.len(r) > b.len(pos)) {
                b.swap(pos)?;
                pos += 1;
            }
        }
        other => {
            return Err(BijectionError::PreconditionViolated(format!(
                "sort path needs an almost-moon, got {other}"
            )));
        }
    }
    for last in (2..=shape.row_count()).rev() {
        // Bottom-most shortest row among 1..=last, so equal rows never swap.
        let mut pos = (1..=last).rev().min_by_key(|&r| b.len(r)).expect("nonempty range");
        while pos < last {
            b.swap(pos)?;
            pos += 1;
        }
    }
    Ok(b.finish())
}

fn compose<F>(path: &SwapSequence, m: &Filling, mut step: F) -> Result<Filling, BijectionError>
where
    F: FnMut(&SwapContext, &Filling) -> Result<Filling, BijectionError>,
{
    if m.shape() != &**path.start() {
        return Err(BijectionError::ShapeMismatch);
    }
    let mut cur = m.clone();
    for ctx in path.steps() {
        cur = step(ctx, &cur)?;
    }
    Ok(cur)
}

/// `φ` applied along every step of `path`.
pub fn composed_phi(path: &SwapSequence, m: &Filling) -> Result<Filling, BijectionError> {
    composed_phi_with(path, m, &Search)
}

pub fn composed_phi_with(
    path: &SwapSequence,
    m: &Filling,
    counter: &dyn ChainCounter,
) -> Result<Filling, BijectionError> {
    compose(path, m, |ctx, f| phi_with(ctx, f, counter))
}

/// `ψ` applied along every step of `path`.
pub fn composed_psi(path: &SwapSequence, m: &Filling) -> Result<Filling, BijectionError> {
    composed_psi_with(path, m, &Search)
}

pub fn composed_psi_with(
    path: &SwapSequence,
    m: &Filling,
    counter: &dyn ChainCounter,
) -> Result<Filling, BijectionError> {
    compose(path, m, |ctx, f| psi_with(ctx, f, counter))
}

/// The route from a moon or almost-moon polyomino to the Ferrers shape
/// determined by its column lengths: sort the rows, transpose, sort again.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FerrersRoute {
    pub rows_sorted: SwapSequence,
    pub transposed: Arc<Polyomino>,
    pub columns_sorted: SwapSequence,
}

impl FerrersRoute {
    pub fn ferrers(&self) -> &Arc<Polyomino> {
        self.columns_sorted.end()
    }

    /// Carries a filling to the Ferrers shape with `φ`, preserving `ne`.
    pub fn transport(&self, m: &Filling, counter: &dyn ChainCounter) -> Result<Filling, BijectionError> {
        let sorted = composed_phi_with(&self.rows_sorted, m, counter)?;
        self.transport_sorted(&sorted, counter)
    }

    /// The second half of [`FerrersRoute::transport`], from the sorted shape.
    pub fn transport_sorted(&self, sorted: &Filling, counter: &dyn ChainCounter) -> Result<Filling, BijectionError> {
        let flipped = sorted.transpose()?;
        composed_phi_with(&self.columns_sorted, &flipped, counter)
    }
}

pub fn ferrers_route(shape: impl Into<Arc<Polyomino>>) -> Result<FerrersRoute, BijectionError> {
    let rows_sorted = sort_path(shape)?;
    let transposed = Arc::new(rows_sorted.end().transpose()?);
    let columns_sorted = sort_path(transposed.clone())?;
    Ok(FerrersRoute {
        rows_sorted,
        transposed,
        columns_sorted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::ne;
    use crate::filling::enumerate_at_most;

    fn shape(rows: &[(usize, usize)]) -> Arc<Polyomino> {
        Arc::new(Polyomino::new(rows).unwrap())
    }

    fn fig1b() -> Arc<Polyomino> {
        shape(&[(3, 5), (2, 6), (1, 7), (4, 5), (2, 5), (5, 5)])
    }

    #[test]
    fn text_form() {
        let p = DistributionPolynomial::from_terms(
            DistributionKind::Bivariate,
            &[((3, 3), 242), ((1, 5), 1), ((2, 4), 72)],
        );
        assert_eq!(p.to_string(), "1*x^1*y^5 + 72*x^2*y^4 + 242*x^3*y^3");
        assert_eq!(p.to_string().parse::<DistributionPolynomial>().unwrap(), p);
        let q: DistributionPolynomial = "q + 7*q^2 + q^3".parse().unwrap();
        assert_eq!(q.to_string(), "1*q^1 + 7*q^2 + 1*q^3");
        assert_eq!(q.kind(), DistributionKind::Univariate);
        assert_eq!(
            DistributionPolynomial::new(DistributionKind::Univariate).to_string(),
            "0"
        );
        assert_eq!("0".parse::<DistributionPolynomial>().unwrap().total(), 0);
        assert!("3*z^2".parse::<DistributionPolynomial>().is_err());
    }

    #[test]
    fn marginal_and_symmetry() {
        let p =
            DistributionPolynomial::from_terms(DistributionKind::Bivariate, &[((1, 3), 1), ((2, 2), 7), ((3, 2), 1)]);
        assert_eq!(p.marginal().to_string(), "1*q^1 + 7*q^2 + 1*q^3");
        assert_eq!(p.asymmetries(), vec![((1, 3), 1, 0), ((2, 3), 0, 1)]);
        assert_eq!(p.total(), 9);
    }

    #[test]
    fn single_cell() {
        let p = distribution(
            shape(&[(1, 1)]),
            &FillConstraint::ColSums(vec![1]),
            DistributionKind::Univariate,
        )
        .unwrap();
        assert_eq!(p.to_string(), "1*q^1");
    }

    #[test]
    fn fig8_not_symmetric() {
        let c = FillConstraint::RowColSums {
            rows: vec![1; 4],
            cols: vec![2, 1, 1],
        };
        let report = joint_symmetry_check(shape(&[(1, 2), (1, 3), (1, 3), (1, 3)]), &c).unwrap();
        assert!(!report.is_symmetric());
        assert_eq!(report.polynomial.coefficient(1, 3), 1);
        assert_eq!(report.polynomial.coefficient(3, 1), 0);
    }

    #[test]
    fn sort_path_fig1b() {
        let path = sort_path(fig1b()).unwrap();
        assert_eq!(path.indices()[0], 4);
        assert_eq!(path.end().row_lengths(), vec![7, 5, 4, 3, 2, 1]);
        assert_eq!(path.permute(&fig1b().row_lengths()), path.end().row_lengths());
        assert_eq!(path.end().column_lengths(), fig1b().column_lengths());
    }

    #[test]
    fn sort_path_trivial() {
        assert!(sort_path(shape(&[(1, 3), (1, 2), (1, 1)])).unwrap().is_empty());
        assert!(sort_path(shape(&[(2, 4)])).unwrap().is_empty());
        let layered = shape(&[(1, 5), (2, 5), (2, 5), (1, 5), (1, 5)]);
        assert!(matches!(
            sort_path(layered),
            Err(BijectionError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn composed_phi_preserves_ne() {
        let path = sort_path(fig1b()).unwrap();
        for m in enumerate_at_most(fig1b(), 2).unwrap() {
            let out = composed_phi(&path, &m).unwrap();
            assert_eq!(out.shape(), &**path.end());
            assert_eq!(ne(&out), ne(&m));
            assert_eq!(out.col_sums(), m.col_sums());
        }
        let empty = SwapSequence {
            start: fig1b(),
            steps: vec![],
            end: fig1b(),
            permutation: (1..=6).collect(),
        };
        let m = Filling::from_cells(fig1b(), [(3, 1), (2, 6)]).unwrap();
        assert_eq!(composed_phi(&empty, &m).unwrap(), m);
    }

    #[test]
    fn ferrers_route_shape() {
        let route = ferrers_route(fig1b()).unwrap();
        let mut cols: Vec<usize> = fig1b().column_lengths().into_iter().filter(|&c| c > 0).collect();
        cols.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(route.ferrers().row_lengths(), cols);
        assert!(route.ferrers().rows().iter().all(|r| r.start() == 1));
        let m = Filling::from_cells(fig1b(), [(5, 2), (3, 4), (2, 5)]).unwrap();
        let out = route.transport(&m, &Search).unwrap();
        assert_eq!(ne(&out), 3);
    }
}

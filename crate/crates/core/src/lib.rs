//! Fillings of almost-moon polyominoes: longest ne/se chains, the row-swap
//! bijections that preserve their distribution, and an exhaustive harness
//! for checking those bijections on small shapes.

pub mod bijections;
pub mod chains;
pub mod distribution;
pub mod filling;
pub mod io;
pub mod polyomino;
pub mod scenarios;
pub mod verify;

pub use bijections::{f_map, make_swap_context, phi, psi, BijectionError, CaseLabel, SwapContext};
pub use chains::{longest_chain, ne, se, Chain, ChainCounter, ChainError, Direction, LongestChain, ShapeTables};
pub use distribution::{distribution, DistributionKind, DistributionPolynomial};
pub use filling::{enumerate, FillConstraint, Filling, FillingError};
pub use io::{parse_document, Document, IoError};
pub use polyomino::{Cell, Polyomino, PolyominoError, RowInterval, ShapeClass};
pub use verify::{sweep, verify, Property, Report, SweepConfig, SweepReport, VerifyParams};

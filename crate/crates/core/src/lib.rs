//! Minimal Sudoku puzzle generation, whip-based difficulty rating,
//! bias-corrected statistics and census estimation.
//!
//! The crate is organised around a handful of subsystems:
//!
//! - [`board`]: board geometry, puzzles, candidates and the link relation;
//! - [`solver`]: exact backtracking solution counting, minimality testing,
//!   complete-grid generation and the exhaustive 4×4 oracle;
//! - [`generate`]: the bottom-up, top-down and controlled-bias minimal
//!   puzzle generators with reproducible parallel batches;
//! - [`whip`]: the zt-whip resolution engine and the NRCZT rating;
//! - [`stats`]: correction factors and bias-corrected estimators for
//!   controlled-bias samples;
//! - [`census`]: per-grid counts of minimal puzzles and derived totals.

pub mod board;
pub mod census;
pub mod generate;
pub mod solver;
pub mod stats;
pub mod whip;

use thiserror::Error as ThisError;

/// Crate-wide error type.
#[derive(Debug, ThisError)]
pub enum Error {
    #[error("unsupported board: k = {0} (supported: 2, 3)")]
    UnsupportedBoard(usize),
    #[error("puzzle text has {got} cells, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid character {ch:?} at cell {cell}")]
    InvalidChar { cell: usize, ch: char },
    #[error("value {value} out of range at cell {cell}")]
    InvalidValue { cell: usize, value: usize },
    #[error("clue value {value} repeated in a unit (cells {cell_a} and {cell_b})")]
    InconsistentClues {
        cell_a: usize,
        cell_b: usize,
        value: usize,
    },
    #[error("grid is not complete")]
    IncompleteGrid,
    #[error("operation requires a 4×4 board (k = 2), got k = {0}")]
    OracleBoardTooLarge(usize),
    #[error("puzzle has no unique solution")]
    NotUniqueSolution,
    #[error("puzzle is inconsistent")]
    Inconsistent,
    #[error("empty sample")]
    EmptySample,
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

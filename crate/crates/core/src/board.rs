//! Board geometry, puzzles, candidates and the direct-contradiction link
//! relation.
//!
//! A board is a k²×k² Sudoku (k = 2 or 3). Cells are indexed row-major,
//! 0-based internally; the public [`Candidate`] type uses 1-based (value,
//! row, column) triples matching the usual nrc notation.

use std::fmt;
use std::sync::Arc;

use crate::Error;

/// Number of variable families: cell, (row, value), (column, value),
/// (box, value).
pub const VAR_FAMILIES: usize = 4;

/// Maximum cell count we ever handle (9×9).
pub const MAX_CELLS: usize = 81;
/// Maximum candidate count (9×9: 81 cells × 9 values).
pub const MAX_CANDS: usize = 729;

/// Geometry of a k²×k² Sudoku board with precomputed lookup tables.
///
/// Construction is not free (the candidate link table alone is
/// `side³ × side³` bits), so boards are built once and shared by
/// reference. All fields are immutable after construction.
#[derive(Clone)]
pub struct Board {
    k: usize,
    side: usize,
    cells: usize,
    /// `units[u]` lists the cells of unit `u`; rows first, then columns,
    /// then boxes.
    units: Vec<Vec<usize>>,
    /// Peer cells of each cell (cells sharing a unit, the cell excluded).
    peers: Vec<Vec<usize>>,
    /// Box index of each cell.
    cell_box: Vec<usize>,
    /// For each candidate index, the bitset of linked candidates.
    links: Arc<Vec<CandSet>>,
    /// For each CSP variable, its candidate indices.
    var_cands: Arc<Vec<Vec<usize>>>,
    /// The four variables each candidate belongs to.
    cand_vars: Arc<Vec<[usize; VAR_FAMILIES]>>,
}

impl fmt::Debug for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Board({}x{})", self.side, self.side)
    }
}

impl Board {
    /// Builds the board for box side `k` (2 or 3 supported).
    pub fn new(k: usize) -> Result<Board, Error> {
        if !(2..=3).contains(&k) {
            return Err(Error::UnsupportedBoard(k));
        }
        let side = k * k;
        let cells = side * side;

        let mut units = Vec::with_capacity(3 * side);
        for r in 0..side {
            units.push((0..side).map(|c| r * side + c).collect());
        }
        for c in 0..side {
            units.push((0..side).map(|r| r * side + c).collect());
        }
        for br in 0..k {
            for bc in 0..k {
                let mut u = Vec::with_capacity(side);
                for dr in 0..k {
                    for dc in 0..k {
                        u.push((br * k + dr) * side + (bc * k + dc));
                    }
                }
                units.push(u);
            }
        }

        let cell_box: Vec<usize> = (0..cells)
            .map(|i| (i / side / k) * k + (i % side) / k)
            .collect();

        let mut peer_sets: Vec<Vec<bool>> = vec![vec![false; cells]; cells];
        for u in &units {
            for &a in u {
                for &b in u {
                    if a != b {
                        peer_sets[a][b] = true;
                    }
                }
            }
        }
        let peers: Vec<Vec<usize>> = peer_sets
            .iter()
            .map(|row| (0..cells).filter(|&j| row[j]).collect())
            .collect();

        // Candidate links. cand = cell * side + (value - 1).
        let ncands = cells * side;
        let mut links = vec![CandSet::EMPTY; ncands];
        for cell in 0..cells {
            for v in 0..side {
                let a = cell * side + v;
                for w in 0..side {
                    if w != v {
                        links[a].insert(cell * side + w);
                    }
                }
                for &p in &peers[cell] {
                    links[a].insert(p * side + v);
                }
            }
        }

        // Variables: family 0 = cell(r,c), 1 = (row, value), 2 = (col, value),
        // 3 = (box, value). Each family has side² variables.
        let nvars = VAR_FAMILIES * side * side;
        let mut var_cands: Vec<Vec<usize>> = vec![Vec::with_capacity(side); nvars];
        let mut cand_vars: Vec<[usize; VAR_FAMILIES]> = vec![[0; VAR_FAMILIES]; ncands];
        let sq = side * side;
        for cell in 0..cells {
            let (r, c) = (cell / side, cell % side);
            let b = cell_box[cell];
            for v in 0..side {
                let cand = cell * side + v;
                let vars = [
                    cell,
                    sq + r * side + v,
                    2 * sq + c * side + v,
                    3 * sq + b * side + v,
                ];
                cand_vars[cand] = vars;
                for var in vars {
                    var_cands[var].push(cand);
                }
            }
        }

        Ok(Board {
            k,
            side,
            cells,
            units,
            peers,
            cell_box,
            links: Arc::new(links),
            var_cands: Arc::new(var_cands),
            cand_vars: Arc::new(cand_vars),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Number of candidate indices (`cells × side`).
    pub fn ncands(&self) -> usize {
        self.cells * self.side
    }

    /// Number of CSP variables across the four families.
    pub fn nvars(&self) -> usize {
        VAR_FAMILIES * self.side * self.side
    }

    pub fn units(&self) -> &[Vec<usize>] {
        &self.units
    }

    /// Cells sharing a unit with `cell`, excluding `cell` itself.
    pub fn peers(&self, cell: usize) -> &[usize] {
        &self.peers[cell]
    }

    pub fn cell_box(&self, cell: usize) -> usize {
        self.cell_box[cell]
    }

    /// Candidate index of a (cell, value) pair; `value` is 1-based.
    pub fn cand_index(&self, cell: usize, value: usize) -> usize {
        debug_assert!((1..=self.side).contains(&value));
        cell * self.side + value - 1
    }

    /// Decodes a candidate index back to (cell, value); `value` is 1-based.
    pub fn cand_decode(&self, cand: usize) -> (usize, usize) {
        (cand / self.side, cand % self.side + 1)
    }

    pub fn cand_to_candidate(&self, cand: usize) -> Candidate {
        let (cell, v) = self.cand_decode(cand);
        Candidate {
            value: v,
            row: cell / self.side + 1,
            col: cell % self.side + 1,
        }
    }

    pub fn candidate_to_cand(&self, c: &Candidate) -> usize {
        self.cand_index((c.row - 1) * self.side + (c.col - 1), c.value)
    }

    /// Bitset of candidates linked to `cand`.
    pub fn links(&self, cand: usize) -> &CandSet {
        &self.links[cand]
    }

    pub fn var_cands(&self, var: usize) -> &[usize] {
        &self.var_cands[var]
    }

    pub fn cand_vars(&self, cand: usize) -> &[usize; VAR_FAMILIES] {
        &self.cand_vars[cand]
    }

    /// Direct-contradiction relation on candidate indices.
    pub fn linked_idx(&self, a: usize, b: usize) -> bool {
        a != b && self.links[a].contains(b)
    }
}

/// A (value, row, column) triple, all 1-based.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Candidate {
    pub value: usize,
    pub row: usize,
    pub col: usize,
}

/// True iff `a` and `b` are forbidden from holding simultaneously by a
/// direct constraint: same cell with different values, or same value in a
/// shared unit. Symmetric and irreflexive.
pub fn linked(a: &Candidate, b: &Candidate, board: &Board) -> bool {
    if a == b {
        return false;
    }
    let same_cell = a.row == b.row && a.col == b.col;
    if a.value != b.value {
        return same_cell;
    }
    if same_cell {
        return false; // identical candidate, excluded above
    }
    let (ca, cb) = (
        (a.row - 1) * board.side() + a.col - 1,
        (b.row - 1) * board.side() + b.col - 1,
    );
    a.row == b.row || a.col == b.col || board.cell_box(ca) == board.cell_box(cb)
}

/// A clue assignment. `values[cell]` is 0 for empty, else 1..=side.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Puzzle {
    k: usize,
    values: Vec<u8>,
}

impl Puzzle {
    /// Builds a puzzle from raw values, checking shape and unit
    /// consistency.
    pub fn from_values(board: &Board, values: Vec<u8>) -> Result<Puzzle, Error> {
        if values.len() != board.cells() {
            return Err(Error::LengthMismatch {
                expected: board.cells(),
                got: values.len(),
            });
        }
        for (cell, &v) in values.iter().enumerate() {
            if v as usize > board.side() {
                return Err(Error::InvalidValue {
                    cell,
                    value: v as usize,
                });
            }
            if v != 0 {
                for &p in board.peers(cell) {
                    if p > cell && values[p] == v {
                        return Err(Error::InconsistentClues {
                            cell_a: cell,
                            cell_b: p,
                            value: v as usize,
                        });
                    }
                }
            }
        }
        Ok(Puzzle {
            k: board.k(),
            values,
        })
    }

    pub fn empty(board: &Board) -> Puzzle {
        Puzzle {
            k: board.k(),
            values: vec![0; board.cells()],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn value(&self, cell: usize) -> u8 {
        self.values[cell]
    }

    pub fn clue_count(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0).count()
    }

    pub fn clue_cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(i, _)| i)
    }

    /// Returns a copy with `cell` cleared.
    pub fn without(&self, cell: usize) -> Puzzle {
        let mut p = self.clone();
        p.values[cell] = 0;
        p
    }

    /// Returns a copy with `cell` set to `value` (unchecked beyond range).
    pub fn with(&self, cell: usize, value: u8) -> Puzzle {
        let mut p = self.clone();
        p.values[cell] = value;
        p
    }

    pub fn is_complete(&self) -> bool {
        self.values.iter().all(|&v| v != 0)
    }
}

/// A complete, solved grid: a puzzle with every cell decided.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Grid(Puzzle);

impl Grid {
    /// Wraps a complete puzzle, verifying the one-of-each-per-unit
    /// property.
    pub fn from_puzzle(_board: &Board, p: Puzzle) -> Result<Grid, Error> {
        if !p.is_complete() {
            return Err(Error::IncompleteGrid);
        }
        // unit consistency is already enforced by Puzzle construction;
        // completeness + consistency implies each unit holds each value once
        Ok(Grid(p))
    }

    pub fn as_puzzle(&self) -> &Puzzle {
        &self.0
    }

    pub fn into_puzzle(self) -> Puzzle {
        self.0
    }

    pub fn values(&self) -> &[u8] {
        self.0.values()
    }

    pub fn value(&self, cell: usize) -> u8 {
        self.0.value(cell)
    }
}

/// Parses the one-line community format: row-major, '.' for empty, digits
/// for values.
pub fn parse_puzzle(text: &str, board: &Board) -> Result<Puzzle, Error> {
    let chars: Vec<char> = text.trim().chars().collect();
    if chars.len() != board.cells() {
        return Err(Error::LengthMismatch {
            expected: board.cells(),
            got: chars.len(),
        });
    }
    let mut values = Vec::with_capacity(board.cells());
    for (cell, ch) in chars.iter().enumerate() {
        let v = match ch {
            '.' | '0' => 0,
            d if d.is_ascii_digit() => d.to_digit(10).unwrap() as u8,
            _ => return Err(Error::InvalidChar { cell, ch: *ch }),
        };
        if v as usize > board.side() {
            return Err(Error::InvalidValue {
                cell,
                value: v as usize,
            });
        }
        values.push(v);
    }
    Puzzle::from_values(board, values)
}

/// Inverse of [`parse_puzzle`]; row-major, deterministic.
pub fn format_puzzle(p: &Puzzle) -> String {
    p.values()
        .iter()
        .map(|&v| {
            if v == 0 {
                '.'
            } else {
                char::from_digit(v as u32, 10).unwrap()
            }
        })
        .collect()
}

/// Fixed-capacity bitset over candidate indices (≤ 729).
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct CandSet {
    words: [u64; CandSet::WORDS],
}

impl CandSet {
    pub const WORDS: usize = MAX_CANDS.div_ceil(64);
    pub const EMPTY: CandSet = CandSet {
        words: [0; CandSet::WORDS],
    };

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 != 0
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn intersect_with(&mut self, other: &CandSet) {
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a &= b;
        }
    }

    #[inline]
    pub fn subtract(&mut self, other: &CandSet) {
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a &= !b;
        }
    }

    #[inline]
    pub fn intersection(&self, other: &CandSet) -> CandSet {
        let mut out = *self;
        out.intersect_with(other);
        out
    }

    pub fn iter(&self) -> CandSetIter<'_> {
        CandSetIter {
            set: self,
            word: 0,
            bits: self.words[0],
        }
    }
}

impl fmt::Debug for CandSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct CandSetIter<'a> {
    set: &'a CandSet,
    word: usize,
    bits: u64,
}

impl Iterator for CandSetIter<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.bits != 0 {
                let b = self.bits.trailing_zeros() as usize;
                self.bits &= self.bits - 1;
                return Some(self.word * 64 + b);
            }
            self.word += 1;
            if self.word >= CandSet::WORDS {
                return None;
            }
            self.bits = self.set.words[self.word];
        }
    }
}

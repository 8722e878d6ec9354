//! Exact backtracking solution counting, minimality testing,
//! complete-grid generation, and the exhaustive 4×4 oracle.
//!
//! The solver is a constraint-propagated backtracker: naked and hidden
//! singles are propagated to a fixpoint, then the most-constrained open
//! cell is branched on. States are small `Copy` structs so branching is a
//! memcpy. Uniqueness checks on deletion paths use
//! [`has_alternative_solution`], which searches for a solution differing
//! from a known one at a single cell and is much cheaper than a full
//! two-solution count.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::board::{Board, Grid, Puzzle, MAX_CELLS};
use crate::Error;

const MAX_SIDE: usize = 9;

/// Backtracking state. Kept `Copy` so branch nodes are cheap to fork.
#[derive(Clone, Copy)]
struct State {
    /// Candidate mask per cell; assigned cells hold their single bit.
    cands: [u16; MAX_CELLS],
    assigned: [u8; MAX_CELLS],
    row_used: [u16; MAX_SIDE],
    col_used: [u16; MAX_SIDE],
    box_used: [u16; MAX_SIDE],
    n_open: u16,
}

struct Ctx<'b> {
    board: &'b Board,
    side: usize,
    full: u16,
}

impl<'b> Ctx<'b> {
    fn new(board: &'b Board) -> Ctx<'b> {
        Ctx {
            board,
            side: board.side(),
            full: (1u16 << board.side()) - 1,
        }
    }

    /// Builds a state from clue values; `None` means a direct conflict.
    fn init(&self, values: &[u8]) -> Option<State> {
        let cells = self.board.cells();
        let mut st = State {
            cands: [0; MAX_CELLS],
            assigned: [0; MAX_CELLS],
            row_used: [0; MAX_SIDE],
            col_used: [0; MAX_SIDE],
            box_used: [0; MAX_SIDE],
            n_open: 0,
        };
        for cell in 0..cells {
            let v = values[cell];
            if v != 0 {
                let bit = 1u16 << (v - 1);
                let (r, c) = (cell / self.side, cell % self.side);
                let b = self.board.cell_box(cell);
                if st.row_used[r] & bit != 0 || st.col_used[c] & bit != 0 || st.box_used[b] & bit != 0
                {
                    return None;
                }
                st.row_used[r] |= bit;
                st.col_used[c] |= bit;
                st.box_used[b] |= bit;
                st.assigned[cell] = v;
                st.cands[cell] = bit;
            }
        }
        for cell in 0..cells {
            if st.assigned[cell] == 0 {
                let (r, c) = (cell / self.side, cell % self.side);
                let b = self.board.cell_box(cell);
                st.cands[cell] =
                    self.full & !(st.row_used[r] | st.col_used[c] | st.box_used[b]);
                if st.cands[cell] == 0 {
                    return None;
                }
                st.n_open += 1;
            }
        }
        Some(st)
    }

    /// Assigns `value` at `cell` and propagates eliminations through peers.
    /// Returns false on contradiction.
    fn assign(&self, st: &mut State, cell: usize, value: u8) -> bool {
        let mut queue = [(0usize, 0u8); MAX_CELLS];
        let mut qlen = 0;
        queue[qlen] = (cell, value);
        qlen += 1;
        while qlen > 0 {
            qlen -= 1;
            let (cell, v) = queue[qlen];
            if st.assigned[cell] != 0 {
                if st.assigned[cell] == v {
                    continue;
                }
                return false;
            }
            let bit = 1u16 << (v - 1);
            if st.cands[cell] & bit == 0 {
                return false;
            }
            let (r, c) = (cell / self.side, cell % self.side);
            let b = self.board.cell_box(cell);
            st.assigned[cell] = v;
            st.cands[cell] = bit;
            st.row_used[r] |= bit;
            st.col_used[c] |= bit;
            st.box_used[b] |= bit;
            st.n_open -= 1;
            for &p in self.board.peers(cell) {
                if st.assigned[p] == 0 && st.cands[p] & bit != 0 {
                    let left = st.cands[p] & !bit;
                    st.cands[p] = left;
                    if left == 0 {
                        return false;
                    }
                    if left.count_ones() == 1 {
                        queue[qlen] = (p, left.trailing_zeros() as u8 + 1);
                        qlen += 1;
                    }
                }
            }
        }
        true
    }

    /// Naked singles are handled by `assign`; this adds hidden singles per
    /// unit, repeating until nothing new is found. Returns false on
    /// contradiction.
    fn fixpoint(&self, st: &mut State) -> bool {
        loop {
            let mut progressed = false;
            for (ui, unit) in self.board.units().iter().enumerate() {
                let used = |st: &State| {
                    if ui < self.side {
                        st.row_used[ui]
                    } else if ui < 2 * self.side {
                        st.col_used[ui - self.side]
                    } else {
                        st.box_used[ui - 2 * self.side]
                    }
                };
                let mut missing = self.full & !used(st);
                while missing != 0 {
                    let bit = missing & missing.wrapping_neg();
                    missing &= missing - 1;
                    // cascaded assignments may have filled this value in
                    // the meantime
                    if used(st) & bit != 0 {
                        continue;
                    }
                    let mut spot = usize::MAX;
                    let mut nspots = 0;
                    for &cell in unit {
                        if st.assigned[cell] == 0 && st.cands[cell] & bit != 0 {
                            nspots += 1;
                            if nspots > 1 {
                                break;
                            }
                            spot = cell;
                        }
                    }
                    if nspots == 0 {
                        return false;
                    }
                    if nspots == 1 {
                        if !self.assign(st, spot, bit.trailing_zeros() as u8 + 1) {
                            return false;
                        }
                        progressed = true;
                    }
                }
            }
            if !progressed {
                return true;
            }
        }
    }

    fn pick_cell(&self, st: &State) -> usize {
        let mut best = usize::MAX;
        let mut best_n = u32::MAX;
        for cell in 0..self.board.cells() {
            if st.assigned[cell] == 0 {
                let n = st.cands[cell].count_ones();
                if n < best_n {
                    best_n = n;
                    best = cell;
                    if n == 2 {
                        break;
                    }
                }
            }
        }
        best
    }

    /// Counts solutions up to `cap`, optionally recording the first one.
    fn count(&self, st: State, cap: usize, count: &mut usize, first: &mut Option<Vec<u8>>) {
        let mut st = st;
        if !self.fixpoint(&mut st) {
            return;
        }
        if st.n_open == 0 {
            if first.is_none() {
                *first = Some(st.assigned[..self.board.cells()].to_vec());
            }
            *count += 1;
            return;
        }
        let cell = self.pick_cell(&st);
        let mut bits = st.cands[cell];
        while bits != 0 && *count < cap {
            let bit = bits & bits.wrapping_neg();
            bits &= bits - 1;
            let mut child = st;
            if self.assign(&mut child, cell, bit.trailing_zeros() as u8 + 1) {
                self.count(child, cap, count, first);
            }
        }
    }

    /// Depth-first search for one solution with `rng`-shuffled value order.
    /// Naked-single propagation only: hidden-single scans cost more than
    /// they prune when filling from a sparse state.
    fn solve_random<R: Rng>(&self, st: State, rng: &mut R) -> Option<Vec<u8>> {
        if st.n_open == 0 {
            return Some(st.assigned[..self.board.cells()].to_vec());
        }
        let cell = self.pick_cell(&st);
        let mut vals: [u8; MAX_SIDE] = [0; MAX_SIDE];
        let mut n = 0;
        let mut bits = st.cands[cell];
        while bits != 0 {
            vals[n] = bits.trailing_zeros() as u8 + 1;
            bits &= bits - 1;
            n += 1;
        }
        vals[..n].shuffle(rng);
        for &v in &vals[..n] {
            let mut child = st;
            if self.assign(&mut child, cell, v) {
                if let Some(sol) = self.solve_random(child, rng) {
                    return Some(sol);
                }
            }
        }
        None
    }

    /// Collects every solution into `out` (used only for k = 2).
    fn collect_all(&self, st: State, out: &mut Vec<Vec<u8>>) {
        let mut st = st;
        if !self.fixpoint(&mut st) {
            return;
        }
        if st.n_open == 0 {
            out.push(st.assigned[..self.board.cells()].to_vec());
            return;
        }
        let cell = self.pick_cell(&st);
        let mut bits = st.cands[cell];
        while bits != 0 {
            let bit = bits & bits.wrapping_neg();
            bits &= bits - 1;
            let mut child = st;
            if self.assign(&mut child, cell, bit.trailing_zeros() as u8 + 1) {
                self.collect_all(child, out);
            }
        }
    }
}

/// Number of solutions of `p`, capped at `cap`. Inconsistent puzzles
/// yield 0.
pub fn count_solutions(p: &Puzzle, board: &Board, cap: usize) -> usize {
    count_solutions_with_first(p, board, cap).0
}

/// Same as [`count_solutions`] but also returns the first solution found
/// (in deterministic scan order).
pub fn count_solutions_with_first(
    p: &Puzzle,
    board: &Board,
    cap: usize,
) -> (usize, Option<Grid>) {
    assert!(cap >= 1);
    let ctx = Ctx::new(board);
    let Some(st) = ctx.init(p.values()) else {
        return (0, None);
    };
    let mut count = 0;
    let mut first = None;
    ctx.count(st, cap, &mut count, &mut first);
    let grid = first.map(|vals| {
        Grid::from_puzzle(board, Puzzle::from_values(board, vals).unwrap()).unwrap()
    });
    (count, grid)
}

/// True iff deleting the clue at `cell` leaves a puzzle with more than one
/// solution, i.e. some solution assigns a value other than `values[cell]`
/// there. `values[cell]` must be a clue.
pub fn has_alternative_solution(values: &[u8], cell: usize, board: &Board) -> bool {
    debug_assert!(values[cell] != 0);
    let banned = values[cell];
    let ctx = Ctx::new(board);
    let mut open = values.to_vec();
    open[cell] = 0;
    let Some(mut st) = ctx.init(&open) else {
        return false;
    };
    let bit = 1u16 << (banned - 1);
    if st.assigned[cell] != 0 {
        // propagation from init cannot assign here (init does no singles),
        // but guard anyway
        return st.assigned[cell] != banned;
    }
    st.cands[cell] &= !bit;
    if st.cands[cell] == 0 {
        return false;
    }
    if st.cands[cell].count_ones() == 1 {
        let v = st.cands[cell].trailing_zeros() as u8 + 1;
        if !ctx.assign(&mut st, cell, v) {
            return false;
        }
    }
    let mut count = 0;
    let mut first = None;
    ctx.count(st, 1, &mut count, &mut first);
    count > 0
}

/// Minimality per the definition: unique solution, and deleting any clue
/// yields several solutions.
pub fn is_minimal(p: &Puzzle, board: &Board) -> bool {
    let n = count_solutions(p, board, 2);
    if n != 1 {
        return false;
    }
    p.clue_cells()
        .all(|cell| has_alternative_solution(p.values(), cell, board))
}

/// A uniformly-shuffled backtracking fill. Deterministic for a fixed rng
/// stream; the output distribution is not claimed to be uniform over
/// grids.
pub fn random_complete_grid<R: Rng>(rng: &mut R, board: &Board) -> Grid {
    let ctx = Ctx::new(board);
    // The k diagonal boxes share no unit, so independent random fills are
    // always consistent; prefilling them cuts the backtracking depth
    // without restricting which grids can be produced.
    let side = board.side();
    let k = board.k();
    let mut perm: Vec<u8> = (1..=side as u8).collect();
    loop {
        // not every prefill is completable (possible on 4×4): retry
        let mut values = vec![0u8; board.cells()];
        for d in 0..k {
            perm.shuffle(rng);
            for (i, &v) in perm.iter().enumerate() {
                let (r, c) = (d * k + i / k, d * k + i % k);
                values[r * side + c] = v;
            }
        }
        let Some(st) = ctx.init(&values) else { continue };
        if let Some(vals) = ctx.solve_random(st, rng) {
            return Grid::from_puzzle(board, Puzzle::from_values(board, vals).unwrap()).unwrap();
        }
    }
}

/// All complete 4×4 grids (there are 288). Rejects larger boards: the 9×9
/// grid count is about 6.67e21, far beyond enumeration.
pub fn enumerate_complete_grids(board: &Board) -> Result<Vec<Grid>, Error> {
    if board.k() != 2 {
        return Err(Error::OracleBoardTooLarge(board.k()));
    }
    let ctx = Ctx::new(board);
    let st = ctx.init(&vec![0; board.cells()]).expect("empty board");
    let mut out = Vec::new();
    ctx.collect_all(st, &mut out);
    Ok(out
        .into_iter()
        .map(|vals| {
            Grid::from_puzzle(board, Puzzle::from_values(board, vals).unwrap()).unwrap()
        })
        .collect())
}

/// Exhaustive enumeration of every minimal 4×4 puzzle.
///
/// For each complete grid G, a sub-puzzle (a subset of G's cells kept as
/// clues) has several solutions iff its cell set is contained in the
/// agreement set of G with some other grid. Marking the 287 agreement
/// masks and closing downward over the 2¹⁶ subset lattice decides
/// uniqueness for every subset at once; minimality then only needs the
/// sixteen single-deletion lookups.
pub fn enumerate_all_minimals(board: &Board) -> Result<Vec<Puzzle>, Error> {
    let grids = enumerate_complete_grids(board)?;
    let cells = board.cells();
    let mut out = Vec::new();
    let mut multi = vec![false; 1 << cells];
    for g in &grids {
        for slot in multi.iter_mut() {
            *slot = false;
        }
        for h in &grids {
            if h == g {
                continue;
            }
            let mut mask = 0usize;
            for i in 0..cells {
                if g.value(i) == h.value(i) {
                    mask |= 1 << i;
                }
            }
            multi[mask] = true;
        }
        for m in (0..1usize << cells).rev() {
            if multi[m] {
                let mut bits = m;
                while bits != 0 {
                    let b = bits & bits.wrapping_neg();
                    bits &= bits - 1;
                    multi[m ^ b] = true;
                }
            }
        }
        for m in 0..1usize << cells {
            if multi[m] {
                continue;
            }
            let mut bits = m;
            let mut minimal = true;
            while bits != 0 {
                let b = bits & bits.wrapping_neg();
                bits &= bits - 1;
                if !multi[m ^ b] {
                    minimal = false;
                    break;
                }
            }
            if minimal {
                let values: Vec<u8> = (0..cells)
                    .map(|i| if m >> i & 1 != 0 { g.value(i) } else { 0 })
                    .collect();
                out.push(Puzzle::from_values(board, values).unwrap());
            }
        }
    }
    Ok(out)
}

/// Per-clue-count tallies of a puzzle collection.
pub fn clue_count_histogram(puzzles: &[Puzzle]) -> Vec<(usize, usize)> {
    let mut map = std::collections::BTreeMap::new();
    for p in puzzles {
        *map.entry(p.clue_count()).or_insert(0usize) += 1;
    }
    map.into_iter().collect()
}

//! The resolution engine: constraint propagation (L0), zt-whip search,
//! the L_n theory hierarchy and the NRCZT rating.
//!
//! The CSP view has four variable families per board: a cell holds a
//! value, a (row, value) pair holds a column, a (column, value) pair
//! holds a row, and a (box, value) pair holds a position. Candidates are
//! (value, row, column) triples shared by all four families, and two
//! candidates are incompatible exactly when they are linked.
//!
//! L0 asserts every variable left with a single candidate, which across
//! the four families covers naked and hidden singles. L_n adds
//! eliminations by zt-whips of length at most n. A whip built on a target
//! Z is an alternating sequence L1, R1, …, Ln (no Rn) of distinct
//! candidates such that each L_k is linked to the previous right-linking
//! candidate, each R_k is the only candidate of L_k's variable compatible
//! with Z and the previous Rs, and L_n's variable has no compatible
//! candidate left at all; such a target can be eliminated.

use crate::board::{Board, CandSet, Candidate, Puzzle};
use crate::solver::count_solutions;
use crate::Error;

/// A knowledge state: asserted values plus the live candidate set.
#[derive(Clone, Debug)]
pub struct ResolutionState {
    /// Live candidates, by candidate index.
    pub cands: CandSet,
    /// Asserted value per cell (0 = unasserted).
    pub asserted: Vec<u8>,
    /// Remaining live candidates per variable; stale for decided vars.
    var_count: Vec<u8>,
    var_decided: Vec<bool>,
    n_asserted: usize,
    contradictory: bool,
}

impl ResolutionState {
    pub fn is_solved(&self, board: &Board) -> bool {
        self.n_asserted == board.cells()
    }

    pub fn is_contradictory(&self) -> bool {
        self.contradictory
    }

    pub fn candidate_count(&self) -> usize {
        self.cands.len()
    }

    /// Asserts a value for a cell: marks the candidate's four variables
    /// decided and eliminates every linked candidate.
    fn assert_cand(&mut self, cand: usize, board: &Board) {
        if self.contradictory {
            return;
        }
        let (cell, v) = board.cand_decode(cand);
        if self.asserted[cell] != 0 {
            if self.asserted[cell] as usize != v {
                self.contradictory = true;
            }
            return;
        }
        if !self.cands.contains(cand) {
            self.contradictory = true;
            return;
        }
        self.asserted[cell] = v as u8;
        self.n_asserted += 1;
        for &var in board.cand_vars(cand) {
            self.var_decided[var] = true;
        }
        self.cands.remove(cand);
        let mut elim = *board.links(cand);
        elim.intersect_with(&self.cands);
        for e in elim.iter() {
            self.eliminate(e, board);
        }
    }

    /// Removes a live candidate, maintaining variable counts.
    fn eliminate(&mut self, cand: usize, board: &Board) {
        if !self.cands.contains(cand) {
            return;
        }
        self.cands.remove(cand);
        for &var in board.cand_vars(cand) {
            if !self.var_decided[var] {
                self.var_count[var] -= 1;
                if self.var_count[var] == 0 {
                    self.contradictory = true;
                }
            }
        }
    }
}

/// Builds the initial state of a puzzle: clues asserted, candidates
/// reduced by direct links to clues. No single-candidate assertions yet;
/// that is [`apply_l0`]'s job.
pub fn init_state(p: &Puzzle, board: &Board) -> Result<ResolutionState, Error> {
    let mut cands = CandSet::EMPTY;
    for i in 0..board.ncands() {
        cands.insert(i);
    }
    let mut st = ResolutionState {
        cands,
        asserted: vec![0; board.cells()],
        var_count: vec![board.side() as u8; board.nvars()],
        var_decided: vec![false; board.nvars()],
        n_asserted: 0,
        contradictory: false,
    };
    for cell in 0..board.cells() {
        let v = p.value(cell);
        if v != 0 {
            st.assert_cand(board.cand_index(cell, v as usize), board);
        }
    }
    if st.contradictory {
        return Err(Error::Inconsistent);
    }
    Ok(st)
}

/// Runs L0 to its fixpoint: asserts every undecided variable with a
/// unique live candidate (naked and hidden singles across the four
/// families), propagating eliminations. Idempotent.
pub fn apply_l0(st: &mut ResolutionState, board: &Board) {
    loop {
        let mut progressed = false;
        for var in 0..board.nvars() {
            if st.contradictory {
                return;
            }
            if !st.var_decided[var] && st.var_count[var] == 1 {
                let cand = board
                    .var_cands(var)
                    .iter()
                    .copied()
                    .find(|&c| st.cands.contains(c))
                    .expect("count said one candidate left");
                st.assert_cand(cand, board);
                progressed = true;
            }
        }
        if !progressed {
            return;
        }
    }
}

/// One step of a whip: left-linking candidate, the variable it shares
/// with the (absent for the last step) right-linking candidate.
#[derive(Clone, Copy, Debug)]
pub struct WhipStep {
    pub left: usize,
    pub var: usize,
    /// `None` only for the final step.
    pub right: Option<usize>,
}

/// A zt-whip: target plus its alternating candidate sequence.
#[derive(Clone, Debug)]
pub struct Whip {
    pub target: usize,
    pub steps: Vec<WhipStep>,
}

impl Whip {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Re-checks the four defining clauses of a whip against a state, from
/// first principles. Kept independent of the search code so it can vet
/// its output.
pub fn validate_whip(w: &Whip, st: &ResolutionState, board: &Board) -> Result<(), String> {
    let n = w.steps.len();
    if n == 0 {
        return Err("empty whip".into());
    }
    if w.steps[n - 1].right.is_some() {
        return Err("last step must have no right-linking candidate".into());
    }
    let mut all = vec![w.target];
    for (i, s) in w.steps.iter().enumerate() {
        all.push(s.left);
        if let Some(r) = s.right {
            if i == n - 1 {
                return Err("right candidate on final step".into());
            }
            all.push(r);
        } else if i != n - 1 {
            return Err("missing right candidate before final step".into());
        }
    }
    // 2n-1 candidates plus the target, all different and all live
    let mut sorted = all.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != all.len() {
        return Err("candidates not pairwise different".into());
    }
    for &c in &all {
        if !st.cands.contains(c) {
            return Err(format!("candidate {c} not live in state"));
        }
    }
    // clause 1: L_k linked to R_{k-1}, with R_0 = Z
    let mut prev_r = w.target;
    for s in &w.steps {
        if !board.linked_idx(s.left, prev_r) {
            return Err("left candidate not linked to previous right-linking candidate".into());
        }
        if let Some(r) = s.right {
            prev_r = r;
        }
    }
    // clauses 2-4 via the panel of each step's variable: live candidates
    // of the variable not linked to Z nor to any previous right-linking
    // candidate. Z and the previous Rs themselves stay in panels: they
    // are held true by the reasoning, so they still count as possible
    // values for their variables.
    let mut prior_rs: Vec<usize> = Vec::new();
    for (i, s) in w.steps.iter().enumerate() {
        if !board.cand_vars(s.left).contains(&s.var) {
            return Err("left candidate does not belong to the step variable".into());
        }
        let panel: Vec<usize> = board
            .var_cands(s.var)
            .iter()
            .copied()
            .filter(|&c| st.cands.contains(c))
            .filter(|&c| !board.linked_idx(c, w.target))
            .filter(|&c| prior_rs.iter().all(|&r| !board.linked_idx(c, r)))
            .collect();
        match s.right {
            Some(r) => {
                if !board.cand_vars(r).contains(&s.var) {
                    return Err("right candidate does not belong to the step variable".into());
                }
                if panel != vec![r] {
                    return Err(format!(
                        "step {i}: right candidate is not the unique compatible candidate \
                         (panel {panel:?})"
                    ));
                }
                prior_rs.push(r);
            }
            None => {
                if !panel.is_empty() {
                    return Err(format!(
                        "final step: variable still has compatible candidates {panel:?}"
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Depth-first search for a zt-whip of length ≤ `max_len` built on
/// `target`. Candidates and variables are scanned in fixed order, so the
/// result is deterministic. `partial_count` is incremented once per
/// partial-whip extension explored.
pub fn find_zt_whip(
    st: &ResolutionState,
    board: &Board,
    target: usize,
    max_len: usize,
    partial_count: &mut u64,
) -> Option<Whip> {
    if max_len == 0 || !st.cands.contains(target) {
        return None;
    }
    // alive = live candidates not contradicted by Z and the chosen Rs;
    // Z itself stays in (it is held true, not eliminated)
    let mut alive = st.cands;
    alive.subtract(board.links(target));
    let mut used = CandSet::EMPTY;
    used.insert(target);
    let mut steps: Vec<WhipStep> = Vec::with_capacity(max_len);
    if dfs(
        st, board, max_len, target, &mut alive, &mut used, &mut steps, partial_count,
    ) {
        return Some(Whip {
            target,
            steps,
        });
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    st: &ResolutionState,
    board: &Board,
    max_len: usize,
    prev_r: usize,
    alive: &mut CandSet,
    used: &mut CandSet,
    steps: &mut Vec<WhipStep>,
    partial_count: &mut u64,
) -> bool {
    let depth = steps.len() + 1; // index of the step being chosen
    let mut lefts = st.cands;
    lefts.intersect_with(board.links(prev_r));
    lefts.subtract(used);
    for left in lefts.iter() {
        for &var in board.cand_vars(left) {
            *partial_count += 1;
            let mut panel_iter = board
                .var_cands(var)
                .iter()
                .copied()
                .filter(|&c| alive.contains(c));
            let first = panel_iter.next();
            match first {
                None => {
                    // clause 4: no compatible candidate left for this
                    // variable; the whip closes here
                    steps.push(WhipStep {
                        left,
                        var,
                        right: None,
                    });
                    return true;
                }
                Some(right) => {
                    // the single compatible candidate may be Z or an
                    // earlier R; candidates must stay pairwise different,
                    // so that branch cannot be extended
                    if panel_iter.next().is_some() || depth >= max_len || used.contains(right) {
                        continue;
                    }
                    steps.push(WhipStep {
                        left,
                        var,
                        right: Some(right),
                    });
                    used.insert(left);
                    used.insert(right);
                    let saved_alive = *alive;
                    alive.subtract(board.links(right));
                    if dfs(
                        st, board, max_len, right, alive, used, steps, partial_count,
                    ) {
                        return true;
                    }
                    *alive = saved_alive;
                    used.remove(left);
                    used.remove(right);
                    steps.pop();
                }
            }
        }
    }
    false
}

/// One rule application in a solve trace.
#[derive(Clone, Debug)]
pub struct Elimination {
    pub target: Candidate,
    pub whip_len: usize,
}

/// Result of running the L_n theory on a puzzle.
#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub solved: bool,
    pub contradictory: bool,
    pub trace: Vec<Elimination>,
    pub partial_whip_count: u64,
    pub state: ResolutionState,
}

/// Repeats { L0; if stuck, apply the first shortest whip elimination of
/// length ≤ n } until solved or no rule applies.
pub fn solve_with_ln(p: &Puzzle, board: &Board, n: usize) -> Result<SolveOutcome, Error> {
    let mut st = init_state(p, board)?;
    let mut trace = Vec::new();
    let mut partial = 0u64;
    loop {
        apply_l0(&mut st, board);
        if st.contradictory {
            return Ok(SolveOutcome {
                solved: false,
                contradictory: true,
                trace,
                partial_whip_count: partial,
                state: st,
            });
        }
        if st.is_solved(board) {
            return Ok(SolveOutcome {
                solved: true,
                contradictory: false,
                trace,
                partial_whip_count: partial,
                state: st,
            });
        }
        let mut applied = false;
        'lens: for len in 1..=n {
            for target in st.cands.iter() {
                if let Some(w) = find_zt_whip(&st, board, target, len, &mut partial) {
                    debug_assert_eq!(validate_whip(&w, &st, board), Ok(()));
                    st.eliminate(target, board);
                    trace.push(Elimination {
                        target: board.cand_to_candidate(target),
                        whip_len: w.len(),
                    });
                    applied = true;
                    break 'lens;
                }
            }
        }
        if !applied {
            return Ok(SolveOutcome {
                solved: false,
                contradictory: st.contradictory,
                trace,
                partial_whip_count: partial,
                state: st,
            });
        }
    }
}

/// NRCZT rating value.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Rating {
    Level(usize),
    AboveCap,
}

impl std::fmt::Display for Rating {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Rating::Level(n) => write!(f, "{n}"),
            Rating::AboveCap => write!(f, "A"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RatingResult {
    pub rating: Rating,
    pub trace: Vec<Elimination>,
    pub partial_whip_count: u64,
}

/// The smallest n ≤ cap whose theory L_n solves the puzzle. Rejects
/// puzzles without a unique solution.
pub fn nrczt_rating(p: &Puzzle, board: &Board, cap: usize) -> Result<RatingResult, Error> {
    if count_solutions(p, board, 2) != 1 {
        return Err(Error::NotUniqueSolution);
    }
    let mut last = None;
    for n in 0..=cap {
        let outcome = solve_with_ln(p, board, n)?;
        if outcome.solved {
            return Ok(RatingResult {
                rating: Rating::Level(n),
                trace: outcome.trace,
                partial_whip_count: outcome.partial_whip_count,
            });
        }
        last = Some(outcome);
    }
    let last = last.expect("cap >= 0 ran at least once");
    Ok(RatingResult {
        rating: Rating::AboveCap,
        trace: last.trace,
        partial_whip_count: last.partial_whip_count,
    })
}

/// One line of a rating file.
#[derive(Clone, Debug)]
pub struct RatingLine {
    pub puzzle_line: String,
    pub rating: Rating,
    pub partial_whip_count: u64,
}

pub fn write_ratings<W: std::io::Write>(
    w: &mut W,
    header: &[(&str, String)],
    lines: &[RatingLine],
) -> std::io::Result<()> {
    for (key, value) in header {
        writeln!(w, "# {key}: {value}")?;
    }
    for l in lines {
        writeln!(w, "{}\t{}\t{}", l.puzzle_line, l.rating, l.partial_whip_count)?;
    }
    Ok(())
}

pub fn read_ratings<R: std::io::BufRead>(r: R) -> Result<Vec<RatingLine>, Error> {
    let mut lines = Vec::new();
    for line in r.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split('\t');
        let puzzle_line = parts
            .next()
            .ok_or_else(|| Error::Format("empty rating line".into()))?
            .to_string();
        let rating = match parts.next() {
            Some("A") => Rating::AboveCap,
            Some(s) => Rating::Level(
                s.parse()
                    .map_err(|_| Error::Format(format!("bad rating in line: {line}")))?,
            ),
            None => return Err(Error::Format(format!("missing rating in line: {line}"))),
        };
        let partial_whip_count = match parts.next() {
            Some(s) => s
                .parse()
                .map_err(|_| Error::Format(format!("bad whip count in line: {line}")))?,
            None => 0,
        };
        lines.push(RatingLine {
            puzzle_line,
            rating,
            partial_whip_count,
        });
    }
    Ok(lines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::{format_puzzle, parse_puzzle, Board, Grid};
    use crate::generate::{record_rng, top_down_one};
    use crate::solver::{
        count_solutions_with_first, enumerate_all_minimals, random_complete_grid,
    };
    use rand::seq::SliceRandom;
    use rand::Rng;

    fn b9() -> Board {
        Board::new(3).unwrap()
    }

    fn b4() -> Board {
        Board::new(2).unwrap()
    }

    #[test]
    fn empty_state_has_all_candidates() {
        let b = b9();
        let st = init_state(&Puzzle::empty(&b), &b).unwrap();
        assert_eq!(st.candidate_count(), 729);
        assert_eq!(st.asserted.iter().filter(|&&v| v != 0).count(), 0);
    }

    #[test]
    fn complete_grid_fully_asserted() {
        let b = b9();
        let g = random_complete_grid(&mut record_rng(1, 0), &b);
        let st = init_state(g.as_puzzle(), &b).unwrap();
        assert!(st.is_solved(&b));
        assert_eq!(st.candidate_count(), 0);
    }

    #[test]
    fn single_clue_eliminations() {
        let b = b9();
        let p = parse_puzzle(&format!("5{}", ".".repeat(80)), &b).unwrap();
        let st = init_state(&p, &b).unwrap();
        // value 5 gone from row 1, column 1, box 1; other values gone at r1c1
        for cell in b.peers(0) {
            assert!(!st.cands.contains(b.cand_index(*cell, 5)), "cell {cell}");
        }
        for v in 1..=9 {
            assert!(!st.cands.contains(b.cand_index(0, v)));
        }
        // 729 - 8 (same cell) - 20 (peers, value 5) - 1 (asserted itself)
        assert_eq!(st.candidate_count(), 700);
    }

    #[test]
    fn l0_is_idempotent() {
        let b = b9();
        let g = random_complete_grid(&mut record_rng(2, 0), &b);
        let rec = top_down_one(&mut record_rng(2, 1), &g, &b);
        let mut st = init_state(&rec.puzzle, &b).unwrap();
        apply_l0(&mut st, &b);
        let snapshot = st.cands;
        let asserted = st.asserted.clone();
        apply_l0(&mut st, &b);
        assert_eq!(st.cands, snapshot);
        assert_eq!(st.asserted, asserted);
    }

    /// Finds a deterministic top-down 9×9 puzzle with the given oracle
    /// property.
    fn find_puzzle(pred: impl Fn(&Puzzle, &Board) -> bool) -> Puzzle {
        let b = b9();
        for i in 0..200 {
            let mut rng = record_rng(77, i);
            let g = random_complete_grid(&mut rng, &b);
            let rec = top_down_one(&mut rng, &g, &b);
            if pred(&rec.puzzle, &b) {
                return rec.puzzle;
            }
        }
        panic!("no puzzle with the requested property in 200 draws");
    }

    #[test]
    fn singles_solvable_puzzle_rates_zero() {
        let b = b9();
        // independently characterised: solvable by L0 alone
        let p = find_puzzle(|p, b| {
            let mut st = init_state(p, b).unwrap();
            apply_l0(&mut st, b);
            st.is_solved(b)
        });
        let res = nrczt_rating(&p, &b, 16).unwrap();
        assert_eq!(res.rating, Rating::Level(0));
        assert!(res.trace.is_empty());
    }

    #[test]
    fn nonzero_rating_and_theory_monotonicity() {
        let b = b9();
        let p = find_puzzle(|p, b| {
            let mut st = init_state(p, b).unwrap();
            apply_l0(&mut st, b);
            !st.is_solved(b)
        });
        let res = nrczt_rating(&p, &b, 16).unwrap();
        let Rating::Level(n) = res.rating else {
            panic!("expected a finite rating");
        };
        assert!(n >= 1);
        assert!(!solve_with_ln(&p, &b, n - 1).unwrap().solved);
        for m in n..=(n + 2) {
            assert!(solve_with_ln(&p, &b, m).unwrap().solved, "L_{m}");
        }
    }

    #[test]
    fn whips_found_during_solves_validate_and_are_sound() {
        let b = b9();
        for i in 0..10 {
            let mut rng = record_rng(123, i);
            let g = random_complete_grid(&mut rng, &b);
            let rec = top_down_one(&mut rng, &g, &b);
            let res = nrczt_rating(&rec.puzzle, &b, 16).unwrap();
            // soundness: no elimination touches the unique solution
            for e in &res.trace {
                let cell = (e.target.row - 1) * 9 + e.target.col - 1;
                assert_ne!(
                    g.value(cell) as usize,
                    e.target.value,
                    "unsound elimination of {:?} in {}",
                    e.target,
                    format_puzzle(&rec.puzzle)
                );
            }
        }
    }

    #[test]
    fn explicit_whip_search_validates() {
        let b = b9();
        let p = find_puzzle(|p, b| {
            let mut st = init_state(p, b).unwrap();
            apply_l0(&mut st, b);
            !st.is_solved(b)
        });
        let mut st = init_state(&p, &b).unwrap();
        apply_l0(&mut st, &b);
        let mut partial = 0;
        let mut found = 0;
        for target in st.cands.iter() {
            if let Some(w) = find_zt_whip(&st, &b, target, 5, &mut partial) {
                validate_whip(&w, &st, &b).unwrap();
                assert!(w.len() <= 5);
                assert_eq!(w.target, target);
                found += 1;
            }
        }
        assert!(found > 0, "stuck state should admit some whip");
        assert!(partial > 0);
    }

    #[test]
    fn no_whips_on_solved_state() {
        let b = b9();
        let g = random_complete_grid(&mut record_rng(5, 0), &b);
        let st = init_state(g.as_puzzle(), &b).unwrap();
        let mut partial = 0;
        for target in 0..b.ncands() {
            assert!(find_zt_whip(&st, &b, target, 5, &mut partial).is_none());
        }
    }

    #[test]
    fn rating_rejects_multi_solution() {
        let b = b9();
        assert!(matches!(
            nrczt_rating(&Puzzle::empty(&b), &b, 3),
            Err(Error::NotUniqueSolution)
        ));
    }

    #[test]
    fn oracle_4x4_rating_sweep() {
        let b = b4();
        let minimals = enumerate_all_minimals(&b).unwrap();
        let mut max_rating = 0;
        for p in minimals.iter().step_by(211) {
            let res = nrczt_rating(p, &b, 8).unwrap();
            match res.rating {
                Rating::Level(n) => max_rating = max_rating.max(n),
                Rating::AboveCap => panic!("4×4 minimal above cap"),
            }
        }
        // 4×4 minimal puzzles are easy; the sweep just pins the bound
        assert!(max_rating <= 2, "unexpected 4×4 rating {max_rating}");
    }

    /// Applies a random (value relabeling, row/column permutation within
    /// bands, band/stack permutation, transpose) symmetry.
    fn random_symmetry<R: Rng>(p: &Puzzle, b: &Board, rng: &mut R) -> Puzzle {
        let side = b.side();
        let k = b.k();
        let mut relabel: Vec<u8> = (1..=side as u8).collect();
        relabel.shuffle(rng);
        let mut bands: Vec<usize> = (0..k).collect();
        bands.shuffle(rng);
        let mut rows_in: Vec<Vec<usize>> = (0..k)
            .map(|_| {
                let mut v: Vec<usize> = (0..k).collect();
                v.shuffle(rng);
                v
            })
            .collect();
        let mut stacks: Vec<usize> = (0..k).collect();
        stacks.shuffle(rng);
        let mut cols_in: Vec<Vec<usize>> = (0..k)
            .map(|_| {
                let mut v: Vec<usize> = (0..k).collect();
                v.shuffle(rng);
                v
            })
            .collect();
        let transpose = rng.gen_bool(0.5);
        let row_map: Vec<usize> = (0..side)
            .map(|r| bands[r / k] * k + rows_in[r / k][r % k])
            .collect();
        let col_map: Vec<usize> = (0..side)
            .map(|c| stacks[c / k] * k + cols_in[c / k][c % k])
            .collect();
        let mut values = vec![0u8; b.cells()];
        for r in 0..side {
            for c in 0..side {
                let v = p.value(r * side + c);
                let (mut nr, mut nc) = (row_map[r], col_map[c]);
                if transpose {
                    std::mem::swap(&mut nr, &mut nc);
                }
                values[nr * side + nc] = if v == 0 { 0 } else { relabel[v as usize - 1] };
            }
        }
        let _ = &mut rows_in;
        let _ = &mut cols_in;
        Puzzle::from_values(b, values).unwrap()
    }

    #[test]
    fn rating_is_symmetry_invariant() {
        let b = b9();
        let mut rng = record_rng(31, 0);
        for i in 0..4 {
            let mut prng = record_rng(31, i + 1);
            let g = random_complete_grid(&mut prng, &b);
            let rec = top_down_one(&mut prng, &g, &b);
            let base = nrczt_rating(&rec.puzzle, &b, 16).unwrap().rating;
            for _ in 0..3 {
                let q = random_symmetry(&rec.puzzle, &b, &mut rng);
                assert_eq!(count_solutions_with_first(&q, &b, 2).0, 1);
                let r = nrczt_rating(&q, &b, 16).unwrap().rating;
                assert_eq!(base, r, "symmetry changed the rating");
            }
        }
    }

    #[test]
    fn rating_file_roundtrip() {
        let lines = vec![
            RatingLine {
                puzzle_line: ".".repeat(81),
                rating: Rating::Level(3),
                partial_whip_count: 42,
            },
            RatingLine {
                puzzle_line: "1".repeat(81),
                rating: Rating::AboveCap,
                partial_whip_count: 9000,
            },
        ];
        let mut buf = Vec::new();
        write_ratings(&mut buf, &[("cap", "16".to_string())], &lines).unwrap();
        let back = read_ratings(&buf[..]).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].rating, Rating::Level(3));
        assert_eq!(back[1].rating, Rating::AboveCap);
        assert_eq!(back[1].partial_whip_count, 9000);
    }

    #[test]
    fn contradictory_input_detected() {
        let b = b9();
        // a multi-solution puzzle does not solve, and a slightly broken
        // unique puzzle yields a contradictory state rather than a wrong
        // solution
        let g = random_complete_grid(&mut record_rng(8, 0), &b);
        let rec = top_down_one(&mut record_rng(8, 1), &g, &b);
        let clue = rec.puzzle.clue_cells().next().unwrap();
        let multi = rec.puzzle.without(clue);
        let out = solve_with_ln(&multi, &b, 5).unwrap();
        assert!(!out.solved);
        let _ = Grid::from_puzzle(&b, g.into_puzzle()).unwrap();
    }
}

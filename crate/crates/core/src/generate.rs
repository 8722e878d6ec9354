//! The bottom-up, top-down and controlled-bias minimal-puzzle generators,
//! plus reproducible batch orchestration.
//!
//! Batches derive one rng stream per record index from the master seed
//! (counter-based splitting), so the output multiset depends only on
//! (kind, count, seed, board) and never on the worker count or schedule.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::board::{format_puzzle, parse_puzzle, Board, Grid, Puzzle};
use crate::solver::{
    count_solutions_with_first, has_alternative_solution, random_complete_grid,
};
use crate::Error;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GeneratorKind {
    BottomUp,
    TopDown,
    ControlledBias,
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeneratorKind::BottomUp => "bottom-up",
            GeneratorKind::TopDown => "top-down",
            GeneratorKind::ControlledBias => "ctr-bias",
        })
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "bottom-up" | "bottom_up" => Ok(GeneratorKind::BottomUp),
            "top-down" | "top_down" => Ok(GeneratorKind::TopDown),
            "ctr-bias" | "controlled-bias" | "ctr_bias" => Ok(GeneratorKind::ControlledBias),
            other => Err(Error::Format(format!("unknown generator kind: {other}"))),
        }
    }
}

/// One generated minimal puzzle with its provenance.
#[derive(Clone, Debug)]
pub struct GenerationRecord {
    pub puzzle: Puzzle,
    pub kind: GeneratorKind,
    /// Complete grids drawn to produce this puzzle, including the
    /// successful one. Always 1 for bottom-up and top-down.
    pub grids_consumed: u64,
    pub seed_tag: String,
}

/// Where complete grids come from.
#[derive(Clone)]
pub enum GridSource {
    /// Fresh shuffled backtracking fill per draw.
    Random,
    /// Uniform draw from a fixed pool (e.g. the 288 enumerated 4×4 grids,
    /// or a file-backed catalog).
    Pool(std::sync::Arc<Vec<Grid>>),
}

impl GridSource {
    pub fn pool(grids: Vec<Grid>) -> GridSource {
        GridSource::Pool(std::sync::Arc::new(grids))
    }

    pub fn draw<R: Rng>(&self, rng: &mut R, board: &Board) -> Grid {
        match self {
            GridSource::Random => random_complete_grid(rng, board),
            GridSource::Pool(grids) => grids[rng.gen_range(0..grids.len())].clone(),
        }
    }
}

/// Deletions are guaranteed to preserve uniqueness while fewer than this
/// many cells are empty: the smallest unavoidable set has four cells.
const SAFE_EMPTY: usize = 3;

/// Bottom-up generation: add uniformly chosen consistent (cell, value)
/// pairs, forgetting additions that kill all solutions, until the puzzle
/// has a unique solution; then delete redundant clues in random order.
pub fn bottom_up_one<R: Rng>(rng: &mut R, board: &Board) -> GenerationRecord {
    let mut p = Puzzle::empty(board);
    loop {
        let mut pairs: Vec<(usize, u8)> = Vec::new();
        for cell in 0..board.cells() {
            if p.value(cell) != 0 {
                continue;
            }
            'values: for v in 1..=board.side() as u8 {
                for &peer in board.peers(cell) {
                    if p.value(peer) == v {
                        continue 'values;
                    }
                }
                pairs.push((cell, v));
            }
        }
        let &(cell, v) = &pairs[rng.gen_range(0..pairs.len())];
        let q = p.with(cell, v);
        let (n, _) = count_solutions_with_first(&q, board, 2);
        match n {
            0 => continue, // forget q, try another cell
            1 => {
                let puzzle = reduce_to_minimal(rng, q, board);
                return GenerationRecord {
                    puzzle,
                    kind: GeneratorKind::BottomUp,
                    grids_consumed: 1,
                    seed_tag: String::new(),
                };
            }
            _ => p = q,
        }
    }
}

/// Deletes redundant clues of a unique-solution puzzle in random order.
/// Necessity is monotone under deletion, so one pass suffices.
fn reduce_to_minimal<R: Rng>(rng: &mut R, mut p: Puzzle, board: &Board) -> Puzzle {
    let mut clues: Vec<usize> = p.clue_cells().collect();
    clues.shuffle(rng);
    for cell in clues {
        if !has_alternative_solution(p.values(), cell, board) {
            p = p.without(cell);
        }
    }
    p
}

/// Top-down generation from a complete grid: per floor, try the clues in
/// a fresh random order and delete the first whose removal keeps the
/// solution unique; when every clue fails, the puzzle is minimal.
pub fn top_down_one<R: Rng>(rng: &mut R, grid: &Grid, board: &Board) -> GenerationRecord {
    let mut p = grid.as_puzzle().clone();
    'floor: loop {
        let mut clues: Vec<usize> = p.clue_cells().collect();
        clues.shuffle(rng);
        let empties = board.cells() - clues.len();
        for &cell in &clues {
            if empties < SAFE_EMPTY || !has_alternative_solution(p.values(), cell, board) {
                p = p.without(cell);
                continue 'floor;
            }
        }
        // every deletion yields several solutions: minimal
        return GenerationRecord {
            puzzle: p,
            kind: GeneratorKind::TopDown,
            grids_consumed: 1,
            seed_tag: String::new(),
        };
    }
}

/// Controlled-bias generation: random clue deletions from a complete
/// grid, restarting from a fresh grid whenever a deletion would leave
/// several solutions before a minimal puzzle is reached.
///
/// The minimality test is deferred: after a successful deletion the next
/// uniformly drawn clue `c` is probed first. If removing `c` keeps the
/// solution unique the puzzle was certainly not minimal (`c` is
/// redundant) and the deletion doubles as the next step; only when `c`
/// fails is the full all-clues sweep run to decide output vs restart.
/// This is observationally identical to checking minimality eagerly and
/// costs one sweep per consumed grid instead of one per floor.
pub fn controlled_bias_one<R: Rng>(
    rng: &mut R,
    source: &GridSource,
    board: &Board,
) -> GenerationRecord {
    let mut grids_consumed = 0u64;
    'attempt: loop {
        let grid = source.draw(rng, board);
        grids_consumed += 1;
        let mut p = grid.as_puzzle().clone();
        let mut n_clues = board.cells();
        loop {
            let pick = rng.gen_range(0..n_clues);
            let cell = p
                .clue_cells()
                .nth(pick)
                .expect("clue index in range");
            let empties = board.cells() - n_clues;
            if empties < SAFE_EMPTY || !has_alternative_solution(p.values(), cell, board) {
                p = p.without(cell);
                n_clues -= 1;
                continue;
            }
            // removing `cell` leaves several solutions; decide whether the
            // current puzzle was minimal
            let minimal = p
                .clue_cells()
                .all(|d| has_alternative_solution(p.values(), d, board));
            if minimal {
                return GenerationRecord {
                    puzzle: p,
                    kind: GeneratorKind::ControlledBias,
                    grids_consumed,
                    seed_tag: String::new(),
                };
            }
            continue 'attempt;
        }
    }
}

/// Aggregate view of a batch.
#[derive(Clone, Debug, Default)]
pub struct BatchSummary {
    /// on(n): number of n-clue puzzles, indexed by clue count.
    pub on: std::collections::BTreeMap<usize, u64>,
    pub total_grids_consumed: u64,
    pub count: u64,
}

impl BatchSummary {
    pub fn add(&mut self, rec: &GenerationRecord) {
        *self.on.entry(rec.puzzle.clue_count()).or_insert(0) += 1;
        self.total_grids_consumed += rec.grids_consumed;
        self.count += 1;
    }
}

/// The rng stream for record `index` of a batch with master seed `seed`.
pub fn record_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Generates exactly `count` records. The output is a deterministic
/// function of (kind, count, seed, board, source) and is independent of
/// `workers`.
pub fn generate_batch(
    kind: GeneratorKind,
    count: u64,
    seed: u64,
    workers: usize,
    board: &Board,
    source: &GridSource,
) -> (Vec<GenerationRecord>, BatchSummary) {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    let records: Vec<GenerationRecord> = pool.install(|| {
        (0..count)
            .into_par_iter()
            .map(|idx| {
                let mut rng = record_rng(seed, idx);
                let mut rec = match kind {
                    GeneratorKind::BottomUp => bottom_up_one(&mut rng, board),
                    GeneratorKind::TopDown => {
                        let grid = source.draw(&mut rng, board);
                        top_down_one(&mut rng, &grid, board)
                    }
                    GeneratorKind::ControlledBias => {
                        controlled_bias_one(&mut rng, source, board)
                    }
                };
                rec.seed_tag = format!("{seed}/{idx}");
                rec
            })
            .collect()
    });
    let mut summary = BatchSummary::default();
    for rec in &records {
        summary.add(rec);
    }
    (records, summary)
}

/// Header metadata of a sample file.
#[derive(Clone, Debug, Default)]
pub struct SampleMeta {
    pub kind: Option<GeneratorKind>,
    pub board_k: Option<usize>,
    pub seed: Option<u64>,
    pub count: Option<u64>,
    pub total_grids_consumed: Option<u64>,
}

/// One line of a sample file.
#[derive(Clone, Debug)]
pub struct SampleLine {
    pub puzzle_line: String,
    pub clue_count: usize,
    pub grids_consumed: u64,
}

pub fn write_sample<W: Write>(
    w: &mut W,
    meta: &SampleMeta,
    records: &[GenerationRecord],
) -> std::io::Result<()> {
    if let Some(kind) = meta.kind {
        writeln!(w, "# generator: {kind}")?;
    }
    if let Some(k) = meta.board_k {
        writeln!(w, "# board: {}", k * k)?;
    }
    if let Some(seed) = meta.seed {
        writeln!(w, "# seed: {seed}")?;
    }
    if let Some(count) = meta.count {
        writeln!(w, "# count: {count}")?;
    }
    if let Some(total) = meta.total_grids_consumed {
        writeln!(w, "# total_grids_consumed: {total}")?;
    }
    for rec in records {
        writeln!(
            w,
            "{}\t{}\t{}",
            format_puzzle(&rec.puzzle),
            rec.puzzle.clue_count(),
            rec.grids_consumed
        )?;
    }
    Ok(())
}

pub fn read_sample<R: BufRead>(r: R) -> Result<(SampleMeta, Vec<SampleLine>), Error> {
    let mut meta = SampleMeta::default();
    let mut lines = Vec::new();
    for line in r.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((key, value)) = rest.split_once(':') {
                let value = value.trim();
                match key.trim() {
                    "generator" => meta.kind = value.parse().ok(),
                    "board" => {
                        meta.board_k = value.parse::<usize>().ok().map(|side: usize| {
                            (side as f64).sqrt().round() as usize
                        })
                    }
                    "seed" => meta.seed = value.parse().ok(),
                    "count" => meta.count = value.parse().ok(),
                    "total_grids_consumed" => meta.total_grids_consumed = value.parse().ok(),
                    _ => {}
                }
            }
            continue;
        }
        let mut parts = line.split('\t');
        let puzzle_line = parts
            .next()
            .ok_or_else(|| Error::Format("empty sample line".into()))?
            .to_string();
        let clue_count = match parts.next() {
            Some(s) => s
                .parse()
                .map_err(|_| Error::Format(format!("bad clue count in line: {line}")))?,
            None => puzzle_line.chars().filter(|&c| c != '.' && c != '0').count(),
        };
        let grids_consumed = match parts.next() {
            Some(s) => s
                .parse()
                .map_err(|_| Error::Format(format!("bad grid count in line: {line}")))?,
            None => 1,
        };
        lines.push(SampleLine {
            puzzle_line,
            clue_count,
            grids_consumed,
        });
    }
    Ok((meta, lines))
}

/// Loads a grid pool from a one-grid-per-line file ('#' comments allowed).
pub fn load_grid_pool<R: BufRead>(r: R, board: &Board) -> Result<Vec<Grid>, Error> {
    let mut grids = Vec::new();
    for line in r.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let p = parse_puzzle(line, board)?;
        grids.push(Grid::from_puzzle(board, p)?);
    }
    if grids.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(grids)
}

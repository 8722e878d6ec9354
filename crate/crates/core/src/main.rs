use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use sudoku_stats::board::{format_puzzle, parse_puzzle, Board};
use sudoku_stats::census::{
    census_report, estimate_counts_per_grid, estimate_success_rate,
};
use sudoku_stats::generate::{
    generate_batch, load_grid_pool, read_sample, write_sample, GeneratorKind, GridSource,
    SampleMeta,
};
use sudoku_stats::solver::{enumerate_all_minimals, enumerate_complete_grids};
use sudoku_stats::stats::{stats_report, BiasModel, SampleStats};
use sudoku_stats::whip::{nrczt_rating, read_ratings, write_ratings, Rating, RatingLine};

/// Generation, rating, and census statistics of minimal Sudoku puzzles.
#[derive(Parser)]
#[command(name = "sudoku-stats", version, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct BoardArg {
    /// Board side: 4 or 9.
    #[arg(long, default_value_t = 9)]
    board: usize,
}

impl BoardArg {
    fn board(&self) -> Result<Board, AppError> {
        let k = match self.board {
            4 => 2,
            9 => 3,
            other => return Err(AppError::Usage(format!("unsupported board side {other}"))),
        };
        Ok(Board::new(k).expect("k is 2 or 3"))
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a sample of minimal puzzles.
    Generate {
        /// Generator kind: bottom-up, top-down, or ctr-bias.
        #[arg(long)]
        kind: GeneratorKind,
        #[arg(long)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[command(flatten)]
        board: BoardArg,
        /// Complete-grid pool file (one grid line per row) instead of
        /// fresh random grids.
        #[arg(long)]
        grids: Option<PathBuf>,
        /// Output file (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rate the puzzles of a sample file.
    Rate {
        sample: PathBuf,
        /// Largest whip length tried before reporting "A" (above cap).
        #[arg(long, default_value_t = 16)]
        cap: usize,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[command(flatten)]
        board: BoardArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Raw and bias-corrected statistics of a sample.
    Stats {
        sample: PathBuf,
        /// Rating file produced by `rate`, adds the rating variable.
        #[arg(long)]
        ratings: Option<PathBuf>,
        /// Clue count where the correction factor is 1; defaults to 26
        /// on 9x9 and 5 on 4x4.
        #[arg(long)]
        anchor: Option<usize>,
        #[command(flatten)]
        board: BoardArg,
    },
    /// Census estimates from a controlled-bias sample.
    Census {
        sample: PathBuf,
        /// Number of complete grids for the grand total; defaults to the
        /// published constants (6670903752021072936960 on 9x9, 288 on 4x4).
        #[arg(long)]
        n_grids: Option<f64>,
        #[command(flatten)]
        board: BoardArg,
    },
    /// Materialize the exhaustive 4x4 data set.
    Oracle {
        #[command(flatten)]
        board: BoardArg,
        /// Output directory for grids.txt, minimals.txt, per_n.txt.
        #[arg(long)]
        out_dir: PathBuf,
    },
}

enum AppError {
    Usage(String),
    Data(String),
}

impl From<sudoku_stats::Error> for AppError {
    fn from(e: sudoku_stats::Error) -> AppError {
        AppError::Data(e.to_string())
    }
}

impl From<io::Error> for AppError {
    fn from(e: io::Error) -> AppError {
        AppError::Data(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests are not errors
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(AppError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn out_writer(path: &Option<PathBuf>) -> Result<Box<dyn Write>, AppError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn open(path: &Path) -> Result<BufReader<File>, AppError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| AppError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn default_anchor(board: &Board) -> usize {
    // the modal clue count of minimal puzzles: 26 on 9x9 (observed on
    // large corrected samples), 5 on 4x4 (exact from the enumeration)
    if board.k() == 2 {
        5
    } else {
        26
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.cmd {
        Cmd::Generate {
            kind,
            count,
            seed,
            workers,
            board,
            grids,
            out,
        } => cmd_generate(kind, count, seed, workers, &board.board()?, grids, out),
        Cmd::Rate {
            sample,
            cap,
            workers,
            board,
            out,
        } => cmd_rate(&sample, cap, workers, &board.board()?, out),
        Cmd::Stats {
            sample,
            ratings,
            anchor,
            board,
        } => cmd_stats(&sample, ratings, anchor, &board.board()?),
        Cmd::Census {
            sample,
            n_grids,
            board,
        } => cmd_census(&sample, n_grids, &board.board()?),
        Cmd::Oracle { board, out_dir } => cmd_oracle(&board.board()?, &out_dir),
    }
}

fn cmd_generate(
    kind: GeneratorKind,
    count: u64,
    seed: u64,
    workers: usize,
    board: &Board,
    grids: Option<PathBuf>,
    out: Option<PathBuf>,
) -> Result<(), AppError> {
    if workers == 0 {
        return Err(AppError::Usage("workers must be at least 1".into()));
    }
    let source = match &grids {
        Some(path) => GridSource::Pool(Arc::new(load_grid_pool(open(path)?, board)?)),
        None => GridSource::Random,
    };
    let (records, summary) = generate_batch(kind, count, seed, workers, board, &source);
    let mut w = out_writer(&out)?;
    writeln!(w, "# workers: {workers}")?;
    if let Some(path) = &grids {
        writeln!(w, "# grids: {}", path.display())?;
    }
    let meta = SampleMeta {
        kind: Some(kind),
        board_k: Some(board.k()),
        seed: Some(seed),
        count: Some(count),
        total_grids_consumed: Some(summary.total_grids_consumed),
    };
    write_sample(&mut w, &meta, &records)?;
    w.flush()?;
    Ok(())
}

fn cmd_rate(
    sample: &Path,
    cap: usize,
    workers: usize,
    board: &Board,
    out: Option<PathBuf>,
) -> Result<(), AppError> {
    if workers == 0 {
        return Err(AppError::Usage("workers must be at least 1".into()));
    }
    let (_, lines) = read_sample(open(sample)?)?;
    let puzzles: Vec<_> = lines
        .iter()
        .map(|l| parse_puzzle(&l.puzzle_line, board))
        .collect::<Result<_, _>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    let results: Vec<_> = pool.install(|| {
        puzzles
            .par_iter()
            .map(|p| nrczt_rating(p, board, cap))
            .collect()
    });
    let mut rated = Vec::new();
    let mut skipped = 0u64;
    let mut by_level: BTreeMap<String, u64> = BTreeMap::new();
    for (line, res) in lines.iter().zip(results) {
        match res {
            Ok(r) => {
                *by_level.entry(r.rating.to_string()).or_default() += 1;
                rated.push(RatingLine {
                    puzzle_line: line.puzzle_line.clone(),
                    rating: r.rating,
                    partial_whip_count: r.partial_whip_count,
                });
            }
            Err(e) => {
                eprintln!("skipping {}: {e}", line.puzzle_line);
                skipped += 1;
            }
        }
    }
    let mut w = out_writer(&out)?;
    let header = [
        ("sample", sample.display().to_string()),
        ("cap", cap.to_string()),
        ("workers", workers.to_string()),
        ("skipped", skipped.to_string()),
    ];
    write_ratings(&mut w, &header, &rated)?;
    w.flush()?;
    for (level, n) in &by_level {
        eprintln!("level {level}: {n}");
    }
    if skipped > 0 {
        eprintln!("warning: skipped {skipped} puzzles without a unique solution");
    }
    Ok(())
}

fn cmd_stats(
    sample: &Path,
    ratings: Option<PathBuf>,
    anchor: Option<usize>,
    board: &Board,
) -> Result<(), AppError> {
    let (meta, lines) = read_sample(open(sample)?)?;
    if lines.is_empty() {
        return Err(AppError::Data("empty sample".into()));
    }
    let model = BiasModel::new(board.cells(), anchor.unwrap_or_else(|| default_anchor(board)));
    let mut clue_stats = SampleStats::default();
    let mut grid_stats = SampleStats::default();
    for l in &lines {
        clue_stats.record(l.clue_count, l.clue_count as f64);
        grid_stats.record(l.clue_count, l.grids_consumed as f64);
    }
    let mut out = String::new();
    out.push_str(&stats_report(&clue_stats, &model, "clue_count"));
    if meta.kind == Some(GeneratorKind::ControlledBias) {
        out.push('\n');
        out.push_str(&stats_report(&grid_stats, &model, "grids_consumed"));
    }
    if let Some(path) = &ratings {
        let rated = read_ratings(open(path)?)?;
        let by_line: BTreeMap<&str, &RatingLine> = rated
            .iter()
            .map(|r| (r.puzzle_line.as_str(), r))
            .collect();
        let mut rating_stats = SampleStats::default();
        let mut above_cap = 0u64;
        for l in &lines {
            if let Some(r) = by_line.get(l.puzzle_line.as_str()) {
                match r.rating {
                    Rating::Level(n) => rating_stats.record(l.clue_count, n as f64),
                    Rating::AboveCap => above_cap += 1,
                }
            }
        }
        if !rating_stats.is_empty() {
            out.push('\n');
            out.push_str(&stats_report(&rating_stats, &model, "nrczt_rating"));
            out.push_str(&format!("above_cap\t{above_cap}\n"));
        }
    }
    print!("{out}");
    Ok(())
}

fn cmd_census(sample: &Path, n_grids: Option<f64>, board: &Board) -> Result<(), AppError> {
    let (meta, lines) = read_sample(open(sample)?)?;
    match meta.kind {
        Some(GeneratorKind::ControlledBias) => {}
        Some(other) => {
            return Err(AppError::Data(format!(
                "census needs a ctr-bias sample; this one was generated by {other} \
                 and its bias cannot be inverted"
            )))
        }
        None => {
            return Err(AppError::Data(
                "census needs a ctr-bias sample with generator metadata".into(),
            ))
        }
    }
    if lines.is_empty() {
        return Err(AppError::Data("empty sample".into()));
    }
    let total_grids = meta
        .total_grids_consumed
        .unwrap_or_else(|| lines.iter().map(|l| l.grids_consumed).sum());
    let mut on: BTreeMap<usize, u64> = BTreeMap::new();
    for l in &lines {
        *on.entry(l.clue_count).or_default() += 1;
    }
    let total = lines.len() as u64;
    let s = estimate_success_rate(total, total_grids)?;
    let est = estimate_counts_per_grid(&on, total, s, board.cells(), total_grids)?;
    #[allow(clippy::excessive_precision)]
    let n_grids = n_grids.unwrap_or(if board.k() == 2 {
        288.0
    } else {
        6.670903752021072936960e21
    });
    print!("{}", census_report(&est, n_grids));
    Ok(())
}

fn cmd_oracle(board: &Board, out_dir: &Path) -> Result<(), AppError> {
    if board.k() != 2 {
        return Err(AppError::Usage(
            "the exhaustive oracle is only feasible on the 4x4 board; \
             9x9 has ~6.7e21 complete grids"
                .into(),
        ));
    }
    std::fs::create_dir_all(out_dir)?;
    let grids = enumerate_complete_grids(board)?;
    let minimals = enumerate_all_minimals(board)?;
    let mut w = BufWriter::new(File::create(out_dir.join("grids.txt"))?);
    writeln!(w, "# board: 4")?;
    writeln!(w, "# complete grids: {}", grids.len())?;
    for g in &grids {
        writeln!(w, "{}", format_puzzle(g.as_puzzle()))?;
    }
    w.flush()?;
    let mut w = BufWriter::new(File::create(out_dir.join("minimals.txt"))?);
    writeln!(w, "# board: 4")?;
    writeln!(w, "# minimal puzzles: {}", minimals.len())?;
    for p in &minimals {
        writeln!(w, "{}\t{}", format_puzzle(p), p.clue_count())?;
    }
    w.flush()?;
    let mut per_n: BTreeMap<usize, u64> = BTreeMap::new();
    for p in &minimals {
        *per_n.entry(p.clue_count()).or_default() += 1;
    }
    let mut w = BufWriter::new(File::create(out_dir.join("per_n.txt"))?);
    writeln!(w, "# board: 4")?;
    for (n, c) in &per_n {
        writeln!(w, "{n}\t{c}")?;
    }
    w.flush()?;
    println!(
        "wrote {} grids, {} minimal puzzles to {}",
        grids.len(),
        minimals.len(),
        out_dir.display()
    );
    Ok(())
}

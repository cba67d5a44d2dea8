//! The `atropos` command line: solve, play, reduce, verify, eval, render.
//!
//! Exit codes: 0 ok, 1 negative answer (formula false, search gave up),
//! 2 usage or input error, 3 internal assertion failed.

mod render;

use std::ffi::OsString;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use atropos_core::lattice::format_node;
use atropos_core::rules::parse_transcript;
use atropos_core::{
    compile, engine_move, parse_qdimacs, solve, validate_output, verify_with, Board, Formula, GameState, Move,
    Player, ReductionOutput, RulesConfig, Sidecar, SolveLimits, Status, VerifyOptions,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

pub use render::render_svg;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "atropos", version, about = "Atropos-k engine and QBF reduction")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether the player to move can force a win.
    Solve {
        board: PathBuf,
        /// Reach of the move window (`inf` for unbounded). Defaults to the
        /// sidecar's k, else 2.
        #[arg(long)]
        k: Option<String>,
        #[arg(long, default_value_t = 50_000_000)]
        max_nodes: u64,
        /// Sidecar from `reduce`; restores the forced opening.
        #[arg(long)]
        sidecar: Option<PathBuf>,
        /// Transcript of moves to replay before solving.
        #[arg(long)]
        moves: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        timing: bool,
    },
    /// Play turn by turn on the terminal; moves are read from stdin.
    Play {
        board: PathBuf,
        #[arg(long)]
        k: Option<String>,
        #[arg(long, value_enum, default_value_t = EngineSide::None)]
        engine: EngineSide,
        #[arg(long, default_value_t = 1_000_000)]
        max_nodes: u64,
        #[arg(long)]
        sidecar: Option<PathBuf>,
        #[arg(long)]
        moves: Option<PathBuf>,
    },
    /// Compile a QDIMACS formula to a board.
    Reduce {
        qbf: PathBuf,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
    /// Compile a formula and replay the game to check it against the formula.
    Verify {
        qbf: PathBuf,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long)]
        max_decisions: Option<usize>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        timing: bool,
    },
    /// Evaluate a QDIMACS formula.
    Eval { qbf: PathBuf },
    /// Draw a board as SVG.
    Render {
        board: PathBuf,
        #[arg(long)]
        svg: PathBuf,
        /// Outline gadgets from a `reduce` sidecar.
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineSide {
    Hero,
    Adversary,
    None,
}

impl EngineSide {
    fn plays(self, p: Player) -> bool {
        matches!((self, p), (EngineSide::Hero, Player::Hero) | (EngineSide::Adversary, Player::Adversary))
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Input { path: PathBuf, source: atropos_core::Error },
    #[error("{}: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },
    #[error(transparent)]
    Core(#[from] atropos_core::Error),
    #[error("writing output: {0}")]
    Output(#[from] io::Error),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use atropos_core::Error as E;
        match self {
            CliError::Io { .. } | CliError::Input { .. } | CliError::Json { .. } => EXIT_USAGE,
            CliError::Core(
                E::InvalidArgument(_)
                | E::NotFound(_)
                | E::Parse { .. }
                | E::Boundary { .. }
                | E::InvalidState(_)
                | E::InvalidMove(_)
                | E::Unsupported(_)
                | E::Refused(_),
            ) => EXIT_USAGE,
            _ => EXIT_INTERNAL,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                EXIT_USAGE
            } else {
                let _ = out.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    match execute(cli.command, input, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cmd: Command, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Solve { board, k, max_nodes, sidecar, moves, json, timing } => {
            let state = load_state(&board, k.as_deref(), sidecar.as_deref(), moves.as_deref())?;
            let limits = SolveLimits::new(max_nodes, SolveLimits::default().transposition_capacity)?;
            cmd_solve(&state, limits, json, timing, out)
        }
        Command::Play { board, k, engine, max_nodes, sidecar, moves } => {
            let state = load_state(&board, k.as_deref(), sidecar.as_deref(), moves.as_deref())?;
            let limits = SolveLimits::new(max_nodes, 1 << 20)?;
            cmd_play(state, engine, limits, input, out)
        }
        Command::Reduce { qbf, k, output, sidecar } => {
            let f = read_formula(&qbf)?;
            let compiled = compile(&f, k)?;
            let rep = validate_output(&compiled, k);
            if !rep.passed() {
                return Err(CliError::Internal(format!("compiled board fails validation: {}", rep.summary())));
            }
            write_file(&output, &compiled.board_text())?;
            if let Some(p) = &sidecar {
                write_file(p, &compiled.sidecar_json())?;
            }
            let b = &compiled.state.board;
            writeln!(out, "formula: {f}")?;
            writeln!(
                out,
                "board: size {}, {} uncolored nodes, {} gadgets, {} decision points",
                b.size(),
                b.count_uncolored(),
                compiled.gadgets.len(),
                compiled.decisions.len()
            )?;
            writeln!(out, "wrote {}", output.display())?;
            if let Some(p) = sidecar {
                writeln!(out, "wrote {}", p.display())?;
            }
            Ok(EXIT_OK)
        }
        Command::Verify { qbf, k, max_decisions, json, timing } => {
            let f = read_formula(&qbf)?;
            let t = Instant::now();
            let rep = verify_with(&f, k, &VerifyOptions { max_decisions })?;
            let ms = t.elapsed().as_millis();
            if json {
                let mut v = serde_json::to_value(&rep).expect("report serializes");
                v["passed"] = json!(rep.passed());
                if timing {
                    v["time_ms"] = json!(ms);
                }
                writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json"))?;
            } else {
                writeln!(out, "formula: {}", rep.formula)?;
                writeln!(out, "k: {}", rep.k)?;
                writeln!(out, "eval={} hero_wins={}", rep.eval, rep.hero_wins)?;
                writeln!(out, "lines explored: {}", rep.lines_explored)?;
                writeln!(out, "failures: {}", rep.failures.len())?;
                for fl in &rep.failures {
                    let kind = serde_json::to_value(fl.kind).expect("json");
                    writeln!(out, "  [{}] {}", kind.as_str().unwrap_or("?"), fl.message)?;
                    if !fl.trace.is_empty() {
                        writeln!(out, "    after {}", fl.trace.join(" > "))?;
                    }
                }
                if timing {
                    writeln!(out, "time: {ms} ms")?;
                }
                writeln!(out, "result: {}", if rep.passed() { "pass" } else { "FAIL" })?;
            }
            Ok(if rep.passed() { EXIT_OK } else { EXIT_INTERNAL })
        }
        Command::Eval { qbf } => {
            let v = read_formula(&qbf)?.eval();
            writeln!(out, "{v}")?;
            Ok(if v { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Render { board, svg, sidecar } => {
            let b = read_board(&board)?;
            let sc = sidecar.as_deref().map(read_json::<Sidecar>).transpose()?;
            write_file(&svg, &render_svg(&b, sc.as_ref()))?;
            writeln!(out, "wrote {}", svg.display())?;
            Ok(EXIT_OK)
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn read_board(path: &Path) -> Result<Board> {
    Board::parse(&read_text(path)?).map_err(|source| CliError::Input { path: path.to_owned(), source })
}

fn read_formula(path: &Path) -> Result<Formula> {
    parse_qdimacs(&read_text(path)?).map_err(|source| CliError::Input { path: path.to_owned(), source })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|source| CliError::Json { path: path.to_owned(), source })
}

fn load_state(board: &Path, k: Option<&str>, sidecar: Option<&Path>, moves: Option<&Path>) -> Result<GameState> {
    let b = read_board(board)?;
    let mut state = match sidecar {
        Some(p) => {
            let sc: Sidecar = read_json(p)?;
            ReductionOutput::from_parts(b, sc)
                .map_err(|source| CliError::Input { path: p.to_owned(), source })?
                .state
        }
        None => GameState::new(b, RulesConfig::new(2)?)?,
    };
    if let Some(k) = k {
        state.config = RulesConfig::parse(k)?;
    }
    if let Some(p) = moves {
        let ms = parse_transcript(&state.board, &read_text(p)?)
            .map_err(|source| CliError::Input { path: p.to_owned(), source })?;
        state = state.replay(&ms)?;
    }
    Ok(state)
}

fn move_text(board: &Board, m: Move) -> String {
    format!("{} {}", format_node(board, m.node), m.color)
}

fn cmd_solve(state: &GameState, limits: SolveLimits, json: bool, timing: bool, out: &mut dyn Write) -> Result<i32> {
    let t = Instant::now();
    let r = solve(state, limits)?;
    let ms = t.elapsed().as_millis();
    let result = match (r.hit_limit, r.winner_is_mover) {
        (true, _) => "unknown",
        (false, true) => "mover wins",
        (false, false) => "mover loses",
    };
    let best = r.best_move.map(|m| move_text(&state.board, m));
    if json {
        let mut v = json!({
            "mover": state.to_move.to_string(),
            "k": state.config.to_string(),
            "result": result,
            "winner_is_mover": r.winner_is_mover,
            "best_move": best,
            "nodes_explored": r.nodes_explored,
            "hit_limit": r.hit_limit,
        });
        if timing {
            v["time_ms"] = json!(ms);
        }
        writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json"))?;
    } else {
        writeln!(out, "mover: {}", state.to_move)?;
        writeln!(out, "result: {result}")?;
        if let Some(b) = best {
            writeln!(out, "best move: {b}")?;
        }
        writeln!(out, "nodes: {}", r.nodes_explored)?;
        if r.hit_limit {
            writeln!(out, "node limit of {} reached", limits.max_nodes)?;
        }
        if timing {
            writeln!(out, "time: {ms} ms")?;
        }
    }
    Ok(if r.hit_limit { EXIT_NEGATIVE } else { EXIT_OK })
}

/// Boards up to this size are reprinted after every move.
const SHOW_BOARD_UP_TO: u32 = 20;

fn cmd_play(
    mut state: GameState,
    engine: EngineSide,
    limits: SolveLimits,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
) -> Result<i32> {
    write!(out, "{}", state.board)?;
    let show = state.board.size() <= SHOW_BOARD_UP_TO;
    let mut line = String::new();
    loop {
        match state.status {
            Status::WonBy(p) => {
                let tri = state
                    .losing_triangle
                    .map(|t| t.iter().map(|&c| format!("({})", format_node(&state.board, c))).collect::<Vec<_>>().join(" "))
                    .unwrap_or_default();
                writeln!(out, "{p} wins: {} completed the rainbow {tri}", p.opponent())?;
                return Ok(EXIT_OK);
            }
            Status::ExhaustedNoRainbow => {
                writeln!(out, "board filled without a rainbow")?;
                return Ok(EXIT_OK);
            }
            Status::Ongoing => {}
        }
        let mover = state.to_move;
        let m = if engine.plays(mover) {
            let (m, r) = engine_move(&state, limits)?;
            let how = if r.winner_is_mover {
                "winning"
            } else if r.hit_limit {
                "search gave up"
            } else {
                "lost position"
            };
            writeln!(out, "{mover} (engine, {how}) plays {}", move_text(&state.board, m))?;
            m
        } else {
            let targets = state.legal_targets()?;
            let shown: Vec<String> = targets.iter().take(12).map(|&c| format_node(&state.board, c)).collect();
            let more = if targets.len() > shown.len() { ", ..." } else { "" };
            write!(out, "{mover} to move, {} targets [{}{more}]> ", targets.len(), shown.join(", "))?;
            out.flush()?;
            line.clear();
            if input.read_line(&mut line)? == 0 {
                writeln!(out)?;
                writeln!(out, "input ended")?;
                return Ok(EXIT_OK);
            }
            match line.trim() {
                "" => continue,
                "quit" | "q" => return Ok(EXIT_OK),
                "board" => {
                    write!(out, "{}", state.board)?;
                    continue;
                }
                text => match parse_transcript(&state.board, text) {
                    Ok(v) if v.len() == 1 => {
                        if let Err(e) = state.apply(v[0]) {
                            writeln!(out, "illegal move: {e}")?;
                            continue;
                        }
                        v[0]
                    }
                    _ => {
                        writeln!(out, "expected `<row> <offset> <R|G|B>`, `board` or `quit`")?;
                        continue;
                    }
                },
            }
        };
        state = state.apply(m)?;
        if show {
            write!(out, "{}", state.board)?;
        }
    }
}

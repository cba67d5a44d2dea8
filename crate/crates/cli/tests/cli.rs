use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use atropos_cli::{run, EXIT_INTERNAL, EXIT_NEGATIVE, EXIT_OK, EXIT_USAGE};
use atropos_core::rules::safe_colors_at;
use atropos_core::{make_board, Board, Color, Coord, GameState, RulesConfig};
use tempfile::TempDir;

const EXISTS_X: &str = "p cnf 1 1\ne 1 0\n1 0\n";
const FORALL_X: &str = "p cnf 1 1\na 1 0\n1 0\n";

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn atropos(args: &[&str], stdin: &str) -> Out {
    let mut input = stdin.as_bytes();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("atropos").chain(args.iter().copied());
    let code = run(argv, &mut input, &mut out, &mut err);
    Out {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// A size-2 board whose only empty node has no safe color.
fn trapped_board() -> Board {
    let base = make_board(2).unwrap();
    let interior: Vec<Coord> = base.interior().collect();
    for code in 0..4usize.pow(interior.len() as u32) {
        let mut b = base.clone();
        let mut c = code;
        for &n in &interior {
            b.set(n, [Color::Uncolored, Color::Red, Color::Green, Color::Blue][c % 4]).unwrap();
            c /= 4;
        }
        if b.count_uncolored() == 1 && !b.has_rainbow() {
            let n = b.uncolored().next().unwrap();
            if safe_colors_at(&b, n).is_empty() {
                return b;
            }
        }
    }
    panic!("no trapped state on size 2");
}

#[test]
fn eval_reports_truth_in_the_exit_code() {
    let dir = TempDir::new().unwrap();
    let t = atropos(&["eval", s(&file(&dir, "t.qdimacs", EXISTS_X))], "");
    assert_eq!((t.code, t.stdout.as_str()), (EXIT_OK, "true\n"));
    let f = atropos(&["eval", s(&file(&dir, "f.qdimacs", FORALL_X))], "");
    assert_eq!((f.code, f.stdout.as_str()), (EXIT_NEGATIVE, "false\n"));
}

#[test]
fn verify_false_formula_matches_eval() {
    let dir = TempDir::new().unwrap();
    let r = atropos(&["verify", s(&file(&dir, "f.qdimacs", FORALL_X))], "");
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert!(r.stdout.contains("eval=false hero_wins=false"), "{}", r.stdout);
    assert!(r.stdout.ends_with("result: pass\n"));
}

#[test]
fn verify_json_is_a_report() {
    let dir = TempDir::new().unwrap();
    let r = atropos(&["verify", s(&file(&dir, "t.qdimacs", EXISTS_X)), "--k", "3", "--json"], "");
    assert_eq!(r.code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["k"], 3);
    assert_eq!(v["hero_wins"], true);
    assert_eq!(v["passed"], true);
    assert!(v.get("time_ms").is_none());
}

#[test]
fn verify_over_the_decision_bound_is_refused() {
    let dir = TempDir::new().unwrap();
    let q = file(&dir, "q.qdimacs", "p cnf 2 2\ne 1 0\na 2 0\n1 2 0\n1 -2 0\n");
    let r = atropos(&["verify", s(&q), "--max-decisions", "1"], "");
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.stderr.contains("refused"), "{}", r.stderr);
}

#[test]
fn solve_on_a_trapped_node_says_mover_loses() {
    let dir = TempDir::new().unwrap();
    let b = file(&dir, "b.txt", &trapped_board().to_text());
    let r = atropos(&["solve", s(&b)], "");
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert!(r.stdout.contains("result: mover loses"), "{}", r.stdout);
    let j = atropos(&["solve", s(&b), "--json"], "");
    let v: serde_json::Value = serde_json::from_str(&j.stdout).unwrap();
    assert_eq!(v["winner_is_mover"], false);
    assert_eq!(v["best_move"], serde_json::Value::Null);
}

#[test]
fn solve_reports_a_winning_move() {
    let dir = TempDir::new().unwrap();
    let b = file(&dir, "b.txt", &make_board(3).unwrap().to_text());
    let r = atropos(&["solve", s(&b), "--k", "1"], "");
    assert_eq!(r.code, EXIT_OK);
    if r.stdout.contains("mover wins") {
        assert!(r.stdout.contains("best move: "));
    }
    let limited = atropos(&["solve", s(&b), "--k", "inf", "--max-nodes", "1"], "");
    assert_eq!(limited.code, EXIT_NEGATIVE);
    assert!(limited.stdout.contains("result: unknown"));
}

#[test]
fn solve_replays_a_transcript() {
    let dir = TempDir::new().unwrap();
    let board = make_board(3).unwrap();
    let g = GameState::new(board.clone(), RulesConfig::new(2).unwrap()).unwrap();
    let (node, color) = g
        .legal_targets()
        .unwrap()
        .into_iter()
        .find_map(|n| g.safe_colors(n).unwrap().first().map(|&c| (n, c)))
        .unwrap();
    let b = file(&dir, "b.txt", &board.to_text());
    let m = file(&dir, "m.txt", &format!("{} {} {color}\n", node.row, node.offset));
    let r = atropos(&["solve", s(&b), "--moves", s(&m), "--json"], "");
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["mover"], "adversary");
    let bad = file(&dir, "bad.txt", "1 1 R\n\n7 7 Q\n");
    let r = atropos(&["solve", s(&b), "--moves", s(&bad)], "");
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.stderr.contains("line 3"), "{}", r.stderr);
}

#[test]
fn reduce_then_play_starts_with_the_forced_move() {
    let dir = TempDir::new().unwrap();
    let q = file(&dir, "t.qdimacs", EXISTS_X);
    let (board, sidecar) = (dir.path().join("b.txt"), dir.path().join("b.json"));
    let r = atropos(&["reduce", s(&q), "-o", s(&board), "--sidecar", s(&sidecar)], "");
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert!(Board::parse(&fs::read_to_string(&board).unwrap()).is_ok());
    let p = atropos(&["play", s(&board), "--sidecar", s(&sidecar)], "quit\n");
    assert_eq!(p.code, EXIT_OK, "{}", p.stderr);
    assert!(p.stdout.contains("hero to move, 1 targets"), "{}", p.stdout);
}

#[test]
fn play_against_the_engine_to_the_end() {
    let dir = TempDir::new().unwrap();
    let b = file(&dir, "b.txt", &make_board(1).unwrap().to_text());
    // The single interior node: any color the human picks, the game ends.
    let r = atropos(&["play", s(&b), "--engine", "adversary"], "9 9 R\n1 1 R\n");
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert!(r.stdout.contains("illegal move") || r.stdout.contains("expected"), "{}", r.stdout);
    assert!(r.stdout.contains(" wins: "), "{}", r.stdout);
    let e = atropos(&["play", s(&b), "--engine", "hero"], "");
    assert!(e.stdout.contains("hero (engine"), "{}", e.stdout);
}

#[test]
fn render_emits_well_formed_svg() {
    let dir = TempDir::new().unwrap();
    let q = file(&dir, "t.qdimacs", EXISTS_X);
    let (board, sidecar, svg) = (dir.path().join("b.txt"), dir.path().join("b.json"), dir.path().join("b.svg"));
    assert_eq!(atropos(&["reduce", s(&q), "-o", s(&board), "--sidecar", s(&sidecar)], "").code, EXIT_OK);
    let r = atropos(&["render", s(&board), "--svg", s(&svg), "--sidecar", s(&sidecar)], "");
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let text = fs::read_to_string(&svg).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    let b = Board::parse(&fs::read_to_string(&board).unwrap()).unwrap();
    let circles = doc.descendants().filter(|n| n.has_tag_name("circle")).count();
    assert_eq!(circles, b.node_count());
    assert!(doc.descendants().any(|n| n.has_tag_name("rect")));
}

#[test]
fn malformed_inputs_exit_with_usage_and_a_line_number() {
    let dir = TempDir::new().unwrap();
    let q = file(&dir, "bad.qdimacs", "p cnf 1 1\ne 1 0\n1 x 0\n");
    let r = atropos(&["eval", s(&q)], "");
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.stderr.contains("line 3"), "{}", r.stderr);
    let b = file(&dir, "bad.txt", "atropos-board v1\nsize 2\n");
    assert_eq!(atropos(&["solve", s(&b)], "").code, EXIT_USAGE);
    assert_eq!(atropos(&["eval", "/does/not/exist"], "").code, EXIT_USAGE);
    assert_eq!(atropos(&["frobnicate"], "").code, EXIT_USAGE);
    assert_eq!(atropos(&["solve"], "").code, EXIT_USAGE);
}

#[test]
fn stdout_is_byte_stable() {
    let dir = TempDir::new().unwrap();
    let q = file(&dir, "q.qdimacs", "p cnf 2 2\ne 1 0\na 2 0\n1 2 0\n1 -2 0\n");
    let a = atropos(&["verify", s(&q), "--json"], "");
    let b = atropos(&["verify", s(&q), "--json"], "");
    assert_eq!(a.stdout, b.stdout);
    let board = file(&dir, "b.txt", &make_board(3).unwrap().to_text());
    assert_eq!(atropos(&["solve", s(&board)], "").stdout, atropos(&["solve", s(&board)], "").stdout);
}

#[test]
fn exit_codes_are_distinct() {
    assert_eq!([EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_INTERNAL], [0, 1, 2, 3]);
}

#[test]
fn binary_exit_code_matches_the_answer() {
    let dir = TempDir::new().unwrap();
    let bin = env!("CARGO_BIN_EXE_atropos");
    let t = Command::new(bin).args(["eval", s(&file(&dir, "t.qdimacs", EXISTS_X))]).output().unwrap();
    assert_eq!(t.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&t.stdout), "true\n");
    let f = Command::new(bin).args(["eval", s(&file(&dir, "f.qdimacs", FORALL_X))]).output().unwrap();
    assert_eq!(f.status.code(), Some(1));
    let u = Command::new(bin).arg("--no-such-flag").output().unwrap();
    assert_eq!(u.status.code(), Some(2));
}

//! Exact win/loss search for small game states.
//!
//! Negamax over (node, color) moves with a transposition table keyed by the
//! packed colors of the initially-empty nodes plus the last-played index.
//! The side to move is implied by the move count, so it is not part of the
//! key: values are always stored from the mover's point of view.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{Board, Color};
use crate::rules::{GameState, Move, Reach, Status};

/// Largest number of empty nodes [`brute_force_solve`] accepts.
pub const BRUTE_FORCE_MAX_EMPTY: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveLimits {
    /// Positions visited before the search gives up.
    pub max_nodes: u64,
    /// Transposition entries kept; 0 disables memoization.
    pub transposition_capacity: usize,
}

impl SolveLimits {
    pub fn new(max_nodes: u64, transposition_capacity: usize) -> Result<SolveLimits> {
        if max_nodes == 0 {
            return Err(Error::InvalidArgument("max_nodes must be positive".into()));
        }
        Ok(SolveLimits {
            max_nodes,
            transposition_capacity,
        })
    }
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits {
            max_nodes: 50_000_000,
            transposition_capacity: 1 << 22,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct SolveResult {
    /// Meaningless when `hit_limit` is set.
    pub winner_is_mover: bool,
    pub best_move: Option<Move>,
    pub nodes_explored: u64,
    pub hit_limit: bool,
}

/// Game value from the mover's side.
type Value = i8;
const WIN: Value = 1;
const DRAW: Value = 0;
const LOSS: Value = -1;

struct Searcher {
    cells: Vec<u8>,
    /// For every node, the other two corners of each triangle through it.
    tris: Vec<Vec<(u32, u32)>>,
    /// For every node, the nodes within reach in index order; `None` when the
    /// reach is unbounded.
    near: Option<Vec<Vec<u32>>>,
    /// Nodes empty at the root, ascending; only these ever change.
    free: Vec<u32>,
    /// Position of each node inside `free`, for key packing.
    slot: Vec<u32>,
    packed: Vec<u64>,
    empty: usize,
    tt: HashMap<Vec<u64>, Value>,
    capacity: usize,
    nodes: u64,
    max_nodes: u64,
}

impl Searcher {
    fn new(state: &GameState, limits: SolveLimits) -> Searcher {
        let board = &state.board;
        let n = board.node_count();
        let cells: Vec<u8> = (0..n).map(|i| board.color_at(i) as u8).collect();
        let tris = (0..n)
            .map(|i| {
                let c = board.coord(i);
                board
                    .triangles_containing(c)
                    .expect("coordinate from the board")
                    .into_iter()
                    .map(|t| {
                        let mut others = t.iter().filter(|&&x| x != c).map(|&x| idx(board, x));
                        (others.next().unwrap(), others.next().unwrap())
                    })
                    .collect()
            })
            .collect();
        let near = match state.config.k {
            Reach::Finite(k) => Some(
                (0..n)
                    .map(|i| {
                        let c = board.coord(i);
                        let mut v: Vec<u32> = board
                            .ball(c, k)
                            .into_iter()
                            .filter(|&x| x != c)
                            .map(|x| idx(board, x))
                            .collect();
                        v.sort_unstable();
                        v
                    })
                    .collect(),
            ),
            Reach::Unbounded => None,
        };
        let free: Vec<u32> = (0..n as u32).filter(|&i| cells[i as usize] == 0).collect();
        let mut slot = vec![u32::MAX; n];
        for (s, &i) in free.iter().enumerate() {
            slot[i as usize] = s as u32;
        }
        let words = (free.len() * 2).div_ceil(64) + 1;
        Searcher {
            cells,
            tris,
            near,
            empty: free.len(),
            free,
            slot,
            packed: vec![0; words],
            tt: HashMap::new(),
            capacity: limits.transposition_capacity,
            nodes: 0,
            max_nodes: limits.max_nodes,
        }
    }

    fn rainbow(&self, node: u32, color: u8) -> bool {
        self.tris[node as usize].iter().any(|&(a, b)| {
            let (ca, cb) = (self.cells[a as usize], self.cells[b as usize]);
            ca != 0 && cb != 0 && ca != cb && ca != color && cb != color
        })
    }

    fn put(&mut self, node: u32, color: u8) {
        let old = self.cells[node as usize];
        self.cells[node as usize] = color;
        let bit = self.slot[node as usize] as usize * 2;
        let w = &mut self.packed[bit / 64];
        *w = (*w & !(3 << (bit % 64))) | ((color as u64) << (bit % 64));
        if old == 0 {
            self.empty -= 1;
        } else if color == 0 {
            self.empty += 1;
        }
    }

    fn targets(&self, last: Option<u32>) -> Vec<u32> {
        if let (Some(l), Some(near)) = (last, &self.near) {
            let v: Vec<u32> = near[l as usize]
                .iter()
                .copied()
                .filter(|&x| self.cells[x as usize] == 0)
                .collect();
            if !v.is_empty() {
                return v;
            }
        }
        self.free
            .iter()
            .copied()
            .filter(|&x| self.cells[x as usize] == 0)
            .collect()
    }

    /// Writes `last` into the key's final word.
    fn key(&mut self, last: Option<u32>) {
        let n = self.packed.len();
        self.packed[n - 1] = last.map_or(u64::MAX, u64::from);
    }

    /// Value of the current position for the mover, plus the first move that
    /// achieves it. `None` once the node budget is spent.
    fn search(&mut self, last: Option<u32>) -> Option<(Value, Option<(u32, u8)>)> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return None;
        }
        if self.capacity > 0 {
            self.key(last);
            if let Some(&v) = self.tt.get(self.packed.as_slice()) {
                return Some((v, None));
            }
        }
        let mut best = LOSS;
        let mut best_move = None;
        'outer: for node in self.targets(last) {
            for color in 1..=3u8 {
                if self.rainbow(node, color) {
                    continue;
                }
                self.put(node, color);
                let v = if self.empty == 0 {
                    Some(DRAW)
                } else {
                    self.search(Some(node)).map(|(v, _)| -v)
                };
                self.put(node, 0);
                let v = v?;
                if v > best || best_move.is_none() && v == best {
                    best = v;
                    best_move = Some((node, color));
                }
                if best == WIN {
                    break 'outer;
                }
            }
        }
        if self.capacity > 0 && self.tt.len() < self.capacity {
            self.key(last);
            self.tt.insert(self.packed.clone(), best);
        }
        Some((best, best_move))
    }
}

fn idx(board: &Board, c: crate::lattice::Coord) -> u32 {
    board.index(c).expect("coordinate from the board") as u32
}

fn check_solvable(state: &GameState) -> Result<()> {
    if state.status != Status::Ongoing {
        return Err(Error::InvalidState("game is finished".into()));
    }
    if let Some(t) = state.board.rainbow_triangles().first() {
        return Err(Error::InvalidState(format!(
            "board already has a rainbow triangle {} {} {}",
            t[0], t[1], t[2]
        )));
    }
    if state.board.count_uncolored() == 0 {
        return Err(Error::InvalidState("no uncolored nodes".into()));
    }
    if let Some(l) = state.last {
        if !state.board.color(l).is_player() {
            return Err(Error::InvalidState(format!("last node {l} is uncolored")));
        }
    }
    Ok(())
}

fn as_move(board: &Board, m: (u32, u8)) -> Move {
    Move::new(board.coord(m.0 as usize), Color::from_bits(m.1))
}

/// Decides whether the player to move can force a win.
pub fn solve(state: &GameState, limits: SolveLimits) -> Result<SolveResult> {
    check_solvable(state)?;
    let mut s = Searcher::new(state, limits);
    let last = state.last.map(|c| idx(&state.board, c));
    Ok(match s.search(last) {
        Some((v, m)) => SolveResult {
            winner_is_mover: v == WIN,
            best_move: if v == WIN { m.map(|m| as_move(&state.board, m)) } else { None },
            nodes_explored: s.nodes,
            hit_limit: false,
        },
        None => SolveResult {
            winner_is_mover: false,
            best_move: None,
            nodes_explored: s.nodes,
            hit_limit: true,
        },
    })
}

/// Like [`solve`], but searches every root move on its own table, using up to
/// `threads` workers. Every root move is searched even after a win is found, so
/// the result (including `nodes_explored`) does not depend on `threads`.
pub fn solve_parallel(state: &GameState, limits: SolveLimits, threads: usize) -> Result<SolveResult> {
    check_solvable(state)?;
    let targets = state.legal_targets()?;
    let mut roots = Vec::new();
    for node in targets {
        for color in Color::PLAYER {
            roots.push(Move::new(node, color));
        }
    }
    let run = |mv: &Move| -> (Option<Value>, u64) {
        let next = state.apply(*mv).expect("legal root move");
        match next.status {
            Status::WonBy(_) => (Some(LOSS), 0),
            Status::ExhaustedNoRainbow => (Some(DRAW), 0),
            Status::Ongoing => {
                let mut s = Searcher::new(&next, limits);
                let last = next.last.map(|c| idx(&next.board, c));
                (s.search(last).map(|(v, _)| -v), s.nodes)
            }
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let outcomes: Vec<(Option<Value>, u64)> = pool.install(|| roots.par_iter().map(run).collect());

    let nodes_explored = 1 + outcomes.iter().map(|o| o.1).sum::<u64>();
    // Budget exhaustion only matters before the first proven win.
    let decided = outcomes.iter().position(|o| o.0 == Some(WIN)).unwrap_or(outcomes.len());
    let hit_limit = outcomes[..decided].iter().any(|o| o.0.is_none());
    let best = outcomes.iter().filter_map(|o| o.0).max().unwrap_or(LOSS);
    let best_move = roots.get(decided).copied();
    Ok(SolveResult {
        winner_is_mover: !hit_limit && best == WIN,
        best_move: if !hit_limit && best == WIN { best_move } else { None },
        nodes_explored,
        hit_limit,
    })
}

/// A move for the side to move: the solver's winning move when it proves
/// one, otherwise the first safe move, otherwise the first legal move (every
/// move loses then).
pub fn engine_move(state: &GameState, limits: SolveLimits) -> Result<(Move, SolveResult)> {
    let r = solve(state, limits)?;
    if let Some(m) = r.best_move {
        return Ok((m, r));
    }
    let targets = state.legal_targets()?;
    for &node in &targets {
        if let Some(&color) = state.safe_colors(node)?.first() {
            return Ok((Move::new(node, color), r));
        }
    }
    let node = *targets.first().ok_or_else(|| Error::InvalidState("no legal target".into()))?;
    Ok((Move::new(node, Color::Red), r))
}

/// Plain minimax over [`GameState::apply`]: no table, no pruning. An
/// independent check on [`solve`] for tiny states.
pub fn brute_force_solve(state: &GameState) -> Result<bool> {
    check_solvable(state)?;
    let empty = state.board.count_uncolored();
    if empty > BRUTE_FORCE_MAX_EMPTY {
        return Err(Error::Refused(format!(
            "{empty} uncolored nodes; brute force handles at most {BRUTE_FORCE_MAX_EMPTY}"
        )));
    }
    Ok(brute(state) == WIN)
}

fn brute(state: &GameState) -> Value {
    let mut best = LOSS;
    for node in state.legal_targets().unwrap_or_default() {
        for color in Color::PLAYER {
            let next = state.apply(Move::new(node, color)).expect("legal target");
            let v = match next.status {
                Status::WonBy(p) if p == state.to_move => WIN,
                Status::WonBy(_) => LOSS,
                Status::ExhaustedNoRainbow => DRAW,
                Status::Ongoing => -brute(&next),
            };
            best = best.max(v);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Board, Coord};
    use crate::rules::{Player, RulesConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn configs() -> Vec<RulesConfig> {
        vec![
            RulesConfig::new(1).unwrap(),
            RulesConfig::new(2).unwrap(),
            RulesConfig::unbounded(),
        ]
    }

    /// All rainbow-free, not-full interior colorings of `size`, with every
    /// choice of last node.
    fn all_states(size: u32, config: RulesConfig) -> Vec<GameState> {
        let base = Board::new(size).unwrap();
        let interior: Vec<Coord> = base.interior().collect();
        let mut out = Vec::new();
        for code in 0..4usize.pow(interior.len() as u32) {
            let mut b = base.clone();
            let mut c = code;
            for &n in &interior {
                b.set(n, [Color::Uncolored, Color::Red, Color::Green, Color::Blue][c % 4]).unwrap();
                c /= 4;
            }
            if b.count_uncolored() == 0 || b.has_rainbow() {
                continue;
            }
            let colored: Vec<Coord> = interior.iter().copied().filter(|&n| b.color(n).is_player()).collect();
            for last in std::iter::once(None).chain(colored.into_iter().map(Some)) {
                out.push(GameState::resume(b.clone(), last, Player::Hero, config).unwrap());
            }
        }
        out
    }

    #[test]
    fn forced_loss_single_node() {
        let states = all_states(2, RulesConfig::new(2).unwrap());
        let trapped = states
            .iter()
            .find(|s| {
                s.board.count_uncolored() == 1 && {
                    let n = s.board.uncolored().next().unwrap();
                    crate::rules::safe_colors_at(&s.board, n).is_empty()
                }
            })
            .expect("some single-empty state is a forced loss");
        let r = solve(trapped, SolveLimits::default()).unwrap();
        assert!(!r.winner_is_mover && r.best_move.is_none() && !r.hit_limit);
        assert!(!brute_force_solve(trapped).unwrap());
    }

    #[test]
    fn one_ply_win_returns_trapping_move() {
        let states = all_states(2, RulesConfig::new(1).unwrap());
        let mut seen = 0;
        for s in states.iter().filter(|s| s.board.count_uncolored() == 2) {
            let r = solve(s, SolveLimits::default()).unwrap();
            if let Some(m) = r.best_move {
                let next = s.apply(m).unwrap();
                assert_eq!(next.status, Status::Ongoing);
                let reply = next.legal_targets().unwrap();
                assert_eq!(reply.len(), 1);
                assert!(crate::rules::safe_colors_at(&next.board, reply[0]).is_empty());
                seen += 1;
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn matches_brute_force_exhaustively_on_size_2() {
        for config in configs() {
            for s in all_states(2, config) {
                let r = solve(&s, SolveLimits::default()).unwrap();
                assert!(!r.hit_limit);
                assert_eq!(r.winner_is_mover, brute_force_solve(&s).unwrap(), "{s:?}");
            }
        }
    }

    fn random_state(rng: &mut ChaCha8Rng, size: u32) -> GameState {
        loop {
            let mut b = Board::new(size).unwrap();
            let interior: Vec<Coord> = b.interior().collect();
            for &n in &interior {
                if rng.gen_bool(0.4) {
                    b.set(n, Color::PLAYER[rng.gen_range(0..3)]).unwrap();
                }
            }
            if b.count_uncolored() == 0 || b.has_rainbow() {
                continue;
            }
            let colored: Vec<Coord> = interior.iter().copied().filter(|&n| b.color(n).is_player()).collect();
            let last = if colored.is_empty() || rng.gen_bool(0.2) {
                None
            } else {
                Some(colored[rng.gen_range(0..colored.len())])
            };
            let config = match rng.gen_range(0..4) {
                3 => RulesConfig::unbounded(),
                k => RulesConfig::new(k + 1).unwrap(),
            };
            return GameState::resume(b, last, Player::Hero, config).unwrap();
        }
    }

    #[test]
    fn matches_brute_force_on_random_size_3() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let s = random_state(&mut rng, 3);
            let r = solve(&s, SolveLimits::default()).unwrap();
            assert_eq!(r.winner_is_mover, brute_force_solve(&s).unwrap());
        }
    }

    #[test]
    fn memoization_is_transparent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let s = random_state(&mut rng, 4);
            let with = solve(&s, SolveLimits::new(u64::MAX, 1 << 20).unwrap()).unwrap();
            let without = solve(&s, SolveLimits::new(u64::MAX, 0).unwrap()).unwrap();
            assert_eq!(with.winner_is_mover, without.winner_is_mover);
            assert_eq!(with.best_move, without.best_move);
            assert!(with.nodes_explored <= without.nodes_explored);
        }
    }

    #[test]
    fn principal_line_is_zero_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let mut s = random_state(&mut rng, 4);
            while s.status == Status::Ongoing {
                let r = solve(&s, SolveLimits::default()).unwrap();
                let Some(m) = r.best_move else { break };
                s = s.apply(m).unwrap();
                match s.status {
                    Status::Ongoing => assert!(!solve(&s, SolveLimits::default()).unwrap().winner_is_mover),
                    Status::WonBy(p) => assert_eq!(p, s.to_move.opponent()),
                    Status::ExhaustedNoRainbow => panic!("draw on a legal board"),
                }
            }
        }
    }

    #[test]
    fn engine_plays_the_winning_move_or_survives() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..40 {
            let s = random_state(&mut rng, 3);
            let (m, r) = engine_move(&s, SolveLimits::default()).unwrap();
            assert!(s.is_legal_target(m.node));
            if r.winner_is_mover {
                assert_eq!(Some(m), r.best_move);
            } else if !s.safe_colors(m.node).unwrap().contains(&m.color) {
                assert!(s.legal_targets().unwrap().iter().all(|&t| s.safe_colors(t).unwrap().is_empty()));
            }
        }
        let tiny = SolveLimits::new(1, 0).unwrap();
        let s = random_state(&mut rng, 5);
        let (m, r) = engine_move(&s, tiny).unwrap();
        assert!(r.hit_limit && s.is_legal_target(m.node));
    }

    #[test]
    fn parallel_is_thread_count_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let s = random_state(&mut rng, 4);
            let seq = solve(&s, SolveLimits::default()).unwrap();
            let one = solve_parallel(&s, SolveLimits::default(), 1).unwrap();
            let four = solve_parallel(&s, SolveLimits::default(), 4).unwrap();
            assert_eq!(one, four);
            assert_eq!(one.winner_is_mover, seq.winner_is_mover);
            assert_eq!(one.best_move, seq.best_move);
        }
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let s = GameState::new(Board::new(5).unwrap(), RulesConfig::new(2).unwrap()).unwrap();
        let r = solve(&s, SolveLimits::new(10, 100).unwrap()).unwrap();
        assert!(r.hit_limit && r.best_move.is_none());
        assert_eq!(r.nodes_explored, 11);
    }

    #[test]
    fn rejects_finished_and_oversized() {
        let s = GameState::new(Board::new(5).unwrap(), RulesConfig::new(2).unwrap()).unwrap();
        assert!(matches!(brute_force_solve(&s), Err(Error::Refused(_))));
        let mut done = s.clone();
        done.status = Status::WonBy(Player::Hero);
        assert!(matches!(solve(&done, SolveLimits::default()), Err(Error::InvalidState(_))));
    }
}

//! Atropos-k move legality and game progression.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, MoveViolation, Result};
use crate::lattice::{format_node, is_rainbow, parse_node, Board, Color, Coord};

/// How far from the last colored node a move may land.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Reach {
    Finite(u32),
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RulesConfig {
    pub k: Reach,
}

impl RulesConfig {
    pub fn new(k: u32) -> Result<RulesConfig> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be >= 1".into()));
        }
        Ok(RulesConfig { k: Reach::Finite(k) })
    }

    pub fn unbounded() -> RulesConfig {
        RulesConfig { k: Reach::Unbounded }
    }

    /// Parses `"3"`, `"inf"` or `"∞"`.
    pub fn parse(s: &str) -> Result<RulesConfig> {
        match s {
            "inf" | "infinity" | "∞" => Ok(RulesConfig::unbounded()),
            _ => s
                .parse::<u32>()
                .map_err(|_| Error::InvalidArgument(format!("bad k `{s}`")))
                .and_then(RulesConfig::new),
        }
    }

    pub fn finite_k(&self) -> Option<u32> {
        match self.k {
            Reach::Finite(k) => Some(k),
            Reach::Unbounded => None,
        }
    }
}

impl fmt::Display for RulesConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.k {
            Reach::Finite(k) => write!(f, "{k}"),
            Reach::Unbounded => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    Hero,
    Adversary,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Hero => Player::Adversary,
            Player::Adversary => Player::Hero,
        }
    }

    /// The player to move after `plies` moves when `first` moved first.
    pub fn after(first: Player, plies: usize) -> Player {
        if plies.is_multiple_of(2) {
            first
        } else {
            first.opponent()
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Hero => "hero",
            Player::Adversary => "adversary",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Ongoing,
    WonBy(Player),
    /// Only reachable on boards without a Sperner boundary.
    ExhaustedNoRainbow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Move {
    pub node: Coord,
    pub color: Color,
}

impl Move {
    pub fn new(node: Coord, color: Color) -> Move {
        Move { node, color }
    }
}

/// The triangle that would turn rainbow if `node` took `color`, if any.
pub fn rainbow_with(board: &Board, node: Coord, color: Color) -> Option<[Coord; 3]> {
    if !color.is_player() {
        return None;
    }
    board
        .triangles_containing(node)
        .ok()?
        .into_iter()
        .find(|t| {
            let cols = t.map(|c| if c == node { color } else { board.color(c) });
            is_rainbow(cols[0], cols[1], cols[2])
        })
}

/// Whether coloring `mv.node` with `mv.color` would complete a rainbow triangle.
pub fn creates_rainbow(board: &Board, mv: Move) -> Result<bool> {
    match board.get(mv.node) {
        None => Err(Error::NotFound(mv.node)),
        Some(c) if c.is_player() => Err(Error::InvalidMove(MoveViolation::Recolor)),
        Some(_) if !mv.color.is_player() => Err(Error::InvalidMove(MoveViolation::Uncolored)),
        Some(_) => Ok(rainbow_with(board, mv.node, mv.color).is_some()),
    }
}

/// Colors that can go on an uncolored `node` without completing a rainbow.
pub fn safe_colors_at(board: &Board, node: Coord) -> Vec<Color> {
    Color::PLAYER
        .into_iter()
        .filter(|&c| rainbow_with(board, node, c).is_none())
        .collect()
}

/// Uncolored nodes within distance `k` of `last`, or every uncolored node
/// when that window is empty.
pub fn window(board: &Board, last: Option<Coord>, config: RulesConfig) -> Vec<Coord> {
    let free = |c: &Coord| board.color(*c) == Color::Uncolored;
    if let (Some(last), Reach::Finite(k)) = (last, config.k) {
        let near: Vec<Coord> = board.ball(last, k).into_iter().filter(free).collect();
        if !near.is_empty() {
            return near;
        }
    }
    board.uncolored().collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GameState {
    pub board: Board,
    pub last: Option<Coord>,
    pub to_move: Player,
    pub config: RulesConfig,
    pub status: Status,
    /// The rainbow that ended the game, when it ended that way.
    pub losing_triangle: Option<[Coord; 3]>,
}

impl GameState {
    /// A fresh game: Hero to move, no last node.
    pub fn new(board: Board, config: RulesConfig) -> Result<GameState> {
        GameState::resume(board, None, Player::Hero, config)
    }

    /// A legal mid-game state. Fails if the board already holds a rainbow or
    /// `last` does not name a colored node.
    pub fn resume(board: Board, last: Option<Coord>, to_move: Player, config: RulesConfig) -> Result<GameState> {
        if let Some(l) = last {
            match board.get(l) {
                None => return Err(Error::NotFound(l)),
                Some(Color::Uncolored) => {
                    return Err(Error::InvalidState(format!("last node {l} is uncolored")))
                }
                Some(_) => {}
            }
        }
        if let Some(t) = board.rainbow_triangles().first() {
            return Err(Error::InvalidState(format!(
                "board already has a rainbow triangle {} {} {}",
                t[0], t[1], t[2]
            )));
        }
        let status = if board.count_uncolored() == 0 {
            Status::ExhaustedNoRainbow
        } else {
            Status::Ongoing
        };
        Ok(GameState {
            board,
            last,
            to_move,
            config,
            status,
            losing_triangle: None,
        })
    }

    pub fn is_over(&self) -> bool {
        self.status != Status::Ongoing
    }

    pub fn legal_targets(&self) -> Result<Vec<Coord>> {
        if self.is_over() {
            return Err(Error::InvalidState("game is finished".into()));
        }
        Ok(window(&self.board, self.last, self.config))
    }

    pub fn is_legal_target(&self, node: Coord) -> bool {
        if self.is_over() || self.board.get(node) != Some(Color::Uncolored) {
            return false;
        }
        match (self.last, self.config.k) {
            (Some(last), Reach::Finite(k)) => {
                crate::lattice::lattice_distance(last, node) <= k
                    || self.board.ball(last, k).iter().all(|&c| self.board.color(c).is_player())
            }
            _ => true,
        }
    }

    pub fn safe_colors(&self, node: Coord) -> Result<Vec<Color>> {
        if !self.board.contains(node) {
            return Err(Error::NotFound(node));
        }
        if !self.is_legal_target(node) {
            return Err(Error::InvalidMove(self.violation(node)));
        }
        Ok(safe_colors_at(&self.board, node))
    }

    fn violation(&self, node: Coord) -> MoveViolation {
        if self.is_over() {
            MoveViolation::Finished
        } else if !self.board.contains(node) {
            MoveViolation::OffBoard
        } else if self.board.color(node).is_player() {
            MoveViolation::Recolor
        } else {
            MoveViolation::NotInWindow
        }
    }

    pub fn apply(&self, mv: Move) -> Result<GameState> {
        if !mv.color.is_player() {
            return Err(Error::InvalidMove(MoveViolation::Uncolored));
        }
        if !self.is_legal_target(mv.node) {
            return Err(Error::InvalidMove(self.violation(mv.node)));
        }
        let rainbow = rainbow_with(&self.board, mv.node, mv.color);
        let mut next = self.clone();
        next.board.put(mv.node, mv.color);
        next.last = Some(mv.node);
        next.to_move = self.to_move.opponent();
        next.status = if rainbow.is_some() {
            Status::WonBy(self.to_move.opponent())
        } else if next.board.count_uncolored() == 0 {
            Status::ExhaustedNoRainbow
        } else {
            Status::Ongoing
        };
        next.losing_triangle = rainbow;
        Ok(next)
    }

    /// Applies moves in order, stopping at the first illegal one.
    pub fn replay(&self, moves: &[Move]) -> Result<GameState> {
        moves.iter().try_fold(self.clone(), |s, &m| s.apply(m))
    }
}

/// Parses a move transcript: one `<row> <offset> <R|G|B>` (or `T|BL|BR <color>`)
/// per line; blank lines and `#` comments are skipped.
pub fn parse_transcript(board: &Board, text: &str) -> Result<Vec<Move>> {
    let mut moves = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::parse(i + 1, 1, format!("bad move `{line}`"));
        let (node, used) = parse_node(board, &toks).ok_or_else(bad)?;
        if toks.len() != used + 1 {
            return Err(bad());
        }
        let color = match toks[used] {
            "R" => Color::Red,
            "G" => Color::Green,
            "B" => Color::Blue,
            _ => return Err(bad()),
        };
        moves.push(Move::new(node, color));
    }
    Ok(moves)
}

pub fn format_transcript(board: &Board, moves: &[Move]) -> String {
    moves
        .iter()
        .map(|m| format!("{} {}\n", format_node(board, m.node), m.color))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{lattice_distance, Corner};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn k(n: u32) -> RulesConfig {
        RulesConfig::new(n).unwrap()
    }

    #[test]
    fn fresh_board_all_interior_targets() {
        let s = GameState::new(Board::new(7).unwrap(), k(2)).unwrap();
        assert_eq!(s.legal_targets().unwrap().len(), 28);
    }

    #[test]
    fn window_then_jump() {
        let mut b = Board::new(7).unwrap();
        let last = Coord::new(4, 2);
        for c in b.ball(last, 2) {
            if b.color(c) == Color::Uncolored {
                let col = safe_colors_at(&b, c)[0];
                b.set(c, col).unwrap();
            }
        }
        let s = GameState::resume(b.clone(), Some(last), Player::Hero, k(2)).unwrap();
        let targets = s.legal_targets().unwrap();
        let brute: Vec<Coord> = b.uncolored().filter(|&c| lattice_distance(c, last) <= 2).collect();
        assert!(brute.is_empty());
        assert_eq!(targets, b.uncolored().collect::<Vec<_>>());
        assert!(!targets.is_empty());

        // one node left in the window: only it is legal
        let mut b2 = b.clone();
        let hole = Coord::new(5, 2);
        b2.set(hole, Color::Uncolored).unwrap();
        let s2 = GameState::resume(b2, Some(last), Player::Hero, k(2)).unwrap();
        assert_eq!(s2.legal_targets().unwrap(), vec![hole]);
        assert_eq!(
            s2.apply(Move::new(Coord::new(1, 1), Color::Red)),
            Err(Error::InvalidMove(MoveViolation::NotInWindow))
        );
    }

    #[test]
    fn unbounded_reach_is_every_uncolored_node() {
        let mut s = GameState::new(Board::new(4).unwrap(), RulesConfig::unbounded()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        while !s.is_over() {
            let t = s.legal_targets().unwrap();
            assert_eq!(t, s.board.uncolored().collect::<Vec<_>>());
            let node = t[rng.gen_range(0..t.len())];
            s = s.apply(Move::new(node, Color::PLAYER[rng.gen_range(0..3)])).unwrap();
        }
    }

    #[test]
    fn atropos_one_opening_is_adjacency() {
        let s = GameState::new(Board::new(7).unwrap(), k(1)).unwrap();
        let s = s.apply(Move::new(Coord::new(3, 3), Color::Red)).unwrap();
        let mut t = s.legal_targets().unwrap();
        t.sort();
        let mut n = s.board.neighbors(Coord::new(3, 3)).unwrap();
        n.sort();
        assert_eq!(t, n);
        // a node on the rim of the interior: its uncolored neighbors only
        let s = GameState::new(Board::new(7).unwrap(), k(1)).unwrap();
        let s = s.apply(Move::new(Coord::new(1, 1), Color::Green)).unwrap();
        let mut t = s.legal_targets().unwrap();
        t.sort();
        assert_eq!(t, vec![Coord::new(1, 2), Coord::new(2, 1)]);
    }

    #[test]
    fn rainbow_detection() {
        let mut b = Board::new(5).unwrap();
        let node = Coord::new(2, 2);
        b.set(Coord::new(2, 3), Color::Green).unwrap();
        b.set(Coord::new(3, 2), Color::Blue).unwrap();
        assert!(!b.has_rainbow());
        assert!(creates_rainbow(&b, Move::new(node, Color::Red)).unwrap());
        assert!(!creates_rainbow(&b, Move::new(node, Color::Green)).unwrap());
        assert_eq!(
            creates_rainbow(&b, Move::new(Coord::new(2, 3), Color::Red)),
            Err(Error::InvalidMove(MoveViolation::Recolor))
        );

        // every triangle holds two reds: nothing can be rainbow
        let mut r = Board::new(5).unwrap();
        let center = Coord::new(2, 2);
        for n in r.neighbors(center).unwrap() {
            r.set(n, Color::Red).unwrap();
        }
        for c in Color::PLAYER {
            assert!(!creates_rainbow(&r, Move::new(center, c)).unwrap());
        }
    }

    #[test]
    fn rainbow_check_agrees_with_full_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 10_000 {
            let mut s = GameState::new(Board::new(5).unwrap(), k(2)).unwrap();
            while !s.is_over() {
                let t = s.legal_targets().unwrap();
                let mv = Move::new(t[rng.gen_range(0..t.len())], Color::PLAYER[rng.gen_range(0..3)]);
                let claimed = creates_rainbow(&s.board, mv).unwrap();
                let next = s.apply(mv).unwrap();
                assert_eq!(claimed, next.board.has_rainbow());
                assert_eq!(claimed, matches!(next.status, Status::WonBy(p) if p != s.to_move));
                assert_eq!(next.board.count_uncolored() + 1, s.board.count_uncolored());
                checked += 1;
                s = next;
            }
        }
    }

    #[test]
    fn apply_rejects_bad_moves_without_mutation() {
        let s = GameState::new(Board::new(3).unwrap(), k(2)).unwrap();
        let before = s.clone();
        let corner = s.board.corner(Corner::Top);
        assert_eq!(s.apply(Move::new(corner, Color::Red)), Err(Error::InvalidMove(MoveViolation::Recolor)));
        assert!(s.apply(Move::new(Coord::new(1, 1), Color::Uncolored)).is_err());
        assert_eq!(s, before);
    }

    #[test]
    fn losing_move_ends_game_for_mover() {
        let mut b = Board::new(5).unwrap();
        b.set(Coord::new(2, 3), Color::Green).unwrap();
        b.set(Coord::new(3, 2), Color::Blue).unwrap();
        let s = GameState::resume(b, Some(Coord::new(3, 2)), Player::Adversary, k(2)).unwrap();
        let next = s.apply(Move::new(Coord::new(2, 2), Color::Red)).unwrap();
        assert_eq!(next.status, Status::WonBy(Player::Hero));
        assert!(next.losing_triangle.is_some());
        assert_eq!(
            next.apply(Move::new(Coord::new(1, 1), Color::Red)),
            Err(Error::InvalidMove(MoveViolation::Finished))
        );
        assert!(next.legal_targets().is_err());
    }

    fn all_games_end_in_a_win(s: &GameState) -> bool {
        if let Status::WonBy(_) = s.status {
            return true;
        }
        if s.status == Status::ExhaustedNoRainbow {
            return false;
        }
        s.legal_targets().unwrap().into_iter().all(|n| {
            Color::PLAYER
                .into_iter()
                .all(|c| all_games_end_in_a_win(&s.apply(Move::new(n, c)).unwrap()))
        })
    }

    #[test]
    fn exhaustive_play_never_draws_on_small_boards() {
        for size in 1..=2 {
            for kk in [k(1), k(2), RulesConfig::unbounded()] {
                let s = GameState::new(Board::new(size).unwrap(), kk).unwrap();
                assert!(all_games_end_in_a_win(&s));
            }
        }
    }

    #[test]
    fn transcript_round_trip() {
        let board = Board::new(4).unwrap();
        let moves = vec![
            Move::new(Coord::new(2, 1), Color::Red),
            Move::new(board.corner(Corner::Top), Color::Blue),
            Move::new(Coord::new(1, 3), Color::Green),
        ];
        let text = format_transcript(&board, &moves);
        assert!(text.contains("T B\n"));
        assert_eq!(parse_transcript(&board, &text).unwrap(), moves);
        assert!(parse_transcript(&board, "1 1 X\n").is_err());
        assert!(parse_transcript(&board, "1 1 R extra\n").is_err());
    }

    #[test]
    fn replay_is_deterministic() {
        let s = GameState::new(Board::new(5).unwrap(), k(2)).unwrap();
        let moves = [
            Move::new(Coord::new(2, 2), Color::Red),
            Move::new(Coord::new(3, 2), Color::Red),
            Move::new(Coord::new(2, 3), Color::Green),
        ];
        assert_eq!(s.replay(&moves).unwrap(), s.replay(&moves).unwrap());
        assert_eq!(s.replay(&moves).unwrap().to_move, Player::Adversary);
    }
}

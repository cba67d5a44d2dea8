//! Game sessions, their JSON views and the snapshot format.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use atropos_core::lattice::Corner;
use atropos_core::{Board, Color, Coord, GameState, Move, Player, RulesConfig, Status};
use serde::{Deserialize, Serialize};
use tokio::sync::Mutex;

/// A node on the wire: `{row, offset}` or `{corner: "T" | "BL" | "BR"}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeRef {
    Coord { row: u32, offset: u32 },
    Corner { corner: CornerToken },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CornerToken {
    T,
    BL,
    BR,
}

impl NodeRef {
    pub fn of(board: &Board, c: Coord) -> NodeRef {
        match board.corner_at(c) {
            Some(Corner::Top) => NodeRef::Corner { corner: CornerToken::T },
            Some(Corner::BottomLeft) => NodeRef::Corner { corner: CornerToken::BL },
            Some(Corner::BottomRight) => NodeRef::Corner { corner: CornerToken::BR },
            None => NodeRef::Coord { row: c.row, offset: c.offset },
        }
    }

    pub fn resolve(self, board: &Board) -> Coord {
        match self {
            NodeRef::Coord { row, offset } => Coord::new(row, offset),
            NodeRef::Corner { corner } => board.corner(match corner {
                CornerToken::T => Corner::Top,
                CornerToken::BL => Corner::BottomLeft,
                CornerToken::BR => Corner::BottomRight,
            }),
        }
    }
}

/// A player color on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColorName {
    R,
    G,
    B,
}

impl From<ColorName> for Color {
    fn from(c: ColorName) -> Color {
        match c {
            ColorName::R => Color::Red,
            ColorName::G => Color::Green,
            ColorName::B => Color::Blue,
        }
    }
}

impl ColorName {
    pub fn of(c: Color) -> Option<ColorName> {
        match c {
            Color::Red => Some(ColorName::R),
            Color::Green => Some(ColorName::G),
            Color::Blue => Some(ColorName::B),
            Color::Uncolored => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveView {
    pub node: NodeRef,
    pub color: ColorName,
}

impl MoveView {
    pub fn of(board: &Board, m: Move) -> MoveView {
        MoveView {
            node: NodeRef::of(board, m.node),
            color: ColorName::of(m.color).expect("moves use player colors"),
        }
    }

    pub fn resolve(self, board: &Board) -> Move {
        Move::new(self.node.resolve(board), self.color.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineSide {
    Hero,
    Adversary,
    None,
}

impl EngineSide {
    pub fn plays(self, p: Player) -> bool {
        matches!((self, p), (EngineSide::Hero, Player::Hero) | (EngineSide::Adversary, Player::Adversary))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StatusView {
    Ongoing,
    Won {
        winner: Player,
        /// The rainbow the loser completed.
        triangle: Option<[NodeRef; 3]>,
    },
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SafeColors {
    pub node: NodeRef,
    pub colors: Vec<ColorName>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateView {
    pub board_text: String,
    pub size: u32,
    /// `"inf"` for unbounded reach.
    pub k: String,
    pub to_move: Player,
    pub last: Option<NodeRef>,
    pub status: StatusView,
    pub engine_side: EngineSide,
    pub history: Vec<MoveView>,
    pub legal_targets: Vec<NodeRef>,
    pub safe_colors: Vec<SafeColors>,
}

pub struct Session {
    pub id: String,
    /// Position the session started from; `history` replays from it.
    pub initial: GameState,
    pub state: GameState,
    pub history: Vec<Move>,
    pub engine: EngineSide,
    pub created_at: u64,
}

impl Session {
    pub fn new(id: String, initial: GameState, engine: EngineSide) -> Session {
        let created_at = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        Session {
            id,
            state: initial.clone(),
            initial,
            history: Vec::new(),
            engine,
            created_at,
        }
    }

    pub fn play(&mut self, m: Move) -> atropos_core::Result<()> {
        self.state = self.state.apply(m)?;
        self.history.push(m);
        Ok(())
    }

    pub fn view(&self) -> StateView {
        let s = &self.state;
        let b = &s.board;
        let status = match s.status {
            Status::Ongoing => StatusView::Ongoing,
            Status::WonBy(winner) => StatusView::Won {
                winner,
                triangle: s.losing_triangle.map(|t| t.map(|c| NodeRef::of(b, c))),
            },
            Status::ExhaustedNoRainbow => StatusView::Exhausted,
        };
        let targets = if s.is_over() { Vec::new() } else { s.legal_targets().unwrap_or_default() };
        let safe_colors = targets
            .iter()
            .map(|&c| SafeColors {
                node: NodeRef::of(b, c),
                colors: s.safe_colors(c).unwrap_or_default().into_iter().filter_map(ColorName::of).collect(),
            })
            .collect();
        StateView {
            board_text: b.to_text(),
            size: b.size(),
            k: s.config.to_string(),
            to_move: s.to_move,
            last: s.last.map(|c| NodeRef::of(b, c)),
            status,
            engine_side: self.engine,
            history: self.history.iter().map(|&m| MoveView::of(b, m)).collect(),
            legal_targets: targets.iter().map(|&c| NodeRef::of(b, c)).collect(),
            safe_colors,
        }
    }
}

pub type SessionRef = Arc<Mutex<Session>>;

/// Sessions by id. The map lock is never held across an await; each
/// session has its own async lock, which serializes requests to it.
#[derive(Default)]
pub struct Store {
    sessions: RwLock<HashMap<String, SessionRef>>,
}

impl Store {
    pub fn insert(&self, s: Session) -> SessionRef {
        let id = s.id.clone();
        let r = Arc::new(Mutex::new(s));
        self.sessions.write().expect("store lock").insert(id, r.clone());
        r
    }

    pub fn get(&self, id: &str) -> Option<SessionRef> {
        self.sessions.read().expect("store lock").get(id).cloned()
    }

    pub fn len(&self) -> usize {
        self.sessions.read().expect("store lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub async fn snapshot(&self) -> Snapshot {
        let all: Vec<SessionRef> = self.sessions.read().expect("store lock").values().cloned().collect();
        let mut sessions = Vec::with_capacity(all.len());
        for s in all {
            let s = s.lock().await;
            let b = &s.initial.board;
            sessions.push(SessionRecord {
                id: s.id.clone(),
                created_at: s.created_at,
                engine: s.engine,
                board_text: b.to_text(),
                k: s.initial.config.to_string(),
                last: s.initial.last.map(|c| NodeRef::of(b, c)),
                to_move: s.initial.to_move,
                history: s.history.iter().map(|&m| MoveView::of(b, m)).collect(),
            });
        }
        sessions.sort_by(|a, b| a.id.cmp(&b.id));
        Snapshot { sessions }
    }

    /// Rebuilds a store by replaying every recorded session.
    pub fn restore(snap: &Snapshot) -> atropos_core::Result<Store> {
        let store = Store::default();
        for r in &snap.sessions {
            let board = Board::parse(&r.board_text)?;
            let last = r.last.map(|n| n.resolve(&board));
            let initial = GameState::resume(board, last, r.to_move, RulesConfig::parse(&r.k)?)?;
            let mut s = Session::new(r.id.clone(), initial, r.engine);
            s.created_at = r.created_at;
            for m in &r.history {
                let m = m.resolve(&s.state.board);
                s.play(m)?;
            }
            store.insert(s);
        }
        Ok(store)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub sessions: Vec<SessionRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub id: String,
    pub created_at: u64,
    pub engine: EngineSide,
    pub board_text: String,
    pub k: String,
    pub last: Option<NodeRef>,
    pub to_move: Player,
    pub history: Vec<MoveView>,
}

//! In-place replay of a compiled state: forced continuations along wires,
//! branching only where the window offers more than one safe node.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Board, Color, Coord};
use crate::reduction::{DecisionKind, GadgetKind, ReductionOutput};
use crate::rules::{safe_colors_at, GameState, Player, Status};

/// A mutable replay of one game line with cheap undo. Moves are applied
/// directly to the board; legality is the window rule of the engine.
#[derive(Debug, Clone)]
pub struct Walker {
    pub board: Board,
    pub k: u32,
    pub last: Coord,
    pub to_move: Player,
    log: Vec<(Coord, Coord)>,
}

impl Walker {
    pub fn new(state: &GameState) -> Result<Walker> {
        let k = state
            .config
            .finite_k()
            .ok_or_else(|| Error::Unsupported("replay needs a finite reach".into()))?;
        let last = state
            .last
            .ok_or_else(|| Error::InvalidState("replay needs a last-colored node".into()))?;
        if state.status != Status::Ongoing {
            return Err(Error::InvalidState("game is already over".into()));
        }
        Ok(Walker {
            board: state.board.clone(),
            k,
            last,
            to_move: state.to_move,
            log: Vec::new(),
        })
    }

    /// Uncolored nodes within reach of the last move. Empty means the next
    /// move may go anywhere.
    pub fn window(&self) -> Vec<Coord> {
        self.board
            .ball(self.last, self.k)
            .into_iter()
            .filter(|&c| self.board.color(c) == Color::Uncolored)
            .collect()
    }

    pub fn safe(&self, c: Coord) -> Vec<Color> {
        safe_colors_at(&self.board, c)
    }

    /// Window nodes that can be colored without completing a rainbow.
    pub fn options(&self) -> Vec<(Coord, Vec<Color>)> {
        self.window()
            .into_iter()
            .map(|c| (c, self.safe(c)))
            .filter(|(_, cols)| !cols.is_empty())
            .collect()
    }

    pub fn play(&mut self, c: Coord, color: Color) {
        debug_assert_eq!(self.board.color(c), Color::Uncolored);
        self.board.put(c, color);
        self.log.push((c, self.last));
        self.last = c;
        self.to_move = self.to_move.opponent();
    }

    pub fn mark(&self) -> usize {
        self.log.len()
    }

    pub fn undo(&mut self, mark: usize) {
        while self.log.len() > mark {
            let (c, prev) = self.log.pop().expect("log longer than mark");
            self.board.put(c, Color::Uncolored);
            self.last = prev;
            self.to_move = self.to_move.opponent();
        }
    }

    /// Nodes colored since the walker was created, in order.
    pub fn history(&self) -> impl Iterator<Item = Coord> + '_ {
        self.log.iter().map(|e| e.0)
    }

    /// Red when it is safe, else the first safe color.
    pub fn default_color(safe: &[Color]) -> Color {
        if safe.contains(&Color::Red) {
            Color::Red
        } else {
            safe[0]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    /// More than one safe continuation away from a switch.
    Forcedness,
    /// A decision made by the wrong player.
    Schedule,
    /// The path ran out with nothing in reach.
    DeadEnd,
    /// Replay outcome differs from the formula's value.
    Outcome,
    /// A gadget claim that did not hold.
    Conformance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub kind: FailureKind,
    pub message: String,
    /// Decision choices leading to the failure, as `gadget.port`.
    pub trace: Vec<String>,
}

/// Result of a subtree under both players' best play: `+1` Hero wins, `-1`
/// Adversary wins, `0` the path left through a terminal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Value {
    pub score: i8,
    /// Terminals reached under best play.
    pub exits: BTreeSet<usize>,
}

impl Value {
    fn won(p: Player) -> Value {
        Value {
            score: if p == Player::Hero { 1 } else { -1 },
            exits: BTreeSet::new(),
        }
    }

    fn exit(g: usize) -> Value {
        Value {
            score: 0,
            exits: BTreeSet::from([g]),
        }
    }
}

/// Decision-point search over a compiled state.
pub struct Explorer<'a> {
    out: &'a ReductionOutput,
    pub walker: Walker,
    centres: HashSet<Coord>,
    decisions: HashMap<Coord, usize>,
    /// `C` node of a check → index of its check-b decision.
    check_entries: HashMap<Coord, usize>,
    terminals: HashMap<Coord, usize>,
    names: HashMap<Coord, String>,
    /// Switch centre inside a crossover → (crossover, member name, L, R).
    xswitch: HashMap<Coord, (usize, String, Coord, Coord)>,
    /// Crossover → its two entry nodes.
    xentry: HashMap<usize, (Coord, Coord)>,
    /// Stop searching Hero alternatives once one wins.
    pub cutoff: bool,
    pub lines: u64,
    pub failures: Vec<Failure>,
    /// Every terminal reached on any line, with whether `watch` was colored.
    pub reached: BTreeSet<(usize, bool)>,
    pub watch: Option<Coord>,
    /// Players seen choosing at each switch centre.
    pub choosers: BTreeMap<Coord, BTreeSet<Player>>,
    trace: Vec<String>,
    steps_left: usize,
}

const MAX_FAILURES: usize = 64;

impl<'a> Explorer<'a> {
    pub fn new(out: &'a ReductionOutput) -> Result<Explorer<'a>> {
        let walker = Walker::new(&out.state)?;
        let mut names = HashMap::new();
        let mut centres = HashSet::new();
        let mut terminals = HashMap::new();
        let mut check_entries = HashMap::new();
        let mut xswitch = HashMap::new();
        let mut xentry = HashMap::new();
        for (i, g) in out.gadgets.iter().enumerate() {
            if g.kind == GadgetKind::Crossover {
                if let (Some(x), Some(y)) = (g.role("in_x"), g.role("in_y")) {
                    xentry.insert(i, (x, y));
                }
            }
            if let (GadgetKind::Switch, Some(p)) = (g.kind, g.parent) {
                if out.gadgets[p].kind == GadgetKind::Crossover {
                    if let (Some(s), Some(l), Some(r)) = (g.role("s"), g.role("L"), g.role("R")) {
                        xswitch.insert(s, (p, g.binding.clone(), l, r));
                    }
                }
            }
            let prefix = match g.parent {
                Some(p) => format!("{}/{}", out.gadgets[p].binding, g.binding),
                None => g.binding.clone(),
            };
            for (role, &c) in &g.roles {
                names.entry(c).or_insert_with(|| format!("{prefix}.{role}"));
            }
            match g.kind {
                GadgetKind::Switch => {
                    centres.extend(g.role("s"));
                }
                GadgetKind::Path => {
                    terminals.extend(g.role("E").map(|c| (c, i)));
                }
                _ => {}
            }
        }
        for (i, d) in out.decisions.iter().enumerate() {
            if d.kind == DecisionKind::CheckB {
                if let Some(c) = out.gadgets[d.gadget].role("C") {
                    check_entries.insert(c, i);
                }
            }
        }
        let decisions = out
            .decisions
            .iter()
            .enumerate()
            .filter(|(_, d)| d.kind != DecisionKind::CheckB)
            .map(|(i, d)| (d.node, i))
            .collect();
        let steps_left = walker.board.count_uncolored();
        Ok(Explorer {
            out,
            walker,
            centres,
            decisions,
            check_entries,
            terminals,
            names,
            xswitch,
            xentry,
            cutoff: false,
            lines: 0,
            failures: Vec::new(),
            reached: BTreeSet::new(),
            watch: None,
            choosers: BTreeMap::new(),
            trace: Vec::new(),
            steps_left,
        })
    }

    /// Moves the search to a position reached by `walker` from the compiled
    /// state.
    pub fn reset_to(&mut self, walker: &Walker) {
        self.walker = walker.clone();
        self.steps_left = walker.board.count_uncolored();
    }

    fn fail(&mut self, kind: FailureKind, message: String) {
        if self.failures.len() < MAX_FAILURES {
            self.failures.push(Failure {
                kind,
                message,
                trace: self.trace.clone(),
            });
        }
    }

    fn name(&self, c: Coord) -> String {
        self.names.get(&c).cloned().unwrap_or_else(|| c.to_string())
    }

    /// Plays the position out under best play from both sides; the board is
    /// restored on return.
    pub fn explore(&mut self) -> Value {
        let mark = self.walker.mark();
        let budget = self.steps_left;
        let v = self.explore_inner();
        self.walker.undo(mark);
        self.steps_left = budget;
        v
    }

    fn explore_inner(&mut self) -> Value {
        loop {
            let w = &self.walker;
            if let Some(&d) = self.check_entries.get(&w.last) {
                let expected = self.out.decisions[d].player;
                if w.to_move != expected {
                    let msg = format!("{} moves to b of check {}, schedule says {expected}", w.to_move, self.out.gadgets[self.out.decisions[d].gadget].binding);
                    self.fail(FailureKind::Schedule, msg);
                }
            }
            let window = self.walker.window();
            if window.is_empty() || self.steps_left == 0 {
                let msg = format!("nothing in reach after {}", self.name(self.walker.last));
                self.fail(FailureKind::DeadEnd, msg);
                self.lines += 1;
                return Value { score: 0, exits: BTreeSet::new() };
            }
            let opts = self.walker.options();
            match opts.len() {
                0 => {
                    self.lines += 1;
                    return Value::won(self.walker.to_move.opponent());
                }
                1 => {
                    let (c, cols) = &opts[0];
                    self.walker.play(*c, Walker::default_color(cols));
                    self.steps_left -= 1;
                    if let Some(&g) = self.terminals.get(c) {
                        self.lines += 1;
                        let watched = self.watch.is_some_and(|w| self.walker.board.color(w).is_player());
                        self.reached.insert((g, watched));
                        return Value::exit(g);
                    }
                }
                _ => return self.decide(opts),
            }
        }
    }

    fn decide(&mut self, opts: Vec<(Coord, Vec<Color>)>) -> Value {
        let last = self.walker.last;
        let mover = self.walker.to_move;
        if !self.centres.contains(&last) {
            let names: Vec<String> = opts.iter().map(|o| self.name(o.0)).collect();
            let msg = format!("{} safe continuations after {}: {}", opts.len(), self.name(last), names.join(", "));
            self.fail(FailureKind::Forcedness, msg);
        }
        self.choosers.entry(last).or_default().insert(mover);
        if let Some(&d) = self.decisions.get(&last) {
            let expected = self.out.decisions[d].player;
            if expected != mover {
                let msg = format!("{mover} chooses at {}, schedule says {expected}", self.name(last));
                self.fail(FailureKind::Schedule, msg);
            }
        }
        let mut best: Option<Value> = None;
        for (c, cols) in opts {
            let on_script = self.on_script(last, c);
            let failures_before = self.failures.len();
            self.trace.push(self.name(c));
            let mark = self.walker.mark();
            let before = self.steps_left;
            self.walker.play(c, Walker::default_color(&cols));
            self.steps_left = before.saturating_sub(1);
            let child = match self.terminals.get(&c) {
                Some(&g) => {
                    self.lines += 1;
                    let watched = self.watch.is_some_and(|w| self.walker.board.color(w).is_player());
                    self.reached.insert((g, watched));
                    Value::exit(g)
                }
                None => self.explore(),
            };
            self.walker.undo(mark);
            self.steps_left = before;
            if !on_script {
                // A crossover deviation: the path no longer keeps its parity
                // schedule, so only its refutation matters.
                self.failures.truncate(failures_before);
                let lost = child.score == if mover == Player::Hero { -1 } else { 1 };
                if !lost {
                    let msg = format!("{mover} deviates at {} without losing", self.name(c));
                    self.fail(FailureKind::Forcedness, msg);
                }
            }
            self.trace.pop();
            let better = |a: i8, b: i8| if mover == Player::Hero { a > b } else { a < b };
            best = Some(match best {
                None => child,
                Some(b) if better(child.score, b.score) => child,
                Some(mut b) if child.score == b.score => {
                    b.exits.extend(child.exits);
                    b
                }
                Some(b) => b,
            });
            if self.cutoff && mover == Player::Hero && best.as_ref().is_some_and(|b| b.score == 1) {
                break;
            }
        }
        best.expect("decision has options")
    }

    /// Whether choosing `target` after the switch centre `centre` follows the
    /// intended route through a crossover: in at `in_x`, out through `c`; in
    /// at `in_y`, out through `b`. Choices elsewhere are always on script.
    fn on_script(&self, centre: Coord, target: Coord) -> bool {
        let Some((comp, member, l, r)) = self.xswitch.get(&centre) else {
            return true;
        };
        let Some(&(in_x, in_y)) = self.xentry.get(comp) else {
            return true;
        };
        let colored = |c: Coord| self.walker.board.color(c).is_player();
        let from_x = match (colored(in_x), colored(in_y)) {
            (true, false) => true,
            (false, true) => false,
            _ => return true,
        };
        let want = match (member.as_str(), from_x) {
            ("a", true) => *r,
            ("a", false) => *l,
            ("c", true) => *l,
            ("b", false) => *r,
            _ => return true,
        };
        target == want
    }
}

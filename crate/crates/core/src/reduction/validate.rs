//! Structural checks on a compiled state, derived from the board and the
//! gadget map alone.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use super::templates::{template, GadgetKind};
use super::{DecisionKind, ReductionOutput, RouteTag};
use crate::lattice::{lattice_distance, Color, Coord};
use crate::rules::Player;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    Legality,
    OpeningForce,
    Partition,
    RouteSpacing,
    Separation,
    MissingLink,
    FillerSafety,
    Parity,
    Schedule,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub message: String,
    pub nodes: Vec<Coord>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.kind, self.message)
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub uncolored: usize,
    pub links: usize,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    pub fn summary(&self) -> String {
        if self.passed() {
            return "pass".into();
        }
        let mut s = format!("{} violation(s)", self.violations.len());
        for v in self.violations.iter().take(5) {
            s.push_str("; ");
            s.push_str(&v.to_string());
        }
        s
    }

    fn push(&mut self, kind: ViolationKind, message: impl Into<String>, nodes: Vec<Coord>) {
        self.violations.push(Violation {
            kind,
            message: message.into(),
            nodes,
        });
    }
}

type Key = (usize, String);

/// Runs every structural check and reports all violations found.
pub fn validate_output(out: &ReductionOutput, k: u32) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let board = &out.state.board;

    // Legality and the opening.
    if let Err(e) = board.validate_boundary() {
        rep.push(ViolationKind::Legality, e.to_string(), vec![]);
    }
    let rainbows = board.rainbow_triangles();
    if !rainbows.is_empty() {
        rep.push(ViolationKind::Legality, "rainbow triangle on the board", rainbows[0].to_vec());
    }
    if out.k != k || out.state.config.k != crate::rules::Reach::Finite(k) {
        rep.push(ViolationKind::Legality, format!("state is not compiled for k = {k}"), vec![]);
    }
    let Some(last) = out.state.last else {
        rep.push(ViolationKind::Legality, "no last move recorded", vec![]);
        return rep;
    };
    if board.color(last) == Color::Uncolored {
        rep.push(ViolationKind::Legality, "last node is uncolored", vec![last]);
    }
    if out.state.to_move != Player::Hero {
        rep.push(ViolationKind::Legality, "adversary to move at the start", vec![]);
    }
    let window: Vec<Coord> = board
        .ball(last, k)
        .into_iter()
        .filter(|&c| c != last && board.color(c) == Color::Uncolored)
        .collect();
    if window.len() != 1 {
        rep.push(
            ViolationKind::OpeningForce,
            format!("{} uncolored nodes within reach of the last move", window.len()),
            window,
        );
    }

    // Partition of the uncolored nodes.
    let mut owners: HashMap<Coord, Vec<String>> = HashMap::new();
    for (gi, g) in out.gadgets.iter().enumerate() {
        for &c in &g.cells {
            if board.get(c) == Some(Color::Uncolored) {
                owners.entry(c).or_default().push(format!("gadget {gi}"));
            }
        }
    }
    for (ri, r) in out.routes.iter().enumerate() {
        if r.nodes.len() < 2 {
            rep.push(ViolationKind::RouteSpacing, format!("route {ri} has fewer than two nodes"), vec![]);
            continue;
        }
        for &c in &r.nodes[1..r.nodes.len() - 1] {
            if board.get(c) != Some(Color::Uncolored) {
                rep.push(ViolationKind::Partition, format!("route {ri} node is not uncolored"), vec![c]);
            }
            owners.entry(c).or_default().push(format!("route {ri}"));
        }
        for (end, &(g, ref role)) in [(r.nodes[0], &r.from), (r.nodes[r.nodes.len() - 1], &r.to)] {
            if out.gadgets.get(g).and_then(|g| g.role(role)) != Some(end) {
                rep.push(ViolationKind::Partition, format!("route {ri} does not end at port {g}.{role}"), vec![end]);
            }
        }
        for w in r.nodes.windows(2) {
            let d = lattice_distance(w[0], w[1]);
            if d != 1 && d != k {
                rep.push(ViolationKind::RouteSpacing, format!("route {ri} has a gap of {d}"), w.to_vec());
            }
        }
    }
    let uncolored: Vec<Coord> = board.uncolored().collect();
    rep.uncolored = uncolored.len();
    for &c in &uncolored {
        match owners.get(&c).map(Vec::len).unwrap_or(0) {
            1 => {}
            0 => rep.push(ViolationKind::Partition, "uncolored node outside every gadget and route", vec![c]),
            _ => rep.push(
                ViolationKind::Partition,
                format!("node shared by {}", owners[&c].join(", ")),
                vec![c],
            ),
        }
    }

    // Reach graph: exactly the route steps and the template links.
    let mut expected: HashSet<(Coord, Coord)> = HashSet::new();
    let edge = |a: Coord, b: Coord| if a < b { (a, b) } else { (b, a) };
    for r in &out.routes {
        for w in r.nodes.windows(2) {
            expected.insert(edge(w[0], w[1]));
        }
    }
    for g in &out.gadgets {
        if !GadgetKind::PRIMITIVE.contains(&g.kind) {
            continue;
        }
        let Ok(t) = template(g.kind, k) else { continue };
        for (a, b) in t.links {
            if let (Some(a), Some(b)) = (g.role(a), g.role(b)) {
                expected.insert(edge(a, b));
            }
        }
    }
    let free: HashSet<Coord> = uncolored.iter().copied().collect();
    let mut actual: HashSet<(Coord, Coord)> = HashSet::new();
    for &c in &uncolored {
        for d in board.ball(c, k) {
            if d != c && free.contains(&d) {
                actual.insert(edge(c, d));
            }
        }
    }
    rep.links = actual.len();
    let mut extra: Vec<_> = actual.difference(&expected).copied().collect();
    extra.sort();
    for (a, b) in extra {
        rep.push(
            ViolationKind::Separation,
            format!("unrelated uncolored nodes {a} and {b} are within reach"),
            vec![a, b],
        );
    }
    let mut missing: Vec<_> = expected.difference(&actual).copied().collect();
    missing.sort();
    for (a, b) in missing {
        rep.push(ViolationKind::MissingLink, format!("nodes {a} and {b} should be linked"), vec![a, b]);
    }

    filler_safety(out, &mut rep);
    parity(out, &mut rep);
    rep
}

/// Blue and green may only touch inside a single patch (or on the boundary).
fn filler_safety(out: &ReductionOutput, rep: &mut ValidationReport) {
    let board = &out.state.board;
    let mut patch: HashMap<Coord, usize> = HashMap::new();
    for (gi, g) in out.gadgets.iter().enumerate() {
        for &c in &g.cells {
            patch.insert(c, gi);
        }
    }
    const BOUNDARY: usize = usize::MAX;
    let owner = |c: Coord| {
        if board.is_boundary(c) {
            Some(BOUNDARY)
        } else {
            patch.get(&c).copied()
        }
    };
    let mut seeds = Vec::new();
    for i in 0..board.node_count() {
        let col = board.color_at(i);
        if col == Color::Blue || col == Color::Green {
            let c = board.coord(i);
            if owner(c).is_none() {
                rep.push(ViolationKind::FillerSafety, format!("{col:?} node outside every patch"), vec![c]);
            }
            seeds.push(c);
        }
    }
    let mut seen = HashSet::new();
    for c in seeds {
        for t in board.triangles_containing(c).unwrap_or_default() {
            let mut key = t;
            key.sort();
            if !seen.insert(key) {
                continue;
            }
            let cols: Vec<Color> = t.iter().map(|&c| board.color(c)).collect();
            if !(cols.contains(&Color::Blue) && cols.contains(&Color::Green)) {
                continue;
            }
            let os: HashSet<Option<usize>> = t
                .iter()
                .zip(&cols)
                .filter(|(_, &col)| col == Color::Blue || col == Color::Green)
                .map(|(&c, _)| owner(c))
                .collect();
            if os.len() != 1 || os.contains(&None) {
                rep.push(ViolationKind::FillerSafety, "blue and green meet across patches", t.to_vec());
            }
        }
    }
}

/// Depth parities of every port, propagated from the start node. Bit 0 set:
/// the node can be reached at even depth; bit 1: at odd depth.
fn parity(out: &ReductionOutput, rep: &mut ValidationReport) {
    let g = &out.gadgets;
    let in_crossover = |i: usize| g[i].parent.is_some_and(|p| g[p].kind == GadgetKind::Crossover);
    let route_len: HashMap<(Key, Key), usize> = out
        .routes
        .iter()
        .map(|r| ((r.from.clone(), r.to.clone()), r.nodes.len()))
        .collect();
    let len = |a: (usize, &str), b: (usize, &str)| {
        route_len
            .get(&((a.0, a.1.to_string()), (b.0, b.1.to_string())))
            .map(|&n| n as i64)
    };

    let mut edges: Vec<(Key, Key, i64)> = Vec::new();
    let key = |i: usize, r: &str| (i, r.to_string());
    let mut start = None;
    for (i, gd) in g.iter().enumerate() {
        match gd.kind {
            GadgetKind::Start => start = Some(i),
            GadgetKind::Switch if !in_crossover(i) => {
                edges.push((key(i, "T"), key(i, "s"), 1));
                edges.push((key(i, "s"), key(i, "L"), 1));
                edges.push((key(i, "s"), key(i, "R"), 1));
            }
            GadgetKind::Check => edges.push((key(i, "T"), key(i, "B"), 2)),
            GadgetKind::Merge if !in_crossover(i) => {
                edges.push((key(i, "L"), key(i, "M"), 2));
                edges.push((key(i, "R"), key(i, "M"), 2));
            }
            GadgetKind::Merge => {
                // Inside a crossover the path's continuation depends on the
                // side it came in: left leaves through c, right through b.
                let x = g[i].parent.unwrap();
                let member = |b: &str| out.children(x).find(|(_, c)| c.binding == b).map(|(j, _)| j);
                let (Some(a), Some(sb), Some(sc)) = (member("a"), member("b"), member("c")) else {
                    rep.push(ViolationKind::Parity, format!("crossover {x} is incomplete"), vec![]);
                    continue;
                };
                match (len((i, "M"), (a, "T")), len((a, "R"), (sc, "T")), len((a, "L"), (sb, "T"))) {
                    (Some(m), Some(ac), Some(ab)) => {
                        edges.push((key(i, "L"), key(sc, "L"), 2 + (m - 1) + 2 + (ac - 1) + 2));
                        edges.push((key(i, "R"), key(sb, "R"), 2 + (m - 1) + 2 + (ab - 1) + 2));
                    }
                    _ => rep.push(ViolationKind::Parity, format!("crossover {x} is missing routes"), vec![]),
                }
            }
            _ => {}
        }
    }
    for r in &out.routes {
        edges.push((r.from.clone(), r.to.clone(), r.nodes.len() as i64 - 1));
        let n = r.nodes.len();
        let want = match r.tag {
            RouteTag::Plain => None,
            RouteTag::SwitchConnector | RouteTag::CrossoverReturn => Some(1),
            RouteTag::CrossoverConnector => Some(0),
        };
        if let Some(w) = want {
            if n % 2 != w {
                rep.push(
                    ViolationKind::Parity,
                    format!("{:?} route has {n} nodes", r.tag),
                    vec![r.nodes[0], r.nodes[n - 1]],
                );
            }
        }
    }
    let Some(start) = start else {
        rep.push(ViolationKind::Parity, "no start gadget", vec![]);
        return;
    };
    let mut mask: HashMap<Key, u8> = HashMap::new();
    mask.insert(key(start, "s"), 1);
    mask.insert(key(start, "P"), 2);
    loop {
        let mut changed = false;
        for (a, b, d) in &edges {
            let Some(&m) = mask.get(a) else { continue };
            let shifted = if d % 2 == 0 { m } else { ((m & 1) << 1) | (m >> 1) };
            let e = mask.entry(b.clone()).or_insert(0);
            if *e | shifted != *e {
                *e |= shifted;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let get = |i: usize, r: &str| mask.get(&key(i, r)).copied().unwrap_or(0);
    let node = |i: usize, r: &str| g[i].role(r).into_iter().collect::<Vec<_>>();
    let single = |m: u8| m == 1 || m == 2;

    for (i, gd) in g.iter().enumerate() {
        match gd.kind {
            GadgetKind::Merge if !in_crossover(i) => {
                let (l, r) = (get(i, "L"), get(i, "R"));
                if !single(l) || l != r {
                    rep.push(
                        ViolationKind::Parity,
                        format!("merge {i} inputs arrive with parities {l:#04b} and {r:#04b}"),
                        node(i, "a"),
                    );
                }
            }
            GadgetKind::Check if !in_crossover(i) && gd.role("C").is_some() => {
                if get(i, "C") != 1 {
                    rep.push(
                        ViolationKind::Parity,
                        format!("check {i} is entered from C with parity {:#04b}, want even", get(i, "C")),
                        node(i, "C"),
                    );
                }
                if !out
                    .decisions
                    .iter()
                    .any(|d| d.gadget == i && d.kind == DecisionKind::CheckB && d.player == Player::Adversary)
                {
                    rep.push(ViolationKind::Schedule, format!("check {i} has no adversary entry for b"), node(i, "b"));
                }
            }
            GadgetKind::Switch if !in_crossover(i) => {
                let Some(dec) = out.decisions.iter().find(|d| d.gadget == i) else {
                    rep.push(ViolationKind::Schedule, format!("switch {i} is not in the schedule"), node(i, "s"));
                    continue;
                };
                let rule = match dec.kind {
                    DecisionKind::Quantifier if gd.binding.starts_with('∀') => Player::Adversary,
                    DecisionKind::Quantifier => Player::Hero,
                    DecisionKind::Psi => Player::Adversary,
                    DecisionKind::Clause => Player::Hero,
                    DecisionKind::CheckB => {
                        rep.push(ViolationKind::Schedule, format!("switch {i} scheduled as a check"), node(i, "s"));
                        continue;
                    }
                };
                if dec.player != rule {
                    rep.push(ViolationKind::Schedule, format!("switch {i} chooser is {:?}", dec.player), node(i, "s"));
                }
                let want = match rule {
                    Player::Hero => 1,
                    Player::Adversary => 2,
                };
                let got = get(i, "L");
                if got != want {
                    rep.push(
                        ViolationKind::Parity,
                        format!("switch {i} ({}) branches at parity {got:#04b}, chooser {rule:?}", gd.binding),
                        node(i, "s"),
                    );
                }
                if Some(dec.node) != gd.role("s") {
                    rep.push(ViolationKind::Schedule, format!("switch {i} decision is not at s"), vec![dec.node]);
                }
            }
            _ => {}
        }
    }
}

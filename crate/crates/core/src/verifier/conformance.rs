//! Behavioral checks of single gadgets on small benches: a start gadget
//! feeding the gadget under test, exits ending in terminals.

use serde::{Deserialize, Serialize};

use super::walk::{Explorer, Walker};
use crate::error::{Error, Result};
use crate::lattice::{lattice_distance, Color, Coord};
use crate::reduction::compile::{crossover_bench, CrossoverBench};
use crate::reduction::geom::Pt;
use crate::reduction::layout::{Layout, Port};
use crate::reduction::route::{flex_span, min_rise};
use crate::reduction::validate::{validate_output, ViolationKind};
use crate::reduction::{GadgetKind, Orientation, ReductionOutput, RouteTag};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConformanceCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConformanceReport {
    pub kind: GadgetKind,
    pub k: u32,
    pub checks: Vec<ConformanceCheck>,
}

impl ConformanceReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &ConformanceCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(ConformanceCheck {
            name: name.to_string(),
            passed,
            detail: if passed { String::new() } else { detail.into() },
        });
    }

    /// Records a bench that could not be run as a failed check.
    fn run(&mut self, name: &str, f: impl FnOnce(&mut ConformanceReport) -> Result<()>) {
        if let Err(e) = f(self) {
            self.check(name, false, e.to_string());
        }
    }
}

/// Runs every behavioral claim for `kind` at reach `k`.
pub fn gadget_conformance(kind: GadgetKind, k: u32) -> Result<ConformanceReport> {
    if k < 2 {
        return Err(Error::Unsupported(format!("gadgets need k ≥ 2, got {k}")));
    }
    let mut rep = ConformanceReport { kind, k, checks: Vec::new() };
    match kind {
        GadgetKind::Start => rep.run("start", |r| start(r, k)),
        GadgetKind::Path => {
            for count in [0, 1] {
                rep.run("path", |r| path(r, k, count));
            }
        }
        GadgetKind::Switch => rep.run("switch", |r| switch(r, k)),
        GadgetKind::MultiSwitch => rep.run("multi-switch", |r| multi_switch(r, k)),
        GadgetKind::Merge => {
            rep.run("merge from left", |r| merge(r, k, "L"));
            rep.run("merge from right", |r| merge(r, k, "R"));
        }
        GadgetKind::MultiMerge => rep.run("multi-merge", |r| multi_merge(r, k)),
        GadgetKind::Check => {
            rep.run("check traversal", |r| check_top(r, k));
            rep.run("check right entry after traversal", |r| check_right(r, k, true));
            rep.run("check right entry untraversed", |r| check_right(r, k, false));
        }
        GadgetKind::Crossover => {
            for count in [0, 1] {
                rep.run("crossover", |r| crossover(r, k, count));
            }
        }
        GadgetKind::Corner => return Err(Error::Unsupported("the corner node is not a gadget to traverse".into())),
    }
    Ok(rep)
}

/// Spacing shared by the benches.
struct Bench {
    lay: Layout,
    k: i64,
    jog: i64,
    rise: i64,
}

impl Bench {
    fn new(k: u32) -> Result<Bench> {
        let ki = k as i64;
        Ok(Bench {
            lay: Layout::new(k)?,
            k: ki,
            jog: flex_span(k) + 2 * ki + 4,
            rise: min_rise(k).max(2 * ki + 4) + ki,
        })
    }

    fn place(&mut self, kind: GadgetKind, origin: Pt, name: &str) -> Result<usize> {
        self.lay.place(kind, Pt::snap(origin.x, origin.y), Orientation::Normal, name, None)
    }

    /// Start gadget feeding `port`; `side` says where the port is entered
    /// from: `0` from above, `-1` from the west, `1` from the east.
    fn feed(&mut self, port: Port, side: i64, count: Option<usize>) -> Result<usize> {
        let t = self.lay.port(port);
        let (s, corners): (Pt, Vec<Pt>) = if side == 0 {
            let s = Pt::snap(t.x - self.jog, t.y + 2 * self.rise + self.k);
            let yj = t.y + self.rise;
            (s, vec![Pt::snap(s.x, yj), Pt::snap(t.x, yj)])
        } else {
            let s = Pt::snap(t.x + side * self.jog, t.y + self.rise + self.k);
            (s, vec![Pt::snap(s.x, t.y)])
        };
        let start = self.place(GadgetKind::Start, s, "start")?;
        let p = self.lay.port((start, "P"));
        let mut corners = corners;
        corners[0] = Pt::snap(p.x, corners[0].y);
        self.lay.route((start, "P"), port, &corners, count, RouteTag::Plain)?;
        Ok(start)
    }

    /// Path from `port` to a fresh terminal: sideways by `dx` first when
    /// nonzero, then down.
    fn drain(&mut self, port: Port, dx: i64, name: &str) -> Result<()> {
        let p = self.lay.port(port);
        let corner = Pt::snap(p.x + dx, p.y);
        let end = Pt::snap(corner.x, p.y - self.rise);
        let term = self.lay.terminal(end, name)?;
        let corners = if dx == 0 { vec![] } else { vec![corner] };
        self.lay.route(port, (term, "E"), &corners, None, RouteTag::Plain)?;
        Ok(())
    }

    fn finish(self) -> Result<ReductionOutput> {
        let out = self.lay.finish()?;
        structural(&out)?;
        Ok(out)
    }
}

/// Benches must satisfy the same layout rules as compiled boards.
fn structural(out: &ReductionOutput) -> Result<()> {
    let rep = validate_output(out, out.k);
    let kinds = [
        ViolationKind::Legality,
        ViolationKind::OpeningForce,
        ViolationKind::Partition,
        ViolationKind::RouteSpacing,
        ViolationKind::Separation,
        ViolationKind::MissingLink,
        ViolationKind::FillerSafety,
    ];
    match rep.violations.iter().find(|v| kinds.contains(&v.kind)) {
        Some(v) => Err(Error::InvalidState(format!("bench layout: {}", v.message))),
        None => Ok(()),
    }
}

fn role(out: &ReductionOutput, kind: GadgetKind, binding: &str, role: &str) -> Coord {
    out.gadgets
        .iter()
        .find(|g| g.kind == kind && g.binding == binding)
        .and_then(|g| g.role(role))
        .unwrap_or_else(|| panic!("bench has {binding}.{role}"))
}

fn terminal(out: &ReductionOutput, binding: &str) -> usize {
    out.gadgets
        .iter()
        .position(|g| g.kind == GadgetKind::Path && g.binding == binding)
        .expect("bench terminal")
}

/// Plays forced moves (Red when safe) until `stop` has been colored or a
/// choice, a loss or a terminal comes up. Every position on the way must
/// have a window of exactly one node with Red among its safe colors when
/// `strict`. Returns the nodes colored.
fn forced(w: &mut Walker, stop: Option<Coord>, strict: bool) -> std::result::Result<Vec<Coord>, String> {
    let mut seen = Vec::new();
    loop {
        if stop.is_some_and(|s| w.board.color(s).is_player()) {
            return Ok(seen);
        }
        let window = w.window();
        let opts = w.options();
        if strict && (window.len() != 1 || !opts.first().is_some_and(|o| o.1.contains(&Color::Red))) {
            return Err(format!("after {}: window {:?}, safe {:?}", w.last, window, opts));
        }
        if opts.len() != 1 {
            return Ok(seen);
        }
        let (c, cols) = &opts[0];
        w.play(*c, Walker::default_color(cols));
        seen.push(*c);
        if window.len() == 1 && w.window().is_empty() {
            return Ok(seen);
        }
    }
}

fn start(rep: &mut ConformanceReport, k: u32) -> Result<()> {
    let mut b = Bench::new(k)?;
    let s0 = b.place(GadgetKind::Start, Pt::new(0, 0), "start")?;
    b.drain((s0, "P"), 0, "end")?;
    let out = b.finish()?;
    let w = Walker::new(&out.state)?;
    let s = role(&out, GadgetKind::Start, "start", "s");
    let opts: Vec<Coord> = w.options().into_iter().map(|o| o.0).collect();
    rep.check("unique first move is s", w.window() == vec![s] && opts == vec![s], format!("window {:?}", w.window()));
    Ok(())
}

fn path(rep: &mut ConformanceReport, k: u32, count: usize) -> Result<()> {
    let mut b = Bench::new(k)?;
    let (jog, rise) = (b.jog, b.rise);
    let s0 = b.place(GadgetKind::Start, Pt::new(0, 0), "start")?;
    let p = b.lay.port((s0, "P"));
    let end = b.lay.terminal(Pt::snap(p.x + 3 * jog, p.y - 2 * rise), "end")?;
    let corners = [Pt::snap(p.x, p.y - rise), Pt::snap(p.x + 3 * jog, p.y - rise)];
    b.lay.route((s0, "P"), (end, "E"), &corners, Some(count), RouteTag::Plain)?;
    let out = b.finish()?;
    let nodes = &out.routes[0].nodes;
    let mut w = Walker::new(&out.state)?;
    let seen = forced(&mut w, None, true);
    let name = format!("one forward target, red safe (parity {count})");
    match seen {
        Ok(seen) => {
            let want: Vec<Coord> = std::iter::once(role(&out, GadgetKind::Start, "start", "s")).chain(nodes.iter().copied()).collect();
            rep.check(&name, seen == want, format!("visited {} of {} nodes", seen.len(), want.len()));
            rep.check(&format!("node count parity {count}"), nodes.len() % 2 == count, format!("{} nodes", nodes.len()));
        }
        Err(e) => rep.check(&name, false, e),
    }
    Ok(())
}

fn switch(rep: &mut ConformanceReport, k: u32) -> Result<()> {
    let mut b = Bench::new(k)?;
    let jog = b.jog;
    let sw = b.place(GadgetKind::Switch, Pt::new(0, 0), "sw")?;
    b.feed((sw, "T"), 0, None)?;
    b.drain((sw, "L"), -jog, "end_l")?;
    b.drain((sw, "R"), jog, "end_r")?;
    let out = b.finish()?;
    let end_l = role(&out, GadgetKind::Path, "end_l", "E");
    let end_r = role(&out, GadgetKind::Path, "end_r", "E");
    let s = role(&out, GadgetKind::Switch, "sw", "s");
    let l = role(&out, GadgetKind::Switch, "sw", "L");
    let r = role(&out, GadgetKind::Switch, "sw", "R");
    let mut w = Walker::new(&out.state)?;
    if let Err(e) = forced(&mut w, Some(s), true) {
        rep.check("path into the switch is forced", false, e);
        return Ok(());
    }
    let mut opts: Vec<Coord> = w.options().into_iter().map(|o| o.0).collect();
    opts.sort();
    let mut lr = vec![l, r];
    lr.sort();
    rep.check("after s the targets are exactly L and R", opts == lr, format!("targets {opts:?}"));
    let d = lattice_distance(l, r);
    rep.check("L and R are out of each other's reach (3 apart at k = 2)", d > k && (k != 2 || d == 3), format!("d = {d}"));
    for (pick, other, end) in [(l, r, end_l), (r, l, end_r)] {
        let mut w = w.clone();
        w.play(pick, Color::Red);
        let mut ok = true;
        let mut detail = String::new();
        while w.board.color(end) == Color::Uncolored {
            if w.window().contains(&other) {
                ok = false;
                detail = format!("{other} in reach after {}", w.last);
                break;
            }
            match w.options().as_slice() {
                [(c, cols)] => w.play(*c, Walker::default_color(cols)),
                opts => {
                    ok = false;
                    detail = format!("{} options after {}", opts.len(), w.last);
                    break;
                }
            }
        }
        rep.check("the branch not taken is never reachable again", ok, detail);
    }
    Ok(())
}

fn multi_switch(rep: &mut ConformanceReport, k: u32) -> Result<()> {
    let mut b = Bench::new(k)?;
    let (jog, rise) = (b.jog, b.rise);
    let s1 = b.place(GadgetKind::Switch, Pt::new(0, 0), "s1")?;
    let s2 = b.place(GadgetKind::Switch, Pt::new(2 * jog, -2 * rise), "s2")?;
    b.feed((s1, "T"), 0, None)?;
    let r1 = b.lay.port((s1, "R"));
    let t2 = b.lay.port((s2, "T"));
    b.lay.route((s1, "R"), (s2, "T"), &[Pt::snap(t2.x, r1.y)], Some(1), RouteTag::SwitchConnector)?;
    b.drain((s1, "L"), -jog, "out1")?;
    b.drain((s2, "L"), -jog, "out2")?;
    b.drain((s2, "R"), jog, "out3")?;
    let out = b.finish()?;
    let mut ex = Explorer::new(&out)?;
    let v = ex.explore();
    let want = ["out1", "out2", "out3"].map(|n| terminal(&out, n));
    let all: Vec<usize> = ex.reached.iter().map(|r| r.0).collect();
    rep.check("every out-going path is reachable", all == want, format!("reached {all:?}"));
    rep.check("no forced position offers a choice", ex.failures.is_empty(), format!("{:?}", ex.failures));
    rep.check("leaving through an exit is safe for both", v.score == 0, format!("score {}", v.score));
    let players: Vec<_> = ex.choosers.values().collect();
    let same = players.len() == 2 && players[0] == players[1] && players[0].len() == 1;
    rep.check("one player makes every choice", same, format!("choosers {players:?}"));
    Ok(())
}

fn merge(rep: &mut ConformanceReport, k: u32, from: &'static str) -> Result<()> {
    let mut b = Bench::new(k)?;
    let m = b.place(GadgetKind::Merge, Pt::new(0, 0), "m")?;
    b.feed((m, from), if from == "L" { -1 } else { 1 }, None)?;
    b.drain((m, "M"), 0, "end")?;
    let out = b.finish()?;
    let end = role(&out, GadgetKind::Path, "end", "E");
    let get = |r: &str| role(&out, GadgetKind::Merge, "m", r);
    let (a, bb, mm, l, r) = (get("a"), get("b"), get("M"), get("L"), get("R"));
    let (first, second, color) = if from == "L" { (a, bb, Color::Red) } else { (bb, a, Color::Green) };
    let mut w = Walker::new(&out.state)?;
    if let Err(e) = forced(&mut w, Some(out.gadgets[m].role(from).unwrap()), true) {
        rep.check("path into the merge is forced", false, e);
        return Ok(());
    }
    let safe = w.safe(first);
    rep.check(
        &format!("entering at {from}, {} can only be {color:?}", if from == "L" { "a" } else { "b" }),
        w.window() == vec![first] && safe == vec![color],
        format!("window {:?}, safe {safe:?}", w.window()),
    );
    w.play(first, color);
    let opts: Vec<Coord> = w.options().into_iter().map(|o| o.0).collect();
    rep.check("then the only safe continuation is M", opts == vec![mm], format!("targets {opts:?}"));
    rep.check("and the other node would lose", w.safe(second).is_empty(), format!("safe {:?}", w.safe(second)));
    let tail = forced(&mut w, Some(end), false);
    rep.check("the path leaves through M", tail.is_ok() && w.board.color(end).is_player(), format!("{tail:?}"));
    rep.check("d(M, L) and d(M, R) exceed k", lattice_distance(mm, l) > k && lattice_distance(mm, r) > k, "");
    rep.check("d(a, R) = k + 1", lattice_distance(a, r) == k + 1, format!("d = {}", lattice_distance(a, r)));
    Ok(())
}

fn multi_merge(rep: &mut ConformanceReport, k: u32) -> Result<()> {
    for entry in ["m1.L", "m1.R", "m0.R"] {
        let mut b = Bench::new(k)?;
        let (jog, rise) = (b.jog, b.rise);
        let m0 = b.place(GadgetKind::Merge, Pt::new(0, 0), "m0")?;
        let m1 = b.place(GadgetKind::Merge, Pt::new(-2 * jog, 2 * rise), "m1")?;
        let l0 = b.lay.port((m0, "L"));
        let mp = b.lay.port((m1, "M"));
        b.lay.route((m1, "M"), (m0, "L"), &[Pt::snap(mp.x, l0.y)], None, RouteTag::Plain)?;
        let (g, port, side) = match entry {
            "m1.L" => (m1, "L", -1),
            "m1.R" => (m1, "R", 1),
            _ => (m0, "R", 1),
        };
        b.feed((g, port), side, None)?;
        b.drain((m0, "M"), 0, "out")?;
        let out = b.finish()?;
        let mut ex = Explorer::new(&out)?;
        let v = ex.explore();
        let want = terminal(&out, "out");
        rep.check(
            &format!("entering at {entry} leaves through the root"),
            v.exits == [want].into() && ex.lines == 1 && ex.failures.is_empty(),
            format!("{v:?}, {} lines, {:?}", ex.lines, ex.failures),
        );
    }
    Ok(())
}

fn check_top(rep: &mut ConformanceReport, k: u32) -> Result<()> {
    let mut b = Bench::new(k)?;
    let c = b.place(GadgetKind::Check, Pt::new(0, 0), "c")?;
    b.feed((c, "T"), 0, None)?;
    b.drain((c, "B"), 0, "end")?;
    let out = b.finish()?;
    let end = role(&out, GadgetKind::Path, "end", "E");
    let get = |r: &str| role(&out, GadgetKind::Check, "c", r);
    let (t, a, bb, bottom) = (get("T"), get("a"), get("b"), get("B"));
    let mut w = Walker::new(&out.state)?;
    let seen = forced(&mut w, Some(end), false);
    match seen {
        Ok(seen) => {
            let at = seen.iter().position(|&c| c == t);
            let ok = at.is_some_and(|i| seen.get(i + 1) == Some(&a) && seen.get(i + 2) == Some(&bottom));
            rep.check("top entry colors T, a, B in order", ok, format!("{seen:?}"));
            rep.check("b stays uncolored", w.board.color(bb) == Color::Uncolored, "");
            rep.check("a is colored red", w.board.color(a) == Color::Red, format!("{:?}", w.board.color(a)));
            rep.check("the path leaves at the bottom", w.board.color(end).is_player(), "");
        }
        Err(e) => rep.check("top entry colors T, a, B in order", false, e),
    }
    Ok(())
}

fn check_right(rep: &mut ConformanceReport, k: u32, traversed: bool) -> Result<()> {
    let mut b = Bench::new(k)?;
    let (jog, rise) = (b.jog, b.rise);
    let c = b.place(GadgetKind::Check, Pt::new(0, 0), "c")?;
    if traversed {
        b.feed((c, "T"), 0, None)?;
        let bottom = b.lay.port((c, "B"));
        let cc = b.lay.port((c, "C"));
        let low = bottom.y - rise;
        let far = cc.x + jog;
        let corners = [Pt::snap(bottom.x, low), Pt::snap(far, low), Pt::snap(far, cc.y)];
        b.lay.route((c, "B"), (c, "C"), &corners, None, RouteTag::Plain)?;
    } else {
        b.feed((c, "C"), 1, None)?;
    }
    let out = b.finish()?;
    let get = |r: &str| role(&out, GadgetKind::Check, "c", r);
    let (t, a, bb, bottom, cc) = (get("T"), get("a"), get("b"), get("B"), get("C"));
    let mut w = Walker::new(&out.state)?;
    if let Err(e) = forced(&mut w, Some(cc), false) {
        rep.check("path reaches C", false, e);
        return Ok(());
    }
    if !w.board.color(cc).is_player() {
        rep.check("path reaches C", false, format!("stopped after {}", w.last));
        return Ok(());
    }
    rep.check("after C the only node in reach is b", w.window() == vec![bb], format!("window {:?}", w.window()));
    if traversed {
        let safe = w.safe(bb);
        rep.check("a traversed check makes every color of b lose", safe.is_empty(), format!("safe {safe:?}"));
    } else {
        let safe = w.safe(bb);
        rep.check("an untraversed check lets b be colored", !safe.is_empty(), "b has no safe color");
        if let Some(&col) = safe.first() {
            w.play(bb, col);
            let window = w.window();
            let safe_a = w.safe(a);
            rep.check("then a is forced", window == vec![a], format!("window {window:?}"));
            rep.check("and every color of a loses", safe_a.is_empty(), format!("safe {safe_a:?}"));
            rep.check("d(b, T) and d(b, B) are k + 1", lattice_distance(bb, t) == k + 1 && lattice_distance(bb, bottom) == k + 1, "");
        }
    }
    Ok(())
}

fn crossover(rep: &mut ConformanceReport, k: u32, count: usize) -> Result<()> {
    for (bench, want, name) in [(CrossoverBench::FromX, "out_r", "red in, red out"), (CrossoverBench::FromY, "out_l", "blue in, blue out")] {
        let out = crossover_bench(k, bench, count)?;
        structural(&out)?;
        let mut ex = Explorer::new(&out)?;
        let v = ex.explore();
        let want = terminal(&out, want);
        rep.check(
            &format!("{name} (entry parity {count})"),
            v.score == 0 && v.exits == [want].into(),
            format!("best play gives {v:?}"),
        );
        rep.check("no forced position offers a choice", ex.failures.is_empty(), format!("{:?}", ex.failures));
    }
    let out = crossover_bench(k, CrossoverBench::Twice, count)?;
    structural(&out)?;
    let in_y = out
        .gadgets
        .iter()
        .find(|g| g.kind == GadgetKind::Crossover)
        .and_then(|g| g.role("in_y"))
        .expect("crossover has in_y");
    let mut ex = Explorer::new(&out)?;
    ex.watch = Some(in_y);
    ex.explore();
    let second: Vec<usize> = ex.reached.iter().filter(|r| r.1).map(|r| r.0).collect();
    rep.check(
        &format!("a second traversal never gets out (entry parity {count})"),
        second.is_empty() && ex.lines > 0,
        format!("exits reached after re-entry: {second:?}"),
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const KINDS: [GadgetKind; 8] = [
        GadgetKind::Start,
        GadgetKind::Path,
        GadgetKind::Switch,
        GadgetKind::MultiSwitch,
        GadgetKind::Merge,
        GadgetKind::MultiMerge,
        GadgetKind::Check,
        GadgetKind::Crossover,
    ];

    #[test]
    fn every_gadget_conforms() {
        for k in [2, 3] {
            for kind in KINDS {
                let rep = gadget_conformance(kind, k).unwrap();
                let bad: Vec<_> = rep.failed().collect();
                assert!(rep.passed(), "{} at k={k}: {bad:#?}", kind.name());
            }
        }
    }

    #[test]
    fn corner_and_small_k_are_refused() {
        assert!(gadget_conformance(GadgetKind::Corner, 2).is_err());
        assert!(gadget_conformance(GadgetKind::Switch, 1).is_err());
    }
}

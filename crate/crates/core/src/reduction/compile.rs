//! The global layout: quantifier chain, clause selection, literal wires and
//! their return into the assignment checks.
//!
//! Flow runs top to bottom. The quantifier blocks sit on a vertical spine;
//! each switch sends the path west through the check for `xᵢ` or east through
//! the check for `¬xᵢ` and a merge joins both sides again. Below the spine a
//! staircase of switches picks a clause (adversary), each clause's staircase
//! picks one of its literals (hero), and every literal occurrence becomes a
//! vertical wire. An odd-even transposition network of crossovers sorts the
//! wires into `xₙ … x₁ ¬x₁ … ¬xₙ`, balanced merges join equal literals, and
//! each resulting wire climbs a bus on the far side into its check's `C` port.
//!
//! Depth parities are tracked while routing: the hero colors the nodes at even
//! depth (the start node `s` has depth 0).

use std::collections::HashMap;

use super::geom::Pt;
use super::layout::{Layout, Port};
use super::route::{flex_span, min_rise};
use super::templates::{GadgetKind, Orientation};
use super::validate::validate_output;
use super::{DecisionKind, ReductionOutput, RouteTag};
use crate::error::{Error, Result};
use crate::qbf::{Formula, Literal, Quantifier};
use crate::rules::Player;

/// Compiles `formula` into a state the hero wins iff the formula is true.
pub fn compile(formula: &Formula, k: u32) -> Result<ReductionOutput> {
    if k < 2 {
        return Err(Error::Unsupported(format!("the reduction needs k ≥ 2, got {k}")));
    }
    let plan = Plan::new(formula);
    let mut last = None;
    for spread in 0..3 {
        match Compiler::new(k, spread).and_then(|c| c.run(&plan)) {
            Ok(out) => {
                let report = validate_output(&out, k);
                if report.passed() {
                    return Ok(out);
                }
                last = Some(Error::InvalidState(format!(
                    "compiled state fails validation: {}",
                    report.summary()
                )));
            }
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// The formula as the layout sees it.
#[derive(Debug, Clone)]
struct Plan {
    prefix: Vec<(Quantifier, u32)>,
    clauses: Vec<Vec<Literal>>,
}

impl Plan {
    fn new(f: &Formula) -> Plan {
        let mut prefix = f.prefix().to_vec();
        // A closed formula without variables has no clauses and is true; so
        // is one with an empty matrix. Both compile as a tautology.
        if prefix.is_empty() {
            prefix.push((Quantifier::Exists, 1));
        }
        let mut clauses: Vec<Vec<Literal>> = f
            .clauses()
            .iter()
            .map(|c| {
                let mut out: Vec<Literal> = Vec::new();
                for &l in c {
                    if !out.contains(&l) {
                        out.push(l);
                    }
                }
                out
            })
            .collect();
        if clauses.is_empty() {
            let v = prefix[prefix.len() - 1].1;
            clauses.push(vec![Literal::new(v, true), Literal::new(v, false)]);
        }
        Plan { prefix, clauses }
    }

    fn n(&self) -> u32 {
        self.prefix.len() as u32
    }

    /// Sort key: `xₙ … x₁` then `¬x₁ … ¬xₙ`.
    fn key(&self, l: Literal) -> u32 {
        if l.positive {
            self.n() - l.var
        } else {
            self.n() + l.var - 1
        }
    }
}

/// Spacing constants, all derived from `k`.
#[derive(Debug, Clone, Copy)]
struct Geo {
    k: i64,
    /// Horizontal legs at least this long can take either parity.
    flex: i64,
    /// Vertical legs at least this long always route.
    rise: i64,
    /// Row gap between parallel horizontal legs.
    gap: i64,
    /// Column pitch of the literal wires.
    pitch: i64,
    /// Horizontal offset of a staircase switch from its output column.
    fan: i64,
    /// Row step of a staircase.
    step: i64,
    /// How far a crossover reaches beyond its two columns.
    overhang: i64,
    /// Pitch of the return buses.
    bus: i64,
}

impl Geo {
    fn new(k: u32, spread: i64) -> Geo {
        let ki = k as i64;
        let flex = flex_span(k) + 2 + 2 * ki * spread;
        let rise = min_rise(k).max(2 * ki + 4) + spread * ki;
        let gap = ki + 8;
        let overhang = 2 * flex + 4 * ki + 8;
        let pitch = (2 * overhang + 2 * ki + 10).max(2 * flex + 6 * ki + 10);
        Geo {
            k: ki,
            flex,
            rise,
            gap,
            pitch: pitch + pitch % 2,
            fan: flex + 2 * ki + 2,
            step: rise + ki + gap,
            overhang,
            bus: 2 * ki + 6,
        }
    }

    fn km(&self) -> i64 {
        self.k % 2
    }
}

/// A wire waiting for its next sink: the port it leaves from, the corners it
/// has committed to so far, and its current column.
#[derive(Debug, Clone)]
struct Wire {
    src: Port,
    corners: Vec<Pt>,
    x: i64,
    lit: Literal,
}

#[derive(Debug, Clone, Copy)]
enum Want {
    Free,
    /// Depth parity of the sink.
    Depth(i64),
    /// Parity of the node count.
    Count(usize),
}

struct Compiler {
    g: Geo,
    lay: Layout,
    depth: HashMap<Port, i64>,
}

fn chooser_parity(p: Player) -> i64 {
    match p {
        Player::Hero => 0,
        Player::Adversary => 1,
    }
}

fn quantifier_chooser(q: Quantifier) -> Player {
    match q {
        Quantifier::Exists => Player::Hero,
        Quantifier::ForAll => Player::Adversary,
    }
}

/// Where the path goes after the spine, or after a clause is chosen.
#[derive(Debug, Clone, Copy)]
enum Entry {
    /// The `T` port of a switch, chosen by the given player.
    Switch(usize, Player),
    /// No switch: the path becomes the wire of the first column.
    Column,
}

/// Member gadgets of one crossover.
#[derive(Debug, Clone, Copy)]
struct Xover {
    cx: usize,
    cy: usize,
    mg: usize,
    sa: usize,
    sb: usize,
    sc: usize,
}

impl Compiler {
    fn new(k: u32, spread: i64) -> Result<Compiler> {
        Ok(Compiler {
            g: Geo::new(k, spread),
            lay: Layout::new(k)?,
            depth: HashMap::new(),
        })
    }

    fn connect(&mut self, src: Port, corners: &[Pt], dst: Port, want: Want, tag: RouteTag) -> Result<i64> {
        let d0 = *self.depth.get(&src).expect("source depth known");
        let parity = match want {
            Want::Free => None,
            Want::Depth(w) => Some((w - d0 + 1).rem_euclid(2) as usize),
            Want::Count(c) => Some(c),
        };
        let n = self.lay.route(src, dst, corners, parity, tag)? as i64;
        let d = d0 + n - 1;
        self.depth.insert(dst, d);
        Ok(d)
    }

    fn set_depth(&mut self, port: Port, d: i64) {
        self.depth.insert(port, d);
    }

    fn d(&self, port: Port) -> i64 {
        self.depth[&port]
    }

    fn run(mut self, plan: &Plan) -> Result<ReductionOutput> {
        let g = self.g;
        let (k, km) = (g.k, g.km());

        // Literal occurrences, clause by clause.
        let mut occ: Vec<Literal> = Vec::new();
        let mut first_col = Vec::new();
        for c in &plan.clauses {
            first_col.push(occ.len());
            occ.extend(c.iter().copied());
        }
        let col_x = |c: usize| c as i64 * g.pitch;
        let width = |j: usize| plan.clauses[j].len();
        let m = plan.clauses.len();
        // Where each clause's path enters: its first switch's T, or its column.
        let clause_in_x = |j: usize| {
            if width(j) >= 2 {
                col_x(first_col[j]) + g.fan + km
            } else {
                col_x(first_col[j])
            }
        };
        let target_x = if m >= 2 { clause_in_x(0) + g.fan + km } else { clause_in_x(0) };
        let jog = g.flex + 2;
        let spine_x = target_x - jog;

        // ---- start and quantifier blocks ----
        let n = plan.prefix.len();
        let mut q_y = 0i64;
        let mut blocks = Vec::new();
        for &(q, v) in &plan.prefix {
            let s = Pt::snap(spine_x, q_y);
            let sw = self.lay.place(GadgetKind::Switch, s, Orientation::Normal, format!("{}x{v}", q_token(q)), None)?;
            let l = self.lay.port((sw, "L"));
            let r = self.lay.port((sw, "R"));
            let tx = Pt::snap(l.x - g.flex - 2 * k - 2, l.y - g.rise);
            let ty = Pt::snap(r.x + g.flex + 2 * k + 2, r.y - g.rise);
            let cx = self.lay.place(
                GadgetKind::Check,
                tx - Pt::new(k, k),
                Orientation::Mirrored,
                Literal::new(v, true).to_string(),
                None,
            )?;
            let cy = self.lay.place(
                GadgetKind::Check,
                ty + Pt::new(k, -k),
                Orientation::Normal,
                Literal::new(v, false).to_string(),
                None,
            )?;
            let ym = self.lay.port((cx, "B")).y - g.rise;
            let mg = self.lay.place(
                GadgetKind::Merge,
                Pt::snap(spine_x + km - k, ym),
                Orientation::Normal,
                format!("x{v}"),
                None,
            )?;
            let mp = self.lay.port((mg, "M"));
            q_y = mp.y - g.rise - k;
            blocks.push((q, v, sw, cx, cy, mg));
        }
        let first_t = self.lay.port((blocks[0].2, "T"));
        let start_s = Pt::snap(first_t.x - jog, first_t.y + 2 * g.rise + k);
        let start = self.lay.place(GadgetKind::Start, start_s, Orientation::Normal, "start", None)?;
        self.set_depth((start, "P"), 1);
        let p = self.lay.port((start, "P"));
        let yj = first_t.y + g.rise;
        self.connect(
            (start, "P"),
            &[Pt::snap(p.x, yj), Pt::snap(first_t.x, yj)],
            (blocks[0].2, "T"),
            Want::Depth(chooser_parity(quantifier_chooser(blocks[0].0))),
            RouteTag::Plain,
        )?;

        // ---- selection region geometry (placed before the spine is routed
        // so the last block knows its target) ----
        let last_m = self.lay.port((blocks[n - 1].5, "M"));
        let y_jog = last_m.y - g.rise;
        let y_top = y_jog - g.rise - k; // row of the first switch below the spine
        let psi = self.lay.composite(GadgetKind::MultiSwitch, "ψ", Pt::new(target_x, y_top), None);
        let mut psi_switches = Vec::new();
        let y_clause = if m >= 2 {
            for j in 0..m - 1 {
                let s = Pt::snap(clause_in_x(j) + g.fan, y_top - j as i64 * g.step);
                psi_switches.push(self.lay.place(GadgetKind::Switch, s, Orientation::Normal, "ψ", Some(psi))?);
            }
            self.lay.alias(psi, "T", (psi_switches[0], "T"));
            y_top - (m as i64 - 2) * g.step - 1 - g.rise - k - g.gap
        } else {
            y_top
        };
        let mut clause_comp = Vec::new();
        let mut clause_switches: Vec<Vec<usize>> = Vec::new();
        let mut lowest = y_clause;
        #[allow(clippy::needless_range_loop)]
        for j in 0..m {
            let comp = self.lay.composite(
                GadgetKind::MultiSwitch,
                format!("c{}", j + 1),
                Pt::new(clause_in_x(j), y_clause),
                Some(psi),
            );
            let mut sws = Vec::new();
            for t in 0..width(j).saturating_sub(1) {
                let y = y_clause - t as i64 * g.step;
                let s = Pt::snap(col_x(first_col[j] + t) + g.fan, y);
                sws.push(self.lay.place(GadgetKind::Switch, s, Orientation::Normal, format!("c{}", j + 1), Some(comp))?);
                lowest = lowest.min(y);
            }
            if let Some(&s0) = sws.first() {
                self.lay.alias(comp, "T", (s0, "T"));
            }
            clause_comp.push(comp);
            clause_switches.push(sws);
        }
        let entry = if m >= 2 {
            Entry::Switch(psi_switches[0], Player::Adversary)
        } else if width(0) >= 2 {
            Entry::Switch(clause_switches[0][0], Player::Hero)
        } else {
            Entry::Column
        };

        // ---- route the spine ----
        let mut spine_wire = None;
        for i in 0..n {
            let (q, _, sw, cx, cy, mg) = blocks[i];
            let chooser = quantifier_chooser(q);
            self.lay.decide((sw, "s"), chooser, DecisionKind::Quantifier);
            let dt = self.d((sw, "T"));
            self.set_depth((sw, "s"), dt + 1);
            self.set_depth((sw, "L"), dt + 2);
            self.set_depth((sw, "R"), dt + 2);
            let l = self.lay.port((sw, "L"));
            let r = self.lay.port((sw, "R"));
            let tx = self.lay.port((cx, "T"));
            let ty = self.lay.port((cy, "T"));
            let bx = self.lay.port((cx, "B"));
            let by = self.lay.port((cy, "B"));
            let ml = self.lay.port((mg, "L"));
            let mr = self.lay.port((mg, "R"));
            let c1 = [Pt::snap(tx.x, l.y)];
            let c2 = [Pt::snap(bx.x, ml.y)];
            let c3 = [Pt::snap(ty.x, r.y)];
            let c4 = [Pt::snap(by.x, mr.y)];

            // Where the merge output goes next, and the depth it needs there.
            let (next, next_corners, next_want): (Option<Port>, Vec<Pt>, Option<i64>) = if i + 1 < n {
                let nq = blocks[i + 1];
                (Some((nq.2, "T")), vec![], Some(chooser_parity(quantifier_chooser(nq.0))))
            } else {
                let mp = self.lay.port((mg, "M"));
                let corners = vec![Pt::snap(mp.x, y_jog), Pt::snap(target_x, y_jog)];
                match entry {
                    Entry::Switch(s, p) => (Some((s, "T")), corners, Some(chooser_parity(p))),
                    Entry::Column => (None, corners, None),
                }
            };
            // Pick the parity of the first leg so that the link to the next
            // block can reach the depth it needs.
            let mut p1 = None;
            if let (Some(next), Some(want)) = (next, next_want) {
                let n1 = self.lay.plan_len((sw, "L"), (cx, "T"), &c1, None)? as i64;
                let n2 = self.lay.plan_len((cx, "B"), (mg, "L"), &c2, None)? as i64;
                let dm = dt + 2 + (n1 - 1) + 2 + (n2 - 1) + 2;
                let count = (want - dm + 1).rem_euclid(2) as usize;
                if self.lay.plan_len((mg, "M"), next, &next_corners, Some(count)).is_err() {
                    p1 = Some(((n1 + 1) % 2) as usize);
                }
            }
            self.connect((sw, "L"), &c1, (cx, "T"), p1.map_or(Want::Free, Want::Count), RouteTag::Plain)?;
            let d = self.d((cx, "T"));
            self.set_depth((cx, "B"), d + 2);
            let dl = self.connect((cx, "B"), &c2, (mg, "L"), Want::Free, RouteTag::Plain)?;
            self.connect((sw, "R"), &c3, (cy, "T"), Want::Free, RouteTag::Plain)?;
            let d = self.d((cy, "T"));
            self.set_depth((cy, "B"), d + 2);
            self.connect((cy, "B"), &c4, (mg, "R"), Want::Depth(dl), RouteTag::Plain)?;
            self.set_depth((mg, "M"), dl + 2);
            match next {
                Some(next) => {
                    self.connect((mg, "M"), &next_corners, next, Want::Depth(next_want.unwrap()), RouteTag::Plain)?;
                }
                None => {
                    spine_wire = Some(Wire {
                        src: (mg, "M"),
                        corners: next_corners,
                        x: target_x,
                        lit: occ[0],
                    });
                }
            }
        }

        // ---- clause selection ----
        // Pending input of each clause: either routed into its first switch
        // already, or a wire that continues as the clause's only column.
        let mut clause_wire: Vec<Option<Wire>> = vec![None; m];
        if m >= 2 {
            for (j, &sw) in psi_switches.iter().enumerate() {
                self.lay.decide((sw, "s"), Player::Adversary, DecisionKind::Psi);
                let dt = self.d((sw, "T"));
                for role in ["s", "L", "R"] {
                    self.set_depth((sw, role), dt + if role == "s" { 1 } else { 2 });
                }
                let l = self.lay.port((sw, "L"));
                let wire = Wire {
                    src: (sw, "L"),
                    corners: vec![Pt::snap(clause_in_x(j), l.y)],
                    x: clause_in_x(j),
                    lit: occ[first_col[j]],
                };
                clause_wire[j] = Some(wire);
                let r = self.lay.port((sw, "R"));
                if j + 1 < m - 1 {
                    let nt = self.lay.port((psi_switches[j + 1], "T"));
                    self.connect(
                        (sw, "R"),
                        &[Pt::snap(nt.x, r.y)],
                        (psi_switches[j + 1], "T"),
                        Want::Count(1),
                        RouteTag::SwitchConnector,
                    )?;
                } else {
                    clause_wire[m - 1] = Some(Wire {
                        src: (sw, "R"),
                        corners: vec![Pt::snap(clause_in_x(m - 1), r.y)],
                        x: clause_in_x(m - 1),
                        lit: occ[first_col[m - 1]],
                    });
                }
            }
        } else if let Some(w) = spine_wire.take() {
            clause_wire[0] = Some(w);
        }

        let mut columns: Vec<Wire> = Vec::with_capacity(occ.len());
        for j in 0..m {
            let sws = clause_switches[j].clone();
            if let Some(w) = clause_wire[j].take() {
                if let Some(&s0) = sws.first() {
                    self.connect(w.src, &w.corners, (s0, "T"), Want::Depth(0), RouteTag::Plain)?;
                } else {
                    columns.push(Wire { lit: occ[first_col[j]], x: col_x(first_col[j]), ..w });
                    continue;
                }
            }
            // m = 1 with a wide clause: the spine routed straight into s0.
            for (t, &sw) in sws.iter().enumerate() {
                self.lay.decide((sw, "s"), Player::Hero, DecisionKind::Clause);
                let dt = self.d((sw, "T"));
                for role in ["s", "L", "R"] {
                    self.set_depth((sw, role), dt + if role == "s" { 1 } else { 2 });
                }
                let c = first_col[j] + t;
                let l = self.lay.port((sw, "L"));
                columns.push(Wire {
                    src: (sw, "L"),
                    corners: vec![Pt::snap(col_x(c), l.y)],
                    x: col_x(c),
                    lit: occ[c],
                });
                let r = self.lay.port((sw, "R"));
                if t + 1 < sws.len() {
                    let nt = self.lay.port((sws[t + 1], "T"));
                    self.connect((sw, "R"), &[Pt::snap(nt.x, r.y)], (sws[t + 1], "T"), Want::Count(1), RouteTag::SwitchConnector)?;
                } else {
                    columns.push(Wire {
                        src: (sw, "R"),
                        corners: vec![Pt::snap(col_x(c + 1), r.y)],
                        x: col_x(c + 1),
                        lit: occ[c + 1],
                    });
                }
            }
        }
        debug_assert_eq!(columns.len(), occ.len());
        for (c, w) in columns.iter().enumerate() {
            debug_assert_eq!(w.x, col_x(c));
        }

        // ---- sorting network ----
        let mut y = lowest - 1 - g.rise - g.gap;
        let mut stage = 0usize;
        loop {
            let sorted = columns.windows(2).all(|w| plan.key(w[0].lit) <= plan.key(w[1].lit));
            if sorted {
                break;
            }
            let swaps: Vec<usize> = (stage % 2..columns.len().saturating_sub(1))
                .step_by(2)
                .filter(|&i| plan.key(columns[i].lit) > plan.key(columns[i + 1].lit))
                .collect();
            stage += 1;
            if swaps.is_empty() {
                continue;
            }
            let mut bottom = y;
            for &i in &swaps {
                let (left, right) = (columns[i].clone(), columns[i + 1].clone());
                let (out_l, out_r, low) = self.crossover(left, right, y)?;
                columns[i] = out_l;
                columns[i + 1] = out_r;
                bottom = bottom.min(low);
            }
            y = bottom - g.rise - g.gap;
        }

        // ---- multi-merges ----
        let mut groups: Vec<(Literal, Vec<Wire>)> = Vec::new();
        for w in columns {
            match groups.last_mut() {
                Some((l, ws)) if *l == w.lit => ws.push(w),
                _ => groups.push((w.lit, vec![w])),
            }
        }
        let mut multi: HashMap<usize, usize> = HashMap::new();
        let mut ym = y - g.gap;
        while groups.iter().any(|(_, ws)| ws.len() > 1) {
            for (gi, (lit, ws)) in groups.iter_mut().enumerate() {
                if ws.len() < 2 {
                    continue;
                }
                let comp = *multi.entry(gi).or_insert_with(|| {
                    self.lay
                        .composite(GadgetKind::MultiMerge, lit.to_string(), Pt::new(ws[0].x, ym), None)
                });
                let mut next = Vec::new();
                let mut it = std::mem::take(ws).into_iter();
                while let Some(a) = it.next() {
                    match it.next() {
                        None => next.push(a),
                        Some(b) => next.push(self.merge_pair(a, b, ym, comp)?),
                    }
                }
                *ws = next;
            }
            ym -= k + g.rise + g.gap;
        }

        // ---- return buses ----
        let wires: Vec<Wire> = groups.into_iter().map(|(_, mut ws)| ws.pop().unwrap()).collect();
        // Unrouted wires count too: a bus must not climb through its own leg.
        let (lo, hi) = self.lay.bounds().expect("layout is not empty");
        let xs = || wires.iter().flat_map(|w| w.corners.iter().map(|c| c.x).chain([w.x]));
        let west = xs().fold(lo.x, i64::min) - g.flex - 4;
        let east = xs().fold(hi.x, i64::max) + g.flex + 4;
        let y_exit = ym;
        let positives: Vec<&Wire> = wires.iter().filter(|w| w.lit.positive).collect();
        let negatives: Vec<&Wire> = wires.iter().filter(|w| !w.lit.positive).collect();
        let check_of = |lit: Literal| {
            let b = &blocks[(lit.var - 1) as usize];
            if lit.positive {
                b.3
            } else {
                b.4
            }
        };
        // Leftmost positive turns highest onto the innermost bus.
        let np = plan.n() as i64;
        for (p, w) in positives.iter().enumerate() {
            let chk = check_of(w.lit);
            let c = self.lay.port((chk, "C"));
            let bx = west - (np - w.lit.var as i64) * g.bus;
            let yt = y_exit - p as i64 * g.gap;
            let mut corners = w.corners.clone();
            corners.extend([Pt::snap(w.x, yt), Pt::snap(bx, yt), Pt::snap(bx, c.y)]);
            self.connect(w.src, &corners, (chk, "C"), Want::Depth(0), RouteTag::Plain)?;
            self.lay.decide((chk, "b"), Player::Adversary, DecisionKind::CheckB);
        }
        for (q, w) in negatives.iter().rev().enumerate() {
            let chk = check_of(w.lit);
            let c = self.lay.port((chk, "C"));
            let bx = east + (np - w.lit.var as i64) * g.bus;
            let yt = y_exit - q as i64 * g.gap;
            let mut corners = w.corners.clone();
            corners.extend([Pt::snap(w.x, yt), Pt::snap(bx, yt), Pt::snap(bx, c.y)]);
            self.connect(w.src, &corners, (chk, "C"), Want::Depth(0), RouteTag::Plain)?;
            self.lay.decide((chk, "b"), Player::Adversary, DecisionKind::CheckB);
        }
        // Checks whose literal never occurs get no return wire.
        for b in &blocks {
            for (chk, lit) in [(b.3, Literal::new(b.1, true)), (b.4, Literal::new(b.1, false))] {
                if !wires.iter().any(|w| w.lit == lit) {
                    self.lay.seal((chk, "C"));
                }
            }
        }
        self.lay.finish()
    }

    /// A crossover on columns `left`, `right` with its inputs at row `y0`.
    /// Returns the two continuing wires (swapped) and its lowest row.
    fn crossover(&mut self, left: Wire, right: Wire, y0: i64) -> Result<(Wire, Wire, i64)> {
        let (xl, xr) = (left.x, right.x);
        let x = self.crossover_parts(xl, xr, y0, format!("{}|{}", left.lit, right.lit))?;
        let dx = self.connect(left.src, &left.corners, (x.cx, "T"), Want::Free, RouteTag::Plain)?;
        let dy = self.connect(right.src, &right.corners, (x.cy, "T"), Want::Free, RouteTag::Plain)?;
        self.set_depth((x.cx, "B"), dx + 2);
        self.set_depth((x.cy, "B"), dy + 2);
        let (dl, dr) = self.crossover_wiring(&x, xl, xr)?;
        // The wire that entered on the right leaves on the left via b, and
        // vice versa; fix its depth to what that path actually gives.
        let d_br = self.d((x.sb, "R")) + dr - dl;
        self.set_depth((x.sb, "R"), d_br);
        let br = self.lay.port((x.sb, "R"));
        let cl = self.lay.port((x.sc, "L"));
        let cr = self.lay.port((x.sc, "R"));
        let out_l = Wire {
            src: (x.sb, "R"),
            corners: vec![Pt::snap(xl, br.y)],
            x: xl,
            lit: right.lit,
        };
        let out_r = Wire {
            src: (x.sc, "L"),
            corners: vec![Pt::snap(xr, cl.y)],
            x: xr,
            lit: left.lit,
        };
        Ok((out_l, out_r, br.y.min(cr.y)))
    }

    /// Places the gadgets of a crossover whose checks take their inputs at
    /// `(xl, y0)` and `(xr, y0)`.
    fn crossover_parts(&mut self, xl: i64, xr: i64, y0: i64, label: String) -> Result<Xover> {
        let g = self.g;
        let k = g.k;
        let xc = (xl + xr) / 2;
        let comp = self.lay.composite(GadgetKind::Crossover, label, Pt::new(xc, y0), None);
        let tx = Pt::snap(xl, y0);
        let ty = Pt::snap(xr, y0);
        let cx = self.lay.place(GadgetKind::Check, tx - Pt::new(k, k), Orientation::Mirrored, "x", Some(comp))?;
        let cy = self.lay.place(GadgetKind::Check, ty + Pt::new(k, -k), Orientation::Normal, "y", Some(comp))?;
        let ym = self.lay.port((cx, "B")).y - g.rise;
        let mg = self.lay.place(GadgetKind::Merge, Pt::snap(xc - 1, ym), Orientation::Normal, "m", Some(comp))?;
        let mp = self.lay.port((mg, "M"));
        let sa = self.lay.place(
            GadgetKind::Switch,
            Pt::snap(mp.x - g.km(), mp.y - g.rise - k),
            Orientation::Normal,
            "a",
            Some(comp),
        )?;
        let yb = self.lay.port((sa, "L")).y - g.rise - k;
        let sb = self.lay.place(
            GadgetKind::Switch,
            Pt::snap(xl - g.flex - 2 * k - 1, yb),
            Orientation::Normal,
            "b",
            Some(comp),
        )?;
        let sc = self.lay.place(
            GadgetKind::Switch,
            Pt::snap(xr + g.flex + 2 * k + 1, yb),
            Orientation::Normal,
            "c",
            Some(comp),
        )?;
        self.lay.alias(comp, "in_x", (cx, "T"));
        self.lay.alias(comp, "in_y", (cy, "T"));
        Ok(Xover { cx, cy, mg, sa, sb, sc })
    }

    /// Routes a crossover's internal paths. The depths of both checks' `B`
    /// must be known; returns the depths at the merge's two inputs.
    fn crossover_wiring(&mut self, x: &Xover, xl: i64, xr: i64) -> Result<(i64, i64)> {
        let g = self.g;
        let Xover { cx, cy, mg, sa, sb, sc } = *x;
        let bx = self.lay.port((cx, "B"));
        let by = self.lay.port((cy, "B"));
        let ml = self.lay.port((mg, "L"));
        let mr = self.lay.port((mg, "R"));
        let dl = self.connect((cx, "B"), &[Pt::snap(bx.x, ml.y)], (mg, "L"), Want::Free, RouteTag::Plain)?;
        let dr = self.connect((cy, "B"), &[Pt::snap(by.x, mr.y)], (mg, "R"), Want::Free, RouteTag::Plain)?;
        // Depths below the merge depend on the side the path came from; take
        // the left side's.
        self.set_depth((mg, "M"), dl + 2);
        let da = self.connect((mg, "M"), &[], (sa, "T"), Want::Free, RouteTag::Plain)?;
        self.set_depth((sa, "L"), da + 2);
        self.set_depth((sa, "R"), da + 2);
        let bt = self.lay.port((sb, "T"));
        let ct = self.lay.port((sc, "T"));
        let al = self.lay.port((sa, "L"));
        let ar = self.lay.port((sa, "R"));
        let db = self.connect((sa, "L"), &[Pt::snap(bt.x, al.y)], (sb, "T"), Want::Count(0), RouteTag::CrossoverConnector)?;
        let dc = self.connect((sa, "R"), &[Pt::snap(ct.x, ar.y)], (sc, "T"), Want::Count(0), RouteTag::CrossoverConnector)?;
        for (sw, d) in [(sb, db), (sc, dc)] {
            self.set_depth((sw, "L"), d + 2);
            self.set_depth((sw, "R"), d + 2);
        }
        // Returns into the checks' C ports.
        let far_l = xl - g.overhang;
        let far_r = xr + g.overhang;
        let bl = self.lay.port((sb, "L"));
        let cr = self.lay.port((sc, "R"));
        let cxc = self.lay.port((cx, "C"));
        let cyc = self.lay.port((cy, "C"));
        self.connect(
            (sb, "L"),
            &[Pt::snap(far_l, bl.y), Pt::snap(far_l, cxc.y)],
            (cx, "C"),
            Want::Count(1),
            RouteTag::CrossoverReturn,
        )?;
        self.connect(
            (sc, "R"),
            &[Pt::snap(far_r, cr.y), Pt::snap(far_r, cyc.y)],
            (cy, "C"),
            Want::Count(1),
            RouteTag::CrossoverReturn,
        )?;
        Ok((dl, dr))
    }

    /// Joins two wires carrying the same literal with a merge at row `ym`.
    fn merge_pair(&mut self, a: Wire, b: Wire, ym: i64, comp: usize) -> Result<Wire> {
        let mid = (a.x + b.x) / 2;
        let mg = self.lay.place(GadgetKind::Merge, Pt::snap(mid - 1, ym), Orientation::Normal, a.lit.to_string(), Some(comp))?;
        let ml = self.lay.port((mg, "L"));
        let mr = self.lay.port((mg, "R"));
        let mut ca = a.corners.clone();
        ca.push(Pt::snap(a.x, ml.y));
        let mut cb = b.corners.clone();
        cb.push(Pt::snap(b.x, mr.y));
        let dl = self.connect(a.src, &ca, (mg, "L"), Want::Free, RouteTag::Plain)?;
        self.connect(b.src, &cb, (mg, "R"), Want::Depth(dl), RouteTag::Plain)?;
        self.set_depth((mg, "M"), dl + 2);
        let mp = self.lay.port((mg, "M"));
        Ok(Wire {
            src: (mg, "M"),
            corners: vec![],
            x: mp.x,
            lit: a.lit,
        })
    }
}

/// Where a crossover bench's path enters, and what follows the exits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossoverBench {
    /// Enter at `in_x`; both exits end in terminals.
    FromX,
    /// Enter at `in_y`; both exits end in terminals.
    FromY,
    /// Enter at `in_x`; the exit on the right loops back into `in_y`.
    Twice,
}

/// A lone crossover fed from a start gadget, its exits ending in terminals
/// named `out_l` and `out_r`. `entry_count` fixes the parity of the entry
/// path's node count.
pub fn crossover_bench(k: u32, bench: CrossoverBench, entry_count: usize) -> Result<ReductionOutput> {
    let mut c = Compiler::new(k, 0)?;
    let g = c.g;
    let (xl, xr) = (0, g.pitch);
    let x = c.crossover_parts(xl, xr, 0, "bench".into())?;
    let entry = if bench == CrossoverBench::FromY { x.cy } else { x.cx };
    let t = c.lay.port((entry, "T"));
    let jog = g.flex + 2;
    let start = c.lay.place(
        GadgetKind::Start,
        Pt::snap(t.x - jog, t.y + 2 * g.rise + g.gap + g.k),
        Orientation::Normal,
        "start",
        None,
    )?;
    c.set_depth((start, "P"), 1);
    let p = c.lay.port((start, "P"));
    let yj = t.y + g.rise;
    c.connect(
        (start, "P"),
        &[Pt::snap(p.x, yj), Pt::snap(t.x, yj)],
        (entry, "T"),
        Want::Count(entry_count),
        RouteTag::Plain,
    )?;
    c.set_depth((x.cx, "B"), 0);
    c.set_depth((x.cy, "B"), 0);
    c.crossover_wiring(&x, xl, xr)?;
    let br = c.lay.port((x.sb, "R"));
    let cl = c.lay.port((x.sc, "L"));
    let end_l = c.lay.terminal(Pt::snap(xl, br.y - g.rise), "out_l")?;
    c.connect((x.sb, "R"), &[Pt::snap(xl, br.y)], (end_l, "E"), Want::Free, RouteTag::Plain)?;
    if bench == CrossoverBench::Twice {
        let ty = c.lay.port((x.cy, "T"));
        let (lo, hi) = c.lay.bounds().expect("crossover placed");
        let ylow = lo.y - g.rise - g.gap;
        let xfar = hi.x + g.flex + g.gap;
        let yhigh = ty.y + g.rise + g.gap;
        let corners = [
            Pt::snap(xr, cl.y),
            Pt::snap(xr, ylow),
            Pt::snap(xfar, ylow),
            Pt::snap(xfar, yhigh),
            Pt::snap(ty.x, yhigh),
        ];
        c.connect((x.sc, "L"), &corners, (x.cy, "T"), Want::Free, RouteTag::Plain)?;
    } else {
        let end_r = c.lay.terminal(Pt::snap(xr, cl.y - g.rise), "out_r")?;
        c.connect((x.sc, "L"), &[Pt::snap(xr, cl.y)], (end_r, "E"), Want::Free, RouteTag::Plain)?;
    }
    c.lay.finish()
}

fn q_token(q: Quantifier) -> &'static str {
    match q {
        Quantifier::Exists => "∃",
        Quantifier::ForAll => "∀",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Color;
    use crate::qbf::{parse_qdimacs, random_formula};
    use crate::reduction::ViolationKind;

    fn formula(text: &str) -> Formula {
        parse_qdimacs(text).unwrap()
    }

    fn children_of(out: &ReductionOutput, kind: GadgetKind, binding: &str) -> Vec<GadgetKind> {
        let id = out.gadgets.iter().position(|g| g.kind == kind && g.binding == binding).unwrap_or_else(|| panic!("no {binding}"));
        out.children(id).map(|(_, g)| g.kind).collect()
    }

    #[test]
    fn single_positive_literal_structure() {
        let f = formula("p cnf 1 1\ne 1 0\n1 0\n");
        for k in [2, 3] {
            let out = compile(&f, k).unwrap();
            assert_eq!(out.top_level(GadgetKind::Switch).count(), 1);
            assert_eq!(out.count(GadgetKind::Check), 2);
            assert_eq!(out.count(GadgetKind::Crossover), 0);
            assert_eq!(children_of(&out, GadgetKind::MultiSwitch, "ψ"), vec![GadgetKind::MultiSwitch]);
            assert!(children_of(&out, GadgetKind::MultiSwitch, "c1").is_empty());
            assert!(out.find(GadgetKind::Check, "x1").unwrap().1.role("C").is_some());
            assert!(out.find(GadgetKind::Check, "¬x1").unwrap().1.role("C").is_none());
            let q = out.find(GadgetKind::Switch, "∃x1").unwrap().0;
            assert!(out.decisions.iter().any(|d| d.gadget == q && d.player == Player::Hero));
        }
    }

    #[test]
    fn wide_clause_feeds_one_wire_per_literal() {
        let f = formula("p cnf 3 1\ne 1 2 3 0\n1 -2 -3 0\n");
        let out = compile(&f, 2).unwrap();
        assert_eq!(children_of(&out, GadgetKind::MultiSwitch, "c1").len(), 2);
        for (binding, fed) in [("x1", true), ("¬x2", true), ("¬x3", true), ("¬x1", false), ("x2", false), ("x3", false)] {
            let c = out.find(GadgetKind::Check, binding).unwrap().1.role("C");
            assert_eq!(c.is_some(), fed, "{binding}");
        }
        let into_c = out.routes.iter().filter(|r| r.to.1 == "C" && out.gadgets[r.to.0].parent.is_none()).count();
        assert_eq!(into_c, 3);
    }

    #[test]
    fn repeated_literals_are_merged_not_duplicated() {
        let f = formula("p cnf 2 2\ne 1 0\na 2 0\n1 2 0\n1 -2 0\n");
        let out = compile(&f, 2).unwrap();
        assert!(out.find(GadgetKind::MultiMerge, "x1").is_some());
        let into_c = out.routes.iter().filter(|r| r.to.1 == "C" && out.gadgets[r.to.0].parent.is_none()).count();
        assert_eq!(into_c, 3);
    }

    #[test]
    fn degenerate_formulas_compile() {
        for text in ["p cnf 0 0\n", "p cnf 2 0\na 1 2 0\n", "p cnf 1 1\ne 1 0\n1 -1 0\n"] {
            let out = compile(&formula(text), 2).unwrap();
            assert!(validate_output(&out, 2).passed(), "{text:?}");
        }
    }

    #[test]
    fn seeded_corpus_validates() {
        for seed in 0..24u64 {
            let n = 1 + (seed % 5) as usize;
            let m = 1 + (seed % 5) as usize;
            let f = random_formula(n, m, 3.min(n + 1), seed).unwrap();
            for k in [2, 3] {
                let out = compile(&f, k).unwrap_or_else(|e| panic!("{f} at k={k}: {e}"));
                let rep = validate_output(&out, k);
                assert!(rep.passed(), "{f} at k={k}: {}", rep.summary());
            }
        }
    }

    #[test]
    fn compile_is_deterministic() {
        let f = random_formula(3, 3, 3, 7).unwrap();
        let a = compile(&f, 2).unwrap();
        let b = compile(&f, 2).unwrap();
        assert_eq!(a.board_text(), b.board_text());
        assert_eq!(a.sidecar_json(), b.sidecar_json());
    }

    #[test]
    fn k_below_two_is_refused() {
        let f = formula("p cnf 1 1\ne 1 0\n1 0\n");
        assert!(matches!(compile(&f, 1), Err(Error::Unsupported(_))));
    }

    #[test]
    fn skewed_connector_breaks_parity() {
        let f = formula("p cnf 3 1\ne 1 2 3 0\n1 2 3 0\n");
        let plan = Plan::new(&f);
        let honest = Compiler::new(2, 0).unwrap().run(&plan).unwrap();
        let id = honest.routes.iter().position(|r| r.tag == RouteTag::SwitchConnector).unwrap();
        let mut c = Compiler::new(2, 0).unwrap();
        c.lay.skew(id);
        let out = c.run(&plan).unwrap();
        let rep = validate_output(&out, 2);
        assert!(rep.has(ViolationKind::Parity), "{}", rep.summary());
    }

    #[test]
    fn displaced_route_node_is_caught() {
        let f = formula("p cnf 1 1\ne 1 0\n1 0\n");
        let mut out = compile(&f, 2).unwrap();
        let r = out.routes.iter().max_by_key(|r| r.nodes.len()).unwrap().clone();
        let p = r.nodes[r.nodes.len() / 2];
        let board = &mut out.state.board;
        let q = board
            .ball(p, 1)
            .into_iter()
            .find(|&q| q != p && board.color(q) == Color::Red && board.is_interior(q))
            .unwrap();
        board.set(p, Color::Red).unwrap();
        board.set(q, Color::Uncolored).unwrap();
        let rep = validate_output(&out, 2);
        assert!(!rep.passed());
        assert!(rep.has(ViolationKind::Partition) && rep.has(ViolationKind::MissingLink), "{}", rep.summary());
    }
}

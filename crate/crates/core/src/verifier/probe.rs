//! Off-script play: the losing side departs from the scripted line (other
//! colors, other nodes) and the winner must still have a reply that does not
//! lose within the local window.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::walk::{Explorer, Failure, FailureKind, Walker};
use crate::error::Result;
use crate::lattice::{lattice_distance, Color, Coord};
use crate::reduction::ReductionOutput;
use crate::rules::Player;

/// Empty nodes the local referee plays over.
pub const LOCAL_EMPTIES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub probes: usize,
    /// Off-script moves actually played.
    pub deviations: usize,
    /// Positions where the winning side had no reply that survives locally
    /// after the losing side deviated.
    pub on_script_losses: usize,
    /// Probes ended because the deviating side ran out of safe moves.
    pub deviator_losses: usize,
    pub failures: Vec<Failure>,
}

impl ProbeReport {
    pub fn passed(&self) -> bool {
        self.on_script_losses == 0
    }
}

/// Runs `probes` seeded probes of up to `plies` deviations each.
pub fn adversarial_probe(out: &ReductionOutput, plies: usize, seed: u64) -> Result<ProbeReport> {
    probe_many(out, 100, plies, seed)
}

pub fn probe_many(out: &ReductionOutput, probes: usize, plies: usize, seed: u64) -> Result<ProbeReport> {
    let mut rep = ProbeReport {
        probes,
        deviations: 0,
        on_script_losses: 0,
        deviator_losses: 0,
        failures: Vec::new(),
    };
    let base = Walker::new(&out.state)?;
    let mut ex = Explorer::new(out)?;
    ex.cutoff = true;
    let winner = if ex.explore().score > 0 { Player::Hero } else { Player::Adversary };
    for i in 0..probes {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(i as u64));
        let mut w = base.clone();
        // Play the script to the end, the loser choosing at random and the
        // winner keeping to a winning line, then back up to a random point.
        let start = w.mark();
        let mut script = Vec::new();
        loop {
            let opts = w.options();
            if opts.is_empty() {
                break;
            }
            let mut pick = rng.gen_range(0..opts.len());
            if opts.len() > 1 && w.to_move == winner {
                pick = (0..opts.len())
                    .find(|&j| {
                        let (c, cols) = &opts[j];
                        let mark = w.mark();
                        w.play(*c, Walker::default_color(cols));
                        ex.reset_to(&w);
                        let score = ex.explore().score;
                        w.undo(mark);
                        score == if winner == Player::Hero { 1 } else { -1 }
                    })
                    .unwrap_or(pick);
            }
            let (c, cols) = &opts[pick];
            script.push((w.to_move, (*c, Walker::default_color(cols))));
            w.play(*c, Walker::default_color(cols));
        }
        // Only the loser has a reason to leave the script.
        let turns: Vec<usize> = (0..script.len()).filter(|&j| script[j].0 != winner).collect();
        let Some(&at) = turns.get(rng.gen_range(0..turns.len().max(1))) else {
            continue;
        };
        w.undo(start + at);
        let scripted = Some(script[at].1);
        let deviator = w.to_move;
        let mut played = Vec::new();
        for ply in 0..plies {
            // Deviator: any safe move other than the scripted one.
            let moves: Vec<(Coord, Color)> = w
                .options()
                .into_iter()
                .flat_map(|(c, cols)| cols.into_iter().map(move |col| (c, col)))
                .filter(|&m| ply > 0 || Some(m) != scripted)
                .collect();
            if moves.is_empty() {
                if w.options().is_empty() {
                    rep.deviator_losses += 1;
                }
                break;
            }
            let (c, col) = moves[rng.gen_range(0..moves.len())];
            w.play(c, col);
            played.push(format!("{deviator} {c} {col:?}"));
            rep.deviations += 1;
            // Scripted side: best reply by local search.
            match best_reply(&mut w) {
                Some(((rc, rcol), v)) => {
                    played.push(format!("{} {rc} {rcol:?} ({v})", deviator.opponent()));
                    w.play(rc, rcol)
                }
                None => {
                    rep.on_script_losses += 1;
                    if rep.failures.len() < 16 {
                        rep.failures.push(Failure {
                            kind: FailureKind::Conformance,
                            message: format!(
                                "{} has no surviving reply after {deviator} colored {c} {col:?} (probe {i}, deviation {})",
                                deviator.opponent(),
                                ply + 1
                            ),
                            trace: std::iter::once(format!("scripted line left at ply {at}"))
                                .chain(played.iter().cloned())
                                .collect(),
                        });
                    }
                    break;
                }
            }
            debug_assert_eq!(w.to_move, deviator);
        }
    }
    Ok(rep)
}

/// A reply for the side to move that does not lose within the local window,
/// preferring replies that win there. `None` when every reply loses.
fn best_reply(w: &mut Walker) -> Option<((Coord, Color), i8)> {
    let last = w.last;
    let mut near: Vec<Coord> = w
        .board
        .ball(last, 3 * w.k)
        .into_iter()
        .filter(|&c| w.board.color(c) == Color::Uncolored)
        .collect();
    near.sort_by_key(|&c| (lattice_distance(last, c), c));
    near.truncate(LOCAL_EMPTIES);
    let mut local = Local { cells: near, memo: HashMap::new() };
    let mut best: Option<((Coord, Color), i8)> = None;
    for (c, cols) in w.options() {
        for col in cols {
            let mark = w.mark();
            w.play(c, col);
            let v = -local.value(w);
            w.undo(mark);
            if v >= 0 && best.is_none_or(|b| v > b.1) {
                best = Some(((c, col), v));
            }
        }
    }
    best
}

/// Game restricted to a few empty nodes. Values are for the side to move:
/// `1` wins, `-1` loses, `0` the play leaves the window first.
struct Local {
    cells: Vec<Coord>,
    memo: HashMap<(u32, Coord), i8>,
}

impl Local {
    fn key(&self, w: &Walker) -> u32 {
        self.cells.iter().fold(0u32, |acc, &c| {
            acc * 4
                + match w.board.color(c) {
                    Color::Uncolored => 0,
                    Color::Red => 1,
                    Color::Green => 2,
                    Color::Blue => 3,
                }
        })
    }

    fn value(&mut self, w: &mut Walker) -> i8 {
        let window = w.window();
        if window.is_empty() || window.iter().any(|c| !self.cells.contains(c)) {
            return 0;
        }
        let key = (self.key(w), w.last);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let mut best = -1;
        'outer: for (c, cols) in w.options() {
            for col in cols {
                let mark = w.mark();
                w.play(c, col);
                let v = -self.value(w);
                w.undo(mark);
                best = best.max(v);
                if best == 1 {
                    break 'outer;
                }
            }
        }
        self.memo.insert(key, best);
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qbf::parse_qdimacs;
    use crate::reduction::compile;

    #[test]
    fn hundred_probes_on_single_literal() {
        let f = parse_qdimacs("p cnf 1 1\ne 1 0\n1 0\n").unwrap();
        let out = compile(&f, 2).unwrap();
        let rep = adversarial_probe(&out, 3, 7).unwrap();
        assert_eq!(rep.probes, 100);
        assert!(rep.deviations > 0);
        assert!(rep.passed(), "{:#?}", rep.failures);
    }

    #[test]
    fn green_on_a_wire_still_has_a_reply() {
        let f = parse_qdimacs("p cnf 1 1\ne 1 0\n1 0\n").unwrap();
        let out = compile(&f, 2).unwrap();
        let route = out
            .routes
            .iter()
            .find(|r| out.gadgets[r.from.0].kind == crate::reduction::GadgetKind::Start)
            .unwrap();
        // A node whose successor is a full step away.
        let i = (1..route.nodes.len() - 2)
            .find(|&i| lattice_distance(route.nodes[i], route.nodes[i + 1]) == 2)
            .unwrap();
        let mut w = Walker::new(&out.state).unwrap();
        while w.last != route.nodes[i - 1] {
            let (c, cols) = w.options()[0].clone();
            w.play(c, Walker::default_color(&cols));
        }
        assert!(w.safe(route.nodes[i]).contains(&Color::Green));
        w.play(route.nodes[i], Color::Green);
        assert!(best_reply(&mut w).is_some());
    }

    #[test]
    fn probes_are_deterministic() {
        let f = parse_qdimacs("p cnf 2 1\ne 1 0\na 2 0\n1 -2 0\n").unwrap();
        let out = compile(&f, 2).unwrap();
        let a = probe_many(&out, 20, 2, 3).unwrap();
        let b = probe_many(&out, 20, 2, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn losers_cannot_escape_by_deviating() {
        for text in ["p cnf 1 1\na 1 0\n1 0\n", "p cnf 2 2\na 1 0\ne 2 0\n1 2 0\n-1 -2 0\n"] {
            let f = parse_qdimacs(text).unwrap();
            for k in [2, 3] {
                let rep = adversarial_probe(&compile(&f, k).unwrap(), 4, 1).unwrap();
                assert!(rep.deviations > 100);
                assert!(rep.passed(), "{f} at k={k}: {:#?}", rep.failures);
            }
        }
    }
}

//! Path routing: turns a corner polyline into a chain of empty nodes whose
//! consecutive gaps are 1 or `k`.
//!
//! Legs alternate between horizontal (along a row, optionally drifting a few
//! rows through diagonal "bump" steps) and vertical (a two-column zig-zag).
//! Every leg starts and ends with a full `k` step so corners and gadget ports
//! never see a short gap, and short steps are never adjacent to each other.

use serde::{Deserialize, Serialize};

use super::geom::Pt;
use crate::error::{Error, Result};

/// An ordered chain of empty nodes, endpoints included.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathRoute {
    pub nodes: Vec<Pt>,
}

impl PathRoute {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn parity(&self) -> usize {
        self.nodes.len() % 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    Long,
    Short,
    Up,
    Down,
}

/// Step sequences for one leg: the shortest plan for each parity of the
/// step count, when one exists.
type LegPlans = [Option<Vec<Step>>; 2];

fn horizontal_plans(dx: i64, dy: i64, k: i64) -> LegPlans {
    let mut plans: LegPlans = [None, None];
    for extra in 0..=3 {
        let up = dy.max(0) + extra;
        let down = (-dy).max(0) + extra;
        let bumps = up + down;
        let rest = dx - (2 * k - 1) * bumps;
        if rest < 0 {
            break;
        }
        if rest % 2 != 0 {
            continue;
        }
        let units = rest / 2;
        for short in 0..=2 * k + 2 {
            if units < short || (units - short) % k != 0 {
                continue;
            }
            let long = (units - short) / k;
            let need = short + if bumps > 0 { 2 } else { 1 };
            if long < need {
                continue;
            }
            let steps = (long + short + bumps) as usize;
            if plans[steps % 2].is_some() {
                continue;
            }
            let mut seq = vec![Step::Long];
            seq.extend(std::iter::repeat_n(Step::Up, up as usize));
            seq.extend(std::iter::repeat_n(Step::Down, down as usize));
            let mut longs_left = long - 1;
            if bumps > 0 {
                seq.push(Step::Long);
                longs_left -= 1;
            }
            for _ in 0..short {
                seq.push(Step::Short);
                seq.push(Step::Long);
                longs_left -= 1;
            }
            seq.extend(std::iter::repeat_n(Step::Long, longs_left as usize));
            plans[steps % 2] = Some(seq);
        }
    }
    plans
}

fn vertical_plans(dy: i64, k: i64) -> LegPlans {
    let mut plans: LegPlans = [None, None];
    for short in 0..=2 * k + 2 {
        if dy < short || (dy - short) % k != 0 {
            continue;
        }
        let long = (dy - short) / k;
        if long < short + 1 {
            continue;
        }
        let steps = (long + short) as usize;
        if plans[steps % 2].is_some() {
            continue;
        }
        let mut seq = vec![Step::Long];
        for _ in 0..short {
            seq.push(Step::Short);
            seq.push(Step::Long);
        }
        seq.extend(std::iter::repeat_n(Step::Long, (long - 1 - short) as usize));
        plans[steps % 2] = Some(seq);
    }
    plans
}

fn is_vertical(a: Pt, b: Pt) -> bool {
    (a.x - b.x).abs() <= 1
}

fn leg_plans(a: Pt, b: Pt, k: i64) -> LegPlans {
    if is_vertical(a, b) {
        vertical_plans((b.y - a.y).abs(), k)
    } else {
        horizontal_plans((b.x - a.x).abs(), b.y - a.y, k)
    }
}

/// Nodes of a leg after its first node, ending at `b`.
fn walk(a: Pt, b: Pt, k: i64, seq: &[Step]) -> Vec<Pt> {
    let mut out = Vec::with_capacity(seq.len());
    if is_vertical(a, b) {
        let sy = (b.y - a.y).signum();
        let base = a.x.min(b.x);
        let column = |y: i64| base + (base - y).rem_euclid(2);
        let mut y = a.y;
        for s in seq {
            y += sy * if *s == Step::Short { 1 } else { k };
            out.push(Pt::new(column(y), y));
        }
    } else {
        let sx = (b.x - a.x).signum();
        let mut p = a;
        for s in seq {
            p = p + match s {
                Step::Long => Pt::new(sx * 2 * k, 0),
                Step::Short => Pt::new(sx * 2, 0),
                Step::Up => Pt::new(sx * (2 * k - 1), 1),
                Step::Down => Pt::new(sx * (2 * k - 1), -1),
            };
            out.push(p);
        }
    }
    debug_assert_eq!(out.last(), Some(&b));
    out
}

/// Smallest doubled-x span from which every longer straight horizontal leg
/// can be routed with either parity.
pub fn flex_span(k: u32) -> i64 {
    let k = k as i64;
    let ok = |dx: i64| -> bool {
        let p = horizontal_plans(dx, 0, k);
        p[0].is_some() && p[1].is_some()
    };
    threshold(k, |dx| dx % 2 == 1 || ok(dx))
}

/// Smallest doubled-x span from which every longer straight horizontal leg
/// can be routed at all.
pub fn min_span(k: u32) -> i64 {
    let k = k as i64;
    threshold(k, |dx| dx % 2 == 1 || horizontal_plans(dx, 0, k).iter().any(Option::is_some))
}

/// Smallest row difference from which every longer vertical leg can be routed.
pub fn min_rise(k: u32) -> i64 {
    let k = k as i64;
    threshold(k, |dy| vertical_plans(dy, k).iter().any(Option::is_some))
}

/// First `t` such that `ok` holds on `[t, t + 8k²]`; plans only get easier
/// with length, so a window of that size settles it.
fn threshold(k: i64, ok: impl Fn(i64) -> bool) -> i64 {
    let window = 8 * k * k + 8;
    let mut t = 1;
    loop {
        match (t..t + window).find(|&d| !ok(d)) {
            None => return t,
            Some(bad) => t = bad + 1,
        }
    }
}

/// Routes through the corner points `waypoints` (first and last are the
/// endpoints). With `parity = Some(p)` the node count is forced to `≡ p mod 2`.
pub fn plan_route(waypoints: &[Pt], k: u32, parity: Option<usize>) -> Result<PathRoute> {
    let k = k as i64;
    if waypoints.len() < 2 {
        return Err(Error::Routing("a route needs two endpoints".into()));
    }
    if let Some(p) = waypoints.iter().find(|p| !p.is_lattice()) {
        return Err(Error::Routing(format!("waypoint {p} is not a lattice point")));
    }
    let mut legs = Vec::new();
    for w in waypoints.windows(2) {
        let plans = leg_plans(w[0], w[1], k);
        if plans.iter().all(Option::is_none) {
            return Err(Error::Routing(format!("no spacing fits the leg {} → {}", w[0], w[1])));
        }
        legs.push(plans);
    }
    // Take any plan per leg, then flip the first leg that can flip if the
    // total parity is wrong.
    let mut choice: Vec<usize> = legs.iter().map(|p| if p[0].is_some() { 0 } else { 1 }).collect();
    let nodes = |choice: &[usize]| 1 + choice.iter().enumerate().map(|(i, &c)| legs[i][c].as_ref().unwrap().len()).sum::<usize>();
    if let Some(want) = parity {
        if nodes(&choice) % 2 != want % 2 {
            let flip = (0..legs.len()).find(|&i| legs[i][1 - choice[i]].is_some()).ok_or_else(|| {
                Error::Routing(format!(
                    "no leg between {} and {} can change parity",
                    waypoints[0],
                    waypoints[waypoints.len() - 1]
                ))
            })?;
            choice[flip] = 1 - choice[flip];
        }
    }
    let mut out = vec![waypoints[0]];
    for (i, w) in waypoints.windows(2).enumerate() {
        out.extend(walk(w[0], w[1], k, legs[i][choice[i]].as_ref().unwrap()));
    }
    Ok(PathRoute { nodes: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::geom::dist;

    /// Route invariants: gaps of 1 or k, everything else farther than k.
    fn check(r: &PathRoute, k: i64) {
        let n = &r.nodes;
        for i in 0..n.len() {
            for j in i + 1..n.len() {
                let d = dist(n[i], n[j]);
                if j == i + 1 {
                    assert!(d == 1 || d == k, "gap {d} at {i}: {} {}", n[i], n[j]);
                } else {
                    assert!(d > k, "nodes {i},{j} at distance {d}");
                }
            }
        }
    }

    #[test]
    fn straight_route_spacing_k() {
        let r = plan_route(&[Pt::new(0, 0), Pt::new(16, 0)], 2, None).unwrap();
        assert_eq!(r.len(), 5);
        assert_eq!(r.parity(), 1);
        check(&r, 2);
        let even = plan_route(&[Pt::new(0, 0), Pt::new(16, 0)], 2, Some(0)).unwrap();
        assert_eq!(even.len(), 6);
        check(&even, 2);
        assert_eq!(even.nodes.windows(2).filter(|w| dist(w[0], w[1]) == 1).count(), 2);
    }

    #[test]
    fn both_parities_on_long_legs() {
        for k in 2..=4u32 {
            for dx in (24 * k as i64)..(24 * k as i64 + 9) {
                for dy in -1..=1 {
                    let b = Pt::snap(dx, dy);
                    for p in 0..2 {
                        let r = plan_route(&[Pt::new(0, 0), b], k, Some(p)).unwrap();
                        assert_eq!(r.len() % 2, p);
                        assert_eq!(*r.nodes.last().unwrap(), b);
                        check(&r, k as i64);
                    }
                }
            }
        }
    }

    #[test]
    fn turning_routes_keep_spacing() {
        for k in 2..=4u32 {
            let ki = k as i64;
            let start = Pt::new(0, 0);
            let c1 = Pt::new(-20 * ki, 0);
            let c2 = Pt::snap(-20 * ki, -9 * ki - 1);
            let end = Pt::snap(c2.x + 30 * ki, c2.y);
            for p in 0..2 {
                let r = plan_route(&[start, c1, c2, end], k, Some(p)).unwrap();
                check(&r, ki);
                assert_eq!(r.len() % 2, p);
            }
        }
    }

    #[test]
    fn span_thresholds() {
        for k in 2..=5u32 {
            let (flex, min, rise) = (flex_span(k), min_span(k), min_rise(k));
            assert!(min <= flex);
            for dx in (flex..flex + 40).filter(|d| d % 2 == 0) {
                for p in 0..2 {
                    let r = plan_route(&[Pt::new(0, 0), Pt::new(dx, 0)], k, Some(p)).unwrap();
                    check(&r, k as i64);
                }
            }
            plan_route(&[Pt::new(0, 0), Pt::snap(0, -rise)], k, None).unwrap();
            assert!(plan_route(&[Pt::new(0, 0), Pt::snap(0, -(rise - 1))], k, None).is_err());
        }
    }

    #[test]
    fn impossible_leg_errors() {
        assert!(matches!(plan_route(&[Pt::new(0, 0), Pt::new(2, 0)], 2, None), Err(Error::Routing(_))));
        assert!(plan_route(&[Pt::new(0, 0)], 2, None).is_err());
        assert!(plan_route(&[Pt::new(0, 0), Pt::new(1, 0)], 2, None).is_err());
    }
}

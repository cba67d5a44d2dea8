//! Primitive gadget patches, parametric in the reach `k`.
//!
//! A patch lists only its non-red cells; everything around it is red filler.
//! Coordinates are relative to the gadget's anchor node (`s` for start and
//! switch, `a` for merge and check). Composite gadgets (multi-switch,
//! multi-merge, crossover) are assembled from these by the compiler.

use serde::{Deserialize, Serialize};

use super::geom::Pt;
use crate::error::{Error, Result};
use crate::lattice::{Color, Dir};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GadgetKind {
    Start,
    Path,
    Switch,
    MultiSwitch,
    Merge,
    MultiMerge,
    Check,
    Crossover,
    /// The single poisoned node next to the top corner that the safe outer
    /// boundary needs (see `layout`).
    Corner,
}

impl GadgetKind {
    pub const PRIMITIVE: [GadgetKind; 4] = [
        GadgetKind::Start,
        GadgetKind::Switch,
        GadgetKind::Merge,
        GadgetKind::Check,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GadgetKind::Start => "start",
            GadgetKind::Path => "path",
            GadgetKind::Switch => "switch",
            GadgetKind::MultiSwitch => "multi-switch",
            GadgetKind::Merge => "merge",
            GadgetKind::MultiMerge => "multi-merge",
            GadgetKind::Check => "check",
            GadgetKind::Crossover => "crossover",
            GadgetKind::Corner => "corner",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cell {
    Empty,
    Fixed(Color),
}

/// Orientation of a placed patch: as drawn, or reflected east↔west.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Orientation {
    #[default]
    Normal,
    Mirrored,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetTemplate {
    pub kind: GadgetKind,
    pub k: u32,
    /// Non-red cells. Uncolored cells that are not named below are poison
    /// nodes that cap a blue/green interface.
    pub cells: Vec<(Pt, Cell)>,
    pub roles: Vec<(&'static str, Pt)>,
    /// Role pairs that are meant to be within reach of each other; every other
    /// pair of uncolored cells must be farther apart than `k`.
    pub links: Vec<(&'static str, &'static str)>,
    /// Roles through which paths attach.
    pub ports: Vec<&'static str>,
}

impl GadgetTemplate {
    pub fn role(&self, name: &str) -> Option<Pt> {
        self.roles.iter().find(|r| r.0 == name).map(|r| r.1)
    }
}

/// Template for a primitive gadget kind.
pub fn template(kind: GadgetKind, k: u32) -> Result<GadgetTemplate> {
    if k < 2 {
        return Err(Error::Unsupported(format!("gadgets need k ≥ 2, got {k}")));
    }
    let ki = k as i64;
    let (half, rest) = (ki / 2, ki - ki / 2);
    let origin = Pt::new(0, 0);
    let t = match kind {
        GadgetKind::Start => {
            let s = origin;
            let l = s.step(Dir::NW);
            let p = s.steps(Dir::SW, half).steps(Dir::SE, rest);
            GadgetTemplate {
                kind,
                k,
                cells: vec![(s, Cell::Empty), (p, Cell::Empty)],
                roles: vec![("l", l), ("s", s), ("P", p)],
                links: vec![("s", "P")],
                ports: vec!["P"],
            }
        }
        GadgetKind::Switch => {
            let s = origin;
            let top = s.steps(Dir::NW, half).steps(Dir::NE, rest);
            let l = s.step(Dir::SW).steps(Dir::W, ki - 1);
            let r = s.step(Dir::SE).steps(Dir::E, ki - 1);
            GadgetTemplate {
                kind,
                k,
                cells: [top, s, l, r].into_iter().map(|p| (p, Cell::Empty)).collect(),
                roles: vec![("T", top), ("s", s), ("L", l), ("R", r)],
                links: vec![("T", "s"), ("s", "L"), ("s", "R")],
                ports: vec!["T", "L", "R"],
            }
        }
        GadgetKind::Merge | GadgetKind::Check => {
            let a = origin;
            let b = a.step(Dir::E);
            let mut cells = vec![
                (a, Cell::Empty),
                (b, Cell::Empty),
                (a.step(Dir::NW), Cell::Fixed(Color::Blue)),
                (a.step(Dir::NE), Cell::Fixed(Color::Blue)),
                (a.step(Dir::SW), Cell::Fixed(Color::Green)),
                (b.step(Dir::E), Cell::Fixed(Color::Green)),
            ];
            // Blue/green strip running north-east from b, capped by a poison
            // node that no color can safely fill.
            for t in 0..ki {
                let blue = b.steps(Dir::NE, t + 1);
                cells.push((blue, Cell::Fixed(Color::Blue)));
                cells.push((blue.step(Dir::E), Cell::Fixed(Color::Green)));
            }
            let poison = b.steps(Dir::NE, ki + 1);
            cells.push((poison, Cell::Empty));
            let mut roles = vec![("a", a), ("b", b), ("P", poison)];
            let (links, ports);
            if kind == GadgetKind::Merge {
                let l = a.steps(Dir::W, ki);
                let r = b.steps(Dir::E, ki);
                let m = a.steps(Dir::SE, ki);
                roles.extend([("L", l), ("R", r), ("M", m)]);
                cells.extend([l, r, m].map(|p| (p, Cell::Empty)));
                links = vec![("L", "a"), ("a", "b"), ("a", "M"), ("b", "M"), ("b", "R")];
                ports = vec!["L", "R", "M"];
            } else {
                let top = a.steps(Dir::NW, ki);
                let bottom = a.steps(Dir::SW, ki);
                let c = b.steps(Dir::E, ki);
                roles.extend([("T", top), ("B", bottom), ("C", c)]);
                cells.extend([top, bottom, c].map(|p| (p, Cell::Empty)));
                links = vec![("T", "a"), ("a", "b"), ("a", "B"), ("b", "C")];
                ports = vec!["T", "B", "C"];
            }
            GadgetTemplate {
                kind,
                k,
                cells,
                roles,
                links,
                ports,
            }
        }
        other => {
            return Err(Error::Unsupported(format!(
                "{} is assembled from primitive gadgets",
                other.name()
            )))
        }
    };
    Ok(t)
}

/// A template resolved to absolute coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacedPatch {
    pub kind: GadgetKind,
    pub origin: Pt,
    pub orientation: Orientation,
    pub cells: Vec<(Pt, Cell)>,
    pub roles: Vec<(&'static str, Pt)>,
    pub links: Vec<(&'static str, &'static str)>,
}

impl PlacedPatch {
    pub fn role(&self, name: &str) -> Option<Pt> {
        self.roles.iter().find(|r| r.0 == name).map(|r| r.1)
    }
}

pub fn instantiate(t: &GadgetTemplate, origin: Pt, orientation: Orientation) -> PlacedPatch {
    let place = |p: Pt| {
        let p = if orientation == Orientation::Mirrored { p.mirrored() } else { p };
        p + origin
    };
    PlacedPatch {
        kind: t.kind,
        origin,
        orientation,
        cells: t.cells.iter().map(|&(p, c)| (place(p), c)).collect(),
        roles: t.roles.iter().map(|&(n, p)| (n, place(p))).collect(),
        links: t.links.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::geom::{dist, offset};

    fn role(t: &GadgetTemplate, r: &str) -> Pt {
        t.role(r).unwrap()
    }

    #[test]
    fn switch_distances() {
        for k in 2..=5 {
            let t = template(GadgetKind::Switch, k).unwrap();
            let k = k as i64;
            assert_eq!(dist(role(&t, "L"), role(&t, "R")), 2 * k - 1);
            assert_eq!(dist(role(&t, "s"), role(&t, "L")), k);
            assert_eq!(dist(role(&t, "s"), role(&t, "R")), k);
            assert_eq!(dist(role(&t, "s"), role(&t, "T")), k);
        }
        // at k = 2 the branches sit three apart
        let t = template(GadgetKind::Switch, 2).unwrap();
        assert_eq!(dist(role(&t, "L"), role(&t, "R")), 3);
    }

    #[test]
    fn merge_and_check_distances() {
        for k in 2..=5 {
            let m = template(GadgetKind::Merge, k).unwrap();
            let c = template(GadgetKind::Check, k).unwrap();
            let k = k as i64;
            assert!(dist(role(&m, "M"), role(&m, "L")) > k);
            assert!(dist(role(&m, "M"), role(&m, "R")) > k);
            assert_eq!(dist(role(&c, "b"), role(&c, "T")), k + 1);
            assert_eq!(dist(role(&c, "b"), role(&c, "B")), k + 1);
            assert_eq!(dist(role(&c, "a"), role(&c, "C")), k + 1);
        }
        let m = template(GadgetKind::Merge, 2).unwrap();
        assert_eq!(dist(role(&m, "M"), role(&m, "R")), 3);
    }

    #[test]
    fn check_neighbourhood_colors() {
        let c = template(GadgetKind::Check, 2).unwrap();
        let color = |p: Pt| {
            c.cells
                .iter()
                .find(|e| e.0 == p)
                .map(|e| e.1)
                .unwrap_or(Cell::Fixed(Color::Red))
        };
        let a = role(&c, "a");
        let b = role(&c, "b");
        use Color::*;
        let want_a = [(Dir::W, Red), (Dir::NW, Blue), (Dir::NE, Blue), (Dir::SW, Green), (Dir::SE, Red)];
        for (d, col) in want_a {
            assert_eq!(color(a + offset(d)), Cell::Fixed(col), "a {d:?}");
        }
        let want_b = [(Dir::NW, Blue), (Dir::NE, Blue), (Dir::E, Green), (Dir::SE, Red), (Dir::SW, Red)];
        for (d, col) in want_b {
            assert_eq!(color(b + offset(d)), Cell::Fixed(col), "b {d:?}");
        }
    }

    #[test]
    fn mirrored_instance_reflects() {
        let t = template(GadgetKind::Check, 3).unwrap();
        let p = instantiate(&t, Pt::new(10, 4), Orientation::Mirrored);
        assert_eq!(p.role("b").unwrap(), Pt::new(8, 4));
        assert_eq!(p.role("C").unwrap(), Pt::new(10 - 2 - 6, 4));
        assert!(p.cells.iter().all(|c| c.0.is_lattice()));
    }

    #[test]
    fn composite_kinds_have_no_template() {
        assert!(template(GadgetKind::Crossover, 2).is_err());
        assert!(template(GadgetKind::Switch, 1).is_err());
    }
}

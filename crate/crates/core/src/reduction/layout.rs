//! Free-space layout of gadgets and routes, and its translation onto a board.

use std::collections::{BTreeMap, HashMap};

use super::geom::{ball_offsets, Pt};
use super::route::plan_route;
use super::templates::{instantiate, template, Cell, GadgetKind, Orientation};
use super::{DecisionKind, GadgetRecord, ReductionOutput, RouteRecord, RouteTag};
use crate::error::{Error, Result};
use crate::lattice::{Board, Color, Coord};
use crate::rules::{GameState, Player, RulesConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Owner {
    Gadget(usize),
    Route(usize),
}

#[derive(Debug, Clone)]
struct GadgetDraft {
    kind: GadgetKind,
    binding: String,
    orientation: Orientation,
    origin: Pt,
    roles: Vec<(String, Pt)>,
    cells: Vec<Pt>,
    parent: Option<usize>,
}

#[derive(Debug, Clone)]
struct RouteDraft {
    nodes: Vec<Pt>,
    from: (usize, String),
    to: (usize, String),
    tag: RouteTag,
}

/// Port of a placed gadget: `(gadget index, role)`.
pub type Port = (usize, &'static str);

pub struct Layout {
    pub k: u32,
    cells: HashMap<Pt, (Cell, Owner)>,
    gadgets: Vec<GadgetDraft>,
    routes: Vec<RouteDraft>,
    decisions: Vec<(Pt, Player, DecisionKind, usize)>,
    last: Option<Pt>,
    reach: Vec<Pt>,
    /// Route whose parity constraint is inverted; fault injection for tests.
    skew: Option<usize>,
}

impl Layout {
    pub fn new(k: u32) -> Result<Layout> {
        if k < 2 {
            return Err(Error::Unsupported(format!("the construction needs k ≥ 2, got {k}")));
        }
        Ok(Layout {
            k,
            cells: HashMap::new(),
            gadgets: Vec::new(),
            routes: Vec::new(),
            decisions: Vec::new(),
            last: None,
            reach: ball_offsets(k as i64),
            skew: None,
        })
    }

    /// A gadget made of other gadgets; it owns no cells itself.
    pub fn composite(&mut self, kind: GadgetKind, binding: impl Into<String>, origin: Pt, parent: Option<usize>) -> usize {
        self.gadgets.push(GadgetDraft {
            kind,
            binding: binding.into(),
            orientation: Orientation::Normal,
            origin: Pt::snap(origin.x, origin.y),
            roles: Vec::new(),
            cells: Vec::new(),
            parent,
        });
        self.gadgets.len() - 1
    }

    /// Names a role of a composite after one of its members' nodes.
    pub fn alias(&mut self, composite: usize, role: &str, port: Port) {
        let p = self.port(port);
        self.gadgets[composite].roles.push((role.to_string(), p));
    }

    pub fn place(
        &mut self,
        kind: GadgetKind,
        origin: Pt,
        orientation: Orientation,
        binding: impl Into<String>,
        parent: Option<usize>,
    ) -> Result<usize> {
        let t = template(kind, self.k)?;
        let patch = instantiate(&t, origin, orientation);
        let id = self.gadgets.len();
        for &(p, _) in &patch.cells {
            if !p.is_lattice() {
                return Err(Error::Routing(format!("gadget origin {origin} is off the lattice")));
            }
            let near_other = std::iter::once(Pt::new(0, 0))
                .chain(self.reach.iter().copied())
                .any(|d| matches!(self.cells.get(&(p + d)), Some((_, o)) if *o != Owner::Gadget(id)));
            if near_other {
                return Err(Error::PlacementConflict(format!("{} node {p} is within reach of another gadget or route", kind.name())));
            }
        }
        for &(p, c) in &patch.cells {
            self.cells.insert(p, (c, Owner::Gadget(id)));
        }
        if kind == GadgetKind::Start {
            self.last = patch.role("l");
        }
        self.gadgets.push(GadgetDraft {
            kind,
            binding: binding.into(),
            orientation,
            origin,
            roles: patch.roles.iter().map(|&(n, p)| (n.to_string(), p)).collect(),
            cells: patch.cells.iter().map(|c| c.0).collect(),
            parent,
        });
        Ok(id)
    }

    /// A single empty node where a path simply stops (role `E`). Test
    /// benches use it as the far end of an exit path.
    pub fn terminal(&mut self, at: Pt, binding: impl Into<String>) -> Result<usize> {
        let id = self.gadgets.len();
        let near_other = std::iter::once(Pt::new(0, 0))
            .chain(self.reach.iter().copied())
            .any(|d| self.cells.contains_key(&(at + d)));
        if !at.is_lattice() || near_other {
            return Err(Error::PlacementConflict(format!("terminal {at} is off the lattice or crowded")));
        }
        self.cells.insert(at, (Cell::Empty, Owner::Gadget(id)));
        self.gadgets.push(GadgetDraft {
            kind: GadgetKind::Path,
            binding: binding.into(),
            orientation: Orientation::Normal,
            origin: at,
            roles: vec![("E".into(), at)],
            cells: vec![at],
            parent: None,
        });
        Ok(id)
    }

    pub fn port(&self, (g, role): Port) -> Pt {
        self.gadgets[g]
            .roles
            .iter()
            .find(|r| r.0 == role)
            .unwrap_or_else(|| panic!("gadget {g} has no role {role}"))
            .1
    }

    /// Routes between two ports through `corners`. `parity` constrains the
    /// node count, endpoints included. Returns the node count.
    pub fn route(&mut self, from: Port, to: Port, corners: &[Pt], parity: Option<usize>, tag: RouteTag) -> Result<usize> {
        let mut way = vec![self.port(from)];
        way.extend_from_slice(corners);
        way.push(self.port(to));
        let id = self.routes.len();
        let parity = if self.skew == Some(id) { parity.map(|p| 1 - p % 2) } else { parity };
        let r = plan_route(&way, self.k, parity)?;
        for &p in &r.nodes[1..r.nodes.len() - 1] {
            if self.cells.contains_key(&p) {
                return Err(Error::Routing(format!("route {id} runs into occupied node {p}")));
            }
        }
        for &p in &r.nodes[1..r.nodes.len() - 1] {
            self.cells.insert(p, (Cell::Empty, Owner::Route(id)));
        }
        let n = r.nodes.len();
        self.routes.push(RouteDraft {
            nodes: r.nodes,
            from: (from.0, from.1.to_string()),
            to: (to.0, to.1.to_string()),
            tag,
        });
        Ok(n)
    }

    #[cfg(test)]
    pub(crate) fn skew(&mut self, route: usize) {
        self.skew = Some(route);
    }

    /// Node count `route` would produce, without committing anything.
    pub fn plan_len(&self, from: Port, to: Port, corners: &[Pt], parity: Option<usize>) -> Result<usize> {
        let mut way = vec![self.port(from)];
        way.extend_from_slice(corners);
        way.push(self.port(to));
        Ok(plan_route(&way, self.k, parity)?.len())
    }

    /// Turns a template node that will never be entered into red filler.
    pub fn seal(&mut self, port: Port) {
        let p = self.port(port);
        self.cells.remove(&p);
        let g = &mut self.gadgets[port.0];
        g.roles.retain(|r| r.0 != port.1);
        g.cells.retain(|&c| c != p);
    }

    pub fn decide(&mut self, node: Port, player: Player, kind: DecisionKind) {
        let p = self.port(node);
        self.decisions.push((p, player, kind, node.0));
    }

    /// Bounding box of everything placed so far.
    pub fn bounds(&self) -> Option<(Pt, Pt)> {
        let pts = self
            .cells
            .keys()
            .copied()
            .chain(self.gadgets.iter().flat_map(|g| g.roles.iter().map(|r| r.1)));
        pts.fold(None, |acc, p| match acc {
            None => Some((p, p)),
            Some((lo, hi)) => Some((
                Pt::new(lo.x.min(p.x), lo.y.min(p.y)),
                Pt::new(hi.x.max(p.x), hi.y.max(p.y)),
            )),
        })
    }

    /// Places the layout on the smallest board that leaves a red margin of
    /// `2k + 4` all round, with a boundary that is safe next to red filler.
    pub fn finish(mut self) -> Result<ReductionOutput> {
        let last = self.last.ok_or_else(|| Error::InvalidState("layout has no start gadget".into()))?;
        let margin = 2 * self.k as i64 + 4;
        let pts: Vec<Pt> = self
            .cells
            .keys()
            .copied()
            .chain(self.gadgets.iter().flat_map(|g| g.roles.iter().map(|r| r.1)))
            .chain(self.gadgets.iter().map(|g| g.origin))
            .collect();
        // Interior node (row r, offset i) needs i ≥ margin, r ≥ margin and
        // r + i ≤ s + 1 − margin; in doubled coordinates i = (x − y)/2.
        let dy = margin - pts.iter().map(|p| p.y).min().expect("start placed");
        let mut dx = 2 * margin + dy + pts.iter().map(|p| p.y - p.x).max().unwrap();
        if (dx - dy).rem_euclid(2) != 0 {
            dx += 1;
        }
        let shift = Pt::new(dx, dy);
        let reach = pts.iter().map(|p| (p.x + dx + p.y + dy) / 2).max().unwrap();
        let size = (reach + margin - 1) as u32;
        let to_coord = |p: Pt| (p + shift).to_coord().expect("shifted into the board");

        let mut board = safe_board(size)?;
        let corner_poison = Coord::new(size, 1);
        for (&p, &(cell, _)) in &self.cells {
            let c = to_coord(p);
            debug_assert!(board.is_interior(c));
            board.set(c, match cell {
                Cell::Empty => Color::Uncolored,
                Cell::Fixed(col) => col,
            })?;
        }
        self.gadgets.push(GadgetDraft {
            kind: GadgetKind::Corner,
            binding: "boundary".into(),
            orientation: Orientation::Normal,
            origin: Pt::from_coord(corner_poison) - shift,
            roles: vec![("P".into(), Pt::from_coord(corner_poison) - shift)],
            cells: vec![Pt::from_coord(corner_poison) - shift],
            parent: None,
        });

        let config = RulesConfig::new(self.k)?;
        let state = GameState::resume(board, Some(to_coord(last)), Player::Hero, config)?;
        let gadgets = self
            .gadgets
            .iter()
            .map(|g| GadgetRecord {
                kind: g.kind,
                binding: g.binding.clone(),
                origin: to_coord(g.origin),
                orientation: g.orientation,
                roles: g.roles.iter().map(|(n, p)| (n.clone(), to_coord(*p))).collect::<BTreeMap<_, _>>(),
                cells: g.cells.iter().map(|&p| to_coord(p)).collect(),
                parent: g.parent,
            })
            .collect();
        let routes = self
            .routes
            .iter()
            .map(|r| RouteRecord {
                nodes: r.nodes.iter().map(|&p| to_coord(p)).collect(),
                from: r.from.clone(),
                to: r.to.clone(),
                tag: r.tag,
            })
            .collect();
        let decisions = self
            .decisions
            .iter()
            .map(|&(p, player, kind, gadget)| super::Decision {
                node: to_coord(p),
                player,
                kind,
                gadget,
            })
            .collect();
        Ok(ReductionOutput {
            state,
            k: self.k,
            gadgets,
            routes,
            decisions,
        })
    }
}

/// Red interior and a boundary whose only non-red contact is at the top
/// corner: left edge green, bottom red, right edge red except its top node
/// blue. Sperner parity forces one defect; it sits at the interior node next
/// to the top corner, which stays uncolored and loses for every color.
pub fn safe_board(size: u32) -> Result<Board> {
    let mut b = Board::blank(size)?;
    let s = size;
    for c in b.coords().collect::<Vec<_>>() {
        b.set(c, Color::Red)?;
    }
    for r in 1..=s + 1 {
        b.set(Coord::new(r, 0), Color::Green)?;
        b.set(Coord::new(r, s + 2 - r), if r == s + 1 { Color::Blue } else { Color::Red })?;
    }
    b.set(Coord::new(s + 2, 0), Color::Blue)?;
    b.set(Coord::new(0, 0), Color::Green)?;
    b.set(Coord::new(s, 1), Color::Uncolored)?;
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::safe_colors_at;

    #[test]
    fn safe_board_is_legal_with_one_dead_node() {
        for s in [1, 2, 5, 12] {
            let b = safe_board(s).unwrap();
            b.validate_boundary().unwrap();
            assert!(!b.has_rainbow());
            let free: Vec<Coord> = b.uncolored().collect();
            assert_eq!(free, vec![Coord::new(s, 1)]);
            assert!(safe_colors_at(&b, free[0]).is_empty());
        }
    }

    #[test]
    fn close_gadgets_conflict() {
        let mut l = Layout::new(2).unwrap();
        l.place(GadgetKind::Switch, Pt::new(0, 0), Orientation::Normal, "", None).unwrap();
        let err = l.place(GadgetKind::Switch, Pt::new(2, 0), Orientation::Normal, "", None);
        assert!(matches!(err, Err(Error::PlacementConflict(_))));
        l.place(GadgetKind::Switch, Pt::new(40, 0), Orientation::Normal, "", None).unwrap();
    }
}

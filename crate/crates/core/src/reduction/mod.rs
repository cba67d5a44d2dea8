//! Compilation of quantified Boolean formulas into Atropos-k states.
//!
//! [`compile`] lays out gadgets on an unbounded lattice ([`layout`]), routes
//! path gadgets between their ports ([`route`]), and places the result on the
//! smallest board that fits. [`validate_output`] re-derives every structural
//! property of the result from the board and the gadget map alone.

pub mod compile;
pub mod geom;
pub mod layout;
pub mod route;
pub mod templates;
pub mod validate;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Board, Coord};
use crate::rules::{GameState, Player, RulesConfig};

pub use compile::compile;
pub use templates::{instantiate, template, Cell, GadgetKind, GadgetTemplate, Orientation, PlacedPatch};
pub use validate::{validate_output, ValidationReport, Violation, ViolationKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RouteTag {
    Plain,
    /// Between consecutive switches of a multi-switch; odd node count.
    SwitchConnector,
    /// From a crossover's entry switch to one of its exit switches; even.
    CrossoverConnector,
    /// From a crossover exit switch back into one of its checks; odd.
    CrossoverReturn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DecisionKind {
    Quantifier,
    Psi,
    Clause,
    CheckB,
}

/// A node after which a player picks a branch (switch centers), or the check
/// node `b` whose mover is fixed by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub node: Coord,
    pub player: Player,
    pub kind: DecisionKind,
    pub gadget: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetRecord {
    pub kind: GadgetKind,
    /// What the instance stands for: `∃x1`, `x1`, `¬x1`, `ψ`, `c1`, ...
    pub binding: String,
    pub origin: Coord,
    pub orientation: Orientation,
    pub roles: BTreeMap<String, Coord>,
    /// Non-red cells of the patch (empty for composites).
    pub cells: Vec<Coord>,
    /// Enclosing composite gadget, if any.
    pub parent: Option<usize>,
}

impl GadgetRecord {
    pub fn role(&self, name: &str) -> Option<Coord> {
        self.roles.get(name).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteRecord {
    /// Endpoints included; the endpoints are gadget ports.
    pub nodes: Vec<Coord>,
    pub from: (usize, String),
    pub to: (usize, String),
    pub tag: RouteTag,
}

/// A compiled state plus the map from gadget instances to formula parts.
#[derive(Debug, Clone)]
pub struct ReductionOutput {
    pub state: GameState,
    pub k: u32,
    pub gadgets: Vec<GadgetRecord>,
    pub routes: Vec<RouteRecord>,
    pub decisions: Vec<Decision>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SidecarGadget {
    pub kind: GadgetKind,
    pub origin: Coord,
    pub role_coords: BTreeMap<String, Coord>,
    pub binding: String,
    #[serde(default)]
    pub orientation: Orientation,
    #[serde(default)]
    pub cells: Vec<Coord>,
    #[serde(default)]
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SidecarDecision {
    pub node: Coord,
    pub player: Player,
    #[serde(default = "default_kind")]
    pub kind: DecisionKind,
    #[serde(default)]
    pub gadget: usize,
}

fn default_kind() -> DecisionKind {
    DecisionKind::Quantifier
}

/// JSON companion of a compiled board; read by the verifier and the UI.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sidecar {
    pub gadgets: Vec<SidecarGadget>,
    pub decisions: Vec<SidecarDecision>,
    pub k: u32,
    #[serde(default)]
    pub routes: Vec<RouteRecord>,
}

impl ReductionOutput {
    pub fn board_text(&self) -> String {
        self.state.board.to_text()
    }

    pub fn sidecar(&self) -> Sidecar {
        Sidecar {
            gadgets: self
                .gadgets
                .iter()
                .map(|g| SidecarGadget {
                    kind: g.kind,
                    origin: g.origin,
                    role_coords: g.roles.clone(),
                    binding: g.binding.clone(),
                    orientation: g.orientation,
                    cells: g.cells.clone(),
                    parent: g.parent,
                })
                .collect(),
            decisions: self
                .decisions
                .iter()
                .map(|d| SidecarDecision {
                    node: d.node,
                    player: d.player,
                    kind: d.kind,
                    gadget: d.gadget,
                })
                .collect(),
            k: self.k,
            routes: self.routes.clone(),
        }
    }

    pub fn sidecar_json(&self) -> String {
        serde_json::to_string_pretty(&self.sidecar()).expect("sidecar serializes")
    }

    /// Rebuilds an output from a board and its sidecar.
    pub fn from_parts(board: Board, sidecar: Sidecar) -> Result<ReductionOutput> {
        let start = sidecar
            .gadgets
            .iter()
            .find(|g| g.kind == GadgetKind::Start)
            .ok_or_else(|| Error::InvalidArgument("sidecar has no start gadget".into()))?;
        let last = start
            .role_coords
            .get("l")
            .copied()
            .ok_or_else(|| Error::InvalidArgument("start gadget has no node l".into()))?;
        let state = GameState::resume(board, Some(last), Player::Hero, RulesConfig::new(sidecar.k)?)?;
        Ok(ReductionOutput {
            state,
            k: sidecar.k,
            gadgets: sidecar
                .gadgets
                .into_iter()
                .map(|g| GadgetRecord {
                    kind: g.kind,
                    binding: g.binding,
                    origin: g.origin,
                    orientation: g.orientation,
                    roles: g.role_coords,
                    cells: g.cells,
                    parent: g.parent,
                })
                .collect(),
            routes: sidecar.routes,
            decisions: sidecar
                .decisions
                .into_iter()
                .map(|d| Decision {
                    node: d.node,
                    player: d.player,
                    kind: d.kind,
                    gadget: d.gadget,
                })
                .collect(),
        })
    }

    pub fn count(&self, kind: GadgetKind) -> usize {
        self.gadgets.iter().filter(|g| g.kind == kind).count()
    }

    /// Gadgets of `kind` that are not part of a composite.
    pub fn top_level(&self, kind: GadgetKind) -> impl Iterator<Item = (usize, &GadgetRecord)> {
        self.gadgets
            .iter()
            .enumerate()
            .filter(move |(_, g)| g.kind == kind && g.parent.is_none())
    }

    pub fn children(&self, parent: usize) -> impl Iterator<Item = (usize, &GadgetRecord)> {
        self.gadgets
            .iter()
            .enumerate()
            .filter(move |(_, g)| g.parent == Some(parent))
    }

    pub fn find(&self, kind: GadgetKind, binding: &str) -> Option<(usize, &GadgetRecord)> {
        self.gadgets
            .iter()
            .enumerate()
            .find(|(_, g)| g.kind == kind && g.binding == binding && g.parent.is_none())
    }
}

//! Unbounded lattice points in doubled coordinates, used while laying out a
//! reduction before it is translated onto a finite board.
//!
//! A board node at `(row, offset)` sits at `x = 2·offset + row`, `y = row`, so
//! `x ≡ y (mod 2)` for every lattice point and east is `+2` in `x`.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::lattice::{Coord, Dir};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pt {
    pub x: i64,
    pub y: i64,
}

impl Pt {
    pub const fn new(x: i64, y: i64) -> Pt {
        Pt { x, y }
    }

    /// The lattice point on row `y` at `x` or, if `x` has the wrong parity,
    /// one step east of it.
    pub fn snap(x: i64, y: i64) -> Pt {
        Pt::new(x + (x - y).rem_euclid(2), y)
    }

    pub fn is_lattice(self) -> bool {
        (self.x - self.y).rem_euclid(2) == 0
    }

    pub fn step(self, dir: Dir) -> Pt {
        self + offset(dir)
    }

    pub fn steps(self, dir: Dir, n: i64) -> Pt {
        let d = offset(dir);
        self + Pt::new(d.x * n, d.y * n)
    }

    pub fn mirrored(self) -> Pt {
        Pt::new(-self.x, self.y)
    }

    pub fn from_coord(c: Coord) -> Pt {
        Pt::new(2 * c.offset as i64 + c.row as i64, c.row as i64)
    }

    pub fn to_coord(self) -> Option<Coord> {
        Coord::from_doubled(self.x, self.y)
    }
}

impl Add for Pt {
    type Output = Pt;
    fn add(self, o: Pt) -> Pt {
        Pt::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Pt {
    type Output = Pt;
    fn sub(self, o: Pt) -> Pt {
        Pt::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Pt {
    type Output = Pt;
    fn neg(self) -> Pt {
        Pt::new(-self.x, -self.y)
    }
}

impl fmt::Display for Pt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{}>", self.x, self.y)
    }
}

/// Unit step for `dir` in doubled coordinates.
pub fn offset(dir: Dir) -> Pt {
    let (dr, di) = dir.delta();
    Pt::new(2 * di + dr, dr)
}

pub fn dist(a: Pt, b: Pt) -> i64 {
    let dx = (a.x - b.x).abs();
    let dy = (a.y - b.y).abs();
    dy + ((dx - dy).max(0)) / 2
}

/// All lattice offsets with `0 < dist ≤ r`.
pub fn ball_offsets(r: i64) -> Vec<Pt> {
    let mut out = Vec::new();
    for dy in -r..=r {
        for dx in -(2 * r)..=(2 * r) {
            let p = Pt::new(dx, dy);
            if p.is_lattice() && p != Pt::new(0, 0) && dist(p, Pt::new(0, 0)) <= r {
                out.push(p);
            }
        }
    }
    out
}

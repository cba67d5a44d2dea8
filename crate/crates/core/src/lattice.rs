//! Triangular-lattice board geometry.
//!
//! Nodes are addressed in a skewed axial frame: `row` counts up from the
//! bottom edge and `offset` counts from the left edge of that row. A board of
//! size `s` has `s + 3` rows (row `r` holds `s + 3 - r` nodes); the three
//! triangle vertices `(0, 0)`, `(0, s + 2)` and `(s + 2, 0)` are the corners,
//! every other node on the outer rim is an edge node, and the `s(s + 1)/2`
//! remaining nodes are interior.
//!
//! Neighbors of `(r, i)` are `(r, i ± 1)`, `(r + 1, i - 1)`, `(r + 1, i)`,
//! `(r - 1, i)` and `(r - 1, i + 1)`. In the plane, `(r, i)` sits at
//! `x = i + r / 2`, `y = r · √3 / 2`, which is what [`Coord::x2`] exposes
//! (doubled, so it stays integral).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Coord {
    pub row: u32,
    pub offset: u32,
}

impl Coord {
    pub const fn new(row: u32, offset: u32) -> Self {
        Coord { row, offset }
    }

    /// Doubled horizontal position `2·offset + row`.
    pub fn x2(self) -> i64 {
        2 * self.offset as i64 + self.row as i64
    }

    /// Inverse of `(x2, row)`; `None` when the parity does not match a node.
    pub fn from_doubled(x2: i64, row: i64) -> Option<Coord> {
        if row < 0 || (x2 - row).rem_euclid(2) != 0 {
            return None;
        }
        let offset = (x2 - row) / 2;
        if offset < 0 {
            return None;
        }
        Some(Coord::new(row as u32, offset as u32))
    }

    pub fn step(self, dir: Dir) -> Option<Coord> {
        self.shift(dir.delta().0, dir.delta().1)
    }

    pub fn shift(self, dr: i64, di: i64) -> Option<Coord> {
        let row = self.row as i64 + dr;
        let offset = self.offset as i64 + di;
        if row < 0 || offset < 0 {
            return None;
        }
        Some(Coord::new(row as u32, offset as u32))
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.offset)
    }
}

/// The six lattice directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dir {
    E,
    NE,
    NW,
    W,
    SW,
    SE,
}

impl Dir {
    pub const ALL: [Dir; 6] = [Dir::E, Dir::NE, Dir::NW, Dir::W, Dir::SW, Dir::SE];

    /// `(d_row, d_offset)`.
    pub const fn delta(self) -> (i64, i64) {
        match self {
            Dir::E => (0, 1),
            Dir::NE => (1, 0),
            Dir::NW => (1, -1),
            Dir::W => (0, -1),
            Dir::SW => (-1, 0),
            Dir::SE => (-1, 1),
        }
    }

    pub const fn opposite(self) -> Dir {
        match self {
            Dir::E => Dir::W,
            Dir::NE => Dir::SW,
            Dir::NW => Dir::SE,
            Dir::W => Dir::E,
            Dir::SW => Dir::NE,
            Dir::SE => Dir::NW,
        }
    }

    /// Mirror image across a vertical axis.
    pub const fn mirrored(self) -> Dir {
        match self {
            Dir::E => Dir::W,
            Dir::W => Dir::E,
            Dir::NE => Dir::NW,
            Dir::NW => Dir::NE,
            Dir::SE => Dir::SW,
            Dir::SW => Dir::SE,
        }
    }
}

/// Lattice distance between two axial coordinates, ignoring board bounds.
pub fn lattice_distance(u: Coord, v: Coord) -> u32 {
    let dr = v.row as i64 - u.row as i64;
    let di = v.offset as i64 - u.offset as i64;
    ((dr.abs() + di.abs() + (dr + di).abs()) / 2) as u32
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Corner {
    Top,
    BottomLeft,
    BottomRight,
}

impl Corner {
    pub const ALL: [Corner; 3] = [Corner::Top, Corner::BottomLeft, Corner::BottomRight];

    pub fn token(self) -> &'static str {
        match self {
            Corner::Top => "T",
            Corner::BottomLeft => "BL",
            Corner::BottomRight => "BR",
        }
    }

    pub fn from_token(tok: &str) -> Option<Corner> {
        match tok {
            "T" => Some(Corner::Top),
            "BL" => Some(Corner::BottomLeft),
            "BR" => Some(Corner::BottomRight),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[repr(u8)]
pub enum Color {
    #[default]
    Uncolored = 0,
    Red = 1,
    Green = 2,
    Blue = 3,
}

impl Color {
    /// The three colors a player may use, in move-ordering order.
    pub const PLAYER: [Color; 3] = [Color::Red, Color::Green, Color::Blue];

    pub fn is_player(self) -> bool {
        self != Color::Uncolored
    }

    pub fn to_char(self) -> char {
        match self {
            Color::Uncolored => '.',
            Color::Red => 'R',
            Color::Green => 'G',
            Color::Blue => 'B',
        }
    }

    pub fn from_char(c: char) -> Option<Color> {
        match c {
            '.' => Some(Color::Uncolored),
            'R' => Some(Color::Red),
            'G' => Some(Color::Green),
            'B' => Some(Color::Blue),
            _ => None,
        }
    }

    pub(crate) fn from_bits(b: u8) -> Color {
        match b & 3 {
            0 => Color::Uncolored,
            1 => Color::Red,
            2 => Color::Green,
            _ => Color::Blue,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// True when the three colors are exactly red, green and blue.
pub fn is_rainbow(a: Color, b: Color, c: Color) -> bool {
    a.is_player() && b.is_player() && c.is_player() && a != b && b != c && a != c
}

/// Which outer edge a boundary node lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    Bottom,
    Left,
    Right,
}

impl Edge {
    /// The two corners delimiting this edge.
    pub fn corners(self) -> [Corner; 2] {
        match self {
            Edge::Bottom => [Corner::BottomLeft, Corner::BottomRight],
            Edge::Left => [Corner::BottomLeft, Corner::Top],
            Edge::Right => [Corner::BottomRight, Corner::Top],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Board {
    size: u32,
    cells: Vec<Color>,
}

/// Shorthand for [`Board::new`].
pub fn make_board(size: u32) -> Result<Board> {
    Board::new(size)
}

impl Board {
    /// A board of the given size with the canonical alternating boundary and
    /// an uncolored interior.
    pub fn new(size: u32) -> Result<Board> {
        let mut board = Board::blank(size)?;
        let s = size;
        board.set_corner(Corner::Top, Color::Blue);
        board.set_corner(Corner::BottomLeft, Color::Green);
        board.set_corner(Corner::BottomRight, Color::Red);
        // Edge nodes alternate; the bottom edge is anchored at the bottom-right
        // corner so no corner triangle starts out rainbow for even sizes.
        for x in 0..=s {
            let odd = x % 2 == 1;
            let bottom = if (x + s).is_multiple_of(2) { Color::Red } else { Color::Green };
            let left = if odd { Color::Blue } else { Color::Green };
            let right = if odd { Color::Red } else { Color::Blue };
            board.put(Coord::new(0, x + 1), bottom);
            board.put(Coord::new(x + 1, 0), left);
            board.put(Coord::new(x + 1, s + 1 - x), right);
        }
        Ok(board)
    }

    /// Every node uncolored, boundary included. Not a legal board on its own.
    pub fn blank(size: u32) -> Result<Board> {
        if size < 1 {
            return Err(Error::InvalidArgument(format!("board size must be >= 1, got {size}")));
        }
        let side = size as usize + 3;
        Ok(Board {
            size,
            cells: vec![Color::Uncolored; side * (side + 1) / 2],
        })
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    /// Number of nodes along one outer edge, corners included.
    pub fn side(&self) -> u32 {
        self.size + 3
    }

    pub fn node_count(&self) -> usize {
        self.cells.len()
    }

    pub fn row_len(&self, row: u32) -> u32 {
        self.side() - row
    }

    fn row_start(&self, row: u32) -> usize {
        let r = row as usize;
        let side = self.side() as usize;
        r * side - r * r.saturating_sub(1) / 2
    }

    pub fn contains(&self, c: Coord) -> bool {
        c.row < self.side() && c.offset < self.row_len(c.row)
    }

    pub fn index(&self, c: Coord) -> Option<usize> {
        self.contains(c)
            .then(|| self.row_start(c.row) + c.offset as usize)
    }

    fn require(&self, c: Coord) -> Result<usize> {
        self.index(c).ok_or(Error::NotFound(c))
    }

    pub fn coord(&self, index: usize) -> Coord {
        debug_assert!(index < self.cells.len());
        // rows are short enough that a linear walk is fine for occasional use
        let mut row = 0;
        while self.row_start(row + 1) <= index {
            row += 1;
        }
        Coord::new(row, (index - self.row_start(row)) as u32)
    }

    /// All nodes in row-major order (row 0 first, left to right).
    pub fn coords(&self) -> impl Iterator<Item = Coord> + '_ {
        (0..self.side()).flat_map(move |r| (0..self.row_len(r)).map(move |i| Coord::new(r, i)))
    }

    pub fn get(&self, c: Coord) -> Option<Color> {
        self.index(c).map(|i| self.cells[i])
    }

    /// Color at `c`; panics if `c` is off the board.
    pub fn color(&self, c: Coord) -> Color {
        self.cells[self.index(c).unwrap_or_else(|| panic!("{c} is off the board"))]
    }

    pub fn color_at(&self, index: usize) -> Color {
        self.cells[index]
    }

    pub fn set(&mut self, c: Coord, color: Color) -> Result<()> {
        let i = self.require(c)?;
        self.cells[i] = color;
        Ok(())
    }

    pub(crate) fn put(&mut self, c: Coord, color: Color) {
        let i = self.index(c).expect("coordinate on board");
        self.cells[i] = color;
    }

    pub fn corner(&self, corner: Corner) -> Coord {
        let top = self.side() - 1;
        match corner {
            Corner::Top => Coord::new(top, 0),
            Corner::BottomLeft => Coord::new(0, 0),
            Corner::BottomRight => Coord::new(0, top),
        }
    }

    pub fn corner_at(&self, c: Coord) -> Option<Corner> {
        Corner::ALL.into_iter().find(|&k| self.corner(k) == c)
    }

    fn set_corner(&mut self, corner: Corner, color: Color) {
        let c = self.corner(corner);
        self.put(c, color);
    }

    pub fn corner_color(&self, corner: Corner) -> Color {
        self.color(self.corner(corner))
    }

    /// The edge a non-corner boundary node lies on.
    pub fn edge_of(&self, c: Coord) -> Option<Edge> {
        if !self.contains(c) || self.corner_at(c).is_some() {
            return None;
        }
        if c.row == 0 {
            Some(Edge::Bottom)
        } else if c.offset == 0 {
            Some(Edge::Left)
        } else if c.offset == self.row_len(c.row) - 1 {
            Some(Edge::Right)
        } else {
            None
        }
    }

    pub fn is_boundary(&self, c: Coord) -> bool {
        self.contains(c) && (self.corner_at(c).is_some() || self.edge_of(c).is_some())
    }

    pub fn is_interior(&self, c: Coord) -> bool {
        self.contains(c) && !self.is_boundary(c)
    }

    pub fn interior(&self) -> impl Iterator<Item = Coord> + '_ {
        self.coords().filter(move |&c| self.is_interior(c))
    }

    pub fn step(&self, c: Coord, dir: Dir) -> Option<Coord> {
        c.step(dir).filter(|&n| self.contains(n))
    }

    pub fn neighbors(&self, c: Coord) -> Result<Vec<Coord>> {
        self.require(c)?;
        Ok(Dir::ALL.iter().filter_map(|&d| self.step(c, d)).collect())
    }

    pub fn distance(&self, u: Coord, v: Coord) -> Result<u32> {
        self.require(u)?;
        self.require(v)?;
        Ok(lattice_distance(u, v))
    }

    /// Nodes within lattice distance `radius` of `c`, `c` included, in
    /// row-major order.
    pub fn ball(&self, c: Coord, radius: u32) -> Vec<Coord> {
        let r = radius as i64;
        let mut out = Vec::new();
        for dr in -r..=r {
            let lo = (-r).max(-r - dr);
            let hi = r.min(r - dr);
            for di in lo..=hi {
                if let Some(n) = c.shift(dr, di) {
                    if self.contains(n) {
                        out.push(n);
                    }
                }
            }
        }
        out
    }

    /// Unit triangles containing `c`, each sorted row-major.
    pub fn triangles_containing(&self, c: Coord) -> Result<Vec<[Coord; 3]>> {
        self.require(c)?;
        let mut out = Vec::with_capacity(6);
        for (a, b) in TRIANGLE_FANS {
            if let (Some(p), Some(q)) = (self.step(c, a), self.step(c, b)) {
                let mut t = [c, p, q];
                t.sort();
                out.push(t);
            }
        }
        out.sort();
        Ok(out)
    }

    /// Every unit triangle of the board exactly once.
    pub fn triangles(&self) -> impl Iterator<Item = [Coord; 3]> + '_ {
        self.coords().flat_map(move |c| {
            let up = match (self.step(c, Dir::E), self.step(c, Dir::NE)) {
                (Some(e), Some(ne)) => Some([c, e, ne]),
                _ => None,
            };
            let down = match (self.step(c, Dir::SE), self.step(c, Dir::E)) {
                (Some(se), Some(e)) => Some([se, c, e]),
                _ => None,
            };
            up.into_iter().chain(down)
        })
    }

    pub fn is_rainbow(&self, t: &[Coord; 3]) -> bool {
        is_rainbow(self.color(t[0]), self.color(t[1]), self.color(t[2]))
    }

    pub fn rainbow_triangles(&self) -> Vec<[Coord; 3]> {
        self.triangles().filter(|t| self.is_rainbow(t)).collect()
    }

    pub fn has_rainbow(&self) -> bool {
        self.triangles().any(|t| self.is_rainbow(&t))
    }

    pub fn uncolored(&self) -> impl Iterator<Item = Coord> + '_ {
        self.coords().filter(move |&c| self.color(c) == Color::Uncolored)
    }

    pub fn count_uncolored(&self) -> usize {
        self.cells.iter().filter(|&&c| c == Color::Uncolored).count()
    }

    /// Checks that corners carry three distinct colors and every edge node
    /// uses one of its two delimiting corner colors.
    pub fn validate_boundary(&self) -> Result<()> {
        let mut seen = Vec::new();
        for k in Corner::ALL {
            let c = self.corner(k);
            let col = self.color(c);
            if !col.is_player() || seen.contains(&col) {
                return Err(Error::Boundary {
                    coord: c,
                    found: col.to_char(),
                    allowed: "a corner color distinct from the other corners".into(),
                });
            }
            seen.push(col);
        }
        for c in self.coords() {
            let Some(edge) = self.edge_of(c) else { continue };
            let [p, q] = edge.corners().map(|k| self.corner_color(k));
            let col = self.color(c);
            if col != p && col != q {
                return Err(Error::Boundary {
                    coord: c,
                    found: col.to_char(),
                    allowed: format!("{p}{q}"),
                });
            }
        }
        Ok(())
    }

    /// Renders the board in the `atropos-board v1` text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("atropos-board v1\n");
        out.push_str(&format!("size {}\n", self.size));
        out.push_str(&format!(
            "corners {} {} {}\n",
            self.corner_color(Corner::Top),
            self.corner_color(Corner::BottomLeft),
            self.corner_color(Corner::BottomRight)
        ));
        for row in (0..=self.size + 1).rev() {
            out.push_str(&format!("row {row}: "));
            for c in self.text_row(row) {
                out.push(self.color(c).to_char());
            }
            out.push('\n');
        }
        out
    }

    /// Non-corner nodes of a row, left to right.
    fn text_row(&self, row: u32) -> impl Iterator<Item = Coord> + '_ {
        let len = self.row_len(row);
        let (lo, hi) = if row == 0 { (1, len - 1) } else { (0, len) };
        (lo..hi).map(move |i| Coord::new(row, i))
    }

    pub fn parse(text: &str) -> Result<Board> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| !l.starts_with('#'));
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::parse(0, 0, format!("unexpected end of input, expected {what}")))
        };

        let (ln, header) = next("header")?;
        if header != "atropos-board v1" {
            return Err(Error::parse(ln, 1, "expected `atropos-board v1`"));
        }

        let (ln, size_line) = next("size line")?;
        let size: u32 = size_line
            .strip_prefix("size ")
            .ok_or_else(|| Error::parse(ln, 1, "expected `size <s>`"))?
            .parse()
            .map_err(|_| Error::parse(ln, 6, "size is not a positive integer"))?;
        if size < 1 {
            return Err(Error::parse(ln, 6, "size must be >= 1"));
        }
        let mut board = Board::blank(size)?;

        let (ln, corners) = next("corners line")?;
        let rest = corners
            .strip_prefix("corners ")
            .ok_or_else(|| Error::parse(ln, 1, "expected `corners <T> <BL> <BR>`"))?;
        let toks: Vec<&str> = rest.split(' ').collect();
        if toks.len() != 3 {
            return Err(Error::parse(ln, 9, "expected exactly three corner colors"));
        }
        let mut col = 9;
        for (k, tok) in Corner::ALL.into_iter().zip(&toks) {
            let color = match tok.chars().collect::<Vec<_>>()[..] {
                [ch] => Color::from_char(ch).filter(|c| c.is_player()),
                _ => None,
            }
            .ok_or_else(|| Error::parse(ln, col, format!("bad corner color `{tok}`")))?;
            board.set_corner(k, color);
            col += tok.len() + 1;
        }

        for row in (0..=size + 1).rev() {
            let (ln, line) = next("row line")?;
            let prefix = format!("row {row}: ");
            let chars = line
                .strip_prefix(prefix.as_str())
                .ok_or_else(|| Error::parse(ln, 1, format!("expected `{prefix}`")))?;
            let cells: Vec<Coord> = board.text_row(row).collect();
            let got: Vec<char> = chars.chars().collect();
            if got.len() != cells.len() {
                return Err(Error::parse(
                    ln,
                    prefix.len() + 1,
                    format!("row {row} needs {} cells, found {}", cells.len(), got.len()),
                ));
            }
            for (j, (&c, &ch)) in cells.iter().zip(&got).enumerate() {
                let color = Color::from_char(ch).ok_or_else(|| {
                    Error::parse(ln, prefix.len() + 1 + j, format!("bad cell character `{ch}`"))
                })?;
                board.put(c, color);
            }
        }
        if let Some((ln, _)) = lines.next() {
            return Err(Error::parse(ln, 1, "trailing content after last row"));
        }
        board.validate_boundary()?;
        Ok(board)
    }
}

/// Pairs of directions spanning the six triangles around a node.
const TRIANGLE_FANS: [(Dir, Dir); 6] = [
    (Dir::E, Dir::NE),
    (Dir::NE, Dir::NW),
    (Dir::NW, Dir::W),
    (Dir::W, Dir::SW),
    (Dir::SW, Dir::SE),
    (Dir::SE, Dir::E),
];

impl fmt::Display for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Board {
    type Err = Error;

    fn from_str(s: &str) -> Result<Board> {
        Board::parse(s)
    }
}

/// Parses a node token pair: `<row> <offset>` or a corner token.
pub fn parse_node(board: &Board, toks: &[&str]) -> Option<(Coord, usize)> {
    if let Some(k) = toks.first().and_then(|t| Corner::from_token(t)) {
        return Some((board.corner(k), 1));
    }
    let row = toks.first()?.parse().ok()?;
    let offset = toks.get(1)?.parse().ok()?;
    Some((Coord::new(row, offset), 2))
}

/// Formats a node as `<row> <offset>` or its corner token.
pub fn format_node(board: &Board, c: Coord) -> String {
    match board.corner_at(c) {
        Some(k) => k.token().to_string(),
        None => format!("{} {}", c.row, c.offset),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeSet, VecDeque};

    fn bfs(board: &Board, from: Coord) -> Vec<Option<u32>> {
        let mut dist = vec![None; board.node_count()];
        let mut queue = VecDeque::new();
        dist[board.index(from).unwrap()] = Some(0);
        queue.push_back(from);
        while let Some(u) = queue.pop_front() {
            let du = dist[board.index(u).unwrap()].unwrap();
            for v in board.neighbors(u).unwrap() {
                let slot = &mut dist[board.index(v).unwrap()];
                if slot.is_none() {
                    *slot = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    #[test]
    fn interior_counts() {
        assert_eq!(Board::new(7).unwrap().interior().count(), 28);
        assert_eq!(Board::new(1).unwrap().interior().count(), 1);
        assert_eq!(Board::new(1).unwrap().count_uncolored(), 1);
        assert!(Board::new(0).is_err());
    }

    #[test]
    fn canonical_boundary_is_legal_and_has_no_rainbow() {
        for s in 1..=9 {
            let b = Board::new(s).unwrap();
            b.validate_boundary().unwrap();
            assert!(b.interior().all(|c| b.color(c) == Color::Uncolored));
            assert!(b.coords().filter(|&c| b.is_boundary(c)).all(|c| b.color(c).is_player()));
            assert!(!b.has_rainbow(), "size {s}");
        }
    }

    #[test]
    fn size_seven_boundary_pattern() {
        let b = Board::new(7).unwrap();
        assert_eq!(b.corner_color(Corner::Top), Color::Blue);
        assert_eq!(b.corner_color(Corner::BottomLeft), Color::Green);
        assert_eq!(b.corner_color(Corner::BottomRight), Color::Red);
        let bottom: String = (1..=8).map(|i| b.color(Coord::new(0, i)).to_char()).collect();
        assert_eq!(bottom, "GRGRGRGR");
        let left: String = (1..=8).map(|r| b.color(Coord::new(r, 0)).to_char()).collect();
        assert_eq!(left, "GBGBGBGB");
        let right: String = (1..=8).map(|r| b.color(Coord::new(r, 9 - r)).to_char()).collect();
        assert_eq!(right, "BRBRBRBR");
    }

    #[test]
    fn boundary_mutation_rejected() {
        for s in 1..=4 {
            let b = Board::new(s).unwrap();
            for c in b.coords().filter(|&c| b.is_boundary(c)) {
                for col in Color::PLAYER {
                    let mut m = b.clone();
                    m.set(c, col).unwrap();
                    let ok = match b.edge_of(c) {
                        Some(e) => e.corners().iter().any(|&k| b.corner_color(k) == col),
                        None => col == b.color(c),
                    };
                    assert_eq!(m.validate_boundary().is_ok(), ok, "{c} -> {col}");
                }
            }
        }
    }

    #[test]
    fn degrees_and_corner_adjacency() {
        let b = Board::new(7).unwrap();
        assert_eq!(b.neighbors(Coord::new(3, 3)).unwrap().len(), 6);
        let top = b.corner(Corner::Top);
        let nt: BTreeSet<_> = b.neighbors(top).unwrap().into_iter().collect();
        // the two nodes of the top row
        assert_eq!(nt, BTreeSet::from([Coord::new(8, 0), Coord::new(8, 1)]));
        assert_eq!(b.triangles_containing(top).unwrap(), vec![[Coord::new(8, 0), Coord::new(8, 1), top]]);
        let bl = b.corner(Corner::BottomLeft);
        assert_eq!(b.neighbors(bl).unwrap().len(), 2);
        assert!(b.neighbors(Coord::new(99, 0)).is_err());
        for c in b.coords() {
            assert!(!b.neighbors(c).unwrap().contains(&c));
        }
    }

    #[test]
    fn interior_node_has_six_triangles() {
        let b = Board::new(5).unwrap();
        assert_eq!(b.triangles_containing(Coord::new(2, 2)).unwrap().len(), 6);
    }

    #[test]
    fn distance_matches_bfs_and_is_a_metric() {
        for s in 1..=3 {
            let b = Board::new(s).unwrap();
            let all: Vec<Coord> = b.coords().collect();
            let table: Vec<Vec<Option<u32>>> = all.iter().map(|&u| bfs(&b, u)).collect();
            for (ui, &u) in all.iter().enumerate() {
                for (vi, &v) in all.iter().enumerate() {
                    let d = b.distance(u, v).unwrap();
                    assert_eq!(Some(d), table[ui][vi]);
                    assert_eq!(d, b.distance(v, u).unwrap());
                    assert_eq!(d == 0, u == v);
                    assert_eq!(d == 1, b.neighbors(u).unwrap().contains(&v));
                    for &w in &all {
                        assert!(b.distance(u, w).unwrap() <= d + b.distance(v, w).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn triangle_union_matches_brute_force() {
        let b = Board::new(2).unwrap();
        let all: Vec<Coord> = b.coords().collect();
        let mut brute = BTreeSet::new();
        for (i, &p) in all.iter().enumerate() {
            for (j, &q) in all.iter().enumerate().skip(i + 1) {
                for &r in &all[j + 1..] {
                    if lattice_distance(p, q) == 1 && lattice_distance(q, r) == 1 && lattice_distance(p, r) == 1 {
                        brute.insert([p, q, r]);
                    }
                }
            }
        }
        let union: BTreeSet<_> = all.iter().flat_map(|&c| b.triangles_containing(c).unwrap()).collect();
        assert_eq!(union, brute);
        let listed: Vec<_> = b.triangles().map(|mut t| {
            t.sort();
            t
        }).collect();
        assert_eq!(listed.len(), brute.len());
        assert_eq!(listed.into_iter().collect::<BTreeSet<_>>(), brute);
    }

    #[test]
    fn ball_matches_distance_filter() {
        let b = Board::new(6).unwrap();
        for c in [Coord::new(0, 0), Coord::new(3, 2), Coord::new(8, 0)] {
            for r in 0..5 {
                let mut want: Vec<Coord> = b.coords().filter(|&v| lattice_distance(c, v) <= r).collect();
                want.sort();
                let mut got = b.ball(c, r);
                got.sort();
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn sperner_every_completion_has_a_rainbow() {
        for s in 1..=2 {
            let base = Board::new(s).unwrap();
            let inner: Vec<Coord> = base.interior().collect();
            let total = 3usize.pow(inner.len() as u32);
            for code in 0..total {
                let mut b = base.clone();
                let mut x = code;
                for &c in &inner {
                    b.set(c, Color::PLAYER[x % 3]).unwrap();
                    x /= 3;
                }
                assert!(b.has_rainbow(), "size {s}, code {code}");
            }
        }
    }

    #[test]
    fn text_round_trip_and_errors() {
        let b = Board::new(7).unwrap();
        let text = b.to_text();
        assert_eq!(Board::parse(&text).unwrap(), b);

        let fixture = "atropos-board v1\n# hand written\nsize 2\ncorners B G R\nrow 3: GB\nrow 2: B.B\nrow 1: G..R\nrow 0: GRG\n";
        let small = Board::parse(fixture).unwrap();
        assert_eq!(small.count_uncolored(), 3);
        small.validate_boundary().unwrap();

        let bad = text.replacen("row 0: GRGRGRGR", "row 0: BRGRGRGR", 1);
        assert!(matches!(Board::parse(&bad), Err(Error::Boundary { .. })));
        let short = text.replacen("row 0: GRGRGRGR", "row 0: GRGRGRG", 1);
        assert!(matches!(Board::parse(&short), Err(Error::Parse { line: 12, .. })));
        let junk = text.replacen("row 5: G...B", "row 5: G.x.B", 1);
        assert!(matches!(Board::parse(&junk), Err(Error::Parse { line: 7, column: 10, .. })));
        assert!(Board::parse("atropos-board v2\n").is_err());
    }
}

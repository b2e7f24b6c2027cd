//! Geometry of the rotated half-plane lattice.
//!
//! Vertices are `(x, y)` with `y >= 0` and `x + y` even. Every vertex has two
//! outgoing directed edges, to `(x - 1, y + 1)` and `(x + 1, y + 1)`. The
//! simulated region is a [`Window`]: `x` is periodic with period `2W` and
//! only levels `0..=M` exist.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub x: i64,
    pub y: i64,
}

impl Vertex {
    pub fn new(x: i64, y: i64) -> Result<Self> {
        if y < 0 || (x + y).rem_euclid(2) != 0 {
            return Err(Error::InvalidVertex { x, y });
        }
        Ok(Self { x, y })
    }

    /// Boundary vertex `(x, 0)`; panics on odd `x`.
    pub fn boundary(x: i64) -> Self {
        assert!(x.rem_euclid(2) == 0, "boundary vertices have even x");
        Self { x, y: 0 }
    }

    pub const ORIGIN: Vertex = Vertex { x: 0, y: 0 };

    #[inline]
    pub fn level(self) -> i64 {
        self.y
    }

    #[inline]
    pub fn is_boundary(self) -> bool {
        self.y == 0
    }

    #[inline]
    pub fn step(self, dir: Dir) -> Vertex {
        Vertex { x: self.x + dir.dx(), y: self.y + 1 }
    }

    /// The vertex that reaches `self` through an edge in direction `dir`.
    #[inline]
    pub fn pred(self, dir: Dir) -> Vertex {
        Vertex { x: self.x - dir.dx(), y: self.y - 1 }
    }

    pub fn edge(self, dir: Dir) -> Edge {
        Edge { tail: self, dir }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

impl FromStr for Vertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (x, y) = s.split_once(',').ok_or_else(|| Error::Parse(format!("vertex {s:?}")))?;
        let x = x.trim().parse().map_err(|_| Error::Parse(format!("vertex {s:?}")))?;
        let y = y.trim().parse().map_err(|_| Error::Parse(format!("vertex {s:?}")))?;
        Vertex::new(x, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dir {
    Left,
    Right,
}

impl Dir {
    pub const BOTH: [Dir; 2] = [Dir::Left, Dir::Right];

    #[inline]
    pub fn dx(self) -> i64 {
        match self {
            Dir::Left => -1,
            Dir::Right => 1,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Dir::Left => 'L',
            Dir::Right => 'R',
        }
    }

    pub fn from_letter(c: &str) -> Result<Self> {
        match c {
            "L" => Ok(Dir::Left),
            "R" => Ok(Dir::Right),
            _ => Err(Error::Parse(format!("direction {c:?}"))),
        }
    }

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Dir::Left => 0,
            Dir::Right => 1,
        }
    }

    pub fn from_index(i: usize) -> Self {
        if i == 0 {
            Dir::Left
        } else {
            Dir::Right
        }
    }
}

/// Directed edge `tail -> tail + θ_dir`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub tail: Vertex,
    pub dir: Dir,
}

impl Edge {
    pub fn new(tail: Vertex, dir: Dir) -> Self {
        Self { tail, dir }
    }

    #[inline]
    pub fn head(self) -> Vertex {
        self.tail.step(self.dir)
    }

    /// Level of the upper endpoint.
    #[inline]
    pub fn level(self) -> i64 {
        self.tail.y + 1
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.tail.x, self.tail.y, self.dir.letter())
    }
}

impl FromStr for Edge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (v, d) = s.rsplit_once(',').ok_or_else(|| Error::Parse(format!("edge {s:?}")))?;
        Ok(Edge { tail: v.parse()?, dir: Dir::from_letter(d.trim())? })
    }
}

/// `true` iff `v` is reachable from `base` by directed edges.
pub fn in_cone(base: Vertex, v: Vertex) -> bool {
    let dy = v.y - base.y;
    dy >= 0 && (v.x - base.x).abs() <= dy
}

/// Translation by `k` periods of the horizontal shift `(2, 0)`.
pub fn shift(v: Vertex, k: i64) -> Vertex {
    Vertex { x: v.x + 2 * k, y: v.y }
}

/// Cyclic simulation window: `W` boundary sites per period `2W`, levels `0..=M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    width: u32,
    height: u32,
}

impl Window {
    pub fn new(width: u32, height: u32) -> Result<Self> {
        if height == 0 || width < height.saturating_add(1) {
            return Err(Error::InvalidWindow { width, height });
        }
        Ok(Self { width, height })
    }

    /// Boundary sites per period (`W`).
    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    /// Height cap (`M`).
    #[inline]
    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn period(&self) -> i64 {
        2 * self.width as i64
    }

    /// Number of vertices with `1 <= y <= M`.
    pub fn interior_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    /// Number of vertices with `0 <= y <= M`.
    pub fn vertex_count(&self) -> usize {
        self.width as usize * (self.height as usize + 1)
    }

    #[inline]
    pub fn contains_level(&self, y: i64) -> bool {
        (0..=self.height as i64).contains(&y)
    }

    #[inline]
    pub fn canonicalize(&self, v: Vertex) -> Vertex {
        Vertex { x: v.x.rem_euclid(self.period()), y: v.y }
    }

    pub fn canonical_edge(&self, e: Edge) -> Edge {
        Edge { tail: self.canonicalize(e.tail), dir: e.dir }
    }

    /// Dense index of a vertex with `0 <= y <= M` (level-major, then by x).
    #[inline]
    pub fn index(&self, v: Vertex) -> usize {
        debug_assert!(self.contains_level(v.y));
        let x = v.x.rem_euclid(self.period());
        let col = ((x - (v.y & 1)) / 2) as usize;
        v.y as usize * self.width as usize + col
    }

    #[inline]
    pub fn vertex_at(&self, index: usize) -> Vertex {
        let w = self.width as usize;
        let y = (index / w) as i64;
        let col = (index % w) as i64;
        Vertex { x: 2 * col + (y & 1), y }
    }

    /// Dense index of the boundary site with canonical x `2 * i`.
    #[inline]
    pub fn site_index(&self, root: Vertex) -> usize {
        (root.x.rem_euclid(self.period()) / 2) as usize
    }

    #[inline]
    pub fn site(&self, i: usize) -> Vertex {
        Vertex { x: 2 * i as i64, y: 0 }
    }

    pub fn sites(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.width as usize).map(|i| self.site(i))
    }

    /// The `W` canonical vertices at level `m`, sorted by x.
    pub fn level_vertices(&self, m: i64) -> Result<Vec<Vertex>> {
        if !self.contains_level(m) {
            return Err(Error::LevelOutOfRange { level: m, max: self.height });
        }
        Ok((0..self.width as i64).map(|i| Vertex { x: 2 * i + (m & 1), y: m }).collect())
    }

    /// Horizontal displacement from `a` to `b` on the lift, reduced into `(-W, W]`.
    pub fn displacement(&self, a: Vertex, b: Vertex) -> i64 {
        let p = self.period();
        let d = (b.x - a.x).rem_euclid(p);
        if d > p / 2 {
            d - p
        } else {
            d
        }
    }

    /// Cone membership on the cyclic window, using the minimal lift.
    pub fn in_cone(&self, base: Vertex, v: Vertex) -> bool {
        let dy = v.y - base.y;
        dy >= 0 && self.displacement(base, v).abs() <= dy
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: i64, y: i64) -> Vertex {
        Vertex::new(x, y).unwrap()
    }

    #[test]
    fn head_examples() {
        assert_eq!(v(0, 0).edge(Dir::Right).head(), v(1, 1));
        assert_eq!(v(0, 0).edge(Dir::Left).head(), v(-1, 1));
        assert_eq!(v(3, 1).edge(Dir::Left).head(), v(2, 2));
    }

    #[test]
    fn vertex_validation() {
        assert!(Vertex::new(1, 0).is_err());
        assert!(Vertex::new(0, -2).is_err());
        assert!(Vertex::new(-3, 1).is_ok());
    }

    #[test]
    fn canonicalize_examples() {
        let w = Window::new(4, 3).unwrap();
        assert_eq!(w.canonicalize(v(8, 0)), v(0, 0));
        assert_eq!(w.canonicalize(v(-1, 1)), v(7, 1));
        assert_eq!(w.canonicalize(v(3, 1)), v(3, 1));
    }

    #[test]
    fn cone_examples() {
        assert!(in_cone(v(0, 0), v(0, 2)));
        assert!(!in_cone(v(0, 0), v(3, 1)));
        assert!(in_cone(v(0, 0), v(-2, 2)));
        assert!(!in_cone(v(0, 2), v(0, 0)));
    }

    #[test]
    fn shift_examples() {
        assert_eq!(shift(v(0, 0), 1), v(2, 0));
        assert_eq!(shift(v(2, 0), -1), v(0, 0));
        assert_eq!(shift(v(1, 1), 3), v(7, 1));
    }

    #[test]
    fn level_vertices_examples() {
        assert_eq!(Window::new(2, 1).unwrap().level_vertices(0).unwrap(), vec![v(0, 0), v(2, 0)]);
        assert_eq!(Window::new(2, 1).unwrap().level_vertices(1).unwrap(), vec![v(1, 1), v(3, 1)]);
        assert_eq!(
            Window::new(3, 2).unwrap().level_vertices(2).unwrap(),
            vec![v(0, 2), v(2, 2), v(4, 2)]
        );
        assert!(matches!(
            Window::new(3, 2).unwrap().level_vertices(3),
            Err(Error::LevelOutOfRange { .. })
        ));
    }

    #[test]
    fn window_requires_room_for_a_full_cone() {
        assert!(Window::new(8, 16).is_err());
        assert!(Window::new(16, 16).is_err());
        assert!(Window::new(17, 16).is_ok());
        assert!(Window::new(4, 0).is_err());
    }

    #[test]
    fn index_round_trips() {
        let w = Window::new(5, 4).unwrap();
        for i in 0..w.vertex_count() {
            let vx = w.vertex_at(i);
            assert_eq!(w.index(vx), i);
            assert_eq!(w.canonicalize(vx), vx);
        }
        assert_eq!(w.index(v(-1, 1)), w.index(v(9, 1)));
    }

    #[test]
    fn text_forms() {
        assert_eq!(v(-3, 1).to_string(), "-3,1");
        assert_eq!(v(2, 0).edge(Dir::Left).to_string(), "2,0,L");
        assert_eq!("2,0,L".parse::<Edge>().unwrap(), v(2, 0).edge(Dir::Left));
        assert_eq!("-3,1".parse::<Vertex>().unwrap(), v(-3, 1));
        assert!("1,1,X".parse::<Edge>().is_err());
        assert!("1,0".parse::<Vertex>().is_err());
    }

    #[test]
    fn cyclic_cone_uses_minimal_lift() {
        let w = Window::new(4, 3).unwrap();
        assert!(w.in_cone(v(0, 0), v(7, 1)));
        assert!(!w.in_cone(v(0, 0), v(4, 2)));
        assert_eq!(w.displacement(v(0, 0), v(7, 1)), -1);
    }
}

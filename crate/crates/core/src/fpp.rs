//! First passage percolation on the window: seeded exponential edge weights
//! and the geodesic forest of minimal monotone paths to the boundary.
//!
//! Weights are parameterized by *rate*: an edge at level `h` under the
//! stretch profile is Exp(2^-h), i.e. has mean `2^h`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Dir, Edge, Vertex, Window};
use crate::rng::{counter_hash, exp1_from_uniform, unit_f64, Domain};
use crate::view::ForestView;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightProfile {
    /// Rate `2^-h`.
    Stretch,
    /// Rate 1.
    Eden,
    /// Rate `2^h`.
    Decreasing,
}

impl WeightProfile {
    /// Binary exponent `s` with `1 / rate(h) = 2^s`.
    #[inline]
    pub fn mean_exponent(self, h: i64) -> i32 {
        match self {
            WeightProfile::Stretch => h as i32,
            WeightProfile::Eden => 0,
            WeightProfile::Decreasing => -(h as i32),
        }
    }

    pub fn rate(self, h: i64) -> f64 {
        (-(self.mean_exponent(h) as f64)).exp2()
    }

    pub fn name(self) -> &'static str {
        match self {
            WeightProfile::Stretch => "stretch",
            WeightProfile::Eden => "eden",
            WeightProfile::Decreasing => "decreasing",
        }
    }
}

impl fmt::Display for WeightProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WeightProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stretch" => Ok(WeightProfile::Stretch),
            "eden" => Ok(WeightProfile::Eden),
            "decreasing" => Ok(WeightProfile::Decreasing),
            _ => Err(Error::Parse(format!("weight profile {s:?}"))),
        }
    }
}

/// Exponential variate with the profile's rate at level `h`, from a uniform
/// `u ∈ [0, 1)` by inversion. Never returns zero.
pub fn weight_from_uniform<T: Scalar>(profile: WeightProfile, h: i64, u: f64) -> T {
    let e = T::from_f64(exp1_from_uniform(u)).unwrap_or_else(T::zero);
    let w = e * T::from_f64(2f64.powi(profile.mean_exponent(h))).unwrap_or_else(T::infinity);
    if w > T::zero() {
        w
    } else {
        T::min_positive_value()
    }
}

/// Lazily evaluated weight assignment: a pure function of `(seed, edge)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightField {
    pub seed: u64,
    pub profile: WeightProfile,
    pub window: Window,
    /// Hash-domain relabeling: edge `e` reads the draw of `shift(e, offset)`.
    #[serde(default)]
    pub offset: i64,
}

impl WeightField {
    pub fn new(seed: u64, profile: WeightProfile, window: Window) -> Self {
        Self { seed, profile, window, offset: 0 }
    }

    /// The same field seen through the lattice shift by `k`:
    /// `shifted(k).weight(e) == weight(shift(e, k))`.
    pub fn shifted(&self, k: i64) -> Self {
        Self { offset: self.offset + k, ..*self }
    }

    #[inline]
    pub fn uniform(&self, e: Edge) -> f64 {
        let t = self.window.canonicalize(Vertex { x: e.tail.x + 2 * self.offset, y: e.tail.y });
        unit_f64(counter_hash(
            self.seed,
            Domain::Weight,
            &[t.x as u64, t.y as u64, e.dir.index() as u64],
        ))
    }

    /// Weight of an edge assumed to lie inside the window.
    #[inline]
    pub fn weight<T: Scalar>(&self, e: Edge) -> T {
        debug_assert!(e.level() >= 1 && e.level() <= self.window.height() as i64);
        weight_from_uniform(self.profile, e.level(), self.uniform(e))
    }

    pub fn sample_weight<T: Scalar>(&self, e: Edge) -> Result<T> {
        if e.tail.y < 0 || e.level() > self.window.height() as i64 {
            return Err(Error::EdgeOutOfRange(e));
        }
        Ok(self.weight(e))
    }

    /// Checks that every weight in the window is finite in `T`.
    pub fn check_precision<T: Scalar>(&self) -> Result<()> {
        for h in 1..=self.window.height() as i64 {
            // -ln(2^-53) < 40 bounds the unit exponential.
            let top = 40.0 * 2f64.powi(self.profile.mean_exponent(h));
            if !T::from_f64(top).is_some_and(|t| t.is_finite()) {
                return Err(Error::ScalarRange { level: h as u32 });
            }
        }
        Ok(())
    }
}

/// Geodesic distances, parent directions and root labels for every vertex
/// of the window.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicForest<T> {
    window: Window,
    field: WeightField,
    dist: Vec<T>,
    parent: Vec<Option<Dir>>,
    root: Vec<u32>,
}

/// Level-by-level dynamic program over the two predecessors of each vertex.
/// Ties go to the predecessor whose edge points Left.
pub fn build_forest<T: Scalar>(field: &WeightField) -> Result<GeodesicForest<T>> {
    field.check_precision::<T>()?;
    let window = field.window;
    let n = window.vertex_count();
    let w = window.width() as usize;
    let mut dist = vec![T::zero(); n];
    let mut parent = vec![None; n];
    let mut root = vec![0u32; n];
    for (i, r) in root.iter_mut().enumerate().take(w) {
        *r = i as u32;
    }
    for y in 1..=window.height() as i64 {
        for col in 0..w as i64 {
            let v = Vertex { x: 2 * col + (y & 1), y };
            let vi = window.index(v);
            let pl = v.pred(Dir::Left);
            let pr = v.pred(Dir::Right);
            let (il, ir) = (window.index(pl), window.index(pr));
            let via_left = dist[il] + field.weight::<T>(pl.edge(Dir::Left));
            let via_right = dist[ir] + field.weight::<T>(pr.edge(Dir::Right));
            let (d, dir, from) = if via_left <= via_right {
                (via_left, Dir::Left, il)
            } else {
                (via_right, Dir::Right, ir)
            };
            dist[vi] = d;
            parent[vi] = Some(dir);
            root[vi] = root[from];
        }
    }
    Ok(GeodesicForest { window, field: *field, dist, parent, root })
}

impl<T: Scalar> GeodesicForest<T> {
    pub fn field(&self) -> &WeightField {
        &self.field
    }

    /// Geodesic distance to the boundary; zero on the boundary.
    pub fn distance(&self, v: Vertex) -> Result<T> {
        if !self.window.contains_level(v.y) {
            return Err(Error::LevelOutOfRange { level: v.y, max: self.window.height() });
        }
        Ok(self.dist[self.window.index(v)])
    }

    /// Boundary vertex where the geodesic of `v` starts.
    pub fn root_of(&self, v: Vertex) -> Vertex {
        self.window.site(self.root[self.window.index(v)] as usize)
    }

    pub fn max_dist(&self) -> T {
        self.dist.iter().copied().fold(T::zero(), T::max)
    }

    /// Canonical edges of `T̂(root)`.
    pub fn tree_of(&self, root: Vertex) -> Result<BTreeSet<Edge>> {
        if !root.is_boundary() {
            return Err(Error::NotBoundary(root));
        }
        let site = self.window.site_index(root) as u32;
        let mut edges = BTreeSet::new();
        for i in self.window.width() as usize..self.window.vertex_count() {
            if self.root[i] == site {
                let v = self.window.vertex_at(i);
                let d = self.parent[i].expect("interior vertex has a parent");
                edges.insert(self.window.canonical_edge(v.pred(d).edge(d)));
            }
        }
        Ok(edges)
    }

    /// The geodesic from the boundary to `v`, listed root first.
    pub fn geodesic(&self, v: Vertex) -> Vec<Edge> {
        let mut path = Vec::with_capacity(v.y as usize);
        let mut cur = self.window.canonicalize(v);
        while let Some(d) = self.parent[self.window.index(cur)] {
            let p = self.window.canonicalize(cur.pred(d));
            path.push(p.edge(d));
            cur = p;
        }
        path.reverse();
        path
    }
}

impl<T: Scalar> ForestView<T> for GeodesicForest<T> {
    fn window(&self) -> Window {
        self.window
    }

    fn owner(&self, v: Vertex) -> Option<usize> {
        Some(self.root[self.window.index(v)] as usize)
    }

    fn parent_dir(&self, v: Vertex) -> Option<Dir> {
        self.parent[self.window.index(v)]
    }

    fn arrival(&self, v: Vertex) -> Option<T> {
        Some(self.dist[self.window.index(v)])
    }
}

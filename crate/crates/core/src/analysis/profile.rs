//! Tree profiles, slimness, flanking vertices and tail diagnostics.

use serde::{Deserialize, Serialize};

use super::stats::{wilson_interval, Z_95, Z_99_ONE_SIDED};
use super::tree::{Height, MonotoneTree};
use crate::error::{Error, Result};
use crate::lattice::{Dir, Vertex};
use crate::view::ForestView;
use crate::Scalar;

/// `|T^m(root)|` read off a forest or particle-system state.
pub fn level_profile<T: Scalar>(view: &impl ForestView<T>, root: Vertex, m: i64) -> usize {
    let w = view.window();
    if m == 0 {
        return 1;
    }
    if !w.contains_level(m) {
        return 0;
    }
    let site = w.site_index(root);
    w.level_vertices(m)
        .expect("level checked")
        .into_iter()
        .filter(|&v| view.owner(v) == Some(site))
        .count()
}

pub fn tree_height(tree: &MonotoneTree) -> Height {
    tree.tree_height()
}

/// Width threshold `D` for slimness, with the density and tolerance it was
/// derived from (`D = 1 / (β δ)` by convention).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlimParams {
    pub d: f64,
    pub delta: f64,
    pub beta_hat: f64,
}

impl SlimParams {
    pub fn new(d: f64) -> Result<Self> {
        if !(d > 0.0) {
            return Err(Error::InvalidParameter(format!("slim threshold D must be positive, got {d}")));
        }
        Ok(Self { d, delta: f64::NAN, beta_hat: f64::NAN })
    }

    pub fn from_density(beta_hat: f64, delta: f64) -> Result<Self> {
        if !(beta_hat > 0.0) || !(0.0 < delta && delta < 1.0) {
            return Err(Error::InvalidParameter(format!("need β > 0 and δ in (0,1), got β={beta_hat} δ={delta}")));
        }
        Ok(Self { d: 1.0 / (beta_hat * delta), delta, beta_hat })
    }
}

/// Levels `1..=height` where `0 < |T^n| < D`.
pub fn slim_levels(tree: &MonotoneTree, params: &SlimParams) -> Vec<u32> {
    (1..=tree.height())
        .filter(|&n| {
            let k = tree.level_profile(n as i64);
            k > 0 && (k as f64) < params.d
        })
        .collect()
}

/// Fraction of the tree's levels `1..=height` that are slim; zero for a bare root.
pub fn slim_fraction(tree: &MonotoneTree, params: &SlimParams) -> f64 {
    match tree.height() {
        0 => 0.0,
        h => slim_levels(tree, params).len() as f64 / h as f64,
    }
}

/// Vertices flanking the level-`n` slice of a tree and the triangle they span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlankInfo<T> {
    pub n: u32,
    pub left: Vertex,
    pub right: Vertex,
    pub slice_len: usize,
    /// Maximum of the arrival times of the two flanks.
    pub max_dist: Option<T>,
    pub left_dist: Option<T>,
    pub triangle: Vec<Vertex>,
    /// Whether the slice is a run of adjacent vertices.
    pub contiguous: bool,
    /// Whether every slice vertex lies in the triangle.
    pub slice_in_triangle: bool,
}

/// Lattice points of `Conv{a, b, c}` with `y >= 0`, sorted by `(y, x)`.
pub fn lattice_triangle(a: Vertex, b: Vertex, c: Vertex) -> Vec<Vertex> {
    let cross = |p: Vertex, q: Vertex, r: Vertex| (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    let (x0, x1) = (a.x.min(b.x).min(c.x), a.x.max(b.x).max(c.x));
    let (y0, y1) = (a.y.min(b.y).min(c.y).max(0), a.y.max(b.y).max(c.y));
    let mut pts = Vec::new();
    for y in y0..=y1 {
        for x in x0..=x1 {
            if (x + y).rem_euclid(2) != 0 {
                continue;
            }
            let p = Vertex { x, y };
            let s = [cross(a, b, p), cross(b, c, p), cross(c, a, p)];
            if s.iter().all(|&v| v >= 0) || s.iter().all(|&v| v <= 0) {
                pts.push(p);
            }
        }
    }
    pts
}

/// Flanks of the level-`n` slice of the tree rooted at `root`.
pub fn flanks<T: Scalar>(view: &impl ForestView<T>, root: Vertex, n: u32) -> Result<FlankInfo<T>> {
    let w = view.window();
    let tree = view.extract_tree(root);
    let slice = tree.level_slice(n as i64);
    let (Some(&lo), Some(&hi)) = (slice.first(), slice.last()) else {
        return Err(Error::EmptyLevel(n));
    };
    let y = root.y + n as i64;
    let left = Vertex { x: lo - 2, y };
    let right = Vertex { x: hi + 2, y };
    if right.x - left.x >= w.period() {
        return Err(Error::WrapCollision { level: n });
    }
    let k = slice.len() as i64;
    let apex = Vertex { x: left.x + (k + 1), y: y + k + 1 };
    let triangle = lattice_triangle(left, right, apex);
    let slice_in_triangle = slice.iter().all(|&x| triangle.contains(&Vertex { x, y }));
    let left_dist = view.arrival(left);
    let max_dist = match (left_dist, view.arrival(right)) {
        (Some(a), Some(b)) => Some(a.max(b)),
        _ => None,
    };
    Ok(FlankInfo {
        n,
        left,
        right,
        slice_len: slice.len(),
        max_dist,
        left_dist,
        triangle,
        contiguous: (hi - lo) as usize == 2 * (slice.len() - 1),
        slice_in_triangle,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlankBoundReport {
    pub n: u32,
    pub kappa: f64,
    pub threshold: f64,
    pub samples: usize,
    pub exceed: usize,
    pub frequency: f64,
    /// One-sided 99% Wilson upper bound on the exceedance probability.
    pub upper99: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Compares the frequency of `d(l_n) > κ 2^(n+1)` with the bound `1/κ`.
pub fn flank_bound_test(samples: &[f64], n: u32, kappa: f64) -> Result<FlankBoundReport> {
    if samples.len() < 100 {
        return Err(Error::TooFewSamples { needed: 100, got: samples.len() });
    }
    if !(kappa > 1.0) {
        return Err(Error::InvalidParameter(format!("kappa must exceed 1, got {kappa}")));
    }
    let threshold = kappa * 2f64.powi(n as i32 + 1);
    let exceed = samples.iter().filter(|&&d| d > threshold).count();
    let (_, upper99) = wilson_interval(exceed as u64, samples.len() as u64, Z_99_ONE_SIDED);
    let bound = 1.0 / kappa;
    Ok(FlankBoundReport {
        n,
        kappa,
        threshold,
        samples: samples.len(),
        exceed,
        frequency: exceed as f64 / samples.len() as f64,
        upper99,
        bound,
        pass: upper99 <= bound + 0.05,
    })
}

/// Every level `1..=M` is split among the trees exactly once:
/// `Σ_roots |T^m(root)| = W`.
pub fn coverage_partition_check<T: Scalar>(view: &impl ForestView<T>) -> bool {
    let w = view.window();
    let mut per_level = vec![0usize; w.height() as usize + 1];
    for root in w.sites() {
        let tree = view.extract_tree(root);
        for v in tree.vertices() {
            if v.y > 0 {
                per_level[v.y as usize] += 1;
            }
        }
    }
    per_level[1..].iter().all(|&c| c == w.width() as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalPoint {
    pub level: u32,
    pub survival: f64,
    pub lower: f64,
    pub upper: f64,
    pub samples: usize,
}

/// Empirical `P(h >= n)` with 95% Wilson bands. Censored heights count at
/// their observed value, which is the cap.
pub fn tail_height_estimate(heights: &[Height], levels: &[u32]) -> Vec<SurvivalPoint> {
    levels
        .iter()
        .map(|&level| {
            let k = heights.iter().filter(|h| h.value() >= level).count();
            let (lower, upper) = wilson_interval(k as u64, heights.len() as u64, Z_95);
            SurvivalPoint {
                level,
                survival: if heights.is_empty() { 0.0 } else { k as f64 / heights.len() as f64 },
                lower,
                upper,
                samples: heights.len(),
            }
        })
        .collect()
}

/// Mean of `min(h, cap)` over the sample.
pub fn truncated_mean_height(heights: &[Height]) -> f64 {
    heights.iter().map(|h| h.value() as f64).sum::<f64>() / heights.len().max(1) as f64
}

/// Empirical `P(X > D)` next to the Markov bound `E[X] / D`.
pub fn markov_check(values: &[usize], d: f64) -> (f64, f64) {
    let n = values.len().max(1) as f64;
    let tail = values.iter().filter(|&&v| v as f64 > d).count() as f64 / n;
    let mean = values.iter().sum::<usize>() as f64 / n;
    (tail, mean / d)
}

/// Whether every ray `start + iθ` (`i >= 0`) through the window avoids the tree.
fn ray_avoids(tree: &MonotoneTree, start: Vertex, dir: Dir, top: i64) -> bool {
    (0..=top - start.y).all(|i| !tree.vertices().contains(&Vertex { x: start.x + i * dir.dx(), y: start.y + i }))
}

/// Confinement of a tree between two boundary rays: a site `v_l` left of the
/// root whose up-right ray misses the tree and a site `v_r` right of it whose
/// up-left ray misses it. Returns the closest such pair, searched within one
/// period so that the rays stay on the lift.
pub fn flanking_rays(tree: &MonotoneTree, period: i64, top: i64) -> Option<(Vertex, Vertex)> {
    let r = tree.root();
    let reach = period / 2;
    let left = (1..=reach / 2)
        .map(|k| Vertex { x: r.x - 2 * k, y: r.y })
        .find(|&s| ray_avoids(tree, s, Dir::Right, top))?;
    let right = (1..=reach / 2)
        .map(|k| Vertex { x: r.x + 2 * k, y: r.y })
        .find(|&s| ray_avoids(tree, s, Dir::Left, top))?;
    Some((left, right))
}

/// Whether the tree lies inside the cone of its root cut at its first empty level.
pub fn cone_confined(tree: &MonotoneTree) -> bool {
    let r = tree.root();
    let first_empty = (1..).find(|&m| tree.level_profile(m) == 0).unwrap_or(i64::MAX);
    tree.vertices().iter().all(|&v| crate::lattice::in_cone(r, v) && v.y - r.y < first_empty)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vx(x: i64, y: i64) -> Vertex {
        Vertex::new(x, y).unwrap()
    }

    fn path_tree(h: i64) -> MonotoneTree {
        let edges = (0..h).map(|i| vx(i, i).edge(Dir::Right));
        MonotoneTree::from_edges(Vertex::ORIGIN, edges).unwrap()
    }

    #[test]
    fn slim_examples() {
        assert!(slim_levels(&MonotoneTree::new(Vertex::ORIGIN), &SlimParams::new(3.0).unwrap()).is_empty());
        assert_eq!(slim_levels(&path_tree(5), &SlimParams::new(2.0).unwrap()), vec![1, 2, 3, 4, 5]);
        let wide = MonotoneTree::from_edges(
            Vertex::ORIGIN,
            [Vertex::ORIGIN.edge(Dir::Left), Vertex::ORIGIN.edge(Dir::Right), vx(1, 1).edge(Dir::Right)],
        )
        .unwrap();
        assert_eq!(slim_levels(&wide, &SlimParams::new(f64::INFINITY).unwrap()), vec![1, 2]);
        assert_eq!(slim_levels(&wide, &SlimParams::new(2.0).unwrap()), vec![2]);
        assert!((slim_fraction(&wide, &SlimParams::new(2.0).unwrap()) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn slim_params_from_density() {
        let p = SlimParams::from_density(0.25, 0.5).unwrap();
        assert_eq!(p.d, 8.0);
        assert!(SlimParams::from_density(0.0, 0.5).is_err());
        assert!(SlimParams::new(0.0).is_err());
    }

    #[test]
    fn unit_triangle_has_six_points() {
        // Slice {(1,1)}: flanks (-1,1), (3,1), apex (1,3).
        let t = lattice_triangle(vx(-1, 1), vx(3, 1), vx(1, 3));
        assert_eq!(t, vec![vx(-1, 1), vx(1, 1), vx(3, 1), vx(0, 2), vx(2, 2), vx(1, 3)]);
    }

    #[test]
    fn flank_bound_errors_and_trivial_pass() {
        assert!(matches!(flank_bound_test(&[1.0; 99], 4, 2.0), Err(Error::TooFewSamples { .. })));
        assert!(flank_bound_test(&[1.0; 100], 4, 1.0).is_err());
        let all_exceed = vec![1e9; 200];
        let r = flank_bound_test(&all_exceed, 4, 1.01).unwrap();
        assert!(r.pass);
        assert_eq!(r.frequency, 1.0);
        let r = flank_bound_test(&all_exceed, 4, 4.0).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn survival_examples() {
        let zeros = vec![Height::Finite(0); 10];
        assert_eq!(tail_height_estimate(&zeros, &[1])[0].survival, 0.0);
        let hs = [Height::Finite(1), Height::Finite(3), Height::Censored(8), Height::Finite(0)];
        let s = tail_height_estimate(&hs, &[0, 1, 2, 3, 8, 9]);
        let p: Vec<f64> = s.iter().map(|p| p.survival).collect();
        assert_eq!(p, vec![1.0, 0.75, 0.5, 0.5, 0.25, 0.0]);
        assert!(p.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(truncated_mean_height(&hs), 3.0);
    }

    #[test]
    fn markov_holds_on_samples() {
        let xs = [0, 1, 1, 2, 5, 9];
        let (tail, bound) = markov_check(&xs, 3.0);
        assert!(tail <= bound);
    }

    #[test]
    fn path_tree_is_confined() {
        let t = path_tree(4);
        assert!(cone_confined(&t));
        let (l, r) = flanking_rays(&t, 40, 10).unwrap();
        assert_eq!(l, vx(-2, 0));
        assert_eq!(r, vx(10, 0));
    }
}

//! Coupling of Stretch IDLA with the FPP forest.
//!
//! Every site `x` receives one ring per finite monotone path `γ` from `x`
//! inside `T̂(x) ∪ ∂T̂(x)`. A path inside the tree rings once, at its length
//! `λ(γ)`, and its particle walks `γ`. A path ending with a boundary edge `e`
//! rings at `λ(γ)` and again at every arrival of an independent Poisson clock
//! of the same rate as `ω(e)`, restarted at `λ(γ)`; those particles always
//! vanish because the head of `e` is claimed earlier by its geodesic.
//! Replaying the rings through the particle rules reproduces the forest, and
//! the ring stream at each site is a rate-1 Poisson process.

use std::cmp::Ordering;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fpp::{build_forest, weight_from_uniform, GeodesicForest, WeightField, WeightProfile};
use crate::lattice::{Dir, Edge, Vertex, Window};
use crate::rng::{counter_hash, unit_f64, Domain};
use crate::sidla::{Engine, Outcome, SidlaState};
use crate::view::ForestView;
use crate::Scalar;

/// Rings at a site are complete this far past the last gap start, so the
/// chance of missing the closing ring of a gap is `e^-40`.
pub const GAP_MARGIN: f64 = 40.0;

/// Independent per-edge Poisson clocks with the rate of the edge weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuxClockField {
    pub seed: u64,
    pub window: Window,
    pub profile: WeightProfile,
}

impl AuxClockField {
    pub fn new(seed: u64, window: Window, profile: WeightProfile) -> Self {
        Self { seed, window, profile }
    }

    pub fn for_field(field: &WeightField) -> Self {
        Self::new(field.seed, field.window, field.profile)
    }

    /// Arrival times of the clock on `e`, restarted at `start`, up to `until`.
    pub fn arrivals<T: Scalar>(&self, e: Edge, start: T, until: T) -> Vec<T> {
        let t = self.window.canonicalize(e.tail);
        let mut out = Vec::new();
        let mut time = start;
        for k in 0u64.. {
            let u = unit_f64(counter_hash(
                self.seed,
                Domain::AuxClock,
                &[t.x as u64, t.y as u64, e.dir.index() as u64, k],
            ));
            time = time + weight_from_uniform::<T>(self.profile, e.level(), u);
            if time > until {
                break;
            }
            out.push(time);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RingKind {
    Interior,
    BoundaryRepeat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledRing<T> {
    pub site: Vertex,
    pub time: T,
    /// Canonical edges from the site, in walking order.
    pub path: Arc<[Edge]>,
    pub kind: RingKind,
}

impl<T: Scalar> CoupledRing<T> {
    pub fn last_edge(&self) -> Edge {
        *self.path.last().expect("coupled paths are nonempty")
    }
}

fn ring_order<T: Scalar>(a: &CoupledRing<T>, b: &CoupledRing<T>) -> Ordering {
    a.time
        .partial_cmp(&b.time)
        .unwrap_or(Ordering::Equal)
        .then(a.kind.cmp(&b.kind))
        .then(a.site.x.cmp(&b.site.x))
        .then(a.path.len().cmp(&b.path.len()))
}

/// All coupled rings up to `horizon`, globally sorted. Repeat arrivals on
/// boundary edges are generated only up to `repeat_until` (capped at
/// `horizon`), since they never change the state.
pub fn generate_rings<T: Scalar>(
    forest: &GeodesicForest<T>,
    aux: &AuxClockField,
    horizon: T,
    repeat_until: T,
) -> Result<Vec<CoupledRing<T>>> {
    let max_dist = forest.max_dist();
    if horizon < max_dist {
        return Err(Error::HorizonTooSmall {
            horizon: horizon.to_f64().unwrap_or(f64::NAN),
            max_dist: max_dist.to_f64().unwrap_or(f64::NAN),
        });
    }
    let repeat_until = repeat_until.min(horizon);
    let window = forest.window();
    let field = forest.field();
    let top = window.height() as i64;
    let mut rings = Vec::new();
    for site in window.sites() {
        let mut stack: Vec<(Vertex, Vec<Edge>, T)> = vec![(site, Vec::new(), T::zero())];
        while let Some((v, path, lambda)) = stack.pop() {
            if v.y >= top {
                continue;
            }
            for d in Dir::BOTH {
                let e = v.edge(d);
                let mut next_path = path.clone();
                next_path.push(e);
                let time = lambda + field.weight::<T>(e);
                let head = window.canonicalize(e.head());
                if forest.parent_dir(head) == Some(d) {
                    let shared: Arc<[Edge]> = next_path.clone().into();
                    rings.push(CoupledRing { site, time, path: shared, kind: RingKind::Interior });
                    stack.push((head, next_path, time));
                } else if time <= horizon {
                    let shared: Arc<[Edge]> = next_path.into();
                    for t in std::iter::once(time).chain(aux.arrivals(e, time, repeat_until)) {
                        rings.push(CoupledRing { site, time: t, path: shared.clone(), kind: RingKind::BoundaryRepeat });
                    }
                }
            }
        }
    }
    rings.sort_by(ring_order);
    Ok(rings)
}

/// Plays coupled rings through the particle rules. Each particle walks its
/// assigned path; it extends if the last edge leads to a free vertex and
/// vanishes otherwise.
pub fn replay<T: Scalar>(rings: &[CoupledRing<T>], window: Window) -> Result<SidlaState<T>> {
    let mut state = SidlaState::new(window, Engine::Replay);
    for ring in rings {
        let site = window.site_index(ring.site);
        let (last, prefix) = ring.path.split_last().expect("coupled paths are nonempty");
        for &e in prefix {
            if !state.has_tree_edge(e) || state.owner(e.head()) != Some(site) {
                return Err(Error::IllegalRing {
                    site: ring.site.x,
                    time: ring.time.to_f64().unwrap_or(f64::NAN),
                    edge: e,
                });
            }
        }
        let outcome = if state.is_occupied(last.head()) { Outcome::Vanish } else { Outcome::Extend(*last) };
        if let Outcome::Extend(e) = outcome {
            state.occupy(e, ring.time);
        }
        state.log_ring(ring.site, ring.time, outcome);
    }
    Ok(state)
}

/// Successive time differences between the rings at `site`.
pub fn interring_gaps<T: Scalar>(rings: &[CoupledRing<T>], site: Vertex) -> Result<Vec<T>> {
    let times = site_times(rings, site);
    if times.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: times.len() });
    }
    Ok(times.windows(2).map(|w| w[1] - w[0]).collect())
}

/// Gaps following each ring at `site` that occurs no later than `start_limit`.
/// Choosing gaps by the time of their opening ring keeps each one an
/// untruncated draw, provided the ring list is complete well past the limit.
pub fn gaps_opened_before<T: Scalar>(rings: &[CoupledRing<T>], site: Vertex, start_limit: T) -> Vec<T> {
    site_times(rings, site).windows(2).filter(|w| w[0] <= start_limit).map(|w| w[1] - w[0]).collect()
}

fn site_times<T: Scalar>(rings: &[CoupledRing<T>], site: Vertex) -> Vec<T> {
    let mut times: Vec<T> = rings.iter().filter(|r| r.site == site).map(|r| r.time).collect();
    times.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    times
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingOptions {
    pub profile: WeightProfile,
    /// Horizon as a multiple of the maximal forest distance.
    pub horizon_factor: f64,
    /// Gaps are collected from rings opened before this time.
    pub gap_window: f64,
}

impl Default for CouplingOptions {
    fn default() -> Self {
        Self { profile: WeightProfile::Stretch, horizon_factor: 1.5, gap_window: 256.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingReport<T> {
    pub seed: u64,
    pub window: Window,
    pub forest_equal: bool,
    /// Vertices whose owner, parent or arrival time differ.
    pub mismatches: usize,
    pub max_dist: T,
    pub horizon: T,
    pub interior_rings: usize,
    pub boundary_rings: usize,
    /// Boundary-repeat particles that extended (zero when the coupling holds).
    pub boundary_extends: usize,
    pub gaps: Vec<(Vertex, T)>,
    pub censored_count: usize,
}

/// Builds the forest, generates and replays the coupled rings, and compares.
pub fn verify_coupling<T: Scalar>(seed: u64, window: Window, options: &CouplingOptions) -> Result<CouplingReport<T>> {
    if !(options.horizon_factor > 0.0) {
        return Err(Error::InvalidParameter(format!("horizon factor {}", options.horizon_factor)));
    }
    let field = WeightField::new(seed, options.profile, window);
    let forest = build_forest::<T>(&field)?;
    let aux = AuxClockField::for_field(&field);
    let max_dist = forest.max_dist();
    let horizon = max_dist * T::from_f64(options.horizon_factor).expect("finite factor");
    let gap_window = T::from_f64(options.gap_window).expect("finite gap window");
    let margin = T::from_f64(GAP_MARGIN).expect("finite margin");
    let rings = generate_rings(&forest, &aux, horizon, gap_window + margin)?;
    let state = replay(&rings, window)?;

    let mismatches = (window.width() as usize..window.vertex_count())
        .map(|i| window.vertex_at(i))
        .filter(|&v| {
            state.owner(v) != forest.owner(v)
                || state.parent_dir(v) != forest.parent_dir(v)
                || state.arrival(v) != forest.arrival(v)
        })
        .count();

    let boundary_extends = rings
        .iter()
        .zip(&state.ring_log)
        .filter(|(r, rec)| r.kind == RingKind::BoundaryRepeat && matches!(rec.outcome, Some(Outcome::Extend(_))))
        .count();

    let top = window.height() as i64;
    let start_limit = gap_window.min(horizon - margin);
    let mut gaps = Vec::new();
    for site in window.sites() {
        // The ring rate drops below 1 once the tree owns a vertex on the cap.
        let cap_time = rings
            .iter()
            .filter(|r| r.site == site && r.kind == RingKind::Interior && r.last_edge().level() == top)
            .map(|r| r.time)
            .fold(T::infinity(), T::min);
        let limit = start_limit.min(cap_time);
        gaps.extend(gaps_opened_before(&rings, site, limit).into_iter().map(|g| (site, g)));
    }

    Ok(CouplingReport {
        seed,
        window,
        forest_equal: mismatches == 0,
        mismatches,
        max_dist,
        horizon,
        interior_rings: rings.iter().filter(|r| r.kind == RingKind::Interior).count(),
        boundary_rings: rings.iter().filter(|r| r.kind == RingKind::BoundaryRepeat).count(),
        boundary_extends,
        gaps,
        censored_count: forest.censored_roots().len(),
    })
}

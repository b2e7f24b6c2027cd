//! Direct simulation of Stretch IDLA on a window.
//!
//! Boundary sites carry rate-1 Poisson clocks. A ring releases a particle at
//! the site; it walks up its own tree choosing Left/Right with probability
//! 1/2 and either claims the first free vertex it steps onto (adding that
//! edge to the tree) or vanishes when it hits an occupied vertex through a
//! non-tree edge. Particles stepping above the cap `M` vanish.
//!
//! Two engines produce the same law. [`run_until_covered`] plays every ring
//! and every coin. [`run_jump`] samples only the rings that extend a tree:
//! a free-headed boundary edge at level `h` of the ringing tree is claimed at
//! rate `2^-h`, so the extension process is a Markov chain whose jump rates
//! are read off the current frontier. Vanishing rings change nothing and are
//! skipped. At large heights this is the only feasible option, since the
//! expected number of rings grows like `2^M`.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Dir, Edge, Vertex, Window};
use crate::rng::{stream, Domain};
use crate::view::ForestView;
use crate::Scalar;

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Extend(Edge),
    Vanish,
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Extend(_) => "extend",
            Outcome::Vanish => "vanish",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingEvent<T> {
    pub site: Vertex,
    pub time: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingRecord<T> {
    pub site: Vertex,
    pub time: T,
    pub outcome: Option<Outcome>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Every ring and coin flip is simulated.
    Rings,
    /// Only extending rings are sampled.
    Jump,
    /// Rings supplied by the FPP coupling.
    Replay,
}

/// Source of fair Left/Right choices for walking particles.
pub trait CoinSource {
    fn coin(&mut self) -> Dir;
}

impl<R: RngCore> CoinSource for R {
    fn coin(&mut self) -> Dir {
        if self.gen::<bool>() {
            Dir::Right
        } else {
            Dir::Left
        }
    }
}

/// Fixed coin sequence; panics when exhausted.
#[derive(Debug, Clone)]
pub struct ScriptedCoins {
    coins: Vec<Dir>,
    next: usize,
}

impl ScriptedCoins {
    pub fn new(coins: impl Into<Vec<Dir>>) -> Self {
        Self { coins: coins.into(), next: 0 }
    }
}

impl CoinSource for ScriptedCoins {
    fn coin(&mut self) -> Dir {
        let d = self.coins[self.next];
        self.next += 1;
        d
    }
}

/// Superposition of `n` rate-1 clocks: global Exp(n) gaps, uniform site.
#[derive(Debug, Clone, Copy)]
pub struct RingClock {
    pub sites: u32,
}

impl RingClock {
    /// Returns `(gap, site index)`.
    pub fn next(&self, rng: &mut impl RngCore) -> (f64, usize) {
        let u: f64 = rng.gen();
        let gap = -(-u).ln_1p() / self.sites as f64;
        (gap, rng.gen_range(0..self.sites as usize))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SidlaState<T> {
    window: Window,
    owner: Vec<u32>,
    parent: Vec<Option<Dir>>,
    time: Vec<T>,
    censored: Vec<bool>,
    occupied: usize,
    pub clock: T,
    pub rings: u64,
    pub ring_log: Vec<RingRecord<T>>,
    pub engine: Engine,
}

impl<T: Scalar> SidlaState<T> {
    /// Boundary sites occupied at time 0, everything else free.
    pub fn new(window: Window, engine: Engine) -> Self {
        let n = window.vertex_count();
        let w = window.width() as usize;
        let mut owner = vec![NONE; n];
        for (i, o) in owner.iter_mut().enumerate().take(w) {
            *o = i as u32;
        }
        Self {
            window,
            owner,
            parent: vec![None; n],
            time: vec![T::zero(); n],
            censored: vec![false; w],
            occupied: 0,
            clock: T::zero(),
            rings: 0,
            ring_log: Vec::new(),
            engine,
        }
    }

    pub fn is_occupied(&self, v: Vertex) -> bool {
        self.owner[self.window.index(v)] != NONE
    }

    /// Occupancy time; `None` for free vertices.
    pub fn occupancy_time(&self, v: Vertex) -> Option<T> {
        self.is_occupied(v).then(|| self.time[self.window.index(v)])
    }

    pub fn occupied_count(&self) -> usize {
        self.occupied
    }

    pub fn fully_covered(&self) -> bool {
        self.occupied == self.window.interior_count()
    }

    /// Site indices of trees that reached the cap.
    pub fn censored(&self) -> Vec<usize> {
        self.censored.iter().enumerate().filter(|(_, &c)| c).map(|(i, _)| i).collect()
    }

    /// Whether `e` (any lift) is an edge of the tree owning its tail.
    pub fn has_tree_edge(&self, e: Edge) -> bool {
        let head = e.head();
        self.window.contains_level(head.y) && self.parent[self.window.index(head)] == Some(e.dir)
    }

    /// Advances the clock to the next ring and logs it.
    pub fn next_ring(&mut self, rng: &mut impl RngCore) -> RingEvent<T> {
        let (gap, site) = RingClock { sites: self.window.width() }.next(rng);
        self.clock = self.clock + T::from_f64(gap).expect("finite gap");
        self.rings += 1;
        let ev = RingEvent { site: self.window.site(site), time: self.clock };
        self.ring_log.push(RingRecord { site: ev.site, time: ev.time, outcome: None });
        ev
    }

    /// Walk of a particle released at `root`; does not modify the state.
    pub fn walk_particle(&self, root: Vertex, coins: &mut impl CoinSource) -> Result<Outcome> {
        if !root.is_boundary() {
            return Err(Error::NotBoundary(root));
        }
        let mut cur = self.window.canonicalize(root);
        loop {
            let d = coins.coin();
            let next = cur.step(d);
            if next.y > self.window.height() as i64 {
                return Ok(Outcome::Vanish);
            }
            let i = self.window.index(next);
            if self.parent[i] == Some(d) {
                cur = self.window.canonicalize(next);
            } else if self.owner[i] == NONE {
                return Ok(Outcome::Extend(cur.edge(d)));
            } else {
                return Ok(Outcome::Vanish);
            }
        }
    }

    /// Claims the head of `e` for the tree owning its tail.
    pub(crate) fn occupy(&mut self, e: Edge, time: T) {
        let head = e.head();
        let hi = self.window.index(head);
        debug_assert_eq!(self.owner[hi], NONE);
        let site = self.owner[self.window.index(e.tail)];
        debug_assert_ne!(site, NONE);
        self.owner[hi] = site;
        self.parent[hi] = Some(e.dir);
        self.time[hi] = time;
        self.occupied += 1;
        if head.y == self.window.height() as i64 {
            self.censored[site as usize] = true;
        }
    }

    /// Checked version of `occupy`, for building configurations by hand.
    pub fn claim(&mut self, e: Edge, time: T) -> Result<()> {
        let head = e.head();
        if e.tail.y < 0 || !self.window.contains_level(head.y) {
            return Err(Error::EdgeOutOfRange(e));
        }
        if !self.is_occupied(e.tail) || self.is_occupied(head) {
            return Err(Error::InvalidParameter(format!("edge {e} cannot be claimed")));
        }
        self.occupy(e, time);
        Ok(())
    }

    /// Applies the outcome of the most recent ring.
    pub fn resolve(&mut self, outcome: Outcome) {
        if let Outcome::Extend(e) = outcome {
            self.occupy(e, self.clock);
        }
        if let Some(last) = self.ring_log.last_mut() {
            last.outcome = Some(outcome);
        }
    }

    /// One ring: clock, walk, update.
    pub fn step(&mut self, clock: &mut impl RngCore, coins: &mut impl CoinSource) -> RingRecord<T> {
        let ev = self.next_ring(clock);
        let outcome = self.walk_particle(ev.site, coins).expect("ring sites are boundary vertices");
        self.resolve(outcome);
        *self.ring_log.last().expect("ring just logged")
    }

    /// Outcomes appended by `step`/`resolve`, including bookkeeping of an
    /// externally timed ring.
    pub(crate) fn log_ring(&mut self, site: Vertex, time: T, outcome: Outcome) {
        self.rings += 1;
        self.clock = time;
        self.ring_log.push(RingRecord { site, time, outcome: Some(outcome) });
    }
}

impl<T: Scalar> ForestView<T> for SidlaState<T> {
    fn window(&self) -> Window {
        self.window
    }

    fn owner(&self, v: Vertex) -> Option<usize> {
        match self.owner[self.window.index(v)] {
            NONE => None,
            s => Some(s as usize),
        }
    }

    fn parent_dir(&self, v: Vertex) -> Option<Dir> {
        if !self.window.contains_level(v.y) {
            return None;
        }
        self.parent[self.window.index(v)]
    }

    fn arrival(&self, v: Vertex) -> Option<T> {
        self.occupancy_time(v)
    }
}

/// Ring-by-ring simulation until every vertex with `y <= M` is occupied.
/// Gives up after `10^4 · W · M` rings.
pub fn run_until_covered<T: Scalar>(window: Window, seed: u64) -> Result<SidlaState<T>> {
    let mut state = SidlaState::new(window, Engine::Rings);
    let mut clock = stream(seed, Domain::SidlaClock);
    let mut coins = stream(seed, Domain::SidlaCoin);
    let limit = 10_000u64 * window.width() as u64 * window.height() as u64;
    while !state.fully_covered() {
        if state.rings >= limit {
            return Err(Error::NotCovered {
                rings: state.rings,
                occupied: state.occupied,
                total: window.interior_count(),
            });
        }
        state.step(&mut clock, &mut coins);
    }
    Ok(state)
}

/// Frontier of extendable edges bucketed by level, with O(1) insert/remove.
struct Frontier {
    window: Window,
    levels: Vec<Vec<u32>>,
    pos: Vec<u32>,
}

impl Frontier {
    fn new(window: Window) -> Self {
        let tails = window.width() as usize * window.height() as usize;
        Self { window, levels: vec![Vec::new(); window.height() as usize + 1], pos: vec![NONE; 2 * tails] }
    }

    fn id(&self, e: Edge) -> usize {
        2 * self.window.index(e.tail) + e.dir.index()
    }

    fn edge(&self, id: u32) -> Edge {
        self.window.vertex_at(id as usize / 2).edge(Dir::from_index(id as usize % 2))
    }

    fn insert(&mut self, e: Edge) {
        let id = self.id(e);
        if self.pos[id] == NONE {
            let level = &mut self.levels[e.level() as usize];
            self.pos[id] = level.len() as u32;
            level.push(id as u32);
        }
    }

    fn remove(&mut self, e: Edge) {
        let id = self.id(e);
        let p = self.pos[id];
        if p == NONE {
            return;
        }
        let level = &mut self.levels[e.level() as usize];
        let last = *level.last().expect("nonempty level");
        level.swap_remove(p as usize);
        if last as usize != id {
            self.pos[last as usize] = p;
        }
        self.pos[id] = NONE;
    }

    /// Total claim rate `Σ_h |level h| 2^-h`.
    fn rate(&self) -> f64 {
        self.levels.iter().enumerate().skip(1).map(|(h, l)| l.len() as f64 * (-(h as f64)).exp2()).sum()
    }
}

/// Samples only the extending rings; same law as [`run_until_covered`].
pub fn run_jump<T: Scalar>(window: Window, seed: u64) -> SidlaState<T> {
    let mut state = SidlaState::new(window, Engine::Jump);
    let mut clock = stream(seed, Domain::SidlaClock);
    let mut coins = stream(seed, Domain::SidlaCoin);
    let mut frontier = Frontier::new(window);
    for s in window.sites() {
        for d in Dir::BOTH {
            frontier.insert(s.edge(d));
        }
    }
    let top = window.height() as i64;
    while !state.fully_covered() {
        let rate = frontier.rate();
        let u: f64 = clock.gen();
        let gap = -(-u).ln_1p() / rate;
        let time = state.clock + T::from_f64(gap).expect("finite gap");
        let mut target = coins.gen::<f64>() * rate;
        let mut level = 0;
        for (h, l) in frontier.levels.iter().enumerate().skip(1) {
            let r = l.len() as f64 * (-(h as f64)).exp2();
            if r > 0.0 {
                level = h;
                if target < r {
                    break;
                }
                target -= r;
            }
        }
        let bucket = &frontier.levels[level];
        let e = frontier.edge(bucket[coins.gen_range(0..bucket.len())]);
        let head = window.canonicalize(e.head());
        let site = window.site(state.owner[window.index(e.tail)] as usize);
        state.occupy(e, time);
        state.log_ring(site, time, Outcome::Extend(e));
        for d in Dir::BOTH {
            frontier.remove(head.pred(d).edge(d));
            if head.y < top && !state.is_occupied(head.step(d)) {
                frontier.insert(head.edge(d));
            }
        }
    }
    state
}

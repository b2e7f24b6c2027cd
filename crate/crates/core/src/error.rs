use thiserror::Error;

use crate::lattice::{Edge, Vertex};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid window W={width} M={height}: need W >= M + 1 and M >= 1")]
    InvalidWindow { width: u32, height: u32 },

    #[error("invalid vertex ({x},{y}): need y >= 0 and x + y even")]
    InvalidVertex { x: i64, y: i64 },

    #[error("level {level} outside window (0..={max})")]
    LevelOutOfRange { level: i64, max: u32 },

    #[error("edge {0} is outside the simulated window")]
    EdgeOutOfRange(Edge),

    #[error("vertex {0} is not a boundary vertex")]
    NotBoundary(Vertex),

    #[error("weight scale at level {level} overflows the working precision")]
    ScalarRange { level: u32 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("horizon {horizon} is below the maximal forest distance {max_dist}")]
    HorizonTooSmall { horizon: f64, max_dist: f64 },

    #[error("illegal coupled ring at site {site} time {time}: path prefix edge {edge} not in tree")]
    IllegalRing { site: i64, time: f64, edge: Edge },

    #[error("window not covered after {rings} rings ({occupied}/{total} vertices occupied)")]
    NotCovered { rings: u64, occupied: usize, total: usize },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("sample contains a nonpositive value {0}")]
    NonPositiveSample(f64),

    #[error("histogram bins do not match ({0} vs {1})")]
    BinMismatch(usize, usize),

    #[error("level {0} of the tree is empty")]
    EmptyLevel(u32),

    #[error("flanks at level {level} collide across the periodic boundary")]
    WrapCollision { level: u32 },

    #[error("max_edges {0} exceeds the enumeration guard of 12")]
    EnumerationGuard(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

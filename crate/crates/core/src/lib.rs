//! Stretch IDLA on the rotated upper half-plane lattice.
//!
//! The crate simulates the particle system (boundary Poisson clocks emitting
//! monotone walkers that extend their own tree or vanish) together with its
//! first-passage-percolation dual, where every edge carries an exponential
//! weight whose rate halves with each level. The two pictures are tied
//! together by an explicit coupling that replays FPP arrival times as
//! particle rings.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the bottom of this file fix the working precision to `f64`, which is what
//! the command-line driver uses. The shell identity in
//! [`analysis::shells`] is checked in exact dyadic arithmetic instead.

pub mod analysis;
pub mod coupling;
pub mod error;
pub mod fpp;
pub mod io;
pub mod lattice;
pub mod render;
pub mod rng;
pub mod sidla;
pub mod view;

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FromPrimitive, ToPrimitive};

pub use error::{Error, Result};
pub use fpp::{build_forest, GeodesicForest, WeightField, WeightProfile};
pub use lattice::{Dir, Edge, Vertex, Window};
pub use view::ForestView;

/// Floating-point type used for weights, distances and clock times.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

pub type Forest = fpp::GeodesicForest<f64>;
pub type Forest32 = fpp::GeodesicForest<f32>;
pub type State = sidla::SidlaState<f64>;
pub type Ring = coupling::CoupledRing<f64>;
pub type Report = coupling::CouplingReport<f64>;

//! Exact and statistical checks on forests and trees.

pub mod profile;
pub mod shells;
pub mod stats;
pub mod tree;

pub use profile::{
    cone_confined, coverage_partition_check, flank_bound_test, flanking_rays, flanks, lattice_triangle,
    level_profile, markov_check, slim_fraction, slim_levels, tail_height_estimate, tree_height,
    truncated_mean_height, FlankBoundReport, FlankInfo, SlimParams, SurvivalPoint,
};
pub use shells::{shell_identity_check, shell_sum, sweep_shell_identity, Dyadic, ShellScalar, ShellSweep};
pub use stats::{chi_square_compare, histogram, ks_test_exp1, lag1_autocorrelation, ChiSquareResult, TestResult};
pub use tree::{enumerate_monotone_trees, Height, MonotoneTree, ShellProfile};

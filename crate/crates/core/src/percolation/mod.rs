//! Percolation statistics over meeting and knowledge networks.

mod components;
mod degree;
mod metrics;
mod powerlaw;
mod threshold;

pub use components::{
    giant_cluster, largest_strong_component, GiantCluster, GrowingComponents, UnionFind,
};
pub use degree::{
    degree_stats, heterogeneity_condition, DegreeMoments, DegreeStats, DegreeSums, Heterogeneity,
};
pub(crate) use degree::heterogeneity_from_sums;
pub use metrics::{
    delta_mk, meeting_rate, mk_level, percolation_point, percolation_points, MetricsRow,
    PercolationPoint,
};
pub(crate) use metrics::ratio;
pub use powerlaw::{degree_distribution_fit, fit_degree_histogram, least_squares, LineFit};
pub use threshold::{detect_threshold, PercolationKind, ThresholdEstimate, BETA_WINDOW, NEAR_ZERO};

//! Collusion-risk analysis: secret-sharing threshold bounds, the
//! hypergeometric model of random selection, and the distance-k worker
//! clique metric.

mod clique;
mod confidence;
mod distances;
mod hypergeom;
mod threshold;

pub use clique::{distance_k_clique, distance_k_clique_unchecked, max_clique, CliqueReport, MAX_DEFAULT_K};
pub use confidence::{order_statistic, two_sided_interval, upper_confidence_bound};
pub use distances::{worker_distance_stats, DistanceBuckets, WorkerDistanceStats};
pub use hypergeom::{collusion_confidence_curve, Hypergeometric};
pub use threshold::{collusion_possible, constraints_ok, t_max, ConstraintCheck, ThresholdBounds};

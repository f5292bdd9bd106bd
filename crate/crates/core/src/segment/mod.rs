//! Market-state segmentation: per-(time, state) scores, the exact
//! switching-penalty path solver and the alternating fit loop.

mod config;
mod estimate;
mod fit;
mod path;
mod score;

pub use config::{ClusteringConfig, ScoringMode};
pub use estimate::{estimate_cluster, ClusterModel};
pub use fit::{block_labels, fit, fit_with_initial_labels, FitOutcome, FitReport};
pub use path::{path_objective, solve_path, StatePath};
pub(crate) use score::score_column as score_column_for;
pub use score::{score_states, ScoreMatrix};

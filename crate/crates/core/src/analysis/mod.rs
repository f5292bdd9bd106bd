//! Post-fit diagnostics.

mod matching;
mod ratio;
mod summary;

pub use matching::{confusion_matrix, hungarian_max, label_agreement, matched_labels};
pub use ratio::{likelihood_ratio, RatioSeries};
pub use summary::{suggest_crisis_bull, summarize, StateStats, StateSummary};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifn::SimilarityMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoringMode {
    /// Quadratic form plus half the log-determinant.
    #[default]
    Likelihood,
    /// Quadratic form only.
    Mahalanobis,
}

impl ScoringMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ScoringMode::Likelihood => "likelihood",
            ScoringMode::Mahalanobis => "mahalanobis",
        }
    }
}

impl std::str::FromStr for ScoringMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "likelihood" => Ok(ScoringMode::Likelihood),
            "mahalanobis" => Ok(ScoringMode::Mahalanobis),
            other => Err(format!("unknown scoring mode {other:?}")),
        }
    }
}

/// Smallest allowed explicit `min_cluster_size`.
pub const MIN_CLUSTER_FLOOR: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringConfig {
    /// Number of states K.
    pub clusters: usize,
    /// Penalty subtracted from the objective for every change of state.
    pub gamma: f64,
    pub scoring_mode: ScoringMode,
    pub similarity_mode: SimilarityMode,
    pub max_iterations: usize,
    /// Seeds the random restarts; the primary run is deterministic anyway.
    pub seed: u64,
    /// `None` resolves to `max(n + 1, 5)` for an n-asset panel.
    pub min_cluster_size: Option<usize>,
    pub standardize: bool,
    /// Extra runs from random contiguous initial partitions.
    pub restarts: usize,
}

impl Default for ClusteringConfig {
    fn default() -> Self {
        Self {
            clusters: 4,
            gamma: 100.0,
            scoring_mode: ScoringMode::Likelihood,
            similarity_mode: SimilarityMode::Signed,
            max_iterations: 50,
            seed: 0,
            min_cluster_size: None,
            standardize: false,
            restarts: 0,
        }
    }
}

impl ClusteringConfig {
    pub fn validate(&self) -> Result<()> {
        if self.clusters < 2 {
            return Err(Error::InvalidConfig(format!(
                "clusters must be at least 2, got {}",
                self.clusters
            )));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "gamma must be finite and non-negative, got {}",
                self.gamma
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig(
                "max_iterations must be positive".into(),
            ));
        }
        if let Some(m) = self.min_cluster_size {
            if m < MIN_CLUSTER_FLOOR {
                return Err(Error::InvalidConfig(format!(
                    "min_cluster_size must be at least {MIN_CLUSTER_FLOOR}, got {m}"
                )));
            }
        }
        Ok(())
    }

    pub fn resolved_min_cluster_size(&self, n_assets: usize) -> usize {
        self.min_cluster_size
            .unwrap_or((n_assets + 1).max(MIN_CLUSTER_FLOOR))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_reference_settings() {
        let c = ClusteringConfig::default();
        assert_eq!(c.clusters, 4);
        assert_eq!(c.gamma, 100.0);
        assert_eq!(c.max_iterations, 50);
        assert!(!c.standardize);
        assert!(c.validate().is_ok());
        assert_eq!(c.resolved_min_cluster_size(10), 11);
        assert_eq!(c.resolved_min_cluster_size(4), 5);
    }

    #[test]
    fn rejects_invalid() {
        let bad = [
            ClusteringConfig {
                clusters: 1,
                ..Default::default()
            },
            ClusteringConfig {
                gamma: -1.0,
                ..Default::default()
            },
            ClusteringConfig {
                gamma: f64::NAN,
                ..Default::default()
            },
            ClusteringConfig {
                max_iterations: 0,
                ..Default::default()
            },
            ClusteringConfig {
                min_cluster_size: Some(4),
                ..Default::default()
            },
        ];
        for c in bad {
            assert!(
                matches!(c.validate(), Err(Error::InvalidConfig(_))),
                "{c:?}"
            );
        }
    }
}

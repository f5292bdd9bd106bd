use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{ClusterModel, ScoringMode};
use crate::error::{Error, Result};
use crate::ifn::quadratic_form;
use crate::ingest::ReturnsPanel;

/// T × K matrix of unpenalized per-point scores. The switching penalty is
/// applied by the path solver.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    values: DMatrix<f64>,
}

impl ScoreMatrix {
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        for t in 0..values.nrows() {
            for k in 0..values.ncols() {
                if !values[(t, k)].is_finite() {
                    return Err(Error::NonFiniteScore { t, k });
                }
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.values.nrows() == 0
    }

    pub fn states(&self) -> usize {
        self.values.ncols()
    }

    pub fn get(&self, t: usize, k: usize) -> f64 {
        self.values[(t, k)]
    }
}

/// Scores of every time point under one model.
pub(crate) fn score_column(
    returns: &ReturnsPanel,
    model: &ClusterModel,
    mode: ScoringMode,
) -> Result<Vec<f64>> {
    let n = returns.n_assets();
    if model.mu.len() != n || model.precision.n() != n {
        return Err(Error::Dimension {
            expected: n,
            found: model.mu.len(),
        });
    }
    let half_log_det = match mode {
        ScoringMode::Likelihood => 0.5 * model.precision.log_det(),
        ScoringMode::Mahalanobis => 0.0,
    };
    let mut d = vec![0.0; n];
    let x = returns.values();
    (0..returns.len())
        .map(|t| {
            for (i, di) in d.iter_mut().enumerate() {
                *di = x[(t, i)] - model.mu[i];
            }
            let q = quadratic_form(&model.precision, &d)?;
            let s = -0.5 * q + half_log_det;
            if s.is_finite() {
                Ok(s)
            } else {
                Err(Error::NonFiniteScore { t, k: model.label })
            }
        })
        .collect()
}

/// `values[t][k] = −½ (X_t − μ_k)ᵀ J_k (X_t − μ_k) + ½ log|J_k|`, with the
/// log-determinant term dropped in Mahalanobis mode.
pub fn score_states(
    returns: &ReturnsPanel,
    models: &[ClusterModel],
    mode: ScoringMode,
) -> Result<ScoreMatrix> {
    if models.len() < 2 {
        return Err(Error::InvalidConfig(format!(
            "need at least 2 models, got {}",
            models.len()
        )));
    }
    let columns: Vec<Result<Vec<f64>>> = models
        .par_iter()
        .map(|m| score_column(returns, m, mode))
        .collect();
    let columns = columns.into_iter().collect::<Result<Vec<_>>>()?;
    let values = DMatrix::from_fn(returns.len(), models.len(), |t, k| columns[k][t]);
    ScoreMatrix::new(values)
}

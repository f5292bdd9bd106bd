use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::ingest::ReturnsPanel;
use crate::segment::{ClusterModel, ScoringMode};

/// Pointwise log-likelihood difference between two states. Positive values
/// mean `state_a` explains the observation better.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioSeries {
    pub dates: Vec<NaiveDate>,
    pub values: Vec<f64>,
    pub state_a: usize,
    pub state_b: usize,
}

/// `score(t, a) − score(t, b)` in likelihood mode, no switching penalty.
pub fn likelihood_ratio(
    returns: &ReturnsPanel,
    models: &[ClusterModel],
    a: usize,
    b: usize,
) -> Result<RatioSeries> {
    for label in [a, b] {
        if label >= models.len() {
            return Err(Error::InvalidLabel {
                label,
                states: models.len(),
            });
        }
    }
    if a == b {
        return Err(Error::InvalidConfig(format!(
            "ratio states must differ, got {a} twice"
        )));
    }
    let sa = crate::segment::score_column_for(returns, &models[a], ScoringMode::Likelihood)?;
    let sb = crate::segment::score_column_for(returns, &models[b], ScoringMode::Likelihood)?;
    Ok(RatioSeries {
        dates: returns.dates().to_vec(),
        values: sa.iter().zip(&sb).map(|(x, y)| x - y).collect(),
        state_a: a,
        state_b: b,
    })
}

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::ReturnsPanel;
use crate::segment::StatePath;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateStats {
    pub label: usize,
    pub count: usize,
    pub fraction: f64,
    /// Number of maximal runs of consecutive time points in this state.
    pub runs: usize,
    /// Zero for unoccupied states.
    pub mean_run_length: f64,
    /// Mean of the equal-weight panel return over member dates.
    pub mean_return: f64,
    /// Sample standard deviation of the same; zero below two members.
    pub volatility: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateSummary {
    pub states: Vec<StateStats>,
    pub switches: usize,
    pub length: usize,
}

pub fn summarize(path: &StatePath, returns: &ReturnsPanel, states: usize) -> Result<StateSummary> {
    let labels = &path.labels;
    if labels.len() != returns.len() {
        return Err(Error::Dimension {
            expected: returns.len(),
            found: labels.len(),
        });
    }
    if let Some(&label) = labels.iter().find(|&&l| l >= states) {
        return Err(Error::InvalidLabel { label, states });
    }
    let ew = returns.equal_weight_returns();
    let total = labels.len();
    let mut counts = vec![0usize; states];
    let mut runs = vec![0usize; states];
    let mut sums = vec![0.0; states];
    for (t, &l) in labels.iter().enumerate() {
        counts[l] += 1;
        sums[l] += ew[t];
        if t == 0 || labels[t - 1] != l {
            runs[l] += 1;
        }
    }
    let means: Vec<f64> = (0..states)
        .map(|k| {
            if counts[k] > 0 {
                sums[k] / counts[k] as f64
            } else {
                0.0
            }
        })
        .collect();
    let mut sq = vec![0.0; states];
    for (t, &l) in labels.iter().enumerate() {
        sq[l] += (ew[t] - means[l]).powi(2);
    }
    let stats = (0..states)
        .map(|k| StateStats {
            label: k,
            count: counts[k],
            fraction: if total > 0 {
                counts[k] as f64 / total as f64
            } else {
                0.0
            },
            runs: runs[k],
            mean_run_length: if runs[k] > 0 {
                counts[k] as f64 / runs[k] as f64
            } else {
                0.0
            },
            mean_return: means[k],
            volatility: if counts[k] > 1 {
                (sq[k] / (counts[k] - 1) as f64).sqrt()
            } else {
                0.0
            },
        })
        .collect();
    Ok(StateSummary {
        states: stats,
        switches: labels.windows(2).filter(|w| w[0] != w[1]).count(),
        length: total,
    })
}

/// `(crisis, bull)`: the occupied states with the lowest and highest mean
/// equal-weight return. `None` when fewer than two states are occupied.
pub fn suggest_crisis_bull(summary: &StateSummary) -> Option<(usize, usize)> {
    let occupied: Vec<&StateStats> = summary.states.iter().filter(|s| s.count > 0).collect();
    if occupied.len() < 2 {
        return None;
    }
    let crisis = occupied.iter().min_by(|a, b| {
        a.mean_return
            .total_cmp(&b.mean_return)
            .then(a.label.cmp(&b.label))
    })?;
    let bull = occupied
        .iter()
        .filter(|s| s.label != crisis.label)
        .max_by(|a, b| {
            a.mean_return
                .total_cmp(&b.mean_return)
                .then(b.label.cmp(&a.label))
        })?;
    Some((crisis.label, bull.label))
}

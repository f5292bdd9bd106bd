use serde::{Deserialize, Serialize};

use super::ScoreMatrix;
use crate::error::{Error, Result};

/// One state label per time point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatePath {
    pub labels: Vec<usize>,
    /// `Σ_t score[t][label_t] − γ · switches`.
    pub objective: f64,
    pub switches: usize,
}

pub(crate) fn count_switches(labels: &[usize]) -> usize {
    labels.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Penalized objective of an arbitrary label sequence.
pub fn path_objective(scores: &ScoreMatrix, labels: &[usize], gamma: f64) -> f64 {
    let fit: f64 = labels
        .iter()
        .enumerate()
        .map(|(t, &k)| scores.get(t, k))
        .sum();
    fit - gamma * count_switches(labels) as f64
}

/// Exact maximizer of `Σ_t score[t][k_t] − γ · #{t : k_t ≠ k_{t−1}}` over
/// all K^T label sequences (Viterbi recursion).
///
/// Ties prefer staying in the current state, then the lowest label.
pub fn solve_path(scores: &ScoreMatrix, gamma: f64) -> Result<StatePath> {
    let t_len = scores.len();
    let k_len = scores.states();
    if t_len == 0 || k_len == 0 {
        return Err(Error::EmptyScores);
    }
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "gamma must be finite and non-negative, got {gamma}"
        )));
    }

    let mut value: Vec<f64> = (0..k_len).map(|k| scores.get(0, k)).collect();
    let mut next = vec![0.0; k_len];
    let mut back = vec![0usize; t_len * k_len];
    for t in 1..t_len {
        let (best_prev, best_val) = argmax(&value);
        let switch_val = best_val - gamma;
        for k in 0..k_len {
            let (from, v) = if value[k] >= switch_val {
                (k, value[k])
            } else {
                (best_prev, switch_val)
            };
            back[t * k_len + k] = from;
            next[k] = v + scores.get(t, k);
        }
        std::mem::swap(&mut value, &mut next);
    }

    let mut labels = vec![0usize; t_len];
    labels[t_len - 1] = argmax(&value).0;
    for t in (1..t_len).rev() {
        labels[t - 1] = back[t * k_len + labels[t]];
    }
    let switches = count_switches(&labels);
    let objective = path_objective(scores, &labels, gamma);
    Ok(StatePath {
        labels,
        objective,
        switches,
    })
}

fn argmax(values: &[f64]) -> (usize, f64) {
    let mut best = (0, values[0]);
    for (k, &v) in values.iter().enumerate().skip(1) {
        if v > best.1 {
            best = (k, v);
        }
    }
    best
}

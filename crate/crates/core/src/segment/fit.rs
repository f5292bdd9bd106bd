use std::borrow::Cow;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::path::count_switches;
use super::{estimate_cluster, path_objective, score_states, solve_path};
use super::{ClusterModel, ClusteringConfig, ScoreMatrix, StatePath};
use crate::error::{Error, Result};
use crate::ingest::ReturnsPanel;

/// Passes of the undersized-cluster repair before the fit gives up.
const REPAIR_ATTEMPTS: usize = 2;
const DECREASE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub iterations: usize,
    pub converged: bool,
    /// Iteration (0-based) whose models and path are returned.
    pub best_iteration: usize,
    /// Penalized objective of the optimal path at each iteration.
    pub objective_trajectory: Vec<f64>,
    /// Iterations whose objective fell below the previous one.
    pub objective_decreases: Vec<usize>,
    pub switches: usize,
    pub occupancy: Vec<usize>,
    pub repairs: usize,
    /// Index of the run that won: 0 is the block initialization, `r > 0`
    /// the r-th random restart.
    pub selected_run: usize,
}

#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub models: Vec<ClusterModel>,
    pub path: StatePath,
    pub scores: ScoreMatrix,
    pub report: FitReport,
}

/// `K` contiguous blocks of (almost) equal length covering `0..t`.
pub fn block_labels(t: usize, k: usize) -> Vec<usize> {
    (0..t).map(|i| i * k / t).collect()
}

/// Contiguous blocks of random lengths, each at least `min`, in random
/// label order.
fn random_block_labels(t: usize, k: usize, min: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let extra = t - k * min;
    let mut cuts: Vec<usize> = (0..k - 1).map(|_| rng.random_range(0..=extra)).collect();
    cuts.sort_unstable();
    let mut order: Vec<usize> = (0..k).collect();
    for i in (1..k).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut labels = Vec::with_capacity(t);
    let mut prev = 0;
    for (seg, &label) in order.iter().enumerate() {
        let cut = if seg + 1 < k { cuts[seg] } else { extra };
        labels.extend(std::iter::repeat_n(label, min + cut - prev));
        prev = cut;
    }
    labels
}

fn prepare<'a>(
    returns: &'a ReturnsPanel,
    config: &ClusteringConfig,
) -> Result<(Cow<'a, ReturnsPanel>, usize)> {
    config.validate()?;
    let n = returns.n_assets();
    if n < 4 {
        return Err(Error::InvalidConfig(format!(
            "need at least 4 assets, got {n}"
        )));
    }
    let min = config.resolved_min_cluster_size(n);
    if returns.len() < config.clusters * min {
        return Err(Error::InvalidConfig(format!(
            "infeasible: {} time points cannot hold {} clusters of at least {min}",
            returns.len(),
            config.clusters
        )));
    }
    let panel = if config.standardize {
        Cow::Owned(returns.standardized())
    } else {
        Cow::Borrowed(returns)
    };
    Ok((panel, min))
}

/// Alternates the exact path solver (models fixed) with per-cluster
/// re-estimation (labels fixed) until the labels stop changing.
///
/// Starts from [`block_labels`]; `config.restarts` additional runs start from
/// random contiguous partitions and the best final objective wins. With
/// `config.standardize` the panel is z-scored first, and the returned models
/// live in that space (score against `returns.standardized()`).
pub fn fit(returns: &ReturnsPanel, config: &ClusteringConfig) -> Result<FitOutcome> {
    let (panel, min) = prepare(returns, config)?;
    let mut best = run(
        &panel,
        config,
        min,
        block_labels(panel.len(), config.clusters),
    )?;
    for r in 1..=config.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(r as u64));
        let init = random_block_labels(panel.len(), config.clusters, min, &mut rng);
        if let Ok(mut candidate) = run(&panel, config, min, init) {
            if candidate.path.objective > best.path.objective {
                candidate.report.selected_run = r;
                best = candidate;
            }
        }
    }
    Ok(best)
}

/// Same loop as [`fit`] from a caller-supplied initial assignment, without
/// restarts.
pub fn fit_with_initial_labels(
    returns: &ReturnsPanel,
    config: &ClusteringConfig,
    initial: Vec<usize>,
) -> Result<FitOutcome> {
    let (panel, min) = prepare(returns, config)?;
    if initial.len() != panel.len() {
        return Err(Error::Dimension {
            expected: panel.len(),
            found: initial.len(),
        });
    }
    if let Some(&label) = initial.iter().find(|&&l| l >= config.clusters) {
        return Err(Error::InvalidLabel {
            label,
            states: config.clusters,
        });
    }
    run(&panel, config, min, initial)
}

fn members_of(labels: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut members = vec![Vec::new(); k];
    for (t, &l) in labels.iter().enumerate() {
        members[l].push(t);
    }
    members
}

fn estimate_all(
    panel: &ReturnsPanel,
    labels: &[usize],
    config: &ClusteringConfig,
) -> Result<Vec<ClusterModel>> {
    let members = members_of(labels, config.clusters);
    let models: Vec<Result<ClusterModel>> = members
        .par_iter()
        .enumerate()
        .map(|(k, m)| estimate_cluster(panel, m, k, config))
        .collect();
    models.into_iter().collect()
}

struct Iterate {
    models: Vec<ClusterModel>,
    path: StatePath,
    scores: ScoreMatrix,
    iteration: usize,
}

fn run(
    panel: &ReturnsPanel,
    config: &ClusteringConfig,
    min: usize,
    mut labels: Vec<usize>,
) -> Result<FitOutcome> {
    let k = config.clusters;
    let mut trajectory = Vec::new();
    let mut decreases = Vec::new();
    let mut repairs = 0;
    let mut converged = false;
    let mut previous_scores: Option<ScoreMatrix> = None;
    let mut best: Option<Iterate> = None;
    let mut last_path: Option<Vec<usize>> = None;

    for iteration in 0..config.max_iterations {
        repairs += repair(&mut labels, previous_scores.as_ref(), k, min)?;
        let models = estimate_all(panel, &labels, config)?;
        let scores = score_states(panel, &models, config.scoring_mode)?;
        let path = solve_path(&scores, config.gamma)?;

        if let Some(&last) = trajectory.last() {
            if path.objective < last - DECREASE_TOLERANCE {
                decreases.push(iteration);
            }
        }
        trajectory.push(path.objective);

        // A repeated path means the repair would reproduce the same models.
        let done = path.labels == labels || last_path.as_ref() == Some(&path.labels);
        last_path = Some(path.labels.clone());
        labels.clone_from(&path.labels);
        if best
            .as_ref()
            .is_none_or(|b| path.objective > b.path.objective)
        {
            best = Some(Iterate {
                models,
                path,
                scores: scores.clone(),
                iteration,
            });
        }
        previous_scores = Some(scores);
        if done {
            converged = true;
            break;
        }
    }

    let best = best.expect("max_iterations is positive");
    let mut occupancy = vec![0usize; k];
    for &l in &best.path.labels {
        occupancy[l] += 1;
    }
    debug_assert!(
        (path_objective(&best.scores, &best.path.labels, config.gamma) - best.path.objective).abs()
            < 1e-9
    );
    let report = FitReport {
        iterations: trajectory.len(),
        converged,
        best_iteration: best.iteration,
        objective_trajectory: trajectory,
        objective_decreases: decreases,
        switches: count_switches(&best.path.labels),
        occupancy,
        repairs,
        selected_run: 0,
    };
    Ok(FitOutcome {
        models: best.models,
        path: best.path,
        scores: best.scores,
        report,
    })
}

/// Gives every undersized cluster the contiguous window of `min` time points
/// with the lowest current scores under their assigned labels, subject to
/// no donor cluster dropping below `min`. Returns the number of windows moved.
fn repair(
    labels: &mut [usize],
    scores: Option<&ScoreMatrix>,
    k: usize,
    min: usize,
) -> Result<usize> {
    let t_len = labels.len();
    let mut moved = 0;
    for _ in 0..REPAIR_ATTEMPTS {
        let mut counts = tally(labels, k);
        if counts.iter().all(|&c| c >= min) {
            return Ok(moved);
        }
        let Some(scores) = scores else {
            return Err(Error::RepairFailed(
                "initial assignment has undersized clusters".into(),
            ));
        };
        for cluster in 0..k {
            if counts[cluster] >= min {
                continue;
            }
            // Prefix sums of assigned scores and per-label counts.
            let mut cost = vec![0.0; t_len + 1];
            let mut per_label = vec![vec![0usize; t_len + 1]; k];
            for t in 0..t_len {
                cost[t + 1] = cost[t] + scores.get(t, labels[t]);
                for (l, pl) in per_label.iter_mut().enumerate() {
                    pl[t + 1] = pl[t] + usize::from(labels[t] == l);
                }
            }
            let mut chosen: Option<(usize, f64)> = None;
            for start in 0..=(t_len - min) {
                let end = start + min;
                // Donors keep at least `min`; undersized ones give nothing up.
                let feasible = (0..k).filter(|&l| l != cluster).all(|l| {
                    counts[l] - (per_label[l][end] - per_label[l][start]) >= min.min(counts[l])
                });
                if !feasible {
                    continue;
                }
                let c = cost[end] - cost[start];
                if chosen.is_none_or(|(_, best)| c < best) {
                    chosen = Some((start, c));
                }
            }
            if let Some((start, _)) = chosen {
                for l in &mut labels[start..start + min] {
                    *l = cluster;
                }
                moved += 1;
                counts = tally(labels, k);
            }
        }
    }
    let counts = tally(labels, k);
    match counts.iter().position(|&c| c < min) {
        None => Ok(moved),
        Some(cluster) => Err(Error::RepairFailed(format!(
            "cluster {cluster} still has {} members after {REPAIR_ATTEMPTS} repair passes (minimum {min})",
            counts[cluster]
        ))),
    }
}

fn tally(labels: &[usize], k: usize) -> Vec<usize> {
    let mut counts = vec![0usize; k];
    for &l in labels {
        counts[l] += 1;
    }
    counts
}

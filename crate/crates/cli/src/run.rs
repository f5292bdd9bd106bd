use std::fs;
use std::path::Path;

use logostate::analysis::{likelihood_ratio, suggest_crisis_bull, summarize};
use logostate::ingest::{load_price_panel, to_log_returns, IngestOptions, ReturnsPanel};
use logostate::segment::{fit, ClusterModel};

use crate::args::{RatioArg, RunConfig};
use crate::output::{self, PanelInfo, RatioInfo, Report};
use crate::CliError;

pub fn load_returns(input: &Path) -> Result<ReturnsPanel, CliError> {
    let prices = load_price_panel(input, &IngestOptions::default())?;
    Ok(to_log_returns(&prices))
}

pub fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::config(format!("cannot create {}: {e}", dir.display())))
}

/// Single fit: load, fit, write outputs. A failed run still leaves a
/// `report.json` describing the failure.
pub fn run_fit(rc: &RunConfig) -> Result<(), CliError> {
    create_dir(&rc.output)?;
    let result = load_returns(&rc.input).and_then(|returns| execute(rc, &returns));
    if let Err(e) = &result {
        record_failure(rc, e);
    }
    result.map(|_| ())
}

/// Fit on an already loaded panel into `rc.output`, recording failures.
pub fn run_cell(rc: &RunConfig, returns: &ReturnsPanel) -> Result<Vec<usize>, CliError> {
    let result = create_dir(&rc.output).and_then(|_| execute(rc, returns));
    if let Err(e) = &result {
        record_failure(rc, e);
    }
    result
}

fn record_failure(rc: &RunConfig, error: &CliError) {
    // Best effort: the original error is what gets reported.
    let _ = output::write_json(
        &rc.output.join("report.json"),
        &Report::failed(&rc.input, error),
    );
}

/// Failure before a `RunConfig` exists; skipped when no output directory
/// was named or it cannot be created.
pub fn record_early_failure(input: &Path, output: &Path, error: &CliError) {
    if output.as_os_str().is_empty() || fs::create_dir_all(output).is_err() {
        return;
    }
    let _ = output::write_json(&output.join("report.json"), &Report::failed(input, error));
}

/// Lowest vs highest mean equal-weight return among occupied states; falls
/// back to the models' mean vectors when fewer than two states are occupied.
fn auto_pair(summary_pair: Option<(usize, usize)>, models: &[ClusterModel]) -> (usize, usize) {
    summary_pair.unwrap_or_else(|| {
        let avg = |m: &ClusterModel| m.mu.mean();
        let lo = (0..models.len())
            .min_by(|&a, &b| avg(&models[a]).total_cmp(&avg(&models[b])))
            .unwrap_or(0);
        let hi = (0..models.len())
            .filter(|&k| k != lo)
            .max_by(|&a, &b| avg(&models[a]).total_cmp(&avg(&models[b])).then(b.cmp(&a)))
            .unwrap_or(1);
        (lo, hi)
    })
}

fn execute(rc: &RunConfig, returns: &ReturnsPanel) -> Result<Vec<usize>, CliError> {
    let cfg = &rc.clustering;
    rc.ratio.validate(cfg.clusters).map_err(CliError::config)?;
    let outcome = fit(returns, cfg)?;
    let summary = summarize(&outcome.path, returns, cfg.clusters)?;
    // Models live in the space the fit saw.
    let scored = if cfg.standardize {
        std::borrow::Cow::Owned(returns.standardized())
    } else {
        std::borrow::Cow::Borrowed(returns)
    };

    let ratio = match rc.ratio {
        RatioArg::None => None,
        RatioArg::Auto => {
            let (crisis, bull) = auto_pair(suggest_crisis_bull(&summary), &outcome.models);
            Some((crisis, bull, "auto"))
        }
        RatioArg::Pair(a, b) => Some((a, b, "explicit")),
    };
    let series = ratio
        .map(|(a, b, _)| likelihood_ratio(&scored, &outcome.models, a, b))
        .transpose()?;

    let dir = &rc.output;
    output::write_states(&dir.join("states.csv"), returns, &outcome.path)?;
    output::write_models(
        &dir.join("models.json"),
        returns.assets(),
        &outcome.models,
        &outcome.report.occupancy,
    )?;
    if let Some(series) = &series {
        output::write_ratio(&dir.join("ratio.csv"), series)?;
    }
    if rc.dump_graphs {
        for m in &outcome.models {
            output::write_graph(&dir.join(format!("graph_{}.txt", m.label)), m)?;
        }
    }
    let report = Report {
        status: "ok",
        error: None,
        input: rc.input.display().to_string(),
        config: Some(cfg),
        panel: Some(PanelInfo::of(returns)),
        objective: Some(outcome.path.objective),
        fit: Some(&outcome.report),
        summary: Some(&summary),
        ratio: ratio.map(|(state_a, state_b, selection)| RatioInfo {
            state_a,
            state_b,
            selection,
        }),
    };
    output::write_json(&dir.join("report.json"), &report)?;
    Ok(outcome.path.labels)
}

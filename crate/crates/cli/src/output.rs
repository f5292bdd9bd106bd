use std::fs;
use std::io::Write;
use std::path::Path;

use logostate::analysis::{RatioSeries, StateSummary};
use logostate::ingest::{ReturnsPanel, DATE_FORMAT};
use logostate::segment::{ClusterModel, ClusteringConfig, FitReport, StatePath};
use serde::Serialize;

use crate::CliError;

#[derive(Serialize)]
struct EdgeValue {
    i: usize,
    j: usize,
    value: f64,
}

#[derive(Serialize)]
struct StateModel<'a> {
    label: usize,
    occupancy: usize,
    member_count: usize,
    log_det: f64,
    ridge: f64,
    mu: &'a [f64],
    diagonal: &'a [f64],
    edges: Vec<EdgeValue>,
}

#[derive(Serialize)]
struct ModelsDoc<'a> {
    assets: &'a [String],
    states: Vec<StateModel<'a>>,
}

#[derive(Serialize)]
pub struct PanelInfo {
    pub observations: usize,
    pub assets: usize,
    pub first_date: String,
    pub last_date: String,
}

impl PanelInfo {
    pub fn of(returns: &ReturnsPanel) -> Self {
        Self {
            observations: returns.len(),
            assets: returns.n_assets(),
            first_date: returns.dates()[0].format(DATE_FORMAT).to_string(),
            last_date: returns.dates()[returns.len() - 1]
                .format(DATE_FORMAT)
                .to_string(),
        }
    }
}

#[derive(Serialize)]
pub struct RatioInfo {
    pub state_a: usize,
    pub state_b: usize,
    pub selection: &'static str,
}

#[derive(Serialize)]
pub struct ErrorInfo {
    pub kind: &'static str,
    pub code: i32,
    pub message: String,
}

#[derive(Serialize)]
pub struct Report<'a> {
    pub status: &'static str,
    pub error: Option<ErrorInfo>,
    pub input: String,
    pub config: Option<&'a ClusteringConfig>,
    pub panel: Option<PanelInfo>,
    pub objective: Option<f64>,
    pub fit: Option<&'a FitReport>,
    pub summary: Option<&'a StateSummary>,
    pub ratio: Option<RatioInfo>,
}

impl Report<'_> {
    pub fn failed(input: &Path, error: &CliError) -> Report<'static> {
        Report {
            status: "failed",
            error: Some(ErrorInfo {
                kind: error.kind.as_str(),
                code: error.code(),
                message: error.message.clone(),
            }),
            input: input.display().to_string(),
            config: None,
            panel: None,
            objective: None,
            fit: None,
            summary: None,
            ratio: None,
        }
    }
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::data(format!("cannot write {}: {e}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::data(format!("cannot serialize {}: {e}", path.display())))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io_error(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| io_error(path, e))
}

pub fn write_states(
    path: &Path,
    returns: &ReturnsPanel,
    path_labels: &StatePath,
) -> Result<(), CliError> {
    let mut out = String::from("date,label\n");
    for (date, label) in returns.dates().iter().zip(&path_labels.labels) {
        out.push_str(&format!("{},{label}\n", date.format(DATE_FORMAT)));
    }
    write_text(path, &out)
}

pub fn write_ratio(path: &Path, ratio: &RatioSeries) -> Result<(), CliError> {
    let mut out = String::from("date,value\n");
    for (date, value) in ratio.dates.iter().zip(&ratio.values) {
        out.push_str(&format!("{},{value}\n", date.format(DATE_FORMAT)));
    }
    write_text(path, &out)
}

pub fn write_models(
    path: &Path,
    assets: &[String],
    models: &[ClusterModel],
    occupancy: &[usize],
) -> Result<(), CliError> {
    // Only states that occur in the path, so states.csv and models.json
    // carry the same label set; report.json keeps the full occupancy.
    let states = models
        .iter()
        .filter(|m| occupancy[m.label] > 0)
        .map(|m| StateModel {
            label: m.label,
            occupancy: occupancy[m.label],
            member_count: m.member_count,
            log_det: m.precision.log_det(),
            ridge: m.precision.ridge(),
            mu: m.mu.as_slice(),
            diagonal: m.precision.diagonal(),
            edges: m
                .precision
                .off_diagonal()
                .iter()
                .map(|&(i, j, value)| EdgeValue { i, j, value })
                .collect(),
        })
        .collect();
    write_json(path, &ModelsDoc { assets, states })
}

pub fn write_graph(path: &Path, model: &ClusterModel) -> Result<(), CliError> {
    let mut buf = Vec::new();
    model
        .graph
        .write_edge_list(&mut buf)
        .and_then(|_| buf.flush())
        .map_err(|e| io_error(path, e))?;
    fs::write(path, buf).map_err(|e| io_error(path, e))
}

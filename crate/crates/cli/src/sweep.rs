use logostate::analysis::label_agreement;
use rayon::prelude::*;
use serde::Serialize;

use crate::args::Cli;
use crate::output;
use crate::run::{create_dir, load_returns, record_early_failure, run_cell};
use crate::CliError;

#[derive(Serialize)]
struct Cell {
    clusters: usize,
    gamma: f64,
    dir: String,
    status: &'static str,
    error: Option<String>,
}

#[derive(Serialize)]
struct SweepDoc {
    cells: Vec<Cell>,
    /// Pairwise label agreement after maximum-overlap matching, in cell
    /// order; `null` where either cell failed.
    agreement: Vec<Vec<Option<f64>>>,
}

pub fn cell_dir(clusters: usize, gamma: f64) -> String {
    format!("k{clusters}_g{gamma}")
}

/// One fit per (K, γ) combination in its own subdirectory, plus
/// `sweep.json` with the agreement matrix between runs.
pub fn run_sweep(cli: &Cli) -> Result<(), CliError> {
    let setup = cli
        .sweep_lists()
        .and_then(|lists| cli.run_config().map(|base| (lists, base)))
        .map_err(CliError::config)
        .and_then(|(lists, base)| {
            create_dir(&base.output)?;
            let returns = load_returns(&base.input)?;
            Ok((lists, base, returns))
        });
    let ((ks, gammas), base, returns) = match setup {
        Ok(setup) => setup,
        Err(e) => {
            record_early_failure(&cli.input, &cli.output, &e);
            return Err(e);
        }
    };

    let combos: Vec<(usize, f64)> = ks
        .iter()
        .flat_map(|&k| gammas.iter().map(move |&g| (k, g)))
        .collect();
    let results: Vec<Result<Vec<usize>, CliError>> = combos
        .par_iter()
        .map(|&(k, g)| {
            let mut rc = base.clone();
            rc.clustering.clusters = k;
            rc.clustering.gamma = g;
            rc.output = base.output.join(cell_dir(k, g));
            rc.clustering.validate().map_err(CliError::from)?;
            run_cell(&rc, &returns)
        })
        .collect();

    let agreement = results
        .iter()
        .map(|a| {
            results
                .iter()
                .map(|b| match (a, b) {
                    (Ok(a), Ok(b)) => Some(label_agreement(a, b)),
                    _ => None,
                })
                .collect()
        })
        .collect();
    let cells = combos
        .iter()
        .zip(&results)
        .map(|(&(clusters, gamma), r)| Cell {
            clusters,
            gamma,
            dir: cell_dir(clusters, gamma),
            status: if r.is_ok() { "ok" } else { "failed" },
            error: r.as_ref().err().map(|e| e.diagnostic()),
        })
        .collect();
    output::write_json(
        &base.output.join("sweep.json"),
        &SweepDoc { cells, agreement },
    )?;

    let failures: Vec<&CliError> = results.iter().filter_map(|r| r.as_ref().err()).collect();
    match failures.first() {
        None => Ok(()),
        Some(first) => Err(CliError {
            kind: first.kind,
            message: format!(
                "{} of {} sweep cells failed; first: {}",
                failures.len(),
                results.len(),
                first.message
            ),
        }),
    }
}

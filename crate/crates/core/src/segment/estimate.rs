use nalgebra::{DMatrix, DVector};

use super::ClusteringConfig;
use crate::error::{Error, Result};
use crate::ifn::{
    build_tmfg, logo_precision, similarity_from_covariance, SparsePrecision, TmfgGraph,
};
use crate::ingest::ReturnsPanel;

const DEGENERATE_RELATIVE_TRACE: f64 = 1e-14;

/// Parameters of one market state.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel {
    pub label: usize,
    pub mu: DVector<f64>,
    pub precision: SparsePrecision,
    pub graph: TmfgGraph,
    /// Time points the parameters were estimated from.
    pub member_count: usize,
}

pub(crate) fn mean_and_covariance(
    returns: &ReturnsPanel,
    members: &[usize],
) -> (DVector<f64>, DMatrix<f64>) {
    let x = returns.values();
    let n = x.ncols();
    let m = members.len() as f64;
    let mut mu = DVector::zeros(n);
    for &t in members {
        mu += x.row(t).transpose();
    }
    mu /= m;
    let mut cov = DMatrix::zeros(n, n);
    for &t in members {
        let d = x.row(t).transpose() - &mu;
        cov.syger(1.0, &d, &d, 1.0);
    }
    cov.fill_upper_triangle_with_lower_triangle();
    cov /= m - 1.0;
    (mu, cov)
}

/// Sample mean, sample covariance (denominator m − 1), TMFG on the
/// configured similarity and the LoGo precision of the member rows.
pub fn estimate_cluster(
    returns: &ReturnsPanel,
    members: &[usize],
    label: usize,
    config: &ClusteringConfig,
) -> Result<ClusterModel> {
    let minimum = config.resolved_min_cluster_size(returns.n_assets());
    if members.len() < minimum {
        return Err(Error::TooFewMembers {
            cluster: label,
            members: members.len(),
            minimum,
        });
    }
    if let Some(&t) = members.iter().find(|&&t| t >= returns.len()) {
        return Err(Error::Dimension {
            expected: returns.len(),
            found: t,
        });
    }
    let (mu, cov) = mean_and_covariance(returns, members);
    // Rank-0 up to rounding, relative to the raw second moment.
    let second_moment = cov.trace() + mu.norm_squared();
    if !(cov.trace() > DEGENERATE_RELATIVE_TRACE * second_moment) {
        return Err(Error::DegenerateCovariance(format!(
            "cluster {label}: all {} member rows are identical",
            members.len()
        )));
    }
    let similarity = similarity_from_covariance(&cov, config.similarity_mode);
    let graph = build_tmfg(&similarity)?;
    let precision = logo_precision(&cov, &graph)?;
    Ok(ClusterModel {
        label,
        mu,
        precision,
        graph,
        member_count: members.len(),
    })
}

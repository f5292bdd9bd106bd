//! Information filtering networks: TMFG construction and LoGo sparse
//! precision estimation on the resulting chordal graph.

mod chordal;
mod logo;
mod tmfg;

pub use chordal::{is_chordal, perfect_elimination_ordering};
pub use logo::{
    logdet_precision, logo_precision, quadratic_form, SparsePrecision, CONDITION_LIMIT,
    RIDGE_EPSILON,
};
pub use tmfg::{build_tmfg, TmfgGraph, EXHAUSTIVE_SEED_LIMIT};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// How a covariance is turned into the edge weights the TMFG maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimilarityMode {
    /// Pearson correlation as is.
    #[default]
    Signed,
    Absolute,
    Squared,
}

impl SimilarityMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SimilarityMode::Signed => "signed",
            SimilarityMode::Absolute => "absolute",
            SimilarityMode::Squared => "squared",
        }
    }
}

impl std::str::FromStr for SimilarityMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "signed" => Ok(SimilarityMode::Signed),
            "absolute" => Ok(SimilarityMode::Absolute),
            "squared" => Ok(SimilarityMode::Squared),
            other => Err(format!("unknown similarity mode {other:?}")),
        }
    }
}

/// Pearson correlation of a covariance matrix, transformed per `mode`.
/// Pairs involving a zero-variance variable get similarity 0.
pub fn similarity_from_covariance(cov: &DMatrix<f64>, mode: SimilarityMode) -> DMatrix<f64> {
    let n = cov.nrows();
    let sd: Vec<f64> = (0..n).map(|i| cov[(i, i)].max(0.0).sqrt()).collect();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            return 1.0;
        }
        let denom = sd[i] * sd[j];
        let r = if denom > 0.0 {
            cov[(i, j)] / denom
        } else {
            0.0
        };
        match mode {
            SimilarityMode::Signed => r,
            SimilarityMode::Absolute => r.abs(),
            SimilarityMode::Squared => r * r,
        }
    })
}

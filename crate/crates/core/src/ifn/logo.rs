use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};

use super::TmfgGraph;
use crate::error::{Error, Result};

/// Clique or separator blocks with a larger condition number trigger a ridge.
pub const CONDITION_LIMIT: f64 = 1e12;
/// Ridge size relative to the mean variance, `RIDGE_EPSILON * trace / n`.
pub const RIDGE_EPSILON: f64 = 1e-8;

const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// Symmetric precision matrix with nonzeros on the diagonal and on the edges
/// of the TMFG it was estimated on. Off-diagonal entries are stored once,
/// as `(i, j, value)` with `i < j`, sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsePrecision {
    n: usize,
    diagonal: Vec<f64>,
    off_diagonal: Vec<(usize, usize, f64)>,
    log_det: f64,
    ridge: f64,
}

impl SparsePrecision {
    /// Identity precision; mostly useful in tests and as a neutral model.
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            diagonal: vec![1.0; n],
            off_diagonal: Vec::new(),
            log_det: 0.0,
            ridge: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn off_diagonal(&self) -> &[(usize, usize, f64)] {
        &self.off_diagonal
    }

    /// Cached `log|J|`.
    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    /// Diagonal ridge that was added to the covariance before inversion,
    /// zero when none was needed.
    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diagonal[i];
        }
        let (a, b) = (i.min(j), i.max(j));
        match self
            .off_diagonal
            .binary_search_by(|&(x, y, _)| (x, y).cmp(&(a, b)))
        {
            Ok(idx) => self.off_diagonal[idx].2,
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.diagonal));
        for &(i, j, v) in &self.off_diagonal {
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        m
    }
}

/// `dᵀ J d`, touching only stored nonzeros.
pub fn quadratic_form(precision: &SparsePrecision, d: &[f64]) -> Result<f64> {
    if d.len() != precision.n {
        return Err(Error::Dimension {
            expected: precision.n,
            found: d.len(),
        });
    }
    let diag: f64 = precision
        .diagonal
        .iter()
        .zip(d)
        .map(|(j, x)| j * x * x)
        .sum();
    let off: f64 = precision
        .off_diagonal
        .iter()
        .map(|&(i, j, v)| v * d[i] * d[j])
        .sum();
    Ok(diag + 2.0 * off)
}

struct Block<'a> {
    vertices: &'a [usize],
    inverse: DMatrix<f64>,
    log_det: f64,
}

fn sub_matrix(cov: &DMatrix<f64>, vertices: &[usize], ridge: f64) -> DMatrix<f64> {
    let k = vertices.len();
    DMatrix::from_fn(k, k, |a, b| {
        cov[(vertices[a], vertices[b])] + if a == b { ridge } else { 0.0 }
    })
}

fn condition_number(m: &DMatrix<f64>) -> f64 {
    let eig = SymmetricEigen::new(m.clone()).eigenvalues;
    let max = eig.max();
    let min = eig.min();
    if min <= 0.0 || !min.is_finite() || !max.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

fn validate(cov: &DMatrix<f64>, graph: &TmfgGraph) -> Result<()> {
    let n = graph.n();
    if cov.nrows() != n || cov.ncols() != n {
        return Err(Error::Dimension {
            expected: n,
            found: if cov.nrows() != n {
                cov.nrows()
            } else {
                cov.ncols()
            },
        });
    }
    let scale = (0..n).map(|i| cov[(i, i)].abs()).fold(1.0, f64::max);
    for i in 0..n {
        for j in i..n {
            if !cov[(i, j)].is_finite() || !cov[(j, i)].is_finite() {
                return Err(Error::NonFinite { row: i, column: j });
            }
            if (cov[(i, j)] - cov[(j, i)]).abs() > SYMMETRY_TOLERANCE * scale {
                return Err(Error::NotSymmetric { row: i, column: j });
            }
        }
    }
    Ok(())
}

/// Factors every clique and separator block. A single ridge is applied to
/// the whole diagonal when any block is ill-conditioned, so that blocks stay
/// mutually consistent on their overlaps.
fn factor_blocks<'g>(
    cov: &DMatrix<f64>,
    graph: &'g TmfgGraph,
) -> Result<(Vec<Block<'g>>, Vec<Block<'g>>, f64)> {
    validate(cov, graph)?;
    let clique_sets: Vec<&[usize]> = graph.cliques().iter().map(|c| &c[..]).collect();
    let separator_sets: Vec<&[usize]> = graph.separators().iter().map(|s| &s[..]).collect();

    let ill_conditioned = clique_sets
        .iter()
        .chain(&separator_sets)
        .any(|vs| condition_number(&sub_matrix(cov, vs, 0.0)) > CONDITION_LIMIT);
    let ridge = if ill_conditioned {
        let n = graph.n() as f64;
        let r = RIDGE_EPSILON * cov.trace() / n;
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::DegenerateCovariance(
                "covariance has zero trace, a ridge cannot restore rank".into(),
            ));
        }
        r
    } else {
        0.0
    };

    let factor = |vertices: &'g [usize]| -> Result<Block<'g>> {
        let sub = sub_matrix(cov, vertices, ridge);
        let chol = sub.cholesky().ok_or_else(|| Error::SingularBlock {
            vertices: vertices.to_vec(),
        })?;
        let log_det = 2.0
            * chol
                .l_dirty()
                .diagonal()
                .iter()
                .map(|v| v.ln())
                .sum::<f64>();
        if !log_det.is_finite() {
            return Err(Error::SingularBlock {
                vertices: vertices.to_vec(),
            });
        }
        Ok(Block {
            vertices,
            inverse: chol.inverse(),
            log_det,
        })
    };
    let cliques = clique_sets
        .into_iter()
        .map(factor)
        .collect::<Result<Vec<_>>>()?;
    let separators = separator_sets
        .into_iter()
        .map(factor)
        .collect::<Result<Vec<_>>>()?;
    Ok((cliques, separators, ridge))
}

fn decomposable_log_det(cliques: &[Block<'_>], separators: &[Block<'_>]) -> f64 {
    let s: f64 = separators.iter().map(|b| b.log_det).sum();
    let c: f64 = cliques.iter().map(|b| b.log_det).sum();
    s - c
}

/// LoGo sparse inverse: the sum of inverted clique sub-covariances minus the
/// sum of inverted separator sub-covariances, each embedded at its indices.
pub fn logo_precision(covariance: &DMatrix<f64>, graph: &TmfgGraph) -> Result<SparsePrecision> {
    let (cliques, separators, ridge) = factor_blocks(covariance, graph)?;
    let n = graph.n();
    let mut diagonal = vec![0.0; n];
    let mut off_diagonal: Vec<(usize, usize, f64)> =
        graph.edges().iter().map(|&(i, j)| (i, j, 0.0)).collect();
    let index: HashMap<(usize, usize), usize> = graph
        .edges()
        .iter()
        .enumerate()
        .map(|(k, &e)| (e, k))
        .collect();

    let mut accumulate = |block: &Block<'_>, sign: f64| {
        let vs = block.vertices;
        for a in 0..vs.len() {
            diagonal[vs[a]] += sign * block.inverse[(a, a)];
            for b in (a + 1)..vs.len() {
                let key = (vs[a].min(vs[b]), vs[a].max(vs[b]));
                let k = index[&key];
                off_diagonal[k].2 += sign * block.inverse[(a, b)];
            }
        }
    };
    for block in &cliques {
        accumulate(block, 1.0);
    }
    for block in &separators {
        accumulate(block, -1.0);
    }

    Ok(SparsePrecision {
        n,
        diagonal,
        off_diagonal,
        log_det: decomposable_log_det(&cliques, &separators),
        ridge,
    })
}

/// `log|J|` of the LoGo precision without assembling it:
/// `Σ_S log|Σ_S| − Σ_C log|Σ_C|`.
pub fn logdet_precision(covariance: &DMatrix<f64>, graph: &TmfgGraph) -> Result<f64> {
    let (cliques, separators, _) = factor_blocks(covariance, graph)?;
    Ok(decomposable_log_det(&cliques, &separators))
}

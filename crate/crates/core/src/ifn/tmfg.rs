use std::io::Write;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Above this size the seed clique is chosen from row sums instead of an
/// exhaustive search over all 4-subsets.
pub const EXHAUSTIVE_SEED_LIMIT: usize = 200;

const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// A Triangulated Maximally Filtered Graph.
///
/// Planar and chordal, with `3n - 6` edges. Cliques are listed in insertion
/// order: the seed first, then one 4-clique per inserted vertex. Separator
/// `i` is the face consumed when clique `i + 1` was created, so the cliques
/// form a clique tree with these separators.
#[derive(Debug, Clone, PartialEq)]
pub struct TmfgGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    weights: Vec<f64>,
    cliques: Vec<[usize; 4]>,
    separators: Vec<[usize; 3]>,
}

impl TmfgGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges as `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn cliques(&self) -> &[[usize; 4]] {
        &self.cliques
    }

    pub fn separators(&self) -> &[[usize; 3]] {
        &self.separators
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let key = (a.min(b), a.max(b));
        self.edges.binary_search(&key).is_ok()
    }

    /// Similarity of each edge at construction time, aligned with [`edges`](Self::edges).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Total similarity retained by the graph.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Debug dump, one `i j weight` line per edge.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (&(i, j), w) in self.edges.iter().zip(&self.weights) {
            writeln!(out, "{i} {j} {w}")?;
        }
        Ok(())
    }
}

fn validate(similarity: &DMatrix<f64>) -> Result<usize> {
    let n = similarity.nrows();
    if similarity.ncols() != n {
        return Err(Error::Dimension {
            expected: n,
            found: similarity.ncols(),
        });
    }
    if n < 4 {
        return Err(Error::TooFewVertices(n));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (similarity[(i, j)], similarity[(j, i)]);
            if !a.is_finite() {
                return Err(Error::NonFinite { row: i, column: j });
            }
            if !b.is_finite() {
                return Err(Error::NonFinite { row: j, column: i });
            }
            if (a - b).abs() > SYMMETRY_TOLERANCE {
                return Err(Error::NotSymmetric { row: i, column: j });
            }
        }
    }
    Ok(n)
}

fn exhaustive_seed(w: &DMatrix<f64>) -> [usize; 4] {
    let n = w.nrows();
    let mut best = [0, 1, 2, 3];
    let mut best_weight = f64::NEG_INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            let wij = w[(i, j)];
            for k in (j + 1)..n {
                let wijk = wij + w[(i, k)] + w[(j, k)];
                for l in (k + 1)..n {
                    let total = wijk + w[(i, l)] + w[(j, l)] + w[(k, l)];
                    if total > best_weight {
                        best_weight = total;
                        best = [i, j, k, l];
                    }
                }
            }
        }
    }
    best
}

fn row_sum_seed(w: &DMatrix<f64>) -> [usize; 4] {
    let n = w.nrows();
    let mut sums: Vec<(f64, usize)> = (0..n)
        .map(|i| ((0..n).filter(|&j| j != i).map(|j| w[(i, j)]).sum(), i))
        .collect();
    sums.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut seed = [sums[0].1, sums[1].1, sums[2].1, sums[3].1];
    seed.sort_unstable();
    seed
}

struct Face {
    vertices: [usize; 3],
    alive: bool,
    best: Option<(usize, f64)>,
}

fn best_vertex(w: &DMatrix<f64>, face: [usize; 3], placed: &[bool]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (v, _) in placed.iter().enumerate().filter(|(_, &p)| !p) {
        let gain = w[(v, face[0])] + w[(v, face[1])] + w[(v, face[2])];
        if best.is_none_or(|(_, g)| gain > g) {
            best = Some((v, gain));
        }
    }
    best
}

/// Greedy TMFG construction.
///
/// Starts from the 4-clique of largest total similarity and repeatedly
/// inserts the (vertex, triangular face) pair whose three new edges carry the
/// most weight. Ties go to the lowest vertex index, then the oldest face.
/// The diagonal of `similarity` is ignored.
pub fn build_tmfg(similarity: &DMatrix<f64>) -> Result<TmfgGraph> {
    let n = validate(similarity)?;
    let w = similarity;
    let seed = if n <= EXHAUSTIVE_SEED_LIMIT {
        exhaustive_seed(w)
    } else {
        row_sum_seed(w)
    };

    let mut placed = vec![false; n];
    for &v in &seed {
        placed[v] = true;
    }
    let mut edges = Vec::with_capacity(3 * n - 6);
    for a in 0..4 {
        for b in (a + 1)..4 {
            edges.push((seed[a], seed[b]));
        }
    }
    let mut cliques = Vec::with_capacity(n - 3);
    cliques.push(seed);
    let mut separators = Vec::with_capacity(n - 4);

    let [a, b, c, d] = seed;
    let mut faces: Vec<Face> = [[a, b, c], [a, b, d], [a, c, d], [b, c, d]]
        .into_iter()
        .map(|vertices| Face {
            vertices,
            alive: true,
            best: best_vertex(w, vertices, &placed),
        })
        .collect();

    for _ in 4..n {
        let mut choice: Option<(usize, usize, f64)> = None;
        for (f, face) in faces.iter().enumerate().filter(|(_, f)| f.alive) {
            let Some((v, gain)) = face.best else { continue };
            let better = match choice {
                None => true,
                Some((_, bv, bg)) => gain > bg || (gain == bg && v < bv),
            };
            if better {
                choice = Some((f, v, gain));
            }
        }
        let (f, v, _) = choice.expect("a live face with a candidate vertex exists");

        placed[v] = true;
        faces[f].alive = false;
        let [x, y, z] = faces[f].vertices;
        edges.extend([
            (x.min(v), x.max(v)),
            (y.min(v), y.max(v)),
            (z.min(v), z.max(v)),
        ]);
        let mut clique = [x, y, z, v];
        clique.sort_unstable();
        cliques.push(clique);
        separators.push([x, y, z]);

        for face in faces.iter_mut().filter(|f| f.alive) {
            if face.best.is_some_and(|(bv, _)| bv == v) {
                face.best = best_vertex(w, face.vertices, &placed);
            }
        }
        for mut vertices in [[x, y, v], [y, z, v], [x, z, v]] {
            vertices.sort_unstable();
            faces.push(Face {
                vertices,
                alive: true,
                best: best_vertex(w, vertices, &placed),
            });
        }
    }

    edges.sort_unstable();
    let weights = edges.iter().map(|&(i, j)| w[(i, j)]).collect();
    Ok(TmfgGraph {
        n,
        edges,
        weights,
        cliques,
        separators,
    })
}

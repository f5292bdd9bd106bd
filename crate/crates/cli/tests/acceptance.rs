//! Acceptance suite. Each test prints one `[PASS]`/`[FAIL]` line and then
//! asserts, so `cargo test -p logostate-cli --test acceptance -- --nocapture`
//! doubles as a report.
//!
//! Oracles here are deliberately naive: brute-force path enumeration, dense
//! inversion, dense Cholesky log-determinants, permutation search for label
//! matching, simplicial-vertex elimination for chordality.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use logostate::analysis::likelihood_ratio;
use logostate::ifn::{
    build_tmfg, is_chordal, logdet_precision, logo_precision, similarity_from_covariance,
    SimilarityMode, TmfgGraph,
};
use logostate::ingest::ReturnsPanel;
use logostate::segment::{
    estimate_cluster, fit, score_states, solve_path, ClusterModel, ClusteringConfig, ScoreMatrix,
    ScoringMode,
};
use logostate::synthetic::{prices_from_returns, three_regime_panel, two_regime_panel};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use tempfile::TempDir;

const SEED: u64 = 7;

fn report(name: &str, pass: bool, detail: String) {
    println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{name}: {detail}");
}

fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            let v = rng.random_range(-1.0..1.0);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        m[(i, i)] = 1.0;
    }
    m
}

fn random_covariance(n: usize, scale: f64, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    (&a * a.transpose() / n as f64 + DMatrix::identity(n, n) * 0.2) * scale
}

/// Chordal iff repeatedly deleting simplicial vertices empties the graph.
fn chordal_by_elimination(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut adj = vec![vec![false; n]; n];
    for &(a, b) in edges {
        adj[a][b] = true;
        adj[b][a] = true;
    }
    let mut alive = vec![true; n];
    for _ in 0..n {
        let simplicial = (0..n).find(|&v| {
            alive[v] && {
                let nb: Vec<usize> = (0..n).filter(|&u| alive[u] && adj[v][u]).collect();
                nb.iter().all(|&x| nb.iter().all(|&y| x == y || adj[x][y]))
            }
        });
        match simplicial {
            Some(v) => alive[v] = false,
            None => return false,
        }
    }
    true
}

/// J = Σ_C inv(Σ_C) − Σ_S inv(Σ_S), each block embedded densely.
fn dense_logo(cov: &DMatrix<f64>, graph: &TmfgGraph) -> DMatrix<f64> {
    let n = cov.nrows();
    let mut j = DMatrix::zeros(n, n);
    let mut add = |idx: &[usize], sign: f64| {
        let sub = DMatrix::from_fn(idx.len(), idx.len(), |a, b| cov[(idx[a], idx[b])]);
        let inv = sub.try_inverse().expect("invertible block");
        for a in 0..idx.len() {
            for b in 0..idx.len() {
                j[(idx[a], idx[b])] += sign * inv[(a, b)];
            }
        }
    };
    for c in graph.cliques() {
        add(c, 1.0);
    }
    for s in graph.separators() {
        add(s, -1.0);
    }
    j
}

fn dense_logdet(m: &DMatrix<f64>) -> f64 {
    let l = m.clone().cholesky().expect("positive definite").l();
    2.0 * l.diagonal().iter().map(|v| v.ln()).sum::<f64>()
}

fn path_value(scores: &DMatrix<f64>, labels: &[usize], gamma: f64) -> f64 {
    let mut total = 0.0;
    for (t, &k) in labels.iter().enumerate() {
        total += scores[(t, k)];
        if t > 0 && labels[t - 1] != k {
            total -= gamma;
        }
    }
    total
}

/// Every K^T sequence; returns the first maximizer in lexicographic order
/// together with the maximum.
fn brute_force_path(scores: &DMatrix<f64>, gamma: f64) -> (Vec<usize>, f64) {
    let (t, k) = (scores.nrows(), scores.ncols());
    let total = k.pow(t as u32);
    let mut best = (Vec::new(), f64::NEG_INFINITY);
    for code in 0..total {
        let mut c = code;
        let labels: Vec<usize> = (0..t)
            .map(|_| {
                let l = c % k;
                c /= k;
                l
            })
            .rev()
            .collect();
        let v = path_value(scores, &labels, gamma);
        if v > best.1 {
            best = (labels, v);
        }
    }
    best
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// Best fraction of agreeing points over all relabelings of `b`.
fn permutation_accuracy(a: &[usize], b: &[usize]) -> f64 {
    let k = a.iter().chain(b).max().unwrap() + 1;
    let best = permutations(k)
        .iter()
        .map(|p| a.iter().zip(b).filter(|(&x, &y)| p[y] == x).count())
        .max()
        .unwrap();
    best as f64 / a.len() as f64
}

fn switches(labels: &[usize]) -> usize {
    labels.windows(2).filter(|w| w[0] != w[1]).count()
}

fn config(clusters: usize, gamma: f64) -> ClusteringConfig {
    ClusteringConfig {
        clusters,
        gamma,
        ..ClusteringConfig::default()
    }
}

#[test]
fn tmfg_structure() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let start = Instant::now();
    let mut failures = Vec::new();
    for trial in 0..200 {
        let n = rng.random_range(4..=30);
        let g = build_tmfg(&random_symmetric(n, &mut rng)).unwrap();
        let complete = g
            .cliques()
            .iter()
            .all(|c| (0..4).all(|a| (0..a).all(|b| g.has_edge(c[a], c[b]))));
        let ok = g.edges().len() == 3 * n - 6
            && g.cliques().len() == n - 3
            && g.separators().len() == n - 4
            && complete
            && chordal_by_elimination(n, g.edges())
            && is_chordal(n, g.edges());
        if !ok {
            failures.push((trial, n));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        "tmfg_structure",
        failures.is_empty() && secs < 5.0,
        format!("200 matrices, n in 4..=30, failures {failures:?}, {secs:.3} s (budget 5 s)"),
    );
}

#[test]
fn dp_exactness() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let gammas = [0.0, 0.5, 5.0, 1e6];
    let start = Instant::now();
    let mut mismatches = 0;
    for trial in 0..500 {
        let t = rng.random_range(1..=10);
        let k = rng.random_range(1..=3);
        let gamma = gammas[trial % gammas.len()];
        let values = DMatrix::from_fn(t, k, |_, _| rng.random_range(-5.0..5.0));
        let path = solve_path(&ScoreMatrix::new(values.clone()).unwrap(), gamma).unwrap();
        let (labels, best) = brute_force_path(&values, gamma);
        let dp_value = path_value(&values, &path.labels, gamma);
        if path.labels != labels || dp_value != best || path.switches != switches(&labels) {
            mismatches += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        "dp_exactness",
        mismatches == 0 && secs < 10.0,
        format!("500 cases, T<=10, K<=3, gamma in {gammas:?}, {mismatches} mismatches, {secs:.3} s (budget 10 s)"),
    );
}

#[test]
fn logo_exactness() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = rng.random_range(4..=20);
        let g = build_tmfg(&random_symmetric(n, &mut rng)).unwrap();
        // Strictly diagonally dominant, hence positive definite, on the
        // graph's sparsity pattern.
        let mut truth = DMatrix::<f64>::zeros(n, n);
        for &(a, b) in g.edges() {
            let v = rng.random_range(-1.0..1.0);
            truth[(a, b)] = v;
            truth[(b, a)] = v;
        }
        for i in 0..n {
            let off: f64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| truth[(i, j)].abs())
                .sum();
            truth[(i, i)] = 1.0 + off + rng.random_range(0.0..1.0);
        }
        let cov = truth.clone().try_inverse().unwrap();
        let est = logo_precision(&cov, &g).unwrap().to_dense();
        worst = worst.max((est - &truth).amax());
    }
    report(
        "logo_exactness",
        worst < 1e-8,
        format!("50 ground truths, n<=20, max entry error {worst:.3e} (tol 1e-8)"),
    );
}

#[test]
fn logdet_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = rng.random_range(4..=50);
        let cov = random_covariance(n, 1.0, &mut rng);
        let g = build_tmfg(&similarity_from_covariance(&cov, SimilarityMode::Signed)).unwrap();
        let dense = dense_logdet(&dense_logo(&cov, &g));
        let ld = logdet_precision(&cov, &g).unwrap();
        let stored = logo_precision(&cov, &g).unwrap().log_det();
        worst = worst.max((ld - dense).abs()).max((stored - dense).abs());
    }
    report(
        "logdet_identity",
        worst < 1e-8,
        format!("50 trials, n<=50, max |logdet - dense| {worst:.3e} (tol 1e-8)"),
    );
}

/// −½ (x−μ)ᵀ J (x−μ) + ½ log|J| with J assembled densely from the member
/// covariance on the model's graph.
fn dense_scores(
    returns: &ReturnsPanel,
    members: &[usize],
    model: &ClusterModel,
) -> (Vec<f64>, Vec<f64>) {
    let x = returns.values();
    let n = x.ncols();
    let m = members.len() as f64;
    let mu = DVector::from_fn(n, |i, _| {
        members.iter().map(|&t| x[(t, i)]).sum::<f64>() / m
    });
    let cov = DMatrix::from_fn(n, n, |i, j| {
        members
            .iter()
            .map(|&t| (x[(t, i)] - mu[i]) * (x[(t, j)] - mu[j]))
            .sum::<f64>()
            / (m - 1.0)
    });
    let j = dense_logo(&cov, &model.graph);
    let half_ld = 0.5 * dense_logdet(&j);
    let mut like = Vec::new();
    let mut maha = Vec::new();
    for t in 0..returns.len() {
        let d = x.row(t).transpose() - &mu;
        let q = (d.transpose() * &j * &d)[(0, 0)];
        like.push(-0.5 * q + half_ld);
        maha.push(-0.5 * q);
    }
    (like, maha)
}

#[test]
fn equation_fidelity() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    let mut ridged = 0;
    for _ in 0..100 {
        let n = rng.random_range(4..=12);
        let t_len = 10 * n;
        let cov = random_covariance(n, 1e-4, &mut rng);
        let l = cov.clone().cholesky().unwrap().l();
        let values = DMatrix::from_fn(t_len, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let values = values * l.transpose();
        let returns = ReturnsPanel::from_matrix(values).unwrap();
        let halves: [Vec<usize>; 2] = [(0..t_len / 2).collect(), (t_len / 2..t_len).collect()];
        let cfg = config(2, 100.0);
        let models: Vec<ClusterModel> = halves
            .iter()
            .enumerate()
            .map(|(k, members)| estimate_cluster(&returns, members, k, &cfg).unwrap())
            .collect();
        ridged += models.iter().filter(|m| m.precision.ridge() != 0.0).count();
        let like = score_states(&returns, &models, ScoringMode::Likelihood).unwrap();
        let maha = score_states(&returns, &models, ScoringMode::Mahalanobis).unwrap();
        for (k, members) in halves.iter().enumerate() {
            let (ol, om) = dense_scores(&returns, members, &models[k]);
            for t in 0..t_len {
                worst = worst
                    .max((like.get(t, k) - ol[t]).abs())
                    .max((maha.get(t, k) - om[t]).abs());
            }
        }
    }
    report(
        "equation_fidelity",
        worst < 1e-9 && ridged == 0,
        format!("100 (panel, model) pairs, max |score - dense| {worst:.3e} (tol 1e-9), ridged models {ridged}"),
    );
}

#[test]
fn regime_recovery() {
    let start = Instant::now();
    let panel = three_regime_panel(SEED);
    let smooth = fit(&panel.returns, &config(3, 100.0)).unwrap();
    let rough = fit(&panel.returns, &config(3, 0.0)).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let accuracy = permutation_accuracy(&panel.truth, &smooth.path.labels);
    let (s100, s0) = (switches(&smooth.path.labels), switches(&rough.path.labels));
    report(
        "regime_recovery",
        accuracy >= 0.9 && s0 > s100 && secs < 30.0,
        format!(
            "T={} n={} K=3: accuracy {accuracy:.4} (>=0.9), switches gamma=0 {s0} > gamma=100 {s100}, {secs:.3} s (budget 30 s)",
            panel.returns.len(),
            panel.returns.n_assets()
        ),
    );
}

#[test]
fn robustness() {
    let panel = three_regime_panel(SEED);
    let gammas = [10.0, 100.0, 1000.0];
    let runs: Vec<Vec<usize>> = gammas
        .iter()
        .map(|&g| fit(&panel.returns, &config(3, g)).unwrap().path.labels)
        .collect();
    let mut min_agree = 1.0f64;
    for a in 0..runs.len() {
        for b in a + 1..runs.len() {
            min_agree = min_agree.min(permutation_accuracy(&runs[a], &runs[b]));
        }
    }

    let mut purity = BTreeMap::new();
    for k in [2, 4, 6] {
        let labels = fit(&panel.returns, &config(k, 100.0)).unwrap().path.labels;
        let regimes = panel.truth.iter().max().unwrap() + 1;
        let worst = (0..regimes)
            .map(|r| {
                let mut counts = vec![0usize; k];
                let mut total = 0;
                for (t, &truth) in panel.truth.iter().enumerate() {
                    if truth == r {
                        counts[labels[t]] += 1;
                        total += 1;
                    }
                }
                *counts.iter().max().unwrap() as f64 / total as f64
            })
            .fold(1.0f64, f64::min);
        purity.insert(k, worst);
    }
    let pure = purity.values().all(|&p| p >= 0.8);
    report(
        "robustness",
        min_agree >= 0.85 && pure,
        format!(
            "gamma {gammas:?} min pairwise agreement {min_agree:.4} (>=0.85); K -> min regime purity {purity:?} (>=0.8)"
        ),
    );
}

#[test]
fn ratio_diagnostic() {
    let panel = two_regime_panel(SEED);
    let outcome = fit(&panel.returns, &config(2, 100.0)).unwrap();
    let labels = &outcome.path.labels;
    // State holding most regime-A points plays "a".
    let in_a = |k: usize| {
        panel
            .truth
            .iter()
            .zip(labels)
            .filter(|(&r, &l)| r == 0 && l == k)
            .count()
    };
    let a = if in_a(0) >= in_a(1) { 0 } else { 1 };
    let b = 1 - a;
    let forward = likelihood_ratio(&panel.returns, &outcome.models, a, b).unwrap();
    let backward = likelihood_ratio(&panel.returns, &outcome.models, b, a).unwrap();
    let mean_over = |regime: usize| {
        let v: Vec<f64> = forward
            .values
            .iter()
            .zip(&panel.truth)
            .filter(|(_, &r)| r == regime)
            .map(|(&v, _)| v)
            .collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let (mean_a, mean_b) = (mean_over(0), mean_over(1));
    let antisymmetric = forward
        .values
        .iter()
        .zip(&backward.values)
        .all(|(f, b)| *f == -*b);
    report(
        "ratio_diagnostic",
        mean_a > 0.0 && mean_b < 0.0 && antisymmetric,
        format!("mean over regime A {mean_a:.4} (>0), over regime B {mean_b:.4} (<0), exact antisymmetry {antisymmetric}"),
    );
}

fn collect_files(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            collect_files(root, &path, out);
        } else {
            let rel = path.strip_prefix(root).unwrap().display().to_string();
            out.insert(rel, fs::read(&path).unwrap());
        }
    }
}

#[test]
fn determinism() {
    let tmp = TempDir::new().unwrap();
    let panel = three_regime_panel(SEED);
    let input = tmp.path().join("prices.csv");
    prices_from_returns(&panel.returns, 100.0)
        .unwrap()
        .write_csv(File::create(&input).unwrap())
        .unwrap();
    let invocations: [&[&str]; 2] = [
        &["--clusters", "3", "--dump-graphs"],
        &["--sweep-k", "2,4", "--sweep-gamma", "10,100"],
    ];
    let mut trees = Vec::new();
    for (i, extra) in invocations.iter().enumerate() {
        let mut pair = Vec::new();
        for run in 0..2 {
            let out = tmp.path().join(format!("inv{i}_run{run}"));
            let status = Command::new(env!("CARGO_BIN_EXE_logostate"))
                .arg("--input")
                .arg(&input)
                .arg("--output")
                .arg(&out)
                .args(*extra)
                .status()
                .unwrap();
            assert!(status.success());
            let mut files = BTreeMap::new();
            collect_files(&out, &out, &mut files);
            pair.push(files);
        }
        trees.push(pair);
    }
    let files: usize = trees.iter().map(|p| p[0].len()).sum();
    let identical = trees.iter().all(|p| p[0] == p[1] && !p[0].is_empty());
    report(
        "determinism",
        identical,
        format!("2 invocations (fit, sweep) run twice, {files} files compared, byte-identical {identical}"),
    );
}

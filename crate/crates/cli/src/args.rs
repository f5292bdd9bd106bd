use std::path::PathBuf;

use clap::Parser;
use logostate::ifn::SimilarityMode;
use logostate::segment::{ClusteringConfig, ScoringMode};

/// Detect market states in a price panel and write plot-ready outputs.
#[derive(Debug, Parser)]
#[command(name = "logostate", version)]
pub struct Cli {
    /// Price CSV: `date` column first, one column per asset.
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    pub output: PathBuf,
    /// Number of states.
    #[arg(long, default_value_t = 4)]
    pub clusters: usize,
    /// Switching penalty.
    #[arg(long, default_value_t = 100.0)]
    pub gamma: f64,
    /// likelihood | mahalanobis
    #[arg(long, default_value = "likelihood")]
    pub mode: ScoringMode,
    /// signed | absolute | squared
    #[arg(long, default_value = "signed")]
    pub similarity: SimilarityMode,
    /// Z-score every asset before fitting.
    #[arg(long)]
    pub standardize: bool,
    #[arg(long = "max-iter", default_value_t = 50)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to max(assets + 1, 5).
    #[arg(long = "min-cluster-size")]
    pub min_cluster_size: Option<usize>,
    /// Additional random-partition restarts.
    #[arg(long, default_value_t = 0)]
    pub restarts: usize,
    /// State pair for ratio.csv: `A,B`, `auto` (lowest vs highest mean
    /// return) or `none`.
    #[arg(long, default_value = "auto")]
    pub ratio: RatioArg,
    /// Comma-separated state counts; enables sweep mode.
    #[arg(long = "sweep-k")]
    pub sweep_k: Option<String>,
    /// Comma-separated penalties; enables sweep mode.
    #[arg(long = "sweep-gamma")]
    pub sweep_gamma: Option<String>,
    /// Also write `graph_<k>.txt` edge lists (`i j similarity`) per state.
    #[arg(long = "dump-graphs")]
    pub dump_graphs: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioArg {
    Auto,
    None,
    Pair(usize, usize),
}

impl std::str::FromStr for RatioArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(RatioArg::Auto),
            "none" => Ok(RatioArg::None),
            _ => {
                let (a, b) = s
                    .split_once(',')
                    .ok_or_else(|| format!("expected A,B, auto or none, got {s:?}"))?;
                let a = a
                    .trim()
                    .parse()
                    .map_err(|e| format!("bad state {a:?}: {e}"))?;
                let b = b
                    .trim()
                    .parse()
                    .map_err(|e| format!("bad state {b:?}: {e}"))?;
                if a == b {
                    return Err(format!("ratio states must differ, got {a} twice"));
                }
                Ok(RatioArg::Pair(a, b))
            }
        }
    }
}

impl RatioArg {
    pub fn validate(self, clusters: usize) -> Result<(), String> {
        match self {
            RatioArg::Pair(a, b) if a >= clusters || b >= clusters => Err(format!(
                "ratio states {a},{b} out of range for {clusters} clusters"
            )),
            _ => Ok(()),
        }
    }
}

/// Everything one fit needs, after flag validation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: PathBuf,
    pub output: PathBuf,
    pub clustering: ClusteringConfig,
    pub ratio: RatioArg,
    pub dump_graphs: bool,
}

pub fn parse_list<T: std::str::FromStr>(flag: &str, raw: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    let items: Vec<&str> = raw
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if items.is_empty() {
        return Err(format!("{flag} list is empty"));
    }
    items
        .into_iter()
        .map(|s| {
            s.parse()
                .map_err(|e| format!("{flag}: bad value {s:?}: {e}"))
        })
        .collect()
}

impl Cli {
    pub fn run_config(&self) -> Result<RunConfig, String> {
        if self.input.as_os_str().is_empty() || self.output.as_os_str().is_empty() {
            return Err("--input and --output must be nonempty".into());
        }
        let clustering = ClusteringConfig {
            clusters: self.clusters,
            gamma: self.gamma,
            scoring_mode: self.mode,
            similarity_mode: self.similarity,
            max_iterations: self.max_iter,
            seed: self.seed,
            min_cluster_size: self.min_cluster_size,
            standardize: self.standardize,
            restarts: self.restarts,
        };
        clustering.validate().map_err(|e| e.to_string())?;
        if !self.is_sweep() {
            self.ratio.validate(self.clusters)?;
        }
        Ok(RunConfig {
            input: self.input.clone(),
            output: self.output.clone(),
            clustering,
            ratio: self.ratio,
            dump_graphs: self.dump_graphs,
        })
    }

    pub fn is_sweep(&self) -> bool {
        self.sweep_k.is_some() || self.sweep_gamma.is_some()
    }

    /// `(K list, γ list)`; a missing list falls back to the single-run flag.
    pub fn sweep_lists(&self) -> Result<(Vec<usize>, Vec<f64>), String> {
        let ks = match &self.sweep_k {
            Some(raw) => parse_list("--sweep-k", raw)?,
            None => vec![self.clusters],
        };
        let gammas = match &self.sweep_gamma {
            Some(raw) => parse_list("--sweep-gamma", raw)?,
            None => vec![self.gamma],
        };
        Ok((ks, gammas))
    }
}

//! Seeded Gaussian regime panels with known ground truth, for tests, demos
//! and calibration.

use chrono::NaiveDate;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::ingest::{PricePanel, ReturnsPanel};

#[derive(Debug, Clone)]
pub struct Regime {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
}

impl Regime {
    /// Equal volatility `vol`, equal pairwise correlation `rho`.
    pub fn equicorrelated(n: usize, mean: f64, vol: f64, rho: f64) -> Self {
        let covariance = DMatrix::from_fn(n, n, |i, j| vol * vol * if i == j { 1.0 } else { rho });
        Self {
            mean: DVector::from_element(n, mean),
            covariance,
        }
    }

    /// Correlation `within` for assets in the same group, `across` otherwise.
    pub fn grouped(
        n: usize,
        mean: f64,
        vol: f64,
        within: f64,
        across: f64,
        group: fn(usize) -> usize,
    ) -> Self {
        let covariance = DMatrix::from_fn(n, n, |i, j| {
            let rho = if i == j {
                1.0
            } else if group(i) == group(j) {
                within
            } else {
                across
            };
            vol * vol * rho
        });
        Self {
            mean: DVector::from_element(n, mean),
            covariance,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticPanel {
    pub returns: ReturnsPanel,
    /// Index into the regime list for every time point.
    pub truth: Vec<usize>,
}

/// Draws `segments[i].1` points from regime `segments[i].0`, in order.
pub fn regime_panel(
    regimes: &[Regime],
    segments: &[(usize, usize)],
    seed: u64,
) -> Result<SyntheticPanel> {
    let n = regimes.first().map_or(0, |r| r.mean.len());
    let factors = regimes
        .iter()
        .map(|r| {
            r.covariance
                .clone()
                .cholesky()
                .map(|c| c.l())
                .ok_or_else(|| Error::DegenerateCovariance("regime covariance is not SPD".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let total: usize = segments.iter().map(|s| s.1).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = DMatrix::zeros(total, n);
    let mut truth = Vec::with_capacity(total);
    let mut t = 0;
    for &(regime, len) in segments {
        let r = regimes.get(regime).ok_or(Error::InvalidLabel {
            label: regime,
            states: regimes.len(),
        })?;
        for _ in 0..len {
            let z = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
            let x = &r.mean + &factors[regime] * z;
            values.row_mut(t).copy_from(&x.transpose());
            truth.push(regime);
            t += 1;
        }
    }
    Ok(SyntheticPanel {
        returns: ReturnsPanel::from_matrix(values)?,
        truth,
    })
}

fn halves(i: usize) -> usize {
    usize::from(i >= 5)
}

fn parity(i: usize) -> usize {
    i % 2
}

fn sector_regime(n: usize, group: fn(usize) -> usize) -> Regime {
    Regime::grouped(n, 0.001, 0.01, 0.9, 0.0, group)
}

fn selloff_regime(n: usize) -> Regime {
    Regime::equicorrelated(n, -0.004, 0.04, 0.5)
}

/// Three regimes on 10 assets, 200 points each: two tight sectors split in
/// halves, the same sectors regrouped by parity, then a broad
/// high-volatility sell-off. Every pair is separated by at least ~14 nats of
/// Kullback-Leibler divergence per point, so any 200-point segment outweighs
/// a switching penalty of 1000, while the two sector regimes are much closer
/// to each other than either is to the sell-off.
pub fn three_regime_panel(seed: u64) -> SyntheticPanel {
    let n = 10;
    let regimes = [
        sector_regime(n, halves),
        sector_regime(n, parity),
        selloff_regime(n),
    ];
    regime_panel(&regimes, &[(0, 200), (1, 200), (2, 200)], seed).expect("valid regimes")
}

/// Sector regime followed by the sell-off, 200 points each.
pub fn two_regime_panel(seed: u64) -> SyntheticPanel {
    let n = 10;
    let regimes = [sector_regime(n, halves), selloff_regime(n)];
    regime_panel(&regimes, &[(0, 200), (1, 200)], seed).expect("valid regimes")
}

pub fn single_regime_panel(t: usize, n: usize, seed: u64) -> SyntheticPanel {
    let regimes = [Regime::equicorrelated(n, 0.0005, 0.01, 0.3)];
    regime_panel(&regimes, &[(0, t)], seed).expect("valid regime")
}

/// Price panel whose log-returns are `returns`, starting from `start` for
/// every asset one day before the first return date.
pub fn prices_from_returns(returns: &ReturnsPanel, start: f64) -> Result<PricePanel> {
    let (t, n) = returns.values().shape();
    let mut prices = DMatrix::zeros(t + 1, n);
    for i in 0..n {
        let mut log_p = start.ln();
        prices[(0, i)] = start;
        for r in 0..t {
            log_p += returns.values()[(r, i)];
            prices[(r + 1, i)] = log_p.exp();
        }
    }
    let first = returns.dates()[0] - chrono::Days::new(1);
    let mut dates: Vec<NaiveDate> = Vec::with_capacity(t + 1);
    dates.push(first);
    dates.extend_from_slice(returns.dates());
    PricePanel::new(dates, returns.assets().to_vec(), prices)
}

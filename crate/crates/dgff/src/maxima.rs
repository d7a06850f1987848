//! Monte Carlo experiments on the maximum of the field: moments with
//! jackknife errors, the expectation gap across a size doubling, empirical
//! right/left tails with Wilson bands, decay-rate fits, and the
//! variance-flatness gate.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::green::green_spectral;
use crate::lattice::Vertex;
use crate::par::replicate_map;
use crate::rng::{derive_seed, replicate_rng};
use crate::sampler::SpectralSampler;
use crate::stats;

/// Replicated maxima of the field on the box of side `n`. The maximum runs
/// over the whole box; the boundary contributes the pinned value 0, so every
/// entry is nonnegative.
#[derive(Debug, Clone)]
pub struct MaxStatistic {
    pub n: i32,
    pub values: Vec<f64>,
    pub seed: u64,
}

/// Draw `replicates` independent fields and record the maximum of each.
pub fn run_maxima(n: i32, replicates: u64, seed: u64) -> Result<MaxStatistic> {
    if replicates < 100 {
        return Err(Error::InvalidArgument(format!(
            "need at least 100 replicates, got {replicates}"
        )));
    }
    let sampler = SpectralSampler::new(n)?;
    let values = replicate_map(replicates, |r| sampler.sample(seed, r).max().max(0.0));
    debug_assert!(values.iter().all(|&v| v >= 0.0));
    Ok(MaxStatistic { n, values, seed })
}

/// Sample mean and variance with jackknife standard errors.
#[derive(Debug, Clone, Copy)]
pub struct MomentEstimate {
    pub mean: f64,
    pub variance: f64,
    pub mean_std_error: f64,
    pub variance_std_error: f64,
    pub replicates: u64,
}

pub fn estimate_moments(stat: &MaxStatistic) -> Result<MomentEstimate> {
    let n = stat.values.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 replicates for moments, got {n}"
        )));
    }
    Ok(MomentEstimate {
        mean: stats::mean(&stat.values),
        variance: stats::variance(&stat.values),
        mean_std_error: stats::std_error_of_mean(&stat.values),
        variance_std_error: stats::jackknife_se_of_variance(&stat.values),
        replicates: n as u64,
    })
}

/// Ê M_{2n} − Ê M_n with pooled standard error. The two sizes use
/// independent derived seeds.
#[derive(Debug, Clone, Copy)]
pub struct ExpectationGap {
    pub n: i32,
    pub gap: f64,
    pub std_error: f64,
}

pub fn expectation_gap(n: i32, replicates: u64, seed: u64) -> Result<ExpectationGap> {
    let small = run_maxima(n, replicates, derive_seed(seed, 1))?;
    let large = run_maxima(2 * n, replicates, derive_seed(seed, 2))?;
    let ms = estimate_moments(&small)?;
    let ml = estimate_moments(&large)?;
    Ok(ExpectationGap {
        n,
        gap: ml.mean - ms.mean,
        std_error: (ms.mean_std_error.powi(2) + ml.mean_std_error.powi(2)).sqrt(),
    })
}

/// Predicted gap E M_{2n} − E M_n from the expectation asymptotic
/// 2√(2/π)(log n − (3/(8 log 2)) log log n): the O(1) terms cancel in the
/// difference.
pub fn expectation_gap_prediction(n: i32) -> f64 {
    let lead = 2.0 * (2.0 / std::f64::consts::PI).sqrt();
    let loglog = |m: f64| m.ln().ln();
    lead * (2.0f64.ln() - 3.0 / (8.0 * 2.0f64.ln()) * (loglog(2.0 * n as f64) - loglog(n as f64)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailSide {
    Right,
    Left,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Centering {
    Mean,
    Median,
}

/// Empirical exceedance curve of the centered maximum: for the right tail
/// P(M ≥ m̂ + λ), for the left tail P(M ≤ m̂ − λ), with Wilson 95% bands.
#[derive(Debug, Clone)]
pub struct TailEstimate {
    pub side: TailSide,
    pub lambda_grid: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub wilson_bands: Vec<(f64, f64)>,
    pub counts: Vec<u64>,
    pub centering: f64,
    pub replicates: u64,
    /// Grid points above (log n)^{2/3} sit outside the proven tail regime;
    /// flagged so drivers can warn.
    pub lambda_cap_exceeded: bool,
}

pub fn empirical_tail(
    stat: &MaxStatistic,
    side: TailSide,
    lambda_grid: &[f64],
) -> Result<TailEstimate> {
    empirical_tail_centered(stat, side, lambda_grid, Centering::Mean)
}

pub fn empirical_tail_centered(
    stat: &MaxStatistic,
    side: TailSide,
    lambda_grid: &[f64],
    centering: Centering,
) -> Result<TailEstimate> {
    if lambda_grid.is_empty() {
        return Err(Error::InvalidArgument("empty lambda grid".into()));
    }
    if lambda_grid.windows(2).any(|w| w[1] <= w[0]) || lambda_grid[0] < 0.0 {
        return Err(Error::InvalidArgument(
            "lambda grid must be nonnegative and strictly increasing".into(),
        ));
    }
    let center = match centering {
        Centering::Mean => stats::mean(&stat.values),
        Centering::Median => stats::median(&stat.values),
    };
    let n = stat.values.len() as u64;
    let cap = (stat.n as f64).ln().powf(2.0 / 3.0);
    let mut probabilities = Vec::with_capacity(lambda_grid.len());
    let mut wilson_bands = Vec::with_capacity(lambda_grid.len());
    let mut counts = Vec::with_capacity(lambda_grid.len());
    for &lambda in lambda_grid {
        let count = stat
            .values
            .iter()
            .filter(|&&m| match side {
                TailSide::Right => m - center >= lambda,
                TailSide::Left => m - center <= -lambda,
            })
            .count() as u64;
        probabilities.push(count as f64 / n as f64);
        wilson_bands.push(stats::wilson_interval(count, n));
        counts.push(count);
    }
    Ok(TailEstimate {
        side,
        lambda_grid: lambda_grid.to_vec(),
        probabilities,
        wilson_bands,
        counts,
        centering: center,
        replicates: n,
        lambda_cap_exceeded: *lambda_grid.last().unwrap() > cap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateModel {
    /// log p = intercept + slope·λ (right tail; slope < 0 expected)
    LogLinear,
    /// log(−log p) = intercept + slope·λ (left tail; slope > 0 expected)
    LogLogLinear,
}

#[derive(Debug, Clone, Copy)]
pub struct RateFit {
    pub model: RateModel,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub lambda_window: (f64, f64),
}

/// Weighted least squares on the transformed tail, with weights from the
/// Wilson bands mapped through the same transform. Grid points with zero
/// counts (or probability 1) carry no information on the transformed scale
/// and are skipped; at least 4 usable points are required.
pub fn fit_rate(tail: &TailEstimate, window: (f64, f64)) -> Result<RateFit> {
    let model = match tail.side {
        TailSide::Right => RateModel::LogLinear,
        TailSide::Left => RateModel::LogLogLinear,
    };
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut ws = Vec::new();
    for i in 0..tail.lambda_grid.len() {
        let lambda = tail.lambda_grid[i];
        if lambda < window.0 || lambda > window.1 {
            continue;
        }
        let p = tail.probabilities[i];
        let (lo, hi) = tail.wilson_bands[i];
        if tail.counts[i] == 0 || p >= 1.0 {
            continue;
        }
        let (y, se) = match model {
            RateModel::LogLinear => {
                let se = (hi.ln() - lo.max(1e-300).ln()) / (2.0 * stats::Z_95);
                (p.ln(), se)
            }
            RateModel::LogLogLinear => {
                if hi >= 1.0 {
                    continue;
                }
                // −log p is decreasing in p, so the band order flips
                let se = ((-lo.max(1e-300).ln()).ln() - (-hi.ln()).ln()) / (2.0 * stats::Z_95);
                ((-p.ln()).ln(), se)
            }
        };
        xs.push(lambda);
        ys.push(y);
        ws.push(1.0 / se.max(1e-12).powi(2));
    }
    if xs.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "only {} usable grid points in window [{}, {}]",
            xs.len(),
            window.0,
            window.1
        )));
    }
    let fit = stats::weighted_line_fit(&xs, &ys, &ws)?;
    Ok(RateFit {
        model,
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        lambda_window: window,
    })
}

/// Per-size variance estimates with the max/min ratio gate.
#[derive(Debug, Clone)]
pub struct FlatnessReport {
    pub entries: Vec<FlatnessEntry>,
    pub ratio: f64,
    pub threshold: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct FlatnessEntry {
    pub n: i32,
    pub variance: f64,
    pub std_error: f64,
}

/// The shared gate: variance per series, flagged when max/min exceeds the
/// threshold.
pub fn flatness_gate(series: &[(i32, Vec<f64>)], threshold: f64) -> Result<FlatnessReport> {
    if series.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 sizes, got {}",
            series.len()
        )));
    }
    let mut entries = Vec::with_capacity(series.len());
    for (n, values) in series {
        entries.push(FlatnessEntry {
            n: *n,
            variance: stats::variance(values),
            std_error: stats::jackknife_se_of_variance(values),
        });
    }
    let max = entries.iter().map(|e| e.variance).fold(f64::MIN, f64::max);
    let min = entries.iter().map(|e| e.variance).fold(f64::MAX, f64::min);
    let ratio = max / min;
    Ok(FlatnessReport {
        entries,
        ratio,
        threshold,
        flagged: ratio > threshold,
    })
}

/// Variance flatness of the maxima across sizes.
pub fn variance_flatness(
    ns: &[i32],
    replicates: u64,
    seed: u64,
    threshold: f64,
) -> Result<FlatnessReport> {
    let mut series = Vec::with_capacity(ns.len());
    for (i, &n) in ns.iter().enumerate() {
        let stat = run_maxima(n, replicates, derive_seed(seed, i as u64))?;
        series.push((n, stat.values));
    }
    flatness_gate(&series, threshold)
}

/// Control series for the flatness gate: samples of sqrt(G(v*, v*))·Z, a
/// single Gaussian whose variance is the maximal Green diagonal and hence
/// grows logarithmically in n. Fed to the same gate, it must trip the flag.
pub fn scaled_gaussian_control(
    ns: &[i32],
    replicates: u64,
    seed: u64,
) -> Result<Vec<(i32, Vec<f64>)>> {
    let mut series = Vec::with_capacity(ns.len());
    for (i, &n) in ns.iter().enumerate() {
        let g = green_spectral(n)?;
        let center = Vertex::new(n / 2, n / 2);
        let sd = g.entry(center, center).sqrt();
        let sub_seed = derive_seed(seed, 1000 + i as u64);
        let values = replicate_map(replicates, move |r| {
            let mut rng = replicate_rng(sub_seed, r);
            let z: f64 = rng.sample(StandardNormal);
            sd * z
        });
        series.push((n, values));
    }
    Ok(series)
}

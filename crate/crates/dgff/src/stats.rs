//! Small statistics toolkit used by the Monte Carlo experiments: compensated
//! sums, jackknife standard errors, Wilson binomial intervals, weighted
//! least squares, a two-sample Kolmogorov–Smirnov test, and Gauss–Hermite
//! quadrature.

use crate::error::{Error, Result};

/// Compensated sum (Kahan–Babuška/Neumaier). Aggregations run over
/// replicate-ordered slices, so the summation order (and hence the result)
/// is fixed across thread counts.
pub fn kahan_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for &x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

pub fn mean(values: &[f64]) -> f64 {
    kahan_sum(values) / values.len() as f64
}

/// Unbiased sample variance.
pub fn variance(values: &[f64]) -> f64 {
    let n = values.len();
    assert!(n >= 2, "variance needs at least 2 observations");
    let m = mean(values);
    let sq: Vec<f64> = values.iter().map(|&x| (x - m) * (x - m)).collect();
    kahan_sum(&sq) / (n as f64 - 1.0)
}

pub fn std_error_of_mean(values: &[f64]) -> f64 {
    (variance(values) / values.len() as f64).sqrt()
}

/// Jackknife standard error of the sample variance (leave-one-out).
/// Falls back to the normal-theory approximation for n < 4.
pub fn jackknife_se_of_variance(values: &[f64]) -> f64 {
    let n = values.len();
    assert!(n >= 2);
    let var = variance(values);
    if n < 4 {
        return var * (2.0 / (n as f64 - 1.0)).sqrt();
    }
    let nf = n as f64;
    let s1 = kahan_sum(values);
    let sq: Vec<f64> = values.iter().map(|&x| x * x).collect();
    let s2 = kahan_sum(&sq);
    // leave-one-out unbiased variance from running sums
    let loo: Vec<f64> = values
        .iter()
        .map(|&x| {
            let s1i = s1 - x;
            let s2i = s2 - x * x;
            (s2i - s1i * s1i / (nf - 1.0)) / (nf - 2.0)
        })
        .collect();
    let loo_mean = mean(&loo);
    let dev: Vec<f64> = loo.iter().map(|&v| (v - loo_mean) * (v - loo_mean)).collect();
    ((nf - 1.0) / nf * kahan_sum(&dev)).sqrt()
}

pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// 95% two-sided normal quantile, fixed so golden files stay stable.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for a binomial proportion at 95% confidence.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    assert!(trials > 0);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Weighted least-squares line fit y ≈ intercept + slope·x.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn weighted_line_fit(xs: &[f64], ys: &[f64], weights: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() || xs.len() != weights.len() {
        return Err(Error::InvalidArgument("mismatched fit input lengths".into()));
    }
    if xs.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 points for a line fit, got {}",
            xs.len()
        )));
    }
    let w_sum: f64 = weights.iter().sum();
    if !(w_sum > 0.0) {
        return Err(Error::InvalidArgument("weights must have positive sum".into()));
    }
    let xm = xs.iter().zip(weights).map(|(x, w)| x * w).sum::<f64>() / w_sum;
    let ym = ys.iter().zip(weights).map(|(y, w)| y * w).sum::<f64>() / w_sum;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..xs.len() {
        sxx += weights[i] * (xs[i] - xm) * (xs[i] - xm);
        sxy += weights[i] * (xs[i] - xm) * (ys[i] - ym);
    }
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("degenerate abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for i in 0..xs.len() {
        let fit = intercept + slope * xs[i];
        ss_res += weights[i] * (ys[i] - fit) * (ys[i] - fit);
        ss_tot += weights[i] * (ys[i] - ym) * (ys[i] - ym);
    }
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(LineFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Two-sample Kolmogorov–Smirnov test. Returns (statistic, asymptotic p).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    assert!(!a.is_empty() && !b.is_empty());
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    ys.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (n, m) = (xs.len(), ys.len());
    let mut i = 0;
    let mut j = 0;
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = xs[i];
        let y = ys[j];
        let t = x.min(y);
        while i < n && xs[i] <= t {
            i += 1;
        }
        while j < m && ys[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let n_eff = (n as f64 * m as f64) / (n as f64 + m as f64);
    let lambda = n_eff.sqrt() * d;
    (d, ks_survival(lambda))
}

/// Kolmogorov distribution survival function Q(λ) = 2 Σ (−1)^{k−1} e^{−2k²λ²}.
fn ks_survival(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Standard normal CDF via erfc.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Complementary error function, Abramowitz–Stegun 7.1.26-style rational
/// approximation refined by one Newton step; |error| < 1e-15 after
/// symmetrization for the range used here.
fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    // series/continued-fraction split as in Numerical Recipes erfc
    let z = x;
    let t = 2.0 / (2.0 + z);
    let ty = 4.0 * t - 2.0;
    const COF: [f64; 28] = [
        -1.3026537197817094,
        6.4196979235649026e-1,
        1.9476473204185836e-2,
        -9.561514786808631e-3,
        -9.46595344482036e-4,
        3.66839497852761e-4,
        4.2523324806907e-5,
        -2.0278578112534e-5,
        -1.624290004647e-6,
        1.303655835580e-6,
        1.5626441722e-8,
        -8.5238095915e-8,
        6.529054439e-9,
        5.059343495e-9,
        -9.91364156e-10,
        -2.27365122e-10,
        9.6467911e-11,
        2.394038e-12,
        -6.886027e-12,
        8.94487e-13,
        3.13092e-13,
        -1.12708e-13,
        3.81e-16,
        7.106e-15,
        -1.523e-15,
        -9.4e-17,
        1.21e-16,
        -2.8e-17,
    ];
    let mut d = 0.0;
    let mut dd = 0.0;
    for &c in COF.iter().rev().take(COF.len() - 1) {
        let tmp = d;
        d = ty * d - dd + c;
        dd = tmp;
    }
    t * (-z * z + 0.5 * (COF[0] + ty * d) - dd).exp()
}

/// Gauss–Hermite nodes and weights (physicists' convention:
/// ∫ e^{−x²} f(x) dx ≈ Σ wᵢ f(xᵢ)), via Golub–Welsch on the Jacobi matrix.
pub fn gauss_hermite(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let mut jacobi = nalgebra::DMatrix::<f64>::zeros(order, order);
    for k in 1..order {
        let b = (k as f64 / 2.0).sqrt();
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let eig = nalgebra::SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..order)
        .map(|i| {
            let node = eig.eigenvalues[i];
            let first = eig.eigenvectors[(0, i)];
            let weight = std::f64::consts::PI.sqrt() * first * first;
            (node, weight)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

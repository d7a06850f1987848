//! Numeric verification of the Gaussian comparison toolkit: the Slepian
//! corollary bound for equicorrelated vectors, nested-domain correlation
//! domination, the variance-ratio bound, the monotone-domain factor-1/2
//! bound, and FKG positive association.
//!
//! Every check is reported in a uniform shape: the tested inequality is
//! normalized to `lhs ≤ rhs + 3·mc_error`, with `mc_error = None` for exact
//! (non–Monte Carlo) checks whose roundoff allowance is folded into `rhs`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::green::{green_dense, green_spectral, GreenOperator};
use crate::lattice::{build_box, Region, Vertex};
use crate::par::replicate_map;
use crate::rng::{derive_seed, replicate_rng};
use crate::sampler::AnySampler;
use crate::stats;

/// Equicorrelated Gaussian vector: dimension n, pairwise correlation ρ with
/// 0 ≤ ρ ≤ 1/2 (the corollary's hypothesis range).
#[derive(Debug, Clone, Copy)]
pub struct EquicorrelatedSpec {
    pub dimension: usize,
    pub rho: f64,
}

impl EquicorrelatedSpec {
    pub fn new(dimension: usize, rho: f64) -> Result<EquicorrelatedSpec> {
        if dimension == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if !(0.0..=0.5).contains(&rho) {
            return Err(Error::InvalidArgument(format!(
                "correlation must lie in [0, 1/2], got {rho}"
            )));
        }
        Ok(EquicorrelatedSpec { dimension, rho })
    }
}

/// One comparison check in normalized form: pass ⇔ lhs ≤ rhs + 3·mc_error.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    /// rhs + 3·mc_error − lhs; nonnegative iff pass
    pub margin: f64,
    pub pass: bool,
    /// Monte Carlo standard error of the compared quantity; None for exact
    /// checks.
    pub mc_error: Option<f64>,
}

impl ComparisonReport {
    fn new(check: impl Into<String>, lhs: f64, rhs: f64, mc_error: Option<f64>) -> Self {
        let slack = 3.0 * mc_error.unwrap_or(0.0);
        let margin = rhs + slack - lhs;
        ComparisonReport {
            check: check.into(),
            lhs,
            rhs,
            margin,
            pass: margin >= 0.0,
            mc_error,
        }
    }
}

/// The corollary's bound e^{−1/(2ρ)} + (9/10)^n.
pub fn slepian_bound(spec: EquicorrelatedSpec) -> f64 {
    let tail = if spec.rho == 0.0 {
        0.0
    } else {
        (-1.0 / (2.0 * spec.rho)).exp()
    };
    tail + 0.9f64.powi(spec.dimension as i32)
}

/// Orthant probability P(ζ_i ≤ 0 for all i) for the equicorrelated vector
/// ζ_i = √ρ·X + √(1−ρ)·Y_i, by integrating out the common factor with
/// Gauss–Hermite quadrature: E_X[Φ(−√(ρ/(1−ρ))·X)^n].
pub fn slepian_orthant_quadrature(spec: EquicorrelatedSpec) -> f64 {
    let (nodes, weights) = stats::gauss_hermite(64);
    let c = (spec.rho / (1.0 - spec.rho)).sqrt();
    let n = spec.dimension as f64;
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut total = 0.0;
    for (x, w) in nodes.iter().zip(&weights) {
        let phi = stats::normal_cdf(-c * sqrt2 * x);
        total += w * phi.powf(n);
    }
    total / std::f64::consts::PI.sqrt()
}

/// Monte Carlo orthant probability; returns (estimate, standard error).
pub fn slepian_orthant_mc(
    spec: EquicorrelatedSpec,
    replicates: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    if replicates < 10_000 {
        return Err(Error::InvalidArgument(format!(
            "need at least 10^4 replicates, got {replicates}"
        )));
    }
    let sq_rho = spec.rho.sqrt();
    let sq_rest = (1.0 - spec.rho).sqrt();
    let n = spec.dimension;
    let hits = replicate_map(replicates, |rep| {
        let mut rng = replicate_rng(seed, rep);
        let x: f64 = rng.sample(StandardNormal);
        let common = sq_rho * x;
        for _ in 0..n {
            let y: f64 = rng.sample(StandardNormal);
            if common + sq_rest * y > 0.0 {
                return 0u64;
            }
        }
        1u64
    });
    let count: u64 = hits.iter().sum();
    let p = count as f64 / replicates as f64;
    Ok((p, (p * (1.0 - p) / replicates as f64).sqrt()))
}

/// Slepian corollary check: the Monte Carlo orthant probability must sit
/// below the bound, and must agree with the variance-free quadrature route.
pub fn slepian_corollary_check(
    spec: EquicorrelatedSpec,
    replicates: u64,
    seed: u64,
) -> Result<Vec<ComparisonReport>> {
    let bound = slepian_bound(spec);
    let quad = slepian_orthant_quadrature(spec);
    let (mc, se) = slepian_orthant_mc(spec, replicates, seed)?;
    // Laplace-smoothed error for the consistency check: the plug-in binomial
    // se is zero at zero observed hits, but the estimate is still only
    // resolved to ~1/replicates
    let n = replicates as f64;
    let p_smooth = (mc * n + 1.0) / (n + 2.0);
    let se_consistency = (p_smooth * (1.0 - p_smooth) / n).sqrt();
    let label = format!("slepian-orthant(n={}, rho={})", spec.dimension, spec.rho);
    Ok(vec![
        ComparisonReport::new(format!("{label} <= bound"), mc, bound, Some(se)),
        ComparisonReport::new(
            format!("{label} mc vs quadrature"),
            (mc - quad).abs(),
            0.0,
            Some(se_consistency),
        ),
    ])
}

/// Centered box-in-box geometry: B of side ℓ centered in A_n, and the
/// comparison domain B̂ = (box of side 2ℓ with the same center) ∩ A_n.
#[derive(Debug, Clone, Copy)]
pub struct NestedBoxesSpec {
    pub outer_n: i32,
    pub inner_side: i32,
}

impl NestedBoxesSpec {
    pub fn new(outer_n: i32, inner_side: i32) -> Result<NestedBoxesSpec> {
        if inner_side < 2 || inner_side > outer_n {
            return Err(Error::InvalidArgument(format!(
                "need 2 <= inner side <= outer side, got ell={inner_side} n={outer_n}"
            )));
        }
        Ok(NestedBoxesSpec {
            outer_n,
            inner_side,
        })
    }

    /// (A_n, B, B̂)
    pub fn build(&self) -> Result<(Region, Region, Region)> {
        let n = self.outer_n;
        let ell = self.inner_side;
        let outer = build_box(n, Vertex::new(0, 0))?;
        let b_off = (n - ell) / 2;
        let inner = build_box(ell, Vertex::new(b_off, b_off))?;
        // hat box: side 2ℓ, same center, clipped to the outer box
        let hat_off = b_off - ell / 2;
        let hat_full = build_box(2 * ell, Vertex::new(hat_off, hat_off))?;
        let hat_vertices: Vec<Vertex> = hat_full
            .vertices()
            .iter()
            .copied()
            .filter(|&v| outer.contains(v))
            .collect();
        let hat = Region::from_vertices(hat_vertices)?;
        Ok((outer, inner, hat))
    }
}

/// Variances of the outer-box field at the given vertices, via the spectral
/// backend.
fn outer_variances(n: i32, vertices: &[Vertex]) -> Result<Vec<f64>> {
    let g = green_spectral(n)?;
    Ok(vertices.iter().map(|&v| g.entry(v, v)).collect())
}

fn hat_green(hat: &Region) -> Result<GreenOperator> {
    green_dense(hat)
}

/// Vertices of B usable for comparison: interior to both fields.
fn comparison_vertices(outer: &Region, inner: &Region, hat: &Region) -> Vec<Vertex> {
    inner
        .vertices()
        .iter()
        .copied()
        .filter(|&v| outer.is_interior(v) && hat.is_interior(v))
        .collect()
}

/// Exact nested-domain correlation domination: for all u, v in B, the
/// correlation under the outer field dominates the correlation under the
/// hat-box field. Reports the worst violation against a roundoff allowance.
pub fn nested_correlation_domination(spec: NestedBoxesSpec) -> Result<ComparisonReport> {
    let (outer, inner, hat) = spec.build()?;
    let g_outer = green_dense(&outer)?;
    let g_hat = hat_green(&hat)?;
    let vs = comparison_vertices(&outer, &inner, &hat);
    if vs.is_empty() {
        return Err(Error::InvalidArgument(
            "no comparison vertices in the nested geometry".into(),
        ));
    }
    let mut worst = f64::NEG_INFINITY;
    for (i, &u) in vs.iter().enumerate() {
        for &v in &vs[i..] {
            let rho = g_outer.entry(u, v)
                / (g_outer.entry(u, u) * g_outer.entry(v, v)).sqrt();
            let rho_hat =
                g_hat.entry(u, v) / (g_hat.entry(u, u) * g_hat.entry(v, v)).sqrt();
            worst = worst.max(rho_hat - rho);
        }
    }
    Ok(ComparisonReport::new(
        format!(
            "nested-correlation-domination(n={}, ell={})",
            spec.outer_n, spec.inner_side
        ),
        worst,
        1e-10,
        None,
    ))
}

/// Exact variance-ratio bound: max over v in B of
/// Var_outer(v) / Var_hat(v) ≤ 1 + c1·(log(n/ℓ) + c2)/log n.
pub fn variance_ratio_check(
    spec: NestedBoxesSpec,
    c1: f64,
    c2: f64,
) -> Result<ComparisonReport> {
    let (outer, inner, hat) = spec.build()?;
    let g_hat = hat_green(&hat)?;
    let vs = comparison_vertices(&outer, &inner, &hat);
    let var_outer = outer_variances(spec.outer_n, &vs)?;
    let mut max_ratio = f64::NEG_INFINITY;
    for (&v, &vo) in vs.iter().zip(&var_outer) {
        let ratio = vo / g_hat.entry(v, v);
        max_ratio = max_ratio.max(ratio);
    }
    let n = spec.outer_n as f64;
    let ell = spec.inner_side as f64;
    let bound = 1.0 + c1 * ((n / ell).ln() + c2) / n.ln();
    Ok(ComparisonReport::new(
        format!(
            "variance-ratio(n={}, ell={}, c1={c1}, c2={c2})",
            spec.outer_n, spec.inner_side
        ),
        max_ratio,
        bound,
        None,
    ))
}

/// The multiplicative construction behind the small-box comparison: scaling
/// the outer field by b_v = sqrt(Var η_v / Var g_v) matches the hat-field
/// variances exactly while keeping the outer correlations, so together with
/// correlation domination the Slepian hypotheses hold. Two exact reports:
/// the variance match and the covariance domination of the scaled field.
pub fn scaled_field_slepian_hypothesis(spec: NestedBoxesSpec) -> Result<Vec<ComparisonReport>> {
    let (outer, inner, hat) = spec.build()?;
    let g_outer = green_dense(&outer)?;
    let g_hat = hat_green(&hat)?;
    let vs = comparison_vertices(&outer, &inner, &hat);
    let b: Vec<f64> = vs
        .iter()
        .map(|&v| (g_outer.entry(v, v) / g_hat.entry(v, v)).sqrt())
        .collect();
    let mut worst_var = 0.0f64;
    let mut worst_dom = f64::NEG_INFINITY;
    for (i, &u) in vs.iter().enumerate() {
        let var_xi = g_outer.entry(u, u) / (b[i] * b[i]);
        worst_var = worst_var.max((var_xi - g_hat.entry(u, u)).abs());
        for (j, &v) in vs.iter().enumerate().skip(i + 1) {
            let cov_xi = g_outer.entry(u, v) / (b[i] * b[j]);
            worst_dom = worst_dom.max(g_hat.entry(u, v) - cov_xi);
        }
    }
    let label = format!(
        "scaled-field(n={}, ell={})",
        spec.outer_n, spec.inner_side
    );
    Ok(vec![
        ComparisonReport::new(format!("{label} variance match"), worst_var, 1e-12, None),
        ComparisonReport::new(
            format!("{label} covariance domination"),
            worst_dom,
            1e-10,
            None,
        ),
    ])
}

/// Nested zero-set geometry for the monotone-domain bound: field 1 is the
/// DGFF on `outer` (pinned only on ∂outer), field 2 the DGFF on `inner`
/// (pinned on everything outside the inner interior); U is the inner
/// interior.
pub struct MonotoneGeometry {
    pub outer: Region,
    pub inner: Region,
}

impl MonotoneGeometry {
    pub fn new(outer: Region, inner: Region) -> Result<MonotoneGeometry> {
        if !outer.contains_region(&inner) {
            return Err(Error::InvalidArgument(
                "zero sets are not nested: inner region must lie inside outer".into(),
            ));
        }
        Ok(MonotoneGeometry { outer, inner })
    }
}

/// Monte Carlo check of P(sup_U η⁽¹⁾ ≥ t) ≥ ½·P(sup_U η⁽²⁾ ≥ t) per grid
/// point.
pub fn monotone_domain_check(
    geometry: &MonotoneGeometry,
    t_grid: &[f64],
    replicates: u64,
    seed: u64,
) -> Result<Vec<ComparisonReport>> {
    let outer_sampler = AnySampler::for_region(&geometry.outer)?;
    let inner_sampler = AnySampler::for_region(&geometry.inner)?;
    let u_set: Vec<Vertex> = geometry.inner.interior().to_vec();
    let outer_region = geometry.outer.clone();
    let inner_region = geometry.inner.clone();
    let u_outer = u_set.clone();
    let sup_outer = replicate_map(replicates, move |r| {
        let s = outer_sampler.sample(derive_seed(seed, 1), r);
        u_outer
            .iter()
            .map(|&v| s.value(&outer_region, v))
            .fold(f64::NEG_INFINITY, f64::max)
    });
    let sup_inner = replicate_map(replicates, move |r| {
        let s = inner_sampler.sample(derive_seed(seed, 2), r);
        u_set
            .iter()
            .map(|&v| s.value(&inner_region, v))
            .fold(f64::NEG_INFINITY, f64::max)
    });
    let n = replicates as f64;
    let mut reports = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let p1 = sup_outer.iter().filter(|&&m| m >= t).count() as f64 / n;
        let p2 = sup_inner.iter().filter(|&&m| m >= t).count() as f64 / n;
        let se1 = (p1 * (1.0 - p1) / n).sqrt();
        let se2 = (p2 * (1.0 - p2) / n).sqrt();
        let se = (se1 * se1 + 0.25 * se2 * se2).sqrt();
        reports.push(ComparisonReport::new(
            format!("monotone-domain(t={t})"),
            0.5 * p2,
            p1,
            Some(se),
        ));
    }
    Ok(reports)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventDirection {
    /// Event probability increases when field values decrease
    Decreasing,
    /// Event probability increases when field values increase
    Increasing,
}

/// A sup-threshold event over a vertex set. `Decreasing` means the event is
/// {sup ≤ threshold}; `Increasing` means {sup ≥ threshold}.
#[derive(Debug, Clone)]
pub struct SupEvent {
    pub vertices: Vec<Vertex>,
    pub threshold: f64,
    pub direction: EventDirection,
}

impl SupEvent {
    fn holds(&self, sample: &crate::sampler::FieldSample, region: &Region) -> bool {
        let sup = self
            .vertices
            .iter()
            .map(|&v| sample.value(region, v))
            .fold(f64::NEG_INFINITY, f64::max);
        match self.direction {
            EventDirection::Decreasing => sup <= self.threshold,
            EventDirection::Increasing => sup >= self.threshold,
        }
    }
}

/// FKG positive-association check for a pair of decreasing events on the
/// box of side n: Cov(1_A, 1_B) must not be significantly negative. Pairs of
/// mixed (or increasing) monotonicity are rejected, since the inequality is
/// asserted only for the decreasing-decreasing form.
pub fn fkg_check(
    n: i32,
    events: (&SupEvent, &SupEvent),
    replicates: u64,
    seed: u64,
) -> Result<ComparisonReport> {
    let (a, b) = events;
    if a.direction != EventDirection::Decreasing || b.direction != EventDirection::Decreasing {
        return Err(Error::InvalidArgument(
            "FKG check requires two monotone decreasing events".into(),
        ));
    }
    let sampler = crate::sampler::SpectralSampler::new(n)?;
    let region = sampler.region().clone();
    for v in a.vertices.iter().chain(&b.vertices) {
        if !region.contains(*v) {
            return Err(Error::InvalidArgument(format!(
                "event vertex {v:?} outside the box"
            )));
        }
    }
    let a = a.clone();
    let b = b.clone();
    let indicators = replicate_map(replicates, move |r| {
        let s = sampler.sample(seed, r);
        (a.holds(&s, &region) as u8, b.holds(&s, &region) as u8)
    });
    let nf = replicates as f64;
    let pa = indicators.iter().filter(|(x, _)| *x == 1).count() as f64 / nf;
    let pb = indicators.iter().filter(|(_, y)| *y == 1).count() as f64 / nf;
    let pab = indicators.iter().filter(|(x, y)| *x == 1 && *y == 1).count() as f64 / nf;
    let cov = pab - pa * pb;
    // plug-in standard error of the covariance estimator
    let var_est: f64 = indicators
        .iter()
        .map(|&(x, y)| {
            let d = (x as f64 - pa) * (y as f64 - pb) - cov;
            d * d
        })
        .sum::<f64>()
        / nf;
    let se = (var_est / nf).sqrt();
    Ok(ComparisonReport::new(
        format!("fkg(n={n})"),
        -cov,
        0.0,
        Some(se),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        assert!(EquicorrelatedSpec::new(10, 0.3).is_ok());
        assert!(EquicorrelatedSpec::new(10, 0.6).is_err());
        assert!(EquicorrelatedSpec::new(10, -0.1).is_err());
        assert!(EquicorrelatedSpec::new(0, 0.1).is_err());
    }

    #[test]
    fn bound_arithmetic() {
        // ρ=0.1, n=100: e^{−5} + 0.9^100 ≈ 6.764e−3
        let spec = EquicorrelatedSpec::new(100, 0.1).unwrap();
        let b = slepian_bound(spec);
        assert!((b - 6.764e-3).abs() < 1e-5, "bound {b}");
    }

    #[test]
    fn independent_orthant_is_two_to_minus_n() {
        for n in [1usize, 5, 20] {
            let spec = EquicorrelatedSpec::new(n, 0.0).unwrap();
            let q = slepian_orthant_quadrature(spec);
            assert!((q - 0.5f64.powi(n as i32)).abs() < 1e-10, "n={n} q={q}");
            assert!(q <= slepian_bound(spec));
        }
    }

    #[test]
    fn single_variable_orthant_is_half() {
        let spec = EquicorrelatedSpec::new(1, 0.3).unwrap();
        let q = slepian_orthant_quadrature(spec);
        assert!((q - 0.5).abs() < 1e-8);
        assert!(0.5 <= slepian_bound(spec));
    }

    #[test]
    fn corollary_check_passes_and_routes_agree() {
        let spec = EquicorrelatedSpec::new(20, 0.2).unwrap();
        let reports = slepian_corollary_check(spec, 20_000, 7).unwrap();
        for r in &reports {
            assert!(r.pass, "{}: lhs {} rhs {}", r.check, r.lhs, r.rhs);
        }
        assert!(slepian_orthant_mc(spec, 100, 7).is_err());
    }

    #[test]
    fn nested_domination_holds_exactly() {
        let spec = NestedBoxesSpec::new(16, 4).unwrap();
        let report = nested_correlation_domination(spec).unwrap();
        assert!(report.pass, "margin {}", report.margin);
        assert!(report.mc_error.is_none());
    }

    #[test]
    fn degenerate_hat_equals_outer() {
        // 2ℓ = n: the hat box clips to A_n itself, so correlations coincide
        let spec = NestedBoxesSpec::new(8, 4).unwrap();
        let (outer, _, hat) = spec.build().unwrap();
        assert_eq!(outer.len(), hat.len());
        let report = nested_correlation_domination(spec).unwrap();
        assert!(report.lhs.abs() < 1e-12, "margins should vanish: {}", report.lhs);
    }

    #[test]
    fn variance_ratio_bound_and_monotonicity() {
        let spec = NestedBoxesSpec::new(32, 8).unwrap();
        let report = variance_ratio_check(spec, 2.0, 4.0).unwrap();
        assert!(report.pass, "ratio {} bound {}", report.lhs, report.rhs);
        assert!(report.lhs >= 1.0, "larger domain must not shrink variance");
        // doubling n with the same n/ℓ proportion brings the ratio down
        let bigger = variance_ratio_check(NestedBoxesSpec::new(64, 16).unwrap(), 2.0, 4.0).unwrap();
        assert!(bigger.lhs < report.lhs);
    }

    #[test]
    fn scaled_field_hypothesis_exact() {
        let reports =
            scaled_field_slepian_hypothesis(NestedBoxesSpec::new(16, 4).unwrap()).unwrap();
        for r in &reports {
            assert!(r.pass, "{}: lhs {}", r.check, r.lhs);
        }
    }

    #[test]
    fn monotone_domain_identical_zero_sets() {
        let outer = build_box(8, Vertex::new(0, 0)).unwrap();
        let geom = MonotoneGeometry::new(outer.clone(), outer).unwrap();
        let reports = monotone_domain_check(&geom, &[0.5, 1.0], 5_000, 3).unwrap();
        for r in reports {
            // identical laws: p1 = p2, so the factor-2 slack makes this pass
            assert!(r.pass, "{}", r.check);
        }
    }

    #[test]
    fn monotone_domain_single_vertex_at_zero() {
        let outer = build_box(2, Vertex::new(0, 0)).unwrap();
        let geom = MonotoneGeometry::new(outer.clone(), outer).unwrap();
        let reports = monotone_domain_check(&geom, &[0.0], 40_000, 5).unwrap();
        // sign symmetry: p1 = p2 = 1/2 up to MC noise
        let r = &reports[0];
        assert!((r.rhs - 0.5).abs() < 0.02);
        assert!((r.lhs - 0.25).abs() < 0.02);
        assert!(r.pass);
    }

    #[test]
    fn monotone_domain_rejects_non_nested() {
        let outer = build_box(8, Vertex::new(0, 0)).unwrap();
        let stray = build_box(4, Vertex::new(6, 6)).unwrap();
        assert!(MonotoneGeometry::new(outer, stray).is_err());
    }

    #[test]
    fn fkg_same_event_positive() {
        let half: Vec<Vertex> = (1..8).flat_map(|x| (1..4).map(move |y| Vertex::new(x, y))).collect();
        let event = SupEvent {
            vertices: half,
            threshold: 1.0,
            direction: EventDirection::Decreasing,
        };
        let report = fkg_check(8, (&event, &event), 10_000, 9).unwrap();
        // A = B: covariance is p(1−p) ≥ 0
        assert!(report.pass);
        assert!(-report.lhs > 0.0, "cov {}", -report.lhs);
    }

    #[test]
    fn fkg_rejects_mixed_monotonicity() {
        let vs = vec![Vertex::new(1, 1)];
        let dec = SupEvent {
            vertices: vs.clone(),
            threshold: 0.0,
            direction: EventDirection::Decreasing,
        };
        let inc = SupEvent {
            vertices: vs,
            threshold: 0.0,
            direction: EventDirection::Increasing,
        };
        assert!(fkg_check(4, (&dec, &inc), 10_000, 1).is_err());
        assert!(fkg_check(4, (&inc, &inc), 10_000, 1).is_err());
    }

    #[test]
    fn fkg_half_box_events() {
        let n = 16;
        let left: Vec<Vertex> = (1..n / 2).flat_map(|x| (1..n).map(move |y| Vertex::new(x, y))).collect();
        let right: Vec<Vertex> =
            (n / 2..n).flat_map(|x| (1..n).map(move |y| Vertex::new(x, y))).collect();
        let a = SupEvent {
            vertices: left,
            threshold: 2.0,
            direction: EventDirection::Decreasing,
        };
        let b = SupEvent {
            vertices: right,
            threshold: 2.0,
            direction: EventDirection::Decreasing,
        };
        let report = fkg_check(n, (&a, &b), 20_000, 11).unwrap();
        assert!(report.pass, "margin {}", report.margin);
    }
}

//! The DGFF covariance: Green functions of simple random walk killed on the
//! region boundary.
//!
//! Normalization: G = (I − P)⁻¹ over interior indices, i.e. expected visit
//! counts, so a region with a single interior vertex has G = 1 exactly. On a
//! box of side n this equals 4·L⁻¹ for the Dirichlet Laplacian L, which
//! diagonalizes in the sine basis f_jk(x,y) = sin(πjx/n)sin(πky/n) with
//! eigenvalues λ_jk = 4 − 2cos(πj/n) − 2cos(πk/n); the spectral backend
//! stores only those coefficients and reconstructs entries on demand.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fst::DstPlan;
use crate::lattice::{build_box, Region, Vertex};
use crate::solve::DirichletSystem;
use crate::walk::{HarmonicKernel, PotentialKernel};

/// Default cap on interior size for dense Green matrices.
pub const DEFAULT_DENSE_CAP: usize = 16_384;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    Dense,
    Spectral,
}

enum Backend {
    Dense {
        matrix: DMatrix<f64>,
    },
    Spectral {
        n: usize,
        // sin(π j x / n) for j, x in 1..n−1, index (j−1)·m + (x−1)
        sin: Vec<f64>,
        // (16/n²)/λ_jk, index (k−1)·m + (j−1): row = y-mode, col = x-mode
        amp: Vec<f64>,
        plan: DstPlan,
    },
}

/// Covariance operator of the DGFF on a region.
pub struct GreenOperator {
    region: Region,
    backend: Backend,
}

/// Dense Green matrix G = (I − P)⁻¹ by one factorization.
pub fn green_dense(region: &Region) -> Result<GreenOperator> {
    green_dense_with_cap(region, DEFAULT_DENSE_CAP)
}

pub fn green_dense_with_cap(region: &Region, cap: usize) -> Result<GreenOperator> {
    let m = region.interior_len();
    if m == 0 {
        return Err(Error::InvalidArgument("region has no interior".into()));
    }
    if m > cap {
        return Err(Error::ResourceLimit(format!(
            "interior size {m} exceeds dense cap {cap}"
        )));
    }
    let sys = DirichletSystem::new(region, &[])?;
    let matrix = sys
        .dense_matrix()
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::Internal("singular walk operator".into()))?;
    Ok(GreenOperator {
        region: region.clone(),
        backend: Backend::Dense { matrix },
    })
}

/// Spectral Green operator for the box of side `n` with corner at the
/// origin. Entries are reconstructed on demand; nothing of size m² is
/// stored.
pub fn green_spectral(n: i32) -> Result<GreenOperator> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "box side must be >= 2, got {n}"
        )));
    }
    let region = build_box(n, Vertex::new(0, 0))?;
    let n = n as usize;
    let m = n - 1;
    let mut sin = vec![0.0; m * m];
    for j in 1..=m {
        for x in 1..=m {
            sin[(j - 1) * m + (x - 1)] = (std::f64::consts::PI * (j * x) as f64 / n as f64).sin();
        }
    }
    let mut amp = vec![0.0; m * m];
    let scale = 16.0 / (n * n) as f64;
    for k in 1..=m {
        let ck = 2.0 * (std::f64::consts::PI * k as f64 / n as f64).cos();
        for j in 1..=m {
            let cj = 2.0 * (std::f64::consts::PI * j as f64 / n as f64).cos();
            let lambda = 4.0 - cj - ck;
            amp[(k - 1) * m + (j - 1)] = scale / lambda;
        }
    }
    Ok(GreenOperator {
        region,
        backend: Backend::Spectral {
            n,
            sin,
            amp,
            plan: DstPlan::new(n),
        },
    })
}

impl GreenOperator {
    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn backend(&self) -> BackendKind {
        match self.backend {
            Backend::Dense { .. } => BackendKind::Dense,
            Backend::Spectral { .. } => BackendKind::Spectral,
        }
    }

    /// Covariance G(u, v). Zero if either vertex is on the boundary (the
    /// field is pinned there). Panics if a vertex is outside the region.
    pub fn entry(&self, u: Vertex, v: Vertex) -> f64 {
        assert!(
            self.region.contains(u) && self.region.contains(v),
            "vertices must lie in the region"
        );
        let (ui, vi) = match (self.region.interior_index(u), self.region.interior_index(v)) {
            (Some(a), Some(b)) => (a, b),
            _ => return 0.0,
        };
        match &self.backend {
            Backend::Dense { matrix } => matrix[(ui, vi)],
            Backend::Spectral { n, sin, amp, .. } => {
                let m = *n - 1;
                let (ux, uy) = ((u.x - 0) as usize, (u.y - 0) as usize);
                let (vx, vy) = (v.x as usize, v.y as usize);
                let mut total = 0.0;
                for k in 1..=m {
                    let sy = sin[(k - 1) * m + (uy - 1)] * sin[(k - 1) * m + (vy - 1)];
                    if sy == 0.0 {
                        continue;
                    }
                    let mut inner = 0.0;
                    for j in 1..=m {
                        inner += amp[(k - 1) * m + (j - 1)]
                            * sin[(j - 1) * m + (ux - 1)]
                            * sin[(j - 1) * m + (vx - 1)];
                    }
                    total += sy * inner;
                }
                total
            }
        }
    }

    /// One column G(·, v) over interior indices. For the spectral backend
    /// this is a single 2D sine transform.
    pub fn column(&self, v: Vertex) -> Vec<f64> {
        let vi = self
            .region
            .interior_index(v)
            .expect("column vertex must be interior");
        match &self.backend {
            Backend::Dense { matrix } => matrix.column(vi).iter().copied().collect(),
            Backend::Spectral { n, sin, amp, plan } => {
                let m = *n - 1;
                let (vx, vy) = (v.x as usize, v.y as usize);
                let mut coef = vec![0.0; m * m];
                for k in 1..=m {
                    let sy = sin[(k - 1) * m + (vy - 1)];
                    for j in 1..=m {
                        coef[(k - 1) * m + (j - 1)] =
                            amp[(k - 1) * m + (j - 1)] * sin[(j - 1) * m + (vx - 1)] * sy;
                    }
                }
                let mut scratch = plan.make_scratch();
                plan.transform_2d(&mut coef, &mut scratch);
                coef
            }
        }
    }

    /// Diagonal of G over interior indices (the variance profile values).
    pub fn diagonal(&self) -> Vec<f64> {
        match &self.backend {
            Backend::Dense { matrix } => matrix.diagonal().iter().copied().collect(),
            Backend::Spectral { n, sin, amp, .. } => {
                let m = *n - 1;
                // Q[j][y] = Σ_k amp_jk sin²(πky/n); then diag(x,y) = Σ_j sin²(πjx/n) Q[j][y]
                let mut q = vec![0.0; m * m];
                for j in 1..=m {
                    for y in 1..=m {
                        let mut acc = 0.0;
                        for k in 1..=m {
                            let s = sin[(k - 1) * m + (y - 1)];
                            acc += amp[(k - 1) * m + (j - 1)] * s * s;
                        }
                        q[(j - 1) * m + (y - 1)] = acc;
                    }
                }
                let mut diag = vec![0.0; m * m];
                for y in 1..=m {
                    for x in 1..=m {
                        let mut acc = 0.0;
                        for j in 1..=m {
                            let s = sin[(j - 1) * m + (x - 1)];
                            acc += s * s * q[(j - 1) * m + (y - 1)];
                        }
                        // interior dense order is row-major by (y, x)
                        diag[(y - 1) * m + (x - 1)] = acc;
                    }
                }
                diag
            }
        }
    }

    /// Materialize the full matrix over interior indices.
    pub fn to_dense_matrix(&self) -> DMatrix<f64> {
        match &self.backend {
            Backend::Dense { matrix } => matrix.clone(),
            Backend::Spectral { .. } => {
                let m = self.region.interior_len();
                let mut out = DMatrix::<f64>::zeros(m, m);
                for (vi, &v) in self.region.interior().iter().enumerate() {
                    let col = self.column(v);
                    for (ui, val) in col.into_iter().enumerate() {
                        out[(ui, vi)] = val;
                    }
                }
                out
            }
        }
    }

    /// Square-root amplitudes per sine mode, used by the spectral sampler:
    /// index (k−1)·m + (j−1), value sqrt((4/λ_jk))·(2/n).
    pub(crate) fn spectral_mode_scales(&self) -> Option<(usize, Vec<f64>, &DstPlan)> {
        match &self.backend {
            Backend::Spectral { n, amp, plan, .. } => {
                let scales = amp.iter().map(|&a| a.sqrt()).collect();
                Some((*n, scales, plan))
            }
            Backend::Dense { .. } => None,
        }
    }
}

/// Variance profile: the Green diagonal, with its maximizer.
pub struct VarianceProfile {
    values: Vec<f64>,
    argmax: Vertex,
    max: f64,
}

impl VarianceProfile {
    /// Values in interior dense-index order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn argmax(&self) -> Vertex {
        self.argmax
    }

    pub fn max(&self) -> f64 {
        self.max
    }
}

pub fn variance_profile(g: &GreenOperator) -> VarianceProfile {
    let values = g.diagonal();
    let (mut argmax_i, mut max) = (0, f64::NEG_INFINITY);
    for (i, &v) in values.iter().enumerate() {
        if v > max {
            max = v;
            argmax_i = i;
        }
    }
    VarianceProfile {
        argmax: g.region().interior()[argmax_i],
        values,
        max,
    }
}

/// Covariance and correlation for requested vertex pairs.
#[derive(Debug, Clone)]
pub struct CorrelationReport {
    pub pairs: Vec<CorrelationEntry>,
}

#[derive(Debug, Clone, Copy)]
pub struct CorrelationEntry {
    pub u: Vertex,
    pub w: Vertex,
    pub covariance: f64,
    pub correlation: f64,
}

pub fn correlation(g: &GreenOperator, pairs: &[(Vertex, Vertex)]) -> Result<CorrelationReport> {
    let mut out = Vec::with_capacity(pairs.len());
    for &(u, w) in pairs {
        if g.region().interior_index(u).is_none() || g.region().interior_index(w).is_none() {
            return Err(Error::InvalidArgument(format!(
                "correlation pair ({u:?}, {w:?}) must be interior"
            )));
        }
        let covariance = g.entry(u, w);
        let var_u = g.entry(u, u);
        let var_w = g.entry(w, w);
        out.push(CorrelationEntry {
            u,
            w,
            covariance,
            correlation: covariance / (var_u * var_w).sqrt(),
        });
    }
    Ok(CorrelationReport { pairs: out })
}

/// Green value via the potential-kernel identity
/// G(u,v) = Σ_w P_u(exit at w)·a(w−v) − a(u−v). The flag is true when any
/// offset fell outside the exact kernel table and the asymptotic was used.
pub fn green_via_potential(
    region: &Region,
    u: Vertex,
    v: Vertex,
    kernel: &PotentialKernel,
    hk: &HarmonicKernel,
) -> Result<(f64, bool)> {
    if region.interior_index(u).is_none() || region.interior_index(v).is_none() {
        return Err(Error::InvalidArgument(
            "green_via_potential endpoints must be interior".into(),
        ));
    }
    let mut used_asymptotic = false;
    let row = hk.row(u);
    let mut expectation = 0.0;
    for (w, weight) in region.boundary().iter().zip(row) {
        let (val, fallback) = kernel.a_or_asymptotic((w.x - v.x, w.y - v.y));
        used_asymptotic |= fallback;
        expectation += weight * val;
    }
    let (a_uv, fallback) = kernel.a_or_asymptotic((u.x - v.x, u.y - v.y));
    used_asymptotic |= fallback;
    Ok((expectation - a_uv, used_asymptotic))
}

/// Minimum pivot of an LDLᵀ factorization; a PSD matrix has all pivots
/// ≥ −roundoff.
pub fn min_ldl_pivot(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let mut l = DMatrix::<f64>::identity(n, n);
    let mut d = vec![0.0; n];
    let mut min_pivot = f64::INFINITY;
    for k in 0..n {
        let mut dk = a[(k, k)];
        for j in 0..k {
            dk -= l[(k, j)] * l[(k, j)] * d[j];
        }
        d[k] = dk;
        min_pivot = min_pivot.min(dk);
        if dk.abs() < 1e-300 {
            break;
        }
        for i in (k + 1)..n {
            let mut v = a[(i, k)];
            for j in 0..k {
                v -= l[(i, j)] * l[(k, j)] * d[j];
            }
            l[(i, k)] = v / dk;
        }
    }
    min_pivot
}

/// P_u(τ_v < τ_boundary): probability the walk visits `v` before the
/// boundary, by an exact solve with `v` adjoined to the absorbing set.
pub fn visit_before_exit(region: &Region, u: Vertex, v: Vertex) -> Result<f64> {
    if u == v {
        return Ok(1.0);
    }
    if region.interior_index(u).is_none() || region.interior_index(v).is_none() {
        return Err(Error::InvalidArgument(
            "visit_before_exit endpoints must be interior".into(),
        ));
    }
    let sys = DirichletSystem::new(region, &[v])?;
    let b = sys.rhs(|w| if w == v { 1.0 } else { 0.0 });
    let h = sys.solve_cg(&b, 1e-12)?;
    let i = sys
        .unknowns()
        .iter()
        .position(|&w| w == u)
        .expect("u is an unknown");
    Ok(h[i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_ball;
    use crate::walk::{harmonic_measure, potential_kernel};

    #[test]
    fn single_interior_vertex_green_is_one() {
        let region = build_box(2, Vertex::new(0, 0)).unwrap();
        let g = green_dense(&region).unwrap();
        assert_eq!(g.entry(Vertex::new(1, 1), Vertex::new(1, 1)), 1.0);
    }

    #[test]
    fn five_box_center_green_three_halves() {
        // first-step analysis: return probability 1/3, so G = 1/(1−1/3)
        let region = build_box(4, Vertex::new(0, 0)).unwrap();
        let g = green_dense(&region).unwrap();
        let c = Vertex::new(2, 2);
        assert!((g.entry(c, c) - 1.5).abs() < 1e-10);
    }

    #[test]
    fn dense_matrix_is_symmetric_and_nonnegative() {
        let ball = build_ball(Vertex::new(0, 0), 5).unwrap();
        let g = green_dense(&ball.region).unwrap();
        let m = g.to_dense_matrix();
        for i in 0..m.nrows() {
            for j in 0..i {
                assert!((m[(i, j)] - m[(j, i)]).abs() < 1e-12);
            }
        }
        assert!(m.iter().all(|&v| v >= -1e-12));
        // diagonal dominance of visits
        for j in 0..m.ncols() {
            let d = m[(j, j)];
            assert!(d >= 1.0);
            for i in 0..m.nrows() {
                assert!(m[(i, j)] <= d + 1e-12);
            }
        }
    }

    #[test]
    fn dense_residual_small() {
        let region = build_box(8, Vertex::new(0, 0)).unwrap();
        let g = green_dense(&region).unwrap();
        let sys = DirichletSystem::new(&region, &[]).unwrap();
        let a = sys.dense_matrix();
        let res = (&a * g.to_dense_matrix() - DMatrix::<f64>::identity(a.nrows(), a.ncols()))
            .abs()
            .max();
        assert!(res < 1e-10, "residual {res}");
    }

    #[test]
    fn spectral_single_mode_case() {
        let g = green_spectral(2).unwrap();
        let c = Vertex::new(1, 1);
        assert!((g.entry(c, c) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn spectral_matches_dense() {
        for n in [4, 8, 16] {
            let gs = green_spectral(n).unwrap();
            let gd = green_dense(gs.region()).unwrap();
            let ms = gs.to_dense_matrix();
            let md = gd.to_dense_matrix();
            let delta = (ms - md).abs().max();
            assert!(delta <= 1e-8, "n={n} delta={delta}");
        }
    }

    #[test]
    fn spectral_entry_column_diag_consistent() {
        let g = green_spectral(9).unwrap();
        let v = Vertex::new(3, 5);
        let col = g.column(v);
        for (ui, &u) in g.region().interior().iter().enumerate() {
            assert!((col[ui] - g.entry(u, v)).abs() < 1e-11);
        }
        let diag = g.diagonal();
        for (ui, &u) in g.region().interior().iter().enumerate() {
            assert!((diag[ui] - g.entry(u, u)).abs() < 1e-11);
        }
    }

    #[test]
    fn dense_cap_enforced() {
        let region = build_box(8, Vertex::new(0, 0)).unwrap();
        assert!(matches!(
            green_dense_with_cap(&region, 10),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn disconnected_interior_independent_blocks() {
        // two 3×3 boxes far apart form one region with two interior vertices
        let mut vs: Vec<Vertex> = build_box(2, Vertex::new(0, 0)).unwrap().vertices().to_vec();
        vs.extend_from_slice(build_box(2, Vertex::new(10, 0)).unwrap().vertices());
        let region = Region::from_vertices(vs).unwrap();
        assert_eq!(region.interior_len(), 2);
        let g = green_dense(&region).unwrap();
        let a = Vertex::new(1, 1);
        let b = Vertex::new(11, 1);
        assert_eq!(g.entry(a, a), 1.0);
        assert_eq!(g.entry(b, b), 1.0);
        assert_eq!(g.entry(a, b), 0.0);
    }

    #[test]
    fn identity_matches_dense_on_five_box() {
        let region = build_box(4, Vertex::new(0, 0)).unwrap();
        let kernel = potential_kernel(8).unwrap();
        let hk = harmonic_measure(&region).unwrap();
        let c = Vertex::new(2, 2);
        let (value, fallback) = green_via_potential(&region, c, c, &kernel, &hk).unwrap();
        assert!(!fallback);
        assert!((value - 1.5).abs() < 1e-6, "identity value {value}");
        // u = v has a(u−v) = 0, so the value is the exit expectation alone
        let row = hk.row(c);
        let direct: f64 = region
            .boundary()
            .iter()
            .zip(row)
            .map(|(w, p)| p * kernel.a((w.x - c.x, w.y - c.y)).unwrap())
            .sum();
        assert!((value - direct).abs() < 1e-12);
    }

    #[test]
    fn identity_uses_asymptotic_when_table_short() {
        let region = build_box(8, Vertex::new(0, 0)).unwrap();
        let kernel = potential_kernel(2).unwrap();
        let hk = harmonic_measure(&region).unwrap();
        let (_, fallback) =
            green_via_potential(&region, Vertex::new(1, 1), Vertex::new(7, 7), &kernel, &hk)
                .unwrap();
        assert!(fallback);
    }

    #[test]
    fn factorization_through_visit_probability() {
        let region = build_box(8, Vertex::new(0, 0)).unwrap();
        let g = green_dense(&region).unwrap();
        let u = Vertex::new(2, 3);
        let v = Vertex::new(5, 5);
        let p = visit_before_exit(&region, u, v).unwrap();
        let lhs = g.entry(u, v);
        let rhs = p * g.entry(v, v);
        assert!((lhs - rhs).abs() < 1e-8, "lhs {lhs} rhs {rhs}");
    }

    #[test]
    fn correlation_normalizes_to_one_on_diagonal() {
        let g = green_spectral(8).unwrap();
        let c = Vertex::new(4, 4);
        let rep = correlation(&g, &[(c, c), (c, Vertex::new(3, 4))]).unwrap();
        assert!((rep.pairs[0].correlation - 1.0).abs() < 1e-12);
        assert!(rep.pairs[1].correlation > 0.0 && rep.pairs[1].correlation < 1.0);
    }

    #[test]
    fn profile_symmetric_and_centered() {
        for n in [8, 16] {
            let g = green_spectral(n).unwrap();
            let profile = variance_profile(&g);
            let center = Vertex::new(n / 2, n / 2);
            assert_eq!(profile.argmax(), center);
            // 8-fold symmetry of the box
            let idx = |v: Vertex| g.region().interior_index(v).unwrap();
            let vals = profile.values();
            let v = Vertex::new(2, 3);
            let images = [
                Vertex::new(2, 3),
                Vertex::new(3, 2),
                Vertex::new(n - 2, 3),
                Vertex::new(n - 3, 2),
                Vertex::new(2, n - 3),
                Vertex::new(3, n - 2),
                Vertex::new(n - 2, n - 3),
                Vertex::new(n - 3, n - 2),
            ];
            for im in images {
                assert!((vals[idx(v)] - vals[idx(im)]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn profile_growth_rate_log() {
        let g1 = variance_profile(&green_spectral(64).unwrap()).max();
        let g2 = variance_profile(&green_spectral(128).unwrap()).max();
        let predicted = 2.0 / std::f64::consts::PI * 2.0f64.ln();
        assert!(
            ((g2 - g1) - predicted).abs() <= 0.05,
            "growth {} predicted {}",
            g2 - g1,
            predicted
        );
    }

    #[test]
    fn green_matrix_is_psd() {
        let region = build_box(6, Vertex::new(0, 0)).unwrap();
        let g = green_dense(&region).unwrap();
        assert!(min_ldl_pivot(&g.to_dense_matrix()) >= -1e-10);
    }
}

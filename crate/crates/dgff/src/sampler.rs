//! Samplers for the DGFF: a fast spectral sampler on boxes, a Cholesky
//! sampler on general regions, harmonic extension of boundary data, and the
//! conditional (Markov-decomposition) sampler that assembles an outer field
//! from inner-boundary data plus independent inner fields.
//!
//! Every sampler is a pure function of `(seed, replicate)`. Gaussians are
//! drawn from the replicate's ChaCha stream in a fixed order (spectral: mode
//! index; Cholesky: interior index), so samples are bitwise reproducible
//! across runs and thread counts.

use std::io::{self, Write};

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::green::{green_dense, green_spectral, GreenOperator};
use crate::lattice::{Region, Vertex};
use crate::rng::{derive_seed, replicate_rng};
use crate::walk::{harmonic_measure, HarmonicKernel};

/// One realization of the field over a region's interior; the boundary is
/// implicitly zero.
#[derive(Debug, Clone)]
pub struct FieldSample {
    pub values: Vec<f64>,
    pub seed: u64,
    pub replicate: u64,
}

impl FieldSample {
    /// Value at an interior vertex of the sampler's region.
    pub fn value(&self, region: &Region, v: Vertex) -> f64 {
        match region.interior_index(v) {
            Some(i) => self.values[i],
            None => 0.0,
        }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Spectral sampler on the box of side n: η = Σ sqrt(4/λ_jk)·Z_jk·f̂_jk,
/// realized by one 2D sine transform per sample. The law has covariance
/// exactly equal to the spectral Green operator.
pub struct SpectralSampler {
    green: GreenOperator,
    n: usize,
    mode_scales: Vec<f64>,
}

impl SpectralSampler {
    pub fn new(n: i32) -> Result<SpectralSampler> {
        let green = green_spectral(n)?;
        let (n, mode_scales, _) = green
            .spectral_mode_scales()
            .map(|(n, s, p)| (n, s, p.n()))
            .expect("spectral backend");
        Ok(SpectralSampler {
            green,
            n,
            mode_scales,
        })
    }

    pub fn region(&self) -> &Region {
        self.green.region()
    }

    pub fn green(&self) -> &GreenOperator {
        &self.green
    }

    pub fn side(&self) -> usize {
        self.n
    }

    pub fn sample(&self, seed: u64, replicate: u64) -> FieldSample {
        let m = self.n - 1;
        let mut rng = replicate_rng(seed, replicate);
        let mut coef = vec![0.0; m * m];
        for (c, &scale) in coef.iter_mut().zip(&self.mode_scales) {
            let z: f64 = rng.sample(StandardNormal);
            *c = scale * z;
        }
        let (_, _, plan) = self.green.spectral_mode_scales().expect("spectral backend");
        let mut scratch = plan.make_scratch();
        plan.transform_2d(&mut coef, &mut scratch);
        FieldSample {
            values: coef,
            seed,
            replicate,
        }
    }
}

/// Convenience one-shot spectral sample.
pub fn sample_spectral(n: i32, seed: u64, replicate: u64) -> Result<FieldSample> {
    Ok(SpectralSampler::new(n)?.sample(seed, replicate))
}

/// Cholesky sampler on a general region: η = C·z with C·Cᵀ the dense Green
/// matrix.
pub struct CholeskySampler {
    region: Region,
    factor: DMatrix<f64>,
}

impl CholeskySampler {
    pub fn new(region: &Region) -> Result<CholeskySampler> {
        let green = green_dense(region)?;
        let factor = Cholesky::new(green.to_dense_matrix())
            .ok_or_else(|| Error::Internal("Green matrix not positive definite".into()))?
            .unpack();
        Ok(CholeskySampler {
            region: region.clone(),
            factor,
        })
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn sample(&self, seed: u64, replicate: u64) -> FieldSample {
        let m = self.region.interior_len();
        let mut rng = replicate_rng(seed, replicate);
        let z = DVector::from_fn(m, |_, _| rng.sample(StandardNormal));
        let values = (&self.factor * z).iter().copied().collect();
        FieldSample {
            values,
            seed,
            replicate,
        }
    }
}

/// Convenience one-shot Cholesky sample.
pub fn sample_cholesky(region: &Region, seed: u64, replicate: u64) -> Result<FieldSample> {
    Ok(CholeskySampler::new(region)?.sample(seed, replicate))
}

/// Harmonic extension of boundary data: φ_v = Σ_u P_v(exit at u)·value(u).
/// `boundary_values` must cover every boundary vertex of the kernel's
/// region.
pub fn harmonic_extension(
    hk: &HarmonicKernel,
    boundary_values: &dyn Fn(Vertex) -> Option<f64>,
) -> Result<Vec<f64>> {
    let region = hk.region();
    let mut data = Vec::with_capacity(region.boundary().len());
    for &u in region.boundary() {
        match boundary_values(u) {
            Some(v) => data.push(v),
            None => {
                return Err(Error::InvalidArgument(format!(
                    "missing boundary value at {u:?}"
                )))
            }
        }
    }
    let data = DVector::from_vec(data);
    Ok((hk.weights() * data).iter().copied().collect())
}

/// One conditional sample: the coarse harmonic part, the independent fine
/// fields, and their sum, per inner region.
#[derive(Debug, Clone)]
pub struct DecompositionSample {
    /// φ over each inner region's interior (harmonic extension of the drawn
    /// inner-boundary data).
    pub coarse: Vec<Vec<f64>>,
    /// Independent zero-boundary field per inner region.
    pub fine: Vec<Vec<f64>>,
    /// coarse + fine, vertexwise.
    pub total: Vec<Vec<f64>>,
}

/// Conditional sampler for an outer region partitioned (or packed) into
/// disjoint inner regions: draws the outer field restricted to the union of
/// inner boundaries from its exact covariance, extends it harmonically into
/// each inner region, and adds independent inner fields. The assembled total
/// is distributed as the outer field restricted to the inner interiors.
pub struct ConditionalSampler {
    inners: Vec<Region>,
    // vertices of the union of inner boundaries that are interior to the
    // outer region (outer-boundary vertices are pinned to zero)
    free: Vec<Vertex>,
    factor: DMatrix<f64>,
    kernels: Vec<HarmonicKernel>,
    fine: Vec<CholeskySampler>,
}

impl ConditionalSampler {
    pub fn new(outer: &Region, inners: &[Region]) -> Result<ConditionalSampler> {
        if inners.is_empty() {
            return Err(Error::InvalidArgument("no inner regions".into()));
        }
        for (i, a) in inners.iter().enumerate() {
            if !outer.contains_region(a) {
                return Err(Error::InvalidArgument(format!(
                    "inner region {i} is not contained in the outer region"
                )));
            }
            for b in &inners[i + 1..] {
                if a.interior().iter().any(|&v| b.is_interior(v)) {
                    return Err(Error::InvalidArgument(
                        "inner regions have overlapping interiors".into(),
                    ));
                }
            }
        }
        // union of inner boundaries, deduplicated, in a fixed order
        let mut boundary_union: Vec<Vertex> = inners
            .iter()
            .flat_map(|r| r.boundary().iter().copied())
            .collect();
        boundary_union.sort_by_key(|v| (v.y, v.x));
        boundary_union.dedup();
        let free: Vec<Vertex> = boundary_union
            .iter()
            .copied()
            .filter(|&v| outer.is_interior(v))
            .collect();

        // exact covariance of the outer field on the free vertices
        let outer_green = outer_green_operator(outer)?;
        let k = free.len();
        let mut cov = DMatrix::<f64>::zeros(k, k);
        for (j, &v) in free.iter().enumerate() {
            let col = outer_green.column(v);
            for (i, &u) in free.iter().enumerate() {
                cov[(i, j)] = col[outer.interior_index(u).expect("free vertex interior")];
            }
        }
        let factor = if k == 0 {
            DMatrix::<f64>::zeros(0, 0)
        } else {
            Cholesky::new(cov)
                .ok_or_else(|| {
                    Error::Internal("inner-boundary covariance not positive definite".into())
                })?
                .unpack()
        };

        let kernels = inners
            .iter()
            .map(harmonic_measure)
            .collect::<Result<Vec<_>>>()?;
        let fine = inners
            .iter()
            .map(CholeskySampler::new)
            .collect::<Result<Vec<_>>>()?;
        Ok(ConditionalSampler {
            inners: inners.to_vec(),
            free,
            factor,
            kernels,
            fine,
        })
    }

    pub fn inners(&self) -> &[Region] {
        &self.inners
    }

    pub fn sample(&self, seed: u64, replicate: u64) -> DecompositionSample {
        // boundary draw and each fine field get their own derived streams
        let mut rng = replicate_rng(derive_seed(seed, 0), replicate);
        let k = self.free.len();
        let z = DVector::from_fn(k, |_, _| rng.sample(StandardNormal));
        let eta = &self.factor * z;
        let boundary_value = |v: Vertex| -> Option<f64> {
            match self.free.iter().position(|&u| u == v) {
                Some(i) => Some(eta[i]),
                None => Some(0.0), // pinned on the outer boundary
            }
        };
        let mut coarse = Vec::with_capacity(self.inners.len());
        let mut fine = Vec::with_capacity(self.inners.len());
        let mut total = Vec::with_capacity(self.inners.len());
        for (i, kernel) in self.kernels.iter().enumerate() {
            let phi = harmonic_extension(kernel, &boundary_value)
                .expect("inner boundary covered by construction");
            let g = self.fine[i].sample(derive_seed(seed, 1 + i as u64), replicate);
            let sum: Vec<f64> = phi.iter().zip(&g.values).map(|(a, b)| a + b).collect();
            coarse.push(phi);
            fine.push(g.values);
            total.push(sum);
        }
        DecompositionSample {
            coarse,
            fine,
            total,
        }
    }
}

/// Pick the Green backend for the outer region: spectral when it is a box at
/// the origin, dense otherwise.
fn outer_green_operator(outer: &Region) -> Result<GreenOperator> {
    match outer.box_side() {
        Some(n) if outer.origin() == Vertex::new(0, 0) => green_spectral(n),
        _ => green_dense(outer),
    }
}

/// Field sampler that picks the spectral backend for boxes at the origin and
/// falls back to Cholesky for everything else.
pub enum AnySampler {
    Spectral(SpectralSampler),
    Cholesky(CholeskySampler),
}

impl AnySampler {
    pub fn for_region(region: &Region) -> Result<AnySampler> {
        match region.box_side() {
            Some(n) if region.origin() == Vertex::new(0, 0) => {
                Ok(AnySampler::Spectral(SpectralSampler::new(n)?))
            }
            _ => Ok(AnySampler::Cholesky(CholeskySampler::new(region)?)),
        }
    }

    pub fn region(&self) -> &Region {
        match self {
            AnySampler::Spectral(s) => s.region(),
            AnySampler::Cholesky(s) => s.region(),
        }
    }

    pub fn sample(&self, seed: u64, replicate: u64) -> FieldSample {
        match self {
            AnySampler::Spectral(s) => s.sample(seed, replicate),
            AnySampler::Cholesky(s) => s.sample(seed, replicate),
        }
    }
}

/// Binary sample dump: four little-endian u64 header fields
/// (n, seed, first replicate, count) followed by count·(n−1)² little-endian
/// f64 interior values in row-major order.
pub fn write_sample_dump(
    mut w: impl Write,
    n: u64,
    seed: u64,
    first_replicate: u64,
    samples: &[FieldSample],
) -> io::Result<()> {
    w.write_all(&n.to_le_bytes())?;
    w.write_all(&seed.to_le_bytes())?;
    w.write_all(&first_replicate.to_le_bytes())?;
    w.write_all(&(samples.len() as u64).to_le_bytes())?;
    for s in samples {
        for v in &s.values {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_ball, build_box};
    use crate::par::replicate_map;
    use crate::stats;

    #[test]
    fn spectral_sample_deterministic() {
        let s = SpectralSampler::new(8).unwrap();
        let a = s.sample(123, 4);
        let b = s.sample(123, 4);
        assert_eq!(a.values, b.values);
        let c = s.sample(123, 5);
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn single_vertex_box_is_standard_normal() {
        let s = SpectralSampler::new(2).unwrap();
        let reps = 50_000u64;
        let values = replicate_map(reps, |r| s.sample(7, r).values[0]);
        let mean = stats::mean(&values);
        let var = stats::variance(&values);
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.03, "var {var}");
    }

    #[test]
    fn cholesky_single_vertex_unit_variance() {
        let region = build_box(2, Vertex::new(0, 0)).unwrap();
        let s = CholeskySampler::new(&region).unwrap();
        let reps = 100_000u64;
        let values = replicate_map(reps, |r| s.sample(3, r).values[0]);
        let var = stats::variance(&values);
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn spectral_empirical_covariance_matches_green() {
        let n = 8;
        let s = SpectralSampler::new(n).unwrap();
        let reps = 40_000u64;
        let samples = replicate_map(reps, |r| s.sample(11, r).values);
        let region = s.region().clone();
        let g = s.green();
        // a few fixed pairs across the box
        let pairs = [
            (Vertex::new(4, 4), Vertex::new(4, 4)),
            (Vertex::new(4, 4), Vertex::new(3, 4)),
            (Vertex::new(1, 1), Vertex::new(6, 6)),
            (Vertex::new(2, 5), Vertex::new(5, 2)),
        ];
        for (u, v) in pairs {
            let ui = region.interior_index(u).unwrap();
            let vi = region.interior_index(v).unwrap();
            let prods: Vec<f64> = samples.iter().map(|s| s[ui] * s[vi]).collect();
            let emp = stats::mean(&prods);
            let exact = g.entry(u, v);
            let sigma = ((g.entry(u, u) * g.entry(v, v) + exact * exact) / reps as f64).sqrt();
            assert!(
                (emp - exact).abs() <= 5.0 * sigma,
                "pair {u:?},{v:?}: emp {emp} exact {exact} sigma {sigma}"
            );
        }
    }

    #[test]
    fn cholesky_ball_covariance_matches_green() {
        let ball = build_ball(Vertex::new(0, 0), 4).unwrap();
        let s = CholeskySampler::new(&ball.region).unwrap();
        let g = green_dense(&ball.region).unwrap();
        let reps = 30_000u64;
        let samples = replicate_map(reps, |r| s.sample(21, r).values);
        let u = Vertex::new(0, 0);
        let v = Vertex::new(1, -1);
        let ui = ball.region.interior_index(u).unwrap();
        let vi = ball.region.interior_index(v).unwrap();
        let prods: Vec<f64> = samples.iter().map(|s| s[ui] * s[vi]).collect();
        let emp = stats::mean(&prods);
        let exact = g.entry(u, v);
        let sigma = ((g.entry(u, u) * g.entry(v, v) + exact * exact) / reps as f64).sqrt();
        assert!((emp - exact).abs() <= 5.0 * sigma);
    }

    #[test]
    fn spectral_and_cholesky_same_law() {
        // two-sample KS on the per-sample maximum at n = 8
        let n = 8;
        let spectral = SpectralSampler::new(n).unwrap();
        let region = spectral.region().clone();
        let chol = CholeskySampler::new(&region).unwrap();
        let reps = 8_000u64;
        let a = replicate_map(reps, |r| spectral.sample(31, r).max());
        let b = replicate_map(reps, |r| chol.sample(32, r).max());
        let (_, p) = stats::ks_two_sample(&a, &b);
        assert!(p > 0.01, "KS p = {p}");
    }

    #[test]
    fn extension_of_constant_boundary_is_constant() {
        let region = build_box(6, Vertex::new(0, 0)).unwrap();
        let hk = harmonic_measure(&region).unwrap();
        let phi = harmonic_extension(&hk, &|_| Some(2.5)).unwrap();
        for v in phi {
            assert!((v - 2.5).abs() < 1e-10);
        }
        let zero = harmonic_extension(&hk, &|_| Some(0.0)).unwrap();
        assert!(zero.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn extension_is_linear() {
        let region = build_box(5, Vertex::new(0, 0)).unwrap();
        let hk = harmonic_measure(&region).unwrap();
        let f = |v: Vertex| Some((v.x as f64).sin());
        let g = |v: Vertex| Some((v.y as f64).cos());
        let combo = |v: Vertex| Some(2.0 * (v.x as f64).sin() - 3.0 * (v.y as f64).cos());
        let ef = harmonic_extension(&hk, &f).unwrap();
        let eg = harmonic_extension(&hk, &g).unwrap();
        let ec = harmonic_extension(&hk, &combo).unwrap();
        for i in 0..ef.len() {
            assert!((ec[i] - (2.0 * ef[i] - 3.0 * eg[i])).abs() < 1e-12);
        }
    }

    #[test]
    fn extension_missing_value_rejected() {
        let region = build_box(4, Vertex::new(0, 0)).unwrap();
        let hk = harmonic_measure(&region).unwrap();
        let partial = |v: Vertex| if v.x == 0 { None } else { Some(1.0) };
        assert!(harmonic_extension(&hk, &partial).is_err());
    }

    #[test]
    fn extension_indicator_side_golden() {
        // boundary data = indicator of the bottom side: φ(center) equals the
        // sum of that side's harmonic-measure weights
        let region = build_box(4, Vertex::new(0, 0)).unwrap();
        let hk = harmonic_measure(&region).unwrap();
        let indicator = |v: Vertex| Some(if v.y == 0 { 1.0 } else { 0.0 });
        let phi = harmonic_extension(&hk, &indicator).unwrap();
        let c = Vertex::new(2, 2);
        let ci = region.interior_index(c).unwrap();
        let direct: f64 = region
            .boundary()
            .iter()
            .filter(|u| u.y == 0)
            .map(|&u| hk.weight(c, u))
            .sum();
        assert!((phi[ci] - direct).abs() < 1e-12);
        // by symmetry of the four sides the center value is 1/4
        assert!((phi[ci] - 0.25).abs() < 1e-10);
    }

    #[test]
    fn degenerate_partition_reduces_to_direct_field() {
        let outer = build_box(8, Vertex::new(0, 0)).unwrap();
        let cs = ConditionalSampler::new(&outer, std::slice::from_ref(&outer)).unwrap();
        let s = cs.sample(5, 0);
        assert!(s.coarse[0].iter().all(|&v| v == 0.0));
        for (t, f) in s.total[0].iter().zip(&s.fine[0]) {
            assert_eq!(t, f);
        }
    }

    #[test]
    fn overlapping_inners_rejected() {
        let outer = build_box(8, Vertex::new(0, 0)).unwrap();
        let a = build_box(4, Vertex::new(0, 0)).unwrap();
        let b = build_box(4, Vertex::new(2, 2)).unwrap();
        assert!(ConditionalSampler::new(&outer, &[a, b]).is_err());
        let outside = build_box(4, Vertex::new(7, 7)).unwrap();
        let out2 = build_box(8, Vertex::new(0, 0)).unwrap();
        assert!(ConditionalSampler::new(&out2, &[outside]).is_err());
    }

    #[test]
    fn decomposition_total_matches_outer_covariance() {
        // outer 8-box partitioned into four 4-boxes
        let outer = build_box(8, Vertex::new(0, 0)).unwrap();
        let inners: Vec<Region> = [(0, 0), (4, 0), (0, 4), (4, 4)]
            .iter()
            .map(|&(x, y)| build_box(4, Vertex::new(x, y)).unwrap())
            .collect();
        let cs = ConditionalSampler::new(&outer, &inners).unwrap();
        let g = green_dense(&outer).unwrap();
        let reps = 40_000u64;
        let samples = replicate_map(reps, |r| cs.sample(17, r));
        // pairs across different inner regions and within one
        let checks = [
            ((0usize, Vertex::new(2, 2)), (0usize, Vertex::new(1, 2))),
            ((0, Vertex::new(2, 2)), (3, Vertex::new(6, 6))),
            ((1, Vertex::new(6, 2)), (2, Vertex::new(2, 6))),
        ];
        for ((ri, u), (rj, v)) in checks {
            let ui = inners[ri].interior_index(u).unwrap();
            let vi = inners[rj].interior_index(v).unwrap();
            let prods: Vec<f64> = samples
                .iter()
                .map(|s| s.total[ri][ui] * s.total[rj][vi])
                .collect();
            let emp = stats::mean(&prods);
            let exact = g.entry(u, v);
            let sigma = ((g.entry(u, u) * g.entry(v, v) + exact * exact) / reps as f64).sqrt();
            assert!(
                (emp - exact).abs() <= 5.0 * sigma,
                "pair {u:?},{v:?}: emp {emp} exact {exact}"
            );
        }
    }

    #[test]
    fn coarse_and_fine_uncorrelated() {
        let outer = build_box(8, Vertex::new(0, 0)).unwrap();
        let inners = vec![build_box(4, Vertex::new(2, 2)).unwrap()];
        let cs = ConditionalSampler::new(&outer, &inners).unwrap();
        let reps = 20_000u64;
        let samples = replicate_map(reps, |r| cs.sample(23, r));
        let v = Vertex::new(4, 4);
        let vi = inners[0].interior_index(v).unwrap();
        let coarse: Vec<f64> = samples.iter().map(|s| s.coarse[0][vi]).collect();
        let fine: Vec<f64> = samples.iter().map(|s| s.fine[0][vi]).collect();
        let mc = stats::mean(&coarse);
        let mf = stats::mean(&fine);
        let cov: f64 = coarse
            .iter()
            .zip(&fine)
            .map(|(a, b)| (a - mc) * (b - mf))
            .sum::<f64>()
            / reps as f64;
        let corr = cov / (stats::variance(&coarse) * stats::variance(&fine)).sqrt();
        assert!(corr.abs() <= 4.0 / (reps as f64).sqrt(), "corr {corr}");
    }

    #[test]
    fn sample_dump_layout() {
        let s = sample_spectral(2, 9, 0).unwrap();
        let mut buf = Vec::new();
        write_sample_dump(&mut buf, 2, 9, 0, &[s.clone()]).unwrap();
        assert_eq!(buf.len(), 32 + 8);
        assert_eq!(u64::from_le_bytes(buf[0..8].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(buf[8..16].try_into().unwrap()), 9);
        assert_eq!(u64::from_le_bytes(buf[24..32].try_into().unwrap()), 1);
        let v = f64::from_le_bytes(buf[32..40].try_into().unwrap());
        assert_eq!(v, s.values[0]);
    }
}

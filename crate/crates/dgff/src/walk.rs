//! Random-walk potential theory on Z²: the potential kernel, harmonic
//! measure, exact hitting probabilities, and Monte Carlo hitting estimators.

use std::collections::HashSet;
use std::io::{self, Write};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand_chacha::rand_core::RngCore;

use crate::error::{Error, Result};
use crate::lattice::{annulus_outer_ring, build_annulus, neighbors, Region, Vertex};
use crate::par::replicate_map;
use crate::rng::replicate_rng;
use crate::solve::DirichletSystem;

/// Largest table radius the exact builder will accept. The rational
/// intermediates grow like 5.83^radius, so digits (and cost) scale linearly
/// in the radius; this cap keeps construction under a second and well inside
/// memory.
pub const MAX_KERNEL_RADIUS: i32 = 512;

/// Potential kernel a(·) of simple random walk on Z², tabulated exactly for
/// |z|∞ ≤ max_radius.
///
/// a(0) = 0, a is discrete-harmonic away from the origin, and the
/// neighbor-average at the origin is 1. Far from the origin
/// a(z) = (2/π)log|z| + κ₀ + O(|z|⁻²); κ₀ is not hardcoded but calibrated
/// from the tail of the exact table.
pub struct PotentialKernel {
    max_radius: i32,
    // octant 0 <= y <= x <= max_radius, index x(x+1)/2 + y
    octant: Vec<f64>,
    kappa0: f64,
}

/// Build the exact kernel table by the McCrea–Whipple axis recurrence:
/// a(0,0)=0, a(1,0)=1, closed-form diagonal, everything else filled by
/// harmonicity. The recurrence is carried out in exact rational arithmetic
/// (every entry is p + q/π with rational p, q) because in floating point the
/// column march amplifies roundoff by ≈5.83 per step and would break down
/// past radius ~10.
pub fn potential_kernel(max_radius: i32) -> Result<PotentialKernel> {
    if max_radius < 1 {
        return Err(Error::InvalidArgument(format!(
            "kernel radius must be >= 1, got {max_radius}"
        )));
    }
    if max_radius > MAX_KERNEL_RADIUS {
        return Err(Error::ResourceLimit(format!(
            "kernel radius {max_radius} exceeds cap {MAX_KERNEL_RADIUS}"
        )));
    }
    let octant = build_octant_exact(max_radius);
    let kappa0 = calibrate_kappa0(max_radius, &octant);
    Ok(PotentialKernel {
        max_radius,
        octant,
        kappa0,
    })
}

impl PotentialKernel {
    pub fn max_radius(&self) -> i32 {
        self.max_radius
    }

    /// Additive constant of the logarithmic asymptotic, calibrated by least
    /// squares over the exact table tail.
    pub fn kappa0(&self) -> f64 {
        self.kappa0
    }

    /// True if the exact table covers offset `z` (|z|∞ ≤ max_radius).
    pub fn covers(&self, z: (i32, i32)) -> bool {
        z.0.abs() <= self.max_radius && z.1.abs() <= self.max_radius
    }

    /// Exact table value a(z). None if outside the table.
    pub fn a(&self, z: (i32, i32)) -> Option<f64> {
        if !self.covers(z) {
            return None;
        }
        let (x, y) = fold_octant(z);
        Some(self.octant[oct_index(x, y)])
    }

    /// a(z) from the table when covered, falling back to the asymptotic.
    /// The flag is true when the asymptotic was used.
    pub fn a_or_asymptotic(&self, z: (i32, i32)) -> (f64, bool) {
        match self.a(z) {
            Some(v) => (v, false),
            None => (self.asymptotic(z).expect("nonzero offset"), true),
        }
    }

    /// Logarithmic asymptotic (2/π)log|z| + κ₀. Depends only on |z|.
    pub fn asymptotic(&self, z: (i32, i32)) -> Result<f64> {
        if z == (0, 0) {
            return Err(Error::InvalidArgument(
                "potential-kernel asymptotic is undefined at the origin".into(),
            ));
        }
        let norm = ((z.0 as f64).powi(2) + (z.1 as f64).powi(2)).sqrt();
        Ok(2.0 / std::f64::consts::PI * norm.ln() + self.kappa0)
    }

    /// CSV dump `dx,dy,value` over the full table square.
    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "dx,dy,value")?;
        for dy in -self.max_radius..=self.max_radius {
            for dx in -self.max_radius..=self.max_radius {
                let v = self.a((dx, dy)).unwrap();
                writeln!(w, "{dx},{dy},{v:.16e}")?;
            }
        }
        Ok(())
    }
}

#[inline]
fn fold_octant(z: (i32, i32)) -> (i32, i32) {
    let x = z.0.abs();
    let y = z.1.abs();
    if x >= y {
        (x, y)
    } else {
        (y, x)
    }
}

#[inline]
fn oct_index(x: i32, y: i32) -> usize {
    debug_assert!(0 <= y && y <= x);
    (x as usize) * (x as usize + 1) / 2 + y as usize
}

/// Exact entry: value = p + q/π.
#[derive(Clone)]
struct Exact {
    p: BigRational,
    q: BigRational,
}

impl Exact {
    fn zero() -> Exact {
        Exact {
            p: BigRational::zero(),
            q: BigRational::zero(),
        }
    }
}

fn exact_combine(terms: &[(&Exact, i64)]) -> Exact {
    let mut p = BigRational::zero();
    let mut q = BigRational::zero();
    for &(e, c) in terms {
        let c = BigRational::from_integer(BigInt::from(c));
        p += &c * &e.p;
        q += &c * &e.q;
    }
    Exact { p, q }
}

fn build_octant_exact(max_radius: i32) -> Vec<f64> {
    let r = max_radius as usize;
    let mut table: Vec<Exact> = vec![Exact::zero(); oct_index(max_radius, max_radius) + 1];

    // seeds: a(0,0) = 0, a(1,0) = 1, a(1,1) = 4/π
    if r >= 1 {
        table[oct_index(1, 0)] = Exact {
            p: BigRational::one(),
            q: BigRational::zero(),
        };
        table[oct_index(1, 1)] = Exact {
            p: BigRational::zero(),
            q: BigRational::from_integer(BigInt::from(4)),
        };
    }

    // diagonal: a(k,k) = (4/π) Σ_{j=1..k} 1/(2j−1)
    let mut harmonic_odd = BigRational::one();
    for k in 2..=r {
        harmonic_odd += BigRational::new(BigInt::one(), BigInt::from(2 * k as i64 - 1));
        table[oct_index(k as i32, k as i32)] = Exact {
            p: BigRational::zero(),
            q: BigRational::from_integer(BigInt::from(4)) * &harmonic_odd,
        };
    }

    // march columns outward; each relation is harmonicity at a filled vertex
    for x in 1..r {
        let xi = x as i32;
        // a(x+1, x) from harmonicity at (x, x), using the diagonal symmetry
        let diag = &table[oct_index(xi, xi)];
        let sub = &table[oct_index(xi, xi - 1)];
        table[oct_index(xi + 1, xi)] = exact_combine(&[(diag, 2), (sub, -1)]);
        // a(x+1, y) from harmonicity at (x, y) for 1 <= y <= x−1
        for y in (1..x).rev() {
            let yi = y as i32;
            let center = &table[oct_index(xi, yi)];
            let left = &table[oct_index(xi - 1, yi)];
            let up = &table[oct_index(xi, yi + 1)];
            let down = &table[oct_index(xi, yi - 1)];
            table[oct_index(xi + 1, yi)] =
                exact_combine(&[(center, 4), (left, -1), (up, -1), (down, -1)]);
        }
        // a(x+1, 0) from harmonicity at (x, 0); the two y-neighbors coincide
        let center = &table[oct_index(xi, 0)];
        let left = &table[oct_index(xi - 1, 0)];
        let up = &table[oct_index(xi, 1)];
        table[oct_index(xi + 1, 0)] = exact_combine(&[(center, 4), (left, -1), (up, -2)]);
    }

    // evaluate p + q/π in rational arithmetic before converting: p and q grow
    // like 5.83^radius with almost-total cancellation between them, so the
    // conversion must happen after the subtraction, not before
    let digits = (0.77 * max_radius as f64) as usize + 40;
    let inv_pi = machin_pi(digits).recip();
    table
        .iter()
        .map(|e| big_ratio_to_f64(&(&e.p + &e.q * &inv_pi)))
        .collect()
}

/// π as an exact rational approximation with at least `digits` correct
/// decimal digits, by Machin's formula 16·atan(1/5) − 4·atan(1/239).
fn machin_pi(digits: usize) -> BigRational {
    let sixteen = BigRational::from_integer(BigInt::from(16));
    let four = BigRational::from_integer(BigInt::from(4));
    sixteen * atan_inv(5, digits + 2) - four * atan_inv(239, digits + 2)
}

/// atan(1/x) as a single exact fraction, truncating the alternating series
/// once terms drop below 10^−digits (the remainder is below the first
/// omitted term).
fn atan_inv(x: u64, digits: usize) -> BigRational {
    // terms 1/((2k+1) x^{2k+1}); stop when x^{2k+1} > 10^digits·(2k+1)
    let ln10_over_lnx = std::f64::consts::LN_10 / (x as f64).ln();
    let terms = ((digits as f64 * ln10_over_lnx - 1.0) / 2.0).ceil() as usize + 2;
    let x_sq = BigInt::from(x) * BigInt::from(x);
    // common denominator x^{2K+1}·lcm(odds); accumulate an integer numerator
    let mut odd_lcm = BigInt::one();
    for k in 0..=terms {
        let odd = BigInt::from(2 * k as u64 + 1);
        odd_lcm = lcm_big(&odd_lcm, &odd);
    }
    let mut numer = BigInt::zero();
    let mut x_power = {
        // x^{2(K−k)} starting at k = K
        BigInt::one()
    };
    for k in (0..=terms).rev() {
        let coef = &odd_lcm / BigInt::from(2 * k as u64 + 1);
        let term = coef * &x_power;
        if k % 2 == 0 {
            numer += term;
        } else {
            numer -= term;
        }
        x_power *= &x_sq;
    }
    // denominator: x^{2K+1}·lcm
    let denom = x_power / &x_sq * BigInt::from(x) * odd_lcm;
    BigRational::new(numer, denom)
}

fn lcm_big(a: &BigInt, b: &BigInt) -> BigInt {
    use num_integer::Integer;
    a.lcm(b)
}

/// Convert a big rational to f64 by scaling the quotient to ~80 significant
/// bits first; safe for numerator/denominator far beyond f64 range.
fn big_ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    let num = r.numer().abs();
    let den = r.denom().abs();
    let shift: i64 = 80 - (num.bits() as i64 - den.bits() as i64);
    let scaled_num = if shift >= 0 {
        num << shift as usize
    } else {
        num >> (-shift) as usize
    };
    let q = scaled_num / den;
    let q_f = q.to_f64().expect("quotient fits after scaling");
    sign * q_f * (2.0f64).powi(-shift as i32)
}

fn calibrate_kappa0(max_radius: i32, octant: &[f64]) -> f64 {
    let r = max_radius as f64;
    let lo = if max_radius >= 25 {
        20.0
    } else {
        (0.75 * r).max(1.0)
    };
    let mut sum = 0.0;
    let mut count = 0usize;
    for x in 0..=max_radius {
        for y in 0..=x {
            let norm = ((x as f64).powi(2) + (y as f64).powi(2)).sqrt();
            if norm >= lo && norm <= r {
                sum += octant[oct_index(x, y)] - 2.0 / std::f64::consts::PI * norm.ln();
                count += 1;
            }
        }
    }
    debug_assert!(count > 0);
    sum / count as f64
}

/// Harmonic measure of a region: weights(v, u) = P_v(exit at u) for interior
/// v and boundary u. Rows are probability vectors; columns solve the
/// discrete Dirichlet problem with indicator boundary data.
pub struct HarmonicKernel {
    region: Region,
    weights: DMatrix<f64>,
}

impl HarmonicKernel {
    pub fn region(&self) -> &Region {
        &self.region
    }

    /// Weight P_v(exit at u); zero if `u` is not boundary.
    pub fn weight(&self, v: Vertex, u: Vertex) -> f64 {
        let vi = self.region.interior_index(v).expect("interior vertex");
        match self.region.boundary().iter().position(|&b| b == u) {
            Some(ui) => self.weights[(vi, ui)],
            None => 0.0,
        }
    }

    /// Exit distribution row for interior vertex `v`, over boundary order.
    pub fn row(&self, v: Vertex) -> Vec<f64> {
        let vi = self.region.interior_index(v).expect("interior vertex");
        self.weights.row(vi).iter().copied().collect()
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    /// CSV dump `vx,vy,ux,uy,weight`.
    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "vx,vy,ux,uy,weight")?;
        for (vi, v) in self.region.interior().iter().enumerate() {
            for (ui, u) in self.region.boundary().iter().enumerate() {
                let value = self.weights[(vi, ui)];
                writeln!(w, "{},{},{},{},{value:.16e}", v.x, v.y, u.x, u.y)?;
            }
        }
        Ok(())
    }
}

/// Solve for the full harmonic-measure kernel by one factorization with one
/// right-hand side per boundary vertex.
pub fn harmonic_measure(region: &Region) -> Result<HarmonicKernel> {
    if region.interior_len() == 0 {
        return Err(Error::InvalidArgument("region has no interior".into()));
    }
    let sys = DirichletSystem::new(region, &[])?;
    let m = sys.len();
    let boundary = region.boundary();
    let mut rhs = DMatrix::<f64>::zeros(m, boundary.len());
    for (ui, &u) in boundary.iter().enumerate() {
        for w in neighbors(u) {
            if let Some(wi) = region.interior_index(w) {
                rhs[(wi, ui)] += 0.25;
            }
        }
    }
    let weights = sys.solve_dense_multi(rhs)?;
    Ok(HarmonicKernel {
        region: region.clone(),
        weights,
    })
}

/// Exit distribution from a single start vertex, without building the full
/// kernel: one conjugate-gradient solve for the Green column at `start`,
/// then one averaging step onto the boundary.
pub fn exit_distribution(region: &Region, start: Vertex) -> Result<Vec<(Vertex, f64)>> {
    let vi = region
        .interior_index(start)
        .ok_or_else(|| Error::InvalidArgument(format!("start {start:?} is not interior")))?;
    let sys = DirichletSystem::new(region, &[])?;
    let mut b = vec![0.0; sys.len()];
    b[vi] = 1.0;
    let g = sys.solve_cg(&b, 1e-12)?;
    Ok(region
        .boundary()
        .iter()
        .map(|&u| {
            let mut p = 0.0;
            for w in neighbors(u) {
                if let Some(wi) = region.interior_index(w) {
                    p += 0.25 * g[wi];
                }
            }
            (u, p)
        })
        .collect())
}

/// P_start(exit happens in `target_set`), solved exactly.
pub fn hitting_prob_exact(region: &Region, start: Vertex, target_set: &[Vertex]) -> Result<f64> {
    if !region.is_interior(start) {
        return Err(Error::InvalidArgument(format!(
            "start {start:?} is not interior"
        )));
    }
    let target: HashSet<Vertex> = target_set.iter().copied().collect();
    for &u in &target {
        if !region.is_boundary(u) {
            return Err(Error::InvalidArgument(format!(
                "target vertex {u:?} is not on the boundary"
            )));
        }
    }
    if target.is_empty() {
        return Ok(0.0);
    }
    let sys = DirichletSystem::new(region, &[])?;
    let b = sys.rhs(|u| if target.contains(&u) { 1.0 } else { 0.0 });
    let h = sys.solve_cg(&b, 1e-12)?;
    let i = sys
        .unknowns()
        .iter()
        .position(|&v| v == start)
        .expect("start is an unknown");
    Ok(h[i])
}

/// Exact vs formula comparison for the annulus exit problem.
#[derive(Debug, Clone, Copy)]
pub struct AnnulusCheck {
    pub exact: f64,
    pub formula: f64,
}

/// Probability that a walk from `x` in the annulus k < |·| < n exits at the
/// outer ring, against the logarithmic formula
/// (log|x| − log k)/(log n − log k).
pub fn annulus_formula_check(k: i32, n: i32, x: Vertex) -> Result<AnnulusCheck> {
    if k >= n {
        return Err(Error::InvalidArgument(format!(
            "need inner radius < outer radius, got k={k} n={n}"
        )));
    }
    let center = Vertex::new(0, 0);
    let region = build_annulus(center, k, n)?;
    if !region.is_interior(x) {
        return Err(Error::InvalidArgument(format!(
            "x={x:?} is not in the open annulus {k} < |x| < {n}"
        )));
    }
    let outer = annulus_outer_ring(&region, center, n);
    let exact = hitting_prob_exact(&region, x, &outer)?;
    let formula = (x.norm().ln() - (k as f64).ln()) / ((n as f64).ln() - (k as f64).ln());
    Ok(AnnulusCheck { exact, formula })
}

/// One Monte Carlo hitting estimate.
#[derive(Debug, Clone, Copy)]
pub struct HittingEstimate {
    pub probability: f64,
    pub std_error: f64,
    pub replicates: u64,
    pub seed: u64,
}

/// Monte Carlo estimate of P(walk from `start` reaches `target` before
/// leaving the region through a non-target boundary vertex). Target vertices
/// may be anywhere in the region. Each replicate walks its own
/// `(seed, replicate)` stream with one 2-bit direction draw per step, so the
/// estimate is reproducible and independent of thread count.
pub fn mc_hit_before_exit(
    region: &Region,
    start: Vertex,
    target: &[Vertex],
    replicates: u64,
    seed: u64,
) -> Result<HittingEstimate> {
    if replicates < 100 {
        return Err(Error::InvalidArgument(format!(
            "need at least 100 replicates, got {replicates}"
        )));
    }
    if !region.is_interior(start) {
        return Err(Error::InvalidArgument(format!(
            "start {start:?} is not interior"
        )));
    }
    let target_mask: HashSet<Vertex> = target.iter().copied().collect();
    for &t in &target_mask {
        if !region.contains(t) {
            return Err(Error::InvalidArgument(format!(
                "target vertex {t:?} is outside the region"
            )));
        }
    }
    let hits = replicate_map(replicates, |rep| {
        let mut rng = replicate_rng(seed, rep);
        let mut v = start;
        loop {
            if target_mask.contains(&v) {
                return 1u64;
            }
            if region.is_boundary(v) {
                return 0u64;
            }
            let dir = (rng.next_u32() >> 30) as usize;
            v = neighbors(v)[dir];
        }
    });
    let hit_count: u64 = hits.iter().sum();
    let p = hit_count as f64 / replicates as f64;
    Ok(HittingEstimate {
        probability: p,
        std_error: (p * (1.0 - p) / replicates as f64).sqrt(),
        replicates,
        seed,
    })
}

//! Discrete Dirichlet problems for simple random walk on a [`Region`].
//!
//! The unknowns are the interior vertices minus any extra absorbing set; the
//! equation is h(v) = mean of h over the four neighbors, with prescribed
//! values on the absorbing vertices (region boundary plus extras). In matrix
//! form (I − P)h = b with P the unknown-to-unknown transition block, which is
//! symmetric positive definite, so both a dense factorization and conjugate
//! gradients apply.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lattice::{neighbors, Region, Vertex};

/// neighbor kind: index of an unknown, or an absorbing vertex
const ABSORBING: i64 = -1;

pub struct DirichletSystem {
    unknowns: Vec<Vertex>,
    nbr_idx: Vec<[i64; 4]>,
    nbr_vertex: Vec<[Vertex; 4]>,
}

impl DirichletSystem {
    /// Build the system on `region` with all boundary vertices absorbing,
    /// plus `extra_absorbing` interior vertices.
    pub fn new(region: &Region, extra_absorbing: &[Vertex]) -> Result<DirichletSystem> {
        for &v in extra_absorbing {
            if !region.is_interior(v) {
                return Err(Error::InvalidArgument(format!(
                    "extra absorbing vertex {v:?} is not interior"
                )));
            }
        }
        let extra: std::collections::HashSet<Vertex> = extra_absorbing.iter().copied().collect();
        let unknowns: Vec<Vertex> = region
            .interior()
            .iter()
            .copied()
            .filter(|v| !extra.contains(v))
            .collect();
        if unknowns.is_empty() {
            return Err(Error::InvalidArgument(
                "no unknowns: interior is covered by the absorbing set".into(),
            ));
        }
        let index: std::collections::HashMap<Vertex, usize> = unknowns
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect();
        let mut nbr_idx = Vec::with_capacity(unknowns.len());
        let mut nbr_vertex = Vec::with_capacity(unknowns.len());
        for &v in &unknowns {
            let nbrs = neighbors(v);
            let mut idx = [ABSORBING; 4];
            for (d, &u) in nbrs.iter().enumerate() {
                if let Some(&j) = index.get(&u) {
                    idx[d] = j as i64;
                }
                // interior vertices of a region always have their four
                // neighbors inside the region, so a non-unknown neighbor is
                // absorbing (boundary or extra)
                debug_assert!(region.contains(u));
            }
            nbr_idx.push(idx);
            nbr_vertex.push(nbrs);
        }
        Ok(DirichletSystem {
            unknowns,
            nbr_idx,
            nbr_vertex,
        })
    }

    pub fn unknowns(&self) -> &[Vertex] {
        &self.unknowns
    }

    pub fn len(&self) -> usize {
        self.unknowns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unknowns.is_empty()
    }

    /// y = (I − P) x
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..x.len() {
            let mut acc = 0.0;
            for &j in &self.nbr_idx[i] {
                if j >= 0 {
                    acc += x[j as usize];
                }
            }
            y[i] = x[i] - 0.25 * acc;
        }
    }

    /// Right-hand side from absorbing values: b(v) = (1/4) Σ value(u) over
    /// absorbing neighbors u of v.
    pub fn rhs(&self, absorbing_value: impl Fn(Vertex) -> f64) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                let mut acc = 0.0;
                for d in 0..4 {
                    if self.nbr_idx[i][d] == ABSORBING {
                        acc += absorbing_value(self.nbr_vertex[i][d]);
                    }
                }
                0.25 * acc
            })
            .collect()
    }

    /// Conjugate-gradient solve of (I − P) h = b to relative residual `tol`.
    pub fn solve_cg(&self, b: &[f64], tol: f64) -> Result<Vec<f64>> {
        let m = self.len();
        assert_eq!(b.len(), m);
        let b_norm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        if b_norm == 0.0 {
            return Ok(vec![0.0; m]);
        }
        let mut x = vec![0.0; m];
        let mut r = b.to_vec();
        let mut p = r.clone();
        let mut ap = vec![0.0; m];
        let mut rr: f64 = r.iter().map(|v| v * v).sum();
        let max_iter = 40 * m + 200;
        for _ in 0..max_iter {
            if rr.sqrt() <= tol * b_norm {
                return Ok(x);
            }
            self.apply(&p, &mut ap);
            let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
            if pap <= 0.0 {
                return Err(Error::Internal("CG lost positive definiteness".into()));
            }
            let alpha = rr / pap;
            for i in 0..m {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let rr_new: f64 = r.iter().map(|v| v * v).sum();
            let beta = rr_new / rr;
            rr = rr_new;
            for i in 0..m {
                p[i] = r[i] + beta * p[i];
            }
        }
        Err(Error::Internal(format!(
            "CG failed to reach tol {tol} in {max_iter} iterations"
        )))
    }

    /// Dense (I − P) matrix over the unknowns.
    pub fn dense_matrix(&self) -> DMatrix<f64> {
        let m = self.len();
        let mut a = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            a[(i, i)] = 1.0;
            for &j in &self.nbr_idx[i] {
                if j >= 0 {
                    a[(i, j as usize)] -= 0.25;
                }
            }
        }
        a
    }

    /// Solve (I − P) H = B for many right-hand sides by one LU factorization.
    pub fn solve_dense_multi(&self, rhs_columns: DMatrix<f64>) -> Result<DMatrix<f64>> {
        assert_eq!(rhs_columns.nrows(), self.len());
        let lu = self.dense_matrix().lu();
        lu.solve(&rhs_columns)
            .ok_or_else(|| Error::Internal("singular Dirichlet system".into()))
    }

    /// Max-norm residual ‖(I−P)x − b‖∞ / ‖b‖∞, for solve verification.
    pub fn residual(&self, x: &[f64], b: &[f64]) -> f64 {
        let mut ax = vec![0.0; x.len()];
        self.apply(x, &mut ax);
        let num = ax
            .iter()
            .zip(b)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let den = b.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_box;

    #[test]
    fn cg_matches_dense_on_small_box() {
        let region = build_box(6, Vertex::new(0, 0)).unwrap();
        let sys = DirichletSystem::new(&region, &[]).unwrap();
        // boundary data: 1 on the bottom edge, 0 elsewhere
        let value = |v: Vertex| if v.y == 0 { 1.0 } else { 0.0 };
        let b = sys.rhs(value);
        let x_cg = sys.solve_cg(&b, 1e-13).unwrap();
        let b_mat = DMatrix::from_column_slice(b.len(), 1, &b);
        let x_dense = sys.solve_dense_multi(b_mat).unwrap();
        for i in 0..b.len() {
            assert!((x_cg[i] - x_dense[(i, 0)]).abs() < 1e-10);
        }
        assert!(sys.residual(&x_cg, &b) < 1e-10);
    }

    #[test]
    fn single_interior_vertex() {
        let region = build_box(2, Vertex::new(0, 0)).unwrap();
        let sys = DirichletSystem::new(&region, &[]).unwrap();
        // constant boundary 1 → harmonic value 1
        let b = sys.rhs(|_| 1.0);
        let x = sys.solve_cg(&b, 1e-14).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn extra_absorbing_vertex_splits_problem() {
        let region = build_box(4, Vertex::new(0, 0)).unwrap();
        let center = Vertex::new(2, 2);
        let sys = DirichletSystem::new(&region, &[center]).unwrap();
        assert_eq!(sys.len(), region.interior_len() - 1);
        // probability of hitting center before the boundary, from (1,1):
        // absorbing value 1 at center, 0 on boundary
        let b = sys.rhs(|v| if v == center { 1.0 } else { 0.0 });
        let x = sys.solve_cg(&b, 1e-13).unwrap();
        let i = sys.unknowns().iter().position(|&v| v == Vertex::new(1, 1)).unwrap();
        assert!(x[i] > 0.0 && x[i] < 1.0);
    }
}

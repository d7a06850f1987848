//! Finite subregions of Z²: boxes, discrete balls, annuli.
//!
//! A [`Region`] is a finite vertex set partitioned into interior and
//! boundary. The boundary is defined intrinsically: a vertex is boundary iff
//! one of its four Z²-neighbors lies outside the set. Interior vertices get a
//! dense index 0..m-1 in row-major order (sorted by `(y, x)`), which is the
//! index convention used by every matrix and sample vector in this crate.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// A lattice point of Z².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub x: i32,
    pub y: i32,
}

impl Vertex {
    pub const fn new(x: i32, y: i32) -> Self {
        Vertex { x, y }
    }

    /// Squared Euclidean norm, exact in integer arithmetic.
    pub fn norm_sq(&self) -> i64 {
        (self.x as i64) * (self.x as i64) + (self.y as i64) * (self.y as i64)
    }

    pub fn norm(&self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }

    pub fn offset_from(&self, other: Vertex) -> (i32, i32) {
        (self.x - other.x, self.y - other.y)
    }
}

/// Axis step order used everywhere a walk or neighbor scan is enumerated.
pub const DIRECTIONS: [(i32, i32); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// The four Z²-neighbors of `v`, in the fixed order (+x, −x, +y, −y).
pub fn neighbors(v: Vertex) -> [Vertex; 4] {
    [
        Vertex::new(v.x + 1, v.y),
        Vertex::new(v.x - 1, v.y),
        Vertex::new(v.x, v.y + 1),
        Vertex::new(v.x, v.y - 1),
    ]
}

const OUTSIDE: u8 = 0;
const INTERIOR: u8 = 1;
const BOUNDARY: u8 = 2;

/// A finite vertex set of Z² with its interior/boundary partition and a
/// dense interior index. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Region {
    vertices: Vec<Vertex>,
    interior: Vec<Vertex>,
    boundary: Vec<Vertex>,
    // membership flags over the bounding box, for O(1) lookups on hot paths
    min_x: i32,
    min_y: i32,
    width: usize,
    height: usize,
    flags: Vec<u8>,
    // dense interior index over the same bounding box; usize::MAX = none
    interior_index: Vec<usize>,
}

impl Region {
    /// Build a region from an arbitrary vertex set. Duplicates are ignored.
    /// Boundary is derived from the set itself (a vertex with a Z²-neighbor
    /// outside the set), so the partition always satisfies the definition.
    pub fn from_vertices(vertices: impl IntoIterator<Item = Vertex>) -> Result<Region> {
        let set: HashSet<Vertex> = vertices.into_iter().collect();
        if set.is_empty() {
            return Err(Error::InvalidArgument("region has no vertices".into()));
        }
        let min_x = set.iter().map(|v| v.x).min().unwrap();
        let max_x = set.iter().map(|v| v.x).max().unwrap();
        let min_y = set.iter().map(|v| v.y).min().unwrap();
        let max_y = set.iter().map(|v| v.y).max().unwrap();
        let width = (max_x - min_x + 1) as usize;
        let height = (max_y - min_y + 1) as usize;

        let mut flags = vec![OUTSIDE; width * height];
        let idx = |v: Vertex| (v.y - min_y) as usize * width + (v.x - min_x) as usize;
        for &v in &set {
            flags[idx(v)] = INTERIOR;
        }
        for &v in &set {
            if neighbors(v).iter().any(|u| !set.contains(u)) {
                flags[idx(v)] = BOUNDARY;
            }
        }

        // row-major order: by y, then x
        let mut vertices: Vec<Vertex> = set.into_iter().collect();
        vertices.sort_by_key(|v| (v.y, v.x));

        let mut interior = Vec::new();
        let mut boundary = Vec::new();
        let mut interior_index = vec![usize::MAX; width * height];
        for &v in &vertices {
            if flags[idx(v)] == INTERIOR {
                interior_index[idx(v)] = interior.len();
                interior.push(v);
            } else {
                boundary.push(v);
            }
        }

        Ok(Region {
            vertices,
            interior,
            boundary,
            min_x,
            min_y,
            width,
            height,
            flags,
            interior_index,
        })
    }

    #[inline]
    fn flag(&self, v: Vertex) -> u8 {
        let dx = v.x as i64 - self.min_x as i64;
        let dy = v.y as i64 - self.min_y as i64;
        if dx < 0 || dy < 0 || dx as usize >= self.width || dy as usize >= self.height {
            return OUTSIDE;
        }
        self.flags[dy as usize * self.width + dx as usize]
    }

    #[inline]
    pub fn contains(&self, v: Vertex) -> bool {
        self.flag(v) != OUTSIDE
    }

    #[inline]
    pub fn is_interior(&self, v: Vertex) -> bool {
        self.flag(v) == INTERIOR
    }

    #[inline]
    pub fn is_boundary(&self, v: Vertex) -> bool {
        self.flag(v) == BOUNDARY
    }

    /// Dense index of an interior vertex, if `v` is interior.
    #[inline]
    pub fn interior_index(&self, v: Vertex) -> Option<usize> {
        if !self.is_interior(v) {
            return None;
        }
        let i = (v.y - self.min_y) as usize * self.width + (v.x - self.min_x) as usize;
        Some(self.interior_index[i])
    }

    /// All vertices in row-major order.
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// Interior vertices in dense-index order.
    pub fn interior(&self) -> &[Vertex] {
        &self.interior
    }

    /// Boundary vertices in row-major order.
    pub fn boundary(&self) -> &[Vertex] {
        &self.boundary
    }

    pub fn interior_len(&self) -> usize {
        self.interior.len()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// True if every vertex of `other` belongs to this region.
    pub fn contains_region(&self, other: &Region) -> bool {
        other.vertices.iter().all(|&v| self.contains(v))
    }

    /// Smallest vertex in row-major order (the lower-left corner).
    pub fn origin(&self) -> Vertex {
        Vertex::new(self.min_x, self.min_y)
    }

    /// Side length if this region is exactly a full box, else None.
    pub fn box_side(&self) -> Option<i32> {
        let n = self.width as i32 - 1;
        if n >= 2 && self.height == self.width && self.len() == self.width * self.width {
            Some(n)
        } else {
            None
        }
    }
}

/// A closed Euclidean ball on the lattice.
#[derive(Debug, Clone)]
pub struct DiscreteBall {
    pub center: Vertex,
    pub radius: i32,
    pub region: Region,
}

/// Box of side length `n`: the (n+1)×(n+1) vertex set with corner `origin`.
/// Interior is the inner (n−1)² grid.
pub fn build_box(n: i32, origin: Vertex) -> Result<Region> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "box side length must be >= 2 to have an interior, got {n}"
        )));
    }
    let mut vertices = Vec::with_capacity(((n + 1) * (n + 1)) as usize);
    for y in 0..=n {
        for x in 0..=n {
            vertices.push(Vertex::new(origin.x + x, origin.y + y));
        }
    }
    Region::from_vertices(vertices)
}

/// Discrete ball {v : |v − center|₂ ≤ radius}, ties included.
pub fn build_ball(center: Vertex, radius: i32) -> Result<DiscreteBall> {
    if radius < 2 {
        return Err(Error::InvalidArgument(format!(
            "ball radius must be >= 2, got {radius}"
        )));
    }
    let r_sq = (radius as i64) * (radius as i64);
    let mut vertices = Vec::new();
    for y in -radius..=radius {
        for x in -radius..=radius {
            let v = Vertex::new(center.x + x, center.y + y);
            if (x as i64 * x as i64 + y as i64 * y as i64) <= r_sq {
                vertices.push(v);
            }
        }
    }
    let region = Region::from_vertices(vertices)?;
    Ok(DiscreteBall {
        center,
        radius,
        region,
    })
}

/// Closed annulus {v : inner ≤ |v − center|₂ ≤ outer}. Its boundary has two
/// rings: the inner ring (vertices with a neighbor strictly inside the inner
/// ball) and the outer ring (vertices with a neighbor outside the outer
/// ball). Walks on the annulus are absorbed on both.
pub fn build_annulus(center: Vertex, inner: i32, outer: i32) -> Result<Region> {
    if inner < 1 || outer <= inner {
        return Err(Error::InvalidArgument(format!(
            "annulus radii must satisfy 1 <= inner < outer, got inner={inner} outer={outer}"
        )));
    }
    let inner_sq = (inner as i64) * (inner as i64);
    let outer_sq = (outer as i64) * (outer as i64);
    let mut vertices = Vec::new();
    for y in -outer..=outer {
        for x in -outer..=outer {
            let n_sq = x as i64 * x as i64 + y as i64 * y as i64;
            if n_sq >= inner_sq && n_sq <= outer_sq {
                vertices.push(Vertex::new(center.x + x, center.y + y));
            }
        }
    }
    Region::from_vertices(vertices)
}

/// Split an annulus boundary into its outer ring (adjacent to the outside of
/// the outer ball) and everything else.
pub fn annulus_outer_ring(region: &Region, center: Vertex, outer: i32) -> Vec<Vertex> {
    let outer_sq = (outer as i64) * (outer as i64);
    region
        .boundary()
        .iter()
        .copied()
        .filter(|&v| {
            neighbors(v).iter().any(|u| {
                let (dx, dy) = u.offset_from(center);
                (dx as i64 * dx as i64 + dy as i64 * dy as i64) > outer_sq
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_box_with_interior() {
        let r = build_box(2, Vertex::new(0, 0)).unwrap();
        assert_eq!(r.len(), 9);
        assert_eq!(r.interior(), &[Vertex::new(1, 1)]);
        assert_eq!(r.boundary().len(), 8);
    }

    #[test]
    fn box_side_four_counts() {
        let r = build_box(4, Vertex::new(0, 0)).unwrap();
        assert_eq!(r.len(), 25);
        assert_eq!(r.interior_len(), 9);
        assert_eq!(r.boundary().len(), 16);
    }

    #[test]
    fn box_translation() {
        let r = build_box(2, Vertex::new(5, 7)).unwrap();
        assert_eq!(r.interior(), &[Vertex::new(6, 8)]);
    }

    #[test]
    fn box_rejects_degenerate_side() {
        assert!(matches!(
            build_box(1, Vertex::new(0, 0)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn interior_counts_exhaustive() {
        for n in 2..=64 {
            let r = build_box(n, Vertex::new(0, 0)).unwrap();
            assert_eq!(r.interior_len(), ((n - 1) * (n - 1)) as usize, "n={n}");
            assert_eq!(r.len(), ((n + 1) * (n + 1)) as usize);
        }
    }

    #[test]
    fn interior_vertices_have_all_neighbors_inside() {
        let ball = build_ball(Vertex::new(0, 0), 5).unwrap();
        for &v in ball.region.interior() {
            for u in neighbors(v) {
                assert!(ball.region.contains(u));
            }
        }
    }

    #[test]
    fn ball_membership_norm_ties() {
        let b = build_ball(Vertex::new(0, 0), 2).unwrap();
        // |(1,1)| = sqrt(2) <= 2 in, |(2,1)| = sqrt(5) > 2 out
        assert!(b.region.contains(Vertex::new(1, 1)));
        assert!(!b.region.contains(Vertex::new(2, 1)));
        // (0,2) has neighbor (0,3) outside, so it is boundary
        assert!(b.region.is_boundary(Vertex::new(0, 2)));
    }

    #[test]
    fn ball_radius_eight_size() {
        // golden from direct enumeration: #{(x,y) : x^2+y^2 <= 64} = 197
        let mut count = 0;
        for x in -8i64..=8 {
            for y in -8i64..=8 {
                if x * x + y * y <= 64 {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 197);
        let b = build_ball(Vertex::new(0, 0), 8).unwrap();
        assert_eq!(b.region.len(), 197);
    }

    #[test]
    fn neighbor_order_fixed() {
        assert_eq!(
            neighbors(Vertex::new(0, 0)),
            [
                Vertex::new(1, 0),
                Vertex::new(-1, 0),
                Vertex::new(0, 1),
                Vertex::new(0, -1)
            ]
        );
        assert_eq!(
            neighbors(Vertex::new(3, 5)),
            [
                Vertex::new(4, 5),
                Vertex::new(2, 5),
                Vertex::new(3, 6),
                Vertex::new(3, 4)
            ]
        );
        assert_eq!(neighbors(Vertex::new(3, 5)), neighbors(Vertex::new(3, 5)));
    }

    #[test]
    fn dense_index_is_bijection() {
        let r = build_box(6, Vertex::new(-3, -3)).unwrap();
        let mut seen = vec![false; r.interior_len()];
        for &v in r.interior() {
            let i = r.interior_index(v).unwrap();
            assert!(!seen[i]);
            seen[i] = true;
        }
        assert!(seen.iter().all(|&s| s));
        assert_eq!(r.interior_index(Vertex::new(-3, 0)), None);
    }

    #[test]
    fn annulus_boundary_has_two_rings() {
        let r = build_annulus(Vertex::new(0, 0), 4, 10).unwrap();
        let outer = annulus_outer_ring(&r, Vertex::new(0, 0), 10);
        assert!(!outer.is_empty());
        assert!(outer.len() < r.boundary().len());
        // interior vertices sit strictly between the rings
        for &v in r.interior() {
            let n = v.norm();
            assert!(n > 4.0 && n < 10.0, "interior vertex {v:?} at norm {n}");
        }
    }
}

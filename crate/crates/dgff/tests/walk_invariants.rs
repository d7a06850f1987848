//! Potential-theory invariants at desk scale: uniformity of harmonic measure
//! on balls, the logarithmic annulus formula's error decay, and the
//! corridor-hitting Monte Carlo geometry.

use dgff::lattice::{build_ball, build_box, Vertex};
use dgff::walk::{annulus_formula_check, exit_distribution, mc_hit_before_exit};

#[test]
fn ball_exit_distribution_uniformity() {
    // from deep inside a ball (|x| ≤ n/4), every boundary vertex is hit with
    // probability of order 1/n
    for n in [8, 16, 32] {
        let ball = build_ball(Vertex::new(0, 0), n).unwrap();
        let starts = [
            Vertex::new(0, 0),
            Vertex::new(n / 4, 0),
            Vertex::new(n / 8, n / 8),
        ];
        for start in starts {
            let dist = exit_distribution(&ball.region, start).unwrap();
            let lo = 0.05 / n as f64;
            let hi = 20.0 / n as f64;
            let mut min_w = f64::INFINITY;
            let mut max_w: f64 = 0.0;
            for (u, w) in dist {
                assert!(
                    w >= lo && w <= hi,
                    "n={n} start={start:?} exit {u:?}: weight {w} outside [{lo}, {hi}]"
                );
                min_w = min_w.min(w);
                max_w = max_w.max(w);
            }
            assert!(
                max_w / min_w <= 400.0,
                "n={n} start={start:?}: spread {}",
                max_w / min_w
            );
        }
    }
}

#[test]
fn annulus_error_decays_with_inner_radius() {
    // matched geometry n = 4k at the geometric-mean radius: the error term
    // is O(1/k), so doubling k must cut it by at least a quarter
    let e8 = {
        let c = annulus_formula_check(8, 32, Vertex::new(16, 0)).unwrap();
        (c.exact - c.formula).abs()
    };
    let e16 = {
        let c = annulus_formula_check(16, 64, Vertex::new(32, 0)).unwrap();
        (c.exact - c.formula).abs()
    };
    assert!(e8 <= 2.0 / 8.0, "error at k=8: {e8}");
    assert!(e16 <= 2.0 / 16.0, "error at k=16: {e16}");
    assert!(e16 <= 0.75 * e8, "k=8: {e8}, k=16: {e16}");
}

#[test]
fn corridor_hitting_probability_scaling() {
    // two balls of radius r at distance ℓ near the bottom wall of a large
    // box: the chance of reaching the second ball before exiting is bounded
    // by C·sqrt(r/ℓ)
    let n = 512;
    let r = 8;
    let ell = 64;
    let region = build_box(n, Vertex::new(0, 0)).unwrap();
    let start = Vertex::new(n / 2, 2 * r);
    let other_center = Vertex::new(n / 2 + ell, 2 * r);
    let target: Vec<Vertex> = build_ball(other_center, r)
        .unwrap()
        .region
        .boundary()
        .to_vec();
    let est = mc_hit_before_exit(&region, start, &target, 20_000, 271).unwrap();
    let bound = 10.0 * (r as f64 / ell as f64).sqrt();
    assert!(
        est.probability <= bound,
        "estimate {} exceeds C*sqrt(r/l) = {bound}",
        est.probability
    );
    // the walk does reach the neighbor ball sometimes from 2r above the wall
    assert!(est.probability > 0.0);
}

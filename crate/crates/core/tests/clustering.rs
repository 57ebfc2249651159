mod common;

use common::*;
use divmax::clustering::{gmm, gmm_init, gmm_iteration, Clustering, StopRule};
use divmax::oracle::brute_force_optimal_radius;
use divmax::{Dataset, MetricKind, Point};
use proptest::prelude::*;

fn dataset(vectors: Vec<Vec<f64>>, metric: MetricKind) -> Dataset {
    let pts = vectors
        .into_iter()
        .enumerate()
        .map(|(i, v)| Point::new(format!("p{i}"), v, ["a"]).unwrap())
        .collect();
    Dataset::new(pts, metric).unwrap()
}

/// Radius of the GMM clustering with 1, 2, ..., n centers.
fn gmm_radii(d: &Dataset) -> Vec<f64> {
    let one = Clustering::single(d, (0..d.len()).collect()).unwrap();
    let mut radii = vec![one.radius()];
    let (mut c, _) = gmm_init(d).unwrap();
    radii.push(c.radius());
    while c.tau() < d.len() {
        c = gmm_iteration(d, c).unwrap();
        radii.push(c.radius());
    }
    radii
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn gmm_is_a_two_approximation(seed in any::<u64>(), n in 2usize..11, angular in any::<bool>()) {
        let mut r = rng(seed);
        let metric = if angular { MetricKind::AngularCosine } else { MetricKind::Euclidean };
        let d = dataset(uniform_vectors(&mut r, n, 3), metric);
        let radii = gmm_radii(&d);
        for (i, w) in radii.windows(2).enumerate() {
            prop_assert!(w[1] <= w[0], "radius grew at tau = {}", i + 2);
        }
        for tau in 1..=n {
            let opt = brute_force_optimal_radius(&d, tau).unwrap();
            prop_assert!(radii[tau - 1] <= 2.0 * opt + 1e-12, "tau {tau}: {} > 2 * {opt}", radii[tau - 1]);
        }
        prop_assert_eq!(radii[n - 1], 0.0);
    }

    #[test]
    fn init_distance_brackets_the_diameter(seed in any::<u64>(), n in 2usize..60) {
        let mut r = rng(seed);
        let d = dataset(uniform_vectors(&mut r, n, 2), MetricKind::Euclidean);
        let (_, delta) = gmm_init(&d).unwrap();
        let diam = d.diameter();
        prop_assert!(delta >= diam / 2.0 && delta <= diam);
    }
}

#[test]
fn two_blobs_get_one_center_each() {
    let mut r = rng(3);
    let mut v = blob_vectors(&mut r, 30, 2, 1, 0.5);
    for x in blob_vectors(&mut r, 30, 2, 1, 0.5) {
        v.push(x.iter().map(|c| c + 100.0).collect());
    }
    let d = dataset(v, MetricKind::Euclidean);
    let (c, _) = gmm(&d, (0..d.len()).collect(), StopRule::Tau(2)).unwrap();
    let clusters = c.clusters();
    // brute-force check: every point is with the center of its own blob
    for (ci, members) in clusters.iter().enumerate() {
        let z = c.centers()[ci];
        for &x in members {
            assert_eq!(x < 30, z < 30);
            let nearest = c
                .centers()
                .iter()
                .map(|&y| d.dist(x, y))
                .fold(f64::INFINITY, f64::min);
            assert_eq!(d.dist(x, z), nearest);
        }
    }
}

#[test]
fn grid_radius_follows_dimension_bound() {
    for dim in [1usize, 2] {
        let side = if dim == 1 { 400 } else { 20 };
        let mut v = Vec::new();
        for i in 0..side {
            if dim == 1 {
                v.push(vec![i as f64]);
            } else {
                for j in 0..side {
                    v.push(vec![i as f64, j as f64]);
                }
            }
        }
        let d = dataset(v, MetricKind::Euclidean);
        let diam = d.diameter();
        for tau in [4usize, 9, 16, 25, 64, 100] {
            let (c, _) = gmm(&d, (0..d.len()).collect(), StopRule::Tau(tau)).unwrap();
            let bound = 2.0 * 2.0 * diam / (tau as f64).powf(1.0 / dim as f64);
            assert!(c.radius() <= bound, "dim {dim} tau {tau}: {} > {bound}", c.radius());
        }
    }
}

#[test]
fn radius_threshold_stops() {
    let mut r = rng(9);
    let d = dataset(uniform_vectors(&mut r, 300, 2), MetricKind::Euclidean);
    for t in [0.5, 0.1, 0.02] {
        let (c, _) = gmm(&d, (0..d.len()).collect(), StopRule::Radius(t)).unwrap();
        assert!(c.radius() <= t);
    }
    let (c, _) = gmm(&d, (0..d.len()).collect(), StopRule::Radius(0.0)).unwrap();
    assert_eq!(c.tau(), 300);
    let (c, _) = gmm(&d, (0..d.len()).collect(), StopRule::Tau(8)).unwrap();
    assert_eq!(c.tau(), 8);
}

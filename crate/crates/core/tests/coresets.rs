mod common;

use common::*;
use divmax::coreset::{
    parallel_coreset, reduce_coreset, seq_coreset, size_bound, stream_coreset, CoresetStop, StreamMode,
    StreamState,
};
use divmax::diversity::DiversityKind;
use divmax::oracle::brute_force_optimum;
use divmax::solvers::{exhaustive_search, DEFAULT_BUDGET};
use divmax::{MatroidKind, MetricKind};
use rand::Rng;

const KINDS: [MatroidKind; 2] = [MatroidKind::Partition, MatroidKind::Transversal];

#[test]
fn sequential_coresets_preserve_the_optimum() {
    let mut r = rng(101);
    let mut nontrivial = 0;
    for case in 0..40 {
        let k = r.gen_range(2..=4);
        let n = r.gen_range(12..=30);
        let (d, m, blobs) = clustered_instance(&mut r, n, KINDS[case % 2], k);
        let kind = DiversityKind::ALL[case % 5];
        if k < kind.min_size() {
            continue;
        }
        let tau = (blobs * r.gen_range(1..=3)).min(n);
        let stop = if case % 4 == 3 { CoresetStop::Epsilon(0.9) } else { CoresetStop::Tau(tau) };
        let t = seq_coreset(&d, &m, k, stop).unwrap();
        let q = coreset_quality(&d, &m, k, kind, &t.ids, t.radius);
        assert!(q.holds(), "case {case}: {q:?}");
        nontrivial += usize::from(q.nontrivial());
        let gamma = m.bind(&d).unwrap().max_categories_per_point();
        if let Some(b) = size_bound(m.kind(), k, t.tau, gamma) {
            assert!(t.len() <= b);
        }
    }
    assert!(nontrivial >= 10, "only {nontrivial} informative cases");
}

#[test]
fn streaming_coresets_preserve_the_optimum() {
    let mut r = rng(202);
    let mut nontrivial = 0;
    for case in 0..40 {
        let k = r.gen_range(2..=4);
        let n = r.gen_range(12..=30);
        let (d, m, blobs) = clustered_instance(&mut r, n, KINDS[case % 2], k);
        let kind = DiversityKind::ALL[case % 5];
        if k < kind.min_size() {
            continue;
        }
        let mode = if case % 4 == 3 {
            StreamMode::epsilon(0.5)
        } else {
            StreamMode::tau(blobs * r.gen_range(1..=3))
        };
        let mut st = StreamState::new(&m, k, mode, MetricKind::Euclidean).unwrap().with_reference_tracking();
        for p in d.points() {
            st.feed(p.clone()).unwrap();
        }
        let out = st.finalize().unwrap();
        assert!(out.radius_measured);
        let t = out.coreset;
        let q = coreset_quality(&d, &m, k, kind, &t.ids, t.radius);
        assert!(q.holds(), "case {case}: {q:?}");
        nontrivial += usize::from(q.nontrivial());
        if m.kind() == MatroidKind::Partition {
            assert!(t.len() <= k * t.tau);
        }
    }
    assert!(nontrivial >= 10, "only {nontrivial} informative cases");
}

#[test]
fn partitioned_coresets_compose() {
    let mut r = rng(303);
    let mut nontrivial = 0;
    for case in 0..30 {
        let k = r.gen_range(2..=4);
        let n = r.gen_range(16..=40);
        let (d, m, blobs) = clustered_instance(&mut r, n, KINDS[case % 2], k);
        let kind = DiversityKind::ALL[case % 5];
        if k < kind.min_size() {
            continue;
        }
        let ell = [2, 4][case % 2];
        let tau = (ell * blobs * r.gen_range(1..=2)).min(n);
        let t = parallel_coreset(&d, &m, k, ell, CoresetStop::Tau(tau)).unwrap();
        assert_eq!(t.shard_radii.len(), ell);
        let radius = t.shard_radii.iter().copied().fold(0.0, f64::max);
        assert_eq!(radius, t.radius);
        let q = coreset_quality(&d, &m, k, kind, &t.ids, radius);
        assert!(q.holds(), "case {case}: {q:?}");
        nontrivial += usize::from(q.nontrivial());
    }
    assert!(nontrivial >= 5, "only {nontrivial} informative cases");
}

#[test]
fn two_level_reduction_keeps_quality() {
    let mut r = rng(404);
    for case in 0..12 {
        let k = r.gen_range(2..=3);
        let (d, m, blobs) = clustered_instance(&mut r, 36, KINDS[case % 2], k);
        let first = parallel_coreset(&d, &m, k, 3, CoresetStop::Tau(3 * blobs)).unwrap();
        let second = reduce_coreset(&first, &d, &m, k, CoresetStop::Tau(blobs)).unwrap();
        assert!(second.ids.iter().all(|i| first.ids.contains(i)));
        let kind = DiversityKind::Sum;
        let opt = brute_force_optimum(&d, &m, k, kind).unwrap();
        let rho = opt.value / divmax::diversity::pair_count(kind, k).f as f64;
        let e1 = 4.0 * first.radius / rho;
        let e2 = 4.0 * second.radius / rho;
        let c = m.bind(&d).unwrap();
        let got = exhaustive_search(&c, &second.ids, k, kind, DEFAULT_BUDGET).unwrap();
        let floor = (1.0 - e1).max(0.0) * (1.0 - e2).max(0.0) * opt.value;
        assert!(at_least(got.value, floor, 1e-9), "case {case}");
    }
}

#[test]
fn coresets_keep_a_feasible_solution() {
    let mut r = rng(505);
    for case in 0..60 {
        let k = r.gen_range(1..=4);
        let v = uniform_vectors(&mut r, 30, 2);
        let (d, m) = with_matroid(&mut r, &v, KINDS[case % 2], k, MetricKind::Euclidean);
        let c = m.bind(&d).unwrap();
        let tau = r.gen_range(1..=10);
        for ids in [
            seq_coreset(&d, &m, k, CoresetStop::Tau(tau)).unwrap().ids,
            stream_coreset(&d, &m, k, StreamMode::tau(tau)).unwrap().ids,
            parallel_coreset(&d, &m, k, 3, CoresetStop::Tau(tau)).unwrap().ids,
        ] {
            assert_eq!(c.maximal_independent_subset(&ids, k).len(), k, "case {case}");
        }
    }
}

#[test]
fn parallel_split_of_tau() {
    let mut r = rng(606);
    let v = uniform_vectors(&mut r, 2_000, 3);
    let (d, m) = with_matroid(&mut r, &v, MatroidKind::Partition, 4, MetricKind::Euclidean);
    let t = parallel_coreset(&d, &m, 4, 4, CoresetStop::Tau(64)).unwrap();
    assert_eq!(t.tau, 64);
    for shard in 0..4 {
        assert_eq!(t.clusters.iter().filter(|c| c.shard == shard).count(), 16);
    }
    assert!(t.len() <= 64 * 4);
    assert_eq!(t, parallel_coreset(&d, &m, 4, 4, CoresetStop::Tau(64)).unwrap());
    let one = parallel_coreset(&d, &m, 4, 1, CoresetStop::Tau(64)).unwrap();
    assert_eq!(
        serde_json::to_string(&one).unwrap(),
        serde_json::to_string(&seq_coreset(&d, &m, 4, CoresetStop::Tau(64)).unwrap()).unwrap()
    );
}

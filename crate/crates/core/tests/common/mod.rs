#![allow(dead_code)]

use divmax::{Dataset, Matroid, MatroidKind, MetricKind, Point};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Points drawn around a few random centers in the unit cube.
pub fn blob_vectors(rng: &mut impl Rng, n: usize, dim: usize, blobs: usize, spread: f64) -> Vec<Vec<f64>> {
    let centers: Vec<Vec<f64>> = (0..blobs)
        .map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect())
        .collect();
    (0..n)
        .map(|_| {
            let c = &centers[rng.gen_range(0..blobs)];
            c.iter().map(|x| x + spread * (rng.gen::<f64>() * 2.0 - 1.0)).collect()
        })
        .collect()
}

pub fn uniform_vectors(rng: &mut impl Rng, n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect()).collect()
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("c{i}")).collect()
}

/// Random category assignment and matroid over the given vectors, retried
/// until the matroid has rank at least `k`.
pub fn with_matroid(
    rng: &mut impl Rng,
    vectors: &[Vec<f64>],
    kind: MatroidKind,
    k: usize,
    metric: MetricKind,
) -> (Dataset, Matroid) {
    loop {
        let cats = rng.gen_range(2..=5);
        let names = labels(cats);
        let (m, point_cats): (Matroid, Vec<Vec<String>>) = match kind {
            MatroidKind::Partition => {
                let quotas: Vec<(String, usize)> =
                    names.iter().map(|c| (c.clone(), rng.gen_range(1..=k.max(1)))).collect();
                let pc = vectors.iter().map(|_| vec![names[rng.gen_range(0..cats)].clone()]).collect();
                (Matroid::partition(quotas), pc)
            }
            MatroidKind::Transversal => {
                let pc = vectors
                    .iter()
                    .map(|_| {
                        let mut v: Vec<String> =
                            (0..rng.gen_range(1..=2)).map(|_| names[rng.gen_range(0..cats)].clone()).collect();
                        v.dedup();
                        v
                    })
                    .collect();
                (Matroid::transversal(names.clone()), pc)
            }
            MatroidKind::Custom => unimplemented!("custom matroids are built by the tests themselves"),
        };
        let pts: Vec<Point> = vectors
            .iter()
            .zip(point_cats)
            .enumerate()
            .map(|(i, (v, c))| Point::new(format!("x{i}"), v.clone(), c).unwrap())
            .collect();
        let d = Dataset::new(pts, metric).unwrap();
        if m.bind(&d).unwrap().rank().rank >= k {
            return (d, m);
        }
    }
}

/// Small clustered instance for quality checks.
pub fn clustered_instance(rng: &mut impl Rng, n: usize, kind: MatroidKind, k: usize) -> (Dataset, Matroid, usize) {
    let blobs = rng.gen_range(2..=6);
    let spread = [0.002, 0.01, 0.03][rng.gen_range(0..3)];
    let dim = rng.gen_range(2..=3);
    let v = blob_vectors(rng, n, dim, blobs, spread);
    let (d, m) = with_matroid(rng, &v, kind, k, MetricKind::Euclidean);
    (d, m, blobs)
}

/// `a >= b` up to a relative tolerance.
pub fn at_least(a: f64, b: f64, rel: f64) -> bool {
    a >= b - rel * b.abs().max(a.abs())
}

/// Feeds `points` to an epsilon-mode stream with `c = 32` and checks, after
/// every prefix of at least two points, that the diameter estimate is within
/// a factor 4 of the exact prefix diameter, that centers are pairwise
/// farther than `εR/(ck)` and that every point lies within `2εR/(ck)` of its
/// reference center. Returns the number of prefixes checked.
pub fn check_stream_invariants(
    points: &[Point],
    m: &Matroid,
    k: usize,
    eps: f64,
    metric: MetricKind,
) -> Result<usize, String> {
    use divmax::coreset::{StreamMode, StreamState};
    let c = 32.0;
    let mut st = StreamState::new(m, k, StreamMode::Epsilon { epsilon: eps, c }, metric)
        .unwrap()
        .with_reference_tracking();
    let mut diam: f64 = 0.0;
    let mut checked = 0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[..i] {
            diam = diam.max(metric.distance(p, q).unwrap());
        }
        st.feed(p.clone()).unwrap();
        if i == 0 {
            continue;
        }
        let r = st.r();
        let slack = 1e-12 * diam.max(1e-300);
        if !(diam / 4.0 <= r + slack && r <= diam + slack) {
            return Err(format!("prefix {}: R = {r} outside [{}, {diam}]", i + 1, diam / 4.0));
        }
        let sep = eps * r / (c * k as f64);
        let centers = st.center_points();
        for (a, x) in centers.iter().enumerate() {
            for y in &centers[a + 1..] {
                let dxy = metric.distance(x, y).unwrap();
                if dxy <= sep {
                    return Err(format!("prefix {}: centers {} and {} at {dxy} <= {sep}", i + 1, x.id(), y.id()));
                }
            }
        }
        let reach = 2.0 * sep;
        let dists = st.reference_distances().unwrap();
        if dists.len() != i + 1 {
            return Err(format!("prefix {}: {} reference entries", i + 1, dists.len()));
        }
        if let Some((j, dj)) = dists.iter().enumerate().find(|(_, &dj)| dj > reach + slack) {
            return Err(format!("prefix {}: point {j} at {dj} from its reference, above {reach}", i + 1));
        }
        checked += 1;
    }
    Ok(checked)
}

pub fn points_of(d: &Dataset) -> Vec<Point> {
    d.points().to_vec()
}

/// Outcome of comparing the optimum on a coreset with the optimum on the
/// full dataset.
#[derive(Debug, Clone, Copy)]
pub struct Quality {
    pub full: f64,
    pub coreset: f64,
    /// `4 * radius / average farness`.
    pub eps: f64,
}

impl Quality {
    /// Whether the guarantee says anything (the error is below 1).
    pub fn nontrivial(&self) -> bool {
        self.eps < 1.0
    }

    pub fn holds(&self) -> bool {
        self.coreset <= self.full * (1.0 + 1e-9) && at_least(self.coreset, (1.0 - self.eps) * self.full, 1e-9)
    }
}

/// Exhaustive optimum on `pool` against the brute-force optimum on `d`,
/// with the error implied by `radius`.
pub fn coreset_quality(
    d: &Dataset,
    m: &Matroid,
    k: usize,
    kind: divmax::DiversityKind,
    pool: &[usize],
    radius: f64,
) -> Quality {
    use divmax::diversity::pair_count;
    use divmax::oracle::brute_force_optimum;
    use divmax::solvers::{exhaustive_search, DEFAULT_BUDGET};
    let opt = brute_force_optimum(d, m, k, kind).unwrap();
    let c = m.bind(d).unwrap();
    let on_coreset = exhaustive_search(&c, pool, k, kind, DEFAULT_BUDGET).unwrap();
    let rho = opt.value / pair_count(kind, k).f as f64;
    Quality {
        full: opt.value,
        coreset: on_coreset.value,
        eps: if rho > 0.0 { 4.0 * radius / rho } else { f64::INFINITY },
    }
}

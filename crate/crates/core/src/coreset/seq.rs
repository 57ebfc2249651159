use rayon::prelude::*;

use super::{extract, Coreset, CoresetCluster, CoresetStop};
use crate::clustering::{gmm, gmm_init_on, run_until, Clustering, StopRule};
use crate::dataset::{Dataset, PointIdx};
use crate::error::{Error, Result};
use crate::matroid::{Constraint, Matroid};

/// Sequential coreset: GMM to the requested granularity, then one
/// extraction per cluster.
pub fn seq_coreset(d: &Dataset, m: &Matroid, k: usize, stop: CoresetStop) -> Result<Coreset> {
    let c = m.bind(d)?;
    if d.len() < 2 {
        return Err(Error::input("coreset construction needs at least two points"));
    }
    let rank = c.rank().rank;
    if k == 0 || k > rank {
        return Err(Error::input(format!(
            "k = {k} must lie in [1, rank = {rank}]"
        )));
    }
    seq_coreset_on(&c, (0..d.len()).collect(), k, stop, 0)
}

/// Sequential construction over `members` (ascending dataset indices),
/// tagging clusters with `shard`.
pub fn seq_coreset_on(
    c: &Constraint<'_>,
    members: Vec<PointIdx>,
    k: usize,
    stop: CoresetStop,
    shard: usize,
) -> Result<Coreset> {
    stop.validate()?;
    let d = c.dataset();
    let clustering = match stop {
        CoresetStop::Tau(t) => gmm(d, members, StopRule::Tau(t))?.0,
        CoresetStop::Epsilon(eps) if members.len() >= 2 => {
            let (start, delta) = gmm_init_on(d, members)?;
            let threshold = eps * delta / (16.0 * k as f64);
            run_until(d, start, |c, _| c.radius() <= threshold)?
        }
        CoresetStop::Epsilon(_) => Clustering::single(d, members)?,
    };
    Ok(from_clustering(c, &clustering, k, shard))
}

fn from_clustering(c: &Constraint<'_>, clustering: &Clustering, k: usize, shard: usize) -> Coreset {
    let groups = clustering.clusters();
    let pick = |(i, members): (usize, &Vec<PointIdx>)| CoresetCluster {
        center: clustering.centers()[i],
        shard,
        selected: extract(c, members, k),
    };
    let clusters: Vec<CoresetCluster> = if clustering.members().len() >= 1 << 14 {
        groups.par_iter().enumerate().map(pick).collect()
    } else {
        groups.iter().enumerate().map(pick).collect()
    };
    let r = clustering.radius();
    Coreset::from_clusters(clusters, r, vec![r])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coreset::size_bound;
    use crate::point::{MetricKind, Point};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = (0..n)
            .map(|i| {
                let v = vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                let cat = format!("c{}", rng.gen_range(0..3));
                Point::new(format!("p{i}"), v, [cat]).unwrap()
            })
            .collect();
        Dataset::new(pts, MetricKind::Euclidean).unwrap()
    }

    fn partition() -> Matroid {
        Matroid::partition([("c0", 2), ("c1", 2), ("c2", 2)])
    }

    #[test]
    fn tau_mode_respects_size_bound() {
        for seed in 0..20 {
            let d = random(60, seed);
            for tau in [1, 3, 8, 60, 100] {
                let t = seq_coreset(&d, &partition(), 4, CoresetStop::Tau(tau)).unwrap();
                assert_eq!(t.tau, tau.min(60));
                assert!(t.len() <= size_bound(crate::MatroidKind::Partition, 4, t.tau, 1).unwrap());
                assert!(t.clusters.iter().all(|cl| cl.selected.len() <= 4));
            }
        }
    }

    #[test]
    fn epsilon_mode_reaches_radius() {
        let d = random(80, 9);
        let k = 3;
        let eps = 0.5;
        let t = seq_coreset(&d, &partition(), k, CoresetStop::Epsilon(eps)).unwrap();
        assert!(t.radius <= eps * d.diameter() / (16.0 * k as f64));
    }

    #[test]
    fn epsilon_mode_two_points() {
        let pts = vec![
            Point::new("a", vec![0.0], ["c0"]).unwrap(),
            Point::new("b", vec![1.0], ["c1"]).unwrap(),
        ];
        let d = Dataset::new(pts, MetricKind::Euclidean).unwrap();
        let t = seq_coreset(&d, &partition(), 2, CoresetStop::Epsilon(0.3)).unwrap();
        assert_eq!(t.tau, 2);
        assert_eq!(t.ids, vec![0, 1]);
        assert_eq!(t.radius, 0.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        let d = random(10, 1);
        let m = Matroid::partition([("c0", 1), ("c1", 1), ("c2", 1)]);
        assert!(matches!(seq_coreset(&d, &m, 4, CoresetStop::Tau(3)), Err(Error::Input(_))));
        assert!(seq_coreset(&d, &m, 2, CoresetStop::Epsilon(1.5)).is_err());
        assert!(seq_coreset(&d, &m, 2, CoresetStop::Tau(0)).is_err());
    }

    #[test]
    fn deterministic() {
        let d = random(200, 4);
        let a = seq_coreset(&d, &partition(), 3, CoresetStop::Tau(16)).unwrap();
        let b = seq_coreset(&d, &partition(), 3, CoresetStop::Tau(16)).unwrap();
        assert_eq!(a, b);
    }
}

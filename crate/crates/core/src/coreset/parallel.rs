use rayon::prelude::*;

use super::{seq_coreset_on, Coreset, CoresetStop};
use crate::dataset::{Dataset, PointIdx};
use crate::error::{Error, Result};
use crate::matroid::Matroid;

/// Contiguous index ranges of `n` points split into `ell` shards whose sizes
/// differ by at most one.
pub fn shard_ranges(n: usize, ell: usize) -> Vec<std::ops::Range<usize>> {
    let (base, extra) = (n / ell, n % ell);
    let mut start = 0;
    (0..ell)
        .map(|i| {
            let len = base + usize::from(i < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .collect()
}

/// `min(sqrt(n / k), workers)`, at least 1.
pub fn default_parallelism(n: usize, k: usize, workers: usize) -> usize {
    let balanced = ((n as f64) / (k.max(1) as f64)).sqrt().floor() as usize;
    balanced.min(workers).max(1)
}

/// Composable coreset: the dataset is cut into `ell` contiguous shards, each
/// shard gets its own sequential coreset (concurrently), and the results are
/// united. In tau mode the `tau` clusters are split evenly across shards.
pub fn parallel_coreset(
    d: &Dataset,
    m: &Matroid,
    k: usize,
    ell: usize,
    stop: CoresetStop,
) -> Result<Coreset> {
    stop.validate()?;
    if ell == 0 || ell > d.len() {
        return Err(Error::input(format!(
            "parallelism must lie in [1, n = {}], got {ell}",
            d.len()
        )));
    }
    let c = m.bind(d)?;
    let rank = c.rank().rank;
    if k == 0 || k > rank {
        return Err(Error::input(format!("k = {k} must lie in [1, rank = {rank}]")));
    }
    let shards: Vec<(usize, Vec<PointIdx>, CoresetStop)> = shard_ranges(d.len(), ell)
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let stop = match stop {
                CoresetStop::Tau(t) => CoresetStop::Tau((t / ell + usize::from(i < t % ell)).max(1)),
                eps => eps,
            };
            (i, r.collect(), stop)
        })
        .collect();
    let parts = shards
        .into_par_iter()
        .map(|(i, members, stop)| seq_coreset_on(&c, members, k, stop, i))
        .collect::<Result<Vec<_>>>()?;
    let radii: Vec<f64> = parts.iter().map(|p| p.radius).collect();
    let radius = radii.iter().copied().fold(0.0, f64::max);
    let clusters = parts.into_iter().flat_map(|p| p.clusters).collect();
    Ok(Coreset::from_clusters(clusters, radius, radii))
}

/// Second-level reduction: a sequential coreset of the points of `t`.
pub fn reduce_coreset(
    t: &Coreset,
    d: &Dataset,
    m: &Matroid,
    k: usize,
    stop: CoresetStop,
) -> Result<Coreset> {
    if t.is_empty() {
        return Err(Error::input("cannot reduce an empty coreset"));
    }
    d.check_ids(&t.ids)?;
    let c = m.bind(d)?;
    seq_coreset_on(&c, t.ids.clone(), k, stop, 0)
}

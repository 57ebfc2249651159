//! Coreset constructions: sequential (GMM + per-cluster extraction),
//! streaming (delegate sets) and partitioned (union of per-shard coresets).

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, PointIdx};
use crate::matroid::{Constraint, MatroidKind};

mod parallel;
mod seq;
pub mod stream;

pub use parallel::{default_parallelism, parallel_coreset, reduce_coreset, shard_ranges};
pub use seq::{seq_coreset, seq_coreset_on};
pub use stream::{stream_coreset, StreamMode, StreamOutput, StreamState};

/// How fine the underlying clustering must be.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoresetStop {
    /// Radius at most `epsilon * delta / (16 k)`.
    Epsilon(f64),
    /// Exactly this many clusters (split across shards by the parallel driver).
    Tau(usize),
}

impl CoresetStop {
    pub(crate) fn validate(self) -> crate::Result<()> {
        match self {
            CoresetStop::Epsilon(e) if !(e > 0.0 && e < 1.0) => Err(crate::Error::input(format!(
                "epsilon must lie in (0, 1), got {e}"
            ))),
            CoresetStop::Tau(0) => Err(crate::Error::input("tau must be positive")),
            _ => Ok(()),
        }
    }
}

/// Points selected from one cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoresetCluster {
    /// Center of the cluster the points were taken from.
    pub center: PointIdx,
    /// Shard that produced the cluster (0 outside the parallel driver).
    pub shard: usize,
    /// Selected points, ascending.
    pub selected: Vec<PointIdx>,
}

/// A subset of the input with provenance. For sequential and parallel
/// constructions ids are dataset indices; for the streaming construction
/// they are stream positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coreset {
    /// Union of all selections, ascending.
    pub ids: Vec<PointIdx>,
    pub clusters: Vec<CoresetCluster>,
    /// Number of clusters used.
    pub tau: usize,
    /// Radius of the clustering the coreset was extracted from. For the
    /// streaming construction without reference tracking this is the
    /// certified upper bound instead of a measurement.
    pub radius: f64,
    /// Radius of each shard's clustering; a single entry outside the parallel driver.
    pub shard_radii: Vec<f64>,
}

impl Coreset {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub(crate) fn from_clusters(clusters: Vec<CoresetCluster>, radius: f64, shard_radii: Vec<f64>) -> Self {
        let ids: BTreeSet<PointIdx> = clusters.iter().flat_map(|c| c.selected.iter().copied()).collect();
        Coreset {
            ids: ids.into_iter().collect(),
            tau: clusters.len(),
            clusters,
            radius,
            shard_radii,
        }
    }

    /// The coreset points as a dataset of their own, in id order.
    pub fn materialize(&self, d: &Dataset) -> Dataset {
        d.subset(&self.ids)
    }
}

/// Upper bound on the coreset size guaranteed by the construction:
/// `k * tau` for partition matroids, `gamma * k^2 * tau` for transversal ones
/// where `gamma` is the largest number of categories per point. `None` for
/// custom matroids, whose coresets may hold whole clusters.
pub fn size_bound(kind: MatroidKind, k: usize, tau: usize, gamma: usize) -> Option<usize> {
    match kind {
        MatroidKind::Partition => Some(k * tau),
        MatroidKind::Transversal => Some(gamma * k * k * tau),
        MatroidKind::Custom => None,
    }
}

/// Selects the points of one cluster that go into the coreset.
///
/// A greedy maximal independent subset `U` of at most `k` points is taken.
/// If it is short of `k` points, transversal matroids top up every category
/// of the points of `U` to `min(k, |A ∩ cluster|)` members (a point counts for
/// all of its categories) and other non-partition matroids keep the whole
/// cluster. `cluster` is scanned in ascending index order.
pub fn extract(c: &Constraint<'_>, cluster: &[PointIdx], k: usize) -> Vec<PointIdx> {
    let mut u = c.maximal_independent_subset(cluster, k);
    if u.len() == k {
        return u;
    }
    match c.kind() {
        MatroidKind::Partition => u,
        MatroidKind::Custom => {
            let mut all = cluster.to_vec();
            all.sort_unstable();
            all
        }
        MatroidKind::Transversal => {
            let mut order = cluster.to_vec();
            order.sort_unstable();
            let mut count: HashMap<u32, usize> = HashMap::new();
            let mut available: HashMap<u32, usize> = HashMap::new();
            for &p in &order {
                for &cat in c.profile(p) {
                    *available.entry(cat).or_default() += 1;
                }
            }
            let mut chosen: HashSet<PointIdx> = u.iter().copied().collect();
            for &p in &u {
                for &cat in c.profile(p) {
                    *count.entry(cat).or_default() += 1;
                }
            }
            let wanted: BTreeSet<u32> = u.iter().flat_map(|&p| c.profile(p).iter().copied()).collect();
            for cat in wanted {
                let target = k.min(available[&cat]);
                for &p in &order {
                    if count.get(&cat).copied().unwrap_or(0) >= target {
                        break;
                    }
                    if !chosen.contains(&p) && c.profile(p).contains(&cat) {
                        chosen.insert(p);
                        u.push(p);
                        for &other in c.profile(p) {
                            *count.entry(other).or_default() += 1;
                        }
                    }
                }
            }
            u.sort_unstable();
            u
        }
    }
}

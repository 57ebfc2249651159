//! Independence oracles for partition, transversal and user-supplied matroids,
//! plus the greedy and augmentation helpers used by the coreset constructions.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::dataset::{Dataset, PointIdx};
use crate::error::{Error, Result};
use crate::matching::{maximum_matching, IncrementalMatching};
use crate::point::Point;

/// Predicate deciding independence of a set of points for a custom matroid.
pub type IndependenceFn = dyn Fn(&[&Point]) -> bool + Send + Sync;

/// Active category indices of one point under a matroid. Partition profiles
/// hold exactly one entry; custom matroids use an empty profile.
pub type Profile = Vec<u32>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatroidKind {
    Partition,
    Transversal,
    Custom,
}

#[derive(Clone)]
enum Spec {
    Partition { quotas: Vec<usize> },
    Transversal,
    Custom { name: String, oracle: Arc<IndependenceFn> },
}

/// A matroid over points, described by category labels (partition,
/// transversal) or by an arbitrary independence predicate (custom).
#[derive(Clone)]
pub struct Matroid {
    spec: Spec,
    labels: Vec<String>,
    label_ix: HashMap<String, u32>,
}

impl fmt::Debug for Matroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.spec {
            Spec::Partition { quotas } => f
                .debug_map()
                .entries(self.labels.iter().zip(quotas))
                .finish(),
            Spec::Transversal => f.debug_set().entries(&self.labels).finish(),
            Spec::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankInfo {
    pub rank: usize,
}

impl Matroid {
    /// Partition matroid with a cardinality bound per category.
    pub fn partition<S: Into<String>>(quotas: impl IntoIterator<Item = (S, usize)>) -> Self {
        let quotas: BTreeMap<String, usize> =
            quotas.into_iter().map(|(c, q)| (c.into(), q)).collect();
        let labels: Vec<String> = quotas.keys().cloned().collect();
        Matroid {
            spec: Spec::Partition {
                quotas: quotas.into_values().collect(),
            },
            label_ix: index_labels(&labels),
            labels,
        }
    }

    /// Transversal matroid over the given active categories.
    pub fn transversal<S: Into<String>>(categories: impl IntoIterator<Item = S>) -> Self {
        let labels: Vec<String> = categories
            .into_iter()
            .map(Into::into)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        Matroid {
            spec: Spec::Transversal,
            label_ix: index_labels(&labels),
            labels,
        }
    }

    /// Matroid defined by a caller-supplied independence predicate. The
    /// predicate must describe a matroid; the empty set and singletons are
    /// expected to be independent.
    pub fn custom(
        name: impl Into<String>,
        oracle: impl Fn(&[&Point]) -> bool + Send + Sync + 'static,
    ) -> Self {
        Matroid {
            spec: Spec::Custom {
                name: name.into(),
                oracle: Arc::new(oracle),
            },
            labels: Vec::new(),
            label_ix: HashMap::new(),
        }
    }

    pub fn kind(&self) -> MatroidKind {
        match self.spec {
            Spec::Partition { .. } => MatroidKind::Partition,
            Spec::Transversal => MatroidKind::Transversal,
            Spec::Custom { .. } => MatroidKind::Custom,
        }
    }

    /// Category labels known to the matroid, in index order.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Partition quotas as `(label, quota)` pairs; `None` for other kinds.
    pub fn quotas(&self) -> Option<Vec<(&str, usize)>> {
        match &self.spec {
            Spec::Partition { quotas } => Some(
                self.labels
                    .iter()
                    .map(String::as_str)
                    .zip(quotas.iter().copied())
                    .collect(),
            ),
            _ => None,
        }
    }

    /// Resolves the categories of `p` that are relevant to this matroid.
    pub fn profile(&self, p: &Point) -> Result<Profile> {
        let active: Profile = p
            .categories()
            .iter()
            .filter_map(|c| self.label_ix.get(c).copied())
            .collect();
        match self.spec {
            Spec::Partition { .. } | Spec::Transversal if active.is_empty() => {
                Err(Error::input(format!(
                    "point {:?}: none of its categories {:?} appears in the matroid configuration",
                    p.id(),
                    p.categories()
                )))
            }
            Spec::Partition { .. } if active.len() != 1 => Err(Error::input(format!(
                "point {:?} must carry exactly one partition category, found {}",
                p.id(),
                active.len()
            ))),
            Spec::Custom { .. } => Ok(Vec::new()),
            _ => Ok(active),
        }
    }

    /// Independence of an arbitrary collection of profiled points, computed
    /// from scratch (a fresh maximum matching for transversal matroids).
    pub fn independent_members(&self, members: &[(&Point, &[u32])]) -> bool {
        match &self.spec {
            Spec::Partition { quotas } => {
                let mut counts: HashMap<u32, usize> = HashMap::new();
                members.iter().all(|(_, cats)| {
                    let c = counts.entry(cats[0]).or_default();
                    *c += 1;
                    *c <= quotas[cats[0] as usize]
                })
            }
            Spec::Transversal => {
                let mut local: HashMap<u32, usize> = HashMap::new();
                let adj: Vec<Vec<usize>> = members
                    .iter()
                    .map(|(_, cats)| {
                        cats.iter()
                            .map(|c| {
                                let next = local.len();
                                *local.entry(*c).or_insert(next)
                            })
                            .collect()
                    })
                    .collect();
                members.len() <= local.len() && maximum_matching(&adj, local.len()) == members.len()
            }
            Spec::Custom { oracle, .. } => {
                let pts: Vec<&Point> = members.iter().map(|(p, _)| *p).collect();
                oracle(&pts)
            }
        }
    }

    /// Empty independent set that can be grown one point at a time.
    pub fn empty_set(&self) -> GrowingSet<'_> {
        GrowingSet {
            matroid: self,
            counts: match &self.spec {
                Spec::Partition { quotas } => vec![0; quotas.len()],
                _ => Vec::new(),
            },
            matching: IncrementalMatching::default(),
            points: Vec::new(),
        }
    }

    /// Binds the matroid to a dataset, resolving every point's categories.
    pub fn bind<'a>(&'a self, dataset: &'a Dataset) -> Result<Constraint<'a>> {
        let profiles = dataset
            .points()
            .iter()
            .map(|p| self.profile(p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Constraint {
            matroid: self,
            dataset,
            profiles,
        })
    }
}

fn index_labels(labels: &[String]) -> HashMap<String, u32> {
    labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.clone(), i as u32))
        .collect()
}

/// An independent set under construction. Each [`GrowingSet::try_add`] keeps
/// the point only if the set stays independent.
#[derive(Clone)]
pub struct GrowingSet<'m> {
    matroid: &'m Matroid,
    counts: Vec<usize>,
    matching: IncrementalMatching,
    points: Vec<Point>,
}

impl<'m> GrowingSet<'m> {
    pub fn len(&self) -> usize {
        match self.matroid.spec {
            Spec::Partition { .. } => self.counts.iter().sum(),
            Spec::Transversal => self.matching.len(),
            Spec::Custom { .. } => self.points.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether adding the point would keep the set independent, without adding it.
    pub fn can_add(&self, p: &Point, cats: &[u32]) -> bool {
        match &self.matroid.spec {
            Spec::Partition { quotas } => {
                let c = cats[0] as usize;
                self.counts[c] < quotas[c]
            }
            Spec::Transversal => self.matching.clone().try_add(cats),
            Spec::Custom { oracle, .. } => {
                let mut pts: Vec<&Point> = self.points.iter().collect();
                pts.push(p);
                oracle(&pts)
            }
        }
    }

    pub fn try_add(&mut self, p: &Point, cats: &[u32]) -> bool {
        match &self.matroid.spec {
            Spec::Partition { quotas } => {
                let c = cats[0] as usize;
                if self.counts[c] < quotas[c] {
                    self.counts[c] += 1;
                    true
                } else {
                    false
                }
            }
            Spec::Transversal => self.matching.try_add(cats),
            Spec::Custom { oracle, .. } => {
                let mut pts: Vec<&Point> = self.points.iter().collect();
                pts.push(p);
                if oracle(&pts) {
                    self.points.push(p.clone());
                    true
                } else {
                    false
                }
            }
        }
    }
}

/// A matroid bound to a dataset; all ids are dataset indices.
#[derive(Clone)]
pub struct Constraint<'a> {
    matroid: &'a Matroid,
    dataset: &'a Dataset,
    profiles: Vec<Profile>,
}

impl<'a> Constraint<'a> {
    pub fn matroid(&self) -> &'a Matroid {
        self.matroid
    }

    pub fn dataset(&self) -> &'a Dataset {
        self.dataset
    }

    pub fn kind(&self) -> MatroidKind {
        self.matroid.kind()
    }

    pub fn profile(&self, i: PointIdx) -> &[u32] {
        &self.profiles[i]
    }

    /// Largest number of active categories carried by a single point.
    pub fn max_categories_per_point(&self) -> usize {
        self.profiles.iter().map(Vec::len).max().unwrap_or(0).max(1)
    }

    /// Checked independence test for a set of dataset indices.
    pub fn is_independent(&self, ids: &[PointIdx]) -> Result<bool> {
        self.dataset.check_ids(ids)?;
        Ok(self.independent(ids))
    }

    /// Independence test without id validation.
    pub fn independent(&self, ids: &[PointIdx]) -> bool {
        let members: Vec<(&Point, &[u32])> = ids
            .iter()
            .map(|&i| (self.dataset.point(i), self.profiles[i].as_slice()))
            .collect();
        self.matroid.independent_members(&members)
    }

    pub fn empty_set(&self) -> GrowingSet<'a> {
        self.matroid.empty_set()
    }

    /// Grows `set` with point `i` if independence is kept.
    pub fn try_add(&self, set: &mut GrowingSet<'a>, i: PointIdx) -> bool {
        set.try_add(self.dataset.point(i), &self.profiles[i])
    }

    pub fn can_add(&self, set: &GrowingSet<'a>, i: PointIdx) -> bool {
        set.can_add(self.dataset.point(i), &self.profiles[i])
    }

    /// Independent set holding exactly `ids` (which must be independent).
    pub fn set_of(&self, ids: &[PointIdx]) -> Option<GrowingSet<'a>> {
        let mut set = self.empty_set();
        ids.iter()
            .all(|&i| self.try_add(&mut set, i))
            .then_some(set)
    }

    /// Rank of the matroid restricted to the dataset, by greedy growth.
    pub fn rank(&self) -> RankInfo {
        let all: Vec<PointIdx> = (0..self.dataset.len()).collect();
        RankInfo {
            rank: self.maximal_independent_subset(&all, usize::MAX).len(),
        }
    }

    /// Greedy maximal independent subset of `pool` with at most `cap`
    /// elements, scanning the pool in dataset index order.
    pub fn maximal_independent_subset(&self, pool: &[PointIdx], cap: usize) -> Vec<PointIdx> {
        let mut order = pool.to_vec();
        if !order.windows(2).all(|w| w[0] < w[1]) {
            order.sort_unstable();
            order.dedup();
        }
        let mut set = self.empty_set();
        let mut out = Vec::new();
        for i in order {
            if out.len() >= cap {
                break;
            }
            if self.try_add(&mut set, i) {
                out.push(i);
            }
        }
        out
    }

    /// Extends independent `base` with elements of independent `donor` until
    /// it has `target` elements, keeping independence at every step.
    pub fn augment(
        &self,
        base: &[PointIdx],
        donor: &[PointIdx],
        target: usize,
    ) -> Result<Vec<PointIdx>> {
        self.dataset.check_ids(base)?;
        self.dataset.check_ids(donor)?;
        if target < base.len() || donor.len() < target {
            return Err(Error::input(format!(
                "augment needs |base| <= target <= |donor|, got {} / {target} / {}",
                base.len(),
                donor.len()
            )));
        }
        let Some(mut set) = self.set_of(base) else {
            return Err(Error::input("augment: base set is not independent"));
        };
        if !self.independent(donor) {
            return Err(Error::input("augment: donor set is not independent"));
        }
        let mut out = base.to_vec();
        for &x in donor {
            if out.len() == target {
                break;
            }
            if !out.contains(&x) && self.try_add(&mut set, x) {
                out.push(x);
            }
        }
        if out.len() < target {
            return Err(Error::Invariant(format!(
                "augmentation stalled at {} of {target} elements; the oracle is not a matroid",
                out.len()
            )));
        }
        Ok(out)
    }
}

/// Checked independence test of `ids` in `d` under `m`.
pub fn is_independent(m: &Matroid, d: &Dataset, ids: &[PointIdx]) -> Result<bool> {
    m.bind(d)?.is_independent(ids)
}

pub fn rank(m: &Matroid, d: &Dataset) -> Result<RankInfo> {
    Ok(m.bind(d)?.rank())
}

pub fn maximal_independent_subset(
    m: &Matroid,
    d: &Dataset,
    pool: &[PointIdx],
    cap: usize,
) -> Result<Vec<PointIdx>> {
    d.check_ids(pool)?;
    Ok(m.bind(d)?.maximal_independent_subset(pool, cap))
}

pub fn augment(
    m: &Matroid,
    d: &Dataset,
    base: &[PointIdx],
    donor: &[PointIdx],
    target: usize,
) -> Result<Vec<PointIdx>> {
    m.bind(d)?.augment(base, donor, target)
}

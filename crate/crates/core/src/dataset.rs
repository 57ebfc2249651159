use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::point::{MetricKind, Point};

/// Index of a point inside a [`Dataset`].
pub type PointIdx = usize;

/// An indexed, immutable collection of points sharing one dimensionality and one metric.
#[derive(Debug, Clone)]
pub struct Dataset {
    points: Vec<Point>,
    metric: MetricKind,
    by_id: HashMap<String, PointIdx>,
}

impl Dataset {
    pub fn new(points: Vec<Point>, metric: MetricKind) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::input("dataset must contain at least one point"));
        };
        let dim = first.dim();
        let mut by_id = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::input(format!(
                    "point {:?} has dimension {}, expected {dim}",
                    p.id(),
                    p.dim()
                )));
            }
            if metric == MetricKind::AngularCosine && p.is_zero() {
                return Err(Error::input(format!(
                    "point {:?} is the zero vector, not allowed under the angular metric",
                    p.id()
                )));
            }
            if by_id.insert(p.id().to_string(), i).is_some() {
                return Err(Error::input(format!("duplicate point id {:?}", p.id())));
            }
        }
        Ok(Dataset {
            points,
            metric,
            by_id,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn metric(&self) -> MetricKind {
        self.metric
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: PointIdx) -> &Point {
        &self.points[i]
    }

    pub fn index_of(&self, id: &str) -> Option<PointIdx> {
        self.by_id.get(id).copied()
    }

    /// Distance between the points at indices `i` and `j`.
    #[inline]
    pub fn dist(&self, i: PointIdx, j: PointIdx) -> f64 {
        self.metric.dist(&self.points[i], &self.points[j])
    }

    /// Exact diameter by a quadratic scan over all pairs.
    pub fn diameter(&self) -> f64 {
        self.diameter_of(&(0..self.len()).collect::<Vec<_>>())
    }

    /// Exact diameter of the subset `ids`.
    pub fn diameter_of(&self, ids: &[PointIdx]) -> f64 {
        let mut best = 0.0f64;
        for (a, &i) in ids.iter().enumerate() {
            for &j in &ids[a + 1..] {
                best = best.max(self.dist(i, j));
            }
        }
        best
    }

    /// A copy with the point order shuffled by a seeded Fisher-Yates permutation.
    pub fn permuted(&self, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<PointIdx> = (0..self.len()).collect();
        order.shuffle(&mut rng);
        self.subset(&order)
    }

    /// The sub-dataset made of `ids`, in that order.
    pub fn subset(&self, ids: &[PointIdx]) -> Dataset {
        let points: Vec<Point> = ids.iter().map(|&i| self.points[i].clone()).collect();
        let by_id = points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.id().to_string(), i))
            .collect();
        Dataset {
            points,
            metric: self.metric,
            by_id,
        }
    }

    /// Validates a list of indices as a set of points of this dataset.
    pub fn check_ids(&self, ids: &[PointIdx]) -> Result<()> {
        let mut seen = vec![false; self.len()];
        for &i in ids {
            if i >= self.len() {
                return Err(Error::input(format!(
                    "unknown point index {i} (dataset has {} points)",
                    self.len()
                )));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::input(format!(
                    "point {:?} listed twice",
                    self.points[i].id()
                )));
            }
        }
        Ok(())
    }

    /// Resolves string identifiers to indices.
    pub fn resolve(&self, ids: &[impl AsRef<str>]) -> Result<Vec<PointIdx>> {
        ids.iter()
            .map(|id| {
                self.index_of(id.as_ref())
                    .ok_or_else(|| Error::input(format!("unknown point id {:?}", id.as_ref())))
            })
            .collect()
    }
}

/// Diameter of the whole dataset.
pub fn diameter(d: &Dataset) -> f64 {
    d.diameter()
}

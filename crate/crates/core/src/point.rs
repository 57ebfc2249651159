use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A dataset element: an identifier, a dense vector and the category labels it belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoint", into = "RawPoint")]
pub struct Point {
    id: String,
    vector: Vec<f64>,
    categories: Vec<String>,
    inv_norm: f64,
}

#[derive(Serialize, Deserialize)]
struct RawPoint {
    id: String,
    vector: Vec<f64>,
    categories: Vec<String>,
}

impl TryFrom<RawPoint> for Point {
    type Error = Error;

    fn try_from(raw: RawPoint) -> Result<Self> {
        Point::new(raw.id, raw.vector, raw.categories)
    }
}

impl From<Point> for RawPoint {
    fn from(p: Point) -> Self {
        RawPoint {
            id: p.id,
            vector: p.vector,
            categories: p.categories,
        }
    }
}

impl Point {
    /// Builds a point, rejecting empty or non-finite vectors and empty category lists.
    /// Duplicate category labels are collapsed, keeping first occurrence order.
    pub fn new(
        id: impl Into<String>,
        vector: Vec<f64>,
        categories: impl IntoIterator<Item = impl Into<String>>,
    ) -> Result<Self> {
        let id = id.into();
        if vector.is_empty() {
            return Err(Error::input(format!("point {id:?}: empty vector")));
        }
        if let Some(pos) = vector.iter().position(|x| !x.is_finite()) {
            return Err(Error::input(format!(
                "point {id:?}: non-finite coordinate at position {pos}"
            )));
        }
        let mut cats: Vec<String> = Vec::new();
        for c in categories {
            let c = c.into();
            if !cats.contains(&c) {
                cats.push(c);
            }
        }
        if cats.is_empty() {
            return Err(Error::input(format!("point {id:?}: no categories")));
        }
        let norm = vector.iter().map(|x| x * x).sum::<f64>().sqrt();
        let inv_norm = if norm > 0.0 { 1.0 / norm } else { 0.0 };
        Ok(Point {
            id,
            vector,
            categories: cats,
            inv_norm,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn vector(&self) -> &[f64] {
        &self.vector
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.inv_norm == 0.0
    }
}

/// Distance function used for a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    /// Angle between the two vectors divided by pi, in `[0, 1]`.
    #[default]
    AngularCosine,
    Euclidean,
}

impl MetricKind {
    /// Checked distance between two points.
    pub fn distance(self, a: &Point, b: &Point) -> Result<f64> {
        if a.dim() != b.dim() {
            return Err(Error::input(format!(
                "dimension mismatch: {:?} has {}, {:?} has {}",
                a.id,
                a.dim(),
                b.id,
                b.dim()
            )));
        }
        if self == MetricKind::AngularCosine && (a.is_zero() || b.is_zero()) {
            let which = if a.is_zero() { &a.id } else { &b.id };
            return Err(Error::input(format!(
                "zero vector {which:?} has no angular distance"
            )));
        }
        Ok(self.dist(a, b))
    }

    /// Unchecked distance; callers guarantee equal dimensions and (for the
    /// angular metric) non-zero vectors.
    #[inline]
    pub(crate) fn dist(self, a: &Point, b: &Point) -> f64 {
        match self {
            MetricKind::Euclidean => a
                .vector
                .iter()
                .zip(&b.vector)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            MetricKind::AngularCosine => {
                // angle = 2 atan2(|u - v|, |u + v|) on the unit vectors u, v;
                // equal to arccos(u.v) but stable near 0 and pi.
                let (ia, ib) = (a.inv_norm, b.inv_norm);
                let mut diff = 0.0;
                let mut sum = 0.0;
                for (x, y) in a.vector.iter().zip(&b.vector) {
                    let (u, v) = (x * ia, y * ib);
                    diff += (u - v) * (u - v);
                    sum += (u + v) * (u + v);
                }
                let angle = 2.0 * diff.sqrt().atan2(sum.sqrt());
                (angle / std::f64::consts::PI).clamp(0.0, 1.0)
            }
        }
    }
}

impl std::str::FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "angular-cosine" | "angular" | "cosine" => Ok(MetricKind::AngularCosine),
            "euclidean" => Ok(MetricKind::Euclidean),
            other => Err(Error::input(format!("unknown metric {other:?}"))),
        }
    }
}

/// Distance between two points under `metric`.
pub fn distance(a: &Point, b: &Point, metric: MetricKind) -> Result<f64> {
    metric.distance(a, b)
}

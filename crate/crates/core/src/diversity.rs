//! Exact evaluation of the diversity objectives over a small point set.

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, PointIdx};
use crate::error::{Error, Result};

/// Largest set handled by the Held-Karp cycle evaluator.
pub const MAX_CYCLE_SIZE: usize = 18;
/// Largest set handled by the bipartition evaluator.
pub const MAX_BIPARTITION_SIZE: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiversityKind {
    /// Sum of all pairwise distances (remote-clique).
    Sum,
    /// Cheapest star centered at a point of the set.
    Star,
    /// Minimum spanning tree weight.
    Tree,
    /// Minimum Hamiltonian cycle weight.
    Cycle,
    /// Cheapest balanced cut.
    Bipartition,
}

impl DiversityKind {
    pub const ALL: [DiversityKind; 5] = [
        DiversityKind::Sum,
        DiversityKind::Star,
        DiversityKind::Tree,
        DiversityKind::Cycle,
        DiversityKind::Bipartition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DiversityKind::Sum => "sum",
            DiversityKind::Star => "star",
            DiversityKind::Tree => "tree",
            DiversityKind::Cycle => "cycle",
            DiversityKind::Bipartition => "bipartition",
        }
    }

    /// Smallest set size the objective is defined on.
    pub fn min_size(self) -> usize {
        match self {
            DiversityKind::Cycle => 3,
            _ => 2,
        }
    }

    /// Largest set size the exact evaluator supports.
    pub fn max_size(self) -> usize {
        match self {
            DiversityKind::Cycle => MAX_CYCLE_SIZE,
            DiversityKind::Bipartition => MAX_BIPARTITION_SIZE,
            _ => usize::MAX,
        }
    }

    /// Rejects set sizes the evaluator cannot handle.
    pub fn check_size(self, k: usize) -> Result<()> {
        if k < self.min_size() {
            return Err(Error::input(format!(
                "{} diversity needs at least {} points, got {k}",
                self.name(),
                self.min_size()
            )));
        }
        if k > self.max_size() {
            return Err(Error::Capability(format!(
                "{} diversity is evaluated exactly only up to {} points, got {k}",
                self.name(),
                self.max_size()
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for DiversityKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for DiversityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DiversityKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::input(format!("unknown diversity kind {s:?}")))
    }
}

/// Number of distance terms `f(k)` making up an objective value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCount {
    pub kind: DiversityKind,
    pub k: usize,
    pub f: usize,
}

pub fn pair_count(kind: DiversityKind, k: usize) -> PairCount {
    let f = match kind {
        DiversityKind::Sum => k * k.saturating_sub(1) / 2,
        DiversityKind::Star | DiversityKind::Tree => k.saturating_sub(1),
        DiversityKind::Cycle => k,
        DiversityKind::Bipartition => (k / 2) * k.div_ceil(2),
    };
    PairCount { kind, k, f }
}

/// An independent set of exactly `k` points with its diversity value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub ids: Vec<PointIdx>,
    pub k: usize,
    pub kind: DiversityKind,
    pub value: f64,
}

/// Dense symmetric distance matrix over a handful of points.
#[derive(Debug, Clone)]
pub struct DistMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistMatrix {
    pub fn new(d: &Dataset, ids: &[PointIdx]) -> Self {
        let n = ids.len();
        let mut data = vec![0.0; n * n];
        for a in 0..n {
            for b in a + 1..n {
                let x = d.dist(ids[a], ids[b]);
                data[a * n + b] = x;
                data[b * n + a] = x;
            }
        }
        DistMatrix { n, data }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for a in 0..n {
            for b in a + 1..n {
                let x = f(a, b);
                data[a * n + b] = x;
                data[b * n + a] = x;
            }
        }
        DistMatrix { n, data }
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.data[a * self.n + b]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Matrix restricted to the rows/columns in `sel`.
    pub fn select(&self, sel: &[usize]) -> DistMatrix {
        DistMatrix::from_fn(sel.len(), |a, b| self.get(sel[a], sel[b]))
    }
}

/// Objective value of `kind` on the point set described by `m`. Size limits
/// must already be checked.
pub fn evaluate_matrix(m: &DistMatrix, kind: DiversityKind) -> f64 {
    match kind {
        DiversityKind::Sum => sum(m),
        DiversityKind::Star => star(m),
        DiversityKind::Tree => mst(m),
        DiversityKind::Cycle => held_karp(m),
        DiversityKind::Bipartition => min_bisection(m),
    }
}

/// Objective value of `kind` on the points `ids` of `d`.
pub fn evaluate(d: &Dataset, kind: DiversityKind, ids: &[PointIdx]) -> Result<f64> {
    d.check_ids(ids)?;
    kind.check_size(ids.len())?;
    Ok(evaluate_matrix(&DistMatrix::new(d, ids), kind))
}

/// Weight of a minimum spanning tree over `ids`.
pub fn mst_weight(d: &Dataset, ids: &[PointIdx]) -> Result<f64> {
    evaluate(d, DiversityKind::Tree, ids)
}

/// Weight of a minimum Hamiltonian cycle over `ids` (at most [`MAX_CYCLE_SIZE`] points).
pub fn tsp_weight(d: &Dataset, ids: &[PointIdx]) -> Result<f64> {
    evaluate(d, DiversityKind::Cycle, ids)
}

fn sum(m: &DistMatrix) -> f64 {
    let mut s = 0.0;
    for a in 0..m.n {
        for b in a + 1..m.n {
            s += m.get(a, b);
        }
    }
    s
}

fn star(m: &DistMatrix) -> f64 {
    (0..m.n)
        .map(|c| (0..m.n).filter(|&u| u != c).map(|u| m.get(c, u)).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

/// Dense Prim, O(n^2).
fn mst(m: &DistMatrix) -> f64 {
    let n = m.n;
    if n < 2 {
        return 0.0;
    }
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    best[0] = 0.0;
    let mut total = 0.0;
    for _ in 0..n {
        let u = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| best[a].total_cmp(&best[b]))
            .unwrap();
        in_tree[u] = true;
        total += best[u];
        for v in 0..n {
            if !in_tree[v] {
                best[v] = best[v].min(m.get(u, v));
            }
        }
    }
    total
}

/// Held-Karp over subsets containing vertex 0, O(2^n n^2).
fn held_karp(m: &DistMatrix) -> f64 {
    let n = m.n;
    if n < 2 {
        return 0.0;
    }
    if n == 2 {
        return 2.0 * m.get(0, 1);
    }
    // subsets of {1..n-1}; cost[mask][j] = shortest path from 0 visiting mask, ending at j
    let rest = n - 1;
    let full = 1usize << rest;
    let mut cost = vec![f64::INFINITY; full * rest];
    for j in 0..rest {
        cost[(1 << j) * rest + j] = m.get(0, j + 1);
    }
    for mask in 1..full {
        for j in 0..rest {
            let cur = cost[mask * rest + j];
            if mask >> j & 1 == 0 || cur == f64::INFINITY {
                continue;
            }
            for t in 0..rest {
                if mask >> t & 1 == 1 {
                    continue;
                }
                let next = (mask | 1 << t) * rest + t;
                let cand = cur + m.get(j + 1, t + 1);
                if cand < cost[next] {
                    cost[next] = cand;
                }
            }
        }
    }
    (0..rest)
        .map(|j| cost[(full - 1) * rest + j] + m.get(j + 1, 0))
        .fold(f64::INFINITY, f64::min)
}

/// Minimum over all floor(n/2)-subsets Q of the cut weight between Q and the rest.
fn min_bisection(m: &DistMatrix) -> f64 {
    let n = m.n;
    let half = n / 2;
    let mut best = f64::INFINITY;
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != half {
            continue;
        }
        let mut cut = 0.0;
        for u in (0..n).filter(|u| mask >> u & 1 == 1) {
            for v in (0..n).filter(|v| mask >> v & 1 == 0) {
                cut += m.get(u, v);
            }
        }
        best = best.min(cut);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::{MetricKind, Point};

    fn unit_triangle() -> DistMatrix {
        DistMatrix::from_fn(3, |_, _| 1.0)
    }

    fn line(xs: &[f64]) -> Dataset {
        let pts = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| Point::new(format!("p{i}"), vec![x, 0.0], ["a"]).unwrap())
            .collect();
        Dataset::new(pts, MetricKind::Euclidean).unwrap()
    }

    #[test]
    fn unit_triangle_values() {
        let m = unit_triangle();
        let got: Vec<f64> = DiversityKind::ALL
            .iter()
            .map(|&k| evaluate_matrix(&m, k))
            .collect();
        assert_eq!(got, vec![3.0, 2.0, 2.0, 3.0, 2.0]);
    }

    #[test]
    fn duplicates_and_collinear() {
        let d = line(&[1.0, 1.0]);
        assert_eq!(evaluate(&d, DiversityKind::Sum, &[0, 1]).unwrap(), 0.0);
        let d = line(&[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(mst_weight(&d, &[0, 1, 2, 3]).unwrap(), 3.0);
    }

    #[test]
    fn unit_square_tour() {
        let pts = [[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]
            .iter()
            .enumerate()
            .map(|(i, v)| Point::new(format!("s{i}"), v.to_vec(), ["a"]).unwrap())
            .collect();
        let d = Dataset::new(pts, MetricKind::Euclidean).unwrap();
        assert!((tsp_weight(&d, &[0, 1, 2, 3]).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn size_errors() {
        let d = line(&[0.0, 1.0, 2.0]);
        assert!(matches!(evaluate(&d, DiversityKind::Sum, &[0]), Err(Error::Input(_))));
        assert!(matches!(evaluate(&d, DiversityKind::Cycle, &[0, 1]), Err(Error::Input(_))));
        let d = line(&(0..19).map(f64::from).collect::<Vec<_>>());
        let all: Vec<usize> = (0..19).collect();
        assert!(matches!(tsp_weight(&d, &all), Err(Error::Capability(_))));
        assert!(evaluate(&d, DiversityKind::Tree, &all).is_ok());
    }

    #[test]
    fn pair_counts() {
        assert_eq!(pair_count(DiversityKind::Sum, 4).f, 6);
        assert_eq!(pair_count(DiversityKind::Cycle, 4).f, 4);
        assert_eq!(pair_count(DiversityKind::Bipartition, 5).f, 6);
        assert_eq!(pair_count(DiversityKind::Star, 5).f, 4);
        assert_eq!(pair_count(DiversityKind::Tree, 2).f, 1);
    }

    #[test]
    fn evaluate_is_permutation_invariant() {
        let d = line(&[0.0, 0.3, 1.7, 2.0, 5.5, 6.1]);
        for kind in DiversityKind::ALL {
            let a = evaluate(&d, kind, &[0, 1, 2, 3, 4, 5]).unwrap();
            let b = evaluate(&d, kind, &[5, 3, 1, 0, 4, 2]).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.max(1.0), "{kind}");
        }
    }
}

//! Deterministic Gaussian-blob datasets with category labels, shaped like
//! the song (partition, 16 genres, rank 89) and encyclopedia (transversal,
//! 100 topics) corpora.

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::MatroidConfig;
use crate::point::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SynthMatroid {
    Partition,
    Transversal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n: usize,
    pub dim: usize,
    /// Number of Gaussian blobs.
    pub clusters: usize,
    /// Number of category labels.
    pub categories: usize,
    pub matroid: SynthMatroid,
    pub seed: u64,
    /// Standard deviation of each blob around its center (centers are
    /// standard normal).
    pub spread: f64,
    /// Partition only: target total of the quotas.
    pub rank: usize,
    /// Transversal only: most labels a single point carries.
    pub max_categories: usize,
}

impl SynthSpec {
    pub fn new(n: usize, dim: usize, categories: usize, matroid: SynthMatroid, seed: u64) -> Self {
        SynthSpec {
            n,
            dim,
            clusters: 16,
            categories,
            matroid,
            seed,
            spread: 0.25,
            rank: 89,
            max_categories: 3,
        }
    }

    /// Song-like shape at 1/1000 scale: partition over 16 genres, rank 89.
    pub fn songs(seed: u64) -> Self {
        SynthSpec::new(238, 32, 16, SynthMatroid::Partition, seed)
    }

    /// Encyclopedia-like shape at 1/1000 scale: 25 dimensions, transversal
    /// over 100 topics.
    pub fn wikipedia(seed: u64) -> Self {
        SynthSpec::new(5_887, 25, 100, SynthMatroid::Transversal, seed)
    }

    fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::input(format!("synthetic spec: {what}")));
        if self.n == 0 || self.dim == 0 || self.clusters == 0 || self.categories == 0 {
            return bad("n, dim, clusters and categories must be positive");
        }
        if !(self.spread >= 0.0 && self.spread.is_finite()) {
            return bad("spread must be a finite value >= 0");
        }
        if self.matroid == SynthMatroid::Transversal
            && !(1..=self.categories).contains(&self.max_categories)
        {
            return bad("max_categories must lie in [1, categories]");
        }
        Ok(())
    }
}

fn label(prefix: char, i: usize, total: usize) -> String {
    let width = total.saturating_sub(1).to_string().len();
    format!("{prefix}{i:0width$}")
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

/// Smallest nonzero quotas proportional to `counts` (zero counts are
/// skipped), adjusted by largest remainders to total `target` where the
/// counts allow it.
pub fn proportional_quotas(counts: &[usize], target: usize) -> Vec<usize> {
    let n: usize = counts.iter().sum();
    let raw: Vec<f64> = counts
        .iter()
        .map(|&c| target as f64 * c as f64 / n.max(1) as f64)
        .collect();
    let mut q: Vec<usize> = counts
        .iter()
        .zip(&raw)
        .map(|(&c, &r)| if c == 0 { 0 } else { (r.floor() as usize).clamp(1, c) })
        .collect();
    let mut total: usize = q.iter().sum();
    while total < target {
        let pick = (0..q.len())
            .filter(|&j| q[j] < counts[j])
            .max_by(|&a, &b| (raw[a] - q[a] as f64).total_cmp(&(raw[b] - q[b] as f64)).then(b.cmp(&a)));
        let Some(j) = pick else { break };
        q[j] += 1;
        total += 1;
    }
    while total > target {
        let pick = (0..q.len())
            .filter(|&j| q[j] > 1)
            .min_by(|&a, &b| (raw[a] - q[a] as f64).total_cmp(&(raw[b] - q[b] as f64)).then(a.cmp(&b)));
        let Some(j) = pick else { break };
        q[j] -= 1;
        total -= 1;
    }
    q
}

/// Generates the points and the matching matroid configuration. The same
/// spec always yields the same output.
pub fn generate(spec: &SynthSpec) -> Result<(Vec<Point>, MatroidConfig)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let centers: Vec<Vec<f64>> = (0..spec.clusters)
        .map(|_| (0..spec.dim).map(|_| rng.sample(StandardNormal)).collect())
        .collect();
    // skewed label popularity, as in real genre and topic distributions
    let weights: Vec<f64> = (0..spec.categories).map(|j| 1.0 / (j + 1) as f64).collect();
    let popular = WeightedIndex::new(&weights).expect("positive weights");
    let prefix = match spec.matroid {
        SynthMatroid::Partition => 'g',
        SynthMatroid::Transversal => 't',
    };
    let mut counts = vec![0usize; spec.categories];
    let mut points = Vec::with_capacity(spec.n);
    for i in 0..spec.n {
        let blob = rng.gen_range(0..spec.clusters);
        let vector: Vec<f64> = centers[blob]
            .iter()
            .map(|&c| round6(c + spec.spread * rng.sample::<f64, _>(StandardNormal)))
            .collect();
        let mut cats = vec![popular.sample(&mut rng)];
        if spec.matroid == SynthMatroid::Transversal {
            let extra = rng.gen_range(0..spec.max_categories);
            while cats.len() < 1 + extra {
                let c = rng.gen_range(0..spec.categories);
                if !cats.contains(&c) {
                    cats.push(c);
                }
            }
        }
        for &c in &cats {
            counts[c] += 1;
        }
        let names: Vec<String> = cats.iter().map(|&c| label(prefix, c, spec.categories)).collect();
        // an all-zero vector is invalid under the angular metric
        let vector = if vector.iter().all(|&x| x == 0.0) {
            let mut v = vector;
            v[0] = 1e-6;
            v
        } else {
            vector
        };
        points.push(Point::new(format!("s{i}"), vector, names)?);
    }
    let cfg = match spec.matroid {
        SynthMatroid::Partition => {
            let quotas = proportional_quotas(&counts, spec.rank);
            MatroidConfig::Partition {
                quotas: (0..spec.categories)
                    .filter(|&j| counts[j] > 0)
                    .map(|j| (label(prefix, j, spec.categories), quotas[j]))
                    .collect(),
            }
        }
        SynthMatroid::Transversal => MatroidConfig::Transversal {
            categories: (0..spec.categories)
                .filter(|&j| counts[j] > 0)
                .map(|j| label(prefix, j, spec.categories))
                .collect(),
        },
    };
    Ok((points, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use crate::point::MetricKind;

    #[test]
    fn quotas_sum_to_target() {
        assert_eq!(proportional_quotas(&[50, 30, 20], 10), vec![5, 3, 2]);
        assert_eq!(proportional_quotas(&[97, 2, 1], 10), vec![8, 1, 1]);
        assert_eq!(proportional_quotas(&[1, 0, 1], 10), vec![1, 0, 1]);
        assert_eq!(proportional_quotas(&[5, 5, 5], 2), vec![1, 1, 1]);
    }

    #[test]
    fn deterministic() {
        let spec = SynthSpec::new(300, 4, 16, SynthMatroid::Transversal, 9);
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a, b);
        let mut other = spec.clone();
        other.seed = 10;
        assert_ne!(generate(&other).unwrap().0, a.0);
    }

    #[test]
    fn shapes() {
        let (pts, cfg) = generate(&SynthSpec::songs(1)).unwrap();
        assert_eq!(pts.len(), 238);
        let m = cfg.to_matroid().unwrap();
        let d = Dataset::new(pts, MetricKind::AngularCosine).unwrap();
        let c = m.bind(&d).unwrap();
        assert_eq!(c.rank().rank, 89);
        assert_eq!(m.labels().len(), 16);

        let (pts, cfg) = generate(&SynthSpec::wikipedia(1)).unwrap();
        let m = cfg.to_matroid().unwrap();
        let d = Dataset::new(pts, MetricKind::AngularCosine).unwrap();
        let c = m.bind(&d).unwrap();
        assert_eq!(c.rank().rank, 100);
        assert!(c.max_categories_per_point() <= 3);
    }

    #[test]
    fn rejects_bad_specs() {
        let mut s = SynthSpec::new(10, 2, 4, SynthMatroid::Transversal, 0);
        s.max_categories = 5;
        assert!(generate(&s).is_err());
        s = SynthSpec::new(0, 2, 4, SynthMatroid::Partition, 0);
        assert!(generate(&s).is_err());
    }
}

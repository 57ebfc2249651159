//! Final solvers run on a coreset: swap-based local search for the sum
//! objective and exhaustive search for every objective, plus the `solve`
//! pipeline tying a coreset construction to a solver.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coreset::{parallel_coreset, seq_coreset, stream_coreset, CoresetStop, StreamMode};
use crate::dataset::{Dataset, PointIdx};
use crate::diversity::{evaluate_matrix, DistMatrix, DiversityKind, Solution};
use crate::error::{Error, Result};
use crate::matroid::{Constraint, Matroid, MatroidKind};

/// Default limit on the number of candidate sets exhaustive search may visit.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

fn sorted_pool(d: &Dataset, pool: &[PointIdx]) -> Result<Vec<PointIdx>> {
    let mut p = pool.to_vec();
    p.sort_unstable();
    p.dedup();
    d.check_ids(&p)?;
    Ok(p)
}

fn infeasible(k: usize, pool: usize) -> Error {
    Error::Infeasible(format!(
        "no independent set of size {k} among {pool} candidate points"
    ))
}

/// Result of [`local_search_sum`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalSearch {
    pub solution: Solution,
    /// Accepted swaps.
    pub swaps: usize,
    /// The swap cap stopped the search before a local optimum was reached.
    pub cap_hit: bool,
}

/// Local search for the sum objective: start from a greedy independent
/// k-set of `pool`, then repeatedly apply the first swap (in index order)
/// that keeps independence and improves the value by a factor above
/// `1 + gamma`. At most `k * |pool|^2` swaps are applied.
pub fn local_search_sum(
    c: &Constraint<'_>,
    pool: &[PointIdx],
    k: usize,
    gamma: f64,
) -> Result<LocalSearch> {
    let d = c.dataset();
    DiversityKind::Sum.check_size(k)?;
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::input(format!("gamma must be a finite value >= 0, got {gamma}")));
    }
    let pool = sorted_pool(d, pool)?;
    let mut current = c.maximal_independent_subset(&pool, k);
    if current.len() < k {
        return Err(infeasible(k, pool.len()));
    }
    let dm = DistMatrix::new(d, &pool);
    let local = |i: PointIdx| pool.binary_search(&i).unwrap();
    let mut sel: Vec<usize> = current.iter().map(|&i| local(i)).collect();
    let mut in_sel = vec![false; pool.len()];
    for &s in &sel {
        in_sel[s] = true;
    }
    let sum_of = |sel: &[usize]| -> f64 {
        let mut v = 0.0;
        for (a, &x) in sel.iter().enumerate() {
            for &y in &sel[a + 1..] {
                v += dm.get(x, y);
            }
        }
        v
    };
    let contributions = |sel: &[usize]| -> Vec<f64> {
        (0..pool.len())
            .map(|x| sel.iter().map(|&s| dm.get(x, s)).sum())
            .collect()
    };
    let mut value = sum_of(&sel);
    let mut contrib = contributions(&sel);
    let cap = k.saturating_mul(pool.len()).saturating_mul(pool.len());
    let mut swaps = 0;
    let mut cap_hit = false;
    let mut trial = vec![0usize; k];
    'search: loop {
        let threshold = (1.0 + gamma) * value;
        for si in 0..k {
            let s = sel[si];
            for x in 0..pool.len() {
                if in_sel[x] {
                    continue;
                }
                let estimate = value - contrib[s] + contrib[x] - dm.get(s, x);
                if estimate <= threshold {
                    continue;
                }
                trial.copy_from_slice(&sel);
                trial[si] = x;
                let exact = sum_of(&trial);
                if exact <= threshold {
                    continue;
                }
                let ids: Vec<PointIdx> = trial.iter().map(|&t| pool[t]).collect();
                if !c.independent(&ids) {
                    continue;
                }
                if swaps == cap {
                    cap_hit = true;
                    break 'search;
                }
                in_sel[s] = false;
                in_sel[x] = true;
                sel[si] = x;
                value = exact;
                contrib = contributions(&sel);
                swaps += 1;
                continue 'search;
            }
        }
        break;
    }
    current = sel.iter().map(|&s| pool[s]).collect();
    current.sort_unstable();
    let value = evaluate_matrix(&DistMatrix::new(d, &current), DiversityKind::Sum);
    Ok(LocalSearch {
        solution: Solution {
            ids: current,
            k,
            kind: DiversityKind::Sum,
            value,
        },
        swaps,
        cap_hit,
    })
}

/// Independence of a growing prefix, with a counting fast path for
/// partition matroids.
enum Prefix<'c, 'a> {
    Counts {
        c: &'c Constraint<'a>,
        quotas: Vec<usize>,
        counts: Vec<usize>,
    },
    General(&'c Constraint<'a>),
}

impl<'c, 'a> Prefix<'c, 'a> {
    fn new(c: &'c Constraint<'a>) -> Self {
        match c.matroid().quotas() {
            Some(q) if c.kind() == MatroidKind::Partition => Prefix::Counts {
                c,
                counts: vec![0; q.len()],
                quotas: q.into_iter().map(|(_, n)| n).collect(),
            },
            _ => Prefix::General(c),
        }
    }

    /// Whether `prefix` (whose last element was just pushed) is independent,
    /// recording it if so.
    fn push(&mut self, prefix: &[PointIdx]) -> bool {
        match self {
            Prefix::Counts { c, quotas, counts } => {
                let a = c.profile(*prefix.last().unwrap())[0] as usize;
                if counts[a] < quotas[a] {
                    counts[a] += 1;
                    true
                } else {
                    false
                }
            }
            Prefix::General(c) => c.independent(prefix),
        }
    }

    fn pop(&mut self, last: PointIdx) {
        if let Prefix::Counts { c, counts, .. } = self {
            counts[c.profile(last)[0] as usize] -= 1;
        }
    }
}

struct Best {
    value: f64,
    sel: Vec<usize>,
}

impl Best {
    /// Larger value wins; ties go to the lexicographically smaller selection.
    fn merge(a: Option<Best>, b: Option<Best>) -> Option<Best> {
        match (a, b) {
            (Some(a), Some(b)) => {
                if b.value > a.value || (b.value == a.value && b.sel < a.sel) {
                    Some(b)
                } else {
                    Some(a)
                }
            }
            (a, None) => a,
            (None, b) => b,
        }
    }
}

/// Depth-first enumeration of independent k-subsets of `pool` whose first
/// element is `pool[first]`.
fn enumerate_from(
    c: &Constraint<'_>,
    pool: &[PointIdx],
    dm: &DistMatrix,
    k: usize,
    kind: DiversityKind,
    first: usize,
) -> Option<Best> {
    struct Walk<'x, 'c, 'a> {
        pool: &'x [PointIdx],
        dm: &'x DistMatrix,
        k: usize,
        kind: DiversityKind,
        prefix: Prefix<'c, 'a>,
        sel: Vec<usize>,
        ids: Vec<PointIdx>,
        best: Option<Best>,
    }
    impl Walk<'_, '_, '_> {
        fn go(&mut self, next: usize, partial: f64) {
            if self.sel.len() == self.k {
                let value = if self.kind == DiversityKind::Sum {
                    partial
                } else {
                    evaluate_matrix(&self.dm.select(&self.sel), self.kind)
                };
                if self.best.as_ref().map_or(true, |b| value > b.value) {
                    self.best = Some(Best {
                        value,
                        sel: self.sel.clone(),
                    });
                }
                return;
            }
            let remaining = self.k - self.sel.len();
            for x in next..=self.pool.len() - remaining {
                self.ids.push(self.pool[x]);
                if self.prefix.push(&self.ids) {
                    let gain: f64 = self.sel.iter().map(|&s| self.dm.get(s, x)).sum();
                    self.sel.push(x);
                    self.go(x + 1, partial + gain);
                    self.sel.pop();
                    self.prefix.pop(self.pool[x]);
                }
                self.ids.pop();
            }
        }
    }
    let mut w = Walk {
        pool,
        dm,
        k,
        kind,
        prefix: Prefix::new(c),
        sel: vec![first],
        ids: vec![pool[first]],
        best: None,
    };
    if !w.prefix.push(&w.ids) {
        return None;
    }
    w.go(first + 1, 0.0);
    w.best
}

/// Exact maximum of `kind` over the independent k-subsets of `pool`. Ties go
/// to the lexicographically smallest sorted index set. Fails with a
/// capability error when `C(|pool|, k)` exceeds `budget`.
pub fn exhaustive_search(
    c: &Constraint<'_>,
    pool: &[PointIdx],
    k: usize,
    kind: DiversityKind,
    budget: u64,
) -> Result<Solution> {
    let d = c.dataset();
    kind.check_size(k)?;
    let pool = sorted_pool(d, pool)?;
    if pool.len() < k {
        return Err(infeasible(k, pool.len()));
    }
    let candidates = binomial(pool.len(), k);
    if candidates > u128::from(budget) {
        return Err(Error::Capability(format!(
            "exhaustive search over {candidates} candidate sets exceeds the budget of {budget}; \
             use a smaller coreset (lower tau or larger epsilon) or raise the budget"
        )));
    }
    let dm = DistMatrix::new(d, &pool);
    let starts = 0..=pool.len() - k;
    let best = if candidates >= 50_000 {
        starts
            .into_par_iter()
            .map(|f| enumerate_from(c, &pool, &dm, k, kind, f))
            .reduce(|| None, Best::merge)
    } else {
        starts
            .map(|f| enumerate_from(c, &pool, &dm, k, kind, f))
            .fold(None, Best::merge)
    };
    let best = best.ok_or_else(|| infeasible(k, pool.len()))?;
    Ok(Solution {
        ids: best.sel.iter().map(|&s| pool[s]).collect(),
        k,
        kind,
        value: best.value,
    })
}

/// Coreset construction feeding the solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pipeline {
    Seq,
    Stream,
    /// Partitioned construction; `None` picks the default shard count.
    Parallel(Option<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    LocalSearch { gamma: f64 },
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub k: usize,
    pub kind: DiversityKind,
    pub pipeline: Pipeline,
    pub stop: CoresetStop,
    pub solver: SolverKind,
    /// Candidate-set budget for exhaustive search.
    pub budget: u64,
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        self.kind.check_size(self.k)?;
        self.stop.validate()?;
        if matches!(self.solver, SolverKind::LocalSearch { .. }) && self.kind != DiversityKind::Sum {
            return Err(Error::input(format!(
                "local search only supports the sum objective, not {}",
                self.kind
            )));
        }
        if let Pipeline::Parallel(Some(0)) = self.pipeline {
            return Err(Error::input("parallelism must be positive"));
        }
        Ok(())
    }
}

/// Outcome of [`solve`]. Solution ids are dataset indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub solution: Solution,
    pub coreset_ids: Vec<PointIdx>,
    pub coreset_size: usize,
    pub coreset_tau: usize,
    pub coreset_radius: f64,
    /// Shard count actually used by the partitioned pipeline (1 otherwise).
    pub parallelism: usize,
    pub coreset_seconds: f64,
    pub solver_seconds: f64,
    pub swaps: Option<usize>,
    pub swap_cap_hit: bool,
}

/// Builds a coreset with the configured pipeline and runs the solver on it.
pub fn solve(d: &Dataset, m: &Matroid, cfg: &SolveConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let c = m.bind(d)?;
    let rank = c.rank().rank;
    if rank < cfg.k {
        return Err(Error::Infeasible(format!(
            "the matroid has rank {rank} on this dataset, below k = {}",
            cfg.k
        )));
    }
    let t0 = Instant::now();
    let mut parallelism = 1;
    let coreset = match cfg.pipeline {
        Pipeline::Seq => seq_coreset(d, m, cfg.k, cfg.stop)?,
        Pipeline::Stream => {
            let mode = match cfg.stop {
                CoresetStop::Epsilon(e) => StreamMode::epsilon(e),
                CoresetStop::Tau(t) => StreamMode::tau(t),
            };
            stream_coreset(d, m, cfg.k, mode)?
        }
        Pipeline::Parallel(ell) => {
            parallelism = ell.unwrap_or_else(|| {
                crate::coreset::default_parallelism(d.len(), cfg.k, rayon::current_num_threads())
            });
            parallel_coreset(d, m, cfg.k, parallelism, cfg.stop)?
        }
    };
    let coreset_seconds = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let (solution, swaps, swap_cap_hit) = match cfg.solver {
        SolverKind::LocalSearch { gamma } => {
            let ls = local_search_sum(&c, &coreset.ids, cfg.k, gamma)?;
            (ls.solution, Some(ls.swaps), ls.cap_hit)
        }
        SolverKind::Exhaustive => (
            exhaustive_search(&c, &coreset.ids, cfg.k, cfg.kind, cfg.budget)?,
            None,
            false,
        ),
    };
    let solver_seconds = t1.elapsed().as_secs_f64();
    Ok(SolveReport {
        solution,
        coreset_size: coreset.len(),
        coreset_tau: coreset.tau,
        coreset_radius: coreset.radius,
        coreset_ids: coreset.ids,
        parallelism,
        coreset_seconds,
        solver_seconds,
        swaps,
        swap_cap_hit,
    })
}

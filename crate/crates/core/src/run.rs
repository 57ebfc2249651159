//! Repeated runs over seeded permutations of a dataset, and the benchmark
//! sweeps built on them.

use serde::{Deserialize, Serialize};

use crate::coreset::CoresetStop;
use crate::dataset::Dataset;
use crate::diversity::DiversityKind;
use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::solvers::{solve, Pipeline, SolveConfig, SolverKind, DEFAULT_BUDGET};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: Option<String>,
    pub matroid: Option<String>,
    pub solve: SolveConfig,
    /// Base seed; repetition `r` permutes the dataset with `seed + r`.
    pub seed: u64,
    pub repetitions: usize,
}

/// One repetition. Ids are the string ids of the input points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub repetition: usize,
    pub seed: u64,
    pub diversity: Option<f64>,
    pub solution: Vec<String>,
    pub coreset: Vec<String>,
    pub coreset_size: usize,
    pub coreset_tau: usize,
    pub coreset_radius: f64,
    pub parallelism: usize,
    pub coreset_seconds: f64,
    pub solver_seconds: f64,
    pub swaps: Option<usize>,
    pub swap_cap_hit: bool,
    pub error: Option<String>,
    pub exit_code: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub runs: usize,
    pub failures: usize,
    pub mean_diversity: Option<f64>,
    pub min_diversity: Option<f64>,
    pub max_diversity: Option<f64>,
    pub mean_coreset_size: Option<f64>,
    pub max_coreset_size: Option<usize>,
    pub mean_coreset_seconds: Option<f64>,
    pub mean_solver_seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: RunConfig,
    pub records: Vec<RunRecord>,
    pub summary: Summary,
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

impl Summary {
    fn of(records: &[RunRecord]) -> Self {
        let ok: Vec<&RunRecord> = records.iter().filter(|r| r.error.is_none()).collect();
        let div = || ok.iter().filter_map(|r| r.diversity);
        Summary {
            runs: records.len(),
            failures: records.len() - ok.len(),
            mean_diversity: mean(div()),
            min_diversity: div().reduce(f64::min),
            max_diversity: div().reduce(f64::max),
            mean_coreset_size: mean(ok.iter().map(|r| r.coreset_size as f64)),
            max_coreset_size: ok.iter().map(|r| r.coreset_size).max(),
            mean_coreset_seconds: mean(ok.iter().map(|r| r.coreset_seconds)),
            mean_solver_seconds: mean(ok.iter().map(|r| r.solver_seconds)),
        }
    }
}

impl Report {
    /// Exit code of the first failed repetition, 0 when all succeeded.
    pub fn exit_code(&self) -> i32 {
        self.records.iter().map(|r| r.exit_code).find(|&c| c != 0).unwrap_or(0)
    }

    /// Copy with every wall-clock field zeroed, for comparing runs.
    pub fn without_timing(&self) -> Report {
        let mut r = self.clone();
        for rec in &mut r.records {
            rec.coreset_seconds = 0.0;
            rec.solver_seconds = 0.0;
        }
        r.summary.mean_coreset_seconds = r.summary.mean_coreset_seconds.map(|_| 0.0);
        r.summary.mean_solver_seconds = r.summary.mean_solver_seconds.map(|_| 0.0);
        r
    }
}

/// Runs the configured pipeline once per repetition on a freshly permuted
/// copy of `d`. Failed repetitions are recorded, not propagated.
pub fn run(d: &Dataset, m: &Matroid, cfg: &RunConfig) -> Result<Report> {
    cfg.solve.validate()?;
    if cfg.repetitions == 0 {
        return Err(Error::Input("repetitions must be positive".into()));
    }
    let mut records = Vec::with_capacity(cfg.repetitions);
    for rep in 0..cfg.repetitions {
        let seed = cfg.seed.wrapping_add(rep as u64);
        let p = d.permuted(seed);
        let ids = |xs: &[usize]| -> Vec<String> { xs.iter().map(|&i| p.point(i).id().to_string()).collect() };
        let rec = match solve(&p, m, &cfg.solve) {
            Ok(r) => RunRecord {
                repetition: rep,
                seed,
                diversity: Some(r.solution.value),
                solution: ids(&r.solution.ids),
                coreset: ids(&r.coreset_ids),
                coreset_size: r.coreset_size,
                coreset_tau: r.coreset_tau,
                coreset_radius: r.coreset_radius,
                parallelism: r.parallelism,
                coreset_seconds: r.coreset_seconds,
                solver_seconds: r.solver_seconds,
                swaps: r.swaps,
                swap_cap_hit: r.swap_cap_hit,
                error: None,
                exit_code: 0,
            },
            Err(e) => RunRecord {
                repetition: rep,
                seed,
                diversity: None,
                solution: Vec::new(),
                coreset: Vec::new(),
                coreset_size: 0,
                coreset_tau: 0,
                coreset_radius: 0.0,
                parallelism: 0,
                coreset_seconds: 0.0,
                solver_seconds: 0.0,
                swaps: None,
                swap_cap_hit: false,
                error: Some(e.to_string()),
                exit_code: e.exit_code(),
            },
        };
        records.push(rec);
    }
    let summary = Summary::of(&records);
    Ok(Report {
        config: cfg.clone(),
        records,
        summary,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub k: usize,
    pub kind: DiversityKind,
    pub solver: SolverKind,
    /// Cluster counts of the quality sweep (sequential construction).
    pub taus: Vec<usize>,
    /// Cluster count used by the parallelism sweep.
    pub parallel_tau: usize,
    pub parallelism: Vec<usize>,
    pub seed: u64,
    pub repetitions: usize,
    pub budget: u64,
}

impl BenchConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        BenchConfig {
            k,
            kind: DiversityKind::Sum,
            solver: SolverKind::LocalSearch { gamma: 0.0 },
            taus: vec![8, 16, 32, 64, 128, 256],
            parallel_tau: 64,
            parallelism: vec![1, 4],
            seed,
            repetitions: 3,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub tau: usize,
    pub parallelism: usize,
    pub summary: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub tau_sweep: Vec<BenchRow>,
    pub parallel_sweep: Vec<BenchRow>,
    /// Mean diversity never drops by more than 1% from one cluster count to
    /// the next, and the largest cluster count is at least as good as the
    /// smallest.
    pub monotone_on_average: bool,
    /// Mean construction time at the largest shard count is at most the
    /// time with a single shard.
    pub parallel_not_slower: bool,
}

/// Relative drop tolerated between consecutive means of the quality sweep.
pub const MONOTONE_SLACK: f64 = 0.01;

pub fn monotone_on_average(means: &[f64]) -> bool {
    means.windows(2).all(|w| w[1] >= (1.0 - MONOTONE_SLACK) * w[0])
        && means.last() >= means.first()
}

/// Quality-versus-tau sweep plus the construction-time comparison across
/// shard counts.
pub fn bench(d: &Dataset, m: &Matroid, cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.taus.is_empty() || cfg.parallelism.is_empty() {
        return Err(Error::Input("bench needs at least one tau and one parallelism".into()));
    }
    let one = |pipeline: Pipeline, tau: usize| -> Result<Summary> {
        let rc = RunConfig {
            input: None,
            matroid: None,
            solve: SolveConfig {
                k: cfg.k,
                kind: cfg.kind,
                pipeline,
                stop: CoresetStop::Tau(tau),
                solver: cfg.solver,
                budget: cfg.budget,
            },
            seed: cfg.seed,
            repetitions: cfg.repetitions,
        };
        let report = run(d, m, &rc)?;
        if let Some(r) = report.records.iter().find(|r| r.error.is_some()) {
            return Err(Error::Input(format!(
                "bench run (tau {tau}, {pipeline:?}) failed: {}",
                r.error.as_deref().unwrap_or_default()
            )));
        }
        Ok(report.summary)
    };
    let mut tau_sweep = Vec::new();
    for &tau in &cfg.taus {
        tau_sweep.push(BenchRow {
            tau,
            parallelism: 1,
            summary: one(Pipeline::Seq, tau)?,
        });
    }
    let mut parallel_sweep = Vec::new();
    for &ell in &cfg.parallelism {
        parallel_sweep.push(BenchRow {
            tau: cfg.parallel_tau,
            parallelism: ell,
            summary: one(Pipeline::Parallel(Some(ell)), cfg.parallel_tau)?,
        });
    }
    let means: Vec<f64> = tau_sweep
        .iter()
        .map(|r| r.summary.mean_diversity.unwrap_or(f64::NAN))
        .collect();
    let time = |r: &BenchRow| r.summary.mean_coreset_seconds.unwrap_or(f64::INFINITY);
    let base = parallel_sweep.iter().find(|r| r.parallelism == 1).map(time);
    let widest = parallel_sweep.iter().max_by_key(|r| r.parallelism).map(time);
    Ok(BenchReport {
        config: cfg.clone(),
        monotone_on_average: monotone_on_average(&means),
        parallel_not_slower: matches!((widest, base), (Some(w), Some(b)) if w <= b),
        tau_sweep,
        parallel_sweep,
    })
}

/// Plain-text table of a bench report.
pub fn bench_table(r: &BenchReport) -> String {
    let mut out = String::from("pipeline   tau  shards  coreset  diversity(mean)  min  max  coreset_s  solver_s\n");
    let fmt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.4}"));
    for (name, rows) in [("seq", &r.tau_sweep), ("parallel", &r.parallel_sweep)] {
        for row in rows {
            let s = &row.summary;
            out.push_str(&format!(
                "{name:<9} {:>4} {:>7} {:>8} {:>16} {} {} {} {}\n",
                row.tau,
                row.parallelism,
                fmt(s.mean_coreset_size),
                fmt(s.mean_diversity),
                fmt(s.min_diversity),
                fmt(s.max_diversity),
                fmt(s.mean_coreset_seconds),
                fmt(s.mean_solver_seconds),
            ));
        }
    }
    out.push_str(&format!(
        "monotone on average: {}\nparallel not slower: {}\n",
        r.monotone_on_average, r.parallel_not_slower
    ));
    out
}

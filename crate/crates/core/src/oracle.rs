//! Slow, simple reference implementations used to audit everything else.
//! Objective values are recomputed here from scratch by plain enumeration.

use crate::dataset::{Dataset, PointIdx};
use crate::diversity::{pair_count, DiversityKind};
use crate::error::{Error, Result};
use crate::matroid::Matroid;

/// Default subset budget for [`brute_force_optimum`].
pub const OPTIMUM_BUDGET: u128 = 10_000_000;
/// Default subset budget for [`brute_force_optimal_radius`].
pub const RADIUS_BUDGET: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub ids: Vec<PointIdx>,
    pub value: f64,
}

fn choose(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k.min(n - k) {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Calls `f` on every k-subset of `0..n` in lexicographic order.
pub fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - k + i {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Calls `f` on every permutation of `items` (Heap's algorithm).
fn for_each_permutation(items: &mut [usize], f: &mut impl FnMut(&[usize])) {
    let n = items.len();
    let mut c = vec![0; n];
    f(items);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            f(items);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Sum of all pairwise distances.
pub fn sum_value(w: &dyn Fn(usize, usize) -> f64, k: usize) -> f64 {
    let mut s = 0.0;
    for a in 0..k {
        for b in 0..k {
            if a < b {
                s += w(a, b);
            }
        }
    }
    s
}

/// Cheapest star over all choices of center.
pub fn star_value(w: &dyn Fn(usize, usize) -> f64, k: usize) -> f64 {
    (0..k)
        .map(|c| (0..k).filter(|&x| x != c).map(|x| w(c, x)).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

/// Cheapest spanning tree, by enumerating every labelled tree as a Prüfer
/// sequence.
pub fn tree_value(w: &dyn Fn(usize, usize) -> f64, k: usize) -> f64 {
    if k == 2 {
        return w(0, 1);
    }
    let len = k - 2;
    let mut seq = vec![0usize; len];
    let mut best = f64::INFINITY;
    loop {
        let mut degree = vec![1usize; k];
        for &s in &seq {
            degree[s] += 1;
        }
        let mut total = 0.0;
        for &s in &seq {
            let leaf = (0..k).find(|&v| degree[v] == 1).unwrap();
            total += w(leaf, s);
            degree[leaf] -= 1;
            degree[s] -= 1;
        }
        let rest: Vec<usize> = (0..k).filter(|&v| degree[v] == 1).collect();
        total += w(rest[0], rest[1]);
        best = best.min(total);
        let mut i = 0;
        while i < len {
            seq[i] += 1;
            if seq[i] < k {
                break;
            }
            seq[i] = 0;
            i += 1;
        }
        if i == len {
            return best;
        }
    }
}

/// Cheapest Hamiltonian cycle, by enumerating every tour through vertex 0.
pub fn cycle_value(w: &dyn Fn(usize, usize) -> f64, k: usize) -> f64 {
    let mut rest: Vec<usize> = (1..k).collect();
    let mut best = f64::INFINITY;
    for_each_permutation(&mut rest, &mut |p: &[usize]| {
        let mut t = w(0, p[0]) + w(p[p.len() - 1], 0);
        for e in p.windows(2) {
            t += w(e[0], e[1]);
        }
        best = best.min(t);
    });
    best
}

/// Cheapest balanced cut: minimum over halves of size floor(k/2) of the
/// distances crossing the cut.
pub fn bipartition_value(w: &dyn Fn(usize, usize) -> f64, k: usize) -> f64 {
    let mut best = f64::INFINITY;
    for_each_subset(k, k / 2, |half| {
        let mut inside = vec![false; k];
        for &h in half {
            inside[h] = true;
        }
        let mut t = 0.0;
        for a in 0..k {
            for b in 0..k {
                if inside[a] && !inside[b] {
                    t += w(a, b);
                }
            }
        }
        best = best.min(t);
    });
    best
}

/// Objective value of `ids` recomputed by enumeration.
pub fn value(d: &Dataset, kind: DiversityKind, ids: &[PointIdx]) -> f64 {
    let w = |a: usize, b: usize| d.dist(ids[a], ids[b]);
    let k = ids.len();
    match kind {
        DiversityKind::Sum => sum_value(&w, k),
        DiversityKind::Star => star_value(&w, k),
        DiversityKind::Tree => tree_value(&w, k),
        DiversityKind::Cycle => cycle_value(&w, k),
        DiversityKind::Bipartition => bipartition_value(&w, k),
    }
}

/// Best independent k-subset of the whole dataset, by enumerating all
/// `C(n, k)` subsets. Ties go to the lexicographically smallest index set.
pub fn brute_force_optimum(d: &Dataset, m: &Matroid, k: usize, kind: DiversityKind) -> Result<Optimum> {
    brute_force_optimum_with_budget(d, m, k, kind, OPTIMUM_BUDGET)
}

pub fn brute_force_optimum_with_budget(
    d: &Dataset,
    m: &Matroid,
    k: usize,
    kind: DiversityKind,
    budget: u128,
) -> Result<Optimum> {
    kind.check_size(k)?;
    let n = d.len();
    if choose(n, k) > budget {
        return Err(Error::Capability(format!(
            "brute force over C({n}, {k}) subsets exceeds the budget of {budget}"
        )));
    }
    let c = m.bind(d)?;
    let mut best: Option<Optimum> = None;
    for_each_subset(n, k, |ids| {
        if c.independent(ids) {
            let v = value(d, kind, ids);
            if best.as_ref().map_or(true, |b| v > b.value) {
                best = Some(Optimum {
                    ids: ids.to_vec(),
                    value: v,
                });
            }
        }
    });
    best.ok_or_else(|| Error::Infeasible(format!("no independent set of size {k} exists")))
}

/// Optimal value divided by the number of distance terms of the objective.
pub fn average_farness(d: &Dataset, m: &Matroid, k: usize, kind: DiversityKind) -> Result<f64> {
    let opt = brute_force_optimum(d, m, k, kind)?;
    Ok(opt.value / pair_count(kind, k).f as f64)
}

/// Smallest radius of any clustering with `tau` centers chosen among the
/// points, by enumerating all center sets.
pub fn brute_force_optimal_radius(d: &Dataset, tau: usize) -> Result<f64> {
    let n = d.len();
    if tau == 0 || tau > n {
        return Err(Error::Input(format!("tau must lie in [1, {n}], got {tau}")));
    }
    if choose(n, tau) > RADIUS_BUDGET {
        return Err(Error::Capability(format!(
            "brute force over C({n}, {tau}) center sets exceeds the budget of {RADIUS_BUDGET}"
        )));
    }
    let mut best = f64::INFINITY;
    for_each_subset(n, tau, |centers| {
        let r = (0..n)
            .map(|x| centers.iter().map(|&z| d.dist(x, z)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
        best = best.min(r);
    });
    Ok(best)
}

/// Largest matching of a bipartite graph, by trying every assignment of
/// left vertices (each either skipped or sent to a free neighbour).
pub fn matching_by_enumeration(adj: &[Vec<usize>], right: usize) -> usize {
    fn go(adj: &[Vec<usize>], i: usize, used: &mut [bool]) -> usize {
        if i == adj.len() {
            return 0;
        }
        let mut best = go(adj, i + 1, used);
        for &r in &adj[i] {
            if !used[r] {
                used[r] = true;
                best = best.max(1 + go(adj, i + 1, used));
                used[r] = false;
            }
        }
        best
    }
    go(adj, 0, &mut vec![false; right])
}

/// Transversal independence through Hall's condition: every subset of the
/// points must touch at least as many categories as it has points.
pub fn transversal_independent_by_halls(adj: &[Vec<usize>]) -> bool {
    let n = adj.len();
    assert!(n <= 20, "Hall check enumerates 2^n subsets");
    (1u32..(1 << n)).all(|mask| {
        let mut cats: Vec<usize> = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .flat_map(|i| adj[i].iter().copied())
            .collect();
        cats.sort_unstable();
        cats.dedup();
        cats.len() >= mask.count_ones() as usize
    })
}

/// An independent pair at distance at least half the diameter, if the
/// matroid has rank at least 2 on `d`.
pub fn far_independent_pair(d: &Dataset, m: &Matroid) -> Result<Option<(PointIdx, PointIdx)>> {
    let half = d.diameter() / 2.0;
    let c = m.bind(d)?;
    for a in 0..d.len() {
        for b in a + 1..d.len() {
            if d.dist(a, b) >= half && c.independent(&[a, b]) {
                return Ok(Some((a, b)));
            }
        }
    }
    Ok(None)
}

//! Farthest-first traversal (GMM) with incremental iterations.

use rayon::prelude::*;

use crate::dataset::{Dataset, PointIdx};
use crate::error::{Error, Result};

/// Below this many points the distance update runs on one thread.
const PAR_THRESHOLD: usize = 1 << 15;

/// A clustering of a subset of a dataset around GMM-selected centers.
///
/// Every member is assigned to its nearest center (ties to the lowest center
/// index) and the cached nearest-center distances make each iteration O(n).
#[derive(Debug, Clone)]
pub struct Clustering {
    members: Vec<PointIdx>,
    centers: Vec<PointIdx>,
    assignment: Vec<usize>,
    nearest: Vec<f64>,
    is_center: Vec<bool>,
    radius: f64,
}

impl Clustering {
    /// One cluster holding all of `members`, centered at the first of them.
    pub fn single(d: &Dataset, members: Vec<PointIdx>) -> Result<Self> {
        let Some(&first) = members.first() else {
            return Err(Error::input("cannot cluster an empty set"));
        };
        let n = members.len();
        let mut c = Clustering {
            members,
            centers: Vec::new(),
            assignment: vec![0; n],
            nearest: vec![f64::INFINITY; n],
            is_center: vec![false; n],
            radius: f64::INFINITY,
        };
        c.add_center(d, 0, first);
        Ok(c)
    }

    pub fn members(&self) -> &[PointIdx] {
        &self.members
    }

    /// Centers in selection order.
    pub fn centers(&self) -> &[PointIdx] {
        &self.centers
    }

    pub fn tau(&self) -> usize {
        self.centers.len()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Center index of the member at position `pos` of [`Clustering::members`].
    pub fn assignment(&self, pos: usize) -> usize {
        self.assignment[pos]
    }

    /// Distance of the member at position `pos` to its center.
    pub fn distance_to_center(&self, pos: usize) -> f64 {
        self.nearest[pos]
    }

    /// Members of each cluster, in member order; entry `i` belongs to center `i`.
    pub fn clusters(&self) -> Vec<Vec<PointIdx>> {
        let mut out = vec![Vec::new(); self.centers.len()];
        for (pos, &p) in self.members.iter().enumerate() {
            out[self.assignment[pos]].push(p);
        }
        out
    }

    /// Adds the farthest member from the current centers (ties to the lowest
    /// member position) as a new center.
    pub fn step(&mut self, d: &Dataset) -> Result<()> {
        let mut best: Option<usize> = None;
        for pos in 0..self.members.len() {
            if self.is_center[pos] {
                continue;
            }
            if best.map_or(true, |b| self.nearest[pos] > self.nearest[b]) {
                best = Some(pos);
            }
        }
        let Some(pos) = best else {
            return Err(Error::Capability(
                "every point is already a center".to_string(),
            ));
        };
        let idx = self.members[pos];
        self.add_center(d, pos, idx);
        Ok(())
    }

    fn add_center(&mut self, d: &Dataset, pos: usize, idx: PointIdx) {
        let ci = self.centers.len();
        self.centers.push(idx);
        self.is_center[pos] = true;
        let update = |(&m, (near, assign)): (&PointIdx, (&mut f64, &mut usize))| {
            let x = d.dist(m, idx);
            if x < *near {
                *near = x;
                *assign = ci;
            }
        };
        if self.members.len() >= PAR_THRESHOLD {
            self.members
                .par_iter()
                .zip(self.nearest.par_iter_mut().zip(self.assignment.par_iter_mut()))
                .for_each(update);
        } else {
            self.members
                .iter()
                .zip(self.nearest.iter_mut().zip(self.assignment.iter_mut()))
                .for_each(update);
        }
        // a center is at distance 0 from itself even when duplicated elsewhere
        self.nearest[pos] = 0.0;
        self.assignment[pos] = ci;
        self.radius = self.nearest.iter().copied().fold(0.0, f64::max);
    }
}

/// When to stop iterating GMM.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopRule {
    /// Stop as soon as the radius is at most this value.
    Radius(f64),
    /// Stop with exactly this many centers (capped at the number of points).
    Tau(usize),
}

/// First two GMM centers over the whole dataset, plus `delta`, the distance
/// between them, which lies in `[diameter/2, diameter]`.
pub fn gmm_init(d: &Dataset) -> Result<(Clustering, f64)> {
    gmm_init_on(d, (0..d.len()).collect())
}

/// [`gmm_init`] restricted to `members`; the first member is the first center.
pub fn gmm_init_on(d: &Dataset, members: Vec<PointIdx>) -> Result<(Clustering, f64)> {
    if members.len() < 2 {
        return Err(Error::input("GMM initialization needs at least two points"));
    }
    let mut c = Clustering::single(d, members)?;
    c.step(d)?;
    let delta = d.dist(c.centers[0], c.centers[1]);
    Ok((c, delta))
}

/// One GMM iteration.
pub fn gmm_iteration(d: &Dataset, mut c: Clustering) -> Result<Clustering> {
    c.step(d)?;
    Ok(c)
}

/// Runs GMM from its two-center start until `stop(clustering, iterations)`
/// holds or every point is a center.
pub fn gmm_until(
    d: &Dataset,
    stop: impl FnMut(&Clustering, usize) -> bool,
) -> Result<Clustering> {
    let (c, _) = gmm_init(d)?;
    run_until(d, c, stop)
}

pub(crate) fn run_until(
    d: &Dataset,
    mut c: Clustering,
    mut stop: impl FnMut(&Clustering, usize) -> bool,
) -> Result<Clustering> {
    let mut iterations = 0;
    while !stop(&c, iterations) && c.tau() < c.members.len() {
        c.step(d)?;
        iterations += 1;
    }
    Ok(c)
}

/// GMM over `members` under a stop rule. Returns the clustering and `delta`
/// (0 when only one point or one cluster is involved).
pub fn gmm(d: &Dataset, members: Vec<PointIdx>, rule: StopRule) -> Result<(Clustering, f64)> {
    if let StopRule::Tau(0) = rule {
        return Err(Error::input("tau must be positive"));
    }
    if members.len() == 1 || rule == StopRule::Tau(1) {
        return Ok((Clustering::single(d, members)?, 0.0));
    }
    let (c, delta) = gmm_init_on(d, members)?;
    let c = match rule {
        StopRule::Radius(r) => run_until(d, c, |c, _| c.radius() <= r)?,
        StopRule::Tau(t) => run_until(d, c, |c, _| c.tau() >= t)?,
    };
    Ok((c, delta))
}

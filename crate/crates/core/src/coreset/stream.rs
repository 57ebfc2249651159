//! One-pass streaming coreset with per-center delegate sets.
//!
//! In epsilon mode the state keeps an estimate `R` of the diameter seen so
//! far, opens a new center whenever a point is farther than `2εR/(ck)` from
//! every center, and restructures the centers each time `R` grows. In tau
//! mode `R` estimates the clustering radius instead and is doubled whenever
//! more than `tau` centers are open.

use std::collections::HashMap;

use super::{Coreset, CoresetCluster};
use crate::dataset::{Dataset, PointIdx};
use crate::error::{Error, Result};
use crate::matroid::{Matroid, MatroidKind, Profile};
use crate::point::{MetricKind, Point};

/// Default constant `c` in the epsilon-mode thresholds.
pub const DEFAULT_C: f64 = 32.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StreamMode {
    Epsilon { epsilon: f64, c: f64 },
    Tau { tau: usize },
}

impl StreamMode {
    pub fn epsilon(epsilon: f64) -> Self {
        StreamMode::Epsilon {
            epsilon,
            c: DEFAULT_C,
        }
    }

    pub fn tau(tau: usize) -> Self {
        StreamMode::Tau { tau }
    }
}

#[derive(Debug, Clone)]
struct Delegate {
    pos: usize,
    point: Point,
    profile: Profile,
}

#[derive(Debug, Clone)]
struct Center {
    serial: usize,
    pos: usize,
    point: Point,
    delegates: Vec<Delegate>,
    /// `delegates` is an independent set of exactly k points.
    full: bool,
}

/// Reference center of every consumed point; test and audit instrumentation
/// that costs memory linear in the stream length.
#[derive(Debug, Clone, Default)]
struct Tracker {
    points: Vec<Point>,
    reference: Vec<usize>,
}

/// State of the streaming construction.
#[derive(Debug, Clone)]
pub struct StreamState<'m> {
    matroid: &'m Matroid,
    k: usize,
    mode: StreamMode,
    metric: MetricKind,
    r: f64,
    first: Option<Point>,
    pending: Option<(Point, Profile)>,
    centers: Vec<Center>,
    count: usize,
    next_serial: usize,
    tracker: Option<Tracker>,
}

/// Result of a finished stream.
#[derive(Debug, Clone)]
pub struct StreamOutput {
    /// Coreset whose ids are stream positions.
    pub coreset: Coreset,
    /// The retained points, in the order of `coreset.ids`.
    pub points: Dataset,
    /// Whether `coreset.radius` was measured against reference centers
    /// (otherwise it is the certified upper bound).
    pub radius_measured: bool,
}

impl<'m> StreamState<'m> {
    pub fn new(matroid: &'m Matroid, k: usize, mode: StreamMode, metric: MetricKind) -> Result<Self> {
        if k == 0 {
            return Err(Error::input("k must be positive"));
        }
        match mode {
            StreamMode::Epsilon { epsilon, c } => {
                if !(epsilon > 0.0 && epsilon < 1.0) {
                    return Err(Error::input(format!("epsilon must lie in (0, 1), got {epsilon}")));
                }
                if !(c > 0.0 && c.is_finite()) {
                    return Err(Error::input(format!("c must be positive, got {c}")));
                }
            }
            StreamMode::Tau { tau: 0 } => return Err(Error::input("tau must be positive")),
            StreamMode::Tau { .. } => {}
        }
        Ok(StreamState {
            matroid,
            k,
            mode,
            metric,
            r: 0.0,
            first: None,
            pending: None,
            centers: Vec::new(),
            count: 0,
            next_serial: 0,
            tracker: None,
        })
    }

    /// Records the reference center of every consumed point so the realized
    /// clustering radius can be measured. Must be enabled before any point.
    pub fn with_reference_tracking(mut self) -> Self {
        self.tracker = Some(Tracker::default());
        self
    }

    pub fn is_initialized(&self) -> bool {
        self.first.is_some()
    }

    /// Number of points consumed.
    pub fn count(&self) -> usize {
        self.count
    }

    /// Current estimate `R`.
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn mode(&self) -> StreamMode {
        self.mode
    }

    /// Stream positions of the current centers, in insertion order.
    pub fn centers(&self) -> Vec<usize> {
        self.centers.iter().map(|c| c.pos).collect()
    }

    pub fn center_points(&self) -> Vec<&Point> {
        self.centers.iter().map(|c| &c.point).collect()
    }

    /// Delegate positions per center, in insertion order.
    pub fn delegate_sets(&self) -> Vec<(usize, Vec<usize>)> {
        self.centers
            .iter()
            .map(|c| (c.pos, c.delegates.iter().map(|d| d.pos).collect()))
            .collect()
    }

    /// Number of points held by value (centers' delegates plus the first point).
    pub fn retained(&self) -> usize {
        self.centers.iter().map(|c| c.delegates.len()).sum::<usize>()
            + usize::from(self.first.is_some())
            + usize::from(self.pending.is_some())
    }

    /// Distance of every consumed point to its reference center, in stream
    /// order. `None` unless tracking is enabled.
    pub fn reference_distances(&self) -> Option<Vec<f64>> {
        let t = self.tracker.as_ref()?;
        let by_serial: HashMap<usize, &Point> =
            self.centers.iter().map(|c| (c.serial, &c.point)).collect();
        Some(
            t.points
                .iter()
                .zip(&t.reference)
                .map(|(p, s)| self.metric.dist(p, by_serial[s]))
                .collect(),
        )
    }

    /// Threshold below which a point is handled by its nearest center.
    fn attach_radius(&self) -> f64 {
        match self.mode {
            StreamMode::Epsilon { epsilon, c } => 2.0 * epsilon * self.r / (c * self.k as f64),
            StreamMode::Tau { .. } => 2.0 * self.r,
        }
    }

    fn validate(&self, p: &Point) -> Result<Profile> {
        if let Some(first) = self.first.as_ref().or(self.pending.as_ref().map(|(p, _)| p)) {
            if first.dim() != p.dim() {
                return Err(Error::input(format!(
                    "point {:?} has dimension {}, expected {}",
                    p.id(),
                    p.dim(),
                    first.dim()
                )));
            }
        }
        if self.metric == MetricKind::AngularCosine && p.is_zero() {
            return Err(Error::input(format!(
                "point {:?} is the zero vector, not allowed under the angular metric",
                p.id()
            )));
        }
        self.matroid.profile(p)
    }

    /// Starts the stream with its first two points.
    pub fn init(&mut self, x1: Point, x2: Point) -> Result<()> {
        if self.is_initialized() || self.pending.is_some() {
            return Err(Error::State("stream already initialized".into()));
        }
        let p1 = self.validate(&x1)?;
        self.pending = Some((x1, p1));
        let p2 = match self.validate(&x2) {
            Ok(p) => p,
            Err(e) => {
                self.pending = None;
                return Err(e);
            }
        };
        let (x1, p1) = self.pending.take().unwrap();
        self.start(x1, p1, x2, p2);
        Ok(())
    }

    fn start(&mut self, x1: Point, p1: Profile, x2: Point, p2: Profile) {
        self.r = self.metric.dist(&x1, &x2);
        self.first = Some(x1.clone());
        self.open_center(x1, p1);
        self.open_center(x2, p2);
        match self.mode {
            StreamMode::Epsilon { epsilon, c } => {
                // only drops the second point when it coincides with the first
                let threshold = epsilon * self.r / (c * self.k as f64);
                self.restructure(threshold);
            }
            StreamMode::Tau { tau } => self.shrink_to(tau),
        }
    }

    /// Feeds a point, initializing the state with the first two points.
    pub fn feed(&mut self, x: Point) -> Result<()> {
        if self.is_initialized() {
            return self.push(x);
        }
        let profile = self.validate(&x)?;
        match self.pending.take() {
            None => self.pending = Some((x, profile)),
            Some((x1, p1)) => self.start(x1, p1, x, profile),
        }
        Ok(())
    }

    /// Processes one point of the stream.
    pub fn push(&mut self, x: Point) -> Result<()> {
        let Some(first) = &self.first else {
            return Err(Error::State("push before the stream was initialized".into()));
        };
        let profile = self.validate(&x)?;
        let to_first = self.metric.dist(&x, first);
        let (zi, dz) = self.nearest(&x);
        if dz > self.attach_radius() {
            self.open_center(x, profile);
        } else {
            let pos = self.count;
            self.count += 1;
            if let Some(t) = &mut self.tracker {
                t.points.push(x.clone());
                t.reference.push(self.centers[zi].serial);
            }
            let (matroid, k) = (self.matroid, self.k);
            handle(
                matroid,
                k,
                &mut self.centers[zi],
                Delegate {
                    pos,
                    point: x,
                    profile,
                },
            );
        }
        match self.mode {
            StreamMode::Epsilon { epsilon, c } => {
                if to_first > 2.0 * self.r {
                    self.r = to_first;
                    let threshold = epsilon * self.r / (c * self.k as f64);
                    self.restructure(threshold);
                }
            }
            StreamMode::Tau { tau } => self.shrink_to(tau),
        }
        Ok(())
    }

    fn open_center(&mut self, x: Point, profile: Profile) {
        let pos = self.count;
        self.count += 1;
        let serial = self.next_serial;
        self.next_serial += 1;
        if let Some(t) = &mut self.tracker {
            t.points.push(x.clone());
            t.reference.push(serial);
        }
        let full = self.k == 1;
        self.centers.push(Center {
            serial,
            pos,
            point: x.clone(),
            delegates: vec![Delegate {
                pos,
                point: x,
                profile,
            }],
            full,
        });
    }

    fn nearest(&self, x: &Point) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, c) in self.centers.iter().enumerate() {
            let d = self.metric.dist(x, &c.point);
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }

    /// Tau mode: restructure and double `R` while too many centers are open.
    fn shrink_to(&mut self, tau: usize) {
        while self.centers.len() > tau {
            self.restructure(self.r);
            self.r = if self.r > 0.0 {
                2.0 * self.r
            } else {
                self.min_center_gap()
            };
        }
    }

    fn min_center_gap(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.centers.iter().enumerate() {
            for b in &self.centers[i + 1..] {
                best = best.min(self.metric.dist(&a.point, &b.point));
            }
        }
        if best.is_finite() {
            best
        } else {
            0.0
        }
    }

    /// Keeps a maximal set of centers pairwise farther than `threshold`
    /// (greedy, insertion order) and merges each dropped center's delegates
    /// into its nearest kept center.
    pub fn restructure(&mut self, threshold: f64) {
        let mut kept: Vec<Center> = Vec::with_capacity(self.centers.len());
        let mut dropped: Vec<Center> = Vec::new();
        for c in self.centers.drain(..) {
            if kept
                .iter()
                .all(|k| self.metric.dist(&k.point, &c.point) > threshold)
            {
                kept.push(c);
            } else {
                dropped.push(c);
            }
        }
        let mut remap: HashMap<usize, usize> = HashMap::new();
        for c in dropped {
            let mut target = 0;
            let mut best = f64::INFINITY;
            for (i, k) in kept.iter().enumerate() {
                let d = self.metric.dist(&c.point, &k.point);
                if d < best {
                    best = d;
                    target = i;
                }
            }
            remap.insert(c.serial, kept[target].serial);
            for x in c.delegates {
                handle(self.matroid, self.k, &mut kept[target], x);
            }
        }
        self.centers = kept;
        if let Some(t) = &mut self.tracker {
            if !remap.is_empty() {
                for r in &mut t.reference {
                    if let Some(&to) = remap.get(r) {
                        *r = to;
                    }
                }
            }
        }
    }

    /// Ends the stream, returning the union of the delegate sets.
    pub fn finalize(self) -> Result<StreamOutput> {
        if self.first.is_none() {
            return Err(Error::input("a stream needs at least two points"));
        }
        let measured = self.reference_distances().map(|d| d.into_iter().fold(0.0, f64::max));
        let radius = measured.unwrap_or(match self.mode {
            StreamMode::Epsilon { .. } => self.attach_radius(),
            StreamMode::Tau { .. } => 2.0 * self.r,
        });
        let mut retained: Vec<(usize, Point)> = Vec::new();
        let mut clusters = Vec::with_capacity(self.centers.len());
        for c in self.centers {
            let mut selected: Vec<PointIdx> = c.delegates.iter().map(|d| d.pos).collect();
            selected.sort_unstable();
            clusters.push(CoresetCluster {
                center: c.pos,
                shard: 0,
                selected,
            });
            retained.extend(c.delegates.into_iter().map(|d| (d.pos, d.point)));
        }
        retained.sort_by_key(|(pos, _)| *pos);
        let points = Dataset::new(retained.into_iter().map(|(_, p)| p).collect(), self.metric)?;
        Ok(StreamOutput {
            coreset: Coreset::from_clusters(clusters, radius, vec![radius]),
            points,
            radius_measured: measured.is_some(),
        })
    }
}

/// Delegate-set update for point `x` assigned to `center`.
fn handle(matroid: &Matroid, k: usize, center: &mut Center, x: Delegate) {
    if center.full {
        return;
    }
    let ds = &mut center.delegates;
    match matroid.kind() {
        MatroidKind::Partition => {
            let mut set = matroid.empty_set();
            for d in ds.iter() {
                set.try_add(&d.point, &d.profile);
            }
            if set.try_add(&x.point, &x.profile) {
                ds.push(x);
                center.full = ds.len() == k;
            }
        }
        MatroidKind::Transversal => {
            let short = x.profile.iter().any(|a| {
                ds.iter().filter(|d| d.profile.contains(a)).count() < k
            });
            if short {
                ds.push(x);
                center.full = collapse(matroid, k, ds);
            }
        }
        MatroidKind::Custom => {
            ds.push(x);
            center.full = collapse(matroid, k, ds);
        }
    }
}

/// Replaces `ds` with an independent k-subset if one exists (greedy in
/// insertion order, exact for matroids). Returns whether it did.
fn collapse(matroid: &Matroid, k: usize, ds: &mut Vec<Delegate>) -> bool {
    let mut set = matroid.empty_set();
    let mut keep = Vec::with_capacity(k);
    for (i, d) in ds.iter().enumerate() {
        if set.try_add(&d.point, &d.profile) {
            keep.push(i);
            if keep.len() == k {
                break;
            }
        }
    }
    if keep.len() < k {
        return false;
    }
    let mut i = 0;
    ds.retain(|_| {
        let hit = keep.binary_search(&i).is_ok();
        i += 1;
        hit
    });
    true
}

/// Runs the streaming construction over `d` in index order, so coreset ids
/// coincide with dataset indices.
pub fn stream_coreset(d: &Dataset, m: &Matroid, k: usize, mode: StreamMode) -> Result<Coreset> {
    let mut st = StreamState::new(m, k, mode, d.metric())?;
    for p in d.points() {
        st.feed(p.clone())?;
    }
    Ok(st.finalize()?.coreset)
}

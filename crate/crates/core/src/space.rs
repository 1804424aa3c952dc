//! Finite metric measure spaces with a designated edge set.
//!
//! A space is a chord (ambient) distance matrix `d`, a probability mass
//! per point, and an undirected edge set. An edge (u, v) is traversable
//! with implied length d(u, v); chains of edges induce the length metric
//! (see [`crate::length`]). Metric axioms are diagnosed by
//! [`validate_metric`], not enforced at construction, so that broken
//! inputs can be loaded and reported on.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::DistanceMatrix;
use crate::tol;

/// Index of a point; dense in [0, n).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointId(pub usize);

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for PointId {
    fn from(i: usize) -> Self {
        PointId(i)
    }
}

pub type PointSet = BTreeSet<PointId>;

#[derive(Clone, Debug)]
pub struct MetricSpace {
    dist: DistanceMatrix,
    mass: Vec<f64>,
    labels: Vec<Option<String>>,
    /// Normalized (u < v), sorted, deduplicated.
    edges: Vec<(usize, usize)>,
    /// Sorted neighbor lists.
    adj: Vec<Vec<usize>>,
}

impl MetricSpace {
    /// Structural validation only: shapes, mass normalization, edge
    /// sanity. Metric axioms are checked by [`validate_metric`].
    pub fn new(
        dist: DistanceMatrix,
        edges: &[(usize, usize)],
        mass: Vec<f64>,
        labels: Option<Vec<Option<String>>>,
    ) -> Result<Self> {
        let n = dist.n();
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        for i in 0..n {
            for j in 0..n {
                let v = dist.get(i, j);
                if v.is_nan() || v < 0.0 {
                    return Err(Error::BadDistance { i, j, value: v });
                }
            }
        }
        if mass.len() != n {
            return Err(Error::MassLength { n, got: mass.len() });
        }
        for (index, &value) in mass.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::BadMass { index, value });
            }
        }
        let sum = kahan_sum(&mass);
        if (sum - 1.0).abs() > tol::MASS_SUM_ABS {
            return Err(Error::MassNotNormalized {
                sum,
                tol: tol::MASS_SUM_ABS,
            });
        }
        let labels = match labels {
            Some(l) if l.len() != n => return Err(Error::LabelLength { n, got: l.len() }),
            Some(l) => l,
            None => vec![None; n],
        };

        let mut norm: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::EdgeOutOfRange { u, v, n });
            }
            if u == v {
                return Err(Error::SelfEdge { u });
            }
            let e = (u.min(v), u.max(v));
            let len = dist.get(e.0, e.1);
            if !len.is_finite() || len <= 0.0 {
                return Err(Error::BadEdgeLength {
                    u: e.0,
                    v: e.1,
                    len,
                });
            }
            norm.push(e);
        }
        norm.sort_unstable();
        norm.dedup();

        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &norm {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }

        Ok(Self {
            dist,
            mass,
            labels,
            edges: norm,
            adj,
        })
    }

    pub fn with_uniform_mass(dist: DistanceMatrix, edges: &[(usize, usize)]) -> Result<Self> {
        let n = dist.n();
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        Self::new(dist, edges, vec![1.0 / n as f64; n], None)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.dist.n()
    }

    #[inline]
    pub fn dist(&self) -> &DistanceMatrix {
        &self.dist
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist.get(i, j)
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    #[inline]
    pub fn mass(&self, p: PointId) -> f64 {
        self.mass[p.0]
    }

    pub fn labels(&self) -> &[Option<String>] {
        &self.labels
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn is_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Longest edge, if the space has edges. A scale h at least this
    /// large makes every graph neighbor visible from both endpoints.
    pub fn max_edge_length(&self) -> Option<f64> {
        self.edges
            .iter()
            .map(|&(u, v)| self.dist.get(u, v))
            .max_by(|a, b| a.partial_cmp(b).expect("edge lengths are finite"))
    }

    pub fn all_points(&self) -> PointSet {
        (0..self.n()).map(PointId).collect()
    }

    /// Mass of a point set; summed in id order.
    pub fn measure_of(&self, set: &PointSet) -> f64 {
        // + 0.0 turns the empty sum's -0.0 into +0.0 and changes
        // nothing else; reports should not print a signed zero.
        set.iter().map(|p| self.mass[p.0]).sum::<f64>() + 0.0
    }

    /// Connectivity of the edge graph.
    pub fn is_connected(&self) -> bool {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == n
    }
}

fn kahan_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for &v in values {
        let y = v - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

/// A walk through the edge graph. At least one point; consecutive points
/// distinct. Revisits are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathSeq(Vec<PointId>);

impl PathSeq {
    pub fn new(points: Vec<PointId>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyPath);
        }
        for (step, w) in points.windows(2).enumerate() {
            if w[0] == w[1] {
                return Err(Error::RepeatedStep { p: w[0].0, step });
            }
        }
        Ok(Self(points))
    }

    pub fn points(&self) -> &[PointId] {
        &self.0
    }
}

/// One metric axiom failure, with the witnessing points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MetricViolation {
    /// d(i, i) differs from 0.
    Identity { i: usize },
    /// d(i, j) differs from d(j, i).
    Symmetry { i: usize, j: usize },
    /// d(i, j) <= 0 for distinct points.
    Positivity { i: usize, j: usize },
    /// d(i, k) > d(i, j) + d(j, k).
    Triangle { i: usize, j: usize, k: usize },
}

impl fmt::Display for MetricViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Identity { i } => write!(f, "d({i},{i}) != 0"),
            Self::Symmetry { i, j } => write!(f, "d({i},{j}) != d({j},{i})"),
            Self::Positivity { i, j } => write!(f, "d({i},{j}) <= 0"),
            Self::Triangle { i, j, k } => {
                write!(f, "d({i},{k}) > d({i},{j}) + d({j},{k})")
            }
        }
    }
}

/// Stored violations are capped at this many; `violation_count` keeps the
/// true total so a badly broken space cannot blow up the report.
pub const MAX_STORED_VIOLATIONS: usize = 1000;

/// Diagnostic summary of a space. `validate_metric` fills the metric and
/// connectivity fields; the quasi-convexity fields need the length metric
/// and are filled by [`crate::length::analyze`].
#[derive(Clone, Debug)]
pub struct SpaceReport {
    pub metric_ok: bool,
    pub violations: Vec<MetricViolation>,
    pub violation_count: usize,
    pub connected: bool,
    /// Quasi-convexity constant; `None` until computed,
    /// `Some(f64::INFINITY)` for disconnected spaces.
    pub c: Option<f64>,
    /// Pair attaining C (lexicographically least among maximizers).
    pub worst_pair: Option<(PointId, PointId)>,
}

/// Checks the metric axioms within [`tol::METRIC_AXIOM_ABS`] and reports
/// violations as data. Infinite off-diagonal distances are admitted
/// (extended metric); such spaces simply come out disconnected.
pub fn validate_metric(space: &MetricSpace) -> SpaceReport {
    let n = space.n();
    let d = space.dist();
    let t = tol::METRIC_AXIOM_ABS;
    let mut violations = Vec::new();
    let mut count = 0usize;
    let push = |violations: &mut Vec<MetricViolation>, count: &mut usize, v: MetricViolation| {
        if *count < MAX_STORED_VIOLATIONS {
            violations.push(v);
        }
        *count += 1;
    };

    for i in 0..n {
        if d.get(i, i).abs() > t {
            push(&mut violations, &mut count, MetricViolation::Identity { i });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (d.get(i, j) - d.get(j, i)).abs() > t {
                push(
                    &mut violations,
                    &mut count,
                    MetricViolation::Symmetry { i, j },
                );
            }
            if d.get(i, j) <= 0.0 {
                push(
                    &mut violations,
                    &mut count,
                    MetricViolation::Positivity { i, j },
                );
            }
        }
    }
    // d(i,k) <= d(i,j) + d(j,k) for all ordered triples of distinct points.
    for i in 0..n {
        for k in 0..n {
            if k == i {
                continue;
            }
            let dik = d.get(i, k);
            let row_i = d.row(i);
            for (j, &dij) in row_i.iter().enumerate() {
                if j == i || j == k {
                    continue;
                }
                if dik > dij + d.get(j, k) + t {
                    push(
                        &mut violations,
                        &mut count,
                        MetricViolation::Triangle { i, j, k },
                    );
                }
            }
        }
    }

    SpaceReport {
        metric_ok: count == 0,
        violations,
        violation_count: count,
        connected: space.is_connected(),
        c: None,
        worst_pair: None,
    }
}

/// Sum of edge lengths along a walk; every consecutive pair must be an
/// edge. A single point has length 0.
pub fn path_length(space: &MetricSpace, path: &PathSeq) -> Result<f64> {
    let n = space.n();
    for p in path.points() {
        if p.0 >= n {
            return Err(Error::PointOutOfRange { p: p.0, n });
        }
    }
    let mut total = 0.0;
    for w in path.points().windows(2) {
        let (u, v) = (w[0].0, w[1].0);
        if !space.is_edge(u, v) {
            return Err(Error::NonAdjacentStep { u, v });
        }
        total += space.d(u, v);
    }
    Ok(total)
}

/// min over w in `set` of `dmat[x][w]`. Works for the chord matrix and
/// for a length-distance matrix alike.
pub fn set_distance(dmat: &DistanceMatrix, x: PointId, set: &PointSet) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = dmat.n();
    if x.0 >= n {
        return Err(Error::PointOutOfRange { p: x.0, n });
    }
    let mut best = f64::INFINITY;
    for w in set {
        if w.0 >= n {
            return Err(Error::PointOutOfRange { p: w.0, n });
        }
        let v = dmat.get(x.0, w.0);
        if v < best {
            best = v;
        }
    }
    Ok(best)
}

//! The length metric d_L: shortest chains of edges, each edge weighted by
//! its chord length.
//!
//! Two deliberately independent algorithms compute d_L. The primary is
//! Dijkstra from every source; the cross-check is Floyd-Warshall. Both
//! are deterministic (ties broken by point index), so repeated runs and
//! any thread count give bit-identical matrices, but their sums associate
//! differently and may disagree by a few ulps
//! (see [`crate::tol::CROSS_ALGORITHM_ABS`]).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::matrix::DistanceMatrix;
use crate::space::{validate_metric, MetricSpace, PointId, SpaceReport};

/// Heap entry; ordered so the smallest distance pops first, ties by
/// smallest point index.
#[derive(Copy, Clone, PartialEq)]
struct Candidate {
    dist: f64,
    point: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap, we want the minimum.
        other
            .dist
            .partial_cmp(&self.dist)
            .expect("distances in the heap are finite")
            .then_with(|| other.point.cmp(&self.point))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra_into(space: &MetricSpace, source: usize, out: &mut [f64]) {
    out.fill(f64::INFINITY);
    out[source] = 0.0;
    let mut settled = vec![false; space.n()];
    let mut heap = BinaryHeap::new();
    heap.push(Candidate {
        dist: 0.0,
        point: source,
    });
    while let Some(Candidate { dist, point }) = heap.pop() {
        if settled[point] {
            continue;
        }
        settled[point] = true;
        for &next in space.neighbors(point) {
            if settled[next] {
                continue;
            }
            let cand = dist + space.d(point, next);
            if cand < out[next] {
                out[next] = cand;
                heap.push(Candidate {
                    dist: cand,
                    point: next,
                });
            }
        }
    }
}

/// d_L by Dijkstra from every source. Unreachable pairs are infinite.
pub fn length_distance(space: &MetricSpace) -> DistanceMatrix {
    let n = space.n();
    let mut out = DistanceMatrix::zeros(n);
    out.data_mut()
        .par_chunks_mut(n)
        .enumerate()
        .for_each(|(source, row)| dijkstra_into(space, source, row));
    out
}

/// d_L by Floyd-Warshall; the dynamic-programming cross-check for
/// [`length_distance`].
pub fn length_distance_floyd_warshall(space: &MetricSpace) -> DistanceMatrix {
    let n = space.n();
    let mut m = DistanceMatrix::filled(n, f64::INFINITY);
    for i in 0..n {
        m.set(i, i, 0.0);
    }
    for &(u, v) in space.edges() {
        let w = space.d(u, v);
        if w < m.get(u, v) {
            m.set(u, v, w);
            m.set(v, u, w);
        }
    }
    let mut pivot_row = vec![0.0f64; n];
    for k in 0..n {
        pivot_row.copy_from_slice(m.row(k));
        m.data_mut()
            .par_chunks_mut(n)
            .enumerate()
            .for_each(|(i, row)| {
                if i == k {
                    return;
                }
                let dik = row[k];
                if !dik.is_finite() {
                    return;
                }
                for (j, rj) in row.iter_mut().enumerate() {
                    let cand = dik + pivot_row[j];
                    if cand < *rj {
                        *rj = cand;
                    }
                }
            });
    }
    m
}

/// Quasi-convexity data: C = max over pairs of d_L / d.
#[derive(Clone, Copy, Debug)]
pub struct QuasiConvexity {
    /// `f64::INFINITY` when some pair is unreachable.
    pub c: f64,
    /// Lexicographically least pair attaining C (or the least unreachable
    /// pair when disconnected); `None` for a single point.
    pub worst_pair: Option<(PointId, PointId)>,
    pub connected: bool,
}

impl QuasiConvexity {
    /// The finite constant, or the not-quasi-convex error naming an
    /// unreachable pair.
    pub fn require_finite(&self) -> crate::error::Result<f64> {
        if self.c.is_finite() {
            Ok(self.c)
        } else {
            let (u, v) = self
                .worst_pair
                .expect("infinite C comes with a witness pair");
            Err(crate::error::Error::NotQuasiConvex { u: u.0, v: v.0 })
        }
    }
}

/// Scans all pairs of `d_l` against the chord matrix. On a valid
/// connected space C >= 1 up to rounding. Pairs with nonpositive chord
/// distance (already flagged by `validate_metric`) are skipped.
pub fn quasi_convexity_constant(space: &MetricSpace, d_l: &DistanceMatrix) -> QuasiConvexity {
    let n = space.n();
    if n == 1 {
        return QuasiConvexity {
            c: 1.0,
            worst_pair: None,
            connected: true,
        };
    }
    let mut best = f64::NEG_INFINITY;
    let mut pair = None;
    for i in 0..n {
        for j in (i + 1)..n {
            let dl = d_l.get(i, j);
            if !dl.is_finite() {
                return QuasiConvexity {
                    c: f64::INFINITY,
                    worst_pair: Some((PointId(i), PointId(j))),
                    connected: false,
                };
            }
            let d = space.d(i, j);
            if d <= 0.0 {
                continue;
            }
            let ratio = dl / d;
            if ratio > best {
                best = ratio;
                pair = Some((PointId(i), PointId(j)));
            }
        }
    }
    if pair.is_none() {
        // No usable pair (all chords nonpositive); treat as trivially
        // quasi-convex, the metric report carries the real diagnosis.
        return QuasiConvexity {
            c: 1.0,
            worst_pair: None,
            connected: true,
        };
    }
    QuasiConvexity {
        c: best,
        worst_pair: pair,
        connected: true,
    }
}

/// Full report: metric axioms plus quasi-convexity.
pub fn analyze(space: &MetricSpace) -> SpaceReport {
    let mut report = validate_metric(space);
    let d_l = length_distance(space);
    let qc = quasi_convexity_constant(space, &d_l);
    report.connected = qc.connected;
    report.c = Some(qc.c);
    report.worst_pair = qc.worst_pair;
    report
}

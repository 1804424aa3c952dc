//! Space generators: paths, grids, random geometric graphs, gasket
//! prefractals, and snowflake rescaling.
//!
//! Every generator is deterministic; the random geometric generator
//! derives all of its choices from [`crate::rng::SplitMix64`] on the
//! given seed, so equal specs yield bit-identical spaces.

use crate::error::{Error, Result};
use crate::matrix::DistanceMatrix;
use crate::rng::SplitMix64;
use crate::space::MetricSpace;

/// Largest accepted gasket level; level 6 already has 1095 points and a
/// dense 1095 x 1095 chord matrix.
pub const MAX_SIERPINSKI_LEVEL: u32 = 6;

/// A generator request. `generate` turns it into a space.
#[derive(Clone, Debug, PartialEq)]
pub enum GenSpec {
    Path { n: usize },
    Grid { rows: usize, cols: usize },
    RandomGeometric { n: usize, radius: f64, seed: u64 },
    Sierpinski { level: u32 },
    Snowflake { alpha: f64, base: Box<GenSpec> },
}

impl GenSpec {
    pub fn generate(&self) -> Result<MetricSpace> {
        match self {
            Self::Path { n } => gen_path(*n),
            Self::Grid { rows, cols } => gen_grid(*rows, *cols),
            Self::RandomGeometric { n, radius, seed } => gen_random_geometric(*n, *radius, *seed),
            Self::Sierpinski { level } => gen_sierpinski(*level),
            Self::Snowflake { alpha, base } => snowflake(&base.generate()?, *alpha),
        }
    }
}

fn euclid(ax: f64, ay: f64, bx: f64, by: f64) -> f64 {
    let dx = bx - ax;
    let dy = by - ay;
    (dx * dx + dy * dy).sqrt()
}

fn from_coords(coords: &[(f64, f64)], edges: &[(usize, usize)]) -> Result<MetricSpace> {
    let n = coords.len();
    let dist = DistanceMatrix::from_fn(n, |i, j| {
        let (ax, ay) = coords[i.min(j)];
        let (bx, by) = coords[i.max(j)];
        euclid(ax, ay, bx, by)
    });
    MetricSpace::with_uniform_mass(dist, edges)
}

/// Unit path graph p0 - p1 - ... - p{n-1}; the chord metric is |i - j|.
pub fn gen_path(n: usize) -> Result<MetricSpace> {
    if n == 0 {
        return Err(Error::BadGenSize {
            name: "n",
            value: n,
        });
    }
    let dist = DistanceMatrix::from_fn(n, |i, j| (i.abs_diff(j)) as f64);
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    MetricSpace::with_uniform_mass(dist, &edges)
}

/// rows x cols lattice with unit 4-neighbor edges and the Euclidean
/// chord metric. Point id is row * cols + col.
pub fn gen_grid(rows: usize, cols: usize) -> Result<MetricSpace> {
    if rows == 0 {
        return Err(Error::BadGenSize {
            name: "rows",
            value: rows,
        });
    }
    if cols == 0 {
        return Err(Error::BadGenSize {
            name: "cols",
            value: cols,
        });
    }
    let mut coords = Vec::with_capacity(rows * cols);
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let id = r * cols + c;
            coords.push((c as f64, r as f64));
            if c + 1 < cols {
                edges.push((id, id + 1));
            }
            if r + 1 < rows {
                edges.push((id, id + cols));
            }
        }
    }
    from_coords(&coords, &edges)
}

/// n seeded-uniform points in the unit square; edges join pairs at
/// Euclidean distance <= radius. May come out disconnected, which the
/// analysis layer reports rather than hides.
pub fn gen_random_geometric(n: usize, radius: f64, seed: u64) -> Result<MetricSpace> {
    if n == 0 {
        return Err(Error::BadGenSize {
            name: "n",
            value: n,
        });
    }
    if !radius.is_finite() || radius <= 0.0 {
        return Err(Error::BadParam {
            name: "radius",
            value: radius,
        });
    }
    let mut rng = SplitMix64::new(seed);
    let coords: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let x = rng.next_f64();
            let y = rng.next_f64();
            (x, y)
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let d = euclid(coords[i].0, coords[i].1, coords[j].0, coords[j].1);
            if d <= radius {
                edges.push((i, j));
            }
        }
    }
    from_coords(&coords, &edges)
}

/// Level-k gasket prefractal: the outer triangle has unit sides, the
/// 3^k small triangles have sides 2^-k, and those sides are the edges.
/// Vertices are numbered in lexicographic lattice order.
pub fn gen_sierpinski(level: u32) -> Result<MetricSpace> {
    if level > MAX_SIERPINSKI_LEVEL {
        return Err(Error::BadGenSize {
            name: "level",
            value: level as usize,
        });
    }
    // Lattice coordinates: the point (p, q) embeds at
    // (p + q/2, q * sqrt(3)/2) * 2^-level.
    let side = 1i64 << level;
    let mut triangles = vec![[(0i64, 0i64), (side, 0), (0, side)]];
    for _ in 0..level {
        let mut next = Vec::with_capacity(triangles.len() * 3);
        for [a, b, c] in triangles {
            let mab = ((a.0 + b.0) / 2, (a.1 + b.1) / 2);
            let mac = ((a.0 + c.0) / 2, (a.1 + c.1) / 2);
            let mbc = ((b.0 + c.0) / 2, (b.1 + c.1) / 2);
            next.push([a, mab, mac]);
            next.push([mab, b, mbc]);
            next.push([mac, mbc, c]);
        }
        triangles = next;
    }

    let mut vertices: Vec<(i64, i64)> = triangles.iter().flatten().copied().collect();
    vertices.sort_unstable();
    vertices.dedup();
    let index_of = |v: (i64, i64)| vertices.binary_search(&v).expect("vertex collected");

    let mut edges = Vec::with_capacity(triangles.len() * 3);
    for [a, b, c] in &triangles {
        edges.push((index_of(*a), index_of(*b)));
        edges.push((index_of(*a), index_of(*c)));
        edges.push((index_of(*b), index_of(*c)));
    }

    let scale = 0.5f64.powi(level as i32);
    let root3_half = 3f64.sqrt() / 2.0;
    let coords: Vec<(f64, f64)> = vertices
        .iter()
        .map(|&(p, q)| {
            let x = (p as f64 + 0.5 * q as f64) * scale;
            let y = q as f64 * root3_half * scale;
            (x, y)
        })
        .collect();
    from_coords(&coords, &edges)
}

/// Replaces the chord metric by d^alpha, 0 < alpha < 1. Concavity of
/// t^alpha preserves the triangle inequality; edges, masses, and labels
/// carry over.
pub fn snowflake(space: &MetricSpace, alpha: f64) -> Result<MetricSpace> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha >= 1.0 {
        return Err(Error::BadParam {
            name: "alpha",
            value: alpha,
        });
    }
    let dist = space.dist().map(|d| d.powf(alpha));
    MetricSpace::new(
        dist,
        space.edges(),
        space.masses().to_vec(),
        Some(space.labels().to_vec()),
    )
}

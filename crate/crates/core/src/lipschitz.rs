//! Pointwise Lipschitz constants of scalar fields at a scale h.
//!
//! The pointwise constant at x is the largest difference quotient
//! |f(x) - f(y)| / d(x, y) over the punctured chord ball
//! {y : 0 < d(x, y) <= h}. When that ball is empty the nearest neighbors
//! of x stand in for it and the effective radius is recorded, so the
//! field is total on any space with at least two points.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::space::{MetricSpace, PointId, PointSet};

/// Scalar values on the points of a space; always finite.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::BadFieldValue { index, value });
            }
        }
        Ok(Self { values })
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self {
            values: vec![value; n],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, p: PointId) -> f64 {
        self.values[p.0]
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Pointwise difference self - other.
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "field lengths differ");
        Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// self + scale * other, rounded once per term and once per sum.
    pub fn add_scaled(&self, scale: f64, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "field lengths differ");
        Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + scale * b)
                .collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }
}

/// Neighborhood radius h; positive and finite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scale(f64);

impl Scale {
    pub fn new(h: f64) -> Result<Self> {
        if !h.is_finite() || h <= 0.0 {
            return Err(Error::BadScale(h));
        }
        Ok(Self(h))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

/// Pointwise Lipschitz constants of one field at one scale.
#[derive(Clone, Debug, PartialEq)]
pub struct LipProfile {
    pub h: f64,
    pub lip: Vec<f64>,
    /// Effective radius per point: h, or the nearest-neighbor distance
    /// where the punctured ball was empty.
    pub h_used: Vec<f64>,
}

impl LipProfile {
    pub fn max(&self) -> f64 {
        self.lip.iter().fold(0.0, |acc, v| acc.max(*v))
    }
}

/// Sublevel set {x : Lip_h f(x) <= tau} with its mass.
#[derive(Clone, Debug)]
pub struct SingularSet {
    pub tau: f64,
    pub members: PointSet,
    pub measure: f64,
}

/// The members of the punctured chord ball around x (radius h), falling
/// back to the nearest-neighbor shell when the ball is empty. Returns
/// the neighbor indices and the effective radius. Points at infinite
/// chord distance are never neighbors; a point with no finite companion
/// gets an empty set and radius h.
pub fn punctured_ball(space: &MetricSpace, x: usize, h: Scale) -> (Vec<usize>, f64) {
    let row = space.dist().row(x);
    let h = h.get();
    let mut members: Vec<usize> = Vec::new();
    for (y, &d) in row.iter().enumerate() {
        if y != x && d > 0.0 && d <= h {
            members.push(y);
        }
    }
    if !members.is_empty() {
        return (members, h);
    }
    let mut nearest = f64::INFINITY;
    for (y, &d) in row.iter().enumerate() {
        if y != x && d > 0.0 && d < nearest {
            nearest = d;
        }
    }
    if !nearest.is_finite() {
        return (Vec::new(), h);
    }
    for (y, &d) in row.iter().enumerate() {
        if y != x && d == nearest {
            members.push(y);
        }
    }
    (members, nearest)
}

#[inline]
fn quotient(fx: f64, fy: f64, d: f64) -> f64 {
    (fx - fy).abs() / d
}

/// Global Lipschitz constant: the largest difference quotient over all
/// pairs at positive chord distance. Zero on a single point.
pub fn global_lip(space: &MetricSpace, f: &ScalarField) -> f64 {
    assert_eq!(space.n(), f.len(), "field does not fit the space");
    let n = space.n();
    let values = f.values();
    let mut best = 0.0f64;
    for i in 0..n {
        let row = space.dist().row(i);
        for j in (i + 1)..n {
            let d = row[j];
            if d > 0.0 && d.is_finite() {
                best = best.max(quotient(values[i], values[j], d));
            }
        }
    }
    best
}

fn lip_at(space: &MetricSpace, values: &[f64], h: Scale, x: usize) -> (f64, f64) {
    let (members, h_used) = punctured_ball(space, x, h);
    let row = space.dist().row(x);
    let mut best = 0.0f64;
    for &y in &members {
        best = best.max(quotient(values[x], values[y], row[y]));
    }
    (best, h_used)
}

/// Pointwise Lipschitz constant at one point.
pub fn pointwise_lip(space: &MetricSpace, f: &ScalarField, h: Scale, x: PointId) -> f64 {
    assert_eq!(space.n(), f.len(), "field does not fit the space");
    lip_at(space, f.values(), h, x.0).0
}

/// The whole field of pointwise constants, with effective radii.
pub fn lip_field(space: &MetricSpace, f: &ScalarField, h: Scale) -> LipProfile {
    assert_eq!(space.n(), f.len(), "field does not fit the space");
    let n = space.n();
    let values = f.values();
    let pairs: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|x| lip_at(space, values, h, x))
        .collect();
    LipProfile {
        h: h.get(),
        lip: pairs.iter().map(|p| p.0).collect(),
        h_used: pairs.iter().map(|p| p.1).collect(),
    }
}

/// The D-infinity norm surrogate: sup |f| plus the largest pointwise
/// constant at scale h.
pub fn dinf_norm(space: &MetricSpace, f: &ScalarField, h: Scale) -> f64 {
    f.sup_norm() + lip_field(space, f, h).max()
}

/// Points whose pointwise constant is at most tau, with their mass.
pub fn singular_set(space: &MetricSpace, f: &ScalarField, h: Scale, tau: f64) -> SingularSet {
    let profile = lip_field(space, f, h);
    let members: PointSet = profile
        .lip
        .iter()
        .enumerate()
        .filter(|(_, &l)| l <= tau)
        .map(|(i, _)| PointId(i))
        .collect();
    let measure = space.measure_of(&members);
    SingularSet {
        tau,
        members,
        measure,
    }
}

/// Mass of an arbitrary point set, summed in id order.
pub fn singular_measure(space: &MetricSpace, members: &PointSet) -> f64 {
    space.measure_of(members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_grid, gen_path};

    fn field(values: &[f64]) -> ScalarField {
        ScalarField::new(values.to_vec()).unwrap()
    }

    fn h(v: f64) -> Scale {
        Scale::new(v).unwrap()
    }

    #[test]
    fn global_constant_is_the_worst_pair_quotient() {
        // f(p_i) = i^2 on the 4-point unit path. The steepest quotient
        // is the last edge: |9 - 4| / 1 = 5.
        let space = gen_path(4).unwrap();
        let f = field(&[0.0, 1.0, 4.0, 9.0]);
        assert_eq!(global_lip(&space, &f), 5.0);
    }

    #[test]
    fn global_constant_of_a_constant_field_is_zero() {
        let space = gen_grid(3, 3).unwrap();
        assert_eq!(global_lip(&space, &ScalarField::constant(9, 4.2)), 0.0);
    }

    #[test]
    fn single_point_space_has_zero_constants() {
        let space = gen_path(1).unwrap();
        let f = field(&[3.0]);
        assert_eq!(global_lip(&space, &f), 0.0);
        let profile = lip_field(&space, &f, h(1.0));
        assert_eq!(profile.lip, vec![0.0]);
        assert_eq!(profile.h_used, vec![1.0]);
        assert_eq!(dinf_norm(&space, &f, h(1.0)), 3.0);
    }

    #[test]
    fn pointwise_constants_on_the_three_point_path() {
        let space = gen_path(3).unwrap();
        let f = field(&[0.0, 0.0, 1.0]);
        let profile = lip_field(&space, &f, h(1.0));
        assert_eq!(profile.lip, vec![0.0, 1.0, 1.0]);
        assert_eq!(profile.h_used, vec![1.0; 3]);
        assert_eq!(pointwise_lip(&space, &f, h(1.0), PointId(1)), 1.0);
        assert_eq!(dinf_norm(&space, &f, h(1.0)), 2.0);
    }

    #[test]
    fn empty_ball_falls_back_to_nearest_neighbors() {
        let space = gen_path(3).unwrap();
        let f = field(&[0.0, 0.0, 1.0]);
        // h = 0.5 is below the unit edge length, so every ball is empty
        // and the nearest-neighbor shell (distance 1) stands in.
        let profile = lip_field(&space, &f, h(0.5));
        assert_eq!(profile.lip, vec![0.0, 1.0, 1.0]);
        assert_eq!(profile.h_used, vec![1.0; 3]);
    }

    #[test]
    fn fallback_shell_takes_all_tied_nearest_neighbors() {
        let space = gen_path(3).unwrap();
        let f = field(&[1.0, 0.0, 3.0]);
        // p1 has both neighbors at distance 1; the shell holds both.
        assert_eq!(pointwise_lip(&space, &f, h(0.5), PointId(1)), 3.0);
    }

    #[test]
    fn singular_set_collects_flat_points() {
        let space = gen_path(3).unwrap();
        let f = field(&[0.0, 0.0, 1.0]);
        let s = singular_set(&space, &f, h(1.0), 0.0);
        assert_eq!(s.members, [PointId(0)].into_iter().collect());
        assert!((s.measure - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn strictly_monotone_field_has_empty_singular_set() {
        let space = gen_path(5).unwrap();
        let f = field(&[0.0, 1.0, 2.5, 4.0, 6.0]);
        let s = singular_set(&space, &f, h(1.0), 0.0);
        assert!(s.members.is_empty());
        assert_eq!(s.measure, 0.0);
    }

    #[test]
    fn singular_set_grows_with_tau() {
        let space = gen_path(4).unwrap();
        let f = field(&[0.0, 0.1, 0.3, 0.9]);
        let small = singular_set(&space, &f, h(1.0), 0.1);
        let large = singular_set(&space, &f, h(1.0), 0.3);
        assert!(small.members.is_subset(&large.members));
    }

    #[test]
    fn pointwise_never_exceeds_global() {
        let space = gen_grid(3, 3).unwrap();
        let f = field(&[0.0, 1.0, 0.5, 2.0, -1.0, 0.25, 3.0, 0.0, 1.5]);
        let profile = lip_field(&space, &f, h(2.5));
        let global = global_lip(&space, &f);
        for &l in &profile.lip {
            assert!(l <= global);
        }
    }

    #[test]
    fn complete_graph_with_large_scale_attains_the_global_constant() {
        // Every pair is an edge and h covers the diameter, so the best
        // pointwise constant equals the global one exactly.
        let dist = crate::matrix::DistanceMatrix::from_row_major(
            3,
            vec![0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0],
        )
        .unwrap();
        let space =
            crate::space::MetricSpace::with_uniform_mass(dist, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let f = field(&[0.3, -0.2, 1.9]);
        let profile = lip_field(&space, &f, h(2.0));
        assert_eq!(profile.max(), global_lip(&space, &f));
    }
}

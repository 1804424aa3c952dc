//! Perturbation of a field with a fat singular set into a nearby field
//! whose singular set has small measure.
//!
//! Given f with singular set S = {Lip_h f <= tau}, pick a radius eps
//! whose sphere around S carries no mass, let K be the complement of the
//! eps-neighborhood, and add lambda times ghat = d_L(., K). Away from K
//! the added field has pointwise constant at least 1 and at most C, so
//! scaled by lambda > 2 tau it lifts every singular point, while
//! lambda <= delta / (2 max(M, C, 1)) keeps g within delta of f in the
//! D-infinity norm surrogate.

use crate::error::{Error, Result};
use crate::length::{length_distance, quasi_convexity_constant};
use crate::lipschitz::{dinf_norm, singular_set, ScalarField, Scale};
use crate::matrix::DistanceMatrix;
use crate::space::{set_distance, MetricSpace, PointId, PointSet};
use crate::tol;

/// Inputs of the perturbation. Built by [`PerturbParams::new`], which
/// enforces delta > 0, 0 < r <= 1, tau >= 0.
#[derive(Clone, Copy, Debug)]
pub struct PerturbParams {
    delta: f64,
    r: f64,
    tau: f64,
    h: Scale,
    epsilon: Option<f64>,
}

impl PerturbParams {
    pub fn new(delta: f64, r: f64, tau: f64, h: Scale) -> Result<Self> {
        if !delta.is_finite() || delta <= 0.0 {
            return Err(Error::BadParam {
                name: "delta",
                value: delta,
            });
        }
        if !r.is_finite() || r <= 0.0 || r > 1.0 {
            return Err(Error::BadParam {
                name: "r",
                value: r,
            });
        }
        if !tau.is_finite() || tau < 0.0 {
            return Err(Error::BadParam {
                name: "tau",
                value: tau,
            });
        }
        Ok(Self {
            delta,
            r,
            tau,
            h,
            epsilon: None,
        })
    }

    /// Overrides the automatic radius selection.
    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(Error::BadParam {
                name: "epsilon",
                value: epsilon,
            });
        }
        self.epsilon = Some(epsilon);
        Ok(self)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn h(&self) -> Scale {
        self.h
    }

    pub fn epsilon(&self) -> Option<f64> {
        self.epsilon
    }
}

/// The verified contract of one perturbation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyReport {
    /// D-infinity distance between f and g at scale h.
    pub dinf_distance: f64,
    /// dinf_distance <= delta.
    pub norm_ok: bool,
    pub singular_measure_before: f64,
    pub singular_measure_after: f64,
    /// singular_measure_after < r.
    pub measure_ok: bool,
    /// S_tau(g) lies inside the eps-neighborhood of S_tau(f) minus
    /// S_tau(f) itself.
    pub inclusion_ok: bool,
    /// The sphere {d(., S) = eps} carries zero mass, exactly.
    pub atom_free: bool,
}

impl VerifyReport {
    pub fn all_ok(&self) -> bool {
        self.norm_ok && self.measure_ok && self.inclusion_ok && self.atom_free
    }
}

#[derive(Clone, Debug)]
pub struct PerturbResult {
    pub g: ScalarField,
    /// d_L(., K), the added field before scaling.
    pub ghat: ScalarField,
    /// The anchor set K.
    pub k: PointSet,
    pub epsilon: f64,
    pub lambda: f64,
    /// M = sup ghat.
    pub m_sup: f64,
    /// Quasi-convexity constant of the space.
    pub c: f64,
    /// K was empty (the eps-neighborhood swallowed the space) and the
    /// minimal-mass point stood in.
    pub empty_k_fallback: bool,
    /// The chosen radius has an empty annulus forced by the r budget, or
    /// an override's annulus mass is at least r.
    pub epsilon_warning: bool,
    pub verification: VerifyReport,
}

/// {z : d(z, S) < eps}; strict, so a sphere exactly at eps is excluded.
pub fn eps_neighborhood(dmat: &DistanceMatrix, s: &PointSet, eps: f64) -> Result<PointSet> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut out = PointSet::new();
    for z in 0..dmat.n() {
        if set_distance(dmat, PointId(z), s)? < eps {
            out.insert(PointId(z));
        }
    }
    Ok(out)
}

/// Ascending distinct values of d(., S) with their total masses. Values
/// are grouped by exact equality; the masses partition 1.
pub fn level_set_masses(
    dmat: &DistanceMatrix,
    s: &PointSet,
    mass: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = dmat.n();
    assert_eq!(mass.len(), n, "mass vector does not fit the matrix");
    let values: Vec<f64> = (0..n)
        .map(|z| set_distance(dmat, PointId(z), s))
        .collect::<Result<_>>()?;
    Ok(group_by_value(&values, mass))
}

/// Groups (value, mass) pairs by exact value equality, ascending; within
/// a group masses accumulate in point-id order.
fn group_by_value(values: &[f64], mass: &[f64]) -> Vec<(f64, f64)> {
    let mut pairs: Vec<(f64, f64)> = values.iter().copied().zip(mass.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("values are not NaN"));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (v, m) in pairs {
        match out.last_mut() {
            Some(last) if last.0 == v => last.1 += m,
            _ => out.push((v, m)),
        }
    }
    out
}

/// Mass of {z : 0 < d(z, S) < eps}.
fn annulus_mass(dmat: &DistanceMatrix, s: &PointSet, mass: &[f64], eps: f64) -> Result<f64> {
    let levels = level_set_masses(dmat, s, mass)?;
    Ok(levels
        .iter()
        .filter(|(v, _)| *v > 0.0 && *v < eps)
        .map(|(_, m)| m)
        .sum())
}

/// Mass of the sphere {z : d(z, S) = eps}, exact comparison.
fn sphere_mass(dmat: &DistanceMatrix, s: &PointSet, mass: &[f64], eps: f64) -> Result<f64> {
    let levels = level_set_masses(dmat, s, mass)?;
    Ok(levels
        .iter()
        .filter(|(v, _)| *v == eps)
        .map(|(_, m)| m)
        .sum())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsilonChoice {
    pub epsilon: f64,
    /// True when even the first positive shell busts the r budget; the
    /// first gap midpoint is returned and the annulus degenerates to
    /// empty, which is harmless.
    pub warning: bool,
}

/// Picks eps as a midpoint of a gap between consecutive attained values
/// of d(., S), so the sphere at eps carries zero mass exactly. Among
/// such gaps it takes the highest whose annulus {0 < d < eps} has mass
/// below r.
///
/// With no positive attained value (S touches everything) eps falls back
/// to half the smallest positive pairwise distance, or 1 when the space
/// is a single point.
pub fn select_epsilon(
    dmat: &DistanceMatrix,
    s: &PointSet,
    mass: &[f64],
    r: f64,
) -> Result<EpsilonChoice> {
    let levels = level_set_masses(dmat, s, mass)?;
    // Infinite values sit beyond every candidate radius and never join
    // an annulus.
    let positives: Vec<(f64, f64)> = levels
        .into_iter()
        .filter(|(v, _)| *v > 0.0 && v.is_finite())
        .collect();
    if positives.is_empty() {
        let epsilon = match dmat.min_positive() {
            Some(d) => 0.5 * d,
            None => 1.0,
        };
        return Ok(EpsilonChoice {
            epsilon,
            warning: false,
        });
    }
    // Gap i lies below positives[i]; its annulus holds shells 0..i.
    let mut cum = 0.0;
    let mut best = 0usize;
    for i in 0..positives.len() {
        if i > 0 {
            cum += positives[i - 1].1;
        }
        if cum < r {
            best = i;
        }
    }
    let lo = if best == 0 {
        0.0
    } else {
        positives[best - 1].0
    };
    let hi = positives[best].0;
    Ok(EpsilonChoice {
        epsilon: 0.5 * (lo + hi),
        warning: positives[0].1 >= r,
    })
}

/// ghat(x) = min over w in K of d_L(x, w); exactly zero on K. Requires
/// every point to reach K, otherwise the space was not quasi-convex.
pub fn distance_to_complement(
    space: &MetricSpace,
    d_l: &DistanceMatrix,
    k: &PointSet,
) -> Result<ScalarField> {
    if k.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = space.n();
    let mut values = Vec::with_capacity(n);
    for x in 0..n {
        let v = set_distance(d_l, PointId(x), k)?;
        if !v.is_finite() {
            let w = k.iter().next().expect("k is nonempty");
            return Err(Error::NotQuasiConvex { u: x, v: w.0 });
        }
        values.push(v);
    }
    ScalarField::new(values)
}

fn minimal_mass_point(space: &MetricSpace) -> PointId {
    let mass = space.masses();
    let mut best = 0usize;
    for i in 1..mass.len() {
        if mass[i] < mass[best] {
            best = i;
        }
    }
    PointId(best)
}

/// Runs the construction and verifies its own contract. A field whose
/// singular set is already empty passes through unchanged.
pub fn perturb(
    space: &MetricSpace,
    f: &ScalarField,
    params: &PerturbParams,
) -> Result<PerturbResult> {
    let n = space.n();
    if f.len() != n {
        return Err(Error::FieldLength { n, got: f.len() });
    }
    let h = params.h;
    let d_l = length_distance(space);
    let c = quasi_convexity_constant(space, &d_l).require_finite()?;

    let s_f = singular_set(space, f, h, params.tau);
    if s_f.members.is_empty() {
        let g = f.clone();
        let verification = build_report(space, f, &g, params, 0.0, &s_f.members, None);
        return Ok(PerturbResult {
            g,
            ghat: ScalarField::constant(n, 0.0),
            k: space.all_points(),
            epsilon: 0.0,
            lambda: 0.0,
            m_sup: 0.0,
            c,
            empty_k_fallback: false,
            epsilon_warning: false,
            verification,
        });
    }

    let chord = space.dist();
    let mass = space.masses();
    let choice = match params.epsilon {
        Some(epsilon) => EpsilonChoice {
            epsilon,
            warning: annulus_mass(chord, &s_f.members, mass, epsilon)? >= params.r,
        },
        None => select_epsilon(chord, &s_f.members, mass, params.r)?,
    };

    let s_eps = eps_neighborhood(chord, &s_f.members, choice.epsilon)?;
    let mut k: PointSet = space.all_points().difference(&s_eps).copied().collect();
    let empty_k_fallback = k.is_empty();
    if empty_k_fallback {
        k.insert(minimal_mass_point(space));
    }

    let ghat = distance_to_complement(space, &d_l, &k)?;
    let m_sup = ghat.values().iter().fold(0.0f64, |acc, v| acc.max(*v));
    let lambda = params.delta * (1.0 - tol::LAMBDA_SHAVE_REL) / (2.0 * m_sup.max(c).max(1.0));
    if lambda <= 2.0 * params.tau {
        return Err(Error::ThresholdTooCoarse {
            lambda,
            tau: params.tau,
        });
    }

    let g = f.add_scaled(lambda, &ghat);
    let verification = build_report(
        space,
        f,
        &g,
        params,
        choice.epsilon,
        &s_f.members,
        Some(&s_eps),
    );

    Ok(PerturbResult {
        g,
        ghat,
        k,
        epsilon: choice.epsilon,
        lambda,
        m_sup,
        c,
        empty_k_fallback,
        epsilon_warning: choice.warning,
        verification,
    })
}

/// Fills the report. `s_members` is S_tau(f); `s_eps` is its
/// eps-neighborhood when already known, recomputed otherwise.
fn build_report(
    space: &MetricSpace,
    f: &ScalarField,
    g: &ScalarField,
    params: &PerturbParams,
    epsilon: f64,
    s_members: &PointSet,
    s_eps: Option<&PointSet>,
) -> VerifyReport {
    let h = params.h;
    let diff = f.sub(g);
    let dinf_distance = dinf_norm(space, &diff, h);
    let norm_ok = dinf_distance <= params.delta;
    let singular_measure_before = space.measure_of(s_members);
    let s_g = singular_set(space, g, h, params.tau);
    let measure_ok = s_g.measure < params.r;

    let (inclusion_ok, atom_free) = if s_members.is_empty() {
        (s_g.members.is_empty(), true)
    } else {
        let owned;
        let s_eps = match s_eps {
            Some(set) => set,
            None => {
                owned = eps_neighborhood(space.dist(), s_members, epsilon)
                    .expect("s_members is nonempty and in range");
                &owned
            }
        };
        let inclusion = s_g
            .members
            .iter()
            .all(|p| s_eps.contains(p) && !s_members.contains(p));
        let sphere = sphere_mass(space.dist(), s_members, space.masses(), epsilon)
            .expect("s_members is nonempty and in range");
        (inclusion, sphere == 0.0)
    };

    VerifyReport {
        dinf_distance,
        norm_ok,
        singular_measure_before,
        singular_measure_after: s_g.measure,
        measure_ok,
        inclusion_ok,
        atom_free,
    }
}

/// Recomputes the whole report from scratch, reusing nothing from the
/// result beyond the radius; on the same inputs it matches the inline
/// report bit for bit.
pub fn verify(
    space: &MetricSpace,
    f: &ScalarField,
    g: &ScalarField,
    params: &PerturbParams,
    result: &PerturbResult,
) -> VerifyReport {
    verify_at(space, f, g, params, result.epsilon)
}

/// [`verify`] for callers that hold the radius but not a full result,
/// such as a report file read back from disk.
pub fn verify_at(
    space: &MetricSpace,
    f: &ScalarField,
    g: &ScalarField,
    params: &PerturbParams,
    epsilon: f64,
) -> VerifyReport {
    let s_f = singular_set(space, f, params.h, params.tau);
    build_report(space, f, g, params, epsilon, &s_f.members, None)
}

/// Largest delta-star such that any u with max pointwise constant below
/// delta-star keeps m(S_tau(f + u)) < r; computed from the sorted
/// distinct values of the pointwise field. Returns 0 when f itself
/// already fails m(S_tau(f)) < r.
pub fn openness_margin(space: &MetricSpace, f: &ScalarField, h: Scale, tau: f64, r: f64) -> f64 {
    let profile = crate::lipschitz::lip_field(space, f, h);
    let groups = group_by_value(&profile.lip, space.masses());
    let singular: f64 = groups
        .iter()
        .filter(|(v, _)| *v <= tau)
        .map(|(_, m)| m)
        .sum();
    if singular >= r {
        return 0.0;
    }
    // t-star: the largest attained value whose strict sublevel set still
    // has mass below r. Subadditivity turns any point singular for f + u
    // into a point with Lip f below (tau + t-star) / 2 < t-star.
    let mut below = 0.0;
    let mut t_star = tau;
    for &(v, m) in &groups {
        if below < r {
            t_star = t_star.max(v);
        } else {
            break;
        }
        below += m;
    }
    0.5 * (t_star - tau)
}

/// One step of the residual sweep.
#[derive(Debug)]
pub struct DemoStep {
    pub delta: f64,
    pub r: f64,
    pub outcome: Result<PerturbResult>,
}

/// Applies [`perturb`] to the original f for every (delta_k, r_k) in the
/// schedule. Per-step failures are recorded and the sweep continues.
/// The r_k must be strictly decreasing and positive.
pub fn residual_demo(
    space: &MetricSpace,
    f: &ScalarField,
    tau: f64,
    h: Scale,
    schedule: &[(f64, f64)],
) -> Result<Vec<DemoStep>> {
    for (i, &(delta, r)) in schedule.iter().enumerate() {
        if !delta.is_finite() || delta <= 0.0 || !r.is_finite() || r <= 0.0 || r > 1.0 {
            return Err(Error::BadSchedule);
        }
        if i > 0 && r >= schedule[i - 1].1 {
            return Err(Error::BadSchedule);
        }
    }
    Ok(schedule
        .iter()
        .map(|&(delta, r)| {
            let outcome =
                PerturbParams::new(delta, r, tau, h).and_then(|params| perturb(space, f, &params));
            DemoStep { delta, r, outcome }
        })
        .collect())
}

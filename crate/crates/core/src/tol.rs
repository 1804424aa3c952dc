//! Numerical tolerances used throughout the crate.
//!
//! Every comparison against one of these constants is an absolute or
//! relative slack on a quantity that is exact in real arithmetic and only
//! blurred by IEEE rounding. Keeping them in one place makes the accuracy
//! contract auditable.

/// Absolute slack for the metric axioms (identity, symmetry, triangle).
pub const METRIC_AXIOM_ABS: f64 = 1e-9;

/// Entrywise agreement required between the two independent shortest-path
/// algorithms. Their sums associate differently, so results may differ by
/// a few ulps, never more.
pub const CROSS_ALGORITHM_ABS: f64 = 1e-12;

/// The quasi-convexity constant of a valid space may undershoot 1 by at
/// most this much (rounding in the ratio d_L / d).
pub const QC_LOWER_SLACK: f64 = 1e-12;

/// Point masses must sum to 1 within this absolute slack.
pub const MASS_SUM_ABS: f64 = 1e-12;

/// Scaling homogeneity of the Lipschitz field, Lip(c f) = |c| Lip(f),
/// is bit-exact for power-of-two c. For any other c each product c*f(x)
/// rounds once, and nearly equal values amplify that rounding relative
/// to their small difference, so the sound numerator slack per quotient
/// is this coefficient times |c| * max|f|, not a fixed relative bound.
pub const HOMOGENEITY_PRODUCT_SLACK: f64 = 4.0 * f64::EPSILON;

/// Absolute slack for the distance-to-complement bounds
/// 1 <= Lip ghat <= C away from the complement set.
pub const DISTANCE_FIELD_BOUND_ABS: f64 = 1e-9;

/// lambda is shaved by this relative amount so that the D-infinity
/// distance of the constructed perturbation stays below delta even after
/// rounding; the exact-arithmetic bound is tight when M = C.
pub const LAMBDA_SHAVE_REL: f64 = 1e-9;

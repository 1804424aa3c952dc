//! Computational metric geometry on finite metric measure spaces.
//!
//! The crate measures how far a scalar field is from being locally flat.
//! Around each point the pointwise Lipschitz constant takes the worst
//! difference quotient inside a chord ball of radius h; points where it
//! stays below a threshold tau form the singular set. The central
//! construction perturbs a field f by lambda times the length-metric
//! distance to a well-chosen complement K,
//!
//! ```text
//! g = f + lambda * d_L(., K)
//! ```
//!
//! which shrinks the singular set's measure below any requested r while
//! moving f by at most delta in the D-infinity norm surrogate. Around
//! it sit the supporting pieces: metric validation, two independent
//! shortest-path routes to d_L, quasi-convexity constants, singular-set
//! bookkeeping, openness margins, deterministic space generators, and
//! file formats with bit-exact float round-trips.
//!
//! Everything is deterministic: parallel passes are required to produce
//! bit-identical results to their sequential counterparts, and all
//! randomness flows from an explicitly seeded generator.

pub mod error;
pub mod gen;
pub mod io;
pub mod length;
pub mod lipschitz;
pub mod matrix;
pub mod perturb;
pub mod rng;
pub mod space;
pub mod tol;

pub use error::{Error, Result};
pub use gen::{
    gen_grid, gen_path, gen_random_geometric, gen_sierpinski, snowflake, GenSpec,
    MAX_SIERPINSKI_LEVEL,
};
pub use length::{
    analyze, length_distance, length_distance_floyd_warshall, quasi_convexity_constant,
    QuasiConvexity,
};
pub use lipschitz::{
    dinf_norm, global_lip, lip_field, pointwise_lip, singular_measure, singular_set, LipProfile,
    ScalarField, Scale, SingularSet,
};
pub use matrix::DistanceMatrix;
pub use perturb::{
    distance_to_complement, eps_neighborhood, level_set_masses, openness_margin, perturb,
    residual_demo, select_epsilon, verify, verify_at, DemoStep, EpsilonChoice, PerturbParams,
    PerturbResult, VerifyReport,
};
pub use rng::SplitMix64;
pub use space::{
    path_length, set_distance, validate_metric, MetricSpace, MetricViolation, PathSeq, PointId,
    PointSet, SpaceReport,
};

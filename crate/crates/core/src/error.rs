//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("distance matrix must hold n*n entries, got {len} for n = {n}")]
    BadMatrixShape { n: usize, len: usize },

    #[error("a space must contain at least one point")]
    EmptySpace,

    #[error("distance entry d[{i}][{j}] = {value} is negative or NaN")]
    BadDistance { i: usize, j: usize, value: f64 },

    #[error("mass vector has {got} entries for {n} points")]
    MassLength { n: usize, got: usize },

    #[error("mass[{index}] = {value} is not finite and nonnegative")]
    BadMass { index: usize, value: f64 },

    #[error("masses sum to {sum}, expected 1 within {tol:e}")]
    MassNotNormalized { sum: f64, tol: f64 },

    #[error("label vector has {got} entries for {n} points")]
    LabelLength { n: usize, got: usize },

    #[error("edge ({u}, {v}) out of range for n = {n}")]
    EdgeOutOfRange { u: usize, v: usize, n: usize },

    #[error("self edge at point {u}")]
    SelfEdge { u: usize },

    #[error("edge ({u}, {v}) has length {len}, edges need finite positive length")]
    BadEdgeLength { u: usize, v: usize, len: f64 },

    #[error("point {p} out of range for n = {n}")]
    PointOutOfRange { p: usize, n: usize },

    #[error("a path must contain at least one point")]
    EmptyPath,

    #[error("path repeats point {p} at consecutive steps {step} and {}", step + 1)]
    RepeatedStep { p: usize, step: usize },

    #[error("path step ({u}, {v}) is not an edge")]
    NonAdjacentStep { u: usize, v: usize },

    #[error("field value[{index}] = {value} is not finite")]
    BadFieldValue { index: usize, value: f64 },

    #[error("field has {got} values for {n} points")]
    FieldLength { n: usize, got: usize },

    #[error("scale must be positive and finite, got {0}")]
    BadScale(f64),

    #[error("point set is empty")]
    EmptySet,

    #[error("space is not quasi-convex: no path joins points {u} and {v}")]
    NotQuasiConvex { u: usize, v: usize },

    #[error("threshold too coarse: need lambda > 2*tau, got lambda = {lambda}, tau = {tau}")]
    ThresholdTooCoarse { lambda: f64, tau: f64 },

    #[error("parameter {name} = {value} out of range")]
    BadParam { name: &'static str, value: f64 },

    #[error("schedule requires strictly decreasing positive r_k and positive delta_k")]
    BadSchedule,

    #[error("generator size {name} = {value} unsupported")]
    BadGenSize { name: &'static str, value: usize },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed space file: {0}")]
    BadSpaceFile(String),

    #[error("line {line}: {msg}")]
    BadCsv { line: usize, msg: String },

    #[error("field ids do not match the space: {0}")]
    IdMismatch(String),
}

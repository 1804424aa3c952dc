//! File formats: space JSON, field CSV, matrix CSV, profile JSON, and
//! the perturbation report JSON.
//!
//! Every float travels as a 17-significant-digit decimal, so writing a
//! value and reading it back is bit-exact. Infinite distances appear as
//! `null` in JSON arrays and as the literal `inf` in CSV. Files are
//! written atomically (temp file in the target directory, then rename).

use std::collections::VecDeque;
use std::io::Write as _;
use std::path::Path;
use std::{fmt::Write as _, fs};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lipschitz::{LipProfile, ScalarField};
use crate::matrix::DistanceMatrix;
use crate::perturb::{PerturbParams, PerturbResult};
use crate::space::{MetricSpace, SpaceReport};

/// 17 significant digits round-trip any finite double exactly.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// JSON formatter that writes every finite f64 with 17 significant
/// digits. Non-finite values never reach it; serde_json emits `null`
/// for those.
struct PreciseFormatter;

impl serde_json::ser::Formatter for PreciseFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes with the full-precision float formatter.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, PreciseFormatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// Writes via a temp file in the target's directory plus a rename, so a
/// crash never leaves a half-written file at `path`.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

// ---------------------------------------------------------------- space

#[derive(Serialize, Deserialize)]
struct PointRec {
    id: usize,
    mass: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct EdgeRec {
    u: usize,
    v: usize,
}

#[derive(Serialize, Deserialize, PartialEq)]
enum MetricKind {
    #[serde(rename = "graph")]
    Graph,
    #[serde(rename = "explicit")]
    Explicit,
}

/// On-disk space schema. `metric: "graph"` means the unit-weight
/// shortest-path metric of the edge set (and must not carry `dist`);
/// `metric: "explicit"` requires the row-major matrix, `null` standing
/// for an infinite entry.
#[derive(Serialize, Deserialize)]
struct SpaceFile {
    points: Vec<PointRec>,
    edges: Vec<EdgeRec>,
    metric: MetricKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dist: Option<Vec<Option<f64>>>,
}

/// Hop-count metric of an undirected unit-weight graph; unreachable
/// pairs come out infinite.
fn hop_metric(n: usize, edges: &[(usize, usize)]) -> DistanceMatrix {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut dist = DistanceMatrix::filled(n, f64::INFINITY);
    let mut hops = vec![usize::MAX; n];
    for s in 0..n {
        hops.fill(usize::MAX);
        hops[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if hops[v] == usize::MAX {
                    hops[v] = hops[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        for (v, &k) in hops.iter().enumerate() {
            if k != usize::MAX {
                dist.set(s, v, k as f64);
            }
        }
    }
    dist
}

pub fn space_from_json(text: &str) -> Result<MetricSpace> {
    let file: SpaceFile = serde_json::from_str(text)?;
    let n = file.points.len();
    if n == 0 {
        return Err(Error::EmptySpace);
    }
    let mut mass = vec![0.0; n];
    let mut labels = vec![None; n];
    let mut seen = vec![false; n];
    for p in &file.points {
        if p.id >= n {
            return Err(Error::BadSpaceFile(format!(
                "point id {} out of range for {} points",
                p.id, n
            )));
        }
        if seen[p.id] {
            return Err(Error::BadSpaceFile(format!("duplicate point id {}", p.id)));
        }
        seen[p.id] = true;
        mass[p.id] = p.mass;
        labels[p.id] = p.label.clone();
    }
    let edges: Vec<(usize, usize)> = file.edges.iter().map(|e| (e.u, e.v)).collect();
    let dist = match file.metric {
        MetricKind::Graph => {
            if file.dist.is_some() {
                return Err(Error::BadSpaceFile(
                    "metric \"graph\" must not carry a dist array".into(),
                ));
            }
            for &(u, v) in &edges {
                if u >= n || v >= n {
                    return Err(Error::EdgeOutOfRange { u, v, n });
                }
            }
            hop_metric(n, &edges)
        }
        MetricKind::Explicit => {
            let raw = file.dist.ok_or_else(|| {
                Error::BadSpaceFile("metric \"explicit\" requires a dist array".into())
            })?;
            let data: Vec<f64> = raw
                .into_iter()
                .map(|v| v.unwrap_or(f64::INFINITY))
                .collect();
            DistanceMatrix::from_row_major(n, data)?
        }
    };
    MetricSpace::new(dist, &edges, mass, Some(labels))
}

/// Always writes the explicit form; a space loaded from a graph-mode
/// file reproduces the same distances, spelled out.
pub fn space_to_json(space: &MetricSpace) -> Result<String> {
    let file = SpaceFile {
        points: (0..space.n())
            .map(|i| PointRec {
                id: i,
                mass: space.masses()[i],
                label: space.labels()[i].clone(),
            })
            .collect(),
        edges: space
            .edges()
            .iter()
            .map(|&(u, v)| EdgeRec { u, v })
            .collect(),
        metric: MetricKind::Explicit,
        dist: Some(
            space
                .dist()
                .data()
                .iter()
                .map(|&v| if v.is_finite() { Some(v) } else { None })
                .collect(),
        ),
    };
    to_json_string(&file)
}

pub fn read_space(path: &Path) -> Result<MetricSpace> {
    space_from_json(&fs::read_to_string(path)?)
}

pub fn write_space(path: &Path, space: &MetricSpace) -> Result<()> {
    write_atomic(path, &space_to_json(space)?)
}

// ---------------------------------------------------------------- field

const FIELD_HEADER: &str = "point_id,value";

pub fn field_to_csv(field: &ScalarField) -> String {
    let mut out = String::from(FIELD_HEADER);
    out.push('\n');
    for (i, v) in field.values().iter().enumerate() {
        let _ = writeln!(out, "{},{}", i, fmt_f64(*v));
    }
    out
}

/// Parses a field for a space of `n` points; the ids must cover [0, n)
/// exactly once, in any order.
pub fn field_from_csv(text: &str, n: usize) -> Result<ScalarField> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, line)) if line.trim_end() == FIELD_HEADER => {}
        Some((i, line)) => {
            return Err(Error::BadCsv {
                line: i + 1,
                msg: format!("expected header '{FIELD_HEADER}', got '{line}'"),
            })
        }
        None => {
            return Err(Error::BadCsv {
                line: 1,
                msg: "empty field file".into(),
            })
        }
    }
    let mut values = vec![0.0; n];
    let mut seen = vec![false; n];
    for (i, line) in lines {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let lineno = i + 1;
        let (id_part, value_part) = line.split_once(',').ok_or_else(|| Error::BadCsv {
            line: lineno,
            msg: "expected 'id,value'".into(),
        })?;
        let id: usize = id_part.trim().parse().map_err(|_| Error::BadCsv {
            line: lineno,
            msg: format!("bad point id '{id_part}'"),
        })?;
        let value: f64 = value_part.trim().parse().map_err(|_| Error::BadCsv {
            line: lineno,
            msg: format!("bad value '{value_part}'"),
        })?;
        if id >= n {
            return Err(Error::IdMismatch(format!(
                "field id {id} out of range for {n} points"
            )));
        }
        if seen[id] {
            return Err(Error::IdMismatch(format!("field id {id} appears twice")));
        }
        seen[id] = true;
        values[id] = value;
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(Error::IdMismatch(format!("field is missing id {missing}")));
    }
    ScalarField::new(values)
}

pub fn read_field(path: &Path, n: usize) -> Result<ScalarField> {
    field_from_csv(&fs::read_to_string(path)?, n)
}

pub fn write_field(path: &Path, field: &ScalarField) -> Result<()> {
    write_atomic(path, &field_to_csv(field))
}

// --------------------------------------------------------------- matrix

/// Header row of point ids, then n rows of n floats, `inf` for
/// unreachable entries.
pub fn matrix_to_csv(m: &DistanceMatrix) -> String {
    let n = m.n();
    let mut out = String::new();
    let header: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for i in 0..n {
        let row: Vec<String> = m.row(i).iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn matrix_from_csv(text: &str) -> Result<DistanceMatrix> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::BadCsv {
        line: 1,
        msg: "empty matrix file".into(),
    })?;
    let ids: Vec<&str> = header.trim_end().split(',').collect();
    let n = ids.len();
    for (k, part) in ids.iter().enumerate() {
        if part.trim().parse::<usize>() != Ok(k) {
            return Err(Error::BadCsv {
                line: 1,
                msg: format!("header column {k} should be the id {k}, got '{part}'"),
            });
        }
    }
    let mut data = Vec::with_capacity(n * n);
    let mut rows = 0usize;
    for (i, line) in lines {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let lineno = i + 1;
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != n {
            return Err(Error::BadCsv {
                line: lineno,
                msg: format!("expected {n} entries, got {}", parts.len()),
            });
        }
        for part in parts {
            let v: f64 = part.trim().parse().map_err(|_| Error::BadCsv {
                line: lineno,
                msg: format!("bad float '{part}'"),
            })?;
            data.push(v);
        }
        rows += 1;
    }
    if rows != n {
        return Err(Error::BadCsv {
            line: rows + 1,
            msg: format!("expected {n} data rows, got {rows}"),
        });
    }
    DistanceMatrix::from_row_major(n, data)
}

pub fn read_matrix(path: &Path) -> Result<DistanceMatrix> {
    matrix_from_csv(&fs::read_to_string(path)?)
}

pub fn write_matrix(path: &Path, m: &DistanceMatrix) -> Result<()> {
    write_atomic(path, &matrix_to_csv(m))
}

// -------------------------------------------------------------- profile

#[derive(Serialize, Deserialize)]
struct ProfileFile {
    h: f64,
    lip: Vec<f64>,
    h_used: Vec<f64>,
    max: f64,
}

pub fn profile_to_json(profile: &LipProfile) -> Result<String> {
    to_json_string(&ProfileFile {
        h: profile.h,
        lip: profile.lip.clone(),
        h_used: profile.h_used.clone(),
        max: profile.max(),
    })
}

/// The stored `max` is derived and ignored on read.
pub fn profile_from_json(text: &str) -> Result<LipProfile> {
    let file: ProfileFile = serde_json::from_str(text)?;
    if file.lip.len() != file.h_used.len() {
        return Err(Error::BadSpaceFile(format!(
            "profile lengths disagree: {} lip vs {} h_used",
            file.lip.len(),
            file.h_used.len()
        )));
    }
    Ok(LipProfile {
        h: file.h,
        lip: file.lip,
        h_used: file.h_used,
    })
}

pub fn write_profile(path: &Path, profile: &LipProfile) -> Result<()> {
    write_atomic(path, &profile_to_json(profile)?)
}

pub fn read_profile(path: &Path) -> Result<LipProfile> {
    profile_from_json(&fs::read_to_string(path)?)
}

// --------------------------------------------------------------- report

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFlags {
    pub norm_ok: bool,
    pub measure_ok: bool,
    pub inclusion_ok: bool,
    pub atom_free: bool,
    pub empty_k_fallback: bool,
    pub epsilon_warning: bool,
}

/// On-disk perturbation report; carries the parameters so a verify run
/// can be reconstructed from (space, f, g, report) alone.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbReportFile {
    pub epsilon: f64,
    pub lambda: f64,
    #[serde(rename = "M")]
    pub m_sup: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub tau: f64,
    pub h: f64,
    pub delta: f64,
    pub r: f64,
    pub dinf_distance: f64,
    pub singular_measure_before: f64,
    pub singular_measure_after: f64,
    pub flags: ReportFlags,
}

impl PerturbReportFile {
    pub fn new(params: &PerturbParams, result: &PerturbResult) -> Self {
        let v = &result.verification;
        Self {
            epsilon: result.epsilon,
            lambda: result.lambda,
            m_sup: result.m_sup,
            c: result.c,
            tau: params.tau(),
            h: params.h().get(),
            delta: params.delta(),
            r: params.r(),
            dinf_distance: v.dinf_distance,
            singular_measure_before: v.singular_measure_before,
            singular_measure_after: v.singular_measure_after,
            flags: ReportFlags {
                norm_ok: v.norm_ok,
                measure_ok: v.measure_ok,
                inclusion_ok: v.inclusion_ok,
                atom_free: v.atom_free,
                empty_k_fallback: result.empty_k_fallback,
                epsilon_warning: result.epsilon_warning,
            },
        }
    }

    /// The four contract flags; the two informational flags do not count
    /// against success.
    pub fn contract_ok(&self) -> bool {
        let f = &self.flags;
        f.norm_ok && f.measure_ok && f.inclusion_ok && f.atom_free
    }
}

pub fn report_to_json(report: &PerturbReportFile) -> Result<String> {
    to_json_string(report)
}

pub fn report_from_json(text: &str) -> Result<PerturbReportFile> {
    Ok(serde_json::from_str(text)?)
}

pub fn write_report(path: &Path, report: &PerturbReportFile) -> Result<()> {
    write_atomic(path, &report_to_json(report)?)
}

pub fn read_report(path: &Path) -> Result<PerturbReportFile> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

// --------------------------------------------------------- space report

/// Serializable diagnostics. `c` is null both when not computed and when
/// infinite; `connected` disambiguates.
#[derive(Serialize, Deserialize)]
pub struct SpaceReportFile {
    pub metric_ok: bool,
    pub connected: bool,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    pub worst_pair: Option<(usize, usize)>,
    pub violation_count: usize,
    pub violations: Vec<String>,
}

impl From<&SpaceReport> for SpaceReportFile {
    fn from(r: &SpaceReport) -> Self {
        Self {
            metric_ok: r.metric_ok,
            connected: r.connected,
            c: r.c.filter(|v| v.is_finite()),
            worst_pair: r.worst_pair.map(|(a, b)| (a.0, b.0)),
            violation_count: r.violation_count,
            violations: r.violations.iter().map(|v| v.to_string()).collect(),
        }
    }
}

pub fn space_report_to_json(report: &SpaceReport) -> Result<String> {
    to_json_string(&SpaceReportFile::from(report))
}

pub fn write_space_report(path: &Path, report: &SpaceReport) -> Result<()> {
    write_atomic(path, &space_report_to_json(report)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_grid, gen_path};
    use crate::lipschitz::{lip_field, Scale};
    use crate::perturb::perturb;

    #[test]
    fn floats_round_trip_bit_exactly() {
        let cases = [
            0.1,
            1.0 / 3.0,
            2f64.sqrt(),
            1e-300,
            5e-324,
            -0.0,
            0.0,
            12345.678901234567,
            f64::MAX,
            f64::MIN_POSITIVE,
        ];
        for v in cases {
            let s = fmt_f64(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{v} via {s}");
        }
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        assert_eq!(fmt_f64(f64::NEG_INFINITY), "-inf");
        assert_eq!("inf".parse::<f64>().unwrap(), f64::INFINITY);
    }

    #[test]
    fn space_json_round_trips() {
        let mut space = gen_grid(2, 3).unwrap();
        // Perturb the masses away from uniform to exercise precision.
        let dist = space.dist().clone();
        let edges = space.edges().to_vec();
        let mut mass = vec![0.1, 0.2, 0.3, 0.15, 0.15, 0.1];
        mass[0] += 1.0 - mass.iter().sum::<f64>();
        let labels = vec![
            Some("a".to_string()),
            None,
            None,
            None,
            None,
            Some("z".to_string()),
        ];
        space = MetricSpace::new(dist, &edges, mass, Some(labels)).unwrap();

        let text = space_to_json(&space).unwrap();
        let back = space_from_json(&text).unwrap();
        assert_eq!(back.n(), space.n());
        assert_eq!(back.dist().data(), space.dist().data());
        assert_eq!(back.masses(), space.masses());
        assert_eq!(back.labels(), space.labels());
        assert_eq!(back.edges(), space.edges());
    }

    #[test]
    fn graph_mode_derives_the_hop_metric() {
        let text = r#"{
            "points": [{"id":0,"mass":0.25},{"id":1,"mass":0.25},
                       {"id":2,"mass":0.25},{"id":3,"mass":0.25}],
            "edges": [{"u":0,"v":1},{"u":1,"v":2},{"u":2,"v":3}],
            "metric": "graph"
        }"#;
        let space = space_from_json(text).unwrap();
        assert_eq!(space.d(0, 3), 3.0);
        assert_eq!(space.d(1, 3), 2.0);
    }

    #[test]
    fn graph_mode_marks_unreachable_pairs_infinite() {
        let text = r#"{
            "points": [{"id":0,"mass":0.5},{"id":1,"mass":0.5}],
            "edges": [],
            "metric": "graph"
        }"#;
        let space = space_from_json(text).unwrap();
        assert_eq!(space.d(0, 1), f64::INFINITY);
        assert!(!space.is_connected());
    }

    #[test]
    fn graph_mode_rejects_a_dist_array() {
        let text = r#"{
            "points": [{"id":0,"mass":1.0}],
            "edges": [],
            "metric": "graph",
            "dist": [0.0]
        }"#;
        assert!(matches!(space_from_json(text), Err(Error::BadSpaceFile(_))));
    }

    #[test]
    fn explicit_mode_requires_a_dist_array() {
        let text = r#"{"points": [{"id":0,"mass":1.0}], "edges": [], "metric": "explicit"}"#;
        assert!(matches!(space_from_json(text), Err(Error::BadSpaceFile(_))));
    }

    #[test]
    fn duplicate_and_out_of_range_ids_are_rejected() {
        let dup = r#"{
            "points": [{"id":0,"mass":0.5},{"id":0,"mass":0.5}],
            "edges": [], "metric": "graph"
        }"#;
        assert!(matches!(space_from_json(dup), Err(Error::BadSpaceFile(_))));
        let oor = r#"{
            "points": [{"id":0,"mass":0.5},{"id":7,"mass":0.5}],
            "edges": [], "metric": "graph"
        }"#;
        assert!(matches!(space_from_json(oor), Err(Error::BadSpaceFile(_))));
    }

    #[test]
    fn null_dist_entries_mean_infinity_and_survive_a_round_trip() {
        let text = r#"{
            "points": [{"id":0,"mass":0.5},{"id":1,"mass":0.5}],
            "edges": [],
            "metric": "explicit",
            "dist": [0.0, null, null, 0.0]
        }"#;
        let space = space_from_json(text).unwrap();
        assert_eq!(space.d(0, 1), f64::INFINITY);
        let written = space_to_json(&space).unwrap();
        assert!(written.contains("null"));
        let back = space_from_json(&written).unwrap();
        assert_eq!(back.dist().data(), space.dist().data());
    }

    #[test]
    fn field_csv_round_trips() {
        let f = ScalarField::new(vec![0.1, -2.5, 1.0 / 3.0]).unwrap();
        let text = field_to_csv(&f);
        assert!(text.starts_with("point_id,value\n"));
        let back = field_from_csv(&text, 3).unwrap();
        assert_eq!(back.values(), f.values());
    }

    #[test]
    fn field_csv_accepts_shuffled_rows() {
        let text = "point_id,value\n2,2.0\n0,0.5\n1,1.5\n";
        let f = field_from_csv(text, 3).unwrap();
        assert_eq!(f.values(), &[0.5, 1.5, 2.0]);
    }

    #[test]
    fn field_csv_coverage_errors() {
        assert!(matches!(
            field_from_csv("point_id,value\n0,1.0\n0,2.0\n", 2),
            Err(Error::IdMismatch(_))
        ));
        assert!(matches!(
            field_from_csv("point_id,value\n0,1.0\n", 2),
            Err(Error::IdMismatch(_))
        ));
        assert!(matches!(
            field_from_csv("point_id,value\n5,1.0\n", 2),
            Err(Error::IdMismatch(_))
        ));
        assert!(matches!(
            field_from_csv("id,val\n0,1.0\n", 1),
            Err(Error::BadCsv { line: 1, .. })
        ));
        assert!(matches!(
            field_from_csv("point_id,value\n0,abc\n", 1),
            Err(Error::BadCsv { line: 2, .. })
        ));
    }

    #[test]
    fn matrix_csv_round_trips_with_inf() {
        let m = DistanceMatrix::from_row_major(2, vec![0.0, f64::INFINITY, f64::INFINITY, 0.0])
            .unwrap();
        let text = matrix_to_csv(&m);
        assert!(text.starts_with("0,1\n"));
        assert!(text.contains("inf"));
        let back = matrix_from_csv(&text).unwrap();
        assert_eq!(back.data(), m.data());
    }

    #[test]
    fn matrix_csv_shape_errors() {
        assert!(matches!(
            matrix_from_csv("0,1\n0.0,1.0\n"),
            Err(Error::BadCsv { .. })
        ));
        assert!(matches!(
            matrix_from_csv("0,2\n0.0,1.0\n1.0,0.0\n"),
            Err(Error::BadCsv { line: 1, .. })
        ));
        assert!(matches!(
            matrix_from_csv("0,1\n0.0\n1.0,0.0\n"),
            Err(Error::BadCsv { line: 2, .. })
        ));
    }

    #[test]
    fn profile_json_round_trips() {
        let space = gen_path(4).unwrap();
        let f = ScalarField::new(vec![0.0, 1.0, 4.0, 9.0]).unwrap();
        let profile = lip_field(&space, &f, Scale::new(1.0).unwrap());
        let text = profile_to_json(&profile).unwrap();
        assert!(text.contains("\"max\""));
        let back = profile_from_json(&text).unwrap();
        assert_eq!(back, profile);
    }

    #[test]
    fn report_json_round_trips_with_renamed_fields() {
        let space = gen_path(6).unwrap();
        let f = ScalarField::new(vec![0.0, 0.0, 0.0, 1.0, 2.0, 3.0]).unwrap();
        let params = PerturbParams::new(1.0, 0.4, 0.0, Scale::new(1.0).unwrap()).unwrap();
        let result = perturb(&space, &f, &params).unwrap();
        let report = PerturbReportFile::new(&params, &result);
        let text = report_to_json(&report).unwrap();
        assert!(text.contains("\"M\":"));
        assert!(text.contains("\"C\":"));
        assert!(text.contains("\"flags\":"));
        let back = report_from_json(&text).unwrap();
        assert_eq!(back, report);
        assert!(back.contract_ok());
    }

    #[test]
    fn atomic_write_replaces_existing_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.txt");
        write_atomic(&path, "first").unwrap();
        write_atomic(&path, "second").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "second");
    }

    #[test]
    fn space_report_serializes_infinite_c_as_null() {
        let dist = DistanceMatrix::from_row_major(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let space = MetricSpace::with_uniform_mass(dist, &[]).unwrap();
        let report = crate::length::analyze(&space);
        let text = space_report_to_json(&report).unwrap();
        assert!(text.contains("\"C\":null"));
        assert!(text.contains("\"connected\":false"));
    }
}

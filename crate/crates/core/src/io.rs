//! Panel files and CSV reports.
//!
//! Panels are JSON:
//!
//! ```json
//! { "n": 3, "experts": [ { "id": "e1", "matrix": [[1, 2, 4], [0.5, 1, 2], [0.25, 0.5, 1]] } ] }
//! ```
//!
//! Full matrices are accepted when reciprocity holds within
//! [`LOAD_RECIPROCITY_TOL`] (relative), then rebuilt from the upper triangle.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::matrix::{ExpertPanel, PcMatrix};
use crate::montecarlo::{format_sig, Experiment1Record, Experiment2Record, Report, Scenario};

/// Rounded printed data (three or four decimals) stays well inside this.
pub const LOAD_RECIPROCITY_TOL: f64 = 1e-2;

/// Failure to read, parse or validate an input file.
#[derive(Debug)]
pub enum FileError {
    Io { path: PathBuf, source: std::io::Error },
    /// Malformed JSON or wrong field types; the message carries line and column.
    Parse { path: PathBuf, message: String },
    /// Well-formed file whose content breaks a domain invariant.
    Invalid { path: PathBuf, source: Error },
}

impl FileError {
    /// Process exit code: 2 parse, 3 domain invariant, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            FileError::Parse { .. } => 2,
            FileError::Invalid { .. } => 3,
            FileError::Io { .. } => 4,
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        FileError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl fmt::Display for FileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FileError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            FileError::Parse { path, message } => write!(f, "{}: parse error: {message}", path.display()),
            FileError::Invalid { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for FileError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            FileError::Io { source, .. } => Some(source),
            FileError::Invalid { source, .. } => Some(source),
            FileError::Parse { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpertEntry {
    pub id: String,
    pub matrix: Vec<Vec<f64>>,
}

/// On-disk form of an [`ExpertPanel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PanelFile {
    pub n: usize,
    pub experts: Vec<ExpertEntry>,
}

/// A validated panel together with the expert ids from its file.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedPanel {
    pub ids: Vec<String>,
    pub panel: ExpertPanel,
}

fn tag_expert(id: &str, e: Error) -> Error {
    match e {
        Error::Domain(m) => Error::Domain(format!("expert '{id}': {m}")),
        Error::Shape(m) => Error::Shape(format!("expert '{id}': {m}")),
        other => other,
    }
}

impl PanelFile {
    pub fn from_panel(panel: &ExpertPanel, ids: Option<&[String]>) -> Self {
        let experts = panel
            .iter()
            .enumerate()
            .map(|(q, c)| ExpertEntry {
                id: ids
                    .and_then(|ids| ids.get(q).cloned())
                    .unwrap_or_else(|| format!("e{}", q + 1)),
                matrix: c.rows(),
            })
            .collect();
        Self { n: panel.n(), experts }
    }

    /// Validates every matrix, naming the offending expert on failure.
    pub fn into_panel(self) -> Result<NamedPanel, Error> {
        if self.experts.is_empty() {
            return Err(Error::Shape("panel file lists no experts".into()));
        }
        let mut ids = Vec::with_capacity(self.experts.len());
        let mut matrices = Vec::with_capacity(self.experts.len());
        for e in self.experts {
            if e.matrix.len() != self.n || e.matrix.iter().any(|r| r.len() != self.n) {
                return Err(Error::Shape(format!(
                    "expert '{}': matrix is not {n}x{n}",
                    e.id,
                    n = self.n
                )));
            }
            let m = PcMatrix::from_rows_lenient(&e.matrix, LOAD_RECIPROCITY_TOL).map_err(|err| tag_expert(&e.id, err))?;
            ids.push(e.id);
            matrices.push(m);
        }
        Ok(NamedPanel {
            ids,
            panel: ExpertPanel::new(matrices)?,
        })
    }
}

pub fn parse_panel(text: &str, path: &Path) -> Result<NamedPanel, FileError> {
    let file: PanelFile = serde_json::from_str(text).map_err(|e| FileError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    file.into_panel().map_err(|source| FileError::Invalid {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_panel(path: &Path) -> Result<NamedPanel, FileError> {
    let text = fs::read_to_string(path).map_err(|e| FileError::io(path, e))?;
    parse_panel(&text, path)
}

pub fn save_panel(path: &Path, panel: &ExpertPanel, ids: Option<&[String]>) -> Result<(), FileError> {
    let json = serde_json::to_string_pretty(&PanelFile::from_panel(panel, ids)).expect("panel serializes");
    fs::write(path, json + "\n").map_err(|e| FileError::io(path, e))
}

fn sig(x: f64) -> String {
    format_sig(x, 6)
}

fn csv_err(e: csv::Error) -> std::io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => std::io::Error::other(format!("{other:?}")),
    }
}

/// Header `bucket_ci,method,metric,value,count`, rows in report order.
pub fn write_summary<W: Write>(report: &Report, out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["bucket_ci", "method", "metric", "value", "count"]).map_err(csv_err)?;
    for r in &report.rows {
        w.write_record([r.bucket.label(), r.method.clone(), r.metric.clone(), sig(r.value), r.count.to_string()])
            .map_err(csv_err)?;
    }
    w.flush()
}

/// One row per scenario and defense method.
pub fn write_experiment1_records<W: Write>(records: &[Experiment1Record], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "scenario_id",
        "n",
        "alpha",
        "mean_ci",
        "attack_succeeded",
        "vacuous",
        "bribes_used",
        "method",
        "restoration",
        "manhattan_mean",
    ])
    .map_err(csv_err)?;
    for r in records {
        for d in &r.defenses {
            w.write_record([
                r.scenario_id.to_string(),
                r.n.to_string(),
                sig(r.alpha),
                sig(r.mean_ci),
                r.attack_succeeded.to_string(),
                r.vacuous.to_string(),
                r.bribes_used.to_string(),
                d.method.to_string(),
                d.restoration.to_string(),
                sig(d.distance),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()
}

/// One row per scenario and robust method.
pub fn write_experiment2_records<W: Write>(records: &[Experiment2Record], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["scenario_id", "n", "alpha", "mean_ci", "method", "manhattan_mean", "kendall"])
        .map_err(csv_err)?;
    for r in records {
        for d in &r.disturbances {
            w.write_record([
                r.scenario_id.to_string(),
                r.n.to_string(),
                sig(r.alpha),
                sig(r.mean_ci),
                d.method.to_string(),
                sig(d.distance),
                d.kendall.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()
}

#[derive(Serialize)]
struct ScenarioLine<'a> {
    id: usize,
    n: usize,
    alpha: f64,
    mean_ci: f64,
    base_vector: &'a [f64],
    matrices: Vec<Vec<Vec<f64>>>,
}

/// JSON lines, one scenario per line.
pub fn write_corpus<W: Write>(scenarios: &[Scenario], mut out: W) -> std::io::Result<()> {
    for s in scenarios {
        let line = ScenarioLine {
            id: s.id,
            n: s.panel.n(),
            alpha: s.alpha,
            mean_ci: s.mean_ci,
            base_vector: s.base_vector.as_slice(),
            matrices: s.panel.iter().map(PcMatrix::rows).collect(),
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

//! Python bindings. The extension module is named `robust_ahp`.

use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use robust_ahp::aggregate::{aggregate_panel, Aggregation};
use robust_ahp::attack::run_attack;
use robust_ahp::config::Config;
use robust_ahp::derive::{evm_priorities, gmm_priorities, EvmOptions};
use robust_ahp::inconsistency::{koczkodaj_k, saaty_ci};
use robust_ahp::io::{self as rio, FileError};
use robust_ahp::metrics;
use robust_ahp::montecarlo::{self, experiment1_headline, experiment2_headline};
use robust_ahp::robust::{Method, PanelAnalysis};
use robust_ahp::{Error, ExpertPanel, ExpertWeights, PcMatrix, PriorityVector};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Convergence { .. } | Error::EmptyReport => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn file_err(e: FileError) -> PyErr {
    match e {
        FileError::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn config(json: Option<&str>) -> PyResult<Config> {
    let cfg = match json {
        Some(text) => Config::from_json(text).map_err(|e| PyValueError::new_err(format!("config: {e}")))?,
        None => Config::default(),
    };
    cfg.validate().map_err(py_err)?;
    Ok(cfg)
}

/// A reciprocal pairwise-comparison matrix.
#[pyclass(name = "PcMatrix", module = "robust_ahp", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPcMatrix(PcMatrix);

#[pymethods]
impl PyPcMatrix {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        PcMatrix::from_rows(&rows).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn from_upper(n: usize, upper: Vec<f64>) -> PyResult<Self> {
        PcMatrix::from_upper_triangle(n, &upper).map(Self).map_err(py_err)
    }

    /// The consistent matrix `w_i / w_j`.
    #[staticmethod]
    fn consistent(weights: Vec<f64>) -> PyResult<Self> {
        let w = PriorityVector::from_unnormalized(weights).map_err(py_err)?;
        PcMatrix::consistent(&w).map(Self).map_err(py_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        self.0.rows()
    }

    fn gmm(&self) -> Vec<f64> {
        gmm_priorities(&self.0).as_slice().to_vec()
    }

    /// Principal eigenvector and eigenvalue.
    fn evm(&self) -> PyResult<(Vec<f64>, f64)> {
        let e = evm_priorities(&self.0, EvmOptions::default()).map_err(py_err)?;
        Ok((e.priorities.as_slice().to_vec(), e.lambda_max))
    }

    fn ci(&self) -> PyResult<f64> {
        saaty_ci(&self.0).map_err(py_err)
    }

    fn koczkodaj(&self) -> PyResult<f64> {
        koczkodaj_k(&self.0).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("PcMatrix({:?})", self.0.rows())
    }
}

#[pyclass(name = "Aggregation", module = "robust_ahp", get_all, frozen)]
struct PyAggregation {
    /// Normalized group priorities.
    priorities: Vec<f64>,
    /// Weighted geometric mean before renormalization.
    raw_scores: Vec<f64>,
    /// Expert weights used.
    weights: Vec<f64>,
    ranking: Vec<usize>,
    winner: usize,
}

impl PyAggregation {
    fn new(agg: &Aggregation, weights: &ExpertWeights) -> Self {
        Self {
            priorities: agg.priorities.as_slice().to_vec(),
            raw_scores: agg.raw_scores.clone(),
            weights: weights.as_slice().to_vec(),
            ranking: agg.priorities.order(),
            winner: agg.priorities.winner(),
        }
    }
}

#[pymethods]
impl PyAggregation {
    fn __repr__(&self) -> String {
        format!("Aggregation(raw_scores={:?}, winner={})", self.raw_scores, self.winner)
    }
}

#[pyclass(name = "AttackResult", module = "robust_ahp", get_all, frozen)]
struct PyAttackResult {
    winner: usize,
    runner_up: usize,
    bribed: Vec<usize>,
    succeeded: bool,
    vacuous: bool,
    honest: Vec<f64>,
    manipulated: Vec<f64>,
    manipulated_panel: Py<PyPanel>,
}

/// Expert panel: one matrix per expert, all of the same size.
#[pyclass(name = "Panel", module = "robust_ahp", frozen)]
struct PyPanel {
    panel: ExpertPanel,
    ids: Vec<String>,
}

impl PyPanel {
    fn wrap(panel: ExpertPanel, ids: Option<Vec<String>>) -> Self {
        let ids = ids.unwrap_or_else(|| (1..=panel.k()).map(|q| format!("e{q}")).collect());
        Self { panel, ids }
    }
}

#[pymethods]
impl PyPanel {
    /// Accepts `PcMatrix` objects or nested lists of rows.
    #[new]
    #[pyo3(signature = (matrices, ids = None))]
    fn new(matrices: Vec<Bound<'_, PyAny>>, ids: Option<Vec<String>>) -> PyResult<Self> {
        let ms = matrices
            .iter()
            .map(|m| match m.cast::<PyPcMatrix>() {
                Ok(pc) => Ok(pc.get().0.clone()),
                Err(_) => PcMatrix::from_rows(&m.extract::<Vec<Vec<f64>>>()?).map_err(py_err),
            })
            .collect::<PyResult<Vec<_>>>()?;
        let panel = ExpertPanel::new(ms).map_err(py_err)?;
        if ids.as_ref().is_some_and(|ids| ids.len() != panel.k()) {
            return Err(PyValueError::new_err("one id per expert is required"));
        }
        Ok(Self::wrap(panel, ids))
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let named = rio::load_panel(&path).map_err(file_err)?;
        Ok(Self::wrap(named.panel, Some(named.ids)))
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        rio::save_panel(&path, &self.panel, Some(&self.ids)).map_err(file_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.panel.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.panel.k()
    }

    #[getter]
    fn ids(&self) -> Vec<String> {
        self.ids.clone()
    }

    fn matrix(&self, q: usize) -> PyResult<PyPcMatrix> {
        if q >= self.panel.k() {
            return Err(PyValueError::new_err(format!("expert {q} out of range")));
        }
        Ok(PyPcMatrix(self.panel.get(q).clone()))
    }

    fn priorities(&self) -> Vec<Vec<f64>> {
        self.panel.iter().map(|c| gmm_priorities(c).as_slice().to_vec()).collect()
    }

    fn ci(&self) -> PyResult<Vec<f64>> {
        self.panel.iter().map(|c| saaty_ci(c).map_err(py_err)).collect()
    }

    /// Weighted AIP; equal weights when `weights` is omitted.
    #[pyo3(signature = (weights = None))]
    fn aggregate(&self, weights: Option<Vec<f64>>) -> PyResult<PyAggregation> {
        let r = match weights {
            Some(w) => ExpertWeights::from_unnormalized(w).map_err(py_err)?,
            None => ExpertWeights::uniform(self.panel.k()),
        };
        let agg = aggregate_panel(&self.panel, &r).map_err(py_err)?;
        Ok(PyAggregation::new(&agg, &r))
    }

    /// `method` is one of "classic", "apdd", "aid", "mx". `config` is the JSON
    /// text of a configuration file.
    #[pyo3(signature = (method = "apdd", config = None))]
    fn robust(&self, method: &str, config: Option<&str>) -> PyResult<PyAggregation> {
        let method: Method = method.parse().map_err(py_err)?;
        let cfg = self::config(config)?;
        let out = PanelAnalysis::new(&self.panel)
            .aggregate(method, &cfg.robust().map_err(py_err)?)
            .map_err(py_err)?;
        Ok(PyAggregation::new(&out.aggregation, &out.weights))
    }

    #[pyo3(signature = (config = None))]
    fn attack(&self, py: Python<'_>, config: Option<&str>) -> PyResult<PyAttackResult> {
        let cfg = self::config(config)?;
        let out = run_attack(&self.panel, &cfg.attack()).map_err(py_err)?;
        let forged = Py::new(py, Self::wrap(out.manipulated_panel, Some(self.ids.clone())))?;
        Ok(PyAttackResult {
            winner: out.winner,
            runner_up: out.runner_up,
            bribed: out.bribed,
            succeeded: out.succeeded,
            vacuous: out.vacuous,
            honest: out.honest.raw_scores,
            manipulated: out.manipulated.raw_scores,
            manipulated_panel: forged,
        })
    }

    fn __len__(&self) -> usize {
        self.panel.k()
    }

    fn __repr__(&self) -> String {
        format!("Panel(k={}, n={})", self.panel.k(), self.panel.n())
    }
}

#[pyfunction]
fn manhattan(u: Vec<f64>, v: Vec<f64>) -> PyResult<f64> {
    metrics::manhattan(&u, &v).map_err(py_err)
}

#[pyfunction]
fn manhattan_mean(u: Vec<f64>, v: Vec<f64>) -> PyResult<f64> {
    metrics::manhattan_mean(&u, &v).map_err(py_err)
}

#[pyfunction]
fn euclidean(u: Vec<f64>, v: Vec<f64>) -> PyResult<f64> {
    metrics::euclidean(&u, &v).map_err(py_err)
}

#[pyfunction]
fn chebyshev(u: Vec<f64>, v: Vec<f64>) -> PyResult<f64> {
    metrics::chebyshev(&u, &v).map_err(py_err)
}

#[pyfunction]
fn kendall_distance(u: Vec<f64>, v: Vec<f64>) -> PyResult<usize> {
    metrics::kendall_tau_distance(&u, &v).map_err(py_err)
}

/// Runs experiment 1 or 2 and returns the headline as text. The GIL is
/// released while the scenarios are evaluated.
#[pyfunction]
#[pyo3(signature = (which, config = None, seed = None))]
fn run_experiment(py: Python<'_>, which: u8, config: Option<&str>, seed: Option<u64>) -> PyResult<String> {
    let mut cfg = self::config(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let ecfg = cfg.experiment().map_err(py_err)?;
    let corpus = cfg.corpus();
    py.detach(move || {
        let scenarios = montecarlo::generate_corpus(&corpus)?;
        match which {
            1 => Ok(experiment1_headline(&montecarlo::experiment1(&scenarios, &ecfg, cfg.workers)?)?.to_string()),
            2 => Ok(experiment2_headline(&montecarlo::experiment2(&scenarios, &ecfg, cfg.workers)?)?.to_string()),
            _ => Err(Error::Domain(format!("unknown experiment {which}"))),
        }
    })
    .map_err(py_err)
}

#[pymodule]
#[pyo3(name = "robust_ahp")]
fn robust_ahp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPcMatrix>()?;
    m.add_class::<PyPanel>()?;
    m.add_class::<PyAggregation>()?;
    m.add_class::<PyAttackResult>()?;
    m.add_function(wrap_pyfunction!(manhattan, m)?)?;
    m.add_function(wrap_pyfunction!(manhattan_mean, m)?)?;
    m.add_function(wrap_pyfunction!(euclidean, m)?)?;
    m.add_function(wrap_pyfunction!(chebyshev, m)?)?;
    m.add_function(wrap_pyfunction!(kendall_distance, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}

//! Classical group aggregation by weighted geometric means.
//!
//! AIJ aggregates the matrices entrywise; AIP aggregates the experts'
//! priority vectors. Under GMM both give the same ranking.

use crate::derive::gmm_priorities;
use crate::error::{Error, Result};
use crate::matrix::{ExpertPanel, ExpertWeights, PcMatrix, PriorityVector};

fn check_k(k: usize, r: &ExpertWeights) -> Result<()> {
    if k != r.len() {
        return Err(Error::shape(format!(
            "{k} experts but {} expert weights",
            r.len()
        )));
    }
    Ok(())
}

/// Aggregation of individual judgments: entry `(i, j)` is
/// `prod_q c_ijq^{r_q}`.
pub fn aij(panel: &ExpertPanel, r: &ExpertWeights) -> Result<PcMatrix> {
    check_k(panel.k(), r)?;
    PcMatrix::from_upper_fn(panel.n(), |i, j| {
        panel
            .iter()
            .zip(r.as_slice())
            .map(|(c, rq)| rq * c.get(i, j).ln())
            .sum::<f64>()
            .exp()
    })
}

/// Per-alternative weighted geometric mean `prod_q w_q(a_i)^{r_q}`, without
/// renormalization.
///
/// These raw group scores rank alternatives exactly like [`aip`]; their sum is
/// below one whenever the experts disagree.
pub fn weighted_geometric_mean<V: AsRef<[f64]>>(vectors: &[V], r: &ExpertWeights) -> Result<Vec<f64>> {
    check_k(vectors.len(), r)?;
    let n = vectors
        .first()
        .map(|v| v.as_ref().len())
        .ok_or_else(|| Error::shape("no priority vectors to aggregate"))?;
    if let Some(q) = vectors.iter().position(|v| v.as_ref().len() != n) {
        return Err(Error::shape(format!(
            "priority vector {} has length {}, expected {n}",
            q + 1,
            vectors[q].as_ref().len()
        )));
    }
    let mut log_scores = vec![0.0; n];
    for (v, rq) in vectors.iter().zip(r.as_slice()) {
        for (acc, w) in log_scores.iter_mut().zip(v.as_ref()) {
            *acc += rq * w.ln();
        }
    }
    Ok(log_scores.into_iter().map(f64::exp).collect())
}

/// Aggregation of individual priorities: the normalized weighted geometric mean.
pub fn aip<V: AsRef<[f64]>>(vectors: &[V], r: &ExpertWeights) -> Result<PriorityVector> {
    PriorityVector::from_unnormalized(weighted_geometric_mean(vectors, r)?)
}

/// GMM priorities of every expert, in panel order.
pub fn individual_priorities(panel: &ExpertPanel) -> Vec<PriorityVector> {
    panel.iter().map(gmm_priorities).collect()
}

/// Result of a group aggregation.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregation {
    /// Normalized group priorities.
    pub priorities: PriorityVector,
    /// The same scores before renormalization (see [`weighted_geometric_mean`]).
    pub raw_scores: Vec<f64>,
}

impl Aggregation {
    pub fn from_vectors<V: AsRef<[f64]>>(vectors: &[V], r: &ExpertWeights) -> Result<Self> {
        let raw_scores = weighted_geometric_mean(vectors, r)?;
        let priorities = PriorityVector::from_unnormalized(raw_scores.clone())?;
        Ok(Self { priorities, raw_scores })
    }
}

/// GMM per expert, then AIP with weights `r`.
pub fn aggregate_panel(panel: &ExpertPanel, r: &ExpertWeights) -> Result<Aggregation> {
    Aggregation::from_vectors(&individual_priorities(panel), r)
}

/// [`aggregate_panel`] with equal weights `1/k`.
pub fn aggregate_panel_equal(panel: &ExpertPanel) -> Result<Aggregation> {
    aggregate_panel(panel, &ExpertWeights::uniform(panel.k()))
}

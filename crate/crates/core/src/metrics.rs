//! Distances between ranking vectors.
//!
//! All functions take plain slices so they apply equally to normalized
//! priority vectors, raw scores and ordinal positions.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_lengths(u: &[f64], v: &[f64]) -> Result<()> {
    if u.len() != v.len() {
        return Err(Error::shape(format!(
            "vectors have different lengths ({} vs {})",
            u.len(),
            v.len()
        )));
    }
    Ok(())
}

/// `sum_i |u_i - v_i|`.
pub fn manhattan(u: &[f64], v: &[f64]) -> Result<f64> {
    check_lengths(u, v)?;
    Ok(u.iter().zip(v).map(|(a, b)| (a - b).abs()).sum())
}

/// Manhattan distance divided by the vector length.
pub fn manhattan_mean(u: &[f64], v: &[f64]) -> Result<f64> {
    Ok(manhattan(u, v)? / u.len().max(1) as f64)
}

pub fn euclidean(u: &[f64], v: &[f64]) -> Result<f64> {
    check_lengths(u, v)?;
    Ok(u.iter().zip(v).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
}

/// `max_i |u_i - v_i|`.
pub fn chebyshev(u: &[f64], v: &[f64]) -> Result<f64> {
    check_lengths(u, v)?;
    Ok(u.iter().zip(v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// Number of pairs `i < j` ordered differently by `u` and `v`.
///
/// A pair tied in one vector but strictly ordered in the other counts as a
/// disagreement.
pub fn kendall_tau_distance(u: &[f64], v: &[f64]) -> Result<usize> {
    check_lengths(u, v)?;
    let n = u.len();
    let mut count = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            if sign(u[i], u[j]) != sign(v[i], v[j]) {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Kendall distance scaled by the maximal `n(n-1)/2` swaps, in `[0, 1]`.
pub fn kendall_tau_normalized(u: &[f64], v: &[f64]) -> Result<f64> {
    let d = kendall_tau_distance(u, v)?;
    let n = u.len();
    if n < 2 {
        return Ok(0.0);
    }
    Ok(2.0 * d as f64 / (n * (n - 1)) as f64)
}

fn sign(a: f64, b: f64) -> Option<Ordering> {
    a.partial_cmp(&b)
}

/// Cardinal distance used to compare an expert's priorities with the group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Manhattan,
    Euclidean,
    Chebyshev,
}

impl Metric {
    pub fn distance(self, u: &[f64], v: &[f64]) -> Result<f64> {
        match self {
            Metric::Manhattan => manhattan(u, v),
            Metric::Euclidean => euclidean(u, v),
            Metric::Chebyshev => chebyshev(u, v),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Manhattan => "manhattan",
            Metric::Euclidean => "euclidean",
            Metric::Chebyshev => "chebyshev",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "manhattan" => Ok(Metric::Manhattan),
            "euclidean" => Ok(Metric::Euclidean),
            "chebyshev" => Ok(Metric::Chebyshev),
            other => Err(Error::domain(format!("unknown metric '{other}'"))),
        }
    }
}

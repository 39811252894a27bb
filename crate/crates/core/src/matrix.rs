//! Validated domain types: pairwise comparison matrices, priority vectors,
//! expert panels and expert weights.
//!
//! All types are immutable once constructed. Constructors enforce the
//! invariants, so downstream code never re-checks them.

use std::ops::Index;

use crate::error::{Error, Result};

/// Maximum `|c_ij * c_ji - 1|` accepted by the strict constructors.
pub const RECIPROCITY_TOL: f64 = 1e-9;

/// Tolerance on `|sum - 1|` for normalized vectors.
pub const SUM_TOL: f64 = 1e-12;

/// A positive reciprocal `n x n` pairwise comparison matrix, `n >= 2`.
///
/// Entry `(i, j)` is the judged ratio of importance of alternative `i` over
/// alternative `j`. Stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PcMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl PcMatrix {
    /// Builds a matrix from the strict upper triangle, listed row by row
    /// (`c_12, c_13, ..., c_1n, c_23, ...`). The lower triangle is filled
    /// with `c_ji = 1 / c_ij` and the diagonal with ones.
    pub fn from_upper_triangle(n: usize, upper: &[f64]) -> Result<Self> {
        if n < 2 {
            return Err(Error::shape(format!("a PC matrix needs n >= 2, got {n}")));
        }
        let expected = n * (n - 1) / 2;
        if upper.len() != expected {
            return Err(Error::shape(format!(
                "upper triangle of a {n}x{n} matrix has {expected} entries, got {}",
                upper.len()
            )));
        }
        let mut values = upper.iter().copied();
        let mut entries = vec![1.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = values.next().expect("length checked above");
                check_positive(v, i, j)?;
                entries[i * n + j] = v;
                entries[j * n + i] = 1.0 / v;
            }
        }
        Ok(Self { n, entries })
    }

    /// Builds a matrix from full rows, requiring exact unit diagonal and
    /// reciprocity within [`RECIPROCITY_TOL`].
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = square_size(rows)?;
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                check_positive(v, i, j)?;
                if i == j && v != 1.0 {
                    return Err(Error::domain(format!(
                        "diagonal entry ({}, {}) is {v}, expected 1",
                        i + 1,
                        j + 1
                    )));
                }
                entries.push(v);
            }
        }
        let m = Self { n, entries };
        m.check_reciprocity(RECIPROCITY_TOL)?;
        Ok(m)
    }

    /// Accepts full rows whose reciprocity holds only up to `tol`
    /// (`|c_ij * c_ji - 1| <= tol`, diagonal within `tol` of one), then
    /// rebuilds the matrix from its upper triangle so that the result is
    /// exactly reciprocal. Meant for hand-entered or rounded data.
    pub fn from_rows_lenient(rows: &[Vec<f64>], tol: f64) -> Result<Self> {
        let n = square_size(rows)?;
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                check_positive(v, i, j)?;
            }
            if (row[i] - 1.0).abs() > tol {
                return Err(Error::domain(format!(
                    "diagonal entry ({}, {}) is {}, expected 1",
                    i + 1,
                    i + 1,
                    row[i]
                )));
            }
        }
        let raw = Self {
            n,
            entries: rows.iter().flatten().copied().collect(),
        };
        raw.check_reciprocity(tol)?;
        Self::from_upper_triangle(n, &raw.upper_triangle())
    }

    /// The all-ones matrix: every alternative judged equal to every other.
    pub fn indifferent(n: usize) -> Result<Self> {
        Self::from_upper_triangle(n, &vec![1.0; n * (n.max(1) - 1) / 2])
    }

    /// The unique consistent matrix generated by `w`: `c_ij = w_i / w_j`.
    pub fn consistent(w: &PriorityVector) -> Result<Self> {
        let n = w.len();
        Self::from_upper_fn(n, |i, j| w[i] / w[j])
    }

    /// Fills the upper triangle from `f(i, j)` for `i < j` and mirrors it.
    pub(crate) fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut upper = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                upper.push(f(i, j));
            }
        }
        Self::from_upper_triangle(n, &upper)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// Strict upper triangle in row order, the inverse of
    /// [`PcMatrix::from_upper_triangle`].
    pub fn upper_triangle(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n * (self.n - 1) / 2);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                out.push(self.get(i, j));
            }
        }
        out
    }

    /// Relabels alternatives: entry `(i, j)` of the result is entry
    /// `(perm[i], perm[j])` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n)?;
        Self::from_upper_fn(self.n, |i, j| self.get(perm[i], perm[j]))
    }

    /// Largest `|c_ij * c_ji - 1|` over all pairs.
    pub fn reciprocity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self.get(i, j) * self.get(j, i) - 1.0).abs());
            }
        }
        worst
    }

    fn check_reciprocity(&self, tol: f64) -> Result<()> {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let err = (self.get(i, j) * self.get(j, i) - 1.0).abs();
                if err > tol {
                    return Err(Error::domain(format!(
                        "entries ({}, {}) = {} and ({}, {}) = {} are not reciprocal (|c_ij*c_ji - 1| = {err:.3e} > {tol:e})",
                        i + 1,
                        j + 1,
                        self.get(i, j),
                        j + 1,
                        i + 1,
                        self.get(j, i),
                    )));
                }
            }
        }
        Ok(())
    }
}

fn check_positive(v: f64, i: usize, j: usize) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "entry ({}, {}) must be positive and finite, got {v}",
            i + 1,
            j + 1
        )))
    }
}

fn square_size(rows: &[Vec<f64>]) -> Result<usize> {
    let n = rows.len();
    if n < 2 {
        return Err(Error::shape(format!("a PC matrix needs n >= 2, got {n}")));
    }
    if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::shape(format!(
            "row {} has {} entries, expected {n}",
            i + 1,
            row.len()
        )));
    }
    Ok(n)
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::shape(format!("permutation of length {} for n = {n}", perm.len())));
    }
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::shape(format!("{perm:?} is not a permutation of 0..{n}")));
        }
        seen[p] = true;
    }
    Ok(())
}

fn check_positive_finite(values: &[f64], what: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::shape(format!("{what} must not be empty")));
    }
    if let Some((i, v)) = values
        .iter()
        .enumerate()
        .find(|(_, v)| !(v.is_finite() && **v > 0.0))
    {
        return Err(Error::domain(format!(
            "{what} entry {} must be positive and finite, got {v}",
            i + 1
        )));
    }
    Ok(())
}

fn normalize(values: &mut [f64]) {
    let sum: f64 = values.iter().sum();
    for v in values.iter_mut() {
        *v /= sum;
    }
}

fn check_sums_to_one(values: &[f64], what: &str) -> Result<()> {
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > SUM_TOL {
        return Err(Error::domain(format!("{what} sum to {sum}, expected 1")));
    }
    Ok(())
}

/// A normalized, strictly positive weight vector over alternatives.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorityVector(Vec<f64>);

impl PriorityVector {
    /// Wraps an already normalized vector.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        check_positive_finite(&weights, "priority")?;
        check_sums_to_one(&weights, "priorities")?;
        Ok(Self(weights))
    }

    /// Divides positive scores by their sum.
    pub fn from_unnormalized(mut scores: Vec<f64>) -> Result<Self> {
        check_positive_finite(&scores, "priority")?;
        normalize(&mut scores);
        Ok(Self(scores))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Alternative indices from best to worst; ties keep the lower index first.
    pub fn order(&self) -> Vec<usize> {
        ranking_order(&self.0)
    }

    /// Index of the top alternative (lowest index on ties).
    pub fn winner(&self) -> usize {
        self.order()[0]
    }
}

/// Indices sorted by descending score, ties broken by ascending index.
pub fn ranking_order(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    idx
}

impl Index<usize> for PriorityVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl AsRef<[f64]> for PriorityVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// An ordered group of expert matrices over the same `n` alternatives.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpertPanel {
    matrices: Vec<PcMatrix>,
}

impl ExpertPanel {
    pub fn new(matrices: Vec<PcMatrix>) -> Result<Self> {
        let first = matrices
            .first()
            .ok_or_else(|| Error::shape("an expert panel needs at least one matrix"))?;
        let n = first.n();
        if let Some((q, m)) = matrices.iter().enumerate().find(|(_, m)| m.n() != n) {
            return Err(Error::shape(format!(
                "expert {} has a {}x{} matrix, expected {n}x{n}",
                q + 1,
                m.n(),
                m.n()
            )));
        }
        Ok(Self { matrices })
    }

    /// Number of alternatives.
    pub fn n(&self) -> usize {
        self.matrices[0].n()
    }

    /// Number of experts.
    pub fn k(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[PcMatrix] {
        &self.matrices
    }

    pub fn get(&self, q: usize) -> &PcMatrix {
        &self.matrices[q]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PcMatrix> {
        self.matrices.iter()
    }

    /// Copy of the panel with expert `q`'s matrix swapped for `m`.
    pub fn with_replaced(&self, q: usize, m: PcMatrix) -> Result<Self> {
        if q >= self.k() {
            return Err(Error::shape(format!("expert index {q} out of range for k = {}", self.k())));
        }
        let mut matrices = self.matrices.clone();
        matrices[q] = m;
        Self::new(matrices)
    }
}

impl<'a> IntoIterator for &'a ExpertPanel {
    type Item = &'a PcMatrix;
    type IntoIter = std::slice::Iter<'a, PcMatrix>;
    fn into_iter(self) -> Self::IntoIter {
        self.matrices.iter()
    }
}

/// Strictly positive expert weights `r_1..r_k` summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpertWeights(Vec<f64>);

impl ExpertWeights {
    pub fn new(r: Vec<f64>) -> Result<Self> {
        check_positive_finite(&r, "expert weight")?;
        check_sums_to_one(&r, "expert weights")?;
        Ok(Self(r))
    }

    pub fn from_unnormalized(mut r: Vec<f64>) -> Result<Self> {
        check_positive_finite(&r, "expert weight")?;
        normalize(&mut r);
        Ok(Self(r))
    }

    /// `r_q = 1/k` for every expert.
    pub fn uniform(k: usize) -> Self {
        Self(vec![1.0 / k as f64; k])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Index<usize> for ExpertWeights {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl AsRef<[f64]> for ExpertWeights {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

//! Priority derivation from a single pairwise comparison matrix.

use crate::error::{Error, Result};
use crate::matrix::{PcMatrix, PriorityVector};

/// Geometric Mean Method: normalized geometric means of the rows.
pub fn gmm_priorities(c: &PcMatrix) -> PriorityVector {
    let n = c.n();
    let scores: Vec<f64> = (0..n)
        .map(|i| (c.row(i).iter().map(|v| v.ln()).sum::<f64>() / n as f64).exp())
        .collect();
    PriorityVector::from_unnormalized(scores).expect("row geometric means of a positive matrix are positive")
}

/// Power-iteration settings for [`evm_priorities`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvmOptions {
    /// Stop once successive normalized iterates differ by less than this in max norm.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for EvmOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 10_000,
        }
    }
}

/// Principal eigenpair of a PC matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigen {
    pub priorities: PriorityVector,
    pub lambda_max: f64,
}

/// Eigenvalue Method: the normalized principal eigenvector and its eigenvalue.
///
/// Power iteration started from the GMM vector, which is already close to the
/// Perron vector for mildly inconsistent matrices. `lambda_max` is the mean
/// of `(C w)_i / w_i` at the final iterate.
pub fn evm_priorities(c: &PcMatrix, opts: EvmOptions) -> Result<Eigen> {
    if !(opts.tol > 0.0) {
        return Err(Error::domain(format!("EVM tolerance must be positive, got {}", opts.tol)));
    }
    let n = c.n();
    let mut x = gmm_priorities(c).into_inner();
    let mut y = vec![0.0; n];
    let mut delta = f64::INFINITY;
    for _ in 0..opts.max_iter {
        mat_vec(c, &x, &mut y);
        let sum: f64 = y.iter().sum();
        delta = 0.0;
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi /= sum;
            delta = delta.max((*yi - xi).abs());
        }
        std::mem::swap(&mut x, &mut y);
        if delta < opts.tol {
            mat_vec(c, &x, &mut y);
            let lambda_max = y.iter().zip(&x).map(|(cy, xi)| cy / xi).sum::<f64>() / n as f64;
            return Ok(Eigen {
                priorities: PriorityVector::from_unnormalized(x)?,
                lambda_max,
            });
        }
    }
    Err(Error::Convergence {
        iterations: opts.max_iter,
        last_delta: delta,
    })
}

fn mat_vec(c: &PcMatrix, x: &[f64], out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        *o = c.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
    }
}

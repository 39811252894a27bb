//! Inconsistency indices of a pairwise comparison matrix.

use crate::derive::{evm_priorities, EvmOptions};
use crate::error::{Error, Result};
use crate::matrix::{ExpertPanel, PcMatrix};

/// Saaty's consistency index `(lambda_max - n) / (n - 1)`.
///
/// Floating-point noise can push `lambda_max` a hair below `n` on consistent
/// matrices; the index is clamped at zero.
pub fn saaty_ci(c: &PcMatrix) -> Result<f64> {
    let n = c.n() as f64;
    let eig = evm_priorities(c, EvmOptions::default())?;
    Ok(((eig.lambda_max - n) / (n - 1.0)).max(0.0))
}

/// Koczkodaj's index: the worst triad deviation
/// `min(|1 - c_ik c_kj / c_ij|, |1 - c_ij / (c_ik c_kj)|)` over `i < j < k`.
pub fn koczkodaj_k(c: &PcMatrix) -> Result<f64> {
    let n = c.n();
    if n < 3 {
        return Err(Error::domain(format!(
            "Koczkodaj's index needs at least 3 alternatives, got {n}"
        )));
    }
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let ratio = c.get(i, k) * c.get(k, j) / c.get(i, j);
                let kijk = (1.0 - ratio).abs().min((1.0 - 1.0 / ratio).abs());
                worst = worst.max(kijk);
            }
        }
    }
    Ok(worst)
}

/// CI of every expert's matrix, in panel order.
pub fn panel_ci(panel: &ExpertPanel) -> Result<Vec<f64>> {
    panel.iter().map(saaty_ci).collect()
}

/// Arithmetic mean of the experts' CI values.
pub fn panel_mean_ci(panel: &ExpertPanel) -> Result<f64> {
    let cis = panel_ci(panel)?;
    Ok(cis.iter().sum::<f64>() / cis.len() as f64)
}

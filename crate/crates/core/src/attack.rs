//! Bribery model: a grafter buys the winner's strongest supporters and has
//! them rewrite their matrices so the original runner-up takes first place.

use serde::{Deserialize, Serialize};

use crate::aggregate::{aggregate_panel_equal, individual_priorities, Aggregation};
use crate::error::{Error, Result};
use crate::matrix::{ExpertPanel, PcMatrix};

/// Largest value of the fundamental 1–9 scale.
pub const DEFAULT_SATURATION: f64 = 9.0;

/// Rewrites `c` so that `promoted` beats every other alternative by
/// `saturation` and `demoted` loses to every other alternative by
/// `saturation`. All other entries are kept.
pub fn bribe_matrix(c: &PcMatrix, promoted: usize, demoted: usize, saturation: f64) -> Result<PcMatrix> {
    let n = c.n();
    if promoted >= n || demoted >= n {
        return Err(Error::shape(format!(
            "alternative index out of range (promoted {promoted}, demoted {demoted}, n = {n})"
        )));
    }
    if promoted == demoted {
        return Err(Error::domain("promoted and demoted alternatives must differ"));
    }
    if !(saturation > 1.0 && saturation.is_finite()) {
        return Err(Error::domain(format!("saturation must exceed 1, got {saturation}")));
    }
    let inv = 1.0 / saturation;
    let mut rows = c.rows();
    for j in 0..n {
        if j == promoted {
            continue;
        }
        rows[promoted][j] = saturation;
        rows[j][promoted] = inv;
    }
    for j in 0..n {
        if j == demoted || j == promoted {
            continue;
        }
        rows[demoted][j] = inv;
        rows[j][demoted] = saturation;
    }
    PcMatrix::from_rows(&rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AttackConfig {
    pub saturation: f64,
    /// `None` means every expert may be bribed.
    pub max_bribes: Option<usize>,
    /// Re-target the current leader of the manipulated panel after every
    /// bribe instead of always demoting the original winner.
    pub recompute_support: bool,
}

impl Default for AttackConfig {
    fn default() -> Self {
        Self {
            saturation: DEFAULT_SATURATION,
            max_bribes: None,
            recompute_support: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackOutcome {
    /// Bribed experts in bribery order.
    pub bribed: Vec<usize>,
    pub manipulated_panel: ExpertPanel,
    pub succeeded: bool,
    /// True when the runner-up already tied for first before any bribe.
    pub vacuous: bool,
    pub honest: Aggregation,
    pub manipulated: Aggregation,
    pub winner: usize,
    pub runner_up: usize,
}

fn is_strict_leader(scores: &[f64], a: usize) -> bool {
    scores.iter().enumerate().all(|(i, &s)| i == a || scores[a] > s)
}

/// Bribes experts one at a time, strongest supporters of the honest winner
/// first, until the honest runner-up leads the equal-weight aggregate or the
/// bribe budget is spent.
pub fn run_attack(panel: &ExpertPanel, cfg: &AttackConfig) -> Result<AttackOutcome> {
    if panel.n() < 2 {
        return Err(Error::shape("the attack needs at least two alternatives"));
    }
    let honest = aggregate_panel_equal(panel)?;
    let order = honest.priorities.order();
    let (winner, runner_up) = (order[0], order[1]);
    let max_bribes = cfg.max_bribes.unwrap_or(panel.k()).min(panel.k());
    let support = individual_priorities(panel);

    let mut outcome = AttackOutcome {
        bribed: Vec::new(),
        manipulated_panel: panel.clone(),
        succeeded: false,
        vacuous: false,
        manipulated: honest.clone(),
        honest,
        winner,
        runner_up,
    };
    if outcome.honest.priorities[runner_up] >= outcome.honest.priorities[winner] {
        outcome.succeeded = true;
        outcome.vacuous = true;
        return Ok(outcome);
    }

    let mut target = winner;
    while outcome.bribed.len() < max_bribes {
        let next = (0..panel.k())
            .filter(|q| !outcome.bribed.contains(q))
            .fold(None, |best: Option<usize>, q| match best {
                Some(b) if support[b][target] >= support[q][target] => Some(b),
                _ => Some(q),
            })
            .expect("budget is capped at k, so an unbribed expert remains");
        let forged = bribe_matrix(panel.get(next), runner_up, target, cfg.saturation)?;
        outcome.manipulated_panel = outcome.manipulated_panel.with_replaced(next, forged)?;
        outcome.bribed.push(next);
        outcome.manipulated = aggregate_panel_equal(&outcome.manipulated_panel)?;
        if is_strict_leader(outcome.manipulated.priorities.as_slice(), runner_up) {
            outcome.succeeded = true;
            break;
        }
        if cfg.recompute_support {
            target = outcome
                .manipulated
                .priorities
                .order()
                .into_iter()
                .find(|&a| a != runner_up)
                .expect("n >= 2");
        }
    }
    Ok(outcome)
}

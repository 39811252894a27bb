//! Manipulation-resistant aggregation of expert pairwise-comparison judgments
//! for group AHP.
//!
//! The crate is organized bottom-up:
//!
//! - [`matrix`]: validated domain types (`PcMatrix`, `PriorityVector`,
//!   `ExpertPanel`, `ExpertWeights`).
//! - [`derive`]: priority derivation from a single matrix (GMM, EVM).
//! - [`inconsistency`]: Saaty's CI and Koczkodaj's index.
//! - [`metrics`]: cardinal and ordinal distances between rankings.
//! - [`aggregate`]: classical AIJ / AIP group aggregation.
//! - [`robust`]: expert prioritization by preferential distance (APDD),
//!   by inconsistency (AID), and by their mix (MX).
//! - [`attack`]: the bribery model that promotes the runner-up.
//! - [`montecarlo`]: scenario generation and the two defense experiments.
//! - [`io`] and [`config`]: panel files, configuration and CSV reports used
//!   by the `robust-ahp` binary.

pub mod aggregate;
pub mod attack;
pub mod config;
pub mod derive;
pub mod error;
pub mod inconsistency;
pub mod io;
pub mod matrix;
pub mod metrics;
pub mod montecarlo;
pub mod robust;

pub use error::{Error, Result};
pub use matrix::{ExpertPanel, ExpertWeights, PcMatrix, PriorityVector};

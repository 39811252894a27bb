//! Experiment configuration file.
//!
//! Every key is optional; missing keys take the defaults below.
//!
//! ```json
//! {
//!   "seed": 20240601,
//!   "counts": { "5": 34, "6": 33, "7": 33 },
//!   "alphas": [1.1, 1.2, 5.0],
//!   "panel_size": 20,
//!   "epsilon_distribution": "log_uniform",
//!   "metric": "manhattan",
//!   "apdd_reference": "raw",
//!   "h": 5, "l": 1,
//!   "credibility": { "preset": "ratio_9_4_1" },
//!   "beta": 0.5,
//!   "saturation": 9, "max_bribes": null, "recompute_support": false,
//!   "ci_bucket_width": 0.01,
//!   "workers": null
//! }
//! ```
//!
//! `credibility` is one of `{"preset": "ratio_9_4_1" | "example_matrix"}`,
//! `{"matrix": [c12, c13, c23]}`, `{"fixed": [h, m, l]}` or
//! `{"procedural": {"alpha": 2.0}}`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::attack::{AttackConfig, DEFAULT_SATURATION};
use crate::error::{Error, Result};
use crate::io::FileError;
use crate::metrics::Metric;
use crate::montecarlo::{BaseDistribution, default_alphas, default_counts, CorpusConfig, EpsilonDistribution, ExperimentConfig, ScoreScale};
use crate::robust::{check_beta, ApddReference, CredibilityScale2, CredibilitySource, RobustConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub counts: BTreeMap<usize, usize>,
    pub alphas: Vec<f64>,
    pub panel_size: usize,
    pub epsilon_distribution: EpsilonDistribution,
    pub base_distribution: BaseDistribution,
    pub metric: Metric,
    pub apdd_reference: ApddReference,
    pub h: f64,
    pub l: f64,
    pub credibility: CredibilitySource,
    pub beta: f64,
    pub saturation: f64,
    pub max_bribes: Option<usize>,
    pub recompute_support: bool,
    pub ci_bucket_width: f64,
    pub distance_scores: ScoreScale,
    /// Worker threads for experiment evaluation; `None` uses all cores.
    pub workers: Option<usize>,
}

impl Default for Config {
    fn default() -> Self {
        let corpus = CorpusConfig::default();
        Self {
            seed: corpus.seed,
            counts: default_counts(),
            alphas: default_alphas(),
            panel_size: corpus.panel_size,
            epsilon_distribution: corpus.epsilon_distribution,
            base_distribution: corpus.base_distribution,
            metric: Metric::Manhattan,
            apdd_reference: ApddReference::Raw,
            h: 5.0,
            l: 1.0,
            credibility: CredibilitySource::default(),
            beta: 0.5,
            saturation: DEFAULT_SATURATION,
            max_bribes: None,
            recompute_support: false,
            ci_bucket_width: 0.01,
            distance_scores: ScoreScale::default(),
            workers: None,
        }
    }
}

impl Config {
    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Reads and validates a config file.
    pub fn load(path: &Path) -> std::result::Result<Self, FileError> {
        let text = fs::read_to_string(path).map_err(|e| FileError::io(path, e))?;
        let cfg = Self::from_json(&text).map_err(|e| FileError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.validate().map_err(|source| FileError::Invalid {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(cfg)
    }

    /// Checks everything that can be checked without a panel.
    pub fn validate(&self) -> Result<()> {
        if let Some(&n) = self.counts.keys().find(|&&n| n < 3) {
            return Err(Error::domain(format!("counts: alternatives must number at least 3, got {n}")));
        }
        if let Some(&a) = self.alphas.iter().find(|&&a| !(a >= 1.0 && a.is_finite())) {
            return Err(Error::domain(format!("alphas: every alpha must be >= 1, got {a}")));
        }
        if self.panel_size < 2 {
            return Err(Error::domain("panel_size must be at least 2"));
        }
        if !(self.saturation > 1.0 && self.saturation.is_finite()) {
            return Err(Error::domain(format!("saturation must exceed 1, got {}", self.saturation)));
        }
        if !(self.ci_bucket_width > 0.0 && self.ci_bucket_width.is_finite()) {
            return Err(Error::domain(format!(
                "ci_bucket_width must be positive, got {}",
                self.ci_bucket_width
            )));
        }
        if self.workers == Some(0) {
            return Err(Error::domain("workers must be at least 1"));
        }
        self.robust()?;
        if let CredibilitySource::Procedural { .. } = self.credibility {
            // resolved per panel; only alpha can be checked here
            self.credibility.resolve(1.0, 2.0, 4.0)?;
        } else {
            self.credibility.resolve(0.0, 0.0, 0.0)?;
        }
        Ok(())
    }

    pub fn corpus(&self) -> CorpusConfig {
        CorpusConfig {
            seed: self.seed,
            counts: self.counts.clone(),
            alphas: self.alphas.clone(),
            panel_size: self.panel_size,
            epsilon_distribution: self.epsilon_distribution,
            base_distribution: self.base_distribution,
        }
    }

    pub fn robust(&self) -> Result<RobustConfig> {
        check_beta(self.beta)?;
        Ok(RobustConfig {
            metric: self.metric,
            apdd_reference: self.apdd_reference,
            scale2: CredibilityScale2::new(self.h, self.l)?,
            credibility: self.credibility,
            beta: self.beta,
        })
    }

    pub fn attack(&self) -> AttackConfig {
        AttackConfig {
            saturation: self.saturation,
            max_bribes: self.max_bribes,
            recompute_support: self.recompute_support,
        }
    }

    pub fn experiment(&self) -> Result<ExperimentConfig> {
        Ok(ExperimentConfig {
            robust: self.robust()?,
            attack: self.attack(),
            distance_scores: self.distance_scores,
        })
    }
}

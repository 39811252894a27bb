//! Manipulation-resistant expert prioritization.
//!
//! Each scheme turns a per-expert distance into an expert weight through a
//! decreasing (piecewise) linear map anchored at credibility values, then
//! re-aggregates with weighted AIP:
//!
//! - **APDD** uses the distance between an expert's priority vector and the
//!   group aggregate. The closest expert gets `h`, the farthest gets `l`.
//! - **AID** uses the signed deviation of an expert's CI from the group's
//!   mean CI, with a two-segment map through `(d_min, h)`, `(d_mid, m)` and
//!   `(d_max, l)`.
//! - **MX** is the convex combination `beta * APDD + (1 - beta) * AID`.
//!
//! Degenerate panels (all distances equal, or fewer than three distinct
//! AID anchors) get uniform weights so that batch runs never abort.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::aggregate::{individual_priorities, weighted_geometric_mean, Aggregation};
use crate::derive::gmm_priorities;
use crate::error::{Error, Result};
use crate::inconsistency::saaty_ci;
use crate::matrix::{ExpertPanel, ExpertWeights, PcMatrix, PriorityVector};
use crate::metrics::Metric;

/// Anchor weights for the most and least trusted expert under APDD.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScale2", into = "RawScale2")]
pub struct CredibilityScale2 {
    h: f64,
    l: f64,
}

#[derive(Serialize, Deserialize)]
struct RawScale2 {
    h: f64,
    l: f64,
}

impl TryFrom<RawScale2> for CredibilityScale2 {
    type Error = Error;
    fn try_from(raw: RawScale2) -> Result<Self> {
        Self::new(raw.h, raw.l)
    }
}

impl From<CredibilityScale2> for RawScale2 {
    fn from(s: CredibilityScale2) -> Self {
        RawScale2 { h: s.h, l: s.l }
    }
}

impl CredibilityScale2 {
    pub fn new(h: f64, l: f64) -> Result<Self> {
        if !(l.is_finite() && h.is_finite() && l > 0.0 && h > l) {
            return Err(Error::domain(format!("credibility scale needs h > l > 0, got h = {h}, l = {l}")));
        }
        Ok(Self { h, l })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn l(&self) -> f64 {
        self.l
    }
}

impl Default for CredibilityScale2 {
    /// `h = 5`, `l = 1`: the closest expert is "strongly" more credible than
    /// the farthest on the fundamental scale.
    fn default() -> Self {
        Self { h: 5.0, l: 1.0 }
    }
}

/// Anchor weights for the most consistent (`h`), average (`m`) and least
/// consistent (`l`) expert under AID. Requires `h >= m >= l > 0`, `h > l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CredibilityScale3 {
    h: f64,
    m: f64,
    l: f64,
}

impl CredibilityScale3 {
    pub fn new(h: f64, m: f64, l: f64) -> Result<Self> {
        if ![h, m, l].iter().all(|v| v.is_finite() && *v > 0.0) {
            return Err(Error::domain(format!(
                "credibility values must be positive and finite, got ({h}, {m}, {l})"
            )));
        }
        if !(h >= m && m >= l && h > l) {
            return Err(Error::CredibilityOrder { h, m, l });
        }
        Ok(Self { h, m, l })
    }

    /// The fixed ratio 9:4:1, normalized.
    pub fn ratio_9_4_1() -> Self {
        Self {
            h: 9.0 / 14.0,
            m: 4.0 / 14.0,
            l: 1.0 / 14.0,
        }
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.h, self.m, self.l]
    }
}

impl Default for CredibilityScale3 {
    fn default() -> Self {
        Self::ratio_9_4_1()
    }
}

/// Credibility values `(h, m, l)` as GMM priorities of a 3x3 matrix comparing
/// the most consistent, the average and the least consistent expert.
pub fn credibility_from_matrix(c_ex: &PcMatrix) -> Result<CredibilityScale3> {
    if c_ex.n() != 3 {
        return Err(Error::shape(format!(
            "credibility matrix must be 3x3, got {0}x{0}",
            c_ex.n()
        )));
    }
    let w = gmm_priorities(c_ex);
    CredibilityScale3::new(w[0], w[1], w[2])
}

/// Unnormalized procedural credibility `(alpha * I_max / I_min, alpha * I_mid / I_min, 1)`.
pub fn procedural_credibility_raw(i_min: f64, i_mid: f64, i_max: f64, alpha: f64) -> Result<[f64; 3]> {
    if !(i_min.is_finite() && i_mid.is_finite() && i_max.is_finite()) {
        return Err(Error::domain("inconsistency values must be finite"));
    }
    if !(i_min > 0.0) {
        return Err(Error::domain(format!(
            "procedural credibility needs I_min > 0, got {i_min} (a perfectly consistent expert makes the ratio unbounded)"
        )));
    }
    if !(i_min <= i_mid && i_mid <= i_max) {
        return Err(Error::domain(format!(
            "procedural credibility needs I_min <= I_mid <= I_max, got ({i_min}, {i_mid}, {i_max})"
        )));
    }
    if !(alpha >= 1.0 && alpha.is_finite()) {
        return Err(Error::domain(format!("gain factor alpha must be >= 1, got {alpha}")));
    }
    Ok([alpha * i_max / i_min, alpha * i_mid / i_min, 1.0])
}

/// [`procedural_credibility_raw`], normalized to sum one.
pub fn procedural_credibility(i_min: f64, i_mid: f64, i_max: f64, alpha: f64) -> Result<CredibilityScale3> {
    let [h, m, l] = procedural_credibility_raw(i_min, i_mid, i_max, alpha)?;
    let s = h + m + l;
    CredibilityScale3::new(h / s, m / s, l / s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CredibilityPreset {
    /// `h:m:l = 9:4:1`.
    #[serde(rename = "ratio_9_4_1")]
    Ratio941,
    /// The matrix `[[1, 2, 7], [1/2, 1, 4], [1/7, 1/4, 1]]`.
    ExampleMatrix,
}

/// Where AID's `(h, m, l)` come from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CredibilitySource {
    Preset(CredibilityPreset),
    /// Upper triangle `[c_min_mid, c_min_max, c_mid_max]` of the credibility matrix.
    Matrix([f64; 3]),
    /// Explicit `[h, m, l]`.
    Fixed([f64; 3]),
    /// Ratios of the panel's own CI extremes with gain `alpha`.
    Procedural { alpha: f64 },
}

impl Default for CredibilitySource {
    fn default() -> Self {
        CredibilitySource::Preset(CredibilityPreset::Ratio941)
    }
}

impl CredibilitySource {
    /// Resolves the scale; `(i_min, i_mid, i_max)` are only used by
    /// [`CredibilitySource::Procedural`].
    pub fn resolve(&self, i_min: f64, i_mid: f64, i_max: f64) -> Result<CredibilityScale3> {
        match *self {
            CredibilitySource::Preset(CredibilityPreset::Ratio941) => Ok(CredibilityScale3::ratio_9_4_1()),
            CredibilitySource::Preset(CredibilityPreset::ExampleMatrix) => {
                credibility_from_matrix(&PcMatrix::from_upper_triangle(3, &[2.0, 7.0, 4.0])?)
            }
            CredibilitySource::Matrix(upper) => credibility_from_matrix(&PcMatrix::from_upper_triangle(3, &upper)?),
            CredibilitySource::Fixed([h, m, l]) => CredibilityScale3::new(h, m, l),
            CredibilitySource::Procedural { alpha } => procedural_credibility(i_min, i_mid, i_max, alpha),
        }
    }
}

/// Line through two points, exact at both anchors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    from: (f64, f64),
    to: (f64, f64),
    slope: f64,
}

impl Line {
    pub fn through(from: (f64, f64), to: (f64, f64)) -> Result<Self> {
        if from.0 == to.0 {
            return Err(Error::DegenerateMap(from.0));
        }
        Ok(Self {
            from,
            to,
            slope: (from.1 - to.1) / (from.0 - to.0),
        })
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn intercept(&self) -> f64 {
        self.from.1 - self.slope * self.from.0
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x == self.from.0 {
            self.from.1
        } else if x == self.to.0 {
            self.to.1
        } else {
            self.from.1 + self.slope * (x - self.from.0)
        }
    }
}

/// Value at `x` of the line through `p` and `q`.
pub fn linear_map(p: (f64, f64), q: (f64, f64), x: f64) -> Result<f64> {
    Ok(Line::through(p, q)?.eval(x))
}

/// Vector the APDD distances are measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApddReference {
    /// Equal-weight geometric mean of the experts' priorities, not renormalized.
    #[default]
    Raw,
    /// The same vector normalized to sum one.
    Normalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    /// Non-negative distances of expert priorities from the group vector.
    Preferential,
    /// Signed deviations of expert CI from the panel mean; sums to zero.
    CenteredInconsistency,
}

/// Per-expert distances feeding an expert-weight mapping.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceProfile {
    pub kind: ProfileKind,
    pub values: Vec<f64>,
}

impl DistanceProfile {
    fn extremes(&self) -> (usize, usize) {
        let v = &self.values;
        let mut lo = 0;
        let mut hi = 0;
        for i in 1..v.len() {
            if v[i] < v[lo] {
                lo = i;
            }
            if v[i] > v[hi] {
                hi = i;
            }
        }
        (lo, hi)
    }
}

/// Distances `d_i = metric(w_ref, w_i)` between each expert's GMM vector and
/// the equal-weight group vector.
pub fn preferential_distances(panel: &ExpertPanel, metric: Metric, reference: ApddReference) -> Result<DistanceProfile> {
    preferential_profile(&individual_priorities(panel), metric, reference)
}

fn preferential_profile(priorities: &[PriorityVector], metric: Metric, reference: ApddReference) -> Result<DistanceProfile> {
    let mut group = weighted_geometric_mean(priorities, &ExpertWeights::uniform(priorities.len()))?;
    if reference == ApddReference::Normalized {
        group = PriorityVector::from_unnormalized(group)?.into_inner();
    }
    let values = priorities
        .iter()
        .map(|w| metric.distance(&group, w.as_slice()))
        .collect::<Result<Vec<_>>>()?;
    Ok(DistanceProfile {
        kind: ProfileKind::Preferential,
        values,
    })
}

/// Maps preferential distances through the line `(d_min, h)`–`(d_max, l)` and
/// rescales to sum one. Equal distances give uniform weights.
pub fn apdd_weights_from_profile(profile: &DistanceProfile, scale: CredibilityScale2) -> Result<ExpertWeights> {
    let k = profile.values.len();
    let (lo, hi) = profile.extremes();
    let (d_min, d_max) = (profile.values[lo], profile.values[hi]);
    if d_min == d_max {
        return Ok(ExpertWeights::uniform(k));
    }
    let line = Line::through((d_min, scale.h), (d_max, scale.l))?;
    ExpertWeights::from_unnormalized(profile.values.iter().map(|&d| line.eval(d)).collect())
}

/// APDD expert weights, distances measured against the raw group vector.
pub fn apdd_weights(panel: &ExpertPanel, scale: CredibilityScale2, metric: Metric) -> Result<ExpertWeights> {
    let profile = preferential_distances(panel, metric, ApddReference::Raw)?;
    apdd_weights_from_profile(&profile, scale)
}

/// Which experts anchor the AID map, and the centered CI deviations.
#[derive(Debug, Clone, PartialEq)]
pub struct InconsistencyProfile {
    pub ci: Vec<f64>,
    pub mean_ci: f64,
    pub deviations: DistanceProfile,
    /// Most consistent expert (lowest index on ties).
    pub min_expert: usize,
    /// Expert whose CI is closest to the mean (lowest index on ties).
    pub mid_expert: usize,
    /// Least consistent expert (lowest index on ties).
    pub max_expert: usize,
}

impl InconsistencyProfile {
    pub fn from_ci(ci: &[f64]) -> Result<Self> {
        if ci.is_empty() {
            return Err(Error::shape("no inconsistency values"));
        }
        let mean_ci = ci.iter().sum::<f64>() / ci.len() as f64;
        let deviations = DistanceProfile {
            kind: ProfileKind::CenteredInconsistency,
            values: ci.iter().map(|c| c - mean_ci).collect(),
        };
        let (min_expert, max_expert) = deviations.extremes();
        let d = &deviations.values;
        let mut mid_expert = 0;
        for i in 1..d.len() {
            if d[i].abs() < d[mid_expert].abs() {
                mid_expert = i;
            }
        }
        Ok(Self {
            ci: ci.to_vec(),
            mean_ci,
            deviations,
            min_expert,
            mid_expert,
            max_expert,
        })
    }

    /// `(I_min, I_mid, I_max)`.
    pub fn anchors(&self) -> (f64, f64, f64) {
        (self.ci[self.min_expert], self.ci[self.mid_expert], self.ci[self.max_expert])
    }

    /// True when the three anchors do not have distinct abscissae.
    pub fn is_degenerate(&self) -> bool {
        let d = &self.deviations.values;
        let (lo, mid, hi) = (d[self.min_expert], d[self.mid_expert], d[self.max_expert]);
        lo == mid || mid == hi
    }
}

/// AID mapping on a precomputed profile: `A = (d_min, h)`, `B = (d_mid, m)`,
/// `C = (d_max, l)`; deviations below zero use the A–B line, the rest B–C.
pub fn aid_weights_from_profile(profile: &InconsistencyProfile, scale: CredibilityScale3) -> Result<ExpertWeights> {
    let k = profile.ci.len();
    if profile.is_degenerate() {
        return Ok(ExpertWeights::uniform(k));
    }
    let d = &profile.deviations.values;
    let a = (d[profile.min_expert], scale.h);
    let b = (d[profile.mid_expert], scale.m);
    let c = (d[profile.max_expert], scale.l);
    let below = Line::through(a, b)?;
    let above = Line::through(b, c)?;
    let raw = d
        .iter()
        .map(|&x| if x < 0.0 { below.eval(x) } else { above.eval(x) })
        .collect();
    ExpertWeights::from_unnormalized(raw)
}

fn aid_weights_from_ci(ci: &[f64], source: &CredibilitySource) -> Result<ExpertWeights> {
    let profile = InconsistencyProfile::from_ci(ci)?;
    if profile.is_degenerate() {
        return Ok(ExpertWeights::uniform(ci.len()));
    }
    let (i_min, i_mid, i_max) = profile.anchors();
    let scale = source.resolve(i_min, i_mid, i_max)?;
    aid_weights_from_profile(&profile, scale)
}

/// AID expert weights for a panel.
pub fn aid_weights(panel: &ExpertPanel, scale: CredibilityScale3) -> Result<ExpertWeights> {
    let ci = panel.iter().map(saaty_ci).collect::<Result<Vec<_>>>()?;
    aid_weights_from_profile(&InconsistencyProfile::from_ci(&ci)?, scale)
}

pub fn check_beta(beta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&beta) {
        Ok(())
    } else {
        Err(Error::domain(format!("beta must lie in [0, 1], got {beta}")))
    }
}

/// `beta * apdd + (1 - beta) * aid`, expert by expert.
pub fn mix_weights(apdd: &ExpertWeights, aid: &ExpertWeights, beta: f64) -> Result<ExpertWeights> {
    check_beta(beta)?;
    if apdd.len() != aid.len() {
        return Err(Error::shape("APDD and AID weight vectors differ in length"));
    }
    ExpertWeights::new(
        apdd.as_slice()
            .iter()
            .zip(aid.as_slice())
            .map(|(r1, r2)| beta * r1 + (1.0 - beta) * r2)
            .collect(),
    )
}

/// MX expert weights: convex combination of APDD and AID.
pub fn mx_weights(
    panel: &ExpertPanel,
    scale2: CredibilityScale2,
    scale3: CredibilityScale3,
    beta: f64,
    metric: Metric,
) -> Result<ExpertWeights> {
    check_beta(beta)?;
    mix_weights(&apdd_weights(panel, scale2, metric)?, &aid_weights(panel, scale3)?, beta)
}

/// Aggregation method: plain equal-weight AIP or one of the robust schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Classic,
    Apdd,
    Aid,
    Mx,
}

impl Method {
    pub const ROBUST: [Method; 3] = [Method::Apdd, Method::Aid, Method::Mx];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Classic => "classic",
            Method::Apdd => "apdd",
            Method::Aid => "aid",
            Method::Mx => "mx",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "classic" => Ok(Method::Classic),
            "apdd" => Ok(Method::Apdd),
            "aid" => Ok(Method::Aid),
            "mx" => Ok(Method::Mx),
            other => Err(Error::domain(format!(
                "unknown method '{other}' (expected classic, apdd, aid or mx)"
            ))),
        }
    }
}

/// Parameters shared by the robust schemes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustConfig {
    pub metric: Metric,
    pub apdd_reference: ApddReference,
    pub scale2: CredibilityScale2,
    pub credibility: CredibilitySource,
    pub beta: f64,
}

impl Default for RobustConfig {
    fn default() -> Self {
        Self {
            metric: Metric::Manhattan,
            apdd_reference: ApddReference::Raw,
            scale2: CredibilityScale2::default(),
            credibility: CredibilitySource::default(),
            beta: 0.5,
        }
    }
}

/// Expert weights and the re-aggregated ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustOutcome {
    pub weights: ExpertWeights,
    pub aggregation: Aggregation,
}

/// Per-panel quantities shared by all methods, computed at most once.
#[derive(Debug)]
pub struct PanelAnalysis<'a> {
    panel: &'a ExpertPanel,
    priorities: Vec<PriorityVector>,
    ci: OnceLock<Vec<f64>>,
}

impl<'a> PanelAnalysis<'a> {
    pub fn new(panel: &'a ExpertPanel) -> Self {
        Self {
            panel,
            priorities: individual_priorities(panel),
            ci: OnceLock::new(),
        }
    }

    pub fn panel(&self) -> &ExpertPanel {
        self.panel
    }

    /// GMM priorities per expert.
    pub fn priorities(&self) -> &[PriorityVector] {
        &self.priorities
    }

    /// CI per expert.
    pub fn ci(&self) -> Result<&[f64]> {
        if let Some(ci) = self.ci.get() {
            return Ok(ci);
        }
        let ci = self.panel.iter().map(saaty_ci).collect::<Result<Vec<_>>>()?;
        Ok(self.ci.get_or_init(|| ci))
    }

    pub fn expert_weights(&self, method: Method, cfg: &RobustConfig) -> Result<ExpertWeights> {
        let k = self.panel.k();
        match method {
            Method::Classic => Ok(ExpertWeights::uniform(k)),
            Method::Apdd => {
                let profile = preferential_profile(&self.priorities, cfg.metric, cfg.apdd_reference)?;
                apdd_weights_from_profile(&profile, cfg.scale2)
            }
            Method::Aid => aid_weights_from_ci(self.ci()?, &cfg.credibility),
            Method::Mx => {
                check_beta(cfg.beta)?;
                let apdd = self.expert_weights(Method::Apdd, cfg)?;
                let aid = self.expert_weights(Method::Aid, cfg)?;
                mix_weights(&apdd, &aid, cfg.beta)
            }
        }
    }

    pub fn aggregate(&self, method: Method, cfg: &RobustConfig) -> Result<RobustOutcome> {
        let weights = self.expert_weights(method, cfg)?;
        let aggregation = Aggregation::from_vectors(&self.priorities, &weights)?;
        Ok(RobustOutcome { weights, aggregation })
    }
}

/// Expert weights by `method`, then weighted AIP over the experts' GMM vectors.
pub fn robust_aggregate(panel: &ExpertPanel, method: Method, cfg: &RobustConfig) -> Result<RobustOutcome> {
    PanelAnalysis::new(panel).aggregate(method, cfg)
}

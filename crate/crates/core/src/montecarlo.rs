//! Monte Carlo scenarios and the two defense experiments.
//!
//! A scenario is a ground-truth priority vector, a disturbance bound
//! `alpha`, and a panel of experts whose matrices are the vector's consistent
//! matrix with every upper-triangle entry multiplied by a random factor in
//! `[1/alpha, alpha]`.
//!
//! Experiment 1 bribes each panel and checks whether APDD, AID and MX
//! restore the honest winner (WR) or the whole honest order (RR).
//! Experiment 2 runs the same methods on the honest panels and measures how
//! far they move the classical ranking.
//!
//! Generation is sequential on one ChaCha stream, so a seed fixes the corpus.
//! Evaluation fans out over scenarios with rayon; results keep scenario order.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aggregate::{aggregate_panel_equal, Aggregation};
use crate::attack::{run_attack, AttackConfig};
use crate::error::{Error, Result};
use crate::inconsistency::panel_mean_ci;
use crate::matrix::{ExpertPanel, PcMatrix, PriorityVector};
use crate::metrics::{kendall_tau_distance, manhattan_mean};
use crate::robust::{Method, PanelAnalysis, RobustConfig};

/// Base vectors whose two largest weights are closer than this are redrawn.
pub const MIN_TOP_GAP: f64 = 1e-6;

/// Threshold used for the headline statistics (`mean CI <= 0.1`).
pub const HEADLINE_CI: f64 = 0.1;

/// Flat Dirichlet draw: normalized i.i.d. exponentials.
pub fn random_priority_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PriorityVector> {
    if n < 2 {
        return Err(Error::shape(format!("priority vectors need n >= 2, got {n}")));
    }
    loop {
        let draws: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        if draws.iter().all(|&x| x > 0.0) {
            return PriorityVector::from_unnormalized(draws);
        }
    }
}

/// Distribution of the ground-truth priority vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseDistribution {
    /// Flat Dirichlet, uniform on the simplex.
    #[default]
    Dirichlet,
    /// i.i.d. uniform `(0, 1)` components, normalized.
    Uniform,
}

impl BaseDistribution {
    pub fn sample<R: Rng + ?Sized>(self, n: usize, rng: &mut R) -> Result<PriorityVector> {
        match self {
            BaseDistribution::Dirichlet => random_priority_vector(n, rng),
            BaseDistribution::Uniform => {
                if n < 2 {
                    return Err(Error::shape(format!("priority vectors need n >= 2, got {n}")));
                }
                loop {
                    let draws: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
                    if draws.iter().all(|&x| x > 0.0) {
                        return PriorityVector::from_unnormalized(draws);
                    }
                }
            }
        }
    }
}

/// Distribution of the multiplicative disturbance `epsilon` on `[1/alpha, alpha]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonDistribution {
    /// `ln epsilon` uniform on `[-ln alpha, ln alpha]`.
    #[default]
    LogUniform,
    /// `epsilon` uniform on `[1/alpha, alpha]`.
    Uniform,
}

/// Multiplies each upper-triangle entry by an independent `epsilon_ij` in
/// `[1/alpha, alpha]`; the lower triangle follows by reciprocity.
pub fn perturb<R: Rng + ?Sized>(
    c: &PcMatrix,
    alpha: f64,
    dist: EpsilonDistribution,
    rng: &mut R,
) -> Result<PcMatrix> {
    if !(alpha >= 1.0 && alpha.is_finite()) {
        return Err(Error::domain(format!("disturbance bound alpha must be >= 1, got {alpha}")));
    }
    if alpha == 1.0 {
        return Ok(c.clone());
    }
    let log_alpha = alpha.ln();
    PcMatrix::from_upper_fn(c.n(), |i, j| {
        let eps = match dist {
            EpsilonDistribution::LogUniform => rng.random_range(-log_alpha..=log_alpha).exp(),
            EpsilonDistribution::Uniform => rng.random_range(1.0 / alpha..=alpha),
        };
        eps * c.get(i, j)
    })
}

/// `1.1, 1.2, ..., 5.0`.
pub fn default_alphas() -> Vec<f64> {
    (11..=50).map(|i| i as f64 / 10.0).collect()
}

/// How many base vectors to draw for each alternative count.
pub fn default_counts() -> BTreeMap<usize, usize> {
    BTreeMap::from([(5, 34), (6, 33), (7, 33)])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusConfig {
    pub seed: u64,
    pub counts: BTreeMap<usize, usize>,
    pub alphas: Vec<f64>,
    pub panel_size: usize,
    pub epsilon_distribution: EpsilonDistribution,
    pub base_distribution: BaseDistribution,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            seed: 20_240_601,
            counts: default_counts(),
            alphas: default_alphas(),
            panel_size: 20,
            epsilon_distribution: EpsilonDistribution::LogUniform,
            base_distribution: BaseDistribution::Dirichlet,
        }
    }
}

/// One simulated group decision.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: usize,
    pub base_vector: PriorityVector,
    pub alpha: f64,
    pub panel: ExpertPanel,
    pub mean_ci: f64,
}

fn top_gap(w: &PriorityVector) -> f64 {
    let order = w.order();
    w[order[0]] - w[order[1]]
}

/// Builds `sum(counts) * alphas.len()` scenarios of `panel_size` experts each.
pub fn generate_corpus(cfg: &CorpusConfig) -> Result<Vec<Scenario>> {
    if cfg.panel_size == 0 {
        return Err(Error::domain("panel_size must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut drafts = Vec::new();
    for (&n, &count) in &cfg.counts {
        for _ in 0..count {
            let base = loop {
                let w = cfg.base_distribution.sample(n, &mut rng)?;
                if top_gap(&w) >= MIN_TOP_GAP {
                    break w;
                }
            };
            let consistent = PcMatrix::consistent(&base)?;
            for &alpha in &cfg.alphas {
                let matrices = (0..cfg.panel_size)
                    .map(|_| perturb(&consistent, alpha, cfg.epsilon_distribution, &mut rng))
                    .collect::<Result<Vec<_>>>()?;
                drafts.push((base.clone(), alpha, ExpertPanel::new(matrices)?));
            }
        }
    }
    drafts
        .into_par_iter()
        .enumerate()
        .map(|(id, (base_vector, alpha, panel))| {
            let mean_ci = panel_mean_ci(&panel)?;
            Ok(Scenario {
                id,
                base_vector,
                alpha,
                panel,
                mean_ci,
            })
        })
        .collect()
}

/// Which form of an aggregate the experiment distances compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreScale {
    /// Weighted geometric means as computed, without renormalization.
    Raw,
    /// Priorities normalized to sum one.
    #[default]
    Normalized,
}

impl ScoreScale {
    pub fn scores(self, agg: &Aggregation) -> &[f64] {
        match self {
            ScoreScale::Raw => &agg.raw_scores,
            ScoreScale::Normalized => agg.priorities.as_slice(),
        }
    }
}

/// Method and attack settings for both experiments.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExperimentConfig {
    pub robust: RobustConfig,
    pub attack: AttackConfig,
    pub distance_scores: ScoreScale,
}

/// Outcome of a defense against a successful attack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Restoration {
    Failure,
    /// Winner and runner-up restored (WR).
    Winner,
    /// Entire honest order restored (RR); implies WR.
    Ranking,
}

impl Restoration {
    pub fn classify(honest: &PriorityVector, restored: &PriorityVector) -> Self {
        let (h, r) = (honest.order(), restored.order());
        if h == r {
            Restoration::Ranking
        } else if h[..2] == r[..2] {
            Restoration::Winner
        } else {
            Restoration::Failure
        }
    }

    pub fn winner_restored(self) -> bool {
        self >= Restoration::Winner
    }

    pub fn ranking_restored(self) -> bool {
        self == Restoration::Ranking
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Restoration::Failure => "failure",
            Restoration::Winner => "wr",
            Restoration::Ranking => "rr",
        }
    }
}

impl fmt::Display for Restoration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefenseResult {
    pub method: Method,
    pub restoration: Restoration,
    pub restored: PriorityVector,
    /// `manhattan_mean(honest, restored)`.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment1Record {
    pub scenario_id: usize,
    pub n: usize,
    pub alpha: f64,
    pub mean_ci: f64,
    pub bribes_used: usize,
    pub attack_succeeded: bool,
    pub vacuous: bool,
    pub honest: PriorityVector,
    pub defenses: Vec<DefenseResult>,
}

impl Experiment1Record {
    /// Counts toward restoration rates: a real, successful attack.
    pub fn is_eligible(&self) -> bool {
        self.attack_succeeded && !self.vacuous
    }
}

fn in_pool<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match workers {
        None => Ok(f()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::domain(format!("cannot build worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn experiment1_one(s: &Scenario, cfg: &ExperimentConfig) -> Result<Experiment1Record> {
    let attack = run_attack(&s.panel, &cfg.attack)?;
    let honest = attack.honest.priorities.clone();
    let honest_scores = cfg.distance_scores.scores(&attack.honest);
    let analysis = PanelAnalysis::new(&attack.manipulated_panel);
    let defenses = Method::ROBUST
        .iter()
        .map(|&method| {
            let restored = analysis.aggregate(method, &cfg.robust)?.aggregation;
            Ok(DefenseResult {
                method,
                restoration: Restoration::classify(&honest, &restored.priorities),
                distance: manhattan_mean(honest_scores, cfg.distance_scores.scores(&restored))?,
                restored: restored.priorities,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Experiment1Record {
        scenario_id: s.id,
        n: s.panel.n(),
        alpha: s.alpha,
        mean_ci: s.mean_ci,
        bribes_used: attack.bribed.len(),
        attack_succeeded: attack.succeeded,
        vacuous: attack.vacuous,
        honest,
        defenses,
    })
}

/// Attack every scenario, then defend with APDD, AID and MX.
pub fn experiment1(scenarios: &[Scenario], cfg: &ExperimentConfig, workers: Option<usize>) -> Result<Vec<Experiment1Record>> {
    in_pool(workers, || {
        scenarios
            .par_iter()
            .map(|s| experiment1_one(s, cfg))
            .collect::<Result<Vec<_>>>()
    })?
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disturbance {
    pub method: Method,
    /// `manhattan_mean(classic, robust)`.
    pub distance: f64,
    /// Kendall distance between the two rankings.
    pub kendall: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment2Record {
    pub scenario_id: usize,
    pub n: usize,
    pub alpha: f64,
    pub mean_ci: f64,
    pub disturbances: Vec<Disturbance>,
}

fn experiment2_one(s: &Scenario, cfg: &ExperimentConfig) -> Result<Experiment2Record> {
    let honest = aggregate_panel_equal(&s.panel)?;
    let analysis = PanelAnalysis::new(&s.panel);
    let disturbances = Method::ROBUST
        .iter()
        .map(|&method| {
            let robust = analysis.aggregate(method, &cfg.robust)?.aggregation;
            Ok(Disturbance {
                method,
                distance: manhattan_mean(
                    cfg.distance_scores.scores(&honest),
                    cfg.distance_scores.scores(&robust),
                )?,
                kendall: kendall_tau_distance(honest.priorities.as_slice(), robust.priorities.as_slice())?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Experiment2Record {
        scenario_id: s.id,
        n: s.panel.n(),
        alpha: s.alpha,
        mean_ci: s.mean_ci,
        disturbances,
    })
}

/// Compare the robust methods with classical AIP on honest panels.
pub fn experiment2(scenarios: &[Scenario], cfg: &ExperimentConfig, workers: Option<usize>) -> Result<Vec<Experiment2Record>> {
    in_pool(workers, || {
        scenarios
            .par_iter()
            .map(|s| experiment2_one(s, cfg))
            .collect::<Result<Vec<_>>>()
    })?
}

/// Which records a summary row covers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bucket {
    /// Mean CI in `(edge - width, edge]`, labeled by its upper edge.
    Upper(f64),
    /// Mean CI `<=` the value.
    AtMost(f64),
    All,
}

impl Bucket {
    fn sort_key(&self) -> (u8, f64) {
        match *self {
            Bucket::Upper(x) => (0, x),
            Bucket::AtMost(x) => (1, x),
            Bucket::All => (2, 0.0),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Bucket::Upper(x) => format_sig(x, 6),
            Bucket::AtMost(x) => format!("<={}", format_sig(x, 6)),
            Bucket::All => "all".to_string(),
        }
    }

    fn of(ci: f64, width: f64) -> Self {
        // a CI sitting exactly on an edge belongs to the bucket it closes
        let idx = ((ci / width).ceil() as i64).max(1);
        Bucket::Upper(round_label(idx as f64 * width))
    }
}

fn round_label(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

/// One line of a summary table.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub bucket: Bucket,
    pub method: String,
    pub metric: String,
    pub value: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub rows: Vec<SummaryRow>,
}

impl Report {
    fn push(&mut self, bucket: Bucket, method: &str, metric: &str, value: f64, count: usize) {
        self.rows.push(SummaryRow {
            bucket,
            method: method.to_string(),
            metric: metric.to_string(),
            value,
            count,
        });
    }

    fn sort(&mut self) {
        self.rows.sort_by(|a, b| {
            a.metric
                .cmp(&b.metric)
                .then_with(|| a.method.cmp(&b.method))
                .then_with(|| a.bucket.sort_key().partial_cmp(&b.bucket.sort_key()).expect("finite bucket edges"))
        });
    }

    pub fn find(&self, metric: &str, method: &str, bucket: &str) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.metric == metric && r.method == method && r.bucket.label() == bucket)
    }
}

fn mean(values: impl Iterator<Item = f64>) -> (f64, usize) {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        (f64::NAN, 0)
    } else {
        (sum / count as f64, count)
    }
}

fn check_width(width: f64) -> Result<()> {
    if width > 0.0 && width.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("CI bucket width must be positive, got {width}")))
    }
}

fn bucket_groups<T>(items: &[T], width: f64, ci: impl Fn(&T) -> f64) -> Vec<(Bucket, Vec<&T>)> {
    let mut groups: Vec<(Bucket, Vec<&T>)> = Vec::new();
    let mut by_edge: BTreeMap<i64, usize> = BTreeMap::new();
    for item in items {
        let bucket = Bucket::of(ci(item), width);
        let key = match bucket {
            Bucket::Upper(x) => (x * 1e9).round() as i64,
            _ => unreachable!(),
        };
        let slot = *by_edge.entry(key).or_insert_with(|| {
            groups.push((bucket, Vec::new()));
            groups.len() - 1
        });
        groups[slot].1.push(item);
    }
    let at_most: Vec<&T> = items.iter().filter(|r| ci(r) <= HEADLINE_CI).collect();
    groups.push((Bucket::AtMost(HEADLINE_CI), at_most));
    groups.push((Bucket::All, items.iter().collect()));
    groups
}

/// Per-bucket WR/RR rates and mean restored-vs-honest distance per method,
/// plus attack statistics. Only successful, non-vacuous attacks count toward
/// the restoration rates.
pub fn summarize_experiment1(records: &[Experiment1Record], width: f64) -> Result<Report> {
    if records.is_empty() {
        return Err(Error::EmptyReport);
    }
    check_width(width)?;
    let mut report = Report::default();
    for (bucket, group) in bucket_groups(records, width, |r| r.mean_ci) {
        let eligible: Vec<_> = group.iter().filter(|r| r.is_eligible()).collect();
        for (m, method) in Method::ROBUST.iter().enumerate() {
            let name = method.as_str();
            let (wr, c) = mean(eligible.iter().map(|r| r.defenses[m].restoration.winner_restored() as u8 as f64));
            if c > 0 {
                report.push(bucket, name, "wr_rate", wr, c);
                let (rr, _) = mean(eligible.iter().map(|r| r.defenses[m].restoration.ranking_restored() as u8 as f64));
                report.push(bucket, name, "rr_rate", rr, c);
                let (d, _) = mean(eligible.iter().map(|r| r.defenses[m].distance));
                report.push(bucket, name, "mean_manhattan", d, c);
            }
        }
        if !group.is_empty() {
            let (s, c) = mean(group.iter().map(|r| r.attack_succeeded as u8 as f64));
            report.push(bucket, "attack", "success_rate", s, c);
        }
        if !eligible.is_empty() {
            let (b, c) = mean(eligible.iter().map(|r| r.bribes_used as f64));
            report.push(bucket, "attack", "mean_bribes", b, c);
            let (le3, _) = mean(eligible.iter().map(|r| (r.bribes_used <= 3) as u8 as f64));
            report.push(bucket, "attack", "share_le3_bribes", le3, c);
        }
    }
    report.sort();
    Ok(report)
}

/// Per-bucket mean distance between classical and robust rankings per
/// method, and the Kendall-distance distribution for mean CI `<= 0.1`.
pub fn summarize_experiment2(records: &[Experiment2Record], width: f64) -> Result<Report> {
    if records.is_empty() {
        return Err(Error::EmptyReport);
    }
    check_width(width)?;
    let mut report = Report::default();
    let max_swaps = records.iter().map(|r| r.n * (r.n - 1) / 2).max().unwrap_or(0);
    for (bucket, group) in bucket_groups(records, width, |r| r.mean_ci) {
        if group.is_empty() {
            continue;
        }
        for (m, method) in Method::ROBUST.iter().enumerate() {
            let name = method.as_str();
            let (d, c) = mean(group.iter().map(|r| r.disturbances[m].distance));
            report.push(bucket, name, "mean_manhattan", d, c);
            let (k0, _) = mean(group.iter().map(|r| (r.disturbances[m].kendall == 0) as u8 as f64));
            report.push(bucket, name, "kendall0_rate", k0, c);
            if matches!(bucket, Bucket::AtMost(_)) {
                for swaps in 0..=max_swaps {
                    let (p, _) = mean(group.iter().map(|r| (r.disturbances[m].kendall == swaps) as u8 as f64));
                    report.push(bucket, name, &format!("kendall_p{swaps:02}"), p, c);
                }
            }
        }
    }
    report.sort();
    Ok(report)
}

/// Headline numbers for one robust method in experiment 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestorationStats {
    pub method: Method,
    pub wr_rate: f64,
    pub rr_rate: f64,
    pub mean_distance: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment1Headline {
    pub scenarios: usize,
    pub attack_success_rate: f64,
    /// Among successful attacks, the share needing at most three bribes.
    pub share_le3_bribes: f64,
    /// Restoration statistics over scenarios with mean CI `<= 0.1`.
    pub methods: Vec<RestorationStats>,
}

pub fn experiment1_headline(records: &[Experiment1Record]) -> Result<Experiment1Headline> {
    if records.is_empty() {
        return Err(Error::EmptyReport);
    }
    let eligible: Vec<_> = records.iter().filter(|r| r.is_eligible()).collect();
    let (attack_success_rate, _) = mean(records.iter().map(|r| r.attack_succeeded as u8 as f64));
    let (share_le3_bribes, _) = mean(eligible.iter().map(|r| (r.bribes_used <= 3) as u8 as f64));
    let low: Vec<_> = eligible.iter().filter(|r| r.mean_ci <= HEADLINE_CI).collect();
    let methods = Method::ROBUST
        .iter()
        .enumerate()
        .map(|(m, &method)| {
            let (wr_rate, count) = mean(low.iter().map(|r| r.defenses[m].restoration.winner_restored() as u8 as f64));
            let (rr_rate, _) = mean(low.iter().map(|r| r.defenses[m].restoration.ranking_restored() as u8 as f64));
            let (mean_distance, _) = mean(low.iter().map(|r| r.defenses[m].distance));
            RestorationStats {
                method,
                wr_rate,
                rr_rate,
                mean_distance,
                count,
            }
        })
        .collect();
    Ok(Experiment1Headline {
        scenarios: records.len(),
        attack_success_rate,
        share_le3_bribes,
        methods,
    })
}

impl fmt::Display for Experiment1Headline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenarios: {}", self.scenarios)?;
        writeln!(f, "attack success_rate {:.4}", self.attack_success_rate)?;
        writeln!(f, "attack share_le3_bribes {:.4}", self.share_le3_bribes)?;
        for s in &self.methods {
            writeln!(
                f,
                "{} ci<=0.1 wr_rate {:.4} rr_rate {:.4} mean_manhattan {:.4} (n={})",
                s.method, s.wr_rate, s.rr_rate, s.mean_distance, s.count
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisturbanceStats {
    pub method: Method,
    /// Corpus-wide mean `manhattan_mean(classic, robust)`.
    pub mean_distance: f64,
    /// Share of scenarios with mean CI `<= 0.1` whose order is unchanged.
    pub kendall0_rate: f64,
    pub low_ci_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment2Headline {
    pub scenarios: usize,
    pub methods: Vec<DisturbanceStats>,
}

pub fn experiment2_headline(records: &[Experiment2Record]) -> Result<Experiment2Headline> {
    if records.is_empty() {
        return Err(Error::EmptyReport);
    }
    let low: Vec<_> = records.iter().filter(|r| r.mean_ci <= HEADLINE_CI).collect();
    let methods = Method::ROBUST
        .iter()
        .enumerate()
        .map(|(m, &method)| {
            let (mean_distance, _) = mean(records.iter().map(|r| r.disturbances[m].distance));
            let (kendall0_rate, low_ci_count) = mean(low.iter().map(|r| (r.disturbances[m].kendall == 0) as u8 as f64));
            DisturbanceStats {
                method,
                mean_distance,
                kendall0_rate,
                low_ci_count,
            }
        })
        .collect();
    Ok(Experiment2Headline {
        scenarios: records.len(),
        methods,
    })
}

impl fmt::Display for Experiment2Headline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenarios: {}", self.scenarios)?;
        for s in &self.methods {
            writeln!(
                f,
                "{} mean_manhattan {:.4} kendall0_rate(ci<=0.1) {:.4} (n={})",
                s.method, s.mean_distance, s.kendall0_rate, s.low_ci_count
            )?;
        }
        Ok(())
    }
}

/// Formats like C's `%.{digits}g`: `digits` significant digits, trailing
/// zeros removed, scientific notation outside `[1e-5, 10^digits)`.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn priority_vectors_are_normalized_and_reproducible() {
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        for n in 2..9 {
            let v = random_priority_vector(n, &mut a).unwrap();
            assert!((v.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let w = random_priority_vector(n, &mut b).unwrap();
            assert_eq!(v, w);
        }
        assert!(random_priority_vector(1, &mut a).is_err());
    }

    #[test]
    fn unit_alpha_leaves_matrix_alone() {
        let w = PriorityVector::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let c = PcMatrix::consistent(&w).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(perturb(&c, 1.0, EpsilonDistribution::LogUniform, &mut rng).unwrap(), c);
        assert!(matches!(
            perturb(&c, 0.9, EpsilonDistribution::LogUniform, &mut rng),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn perturbation_factors_stay_in_bounds() {
        let w = PriorityVector::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let c = PcMatrix::consistent(&w).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dist in [EpsilonDistribution::LogUniform, EpsilonDistribution::Uniform] {
            for _ in 0..200 {
                let p = perturb(&c, 2.5, dist, &mut rng).unwrap();
                for i in 0..4 {
                    for j in 0..4 {
                        let eps = p.get(i, j) / c.get(i, j);
                        assert!((1.0 / 2.5 - 1e-12..=2.5 + 1e-12).contains(&eps), "{eps}");
                    }
                }
            }
        }
    }

    #[test]
    fn corpus_size_and_determinism() {
        let cfg = CorpusConfig {
            seed: 11,
            counts: BTreeMap::from([(5, 4), (6, 3), (7, 3)]),
            alphas: default_alphas().into_iter().step_by(4).collect(),
            panel_size: 3,
            ..CorpusConfig::default()
        };
        assert_eq!(cfg.alphas.len(), 10);
        let a = generate_corpus(&cfg).unwrap();
        assert_eq!(a.len(), 100);
        assert!(a.iter().enumerate().all(|(i, s)| s.id == i && s.panel.k() == 3));
        let b = generate_corpus(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn default_grid_has_forty_alphas() {
        let alphas = default_alphas();
        assert_eq!(alphas.len(), 40);
        assert_eq!((alphas[0], alphas[39]), (1.1, 5.0));
        assert_eq!(default_counts().values().sum::<usize>() * alphas.len(), 4000);
    }

    #[test]
    fn restoration_classes() {
        let honest = PriorityVector::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let same = PriorityVector::new(vec![0.35, 0.33, 0.2, 0.12]).unwrap();
        let wr = PriorityVector::new(vec![0.35, 0.33, 0.12, 0.2]).unwrap();
        let fail = PriorityVector::new(vec![0.3, 0.4, 0.2, 0.1]).unwrap();
        assert_eq!(Restoration::classify(&honest, &same), Restoration::Ranking);
        assert_eq!(Restoration::classify(&honest, &wr), Restoration::Winner);
        assert_eq!(Restoration::classify(&honest, &fail), Restoration::Failure);
        assert!(Restoration::Ranking.winner_restored());
        assert!(!Restoration::Winner.ranking_restored());
    }

    #[test]
    fn buckets_use_upper_edges() {
        assert_eq!(Bucket::of(0.004, 0.01).label(), "0.01");
        assert_eq!(Bucket::of(0.01, 0.01).label(), "0.01");
        assert_eq!(Bucket::of(0.0101, 0.01).label(), "0.02");
        assert_eq!(Bucket::of(0.0, 0.01).label(), "0.01");
        assert_eq!(Bucket::AtMost(0.1).label(), "<=0.1");
    }

    #[test]
    fn empty_summaries_are_errors() {
        assert_eq!(summarize_experiment1(&[], 0.01), Err(Error::EmptyReport));
        assert_eq!(summarize_experiment2(&[], 0.01), Err(Error::EmptyReport));
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(0.0336123456, 6), "0.0336123");
        assert_eq!(format_sig(0.5, 6), "0.5");
        assert_eq!(format_sig(123456789.0, 6), "1.23457e+08");
        assert_eq!(format_sig(0.0000012345, 6), "1.2345e-06");
        assert_eq!(format_sig(100.0, 6), "100");
        assert_eq!(format_sig(-2.25, 6), "-2.25");
        assert_eq!(format_sig(0.0, 6), "0");
    }
}

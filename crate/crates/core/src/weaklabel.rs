//! Weak labeling functions over engagement signals and their threshold
//! calibration against a labeled validation set.
//!
//! Each rule reduces a news item's engaging users to one statistic and
//! thresholds it:
//!
//! * sentiment: population std of per-user mean sentiment `> tau1` is fake
//! * bias: mean absolute user bias `> tau2` is fake
//! * credibility: mean user credibility `< tau3` is fake
//!
//! Items with fewer than `min_support` contributing users abstain.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::{Dataset, Label};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::metrics::Confusion;
use crate::signals::SignalTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Sentiment,
    Bias,
    Credibility,
}

impl Source {
    pub const ALL: [Source; 3] = [Source::Sentiment, Source::Bias, Source::Credibility];

    pub fn name(self) -> &'static str {
        match self {
            Source::Sentiment => "sentiment",
            Source::Bias => "bias",
            Source::Credibility => "credibility",
        }
    }

    pub fn parse(s: &str) -> Option<Source> {
        Source::ALL.into_iter().find(|src| src.name() == s)
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeakLabel {
    Fake,
    Real,
    Abstain,
}

impl WeakLabel {
    pub fn as_label(self) -> Option<Label> {
        match self {
            WeakLabel::Fake => Some(Label::Fake),
            WeakLabel::Real => Some(Label::Real),
            WeakLabel::Abstain => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeakLabelerConfig {
    pub tau1: f64,
    pub tau2: f64,
    pub tau3: f64,
    pub min_support: usize,
}

impl Default for WeakLabelerConfig {
    fn default() -> Self {
        WeakLabelerConfig {
            tau1: 0.3,
            tau2: 0.5,
            tau3: 0.5,
            min_support: 3,
        }
    }
}

impl WeakLabelerConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.tau1 >= 0.0
            && (0.0..=1.0).contains(&self.tau2)
            && (0.0..=1.0).contains(&self.tau3)
            && self.min_support >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("weak labeler thresholds out of bounds: {self:?}")))
        }
    }

    pub fn threshold(&self, source: Source) -> f64 {
        match source {
            Source::Sentiment => self.tau1,
            Source::Bias => self.tau2,
            Source::Credibility => self.tau3,
        }
    }

    fn set_threshold(&mut self, source: Source, tau: f64) {
        match source {
            Source::Sentiment => self.tau1 = tau,
            Source::Bias => self.tau2 = tau,
            Source::Credibility => self.tau3 = tau,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeakLabelSet {
    pub source: Source,
    pub labels: BTreeMap<String, WeakLabel>,
}

/// One exported weak label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeakLabelRecord {
    pub news_id: String,
    pub source: Source,
    pub label: WeakLabel,
}

impl WeakLabelSet {
    /// Records in news-id order.
    pub fn records(&self) -> Vec<WeakLabelRecord> {
        self.labels
            .iter()
            .map(|(id, &label)| WeakLabelRecord {
                news_id: id.clone(),
                source: self.source,
                label,
            })
            .collect()
    }

    pub fn from_records(records: &[WeakLabelRecord]) -> Vec<WeakLabelSet> {
        let mut sets: BTreeMap<Source, BTreeMap<String, WeakLabel>> = BTreeMap::new();
        for r in records {
            sets.entry(r.source).or_default().insert(r.news_id.clone(), r.label);
        }
        sets.into_iter()
            .map(|(source, labels)| WeakLabelSet { source, labels })
            .collect()
    }

    pub fn count(&self, label: WeakLabel) -> usize {
        self.labels.values().filter(|&&l| l == label).count()
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn population_std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Per-user values feeding a rule, for every news item in dataset order.
fn per_user_values(d: &Dataset, sig: &SignalTable, source: Source) -> Vec<Vec<f64>> {
    let idx = d.index();
    Exec::current().map_range(d.news.len(), |pos| {
        let users = idx.engagers_at(pos);
        match source {
            Source::Sentiment => {
                let mut per_user: HashMap<&str, (f64, usize)> = HashMap::new();
                for &ei in &idx.by_news[pos] {
                    let e = &d.engagements[ei];
                    if let Some(&s) = sig.sentiment_by_engagement.get(&e.id) {
                        let acc = per_user.entry(e.user_id.as_str()).or_insert((0.0, 0));
                        acc.0 += s;
                        acc.1 += 1;
                    }
                }
                users
                    .iter()
                    .filter_map(|u| per_user.get(u).map(|&(s, n)| s / n as f64))
                    .collect()
            }
            Source::Bias => users
                .iter()
                .filter_map(|u| sig.bias_by_user.get(*u).map(|b| b.abs()))
                .collect(),
            Source::Credibility => users
                .iter()
                .filter_map(|u| sig.credibility_by_user.get(*u).copied())
                .collect(),
        }
    })
}

/// The statistic each rule thresholds, `None` where support is insufficient.
pub fn rule_statistics(
    d: &Dataset,
    sig: &SignalTable,
    source: Source,
    min_support: usize,
) -> Vec<Option<f64>> {
    per_user_values(d, sig, source)
        .into_iter()
        .map(|vals| {
            if vals.len() < min_support || vals.is_empty() {
                None
            } else {
                Some(match source {
                    Source::Sentiment => population_std(&vals),
                    Source::Bias | Source::Credibility => mean(&vals),
                })
            }
        })
        .collect()
}

/// Verdict of `source` at threshold `tau` for one statistic.
pub fn decide(source: Source, stat: Option<f64>, tau: f64) -> WeakLabel {
    let Some(s) = stat else {
        return WeakLabel::Abstain;
    };
    let fake = match source {
        Source::Sentiment | Source::Bias => s > tau,
        Source::Credibility => s < tau,
    };
    if fake {
        WeakLabel::Fake
    } else {
        WeakLabel::Real
    }
}

pub fn label_with(d: &Dataset, sig: &SignalTable, cfg: &WeakLabelerConfig, source: Source) -> WeakLabelSet {
    let tau = cfg.threshold(source);
    let labels = d
        .news
        .iter()
        .zip(rule_statistics(d, sig, source, cfg.min_support))
        .map(|(n, stat)| (n.id.clone(), decide(source, stat, tau)))
        .collect();
    WeakLabelSet { source, labels }
}

pub fn label_sentiment(d: &Dataset, sig: &SignalTable, cfg: &WeakLabelerConfig) -> WeakLabelSet {
    label_with(d, sig, cfg, Source::Sentiment)
}

pub fn label_bias(d: &Dataset, sig: &SignalTable, cfg: &WeakLabelerConfig) -> WeakLabelSet {
    label_with(d, sig, cfg, Source::Bias)
}

pub fn label_credibility(d: &Dataset, sig: &SignalTable, cfg: &WeakLabelerConfig) -> WeakLabelSet {
    label_with(d, sig, cfg, Source::Credibility)
}

pub fn label_all(d: &Dataset, sig: &SignalTable, cfg: &WeakLabelerConfig) -> Vec<WeakLabelSet> {
    Source::ALL.iter().map(|&s| label_with(d, sig, cfg, s)).collect()
}

/// Candidate thresholds per rule.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdGrid {
    pub tau1: Vec<f64>,
    pub tau2: Vec<f64>,
    pub tau3: Vec<f64>,
}

impl Default for ThresholdGrid {
    fn default() -> Self {
        let steps = |hi: f64, n: usize| (0..=n).map(|i| hi * i as f64 / n as f64).collect::<Vec<_>>();
        ThresholdGrid {
            tau1: steps(1.0, 200),
            tau2: steps(1.0, 100),
            tau3: steps(1.0, 100),
        }
    }
}

impl ThresholdGrid {
    fn for_source(&self, source: Source) -> &[f64] {
        match source {
            Source::Sentiment => &self.tau1,
            Source::Bias => &self.tau2,
            Source::Credibility => &self.tau3,
        }
    }
}

/// Macro-averaged F1 of a rule's verdicts on labeled items, abstains excluded.
pub fn rule_f1(source: Source, stats: &[(Option<f64>, Label)], tau: f64) -> f64 {
    Confusion::from_pairs(
        stats
            .iter()
            .filter_map(|&(s, truth)| decide(source, s, tau).as_label().map(|p| (p, truth))),
    )
    .macro_f1()
}

/// Grid-search each threshold independently on the clean-labeled news of
/// `validation`; ties go to the smaller threshold. `min_support` is kept.
pub fn calibrate_thresholds(
    validation: &Dataset,
    sig: &SignalTable,
    grid: &ThresholdGrid,
    base: &WeakLabelerConfig,
) -> Result<WeakLabelerConfig> {
    let labels: Vec<Option<Label>> = validation.news.iter().map(|n| n.clean_label).collect();
    let has = |l: Label| labels.iter().any(|&x| x == Some(l));
    if !has(Label::Fake) || !has(Label::Real) {
        return Err(Error::Calibration(
            "validation set needs at least one fake and one real clean label".into(),
        ));
    }
    let mut cfg = base.clone();
    for source in Source::ALL {
        let candidates = grid.for_source(source);
        if candidates.is_empty() {
            return Err(Error::Calibration(format!("empty grid for {source}")));
        }
        let stats: Vec<(Option<f64>, Label)> = rule_statistics(validation, sig, source, base.min_support)
            .into_iter()
            .zip(&labels)
            .filter_map(|(s, l)| l.map(|l| (s, l)))
            .collect();
        let mut sorted = candidates.to_vec();
        sorted.sort_by(f64::total_cmp);
        let scores = Exec::current().map(&sorted, |&tau| rule_f1(source, &stats, tau));
        let mut best = 0;
        for (i, &s) in scores.iter().enumerate() {
            if s > scores[best] {
                best = i;
            }
        }
        cfg.set_threshold(source, sorted[best]);
    }
    Ok(cfg)
}

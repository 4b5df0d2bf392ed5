//! Per-text sentiment, per-user bias and per-user credibility.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{read_jsonl, Dataset, EngagementKind, User};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::text::tokenize;

/// Normalization constant of the compound score `s / sqrt(s^2 + 15)`.
pub const SENTIMENT_ALPHA: f64 = 15.0;
/// Preceding tokens inspected for negators and boosters.
pub const MODIFIER_WINDOW: usize = 3;
pub const DEFAULT_CREDIBILITY_THETA: f64 = 0.5;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SentimentLexicon {
    pub valence: HashMap<String, f64>,
    pub negators: HashSet<String>,
    pub boosters: HashMap<String, f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryKind {
    #[default]
    Valence,
    Negator,
    Booster,
}

/// One line of a lexicon or seed-bias file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TokenValue {
    pub token: String,
    pub value: f64,
    #[serde(default, skip_serializing_if = "is_valence")]
    pub kind: EntryKind,
}

fn is_valence(k: &EntryKind) -> bool {
    *k == EntryKind::Valence
}

const BUILTIN_VALENCE: &[(&str, f64)] = &[
    ("good", 1.9),
    ("great", 3.1),
    ("excellent", 2.7),
    ("love", 3.2),
    ("like", 1.5),
    ("happy", 2.7),
    ("glad", 2.0),
    ("nice", 1.8),
    ("fine", 0.8),
    ("okay", 0.9),
    ("agree", 1.5),
    ("true", 1.1),
    ("helpful", 1.7),
    ("trust", 2.3),
    ("hope", 1.9),
    ("calm", 1.3),
    ("fair", 1.3),
    ("win", 2.8),
    ("safe", 1.9),
    ("thanks", 1.9),
    ("bad", -2.5),
    ("terrible", -2.1),
    ("awful", -2.0),
    ("hate", -2.7),
    ("angry", -2.3),
    ("sad", -2.1),
    ("wrong", -2.1),
    ("lie", -1.6),
    ("fake", -2.1),
    ("scary", -2.2),
    ("outrage", -2.3),
    ("disgusting", -2.4),
    ("fear", -2.2),
    ("worry", -1.9),
    ("dumb", -2.3),
    ("shame", -2.1),
    ("corrupt", -3.0),
    ("disaster", -3.1),
    ("doubt", -1.5),
    ("meh", -0.3),
];

const BUILTIN_NEGATORS: &[&str] = &[
    "not", "no", "never", "nothing", "none", "nobody", "neither", "nor", "without", "cannot",
    "isnt", "dont", "doesnt", "didnt", "wasnt", "arent", "wont",
];

const BUILTIN_BOOSTERS: &[(&str, f64)] = &[
    ("very", 0.293),
    ("really", 0.293),
    ("extremely", 0.293),
    ("so", 0.293),
    ("totally", 0.293),
    ("absolutely", 0.293),
    ("incredibly", 0.293),
    ("completely", 0.293),
];

const BUILTIN_SEED_BIAS: &[(&str, f64)] = &[
    ("progressive", -0.8),
    ("union", -0.6),
    ("climate", -0.5),
    ("equality", -0.7),
    ("welfare", -0.6),
    ("immigrants", -0.4),
    ("conservative", 0.8),
    ("taxcuts", 0.7),
    ("border", 0.6),
    ("liberty", 0.5),
    ("guns", 0.7),
    ("tradition", 0.5),
];

impl SentimentLexicon {
    /// Small general-purpose lexicon with the usual negators and a 0.293
    /// booster increment.
    pub fn builtin() -> Self {
        SentimentLexicon {
            valence: BUILTIN_VALENCE.iter().map(|&(t, v)| (t.to_owned(), v)).collect(),
            negators: BUILTIN_NEGATORS.iter().map(|&t| t.to_owned()).collect(),
            boosters: BUILTIN_BOOSTERS.iter().map(|&(t, v)| (t.to_owned(), v)).collect(),
        }
    }

    pub fn from_entries(entries: &[TokenValue]) -> Result<Self> {
        let mut lex = SentimentLexicon::default();
        for e in entries {
            let token = e.token.to_lowercase();
            match e.kind {
                EntryKind::Valence => {
                    lex.valence.insert(token, e.value);
                }
                EntryKind::Negator => {
                    lex.negators.insert(token);
                }
                EntryKind::Booster => {
                    lex.boosters.insert(token, e.value);
                }
            }
        }
        lex.validate()?;
        Ok(lex)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_entries(&read_jsonl(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some((t, _)) = self.valence.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::validation(t, "lexicon valence is not finite"));
        }
        if let Some((t, _)) = self.boosters.iter().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::validation(t, "booster increment must be positive"));
        }
        Ok(())
    }
}

pub fn builtin_seed_bias() -> HashMap<String, f64> {
    BUILTIN_SEED_BIAS.iter().map(|&(t, v)| (t.to_owned(), v)).collect()
}

pub fn load_seed_bias(path: &Path) -> Result<HashMap<String, f64>> {
    let entries: Vec<TokenValue> = read_jsonl(path)?;
    entries
        .into_iter()
        .map(|e| {
            if (-1.0..=1.0).contains(&e.value) {
                Ok((e.token.to_lowercase(), e.value))
            } else {
                Err(Error::validation(e.token, "seed bias outside [-1, 1]"))
            }
        })
        .collect()
}

/// Raw valence sum before normalization.
pub fn raw_sentiment(text: &str, lexicon: &SentimentLexicon) -> f64 {
    let tokens = tokenize(text);
    let mut sum = 0.0;
    for (i, tok) in tokens.iter().enumerate() {
        let Some(&v) = lexicon.valence.get(tok) else {
            continue;
        };
        if v == 0.0 {
            continue;
        }
        let window = &tokens[i.saturating_sub(MODIFIER_WINDOW)..i];
        let mut adjusted = v;
        for w in window {
            if let Some(inc) = lexicon.boosters.get(w) {
                adjusted += inc * v.signum();
            }
        }
        if window.iter().any(|w| lexicon.negators.contains(w)) {
            adjusted = -adjusted;
        }
        sum += adjusted;
    }
    sum
}

/// Compound sentiment in (-1, 1).
pub fn score_sentiment(text: &str, lexicon: &SentimentLexicon) -> f64 {
    normalize_sentiment(raw_sentiment(text, lexicon))
}

pub fn normalize_sentiment(s: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        s / (s * s + SENTIMENT_ALPHA).sqrt()
    }
}

/// Mean seed-bias over every matched token in the user's history.
pub fn user_bias(user: &User, seed_bias: &HashMap<String, f64>) -> f64 {
    let (sum, n) = user
        .history_texts
        .iter()
        .flat_map(|t| tokenize(t))
        .filter_map(|t| seed_bias.get(&t).copied())
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        (sum / n as f64).clamp(-1.0, 1.0)
    }
}

fn jaccard(a: &[usize], b: &[usize]) -> f64 {
    let (mut i, mut j, mut inter) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Single-linkage cluster size of every user, linking pairs whose Jaccard
/// similarity over engaged news sets is at least `theta`.
pub fn coordination_cluster_sizes(d: &Dataset, theta: f64) -> Vec<usize> {
    let idx = d.index();
    let sets: Vec<Vec<usize>> = idx
        .user_news_sets()
        .into_iter()
        .map(|s| s.into_iter().collect())
        .collect();
    let mut users_of_news: Vec<Vec<usize>> = vec![Vec::new(); d.news.len()];
    for (u, s) in sets.iter().enumerate() {
        for &n in s {
            users_of_news[n].push(u);
        }
    }
    // pairs with no shared news have similarity 0
    let links: Vec<Vec<usize>> = Exec::current().map_range(sets.len(), |u| {
        let mut cand: Vec<usize> = sets[u]
            .iter()
            .flat_map(|&n| users_of_news[n].iter().copied())
            .filter(|&v| v > u)
            .collect();
        cand.sort_unstable();
        cand.dedup();
        cand.retain(|&v| jaccard(&sets[u], &sets[v]) >= theta);
        cand
    });
    let mut parent: Vec<usize> = (0..sets.len()).collect();
    for (u, vs) in links.iter().enumerate() {
        for &v in vs {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                parent[ru.max(rv)] = ru.min(rv);
            }
        }
    }
    let roots: Vec<usize> = (0..sets.len()).map(|u| find(&mut parent, u)).collect();
    let mut size = vec![0usize; sets.len()];
    for &r in &roots {
        size[r] += 1;
    }
    roots.iter().map(|&r| size[r]).collect()
}

/// Credibility in [0, 1]: users in the largest coordination cluster get 0,
/// singletons get 1.
pub fn user_credibility(d: &Dataset, theta: f64) -> BTreeMap<String, f64> {
    let sizes = coordination_cluster_sizes(d, theta);
    let max = sizes.iter().copied().max().unwrap_or(0);
    d.users
        .iter()
        .zip(&sizes)
        .map(|(u, &s)| {
            let c = if max > 1 {
                1.0 - (s - 1) as f64 / (max - 1) as f64
            } else {
                1.0
            };
            (u.id.clone(), c)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentimentScope {
    /// Every engagement carrying text.
    #[default]
    All,
    Replies,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignalsConfig {
    pub credibility_theta: f64,
    pub sentiment_scope: SentimentScope,
}

impl Default for SignalsConfig {
    fn default() -> Self {
        SignalsConfig {
            credibility_theta: DEFAULT_CREDIBILITY_THETA,
            sentiment_scope: SentimentScope::All,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SignalTable {
    pub sentiment_by_engagement: BTreeMap<String, f64>,
    pub bias_by_user: BTreeMap<String, f64>,
    pub credibility_by_user: BTreeMap<String, f64>,
}

pub fn compute_signals(
    d: &Dataset,
    lexicon: &SentimentLexicon,
    seed_bias: &HashMap<String, f64>,
) -> SignalTable {
    compute_signals_with(d, lexicon, seed_bias, &SignalsConfig::default())
}

pub fn compute_signals_with(
    d: &Dataset,
    lexicon: &SentimentLexicon,
    seed_bias: &HashMap<String, f64>,
    cfg: &SignalsConfig,
) -> SignalTable {
    let exec = Exec::current();
    let sentiment = exec
        .map(&d.engagements, |e| {
            let in_scope = cfg.sentiment_scope == SentimentScope::All || e.kind == EngagementKind::Reply;
            match &e.text {
                Some(t) if in_scope => Some((e.id.clone(), score_sentiment(t, lexicon))),
                _ => None,
            }
        })
        .into_iter()
        .flatten()
        .collect();
    let bias = exec
        .map(&d.users, |u| (u.id.clone(), user_bias(u, seed_bias)))
        .into_iter()
        .collect();
    SignalTable {
        sentiment_by_engagement: sentiment,
        bias_by_user: bias,
        credibility_by_user: user_credibility(d, cfg.credibility_theta),
    }
}

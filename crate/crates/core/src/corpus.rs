//! Social-news corpus: data model, validation and JSON Lines storage.
//!
//! A corpus directory holds five files, one JSON object per line:
//! `news.jsonl`, `users.jsonl`, `publishers.jsonl`, `engagements.jsonl` and
//! `friendships.jsonl`. Keys are written in declaration order and absent
//! optional fields are omitted.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const NEWS_FILE: &str = "news.jsonl";
pub const USERS_FILE: &str = "users.jsonl";
pub const PUBLISHERS_FILE: &str = "publishers.jsonl";
pub const ENGAGEMENTS_FILE: &str = "engagements.jsonl";
pub const FRIENDSHIPS_FILE: &str = "friendships.jsonl";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Fake,
    Real,
}

impl Label {
    pub fn is_fake(self) -> bool {
        self == Label::Fake
    }

    /// 1.0 for fake, 0.0 for real.
    pub fn target(self) -> f64 {
        if self.is_fake() {
            1.0
        } else {
            0.0
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Fake => "fake",
            Label::Real => "real",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewsArticle {
    pub id: String,
    pub publisher_id: String,
    pub text: String,
    pub published_at: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clean_label: Option<Label>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct User {
    pub id: String,
    pub history_texts: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Publisher {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partisanship: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngagementKind {
    Post,
    Repost,
    Reply,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Engagement {
    pub id: String,
    pub user_id: String,
    pub news_id: String,
    pub kind: EngagementKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent_id: Option<String>,
    pub timestamp: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

/// Undirected friendship edge between two users.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Friendship {
    pub a: String,
    pub b: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Dataset {
    pub news: Vec<NewsArticle>,
    pub users: Vec<User>,
    pub publishers: Vec<Publisher>,
    pub engagements: Vec<Engagement>,
    pub friendships: Vec<Friendship>,
}

impl Dataset {
    /// Check every referential and structural invariant.
    pub fn validate(&self) -> Result<()> {
        let publishers = unique_ids(self.publishers.iter().map(|p| p.id.as_str()))?;
        for p in &self.publishers {
            if let Some(b) = p.partisanship {
                if !(-1.0..=1.0).contains(&b) {
                    return Err(Error::validation(&p.id, "partisanship outside [-1, 1]"));
                }
            }
        }
        let news = unique_ids(self.news.iter().map(|n| n.id.as_str()))?;
        for n in &self.news {
            if n.text.is_empty() {
                return Err(Error::validation(&n.id, "text is empty"));
            }
            if !publishers.contains(n.publisher_id.as_str()) {
                return Err(Error::validation(
                    &n.id,
                    format!("publisher_id `{}` does not resolve", n.publisher_id),
                ));
            }
        }
        let users = unique_ids(self.users.iter().map(|u| u.id.as_str()))?;

        let mut by_id: HashMap<&str, &Engagement> = HashMap::with_capacity(self.engagements.len());
        for e in &self.engagements {
            if by_id.insert(e.id.as_str(), e).is_some() {
                return Err(Error::validation(&e.id, "duplicate id"));
            }
        }
        for e in &self.engagements {
            if !users.contains(e.user_id.as_str()) {
                return Err(Error::validation(
                    &e.id,
                    format!("user_id `{}` does not resolve", e.user_id),
                ));
            }
            if !news.contains(e.news_id.as_str()) {
                return Err(Error::validation(
                    &e.id,
                    format!("news_id `{}` does not resolve", e.news_id),
                ));
            }
            match (e.kind, &e.parent_id) {
                (EngagementKind::Post, Some(_)) => {
                    return Err(Error::validation(&e.id, "post must not have parent_id"));
                }
                (EngagementKind::Post, None) => {}
                (_, None) => {
                    return Err(Error::validation(&e.id, "repost/reply requires parent_id"));
                }
                (kind, Some(pid)) => {
                    let parent = by_id.get(pid.as_str()).ok_or_else(|| {
                        Error::validation(&e.id, format!("parent_id `{pid}` does not resolve"))
                    })?;
                    if parent.news_id != e.news_id {
                        return Err(Error::validation(&e.id, "parent_id is on a different news item"));
                    }
                    if e.timestamp < parent.timestamp {
                        return Err(Error::validation(&e.id, "timestamp precedes parent's"));
                    }
                    if kind == EngagementKind::Repost && parent.kind == EngagementKind::Reply {
                        return Err(Error::validation(&e.id, "repost parent must be a post or repost"));
                    }
                }
            }
        }
        // parent chains must end at a post; equal timestamps allow cycles
        let mut settled: HashSet<&str> = HashSet::new();
        for e in &self.engagements {
            let mut seen: Vec<&str> = Vec::new();
            let mut cur = e;
            loop {
                if settled.contains(cur.id.as_str()) || cur.kind == EngagementKind::Post {
                    break;
                }
                if seen.contains(&cur.id.as_str()) {
                    return Err(Error::validation(&e.id, "engagement parent chain has a cycle"));
                }
                seen.push(cur.id.as_str());
                // parent presence was checked above
                cur = by_id[cur.parent_id.as_deref().unwrap_or_default()];
            }
            settled.extend(seen);
        }

        let mut pairs: HashSet<(&str, &str)> = HashSet::new();
        for f in &self.friendships {
            for u in [&f.a, &f.b] {
                if !users.contains(u.as_str()) {
                    return Err(Error::validation(u, "friendship user does not resolve"));
                }
            }
            if f.a == f.b {
                return Err(Error::validation(&f.a, "self-friendship"));
            }
            let key = if f.a < f.b {
                (f.a.as_str(), f.b.as_str())
            } else {
                (f.b.as_str(), f.a.as_str())
            };
            if !pairs.insert(key) {
                return Err(Error::validation(
                    format!("{}-{}", key.0, key.1),
                    "duplicate friendship pair",
                ));
            }
        }
        Ok(())
    }

    /// Copy of the dataset with clean labels replaced by `labels` (ids not in
    /// the map end up unlabeled).
    pub fn with_labels(&self, labels: &HashMap<String, Label>) -> Dataset {
        let mut out = self.clone();
        for n in &mut out.news {
            n.clean_label = labels.get(&n.id).copied();
        }
        out
    }

    pub fn index(&self) -> CorpusIndex<'_> {
        CorpusIndex::new(self)
    }
}

fn unique_ids<'a>(ids: impl Iterator<Item = &'a str>) -> Result<HashSet<&'a str>> {
    let mut set = HashSet::new();
    for id in ids {
        if !set.insert(id) {
            return Err(Error::validation(id, "duplicate id"));
        }
    }
    Ok(set)
}

/// Positional lookups over a dataset. Engagement lists per news item and per
/// user keep dataset order.
#[derive(Debug)]
pub struct CorpusIndex<'a> {
    pub dataset: &'a Dataset,
    pub news_pos: HashMap<&'a str, usize>,
    pub user_pos: HashMap<&'a str, usize>,
    pub publisher_pos: HashMap<&'a str, usize>,
    pub engagement_pos: HashMap<&'a str, usize>,
    pub by_news: Vec<Vec<usize>>,
    pub by_user: Vec<Vec<usize>>,
}

impl<'a> CorpusIndex<'a> {
    pub fn new(d: &'a Dataset) -> Self {
        let pos = |ids: Vec<&'a str>| -> HashMap<&'a str, usize> {
            ids.into_iter().enumerate().map(|(i, id)| (id, i)).collect()
        };
        let news_pos = pos(d.news.iter().map(|n| n.id.as_str()).collect());
        let user_pos = pos(d.users.iter().map(|u| u.id.as_str()).collect());
        let publisher_pos = pos(d.publishers.iter().map(|p| p.id.as_str()).collect());
        let engagement_pos = pos(d.engagements.iter().map(|e| e.id.as_str()).collect());
        let mut by_news = vec![Vec::new(); d.news.len()];
        let mut by_user = vec![Vec::new(); d.users.len()];
        for (i, e) in d.engagements.iter().enumerate() {
            if let Some(&n) = news_pos.get(e.news_id.as_str()) {
                by_news[n].push(i);
            }
            if let Some(&u) = user_pos.get(e.user_id.as_str()) {
                by_user[u].push(i);
            }
        }
        CorpusIndex {
            dataset: d,
            news_pos,
            user_pos,
            publisher_pos,
            engagement_pos,
            by_news,
            by_user,
        }
    }

    /// Distinct engaging users of the news item at `pos`, ordered by first
    /// engagement timestamp then user id.
    pub fn engagers_at(&self, pos: usize) -> Vec<&'a str> {
        let mut first: HashMap<&'a str, u64> = HashMap::new();
        for &ei in &self.by_news[pos] {
            let e = &self.dataset.engagements[ei];
            first
                .entry(e.user_id.as_str())
                .and_modify(|t| *t = (*t).min(e.timestamp))
                .or_insert(e.timestamp);
        }
        let mut users: Vec<(u64, &'a str)> = first.into_iter().map(|(u, t)| (t, u)).collect();
        users.sort_unstable();
        users.into_iter().map(|(_, u)| u).collect()
    }

    /// Set of news positions each user engaged with.
    pub fn user_news_sets(&self) -> Vec<BTreeSet<usize>> {
        self.by_user
            .iter()
            .map(|es| {
                es.iter()
                    .filter_map(|&ei| self.news_pos.get(self.dataset.engagements[ei].news_id.as_str()).copied())
                    .collect()
            })
            .collect()
    }
}

/// Users engaging with `news_id`, each once, ordered by their first
/// engagement timestamp (ties by user id).
pub fn engagers_of(d: &Dataset, news_id: &str) -> Result<Vec<String>> {
    let idx = d.index();
    let pos = *idx
        .news_pos
        .get(news_id)
        .ok_or_else(|| Error::NotFound(format!("news `{news_id}`")))?;
    Ok(idx.engagers_at(pos).into_iter().map(str::to_owned).collect())
}

/// Read a JSON Lines file; blank lines are skipped.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file = path
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_default();
    raw.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Parse {
                file: file.clone(),
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

/// Encode records as JSON Lines.
pub fn to_jsonl<T: Serialize>(records: &[T]) -> Vec<u8> {
    let mut out = Vec::new();
    for r in records {
        // serialization of these plain records cannot fail
        serde_json::to_writer(&mut out, r).expect("serializable record");
        out.push(b'\n');
    }
    out
}

/// Write `bytes` to `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Argument(format!("not a file path: {}", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", file_name.to_string_lossy()));
    let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
    f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    write_atomic(path, &to_jsonl(records))
}

/// One line of a labels file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelRecord {
    pub news_id: String,
    pub label: Label,
}

/// Read a labels file; a repeated news id is a validation error.
pub fn read_labels(path: &Path) -> Result<BTreeMap<String, Label>> {
    let mut out = BTreeMap::new();
    for r in read_jsonl::<LabelRecord>(path)? {
        if out.insert(r.news_id.clone(), r.label).is_some() {
            return Err(Error::validation(r.news_id, "label given twice"));
        }
    }
    Ok(out)
}

pub fn write_labels(path: &Path, labels: &BTreeMap<String, Label>) -> Result<()> {
    let records: Vec<LabelRecord> = labels
        .iter()
        .map(|(id, &label)| LabelRecord { news_id: id.clone(), label })
        .collect();
    write_jsonl(path, &records)
}

/// Load and validate a corpus directory.
pub fn load_dataset(dir: &Path) -> Result<Dataset> {
    let d = Dataset {
        news: read_jsonl(&dir.join(NEWS_FILE))?,
        users: read_jsonl(&dir.join(USERS_FILE))?,
        publishers: read_jsonl(&dir.join(PUBLISHERS_FILE))?,
        engagements: read_jsonl(&dir.join(ENGAGEMENTS_FILE))?,
        friendships: read_jsonl(&dir.join(FRIENDSHIPS_FILE))?,
    };
    d.validate()?;
    Ok(d)
}

/// Write the five corpus files into `dir`, creating it when missing.
pub fn save_dataset(d: &Dataset, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_jsonl(&dir.join(NEWS_FILE), &d.news)?;
    write_jsonl(&dir.join(USERS_FILE), &d.users)?;
    write_jsonl(&dir.join(PUBLISHERS_FILE), &d.publishers)?;
    write_jsonl(&dir.join(ENGAGEMENTS_FILE), &d.engagements)?;
    write_jsonl(&dir.join(FRIENDSHIPS_FILE), &d.friendships)?;
    Ok(())
}

//! Hierarchical propagation networks: a macro layer of posts and reposts and
//! a micro layer of replies, plus structural and temporal features and a
//! fake-vs-real rank-sum comparison.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{CorpusIndex, Dataset, Engagement, EngagementKind, Label};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::stats::{mann_whitney, median};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CascadeNode {
    pub engagement_id: String,
    pub user_id: String,
    pub timestamp: u64,
    pub children: Vec<CascadeNode>,
}

impl CascadeNode {
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(CascadeNode::size).sum::<usize>()
    }

    /// Edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        self.children.iter().map(|c| c.depth() + 1).max().unwrap_or(0)
    }

    fn walk<'a>(&'a self, level: usize, f: &mut impl FnMut(&'a CascadeNode, usize)) {
        f(self, level);
        for c in &self.children {
            c.walk(level + 1, f);
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CascadePair {
    pub macro_forest: Vec<CascadeNode>,
    pub micro_forest: Vec<CascadeNode>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropFeatures {
    pub macro_size: u64,
    pub macro_depth: u64,
    pub macro_max_breadth: u64,
    pub micro_size: u64,
    pub micro_depth: u64,
    /// Seconds from the first post to the first repost, -1 without reposts.
    pub time_to_first_repost: i64,
    pub lifespan: u64,
    pub unique_users: u64,
}

pub const FEATURE_NAMES: [&str; 8] = [
    "macro_size",
    "macro_depth",
    "macro_max_breadth",
    "micro_size",
    "micro_depth",
    "time_to_first_repost",
    "lifespan",
    "unique_users",
];

impl PropFeatures {
    /// Values in [`FEATURE_NAMES`] order.
    pub fn values(&self) -> [f64; 8] {
        [
            self.macro_size as f64,
            self.macro_depth as f64,
            self.macro_max_breadth as f64,
            self.micro_size as f64,
            self.micro_depth as f64,
            self.time_to_first_repost as f64,
            self.lifespan as f64,
            self.unique_users as f64,
        ]
    }
}

fn build_from(engagements: &[&Engagement]) -> CascadePair {
    let mut children: HashMap<&str, Vec<&Engagement>> = HashMap::new();
    let mut posts = Vec::new();
    for e in engagements {
        match &e.parent_id {
            Some(p) => children.entry(p.as_str()).or_default().push(e),
            None => posts.push(*e),
        }
    }
    let order = |v: &mut Vec<&Engagement>| v.sort_by(|a, b| (a.timestamp, &a.id).cmp(&(b.timestamp, &b.id)));
    order(&mut posts);
    children.values_mut().for_each(order);

    // Replies hanging off macro nodes start micro trees.
    let mut micro_roots: Vec<&Engagement> = Vec::new();

    fn grow<'a>(
        e: &'a Engagement,
        children: &HashMap<&str, Vec<&'a Engagement>>,
        want: &dyn Fn(EngagementKind) -> bool,
        spill: &mut Vec<&'a Engagement>,
    ) -> CascadeNode {
        let mut node = CascadeNode {
            engagement_id: e.id.clone(),
            user_id: e.user_id.clone(),
            timestamp: e.timestamp,
            children: Vec::new(),
        };
        for c in children.get(e.id.as_str()).into_iter().flatten() {
            if want(c.kind) {
                node.children.push(grow(c, children, want, spill));
            } else {
                spill.push(c);
            }
        }
        node
    }

    let is_macro = |k: EngagementKind| k != EngagementKind::Reply;
    let macro_forest: Vec<CascadeNode> = posts
        .iter()
        .map(|p| grow(p, &children, &is_macro, &mut micro_roots))
        .collect();
    order(&mut micro_roots);
    let is_micro = |k: EngagementKind| k == EngagementKind::Reply;
    let mut unreachable = Vec::new();
    let micro_forest = micro_roots
        .iter()
        .map(|r| grow(r, &children, &is_micro, &mut unreachable))
        .collect();
    debug_assert!(unreachable.is_empty(), "repost under a reply");
    CascadePair { macro_forest, micro_forest }
}

/// Macro and micro forests of one news item.
pub fn build_cascades(d: &Dataset, news_id: &str) -> Result<CascadePair> {
    let idx = d.index();
    Ok(cascades_at(&idx, news_pos(&idx, news_id)?))
}

fn news_pos(idx: &CorpusIndex, news_id: &str) -> Result<usize> {
    idx.news_pos
        .get(news_id)
        .copied()
        .ok_or_else(|| Error::NotFound(format!("news `{news_id}`")))
}

fn cascades_at(idx: &CorpusIndex, pos: usize) -> CascadePair {
    let d = idx.dataset;
    let engs: Vec<&Engagement> = idx.by_news[pos].iter().map(|&i| &d.engagements[i]).collect();
    build_from(&engs)
}

/// Cascades of every news item, in dataset order.
pub fn build_all_cascades(d: &Dataset) -> Vec<CascadePair> {
    let idx = d.index();
    Exec::current().map_range(d.news.len(), |pos| cascades_at(&idx, pos))
}

pub fn extract_features(c: &CascadePair) -> PropFeatures {
    let mut f = PropFeatures {
        time_to_first_repost: -1,
        ..Default::default()
    };
    let mut breadth: Vec<u64> = Vec::new();
    let mut first_post: Option<u64> = None;
    let mut first_repost: Option<u64> = None;
    let mut first: Option<u64> = None;
    let mut last: Option<u64> = None;
    let mut users = std::collections::HashSet::new();
    let mut seen = |n: &CascadeNode| {
        first = Some(first.map_or(n.timestamp, |t: u64| t.min(n.timestamp)));
        last = Some(last.map_or(n.timestamp, |t: u64| t.max(n.timestamp)));
        users.insert(n.user_id.clone());
    };

    for root in &c.macro_forest {
        f.macro_size += root.size() as u64;
        f.macro_depth = f.macro_depth.max(root.depth() as u64);
        root.walk(0, &mut |n, level| {
            if breadth.len() <= level {
                breadth.resize(level + 1, 0);
            }
            breadth[level] += 1;
            let slot = if level == 0 { &mut first_post } else { &mut first_repost };
            *slot = Some(slot.map_or(n.timestamp, |t| t.min(n.timestamp)));
            seen(n);
        });
    }
    for root in &c.micro_forest {
        f.micro_size += root.size() as u64;
        f.micro_depth = f.micro_depth.max(root.depth() as u64);
        root.walk(0, &mut |n, _| seen(n));
    }
    f.macro_max_breadth = breadth.into_iter().max().unwrap_or(0);
    if let (Some(p), Some(r)) = (first_post, first_repost) {
        f.time_to_first_repost = r as i64 - p as i64;
    }
    f.lifespan = match (first, last) {
        (Some(a), Some(b)) => b - a,
        _ => 0,
    };
    f.unique_users = users.len() as u64;
    f
}

/// Feature export row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub news_id: String,
    #[serde(flatten)]
    pub features: PropFeatures,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
}

pub fn feature_rows(d: &Dataset) -> Vec<FeatureRow> {
    let cascades = build_all_cascades(d);
    d.news
        .iter()
        .zip(&cascades)
        .map(|(n, c)| FeatureRow {
            news_id: n.id.clone(),
            features: extract_features(c),
            label: n.clean_label,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureComparison {
    pub feature: String,
    /// Mann-Whitney U of the fake group.
    pub statistic: f64,
    pub p_value: f64,
    /// +1 when fake tends larger, -1 when smaller, 0 when indistinguishable.
    pub direction: i8,
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Per-feature two-sided rank-sum test of fake against real.
///
/// Direction is the sign of the median difference; when the medians tie it
/// falls back to the sign of U minus its null mean.
pub fn compare_groups(fake: &[PropFeatures], real: &[PropFeatures]) -> Result<Vec<FeatureComparison>> {
    if fake.is_empty() || real.is_empty() {
        return Err(Error::Comparison(format!(
            "both groups need members (fake {}, real {})",
            fake.len(),
            real.len()
        )));
    }
    let column = |g: &[PropFeatures], k: usize| g.iter().map(|f| f.values()[k]).collect::<Vec<f64>>();
    Ok(FEATURE_NAMES
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let (x, y) = (column(fake, k), column(real, k));
            let t = mann_whitney(&x, &y);
            let mut direction = sign(median(&x) - median(&y));
            if direction == 0 {
                direction = sign(t.u - x.len() as f64 * y.len() as f64 / 2.0);
            }
            FeatureComparison {
                feature: name.to_string(),
                statistic: t.u,
                p_value: t.p_value,
                direction,
            }
        })
        .collect())
}

/// Splits feature rows by label and compares the groups. Rows without a
/// label are ignored.
pub fn compare_rows(rows: &[FeatureRow]) -> Result<Vec<FeatureComparison>> {
    let pick = |want: Label| -> Vec<PropFeatures> {
        rows.iter().filter(|r| r.label == Some(want)).map(|r| r.features).collect()
    };
    compare_groups(&pick(Label::Fake), &pick(Label::Real))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixtures::*;
    use crate::corpus::EngagementKind::*;
    use proptest::prelude::*;

    fn one_news(engagements: Vec<Engagement>) -> Dataset {
        let users: std::collections::BTreeSet<String> = engagements.iter().map(|e| e.user_id.clone()).collect();
        Dataset {
            news: vec![news("n", "p", "t")],
            publishers: vec![crate::corpus::Publisher { id: "p".into(), partisanship: None }],
            users: users.iter().map(|u| user(u)).collect(),
            engagements,
            friendships: vec![],
        }
    }

    fn features_of(engagements: Vec<Engagement>) -> PropFeatures {
        let d = one_news(engagements);
        d.validate().unwrap();
        extract_features(&build_cascades(&d, "n").unwrap())
    }

    #[test]
    fn single_post() {
        let d = one_news(vec![eng("e1", "u1", "n", Post, None, 3)]);
        let c = build_cascades(&d, "n").unwrap();
        assert_eq!(c.macro_forest.len(), 1);
        assert!(c.micro_forest.is_empty());
        let f = extract_features(&c);
        assert_eq!((f.macro_size, f.macro_depth, f.micro_size, f.micro_depth), (1, 0, 0, 0));
        assert_eq!(f.time_to_first_repost, -1);
        assert_eq!(f.lifespan, 0);
    }

    #[test]
    fn repost_chain_depth() {
        let f = features_of(vec![
            eng("e1", "u1", "n", Post, None, 1),
            eng("e2", "u2", "n", Repost, Some("e1"), 2),
            eng("e3", "u3", "n", Repost, Some("e2"), 3),
        ]);
        assert_eq!((f.macro_size, f.macro_depth, f.macro_max_breadth), (3, 2, 1));
    }

    #[test]
    fn star_breadth() {
        let mut engs = vec![eng("e0", "u0", "n", Post, None, 0)];
        for i in 1..=5 {
            engs.push(eng(&format!("e{i}"), &format!("u{i}"), "n", Repost, Some("e0"), i));
        }
        let f = features_of(engs);
        assert_eq!((f.macro_max_breadth, f.macro_depth, f.unique_users), (5, 1, 6));
    }

    #[test]
    fn first_repost_delay() {
        let f = features_of(vec![
            eng("e1", "u1", "n", Post, None, 10),
            eng("e2", "u2", "n", Repost, Some("e1"), 25),
            eng("e3", "u3", "n", Repost, Some("e1"), 40),
        ]);
        assert_eq!(f.time_to_first_repost, 15);
        assert_eq!(f.lifespan, 30);
    }

    #[test]
    fn replies_form_micro_layer() {
        let d = small();
        let c = build_cascades(&d, "n1").unwrap();
        assert_eq!(c.macro_forest[0].size(), 2);
        assert_eq!(c.micro_forest.len(), 1);
        assert_eq!(c.micro_forest[0].engagement_id, "e3");
        assert_eq!(c.micro_forest[0].children[0].engagement_id, "e4");
        let f = extract_features(&c);
        assert_eq!((f.micro_size, f.micro_depth, f.unique_users), (2, 1, 4));
        assert!(matches!(build_cascades(&d, "zz"), Err(Error::NotFound(_))));
    }

    #[test]
    fn child_order_is_by_time_then_id() {
        let d = one_news(vec![
            eng("e1", "u1", "n", Post, None, 0),
            eng("b", "u2", "n", Repost, Some("e1"), 5),
            eng("a", "u3", "n", Repost, Some("e1"), 5),
            eng("c", "u4", "n", Repost, Some("e1"), 1),
        ]);
        let c = build_cascades(&d, "n").unwrap();
        let ids: Vec<&str> = c.macro_forest[0].children.iter().map(|n| n.engagement_id.as_str()).collect();
        assert_eq!(ids, ["c", "a", "b"]);
    }

    #[test]
    fn compare_examples() {
        let mk = |s: u64| PropFeatures { macro_size: s, ..Default::default() };
        let fake: Vec<_> = [10, 11, 12].map(mk).to_vec();
        let real: Vec<_> = [1, 2, 3].map(mk).to_vec();
        let r = compare_groups(&fake, &real).unwrap();
        assert_eq!(r[0].feature, "macro_size");
        assert_eq!(r[0].statistic, 9.0);
        assert_eq!(r[0].direction, 1);
        assert!((r[0].p_value - 0.0495346).abs() < 1e-6);
        let same = compare_groups(&fake, &fake).unwrap();
        assert!(same.iter().all(|c| (c.p_value - 1.0).abs() < 1e-9));
        assert!(matches!(compare_groups(&[], &real), Err(Error::Comparison(_))));
        let swapped = compare_groups(&real, &fake).unwrap();
        assert_eq!(swapped[0].direction, -1);
        assert_eq!(swapped[0].p_value, r[0].p_value);
    }

    #[test]
    fn export_row_shape() {
        let rows = feature_rows(&small());
        let line = serde_json::to_string(&rows[0]).unwrap();
        assert!(line.starts_with("{\"news_id\":\"n1\",\"macro_size\":2,"), "{line}");
        assert!(line.ends_with("\"label\":\"fake\"}"));
        let back: FeatureRow = serde_json::from_str(&line).unwrap();
        assert_eq!(back, rows[0]);
    }

    fn random_cascade(parents: &[(usize, u8, u64)]) -> Vec<Engagement> {
        // Each entry picks an earlier engagement as parent; kinds that would
        // break invariants degrade to posts.
        let mut out: Vec<Engagement> = Vec::new();
        for (i, &(p, k, dt)) in parents.iter().enumerate() {
            let id = format!("e{i:03}");
            let u = format!("u{}", i % 7);
            if out.is_empty() || k == 0 {
                out.push(eng(&id, &u, "n", Post, None, dt));
                continue;
            }
            let parent = &out[p % out.len()];
            let kind = if k == 1 && parent.kind != Reply { Repost } else { Reply };
            let t = parent.timestamp + dt;
            let pid = parent.id.clone();
            out.push(eng(&id, &u, "n", kind, Some(&pid), t));
        }
        out
    }

    proptest! {
        #[test]
        fn sizes_cover_every_engagement_and_ignore_order(
            shape in proptest::collection::vec((0usize..50, 0u8..3, 0u64..20), 1..40),
            seed in any::<u64>(),
        ) {
            let engs = random_cascade(&shape);
            let n = engs.len() as u64;
            let f = features_of(engs.clone());
            prop_assert_eq!(f.macro_size + f.micro_size, n);
            let mut shuffled = engs;
            use rand::{seq::SliceRandom, SeedableRng};
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(features_of(shuffled), f);
        }
    }

    #[test]
    fn all_cascades_follow_dataset_order() {
        let d = small();
        let all = build_all_cascades(&d);
        assert_eq!(all.len(), 3);
        assert_eq!(all[1], build_cascades(&d, "n2").unwrap());
    }
}

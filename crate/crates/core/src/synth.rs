//! Planted-ground-truth corpus generator.
//!
//! Users carry three independent traits, each tied to one weak signal:
//! a partisan history (bias), membership in a coordinated cell that engages
//! identical news sets (credibility) and a community (homophily). Each gap
//! parameter tilts how agents with the trait split their engagements
//! between fake and real items. Agents without the trait are tilted the
//! other way in proportion to engagement volume, so the expected number of
//! engagements per item stays independent of its class. Engagement texts
//! realize a target sentiment whose spread is larger on fake items.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::corpus::{
    save_dataset, write_labels, Dataset, Engagement, EngagementKind, Friendship, Label, NewsArticle, Publisher, User,
};
use crate::error::{Error, Result};
use crate::signals::{builtin_seed_bias, score_sentiment, SentimentLexicon};

pub const GROUND_TRUTH_FILE: &str = "ground_truth.jsonl";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_news: usize,
    pub n_users: usize,
    pub n_publishers: usize,
    pub fake_fraction: f64,
    pub homophily_strength: f64,
    pub bias_gap: f64,
    pub credibility_gap: f64,
    /// Fake engagement sentiment variance is `1 + sentiment_gap` times the
    /// real one.
    pub sentiment_gap: f64,
    /// Fake items get this many times the expected reposts and arrive this
    /// many times faster.
    pub cascade_boost: f64,
    pub vocab_signal: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_news: 500,
            n_users: 1000,
            n_publishers: 20,
            fake_fraction: 0.5,
            homophily_strength: 0.0,
            bias_gap: 0.0,
            credibility_gap: 0.0,
            sentiment_gap: 0.0,
            cascade_boost: 1.0,
            vocab_signal: 0.0,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must lie in [0, 1], got {v}")))
            }
        };
        unit("homophily_strength", self.homophily_strength)?;
        unit("bias_gap", self.bias_gap)?;
        unit("credibility_gap", self.credibility_gap)?;
        unit("sentiment_gap", self.sentiment_gap)?;
        unit("vocab_signal", self.vocab_signal)?;
        if !(self.fake_fraction > 0.0 && self.fake_fraction < 1.0) {
            return Err(Error::Config(format!("fake_fraction must lie in (0, 1), got {}", self.fake_fraction)));
        }
        if !(self.cascade_boost >= 1.0) || !self.cascade_boost.is_finite() {
            return Err(Error::Config(format!("cascade_boost must be >= 1, got {}", self.cascade_boost)));
        }
        if self.n_news < 2 || self.n_users < 2 || self.n_publishers < 2 {
            return Err(Error::Config("need at least 2 news, 2 users and 2 publishers".into()));
        }
        Ok(())
    }
}

const BLOCK_FRACTION: f64 = 0.25;
const CELL_SIZE: usize = 8;
/// Expected cells engaging a fake item at full credibility gap.
const CELLS_PER_FAKE_ITEM: f64 = 4.0;
const MAX_USER_PICKS: usize = 20;
const PARTISAN_FRACTION: f64 = 0.5;
const TEXT_LEN: usize = 12;
const CLASS_VOCAB: usize = 300;
const NOISE_VOCAB: usize = 2000;
const SENTIMENT_AMPLITUDE: f64 = 0.3;
const SENTIMENT_JITTER: f64 = 0.2;
const MEAN_GAP_SECS: f64 = 600.0;
const FRIENDS_PER_USER: usize = 3;
const EPOCH: u64 = 1_600_000_000;
const FILLER: &[&str] = &["this", "story", "about", "today", "people", "read", "thread", "update", "here", "see"];

fn pseudoword(i: usize) -> String {
    const C: &[u8] = b"bdfgklmnprstvz";
    const V: &[u8] = b"aeiou";
    let syl = |k: usize| [C[k % C.len()] as char, V[(k / C.len()) % V.len()] as char];
    let n = C.len() * V.len();
    [i % n, (i / n) % n, (i / (n * n)) % n]
        .iter()
        .flat_map(|&k| syl(k))
        .collect()
}

/// Word lists: real-indicative, fake-indicative and shared noise.
fn vocabularies() -> [Vec<String>; 3] {
    let range = |lo: usize, n: usize| (lo..lo + n).map(pseudoword).collect::<Vec<_>>();
    [range(0, CLASS_VOCAB), range(CLASS_VOCAB, CLASS_VOCAB), range(2 * CLASS_VOCAB, NOISE_VOCAB)]
}

/// Short phrases sorted by their sentiment score under the builtin lexicon.
fn phrase_bank() -> Vec<(f64, String)> {
    let lex = SentimentLexicon::builtin();
    let mut words: Vec<&String> = lex.valence.keys().collect();
    words.sort();
    let mut boosters: Vec<&String> = lex.boosters.keys().collect();
    boosters.sort();
    let mut phrases: Vec<String> = Vec::new();
    for w in &words {
        phrases.push(w.to_string());
        phrases.push(format!("not {w}"));
        phrases.push(format!("{} {w}", boosters[0]));
        for w2 in &words {
            phrases.push(format!("{w} {w2}"));
        }
    }
    phrases.push("okay then".into());
    let mut bank: Vec<(f64, String)> = phrases
        .into_iter()
        .map(|p| (score_sentiment(&p, &lex), p))
        .collect();
    bank.push((0.0, "no opinion".into()));
    bank.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    bank.dedup_by(|a, b| a.0 == b.0);
    bank
}

fn nearest_phrase(bank: &[(f64, String)], target: f64) -> &str {
    let i = bank.partition_point(|(s, _)| *s < target);
    let pick = match (i.checked_sub(1), bank.get(i)) {
        (Some(lo), Some(hi)) if (target - bank[lo].0) <= (hi.0 - target) => lo,
        (Some(lo), None) => lo,
        _ => i,
    };
    &bank[pick].1
}

struct Agent {
    members: Vec<usize>,
    picks: usize,
    p_fake: f64,
}

/// Generate a corpus and its ground truth. Clean labels are left empty.
pub fn generate(cfg: &SynthConfig) -> Result<(Dataset, BTreeMap<String, Label>)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let ff = cfg.fake_fraction;
    let tilt = ff.min(1.0 - ff);

    let n_fake = ((cfg.n_news as f64 * ff).round() as usize).clamp(1, cfg.n_news - 1);
    let mut labels: Vec<Label> = (0..cfg.n_news)
        .map(|i| if i < n_fake { Label::Fake } else { Label::Real })
        .collect();
    labels.shuffle(&mut rng);
    let fake_items: Vec<usize> = (0..cfg.n_news).filter(|&i| labels[i].is_fake()).collect();
    let real_items: Vec<usize> = (0..cfg.n_news).filter(|&i| !labels[i].is_fake()).collect();

    let n_partisan_pubs = cfg.n_publishers / 2;
    let publishers: Vec<Publisher> = (0..cfg.n_publishers)
        .map(|i| {
            let lean = if i < n_partisan_pubs {
                if i % 2 == 0 { cfg.bias_gap } else { -cfg.bias_gap }
            } else {
                0.0
            };
            Publisher {
                id: format!("p{i:03}"),
                partisanship: Some(lean),
            }
        })
        .collect();

    let [real_vocab, fake_vocab, noise_vocab] = vocabularies();
    let news: Vec<NewsArticle> = (0..cfg.n_news)
        .map(|i| {
            let fake = labels[i].is_fake();
            let p_partisan = if fake { (1.0 + cfg.bias_gap) / 2.0 } else { (1.0 - cfg.bias_gap) / 2.0 };
            let publisher = if rng.random_bool(p_partisan) {
                rng.random_range(0..n_partisan_pubs)
            } else {
                rng.random_range(n_partisan_pubs..cfg.n_publishers)
            };
            let class_vocab = if fake { &fake_vocab } else { &real_vocab };
            let words: Vec<&str> = (0..TEXT_LEN)
                .map(|_| {
                    let v = if rng.random_bool(cfg.vocab_signal) { class_vocab } else { &noise_vocab };
                    v[rng.random_range(0..v.len())].as_str()
                })
                .collect();
            NewsArticle {
                id: format!("n{i:05}"),
                publisher_id: publishers[publisher].id.clone(),
                text: words.join(" "),
                published_at: EPOCH + 3600 * i as u64 + rng.random_range(0..600),
                clean_label: None,
            }
        })
        .collect();

    // User traits.
    let mut order: Vec<usize> = (0..cfg.n_users).collect();
    order.shuffle(&mut rng);
    let n_cells = (cfg.n_users as f64 * BLOCK_FRACTION / CELL_SIZE as f64) as usize;
    let mut in_cell = vec![false; cfg.n_users];
    order[..n_cells * CELL_SIZE].iter().for_each(|&u| in_cell[u] = true);
    let community: Vec<bool> = (0..cfg.n_users).map(|_| rng.random_bool(0.5)).collect();
    let partisan: Vec<bool> = (0..cfg.n_users).map(|_| rng.random_bool(PARTISAN_FRACTION)).collect();

    let seeds = builtin_seed_bias();
    let mut left: Vec<&str> = seeds.iter().filter(|(_, &v)| v < 0.0).map(|(k, _)| k.as_str()).collect();
    let mut right: Vec<&str> = seeds.iter().filter(|(_, &v)| v > 0.0).map(|(k, _)| k.as_str()).collect();
    left.sort();
    right.sort();
    let filler = |rng: &mut ChaCha8Rng| FILLER[rng.random_range(0..FILLER.len())];
    let users: Vec<User> = (0..cfg.n_users)
        .map(|u| {
            let side = if rng.random_bool(0.5) { &left } else { &right };
            let history_texts = (0..3)
                .map(|_| {
                    let mut t = vec![filler(&mut rng)];
                    if partisan[u] {
                        t.push(side[rng.random_range(0..side.len())]);
                        t.push(side[rng.random_range(0..side.len())]);
                    } else if rng.random_bool(0.3) {
                        let s = if rng.random_bool(0.5) { &left } else { &right };
                        t.push(s[rng.random_range(0..s.len())]);
                    }
                    t.push(filler(&mut rng));
                    t.join(" ")
                })
                .collect();
            User {
                id: format!("u{u:05}"),
                history_texts,
            }
        })
        .collect();

    // Agents and their fake-vs-real preference.
    let user_picks = (cfg.n_news / 25).clamp(3, MAX_USER_PICKS).min(cfg.n_news);
    let cell_picks = if n_cells > 0 {
        ((CELLS_PER_FAKE_ITEM * n_fake as f64 / n_cells as f64).ceil() as usize).clamp(1, cfg.n_news.div_ceil(2))
    } else {
        0
    };
    let loners: Vec<usize> = (0..cfg.n_users).filter(|&u| !in_cell[u]).collect();
    let block_volume = (n_cells * CELL_SIZE * cell_picks) as f64;
    let loner_volume = (loners.len() * user_picks) as f64;
    let ratio = |pos: usize, neg: usize| if neg == 0 { 0.0 } else { pos as f64 / neg as f64 };
    let n_part = loners.iter().filter(|&&u| partisan[u]).count();
    let n_comm = loners.iter().filter(|&&u| community[u]).count();
    let part_ratio = ratio(n_part, loners.len() - n_part);
    let comm_ratio = ratio(n_comm, loners.len() - n_comm);
    let block_ratio = if loner_volume > 0.0 { block_volume / loner_volume } else { 0.0 };

    let mut agents: Vec<Agent> = (0..n_cells)
        .map(|c| Agent {
            members: order[c * CELL_SIZE..(c + 1) * CELL_SIZE].to_vec(),
            picks: cell_picks,
            p_fake: (ff + tilt * cfg.credibility_gap).clamp(0.0, 1.0),
        })
        .collect();
    agents.extend(loners.iter().map(|&u| {
        let bias = if partisan[u] { 1.0 } else { -part_ratio };
        let comm = if community[u] { 1.0 } else { -comm_ratio };
        let shift = cfg.bias_gap * bias + cfg.homophily_strength * comm - cfg.credibility_gap * block_ratio;
        Agent {
            members: vec![u],
            picks: user_picks,
            p_fake: (ff + tilt * shift).clamp(0.0, 1.0),
        }
    }));

    let mut engagers: Vec<Vec<usize>> = vec![Vec::new(); cfg.n_news];
    for a in &agents {
        let mut chosen = BTreeSet::new();
        for _ in 0..a.picks {
            for _attempt in 0..20 {
                let pool = if rng.random_bool(a.p_fake) { &fake_items } else { &real_items };
                let n = pool[rng.random_range(0..pool.len())];
                if chosen.insert(n) {
                    break;
                }
            }
        }
        for &n in &chosen {
            engagers[n].extend(&a.members);
        }
    }

    let bank = phrase_bank();
    let jitter = Normal::new(1.0, SENTIMENT_JITTER).expect("valid normal");
    let mut engagements = Vec::new();
    for (n, users_here) in engagers.iter_mut().enumerate() {
        let fake = labels[n].is_fake();
        let boost = if fake { cfg.cascade_boost } else { 1.0 };
        // (user, forced repost)
        let mut events: Vec<(usize, bool)> = users_here.iter().map(|&u| (u, false)).collect();
        if boost > 1.0 && !events.is_empty() {
            let extra = Poisson::new((boost - 1.0) * 0.5 * events.len() as f64)
                .expect("positive rate")
                .sample(&mut rng) as usize;
            events.extend((0..extra).map(|_| (rng.random_range(0..cfg.n_users), true)));
        }
        events.shuffle(&mut rng);
        let gap = Exp::new(boost / MEAN_GAP_SECS).expect("positive rate");
        let amplitude = SENTIMENT_AMPLITUDE * if fake { (1.0 + cfg.sentiment_gap).sqrt() } else { 1.0 };
        let mut t = news[n].published_at;
        let mut macro_nodes: Vec<usize> = Vec::new();
        let first = engagements.len();
        for (k, &(u, forced)) in events.iter().enumerate() {
            t += gap.sample(&mut rng).round() as u64;
            let roll: f64 = rng.random();
            let kind = if k == 0 {
                EngagementKind::Post
            } else if forced || (0.3..0.8).contains(&roll) {
                EngagementKind::Repost
            } else if roll < 0.3 {
                EngagementKind::Post
            } else {
                EngagementKind::Reply
            };
            let parent = match kind {
                EngagementKind::Post => None,
                EngagementKind::Repost => Some(if rng.random_bool(0.5) {
                    *macro_nodes.last().expect("a post precedes")
                } else {
                    macro_nodes[rng.random_range(0..macro_nodes.len())]
                }),
                EngagementKind::Reply => Some(first + rng.random_range(0..k)),
            };
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let target = amplitude * sign * jitter.sample(&mut rng);
            let text = format!("{} {}", nearest_phrase(&bank, target), filler(&mut rng));
            let idx = engagements.len();
            if kind != EngagementKind::Reply {
                macro_nodes.push(idx);
            }
            engagements.push(Engagement {
                id: format!("e{idx:07}"),
                user_id: users[u].id.clone(),
                news_id: news[n].id.clone(),
                kind,
                parent_id: parent.map(|p: usize| format!("e{p:07}")),
                timestamp: t,
                text: Some(text),
            });
        }
    }

    let side_of: [Vec<usize>; 2] = [
        (0..cfg.n_users).filter(|&u| !community[u]).collect(),
        (0..cfg.n_users).filter(|&u| community[u]).collect(),
    ];
    let mut pairs = BTreeSet::new();
    let target = cfg.n_users * FRIENDS_PER_USER / 2;
    for _ in 0..target * 4 {
        if pairs.len() >= target {
            break;
        }
        let u = rng.random_range(0..cfg.n_users);
        let same = rng.random_bool((1.0 + cfg.homophily_strength) / 2.0);
        let pool = &side_of[usize::from(community[u] == same)];
        if pool.is_empty() {
            continue;
        }
        let v = pool[rng.random_range(0..pool.len())];
        if u != v {
            pairs.insert((u.min(v), u.max(v)));
        }
    }
    let friendships = pairs
        .into_iter()
        .map(|(a, b)| Friendship {
            a: users[a].id.clone(),
            b: users[b].id.clone(),
        })
        .collect();

    let truth = news.iter().zip(&labels).map(|(n, &l)| (n.id.clone(), l)).collect();
    Ok((
        Dataset {
            news,
            users,
            publishers,
            engagements,
            friendships,
        },
        truth,
    ))
}

/// Save the corpus files plus `ground_truth.jsonl` into `dir`.
pub fn save_synth(d: &Dataset, truth: &BTreeMap<String, Label>, dir: &Path) -> Result<()> {
    save_dataset(d, dir)?;
    write_labels(&dir.join(GROUND_TRUTH_FILE), truth)
}

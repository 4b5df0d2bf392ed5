//! Transmitter ranking: candidates with high degree that sit close to the
//! observed recipients are the likely origins of a diffusion.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::read_jsonl;
use crate::error::{Error, Result};
use crate::exec::Exec;

pub const DEFAULT_ALPHA: f64 = 0.5;
pub const ORACLE_MAX_NODES: usize = 15;
/// Stand-in for the zero distance between a candidate and itself.
const SELF_DISTANCE: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub a: String,
    pub b: String,
}

pub fn load_edges(path: &Path) -> Result<Vec<Edge>> {
    read_jsonl(path)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffusionInstance {
    /// Sorted node ids; positions are node indices.
    nodes: Vec<String>,
    adjacency: Vec<Vec<usize>>,
    recipients: Vec<usize>,
    candidates: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedNode {
    pub node: String,
    pub score: f64,
    pub rank: usize,
}

impl DiffusionInstance {
    /// Builds and validates an instance. Nodes are the edge endpoints plus
    /// any ids in `extra_nodes`.
    pub fn new<S: AsRef<str>>(
        edges: &[(S, S)],
        extra_nodes: &[S],
        recipients: &[S],
        candidates: &[S],
    ) -> Result<Self> {
        let mut names: BTreeSet<&str> = extra_nodes.iter().map(AsRef::as_ref).collect();
        for (a, b) in edges {
            names.insert(a.as_ref());
            names.insert(b.as_ref());
        }
        let nodes: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let pos = |s: &str| nodes.binary_search_by(|n| n.as_str().cmp(s));
        let mut adjacency = vec![BTreeSet::new(); nodes.len()];
        for (a, b) in edges {
            let (i, j) = (pos(a.as_ref()).unwrap(), pos(b.as_ref()).unwrap());
            if i == j {
                return Err(Error::validation(a.as_ref(), "self loop"));
            }
            adjacency[i].insert(j);
            adjacency[j].insert(i);
        }
        let resolve = |set: &[S], what: &str| -> Result<Vec<usize>> {
            let ids: BTreeSet<usize> = set
                .iter()
                .map(|s| pos(s.as_ref()).map_err(|_| Error::validation(s.as_ref(), format!("{what} not in graph"))))
                .collect::<Result<_>>()?;
            Ok(ids.into_iter().collect())
        };
        let inst = DiffusionInstance {
            recipients: resolve(recipients, "recipient")?,
            candidates: resolve(candidates, "candidate")?,
            adjacency: adjacency.into_iter().map(|s| s.into_iter().collect()).collect(),
            nodes,
        };
        if let Some(&r0) = inst.recipients.first() {
            let dist = inst.bfs(r0);
            if let Some(&r) = inst.recipients.iter().find(|&&r| dist[r].is_none()) {
                return Err(Error::validation(&inst.nodes[r], "recipients span disconnected components"));
            }
        }
        Ok(inst)
    }

    pub fn from_edges(edges: &[Edge], recipients: &[String], candidates: &[String]) -> Result<Self> {
        let pairs: Vec<(&str, &str)> = edges.iter().map(|e| (e.a.as_str(), e.b.as_str())).collect();
        let r: Vec<&str> = recipients.iter().map(String::as_str).collect();
        let c: Vec<&str> = candidates.iter().map(String::as_str).collect();
        let extra: Vec<&str> = r.iter().chain(&c).copied().collect();
        DiffusionInstance::new(&pairs, &extra, &r, &c)
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn candidates(&self) -> impl Iterator<Item = &str> {
        self.candidates.iter().map(|&c| self.nodes[c].as_str())
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    fn bfs(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.nodes.len()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            let next = dist[v].unwrap() + 1;
            for &w in &self.adjacency[v] {
                if dist[w].is_none() {
                    dist[w] = Some(next);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// `|R| / Σ_r dist(v, r)` with the self-distance counted as 0.5; zero
    /// if some recipient is unreachable or there are no recipients.
    fn closeness(&self, dist: &[Option<usize>]) -> f64 {
        let mut total = 0.0;
        for &r in &self.recipients {
            match dist[r] {
                Some(0) => total += SELF_DISTANCE,
                Some(k) => total += k as f64,
                None => return 0.0,
            }
        }
        if total > 0.0 {
            self.recipients.len() as f64 / total
        } else {
            0.0
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::Argument(format!("alpha must lie in [0, 1], got {alpha}")))
    }
}

/// `alpha · deg/max_deg + (1 − alpha) · closeness` per candidate.
pub fn score_transmitters(inst: &DiffusionInstance, alpha: f64) -> Result<BTreeMap<String, f64>> {
    check_alpha(alpha)?;
    let max_deg = (0..inst.nodes.len()).map(|v| inst.degree(v)).max().unwrap_or(0);
    let scores = Exec::current().map(&inst.candidates, |&v| {
        let dist = inst.bfs(v);
        let closeness = inst.closeness(&dist);
        if closeness == 0.0 && !inst.recipients.is_empty() {
            return 0.0;
        }
        let degree = if max_deg > 0 { inst.degree(v) as f64 / max_deg as f64 } else { 0.0 };
        alpha * degree + (1.0 - alpha) * closeness
    });
    Ok(inst
        .candidates
        .iter()
        .zip(scores)
        .map(|(&v, s)| (inst.nodes[v].clone(), s))
        .collect())
}

/// Top `k` candidates by score, ties broken by node id.
pub fn top_k_transmitters(inst: &DiffusionInstance, k: usize, alpha: f64) -> Result<Vec<RankedNode>> {
    if k > inst.candidates.len() {
        return Err(Error::Argument(format!("k = {k} exceeds {} candidates", inst.candidates.len())));
    }
    let mut ranked: Vec<(String, f64)> = score_transmitters(inst, alpha)?.into_iter().collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(ranked
        .into_iter()
        .take(k)
        .enumerate()
        .map(|(i, (node, score))| RankedNode { node, score, rank: i + 1 })
        .collect())
}

/// Exhaustive k-median over candidate subsets: the subset minimizing the
/// summed distance from each recipient to its nearest member, with the same
/// 0.5 self-distance the scores use. Ties go to the lexicographically
/// smallest subset.
pub fn oracle_best_subset(inst: &DiffusionInstance, k: usize) -> Result<Vec<String>> {
    if inst.nodes.len() > ORACLE_MAX_NODES {
        return Err(Error::TooLarge(format!(
            "{} nodes, oracle handles at most {ORACLE_MAX_NODES}",
            inst.nodes.len()
        )));
    }
    let n = inst.candidates.len();
    if k > n {
        return Err(Error::Argument(format!("k = {k} exceeds {n} candidates")));
    }
    let dists: Vec<Vec<Option<usize>>> = inst.candidates.iter().map(|&c| inst.bfs(c)).collect();
    // Distances doubled so the 0.5 self-distance stays integral.
    let cost = |subset: &[usize]| -> u64 {
        inst.recipients
            .iter()
            .map(|&r| {
                subset
                    .iter()
                    .filter_map(|&s| dists[s][r])
                    .min()
                    .map_or(u64::MAX / (inst.nodes.len() as u64 + 1), |d| {
                        if d == 0 { (2.0 * SELF_DISTANCE) as u64 } else { 2 * d as u64 }
                    })
            })
            .sum()
    };
    let mut pick: Vec<usize> = (0..k).collect();
    let mut best = (cost(&pick), pick.clone());
    // Lexicographic successor of a k-combination of 0..n.
    while let Some(i) = (0..k).rev().find(|&i| pick[i] != i + n - k) {
        pick[i] += 1;
        for j in i + 1..k {
            pick[j] = pick[j - 1] + 1;
        }
        let c = cost(&pick);
        if c < best.0 {
            best = (c, pick.clone());
        }
    }
    Ok(best.1.iter().map(|&s| inst.nodes[inst.candidates[s]].clone()).collect())
}

/// Node names used by the graph generators.
pub fn node_name(i: usize) -> String {
    format!("v{i:02}")
}

pub fn path_edges(n: usize) -> Vec<(String, String)> {
    (1..n).map(|i| (node_name(i - 1), node_name(i))).collect()
}

/// Star with hub `v00`.
pub fn star_edges(n: usize) -> Vec<(String, String)> {
    (1..n).map(|i| (node_name(0), node_name(i))).collect()
}

/// Random recursive tree: node i attaches to a uniform earlier node.
pub fn random_tree_edges(n: usize, rng: &mut impl Rng) -> Vec<(String, String)> {
    (1..n).map(|i| (node_name(rng.random_range(0..i)), node_name(i))).collect()
}

/// Random tree plus each remaining pair with probability `p`.
pub fn random_connected_edges(n: usize, p: f64, rng: &mut impl Rng) -> Vec<(String, String)> {
    let mut edges = random_tree_edges(n, rng);
    let present: BTreeSet<(String, String)> = edges.iter().cloned().collect();
    for i in 0..n {
        for j in i + 1..n {
            let e = (node_name(i), node_name(j));
            let r = (node_name(j), node_name(i));
            if !present.contains(&e) && !present.contains(&r) && rng.random_bool(p) {
                edges.push(e);
            }
        }
    }
    edges
}

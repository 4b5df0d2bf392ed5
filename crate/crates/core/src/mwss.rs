//! Multi-source weak supervision: one shared nonlinear representation of the
//! news text feeding a clean-label head plus one head per weak source.
//!
//! Training minimizes
//!
//! ```text
//! L = mean_clean ℓ(head_clean(z), y) + Σ_k λ_k · mean_k ℓ(head_k(z), y)
//! z = tanh(W_sharedᵀ x)
//! ```
//!
//! Inference reads the news text only, through the shared layer and the
//! clean head.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::matrix::{dot, log_loss_logit, sigmoid, Mat};
use crate::text::{hash_key, tokenize, SparseVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureMap {
    pub hash_dim: usize,
    pub l2_normalize: bool,
}

impl Default for FeatureMap {
    fn default() -> Self {
        FeatureMap {
            hash_dim: 1 << 16,
            l2_normalize: true,
        }
    }
}

impl FeatureMap {
    pub fn validate(&self) -> Result<()> {
        if self.hash_dim.is_power_of_two() {
            Ok(())
        } else {
            Err(Error::Config(format!("hash_dim {} is not a power of two", self.hash_dim)))
        }
    }
}

/// Hashed unigram and bigram counts of lowercased `text`.
pub fn featurize(text: &str, fm: &FeatureMap) -> SparseVec {
    let tokens = tokenize(text);
    let mask = fm.hash_dim as u64 - 1;
    let slot = |key: &str| (hash_key(key) & mask) as usize;
    let mut pairs: Vec<(usize, f64)> = tokens.iter().map(|t| (slot(t), 1.0)).collect();
    pairs.extend(tokens.windows(2).map(|w| (slot(&format!("{} {}", w[0], w[1])), 1.0)));
    let mut v = SparseVec::from_pairs(fm.hash_dim, pairs);
    if fm.l2_normalize {
        v.normalize();
    }
    v
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Head {
    pub w: Vec<f64>,
    pub b: f64,
}

impl Head {
    fn zeros(dim: usize) -> Self {
        Head { w: vec![0.0; dim], b: 0.0 }
    }

    fn random(dim: usize, rng: &mut ChaCha8Rng) -> Self {
        Head {
            w: Mat::uniform(1, dim, -HEAD_INIT, HEAD_INIT, rng).data,
            b: 0.0,
        }
    }

    fn logit(&self, z: &[f64]) -> f64 {
        dot(&self.w, z) + self.b
    }
}

const SHARED_INIT: f64 = 0.1;
const HEAD_INIT: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MwssHyper {
    pub dim: usize,
    /// Weight per weak source; sources without an entry get `1 / #sources`.
    pub lambdas: BTreeMap<String, f64>,
    pub epochs: usize,
    pub lr: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for MwssHyper {
    fn default() -> Self {
        MwssHyper {
            dim: 16,
            lambdas: BTreeMap::new(),
            epochs: 30,
            lr: 0.5,
            batch_size: 32,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MWSSModel {
    pub feature_map: FeatureMap,
    pub hyper: MwssHyper,
    /// `hash_dim × dim`.
    pub w_shared: Mat,
    pub head_clean: Head,
    pub heads: BTreeMap<String, Head>,
    pub lambdas: BTreeMap<String, f64>,
}

/// Featurized example with target 1 (fake) or 0 (real).
pub type Example = (SparseVec, f64);

/// One optimization batch: clean examples and, per weak source, its weight
/// and examples.
#[derive(Clone, Debug, Default)]
pub struct Batch<'a> {
    pub clean: Vec<&'a Example>,
    pub weak: BTreeMap<String, (f64, Vec<&'a Example>)>,
}

/// Gradient with sparse shared-layer rows.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Gradient {
    pub w_shared: BTreeMap<usize, Vec<f64>>,
    pub head_clean: Option<Head>,
    pub heads: BTreeMap<String, Head>,
}

fn seed_for(seed: u64, source: &str) -> u64 {
    seed ^ hash_key(source)
}

impl MWSSModel {
    /// Seeded initialization. The shared layer and clean head come from one
    /// stream; each weak head has its own stream keyed by source name.
    pub fn init(fm: FeatureMap, hyper: &MwssHyper, sources: &[String]) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
        let w_shared = Mat::uniform(fm.hash_dim, hyper.dim, -SHARED_INIT, SHARED_INIT, &mut rng);
        let head_clean = Head::random(hyper.dim, &mut rng);
        let default_lambda = if sources.is_empty() { 0.0 } else { 1.0 / sources.len() as f64 };
        let heads = sources
            .iter()
            .map(|s| {
                let mut r = ChaCha8Rng::seed_from_u64(seed_for(hyper.seed, s));
                (s.clone(), Head::random(hyper.dim, &mut r))
            })
            .collect();
        let lambdas = sources
            .iter()
            .map(|s| (s.clone(), hyper.lambdas.get(s).copied().unwrap_or(default_lambda)))
            .collect();
        MWSSModel {
            feature_map: fm,
            hyper: hyper.clone(),
            w_shared,
            head_clean,
            heads,
            lambdas,
        }
    }

    /// Shared representation `tanh(W_sharedᵀ x)`.
    pub fn represent(&self, x: &SparseVec) -> Vec<f64> {
        let mut a = vec![0.0; self.w_shared.cols];
        for &(j, v) in &x.entries {
            if j < self.w_shared.rows {
                a.iter_mut().zip(self.w_shared.row(j)).for_each(|(a, w)| *a += v * w);
            }
        }
        a.iter_mut().for_each(|x| *x = x.tanh());
        a
    }

    pub fn clean_probability(&self, x: &SparseVec) -> f64 {
        sigmoid(self.head_clean.logit(&self.represent(x)))
    }

    pub fn is_finite(&self) -> bool {
        self.w_shared.is_finite()
            && std::iter::once(&self.head_clean)
                .chain(self.heads.values())
                .all(|h| h.b.is_finite() && h.w.iter().all(|x| x.is_finite()))
    }
}

fn head_mean_loss(model: &MWSSModel, head: &Head, examples: &[&Example]) -> f64 {
    if examples.is_empty() {
        return 0.0;
    }
    let total: f64 = examples
        .iter()
        .map(|(x, y)| log_loss_logit(head.logit(&model.represent(x)), *y))
        .sum();
    total / examples.len() as f64
}

/// Batch objective.
pub fn batch_loss(model: &MWSSModel, batch: &Batch) -> f64 {
    let mut loss = head_mean_loss(model, &model.head_clean, &batch.clean);
    for (source, (lambda, examples)) in &batch.weak {
        if let Some(head) = model.heads.get(source) {
            loss += lambda * head_mean_loss(model, head, examples);
        }
    }
    loss
}

fn accumulate_head(
    model: &MWSSModel,
    head: &Head,
    examples: &[&Example],
    scale: f64,
    w_grad: &mut BTreeMap<usize, Vec<f64>>,
) -> Head {
    let k = model.w_shared.cols;
    let mut g = Head::zeros(k);
    if examples.is_empty() {
        return g;
    }
    let s = scale / examples.len() as f64;
    for (x, y) in examples {
        let z = model.represent(x);
        let r = s * (sigmoid(head.logit(&z)) - y);
        g.w.iter_mut().zip(&z).for_each(|(g, z)| *g += r * z);
        g.b += r;
        let da: Vec<f64> = head.w.iter().zip(&z).map(|(h, z)| r * h * (1.0 - z * z)).collect();
        for &(j, v) in &x.entries {
            let row = w_grad.entry(j).or_insert_with(|| vec![0.0; k]);
            row.iter_mut().zip(&da).for_each(|(g, d)| *g += v * d);
        }
    }
    g
}

/// Analytic gradient of [`batch_loss`].
pub fn batch_gradient(model: &MWSSModel, batch: &Batch) -> Gradient {
    let mut grad = Gradient::default();
    if !batch.clean.is_empty() {
        grad.head_clean = Some(accumulate_head(model, &model.head_clean, &batch.clean, 1.0, &mut grad.w_shared));
    }
    for (source, (lambda, examples)) in &batch.weak {
        if let Some(head) = model.heads.get(source) {
            let g = accumulate_head(model, head, examples, *lambda, &mut grad.w_shared);
            grad.heads.insert(source.clone(), g);
        }
    }
    grad
}

fn apply(model: &mut MWSSModel, grad: &Gradient, lr: f64) {
    for (&j, g) in &grad.w_shared {
        model.w_shared.row_mut(j).iter_mut().zip(g).for_each(|(w, g)| *w -= lr * g);
    }
    let step = |h: &mut Head, g: &Head| {
        h.w.iter_mut().zip(&g.w).for_each(|(w, g)| *w -= lr * g);
        h.b -= lr * g.b;
    };
    if let Some(g) = &grad.head_clean {
        step(&mut model.head_clean, g);
    }
    for (s, g) in &grad.heads {
        if let Some(h) = model.heads.get_mut(s) {
            step(h, g);
        }
    }
}

fn featurize_all(fm: &FeatureMap, data: &[(String, Label)]) -> Vec<Example> {
    Exec::current().map(data, |(t, l)| (featurize(t, fm), l.target()))
}

/// Cyclic window of `size` items starting at `step * size` in `order`.
fn window<'a>(examples: &'a [Example], order: &[usize], step: usize, size: usize) -> Vec<&'a Example> {
    (0..size.min(order.len()))
        .map(|i| &examples[order[(step * size + i) % order.len()]])
        .collect()
}

/// Mini-batch gradient descent on clean plus weak examples.
///
/// Each step pairs one clean batch with one batch from every active weak
/// source (λ > 0, non-empty); an epoch runs until the largest of them has
/// been covered, cycling the smaller ones. Sources with λ = 0 never touch
/// the parameters or the random streams.
pub fn train_mwss(
    clean: &[(String, Label)],
    weak_sets: &BTreeMap<String, Vec<(String, Label)>>,
    fm: &FeatureMap,
    hyper: &MwssHyper,
) -> Result<MWSSModel> {
    fm.validate()?;
    if hyper.dim == 0 || hyper.batch_size == 0 || !(hyper.lr > 0.0) {
        return Err(Error::Config(format!("invalid mwss hyperparameters: {hyper:?}")));
    }
    if !clean.iter().any(|(_, l)| l.is_fake()) || !clean.iter().any(|(_, l)| !l.is_fake()) {
        return Err(Error::Training("clean set needs both fake and real examples".into()));
    }
    if let Some((s, l)) = hyper.lambdas.iter().find(|(_, l)| !(**l >= 0.0)) {
        return Err(Error::Config(format!("lambda for {s} must be non-negative, got {l}")));
    }
    let sources: Vec<String> = weak_sets.keys().cloned().collect();
    let mut model = MWSSModel::init(*fm, hyper, &sources);

    let clean_x = featurize_all(fm, clean);
    let active: Vec<(String, f64, Vec<Example>)> = weak_sets
        .iter()
        .filter(|(s, data)| model.lambdas[*s] > 0.0 && !data.is_empty())
        .map(|(s, data)| (s.clone(), model.lambdas[s], featurize_all(fm, data)))
        .collect();

    let bs = hyper.batch_size;
    let steps = active
        .iter()
        .map(|(_, _, xs)| xs.len().div_ceil(bs))
        .chain(std::iter::once(clean_x.len().div_ceil(bs)))
        .max()
        .unwrap_or(1);

    let mut clean_rng = ChaCha8Rng::seed_from_u64(hyper.seed.wrapping_add(1));
    let mut weak_rngs: Vec<ChaCha8Rng> = active
        .iter()
        .map(|(s, _, _)| ChaCha8Rng::seed_from_u64(seed_for(hyper.seed.wrapping_add(1), s)))
        .collect();
    let mut clean_order: Vec<usize> = (0..clean_x.len()).collect();
    let mut weak_orders: Vec<Vec<usize>> = active.iter().map(|(_, _, xs)| (0..xs.len()).collect()).collect();

    for _ in 0..hyper.epochs {
        clean_order.shuffle(&mut clean_rng);
        for (order, rng) in weak_orders.iter_mut().zip(&mut weak_rngs) {
            order.shuffle(rng);
        }
        for step in 0..steps {
            let mut batch = Batch {
                clean: window(&clean_x, &clean_order, step, bs),
                weak: BTreeMap::new(),
            };
            for ((s, lambda, xs), order) in active.iter().zip(&weak_orders) {
                batch.weak.insert(s.clone(), (*lambda, window(xs, order, step, bs)));
            }
            let grad = batch_gradient(&model, &batch);
            apply(&mut model, &grad, hyper.lr);
        }
    }
    if !model.is_finite() {
        return Err(Error::Training("parameters diverged; lower the learning rate".into()));
    }
    Ok(model)
}

/// Probability that `text` is fake. Reads nothing but the text.
pub fn infer(model: &MWSSModel, text: &str, fm: &FeatureMap) -> f64 {
    model.clean_probability(&featurize(text, fm))
}

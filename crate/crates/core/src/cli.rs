//! Command-line driver: `wsskit <subcommand> --config <path>`.
//!
//! The config file is flat `key = value` text with dotted section keys and
//! `#` comments. Relative paths resolve against the config file's directory.
//! `WSSKIT_SEED` overrides the `seed` key. Every output goes to
//! `paths.output` through an atomic rename, under a lock file that keeps two
//! invocations off the same directory.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{load_dataset, read_jsonl, read_labels, write_atomic, write_jsonl, Dataset, Label};
use crate::error::{Error, Result};
use crate::metrics::{evaluate, EvalReport};
use crate::mwss::{infer, train_mwss, FeatureMap, MWSSModel, MwssHyper};
use crate::propnet::{compare_rows, feature_rows, FeatureRow};
use crate::provenance::{load_edges, top_k_transmitters, DiffusionInstance, Edge, DEFAULT_ALPHA};
use crate::signals::{
    builtin_seed_bias, compute_signals_with, load_seed_bias, SentimentLexicon, SentimentScope, SignalTable,
    SignalsConfig,
};
use crate::synth::{generate, save_synth, SynthConfig};
use crate::trifn::{build_matrices, fit_trifn, TriFNConfig};
use crate::weaklabel::{
    calibrate_thresholds, label_all, Source, ThresholdGrid, WeakLabel, WeakLabelRecord, WeakLabelerConfig,
};

pub const SEED_ENV: &str = "WSSKIT_SEED";
pub const LOCK_FILE: &str = ".wsskit.lock";

pub const SIGNALS_OUT: &str = "signals.json";
pub const WEAK_LABELS_OUT: &str = "weak_labels.jsonl";
pub const CALIBRATED_OUT: &str = "calibrated.conf";
pub const TRIFN_MODEL_OUT: &str = "trifn_model.json";
pub const TRIFN_PREDICTIONS_OUT: &str = "trifn_predictions.jsonl";
pub const MWSS_MODEL_OUT: &str = "mwss_model.json";
pub const MWSS_PREDICTIONS_OUT: &str = "mwss_predictions.jsonl";
pub const INFER_OUT: &str = "infer_predictions.jsonl";
pub const PROP_FEATURES_OUT: &str = "prop_features.jsonl";
pub const COMPARISON_OUT: &str = "comparison.json";
pub const TRANSMITTERS_OUT: &str = "transmitters.jsonl";
pub const EVAL_OUT: &str = "eval.json";

const SPLIT_SALT: u64 = 0x7472_6169_6e00;
const VALIDATION_SALT: u64 = 0x7661_6c69_6400;
const WEAK_SALT: u64 = 0x7765_616b_0000;

#[derive(Debug, Parser)]
#[command(name = "wsskit", version, about = "Disinformation detection with weak social supervision")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration file
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Load and check a corpus directory
    Validate,
    /// Generate a planted synthetic corpus into paths.corpus
    Synth,
    /// Compute sentiment, bias and credibility signals
    Signals,
    /// Apply the three weak labeling rules
    LabelWeak,
    /// Fit rule thresholds on a validation split
    Calibrate,
    /// Train the tri-relationship factorization detector
    TrainTrifn,
    /// Train the multi-source weak-supervision classifier
    TrainMwss,
    /// Score texts with a trained weak-supervision classifier
    Infer,
    /// Export propagation-network features
    PropFeatures,
    /// Compare propagation features of fake and real news
    Compare,
    /// Rank likely transmitters of a diffusion
    Attribute,
    /// Score a predictions file against labels
    Eval,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Paths {
    pub corpus: PathBuf,
    pub output: PathBuf,
    pub lexicon: Option<PathBuf>,
    pub seed_bias: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub weak_labels: Option<PathBuf>,
    pub thresholds: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub predictions: Option<PathBuf>,
    pub edges: Option<PathBuf>,
    pub infer_input: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub paths: Paths,
    pub signals: SignalsConfig,
    pub weak: WeakLabelerConfig,
    pub validation_fraction: f64,
    pub train_fraction: f64,
    pub trifn: TriFNConfig,
    pub trifn_vocab: usize,
    pub mwss: MwssHyper,
    pub feature_map: FeatureMap,
    pub mwss_clean_limit: Option<usize>,
    pub mwss_weak_limit: Option<usize>,
    pub alpha: f64,
    pub top_k: Option<usize>,
    pub recipients: Vec<String>,
    pub candidates: Option<Vec<String>>,
    pub synth: SynthConfig,
    pub eval_split: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            paths: Paths {
                corpus: PathBuf::from("corpus"),
                output: PathBuf::from("out"),
                lexicon: None,
                seed_bias: None,
                labels: None,
                weak_labels: None,
                thresholds: None,
                model: None,
                predictions: None,
                edges: None,
                infer_input: None,
            },
            signals: SignalsConfig::default(),
            weak: WeakLabelerConfig::default(),
            validation_fraction: 0.2,
            train_fraction: 0.7,
            trifn: TriFNConfig::default(),
            trifn_vocab: 4096,
            mwss: MwssHyper::default(),
            feature_map: FeatureMap::default(),
            mwss_clean_limit: None,
            mwss_weak_limit: None,
            alpha: DEFAULT_ALPHA,
            top_k: None,
            recipients: Vec::new(),
            candidates: None,
            synth: SynthConfig::default(),
            eval_split: None,
        }
    }
}

/// `key = value` pairs with their line numbers; comments and blanks dropped.
fn parse_pairs(text: &str, file: &str) -> Result<Vec<(usize, String, String)>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            file: file.to_string(),
            line: i + 1,
            message,
        };
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| parse_err(format!("expected `key = value`, got `{line}`")))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(parse_err("empty key".into()));
        }
        if !seen.insert(k.to_string()) {
            return Err(parse_err(format!("duplicate key `{k}`")));
        }
        out.push((i + 1, k.to_string(), v.to_string()));
    }
    Ok(out)
}

fn value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>()
        .map_err(|e| Error::Config(format!("bad value `{v}` for {key}: {e}")))
}

fn list(key: &str, v: &str) -> Result<Vec<String>> {
    serde_json::from_str(v).map_err(|e| Error::Config(format!("{key} must be a JSON array of strings: {e}")))
}

impl RunConfig {
    /// Parse config text; relative paths are joined onto `base`.
    pub fn parse(text: &str, base: &Path) -> Result<RunConfig> {
        let mut c = RunConfig::default();
        let path = |v: &str| base.join(v);
        for (line, key, v) in parse_pairs(text, "config")? {
            let v = v.as_str();
            match key.as_str() {
                "seed" => c.seed = value(&key, v)?,
                "paths.corpus" => c.paths.corpus = path(v),
                "paths.output" => c.paths.output = path(v),
                "paths.lexicon" => c.paths.lexicon = Some(path(v)),
                "paths.seed_bias" => c.paths.seed_bias = Some(path(v)),
                "paths.labels" => c.paths.labels = Some(path(v)),
                "paths.weak_labels" => c.paths.weak_labels = Some(path(v)),
                "paths.thresholds" => c.paths.thresholds = Some(path(v)),
                "paths.model" => c.paths.model = Some(path(v)),
                "paths.predictions" => c.paths.predictions = Some(path(v)),
                "paths.edges" => c.paths.edges = Some(path(v)),
                "paths.infer_input" => c.paths.infer_input = Some(path(v)),
                "signals.credibility_theta" => c.signals.credibility_theta = value(&key, v)?,
                "signals.sentiment_scope" => {
                    c.signals.sentiment_scope = match v {
                        "all" => SentimentScope::All,
                        "replies" => SentimentScope::Replies,
                        _ => return Err(Error::Config(format!("{key} must be `all` or `replies`"))),
                    }
                }
                "split.validation_fraction" => c.validation_fraction = value(&key, v)?,
                "split.train_fraction" => c.train_fraction = value(&key, v)?,
                "trifn.latent_dim" => c.trifn.latent_dim = value(&key, v)?,
                "trifn.lambda_homophily" => c.trifn.lambda_homophily = value(&key, v)?,
                "trifn.lambda_engage" => c.trifn.lambda_engage = value(&key, v)?,
                "trifn.lambda_publisher" => c.trifn.lambda_publisher = value(&key, v)?,
                "trifn.lambda_classify" => c.trifn.lambda_classify = value(&key, v)?,
                "trifn.max_iters" => c.trifn.max_iters = value(&key, v)?,
                "trifn.step_init" => c.trifn.step_init = value(&key, v)?,
                "trifn.tol" => c.trifn.tol = value(&key, v)?,
                "trifn.vocab_size" => c.trifn_vocab = value(&key, v)?,
                "mwss.dim" => c.mwss.dim = value(&key, v)?,
                "mwss.epochs" => c.mwss.epochs = value(&key, v)?,
                "mwss.lr" => c.mwss.lr = value(&key, v)?,
                "mwss.batch_size" => c.mwss.batch_size = value(&key, v)?,
                "mwss.hash_dim" => c.feature_map.hash_dim = value(&key, v)?,
                "mwss.l2_normalize" => c.feature_map.l2_normalize = value(&key, v)?,
                "mwss.clean_limit" => c.mwss_clean_limit = Some(value(&key, v)?),
                "mwss.weak_limit" => c.mwss_weak_limit = Some(value(&key, v)?),
                "provenance.alpha" => c.alpha = value(&key, v)?,
                "provenance.k" => c.top_k = Some(value(&key, v)?),
                "provenance.recipients" => c.recipients = list(&key, v)?,
                "provenance.candidates" => c.candidates = Some(list(&key, v)?),
                "synth.n_news" => c.synth.n_news = value(&key, v)?,
                "synth.n_users" => c.synth.n_users = value(&key, v)?,
                "synth.n_publishers" => c.synth.n_publishers = value(&key, v)?,
                "synth.fake_fraction" => c.synth.fake_fraction = value(&key, v)?,
                "synth.homophily_strength" => c.synth.homophily_strength = value(&key, v)?,
                "synth.bias_gap" => c.synth.bias_gap = value(&key, v)?,
                "synth.credibility_gap" => c.synth.credibility_gap = value(&key, v)?,
                "synth.sentiment_gap" => c.synth.sentiment_gap = value(&key, v)?,
                "synth.cascade_boost" => c.synth.cascade_boost = value(&key, v)?,
                "synth.vocab_signal" => c.synth.vocab_signal = value(&key, v)?,
                "eval.split" => c.eval_split = Some(v.to_string()),
                k => {
                    if let Some(source) = k.strip_prefix("mwss.lambda.") {
                        let s = Source::parse(source)
                            .ok_or_else(|| Error::Config(format!("line {line}: unknown weak source `{source}`")))?;
                        c.mwss.lambdas.insert(s.name().to_string(), value(&key, v)?);
                    } else if !c.apply_weak_key(k, v)? {
                        return Err(Error::Config(format!("line {line}: unknown key `{k}`")));
                    }
                }
            }
        }
        c.sync_seed();
        Ok(c)
    }

    fn apply_weak_key(&mut self, key: &str, v: &str) -> Result<bool> {
        match key {
            "weak.tau1" => self.weak.tau1 = value(key, v)?,
            "weak.tau2" => self.weak.tau2 = value(key, v)?,
            "weak.tau3" => self.weak.tau3 = value(key, v)?,
            "weak.min_support" => self.weak.min_support = value(key, v)?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    fn sync_seed(&mut self) {
        self.trifn.seed = self.seed;
        self.mwss.seed = self.seed;
        self.synth.seed = self.seed;
    }

    /// Read a config file, apply `WSSKIT_SEED` and the thresholds file.
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut c = RunConfig::parse(&text, base)?;
        if let Ok(s) = std::env::var(SEED_ENV) {
            c.seed = value(SEED_ENV, s.trim())?;
            c.sync_seed();
        }
        if let Some(t) = c.paths.thresholds.clone() {
            let raw = fs::read_to_string(&t).map_err(|e| Error::io(&t, e))?;
            for (line, k, v) in parse_pairs(&raw, &t.display().to_string())? {
                if !c.apply_weak_key(&k, &v)? {
                    return Err(Error::Config(format!("{} line {line}: only weak.* keys allowed", t.display())));
                }
            }
        }
        c.validate()?;
        Ok(c)
    }

    /// Numeric bounds and existence of input files.
    pub fn validate(&self) -> Result<()> {
        self.weak.validate()?;
        self.trifn.validate()?;
        self.feature_map.validate()?;
        self.synth.validate()?;
        for (name, f) in [("split.validation_fraction", self.validation_fraction), ("split.train_fraction", self.train_fraction)] {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1), got {f}")));
            }
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Config(format!("provenance.alpha must lie in [0, 1], got {}", self.alpha)));
        }
        if !(self.signals.credibility_theta > 0.0 && self.signals.credibility_theta <= 1.0) {
            return Err(Error::Config("signals.credibility_theta must lie in (0, 1]".into()));
        }
        if self.trifn_vocab == 0 || self.mwss.dim == 0 || self.mwss.batch_size == 0 || !(self.mwss.lr > 0.0) {
            return Err(Error::Config("sizes and learning rates must be positive".into()));
        }
        Ok(())
    }

    /// Every configured input file must exist before a command reads any.
    /// `synth` only writes, so it is exempt.
    pub fn check_inputs(&self, command: Command) -> Result<()> {
        if command == Command::Synth {
            return Ok(());
        }
        let p = &self.paths;
        for f in [&p.lexicon, &p.seed_bias, &p.labels, &p.edges, &p.infer_input].into_iter().flatten() {
            if !f.exists() {
                return Err(Error::Config(format!("referenced path does not exist: {}", f.display())));
            }
        }
        Ok(())
    }

    fn out(&self, name: &str) -> PathBuf {
        self.paths.output.join(name)
    }
}

/// Exclusive hold on the output directory for one invocation.
struct OutputLock(PathBuf);

impl OutputLock {
    fn acquire(dir: &Path) -> Result<OutputLock> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(LOCK_FILE);
        match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(_) => Ok(OutputLock(path)),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(Error::Config(format!(
                "output directory is in use ({} exists; remove it if no run is active)",
                path.display()
            ))),
            Err(e) => Err(Error::io(&path, e)),
        }
    }
}

impl Drop for OutputLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub news_id: String,
    pub p_fake: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<String>,
}

/// Input line for `infer`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TextRecord {
    pub news_id: String,
    pub text: String,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Error::Config(e.to_string()))?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let raw = fs::read(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_slice(&raw).map_err(|e| Error::Parse {
        file: path.display().to_string(),
        line: e.line(),
        message: e.to_string(),
    })
}

fn load_signals(cfg: &RunConfig, d: &Dataset) -> Result<SignalTable> {
    let lexicon = match &cfg.paths.lexicon {
        Some(p) => SentimentLexicon::load(p)?,
        None => SentimentLexicon::builtin(),
    };
    let seeds = match &cfg.paths.seed_bias {
        Some(p) => load_seed_bias(p)?,
        None => builtin_seed_bias(),
    };
    Ok(compute_signals_with(d, &lexicon, &seeds, &cfg.signals))
}

/// Labels from `paths.labels` when set, otherwise the corpus clean labels.
/// Only ids present in the corpus are kept.
fn labels_for(cfg: &RunConfig, d: &Dataset) -> Result<BTreeMap<String, Label>> {
    match &cfg.paths.labels {
        Some(p) => {
            let known: HashSet<&str> = d.news.iter().map(|n| n.id.as_str()).collect();
            Ok(read_labels(p)?.into_iter().filter(|(k, _)| known.contains(k.as_str())).collect())
        }
        None => Ok(d
            .news
            .iter()
            .filter_map(|n| n.clean_label.map(|l| (n.id.clone(), l)))
            .collect()),
    }
}

/// Seeded shuffle of `ids`, cut after `round(fraction · n)` items.
pub fn split_ids(ids: &[String], fraction: f64, seed: u64) -> (Vec<String>, Vec<String>) {
    let mut v = ids.to_vec();
    v.sort();
    v.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let cut = ((v.len() as f64) * fraction).round() as usize;
    let rest = v.split_off(cut.min(v.len()));
    (v, rest)
}

/// Train/test split of the labeled ids shared by training and evaluation.
fn train_test(cfg: &RunConfig, labels: &BTreeMap<String, Label>) -> (Vec<String>, Vec<String>) {
    let ids: Vec<String> = labels.keys().cloned().collect();
    split_ids(&ids, cfg.train_fraction, cfg.seed ^ SPLIT_SALT)
}

fn split_tags(train: &[String], test: &[String]) -> HashMap<String, &'static str> {
    train
        .iter()
        .map(|id| (id.clone(), "train"))
        .chain(test.iter().map(|id| (id.clone(), "test")))
        .collect()
}

fn subset(labels: &BTreeMap<String, Label>, ids: &[String]) -> HashMap<String, Label> {
    ids.iter().map(|id| (id.clone(), labels[id])).collect()
}

fn thresholds_conf(w: &WeakLabelerConfig) -> String {
    format!(
        "weak.tau1 = {}\nweak.tau2 = {}\nweak.tau3 = {}\nweak.min_support = {}\n",
        w.tau1, w.tau2, w.tau3, w.min_support
    )
}

/// Run one subcommand; returns the summary line printed on success.
pub fn execute(command: Command, cfg: &RunConfig) -> Result<String> {
    cfg.check_inputs(command)?;
    let _lock = OutputLock::acquire(&cfg.paths.output)?;
    match command {
        Command::Synth => {
            let (d, truth) = generate(&cfg.synth)?;
            save_synth(&d, &truth, &cfg.paths.corpus)?;
            return Ok(format!(
                "wrote {} news, {} users, {} engagements to {}",
                d.news.len(),
                d.users.len(),
                d.engagements.len(),
                cfg.paths.corpus.display()
            ));
        }
        Command::Eval => return eval(cfg),
        _ => {}
    }
    let d = load_dataset(&cfg.paths.corpus)?;
    match command {
        Command::Validate => Ok(format!(
            "ok: {} news, {} users, {} publishers, {} engagements, {} friendships",
            d.news.len(),
            d.users.len(),
            d.publishers.len(),
            d.engagements.len(),
            d.friendships.len()
        )),
        Command::Signals => {
            let sig = load_signals(cfg, &d)?;
            write_json(&cfg.out(SIGNALS_OUT), &sig)?;
            Ok(format!("scored {} engagements and {} users", sig.sentiment_by_engagement.len(), sig.bias_by_user.len()))
        }
        Command::LabelWeak => {
            let sig = load_signals(cfg, &d)?;
            let sets = label_all(&d, &sig, &cfg.weak);
            let records: Vec<WeakLabelRecord> = sets.iter().flat_map(|s| s.records()).collect();
            write_jsonl(&cfg.out(WEAK_LABELS_OUT), &records)?;
            let summary: Vec<String> = sets
                .iter()
                .map(|s| {
                    format!(
                        "{}: {} fake, {} real, {} abstain",
                        s.source,
                        s.count(WeakLabel::Fake),
                        s.count(WeakLabel::Real),
                        s.count(WeakLabel::Abstain)
                    )
                })
                .collect();
            Ok(summary.join("; "))
        }
        Command::Calibrate => {
            let labels = labels_for(cfg, &d)?;
            let ids: Vec<String> = labels.keys().cloned().collect();
            let (validation, _) = split_ids(&ids, cfg.validation_fraction, cfg.seed ^ VALIDATION_SALT);
            let sig = load_signals(cfg, &d)?;
            let tuned = calibrate_thresholds(&d.with_labels(&subset(&labels, &validation)), &sig, &ThresholdGrid::default(), &cfg.weak)?;
            write_atomic(&cfg.out(CALIBRATED_OUT), thresholds_conf(&tuned).as_bytes())?;
            Ok(format!(
                "calibrated on {} items: tau1={} tau2={} tau3={}",
                validation.len(),
                tuned.tau1,
                tuned.tau2,
                tuned.tau3
            ))
        }
        Command::TrainTrifn => {
            let labels = labels_for(cfg, &d)?;
            let (train, test) = train_test(cfg, &labels);
            let sig = load_signals(cfg, &d)?;
            let m = build_matrices(&d, &sig, cfg.trifn_vocab)?;
            let model = fit_trifn(&m, &subset(&labels, &train), &cfg.trifn)?;
            write_json(&cfg.out(TRIFN_MODEL_OUT), &model)?;
            let tags = split_tags(&train, &test);
            let preds: Vec<Prediction> = model
                .training_probabilities()
                .into_iter()
                .map(|(id, p)| Prediction {
                    split: tags.get(&id).map(|s| s.to_string()),
                    news_id: id,
                    p_fake: p,
                })
                .collect();
            write_jsonl(&cfg.out(TRIFN_PREDICTIONS_OUT), &preds)?;
            Ok(format!(
                "trained on {} labels over {} iterations, final objective {}",
                train.len(),
                model.trace.len() - 1,
                model.trace.last().copied().unwrap_or(f64::NAN)
            ))
        }
        Command::TrainMwss => train_mwss_cmd(cfg, &d),
        Command::Infer => {
            let path = cfg.paths.model.clone().unwrap_or_else(|| cfg.out(MWSS_MODEL_OUT));
            let model: MWSSModel = read_json(&path)?;
            let inputs: Vec<TextRecord> = match &cfg.paths.infer_input {
                Some(p) => read_jsonl(p)?,
                None => d
                    .news
                    .iter()
                    .map(|n| TextRecord { news_id: n.id.clone(), text: n.text.clone() })
                    .collect(),
            };
            let preds: Vec<Prediction> = inputs
                .iter()
                .map(|r| Prediction {
                    news_id: r.news_id.clone(),
                    p_fake: infer(&model, &r.text, &model.feature_map),
                    split: None,
                })
                .collect();
            write_jsonl(&cfg.out(INFER_OUT), &preds)?;
            Ok(format!("scored {} texts", preds.len()))
        }
        Command::PropFeatures => {
            let labels: HashMap<String, Label> = labels_for(cfg, &d)?.into_iter().collect();
            let rows = feature_rows(&d.with_labels(&labels));
            write_jsonl(&cfg.out(PROP_FEATURES_OUT), &rows)?;
            Ok(format!("extracted features for {} news", rows.len()))
        }
        Command::Compare => {
            let path = cfg.out(PROP_FEATURES_OUT);
            let rows: Vec<FeatureRow> = if path.exists() {
                read_jsonl(&path)?
            } else {
                let labels: HashMap<String, Label> = labels_for(cfg, &d)?.into_iter().collect();
                feature_rows(&d.with_labels(&labels))
            };
            let report = compare_rows(&rows)?;
            write_json(&cfg.out(COMPARISON_OUT), &report)?;
            let lines: Vec<String> = report
                .iter()
                .map(|c| format!("{} p={:.3e} dir={:+}", c.feature, c.p_value, c.direction))
                .collect();
            Ok(lines.join("; "))
        }
        Command::Attribute => {
            let edges: Vec<Edge> = match &cfg.paths.edges {
                Some(p) => load_edges(p)?,
                None => d.friendships.iter().map(|f| Edge { a: f.a.clone(), b: f.b.clone() }).collect(),
            };
            if cfg.recipients.is_empty() {
                return Err(Error::Config("provenance.recipients is empty".into()));
            }
            let probe = DiffusionInstance::from_edges(&edges, &cfg.recipients, &[])?;
            let candidates = cfg.candidates.clone().unwrap_or_else(|| probe.nodes().to_vec());
            let inst = DiffusionInstance::from_edges(&edges, &cfg.recipients, &candidates)?;
            let k = cfg.top_k.unwrap_or(inst.candidates().count());
            let ranked = top_k_transmitters(&inst, k, cfg.alpha)?;
            write_jsonl(&cfg.out(TRANSMITTERS_OUT), &ranked)?;
            Ok(match ranked.first() {
                Some(r) => format!("top transmitter {} (score {:.4}) of {}", r.node, r.score, ranked.len()),
                None => "no transmitters requested".into(),
            })
        }
        Command::Synth | Command::Eval => unreachable!("handled above"),
    }
}

fn train_mwss_cmd(cfg: &RunConfig, d: &Dataset) -> Result<String> {
    let labels = labels_for(cfg, d)?;
    let (mut train, test) = train_test(cfg, &labels);
    if let Some(n) = cfg.mwss_clean_limit {
        train.truncate(n);
    }
    let text_of: HashMap<&str, &str> = d.news.iter().map(|n| (n.id.as_str(), n.text.as_str())).collect();
    let clean: Vec<(String, Label)> = train.iter().map(|id| (text_of[id.as_str()].to_string(), labels[id])).collect();

    let weak_path = cfg.paths.weak_labels.clone().unwrap_or_else(|| cfg.out(WEAK_LABELS_OUT));
    let records: Vec<WeakLabelRecord> = read_jsonl(&weak_path)?;
    let held_out: HashSet<&str> = test.iter().map(String::as_str).collect();
    let mut by_source: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for r in &records {
        if r.label != WeakLabel::Abstain && !held_out.contains(r.news_id.as_str()) && text_of.contains_key(r.news_id.as_str()) {
            by_source.entry(r.source.name().to_string()).or_default().push(r.news_id.clone());
        }
    }
    let weak_label: HashMap<(&str, &str), Label> = records
        .iter()
        .filter_map(|r| r.label.as_label().map(|l| ((r.source.name(), r.news_id.as_str()), l)))
        .collect();
    let mut weak_sets = BTreeMap::new();
    for (source, ids) in by_source {
        let (mut picked, _) = split_ids(&ids, 1.0, cfg.seed ^ WEAK_SALT);
        if let Some(n) = cfg.mwss_weak_limit {
            picked.truncate(n);
        }
        let examples: Vec<(String, Label)> = picked
            .iter()
            .map(|id| (text_of[id.as_str()].to_string(), weak_label[&(source.as_str(), id.as_str())]))
            .collect();
        weak_sets.insert(source, examples);
    }

    let model = train_mwss(&clean, &weak_sets, &cfg.feature_map, &cfg.mwss)?;
    write_json(&cfg.out(MWSS_MODEL_OUT), &model)?;
    let tags = split_tags(&train, &test);
    let preds: Vec<Prediction> = d
        .news
        .iter()
        .map(|n| Prediction {
            news_id: n.id.clone(),
            p_fake: infer(&model, &n.text, &model.feature_map),
            split: tags.get(&n.id).map(|s| s.to_string()),
        })
        .collect();
    write_jsonl(&cfg.out(MWSS_PREDICTIONS_OUT), &preds)?;
    let sizes: Vec<String> = weak_sets.iter().map(|(s, v)| format!("{s}={}", v.len())).collect();
    Ok(format!("trained on {} clean labels, weak sets [{}]", clean.len(), sizes.join(", ")))
}

fn eval(cfg: &RunConfig) -> Result<String> {
    let pred_path = cfg.paths.predictions.clone().unwrap_or_else(|| cfg.out(TRIFN_PREDICTIONS_OUT));
    let preds: Vec<Prediction> = read_jsonl(&pred_path)?;
    let labels = match &cfg.paths.labels {
        Some(p) => read_labels(p)?,
        None => labels_for(cfg, &load_dataset(&cfg.paths.corpus)?)?,
    };
    let pairs: Vec<(f64, Label)> = preds
        .iter()
        .filter(|p| cfg.eval_split.is_none() || p.split == cfg.eval_split)
        .filter_map(|p| labels.get(&p.news_id).map(|&l| (p.p_fake, l)))
        .collect();
    if pairs.is_empty() {
        return Err(Error::Argument("no prediction matches a label".into()));
    }
    let report: EvalReport = evaluate(&pairs);
    write_json(&cfg.out(EVAL_OUT), &report)?;
    Ok(format!(
        "n={} accuracy={:.4} f1={:.4} macro_f1={:.4} auc={}",
        report.n,
        report.accuracy,
        report.f1,
        report.macro_f1,
        report.auc.map_or("n/a".to_string(), |a| format!("{a:.4}"))
    ))
}

/// Parse `args` (program name first), run, and return the process exit
/// code: 0 on success, 1 on a module error, 2 on a usage error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let Some(config) = cli.config else {
        eprintln!("error: --config <PATH> is required\n\nUsage: wsskit <COMMAND> --config <PATH>");
        return 2;
    };
    match RunConfig::load(&config).and_then(|cfg| execute(cli.command, &cfg)) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

//! Tri-relationship embedding detector.
//!
//! News, users and vocabulary terms share one nonnegative latent space.
//! The fitted objective is
//!
//! ```text
//! J = ‖X − D Vᵀ‖²
//!   + λe Σ_{(i,k) engaged} c_i² (1 − U_i·D_k)²
//!   + λh Σ_{(i,j) friends} ‖U_i − U_j‖²
//!   + λp Σ_{p known} (mean_{k ∈ news(p)} D_k·q − o_p)²
//!   + λc Σ_{i labeled} logloss(σ(D_i·w + b), y_i)
//! ```
//!
//! with `X` the TF-IDF news-term matrix, `c` user credibility and `o` the
//! magnitude of publisher partisanship. `D`, `U`, `V` are kept nonnegative by
//! projection; the step is halved until `J` does not increase.

use std::collections::{BTreeMap, HashMap};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Dataset, Label};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::matrix::{dot, log_loss_logit, sigmoid, vec_mat, Mat};
use crate::signals::SignalTable;
use crate::text::{bucket, tokenize, SparseVec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriFNConfig {
    pub latent_dim: usize,
    pub lambda_homophily: f64,
    pub lambda_engage: f64,
    pub lambda_publisher: f64,
    pub lambda_classify: f64,
    pub max_iters: usize,
    pub step_init: f64,
    pub tol: f64,
    pub seed: u64,
}

impl Default for TriFNConfig {
    fn default() -> Self {
        TriFNConfig {
            latent_dim: 16,
            lambda_homophily: 1.0,
            lambda_engage: 1.0,
            lambda_publisher: 1.0,
            lambda_classify: 1.0,
            max_iters: 300,
            step_init: 0.01,
            tol: 1e-6,
            seed: 0,
        }
    }
}

impl TriFNConfig {
    pub fn validate(&self) -> Result<()> {
        let lambdas = [
            self.lambda_homophily,
            self.lambda_engage,
            self.lambda_publisher,
            self.lambda_classify,
        ];
        if self.latent_dim == 0
            || lambdas.iter().any(|l| !(*l >= 0.0))
            || !(self.step_init > 0.0)
            || !(self.tol > 0.0)
        {
            return Err(Error::Config(format!("invalid trifn config: {self:?}")));
        }
        Ok(())
    }

    /// Same configuration with the social terms switched off.
    pub fn content_only(&self) -> Self {
        TriFNConfig {
            lambda_homophily: 0.0,
            lambda_engage: 0.0,
            lambda_publisher: 0.0,
            ..self.clone()
        }
    }
}

/// Relation matrices of a dataset, stored sparsely.
#[derive(Clone, Debug, PartialEq)]
pub struct TriMatrices {
    pub news_ids: Vec<String>,
    pub user_ids: Vec<String>,
    pub publisher_ids: Vec<String>,
    pub vocab_size: usize,
    /// Smoothed inverse document frequency per hashed term.
    pub idf: Vec<f64>,
    /// TF-IDF rows, L2-normalized.
    pub x: Vec<SparseVec>,
    /// Column view of `x`: for each term, (news, value).
    pub x_cols: Vec<Vec<(usize, f64)>>,
    /// Nonzero cells of the binary user × news engagement matrix.
    pub engaged: Vec<(usize, usize)>,
    pub news_of_user: Vec<Vec<usize>>,
    pub users_of_news: Vec<Vec<usize>>,
    /// Friendship pairs `(i, j)` with `i < j`.
    pub friends: Vec<(usize, usize)>,
    pub neighbors: Vec<Vec<usize>>,
    pub publisher_of_news: Vec<usize>,
    pub news_of_publisher: Vec<Vec<usize>>,
    /// Regression target per publisher; `None` where partisanship is unknown.
    pub publisher_target: Vec<Option<f64>>,
    pub credibility: Vec<f64>,
}

/// Raw hashed unigram counts of `text`.
pub fn hashed_counts(text: &str, vocab_size: usize) -> SparseVec {
    SparseVec::from_pairs(
        vocab_size,
        tokenize(text).iter().map(|t| (bucket(t, vocab_size), 1.0)).collect(),
    )
}

/// TF-IDF row for `text` under a fitted `idf`.
pub fn tfidf_row(text: &str, idf: &[f64]) -> SparseVec {
    let mut row = hashed_counts(text, idf.len());
    row.entries.iter_mut().for_each(|(j, v)| *v *= idf[*j]);
    row.normalize();
    row
}

pub fn build_matrices(d: &Dataset, sig: &SignalTable, vocab_size: usize) -> Result<TriMatrices> {
    if vocab_size == 0 {
        return Err(Error::Argument("vocab_size must be positive".into()));
    }
    let idx = d.index();
    let exec = Exec::current();
    let n_news = d.news.len();

    let counts = exec.map(&d.news, |n| hashed_counts(&n.text, vocab_size));
    let mut df = vec![0usize; vocab_size];
    for row in &counts {
        for &(j, _) in &row.entries {
            df[j] += 1;
        }
    }
    let idf: Vec<f64> = df
        .iter()
        .map(|&f| ((1.0 + n_news as f64) / (1.0 + f as f64)).ln() + 1.0)
        .collect();
    let x: Vec<SparseVec> = d.news.iter().map(|n| tfidf_row(&n.text, &idf)).collect();
    let mut x_cols = vec![Vec::new(); vocab_size];
    for (i, row) in x.iter().enumerate() {
        for &(j, v) in &row.entries {
            x_cols[j].push((i, v));
        }
    }

    let mut engaged: Vec<(usize, usize)> = d
        .engagements
        .iter()
        .filter_map(|e| Some((*idx.user_pos.get(e.user_id.as_str())?, *idx.news_pos.get(e.news_id.as_str())?)))
        .collect();
    engaged.sort_unstable();
    engaged.dedup();
    let mut news_of_user = vec![Vec::new(); d.users.len()];
    let mut users_of_news = vec![Vec::new(); n_news];
    for &(u, n) in &engaged {
        news_of_user[u].push(n);
        users_of_news[n].push(u);
    }

    let mut friends: Vec<(usize, usize)> = d
        .friendships
        .iter()
        .filter_map(|f| {
            let a = *idx.user_pos.get(f.a.as_str())?;
            let b = *idx.user_pos.get(f.b.as_str())?;
            Some((a.min(b), a.max(b)))
        })
        .collect();
    friends.sort_unstable();
    friends.dedup();
    let mut neighbors = vec![Vec::new(); d.users.len()];
    for &(a, b) in &friends {
        neighbors[a].push(b);
        neighbors[b].push(a);
    }

    let publisher_of_news: Vec<usize> = d
        .news
        .iter()
        .map(|n| {
            idx.publisher_pos
                .get(n.publisher_id.as_str())
                .copied()
                .ok_or_else(|| Error::validation(&n.id, "publisher_id does not resolve"))
        })
        .collect::<Result<_>>()?;
    let mut news_of_publisher = vec![Vec::new(); d.publishers.len()];
    for (k, &p) in publisher_of_news.iter().enumerate() {
        news_of_publisher[p].push(k);
    }

    Ok(TriMatrices {
        news_ids: d.news.iter().map(|n| n.id.clone()).collect(),
        user_ids: d.users.iter().map(|u| u.id.clone()).collect(),
        publisher_ids: d.publishers.iter().map(|p| p.id.clone()).collect(),
        vocab_size,
        idf,
        x,
        x_cols,
        engaged,
        news_of_user,
        users_of_news,
        friends,
        neighbors,
        publisher_of_news,
        news_of_publisher,
        publisher_target: d.publishers.iter().map(|p| p.partisanship.map(f64::abs)).collect(),
        credibility: d
            .users
            .iter()
            .map(|u| sig.credibility_by_user.get(&u.id).copied().unwrap_or(1.0))
            .collect(),
    })
}

impl TriMatrices {
    pub fn n_news(&self) -> usize {
        self.news_ids.len()
    }

    pub fn n_users(&self) -> usize {
        self.user_ids.len()
    }

    /// Dense binary engagement matrix, users × news.
    pub fn engagement_dense(&self) -> Mat {
        let mut a = Mat::zeros(self.n_users(), self.n_news());
        for &(u, n) in &self.engaged {
            a.row_mut(u)[n] = 1.0;
        }
        a
    }

    /// Dense row-normalized publisher × news matrix.
    pub fn publication_dense(&self) -> Mat {
        let mut b = Mat::zeros(self.news_of_publisher.len(), self.n_news());
        for (p, ks) in self.news_of_publisher.iter().enumerate() {
            for &k in ks {
                b.row_mut(p)[k] = 1.0 / ks.len() as f64;
            }
        }
        b
    }

    fn x_frobenius_sq(&self) -> f64 {
        self.x.iter().map(|r| r.entries.iter().map(|(_, v)| v * v).sum::<f64>()).sum()
    }

    /// Label targets (1 fake, 0 real) per news row, from `labels`.
    pub fn targets(&self, labels: &HashMap<String, Label>) -> Vec<Option<f64>> {
        self.news_ids.iter().map(|id| labels.get(id).map(|l| l.target())).collect()
    }
}

/// Learnable parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Factors {
    /// News × latent, nonnegative.
    pub d: Mat,
    /// Users × latent, nonnegative.
    pub u: Mat,
    /// Vocabulary × latent, nonnegative.
    pub v: Mat,
    /// Publisher-bias projection.
    pub q: Vec<f64>,
    /// Classifier weights over news factors.
    pub p: Vec<f64>,
    pub b: f64,
}

impl Factors {
    /// Entries of every block drawn from Uniform(0, 1); intercept 0.
    pub fn init(n_news: usize, n_users: usize, vocab: usize, dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = Mat::uniform(n_news, dim, 0.0, 1.0, &mut rng);
        let u = Mat::uniform(n_users, dim, 0.0, 1.0, &mut rng);
        let v = Mat::uniform(vocab, dim, 0.0, 1.0, &mut rng);
        let q = Mat::uniform(1, dim, 0.0, 1.0, &mut rng).data;
        let p = Mat::uniform(1, dim, 0.0, 1.0, &mut rng).data;
        Factors { d, u, v, q, p, b: 0.0 }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.d.is_nonnegative() && self.u.is_nonnegative() && self.v.is_nonnegative()
    }

    fn is_finite(&self) -> bool {
        self.d.is_finite()
            && self.u.is_finite()
            && self.v.is_finite()
            && self.q.iter().chain(&self.p).all(|x| x.is_finite())
            && self.b.is_finite()
    }

    fn check_shapes(&self, m: &TriMatrices) -> Result<()> {
        let k = self.d.cols;
        let ok = self.d.rows == m.n_news()
            && self.u.rows == m.n_users()
            && self.v.rows == m.vocab_size
            && self.u.cols == k
            && self.v.cols == k
            && self.q.len() == k
            && self.p.len() == k;
        if ok {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "factors ({}x{}, {}x{}, {}x{}) do not fit {} news / {} users / {} terms",
                self.d.rows, self.d.cols, self.u.rows, self.u.cols, self.v.rows, self.v.cols,
                m.n_news(), m.n_users(), m.vocab_size
            )))
        }
    }
}

/// Value of each objective term, unweighted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveTerms {
    pub content: f64,
    pub engage: f64,
    pub homophily: f64,
    pub publisher: f64,
    pub classify: f64,
}

impl ObjectiveTerms {
    pub fn total(&self, cfg: &TriFNConfig) -> f64 {
        self.content
            + cfg.lambda_engage * self.engage
            + cfg.lambda_homophily * self.homophily
            + cfg.lambda_publisher * self.publisher
            + cfg.lambda_classify * self.classify
    }
}

fn publisher_residuals(f: &Factors, m: &TriMatrices) -> Vec<Option<f64>> {
    m.news_of_publisher
        .iter()
        .zip(&m.publisher_target)
        .map(|(ks, target)| {
            let o = (*target)?;
            if ks.is_empty() {
                return None;
            }
            let mean = ks.iter().map(|&k| dot(f.d.row(k), &f.q)).sum::<f64>() / ks.len() as f64;
            Some(mean - o)
        })
        .collect()
}

pub fn objective_terms(f: &Factors, m: &TriMatrices, targets: &[Option<f64>]) -> Result<ObjectiveTerms> {
    f.check_shapes(m)?;
    if targets.len() != m.n_news() {
        return Err(Error::Shape(format!("{} label targets for {} news", targets.len(), m.n_news())));
    }
    let exec = Exec::current();
    // ‖X − DVᵀ‖² = ‖X‖² − 2⟨X, DVᵀ⟩ + ⟨DᵀD, VᵀV⟩
    let cross = exec.sum_range(m.n_news(), |i| {
        m.x[i].entries.iter().map(|&(j, x)| x * dot(f.d.row(i), f.v.row(j))).sum()
    });
    let gd = f.d.gram();
    let gv = f.v.gram();
    let content = (m.x_frobenius_sq() - 2.0 * cross + dot(&gd.data, &gv.data)).max(0.0);

    let engage = exec.sum_range(m.n_users(), |u| {
        let c2 = m.credibility[u] * m.credibility[u];
        m.news_of_user[u]
            .iter()
            .map(|&k| {
                let r = 1.0 - dot(f.u.row(u), f.d.row(k));
                c2 * r * r
            })
            .sum()
    });
    let homophily = m
        .friends
        .iter()
        .map(|&(a, b)| f.u.row(a).iter().zip(f.u.row(b)).map(|(x, y)| (x - y) * (x - y)).sum::<f64>())
        .sum();
    let publisher = publisher_residuals(f, m).into_iter().flatten().map(|r| r * r).sum();
    let classify = targets
        .iter()
        .enumerate()
        .filter_map(|(i, y)| y.map(|y| log_loss_logit(dot(f.d.row(i), &f.p) + f.b, y)))
        .sum();
    Ok(ObjectiveTerms {
        content,
        engage,
        homophily,
        publisher,
        classify,
    })
}

/// The full weighted objective.
pub fn objective(f: &Factors, m: &TriMatrices, targets: &[Option<f64>], cfg: &TriFNConfig) -> Result<f64> {
    Ok(objective_terms(f, m, targets)?.total(cfg))
}

/// Gradient of [`objective`] with respect to every block.
pub fn gradient(f: &Factors, m: &TriMatrices, targets: &[Option<f64>], cfg: &TriFNConfig) -> Factors {
    let k = f.d.cols;
    let exec = Exec::current();
    let gv_gram = f.v.gram();
    let gd_gram = f.d.gram();
    let pub_res = publisher_residuals(f, m);
    let logit_res: Vec<Option<f64>> = targets
        .iter()
        .enumerate()
        .map(|(i, y)| y.map(|y| sigmoid(dot(f.d.row(i), &f.p) + f.b) - y))
        .collect();

    let mut gd = Mat::zeros(f.d.rows, k);
    exec.for_each_row(&mut gd.data, k, |i, g| {
        let di = f.d.row(i);
        // content: 2 (D VᵀV − X V)
        let dvv = vec_mat(di, &gv_gram);
        g.iter_mut().zip(&dvv).for_each(|(g, x)| *g = 2.0 * x);
        for &(j, x) in &m.x[i].entries {
            g.iter_mut().zip(f.v.row(j)).for_each(|(g, v)| *g -= 2.0 * x * v);
        }
        if cfg.lambda_engage != 0.0 {
            for &u in &m.users_of_news[i] {
                let c2 = m.credibility[u] * m.credibility[u];
                let r = 1.0 - dot(f.u.row(u), di);
                let s = -2.0 * cfg.lambda_engage * c2 * r;
                g.iter_mut().zip(f.u.row(u)).for_each(|(g, x)| *g += s * x);
            }
        }
        if cfg.lambda_publisher != 0.0 {
            let p = m.publisher_of_news[i];
            if let Some(r) = pub_res[p] {
                let s = 2.0 * cfg.lambda_publisher * r / m.news_of_publisher[p].len() as f64;
                g.iter_mut().zip(&f.q).for_each(|(g, q)| *g += s * q);
            }
        }
        if let Some(r) = logit_res[i] {
            let s = cfg.lambda_classify * r;
            g.iter_mut().zip(&f.p).for_each(|(g, p)| *g += s * p);
        }
    });

    let mut gu = Mat::zeros(f.u.rows, k);
    exec.for_each_row(&mut gu.data, k, |u, g| {
        let uu = f.u.row(u);
        if cfg.lambda_engage != 0.0 {
            let c2 = m.credibility[u] * m.credibility[u];
            for &n in &m.news_of_user[u] {
                let r = 1.0 - dot(uu, f.d.row(n));
                let s = -2.0 * cfg.lambda_engage * c2 * r;
                g.iter_mut().zip(f.d.row(n)).for_each(|(g, x)| *g += s * x);
            }
        }
        if cfg.lambda_homophily != 0.0 {
            for &w in &m.neighbors[u] {
                let s = 2.0 * cfg.lambda_homophily;
                g.iter_mut()
                    .zip(uu.iter().zip(f.u.row(w)))
                    .for_each(|(g, (a, b))| *g += s * (a - b));
            }
        }
    });

    let mut gv = Mat::zeros(f.v.rows, k);
    exec.for_each_row(&mut gv.data, k, |j, g| {
        // 2 (V DᵀD − Xᵀ D)
        let vdd = vec_mat(f.v.row(j), &gd_gram);
        g.iter_mut().zip(&vdd).for_each(|(g, x)| *g = 2.0 * x);
        for &(i, x) in &m.x_cols[j] {
            g.iter_mut().zip(f.d.row(i)).for_each(|(g, d)| *g -= 2.0 * x * d);
        }
    });

    let mut gq = vec![0.0; k];
    if cfg.lambda_publisher != 0.0 {
        for (p, r) in pub_res.iter().enumerate() {
            if let Some(r) = r {
                let ks = &m.news_of_publisher[p];
                let s = 2.0 * cfg.lambda_publisher * r / ks.len() as f64;
                for &n in ks {
                    gq.iter_mut().zip(f.d.row(n)).for_each(|(g, d)| *g += s * d);
                }
            }
        }
    }
    let mut gp = vec![0.0; k];
    let mut gb = 0.0;
    for (i, r) in logit_res.iter().enumerate() {
        if let Some(r) = r {
            let s = cfg.lambda_classify * r;
            gp.iter_mut().zip(f.d.row(i)).for_each(|(g, d)| *g += s * d);
            gb += s;
        }
    }
    Factors {
        d: gd,
        u: gu,
        v: gv,
        q: gq,
        p: gp,
        b: gb,
    }
}

fn projected_step(f: &Factors, g: &Factors, step: f64) -> Factors {
    let descend = |x: &Mat, gx: &Mat| Mat {
        rows: x.rows,
        cols: x.cols,
        data: x.data.iter().zip(&gx.data).map(|(a, b)| (a - step * b).max(0.0)).collect(),
    };
    let free = |x: &[f64], gx: &[f64]| -> Vec<f64> { x.iter().zip(gx).map(|(a, b)| a - step * b).collect() };
    Factors {
        d: descend(&f.d, &g.d),
        u: descend(&f.u, &g.u),
        v: descend(&f.v, &g.v),
        q: free(&f.q, &g.q),
        p: free(&f.p, &g.p),
        b: f.b - step * g.b,
    }
}

/// Halvings tried before an iteration is declared stalled.
const MAX_HALVINGS: usize = 60;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriFNModel {
    pub config: TriFNConfig,
    pub news_ids: Vec<String>,
    pub idf: Vec<f64>,
    pub factors: Factors,
    /// Objective at initialization and after every accepted step.
    pub trace: Vec<f64>,
}

/// Train from the seeded Uniform(0, 1) initialization.
pub fn fit_trifn(m: &TriMatrices, labels: &HashMap<String, Label>, cfg: &TriFNConfig) -> Result<TriFNModel> {
    let init = Factors::init(m.n_news(), m.n_users(), m.vocab_size, cfg.latent_dim, cfg.seed);
    fit_trifn_from(m, labels, cfg, init, |_, _, _| {})
}

/// Train from `init`, calling `observe(iteration, factors, objective)` at
/// the start and after each accepted step.
pub fn fit_trifn_from(
    m: &TriMatrices,
    labels: &HashMap<String, Label>,
    cfg: &TriFNConfig,
    init: Factors,
    mut observe: impl FnMut(usize, &Factors, f64),
) -> Result<TriFNModel> {
    cfg.validate()?;
    let targets = m.targets(labels);
    for class in [1.0, 0.0] {
        if !targets.contains(&Some(class)) {
            return Err(Error::Training("need at least one labeled item of each class".into()));
        }
    }
    let mut f = init;
    if f.d.cols != cfg.latent_dim {
        return Err(Error::Shape(format!("init has {} latent dims, config {}", f.d.cols, cfg.latent_dim)));
    }
    let mut j = objective(&f, m, &targets, cfg)?;
    let mut trace = vec![j];
    observe(0, &f, j);
    let mut step = cfg.step_init;
    for it in 1..=cfg.max_iters {
        let g = gradient(&f, m, &targets, cfg);
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial = projected_step(&f, &g, step);
            let jt = objective(&trial, m, &targets, cfg)?;
            if jt <= j && trial.is_finite() {
                accepted = Some((trial, jt));
                break;
            }
            step *= 0.5;
        }
        let Some((next, jn)) = accepted else {
            break;
        };
        let delta = j - jn;
        f = next;
        j = jn;
        trace.push(j);
        observe(it, &f, j);
        step *= 2.0;
        if delta.abs() < cfg.tol {
            break;
        }
    }
    Ok(TriFNModel {
        config: cfg.clone(),
        news_ids: m.news_ids.clone(),
        idf: m.idf.clone(),
        factors: f,
        trace,
    })
}

/// Nonnegative least squares `min_{h ≥ 0} ‖x − V h‖²` by cyclic coordinate
/// descent on the normal equations.
pub fn fold_in(v: &Mat, x: &SparseVec) -> Result<Vec<f64>> {
    if x.dim != v.rows {
        return Err(Error::Shape(format!("row has {} terms, model has {}", x.dim, v.rows)));
    }
    let k = v.cols;
    let gram = v.gram();
    let mut rhs = vec![0.0; k];
    for &(j, val) in &x.entries {
        rhs.iter_mut().zip(v.row(j)).for_each(|(r, w)| *r += val * w);
    }
    let mut h = vec![0.0; k];
    for _ in 0..500 {
        let mut change: f64 = 0.0;
        for a in 0..k {
            let gaa = gram.get(a, a);
            if gaa <= 0.0 {
                continue;
            }
            let grad = dot(gram.row(a), &h) - rhs[a];
            let new = (h[a] - grad / gaa).max(0.0);
            change = change.max((new - h[a]).abs());
            h[a] = new;
        }
        if change < 1e-12 {
            break;
        }
    }
    Ok(h)
}

impl TriFNModel {
    pub fn probability_of_row(&self, d_row: &[f64]) -> f64 {
        sigmoid(dot(d_row, &self.factors.p) + self.factors.b)
    }

    /// Fake probability of every training news item.
    pub fn training_probabilities(&self) -> BTreeMap<String, f64> {
        self.news_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), self.probability_of_row(self.factors.d.row(i))))
            .collect()
    }

    pub fn row_for_text(&self, text: &str) -> SparseVec {
        tfidf_row(text, &self.idf)
    }
}

/// Fake probability per target. Known news ids use their fitted latent row;
/// unknown ones are folded in from their TF-IDF row.
pub fn predict_trifn(model: &TriFNModel, targets: &[(String, SparseVec)]) -> Result<BTreeMap<String, f64>> {
    let pos: HashMap<&str, usize> = model.news_ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    let rows = Exec::current().map(targets, |(id, x)| -> Result<(String, f64)> {
        let p = match pos.get(id.as_str()) {
            Some(&i) => model.probability_of_row(model.factors.d.row(i)),
            None => model.probability_of_row(&fold_in(&model.factors.v, x)?),
        };
        Ok((id.clone(), p))
    });
    rows.into_iter().collect()
}

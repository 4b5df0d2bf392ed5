//! Binary classification metrics, fake as the positive class.

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::stats;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl Confusion {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Label, Label)>) -> Self {
        let mut c = Confusion::default();
        for (pred, truth) in pairs {
            match (pred.is_fake(), truth.is_fake()) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, false) => c.tn += 1,
                (false, true) => c.fn_ += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.tp + self.tn, self.total())
    }

    /// F1 of the fake class.
    pub fn f1_fake(&self) -> f64 {
        f1(self.tp, self.fp, self.fn_)
    }

    pub fn f1_real(&self) -> f64 {
        f1(self.tn, self.fn_, self.fp)
    }

    /// Unweighted mean of the per-class F1 scores.
    pub fn macro_f1(&self) -> f64 {
        (self.f1_fake() + self.f1_real()) / 2.0
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

fn f1(tp: usize, fp: usize, fn_: usize) -> f64 {
    ratio(2 * tp, 2 * tp + fp + fn_)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n: usize,
    pub accuracy: f64,
    pub f1: f64,
    pub macro_f1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub auc: Option<f64>,
}

/// Score probability predictions against labels at a 0.5 threshold.
pub fn evaluate(probs_and_truth: &[(f64, Label)]) -> EvalReport {
    let c = Confusion::from_pairs(probs_and_truth.iter().map(|&(p, t)| (threshold(p), t)));
    let scores: Vec<f64> = probs_and_truth.iter().map(|&(p, _)| p).collect();
    let pos: Vec<bool> = probs_and_truth.iter().map(|&(_, t)| t.is_fake()).collect();
    EvalReport {
        n: c.total(),
        accuracy: c.accuracy(),
        f1: c.f1_fake(),
        macro_f1: c.macro_f1(),
        auc: stats::auc(&scores, &pos),
    }
}

pub fn threshold(p_fake: f64) -> Label {
    if p_fake >= 0.5 {
        Label::Fake
    } else {
        Label::Real
    }
}

//! Dense row-major matrix used for latent factors and weight blocks.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

/// Rows per partial sum in [`Mat::gram`]; fixed so reductions do not depend
/// on the thread count.
const GRAM_CHUNK: usize = 64;

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(Mat {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn uniform(rows: usize, cols: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> Self {
        let data = (0..rows * cols).map(|_| rng.random_range(lo..hi)).collect();
        Mat { rows, cols, data }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let c = self.cols;
        &mut self.data[i * c..(i + 1) * c]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    /// `selfᵀ self`, a `cols × cols` matrix.
    pub fn gram(&self) -> Mat {
        let k = self.cols;
        let chunks = self.rows.div_ceil(GRAM_CHUNK);
        let partials = Exec::current().map_range(chunks, |c| {
            let mut g = vec![0.0; k * k];
            for i in c * GRAM_CHUNK..((c + 1) * GRAM_CHUNK).min(self.rows) {
                let r = self.row(i);
                for a in 0..k {
                    for b in 0..k {
                        g[a * k + b] += r[a] * r[b];
                    }
                }
            }
            g
        });
        let mut out = Mat::zeros(k, k);
        for p in partials {
            out.data.iter_mut().zip(p).for_each(|(o, v)| *o += v);
        }
        out
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|&x| x >= 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `row · m` for a `k`-vector and a `k × k` matrix.
pub fn vec_mat(row: &[f64], m: &Mat) -> Vec<f64> {
    let mut out = vec![0.0; m.cols];
    for (a, &r) in row.iter().enumerate() {
        if r != 0.0 {
            out.iter_mut().zip(m.row(a)).for_each(|(o, &v)| *o += r * v);
        }
    }
    out
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
#[inline]
pub fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Binary cross-entropy of logit `z` against target `y ∈ {0, 1}`.
#[inline]
pub fn log_loss_logit(z: f64, y: f64) -> f64 {
    softplus(z) - y * z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_matches_naive() {
        let rows: Vec<Vec<f64>> = (0..150).map(|i| vec![i as f64 * 0.1, 1.0, -(i as f64)]).collect();
        let m = Mat::from_rows(&rows).unwrap();
        let g = m.gram();
        for a in 0..3 {
            for b in 0..3 {
                let naive: f64 = rows.iter().map(|r| r[a] * r[b]).sum();
                assert!((g.get(a, b) - naive).abs() < 1e-9 * naive.abs().max(1.0));
            }
        }
    }

    #[test]
    fn stable_logistic_pieces() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(-800.0) >= 0.0 && sigmoid(800.0) <= 1.0);
        assert!((softplus(0.0) - 2f64.ln()).abs() < 1e-15);
        assert!((softplus(800.0) - 800.0).abs() < 1e-12);
        let z: f64 = 0.3;
        let p = sigmoid(z);
        assert!((log_loss_logit(z, 1.0) + p.ln()).abs() < 1e-12);
        assert!((log_loss_logit(z, 0.0) + (1.0 - p).ln()).abs() < 1e-12);
    }
}

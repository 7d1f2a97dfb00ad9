use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::weighted::{WeightedDataset, WeightedLearner};
use crate::linalg::dot;
use crate::robust::{Label, LinearModel};

/// Settings of the approximate weighted ERM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErmConfig {
    /// Full-batch subgradient iterations.
    pub epochs: usize,
    /// Base step; iteration `t` uses `eta0 / √t`.
    pub eta0: f64,
    pub lambda_reg: f64,
    pub fit_bias: bool,
}

impl Default for ErmConfig {
    fn default() -> Self {
        ErmConfig {
            epochs: 200,
            eta0: 0.5,
            lambda_reg: 1e-3,
            fit_bias: true,
        }
    }
}

impl ErmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidParameter("epochs must be at least 1".into()));
        }
        if !(self.eta0 > 0.0) || !(self.lambda_reg >= 0.0) {
            return Err(Error::InvalidParameter("eta0 must be > 0 and lambda_reg >= 0".into()));
        }
        Ok(())
    }
}

/// Approximate weighted ERM for halfspaces.
///
/// Minimizes `Σ p_i max(0, 1 − y_i(⟨w,x_i⟩+b)) + (λ/2)‖w‖²` by full-batch
/// subgradient descent started from the weighted class-mean direction, and
/// returns the iterate with the smallest weighted 0-1 error (each candidate
/// direction gets its bias refit by an exact 1-D threshold search).
pub fn erm_linear(data: &WeightedDataset, cfg: &ErmConfig) -> Result<LinearModel> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::AllZeroWeights);
    }
    let total = data.require_mass()?;
    let d = data.dim();
    let p: Vec<f64> = data.weights().iter().map(|w| w / total).collect();
    let samples = data.samples();

    let mut w = vec![0.0; d];
    for (s, pi) in samples.iter().zip(&p) {
        for (wj, xj) in w.iter_mut().zip(&s.x) {
            *wj += pi * s.y.value() * xj;
        }
    }
    if w.iter().all(|v| *v == 0.0) {
        w[0] = 1.0;
    }
    // put typical scores on the hinge's unit scale
    let typical: f64 = samples
        .iter()
        .zip(&p)
        .map(|(s, pi)| pi * dot(&w, &s.x).abs())
        .sum();
    if typical > 0.0 {
        w.iter_mut().for_each(|v| *v /= typical);
    }
    let mut b = if cfg.fit_bias { best_bias(&w, data, &p).0 } else { 0.0 };

    let mut best = pocket_candidate(&w, b, data, &p, cfg.fit_bias);
    let mut gw = vec![0.0; d];
    for t in 1..=cfg.epochs {
        gw.iter_mut().zip(&w).for_each(|(g, wj)| *g = cfg.lambda_reg * wj);
        let mut gb = 0.0;
        for (s, pi) in samples.iter().zip(&p) {
            if *pi == 0.0 {
                continue;
            }
            let y = s.y.value();
            if y * (dot(&w, &s.x) + b) < 1.0 {
                for (g, xj) in gw.iter_mut().zip(&s.x) {
                    *g -= pi * y * xj;
                }
                gb -= pi * y;
            }
        }
        let step = cfg.eta0 / (t as f64).sqrt();
        w.iter_mut().zip(&gw).for_each(|(wj, g)| *wj -= step * g);
        if cfg.fit_bias {
            b -= step * gb;
        }
        if w.iter().all(|v| *v == 0.0) {
            continue;
        }
        let cand = pocket_candidate(&w, b, data, &p, cfg.fit_bias);
        if cand.1 < best.1 {
            best = cand;
        }
    }
    Ok(best.0)
}

fn weighted_err(model: &LinearModel, data: &WeightedDataset, p: &[f64]) -> f64 {
    data.samples()
        .iter()
        .zip(p)
        .filter(|(s, _)| Label::from_score(model.score(&s.x)) != s.y)
        .map(|(_, pi)| pi)
        .sum()
}

fn pocket_candidate(
    w: &[f64],
    b: f64,
    data: &WeightedDataset,
    p: &[f64],
    fit_bias: bool,
) -> (LinearModel, f64) {
    let raw = LinearModel::new(w.to_vec(), b);
    let raw_err = weighted_err(&raw, data, p);
    if !fit_bias {
        return (raw, raw_err);
    }
    let (b2, err2) = best_bias(w, data, p);
    if err2 < raw_err {
        (LinearModel::new(w.to_vec(), b2), err2)
    } else {
        (raw, raw_err)
    }
}

/// Exact minimizer over `b` of the weighted 0-1 error of `sign(⟨w,x⟩ + b)`.
fn best_bias(w: &[f64], data: &WeightedDataset, p: &[f64]) -> (f64, f64) {
    let mut pts: Vec<(f64, Label, f64)> = data
        .samples()
        .iter()
        .zip(p)
        .map(|(s, pi)| (dot(w, &s.x), s.y, *pi))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    // threshold below every score: everything predicted +1
    let mut err: f64 = pts.iter().filter(|t| t.1 == Label::Neg).map(|t| t.2).sum();
    let mut best = (err, f64::NEG_INFINITY);
    let mut i = 0;
    while i < pts.len() {
        let s = pts[i].0;
        while i < pts.len() && pts[i].0 == s {
            // move this score to the −1 side
            match pts[i].1 {
                Label::Neg => err -= pts[i].2,
                Label::Pos => err += pts[i].2,
            }
            i += 1;
        }
        if err < best.0 - 1e-15 {
            let next = if i < pts.len() { pts[i].0 } else { s + 1.0 };
            best = (err, (s + next) / 2.0);
        }
    }
    let bias = if best.1 == f64::NEG_INFINITY {
        -pts.first().map(|t| t.0).unwrap_or(0.0) + 1.0
    } else {
        -best.1
    };
    (bias, best.0.max(0.0))
}

/// [`erm_linear`] packaged as a learner.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearErm {
    pub cfg: ErmConfig,
}

impl WeightedLearner for LinearErm {
    fn fit(&self, data: &WeightedDataset) -> Result<LinearModel> {
        erm_linear(data, &self.cfg)
    }
}

/// Exact ERM over a finite pool: weighted 0-1 argmin, lowest index on ties.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolErm {
    pub pool: Vec<LinearModel>,
}

impl PoolErm {
    pub fn new(pool: Vec<LinearModel>) -> Result<Self> {
        if pool.is_empty() {
            return Err(Error::EmptyPool);
        }
        Ok(PoolErm { pool })
    }

    pub fn best_index(&self, data: &WeightedDataset) -> Result<usize> {
        let total = data.require_mass()?;
        let mut best = (0, f64::INFINITY);
        for (i, h) in self.pool.iter().enumerate() {
            let err: f64 = data
                .iter()
                .filter(|(s, _)| Label::from_score(h.score(&s.x)) != s.y)
                .map(|(_, w)| w)
                .sum::<f64>()
                / total;
            if err < best.1 {
                best = (i, err);
            }
        }
        Ok(best.0)
    }
}

impl WeightedLearner for PoolErm {
    fn fit(&self, data: &WeightedDataset) -> Result<LinearModel> {
        Ok(self.pool[self.best_index(data)?].clone())
    }
}

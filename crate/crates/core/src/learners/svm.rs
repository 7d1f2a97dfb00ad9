use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, dual_exponent, lp_norm, project_lq_ball};
use crate::robust::{Dataset, LinearModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmConfig {
    pub iters: usize,
    pub eta0: f64,
    /// Ridge term, used only when γ = 0 leaves `w` unconstrained.
    pub lambda_reg: f64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            iters: 2000,
            eta0: 1.0,
            lambda_reg: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmFit {
    pub model: LinearModel,
    /// Fraction of training points with `y·margin > 2γ`.
    pub beta_hat: f64,
}

/// Margin SVM used as a barely-robust learner.
///
/// Minimizes the mean hinge `max(0, 1 − y(⟨w,x⟩+b))` over `‖w‖_q ≤ 1/(2γ)`
/// (`q` dual to `p`), so that zero hinge on a point means `y·margin ≥ 2γ`.
/// Projected subgradient descent; the best iterate by objective is kept.
pub fn svm_margin(data: &Dataset, gamma: f64, p: f64, cfg: &SvmConfig) -> Result<SvmFit> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !(gamma >= 0.0) || cfg.iters == 0 || !(cfg.eta0 > 0.0) {
        return Err(Error::InvalidParameter("svm needs gamma >= 0, iters >= 1, eta0 > 0".into()));
    }
    let q = dual_exponent(p)?;
    if !(q == 1.0 || q == 2.0 || q.is_infinite()) {
        return Err(Error::InvalidNorm(p));
    }
    let n = data.len() as f64;
    let d = data.dim();
    let radius = if gamma > 0.0 { 1.0 / (2.0 * gamma) } else { f64::INFINITY };
    let xmax = data
        .iter()
        .map(|s| lp_norm(&s.x, p))
        .fold(0.0_f64, f64::max)
        .max(1e-12);
    // step scales: w moves within its ball, b within the range of scores
    let w_scale = if radius.is_finite() { radius } else { 1.0 / xmax };
    let b_scale = (w_scale * xmax).max(1.0);

    let objective = |w: &[f64], b: f64| -> f64 {
        let hinge: f64 = data
            .iter()
            .map(|s| (1.0 - s.y.value() * (dot(w, &s.x) + b)).max(0.0))
            .sum::<f64>()
            / n;
        if radius.is_finite() {
            hinge
        } else {
            hinge + 0.5 * cfg.lambda_reg * dot(w, w)
        }
    };

    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut best = (objective(&w, b), w.clone(), b);
    let mut gw = vec![0.0; d];
    for t in 1..=cfg.iters {
        gw.iter_mut().for_each(|g| *g = 0.0);
        if !radius.is_finite() {
            gw.iter_mut().zip(&w).for_each(|(g, wj)| *g = cfg.lambda_reg * wj);
        }
        let mut gb = 0.0;
        for s in data.iter() {
            let y = s.y.value();
            if y * (dot(&w, &s.x) + b) < 1.0 {
                for (g, xj) in gw.iter_mut().zip(&s.x) {
                    *g -= y * xj / n;
                }
                gb -= y / n;
            }
        }
        let step = cfg.eta0 / (t as f64).sqrt();
        // normalized step; the larger of the two gradient blocks sets the scale
        let gscale = dot(&gw, &gw).sqrt().max(gb.abs());
        if gscale == 0.0 {
            break;
        }
        w.iter_mut()
            .zip(&gw)
            .for_each(|(wj, g)| *wj -= step * w_scale * g / gscale);
        b -= step * b_scale * gb / gscale;
        if radius.is_finite() {
            w = project_lq_ball(&w, q, radius)?;
        }
        let obj = objective(&w, b);
        if obj < best.0 {
            best = (obj, w.clone(), b);
        }
    }
    let model = LinearModel::new(best.1, best.2);
    let beta_hat = beta_hat(&model, data, p, gamma);
    Ok(SvmFit { model, beta_hat })
}

/// Fraction of `data` with `y·margin > 2γ`; zero for a constant model.
pub fn beta_hat(model: &LinearModel, data: &Dataset, p: f64, gamma: f64) -> f64 {
    if data.is_empty() {
        return 0.0;
    }
    let hits = data
        .iter()
        .filter(|s| {
            model
                .margin(&s.x, p)
                .map(|m| s.y.value() * m > 2.0 * gamma)
                .unwrap_or(false)
        })
        .count();
    hits as f64 / data.len() as f64
}

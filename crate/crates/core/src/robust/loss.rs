use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::robust::model::{check_dim, Classifier, LinearModel};
use crate::robust::perturbation::PerturbationSpec;
use crate::robust::sample::{Dataset, Label, Sample};

/// `(⟨w,x⟩ + bias) / ‖w‖_q` where `q` is dual to `p`.
pub fn margin(model: &LinearModel, x: &[f64], p: f64) -> Result<f64> {
    model.margin(x, p)
}

/// Robust 0/1 loss of any classifier on one example.
///
/// Finite perturbation sets are enumerated; balls defer to the predictor's
/// closed form (for a halfspace: loss iff `y·margin ≤ γ`, closed ball).
pub fn robust_loss_of<C: Classifier + ?Sized>(
    clf: &C,
    sample: &Sample,
    index: usize,
    spec: &PerturbationSpec,
) -> Result<bool> {
    match spec {
        PerturbationSpec::LpBall { p, gamma } => clf.ball_loss(&sample.x, sample.y, *p, *gamma),
        _ => Ok(spec
            .points(index, &sample.x)?
            .iter()
            .any(|z| clf.predict(z) != sample.y)),
    }
}

/// Robust loss of a halfspace, as 0 or 1.
pub fn robust_loss(
    model: &LinearModel,
    sample: &Sample,
    index: usize,
    spec: &PerturbationSpec,
) -> Result<u8> {
    check_dim(model.dim(), sample.x.len())?;
    Ok(robust_loss_of(model, sample, index, spec)? as u8)
}

/// Empirical robust risk: mean robust loss over `data` (sample `i` uses index `i`).
pub fn robust_risk<C: Classifier + Sync + ?Sized>(
    clf: &C,
    data: &Dataset,
    spec: &PerturbationSpec,
) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let losses: Vec<bool> = data
        .samples()
        .par_iter()
        .enumerate()
        .map(|(i, s)| robust_loss_of(clf, s, i, spec))
        .collect::<Result<_>>()?;
    Ok(losses.iter().filter(|l| **l).count() as f64 / data.len() as f64)
}

/// Plain 0-1 error.
pub fn zero_one_error<C: Classifier + Sync + ?Sized>(clf: &C, data: &Dataset) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let wrong = data
        .samples()
        .par_iter()
        .filter(|s| clf.predict(&s.x) != s.y)
        .count();
    Ok(wrong as f64 / data.len() as f64)
}

/// Worst-case point of the ball for a halfspace: `x − γ·y·v`, with `v` the
/// dual-norm maximizer of `w`. Shifts the score by exactly `−y·γ‖w‖_q`.
pub fn worst_case_point(
    model: &LinearModel,
    x: &[f64],
    y: Label,
    p: f64,
    gamma: f64,
) -> Result<Vec<f64>> {
    check_dim(model.dim(), x.len())?;
    let v = crate::linalg::dual_maximizer(&model.w, p)?;
    Ok(crate::linalg::axpy(x, -gamma * y.value(), &v))
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::{WeightedDataset, WeightedLearner};
use crate::redaction::selection::{Discriminators, SelectionSet};
use crate::robust::{check_dim, Classifier, Dataset, Label, LinearModel, Sample};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RedactConfig {
    pub eps: f64,
    /// Train-side weight Λ; default `n + 1`, or `Λ*` when `eta` is set.
    pub lambda: Option<f64>,
    /// Agnostic noise level used to pick `Λ*`.
    pub eta: Option<f64>,
    /// Confidence inside `ε*`.
    pub delta: f64,
    /// Capacity proxy inside `ε*`; default is the feature dimension.
    pub d_proxy: Option<usize>,
}

impl RedactConfig {
    pub fn new(eps: f64) -> Self {
        RedactConfig {
            eps,
            lambda: None,
            eta: None,
            delta: 0.1,
            d_proxy: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::InvalidParameter("eps must lie in (0, 1]".into()));
        }
        if let Some(l) = self.lambda {
            if !(l >= 1.0) || !l.is_finite() {
                return Err(Error::InvalidParameter("lambda must be finite and >= 1".into()));
            }
        }
        if let Some(e) = self.eta {
            if !(0.0..1.0).contains(&e) {
                return Err(Error::InvalidParameter("eta must lie in [0, 1)".into()));
            }
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter("delta must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// Λ for `n` training points in dimension `dim`, never below 1.
    pub fn resolve_lambda(&self, n: usize, dim: usize) -> f64 {
        match (self.lambda, self.eta) {
            (Some(l), _) => l,
            (None, Some(eta)) => {
                let d = self.d_proxy.unwrap_or(dim);
                lambda_star(eta, n.max(1), d, self.delta).1.max(1.0)
            }
            (None, None) => n as f64 + 1.0,
        }
    }

    pub fn max_rounds(&self) -> usize {
        (1.0 / self.eps).floor() as usize
    }
}

/// `(ε*, Λ*)` with `ε* = 4√((d ln 2n + ln(48/δ))/n)` and `Λ* = 1/√(8η + ε*²)`.
pub fn lambda_star(eta: f64, n: usize, d_proxy: usize, delta: f64) -> (f64, f64) {
    let n = n as f64;
    let eps = 4.0 * ((d_proxy as f64 * (2.0 * n).ln() + (48.0 / delta).ln()) / n).sqrt();
    (eps, (1.0 / (8.0 * eta + eps * eps)).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectronOutput {
    pub h: LinearModel,
    pub selection: SelectionSet,
    pub lambda: f64,
    /// `s_t(c_t)` of every round, including the final one that stopped the loop.
    pub scores: Vec<f64>,
    /// Test points each accepted round removed from the selection.
    pub removed: Vec<usize>,
}

impl RejectronOutput {
    pub fn rounds(&self) -> usize {
        self.selection.len()
    }
}

/// Selective classification against an arbitrary test set.
///
/// `h` is the ERM on `train`. Each round the ERM sees the training points
/// labeled by `h` (total weight Λ) and the still-selected test points labeled
/// against `h` (weight `1/n_test` each); its output `c_t` is kept when
/// `s_t = dis_test(h, c_t) − Λ·dis_train(h, c_t)` exceeds ε.
pub fn rejectron<E: WeightedLearner + ?Sized>(
    train: &Dataset,
    test: &[Vec<f64>],
    cfg: &RedactConfig,
    erm: &E,
) -> Result<RejectronOutput> {
    cfg.validate()?;
    let h = erm.fit(&WeightedDataset::uniform(train))?;
    rejectron_with(h, train, test, cfg, erm)
}

fn rejectron_with<E: WeightedLearner + ?Sized>(
    h: LinearModel,
    train: &Dataset,
    test: &[Vec<f64>],
    cfg: &RedactConfig,
    erm: &E,
) -> Result<RejectronOutput> {
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    for x in test {
        check_dim(train.dim(), x.len())?;
    }
    let n = train.len() as f64;
    let n_test = test.len().max(1) as f64;
    let lambda = cfg.resolve_lambda(train.len(), train.dim());
    let h_train: Vec<Label> = train.iter().map(|s| h.predict(&s.x)).collect();
    let h_test: Vec<Label> = test.iter().map(|x| h.predict(x)).collect();
    let mut selected = vec![true; test.len()];
    let mut cs = Vec::new();
    let mut scores = Vec::new();
    let mut removed = Vec::new();
    // s_t > ε removes more than ε·n_test points, so at most ⌊1/ε⌋ rounds succeed
    for _ in 0..=cfg.max_rounds() {
        let mut samples = Vec::with_capacity(train.len() + test.len());
        let mut weights = Vec::with_capacity(samples.capacity());
        for (s, y) in train.iter().zip(&h_train) {
            samples.push(Sample::new(s.x.clone(), *y));
            weights.push(lambda / n);
        }
        for ((x, y), sel) in test.iter().zip(&h_test).zip(&selected) {
            if *sel {
                samples.push(Sample::new(x.clone(), y.flip()));
                weights.push(1.0 / n_test);
            }
        }
        let c = erm.fit(&WeightedDataset::new(samples, weights, train.dim())?)?;
        let dis_train = train
            .iter()
            .zip(&h_train)
            .filter(|(s, y)| c.predict(&s.x) != **y)
            .count();
        let gone: Vec<usize> = (0..test.len())
            .filter(|i| selected[*i] && c.predict(&test[*i]) != h_test[*i])
            .collect();
        let s = gone.len() as f64 / n_test - lambda * dis_train as f64 / n;
        scores.push(s);
        if s <= cfg.eps {
            break;
        }
        debug_assert!(gone.len() as f64 > cfg.eps * n_test);
        for i in &gone {
            selected[*i] = false;
        }
        removed.push(gone.len());
        cs.push(c);
    }
    Ok(RejectronOutput {
        selection: SelectionSet {
            base: Some(h.clone()),
            discriminators: Discriminators::Rejectron(cs),
            eps: cfg.eps,
        },
        h,
        lambda,
        scores,
        removed,
    })
}

/// Denoise Massart labels before redacting: `ĥ = erm(extra_noisy)` relabels
/// `heldout`, then [`rejectron`] runs on the relabeled set.
pub fn massart_denoise_rejectron<E: WeightedLearner + ?Sized>(
    extra_noisy: &Dataset,
    heldout: &Dataset,
    test: &[Vec<f64>],
    cfg: &RedactConfig,
    erm: &E,
) -> Result<(LinearModel, RejectronOutput)> {
    cfg.validate()?;
    let denoiser = erm.fit(&WeightedDataset::uniform(extra_noisy))?;
    let relabeled = Dataset::with_dim(
        heldout
            .iter()
            .map(|s| Sample::new(s.x.clone(), denoiser.predict(&s.x)))
            .collect(),
        heldout.dim(),
    )?;
    let out = rejectron(&relabeled, test, cfg, erm)?;
    Ok((denoiser, out))
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::{WeightedDataset, WeightedLearner};
use crate::robust::{inflate, Classifier, Dataset, LinearModel, MajorityVote, PerturbationSpec, DEFAULT_INFLATION_CAP};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FmsConfig {
    /// Multiplicative step; default `√(ln|U| / T)`.
    pub eta: Option<f64>,
    /// Rounds; default `⌈32 ln|U| / ε²⌉`.
    pub rounds: Option<usize>,
    pub eps: f64,
    pub inflation_cap: usize,
}

impl Default for FmsConfig {
    fn default() -> Self {
        FmsConfig {
            eta: None,
            rounds: None,
            eps: 0.1,
            inflation_cap: DEFAULT_INFLATION_CAP,
        }
    }
}

impl FmsConfig {
    /// `(T, η)` for perturbation sets of size at most `k`.
    pub fn resolve(&self, k: usize) -> Result<(usize, f64)> {
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::InvalidParameter("eps must lie in (0, 1]".into()));
        }
        let ln_k = (k.max(1) as f64).ln();
        let t = match self.rounds {
            Some(0) => return Err(Error::InvalidParameter("rounds must be >= 1".into())),
            Some(t) => t,
            None => ((32.0 * ln_k / (self.eps * self.eps)).ceil() as usize).max(1),
        };
        let eta = self.eta.unwrap_or_else(|| (ln_k / t as f64).sqrt());
        if !(eta >= 0.0) || !eta.is_finite() {
            return Err(Error::InvalidParameter("eta must be finite and >= 0".into()));
        }
        Ok((t, eta))
    }
}

/// Weight of one perturbation after one round.
pub fn fms_update(weight: f64, eta: f64, wrong: bool) -> f64 {
    if wrong {
        weight * (1.0 + eta)
    } else {
        weight
    }
}

/// Per-example weights over each example's perturbation list, kept as logs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerExampleWeights {
    pub log_weights: Vec<Vec<f64>>,
}

impl PerExampleWeights {
    pub fn uniform(sizes: &[usize]) -> Self {
        PerExampleWeights {
            log_weights: sizes.iter().map(|k| vec![0.0; *k]).collect(),
        }
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.log_weights[i][j].exp()
    }

    /// `P(z, (x_i, y_i))`: the weights of example `i` normalized to sum 1.
    pub fn normalized(&self, i: usize) -> Vec<f64> {
        let lw = &self.log_weights[i];
        let top = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = lw.iter().map(|v| (v - top).exp()).collect();
        let z: f64 = e.iter().sum();
        e.into_iter().map(|v| v / z).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FmsOutput {
    pub models: Vec<LinearModel>,
    pub weights: PerExampleWeights,
    pub rounds: usize,
    pub eta: f64,
}

impl FmsOutput {
    pub fn majority(&self) -> MajorityVote<LinearModel> {
        MajorityVote::new(self.models.clone())
    }
}

/// Agnostic robust learning by multiplicative weights over perturbations.
///
/// Each round hands the ERM the inflated data weighted by `P^t(z)/m`, then
/// grows the weight of every perturbation the new model gets wrong by `1 + η`.
pub fn fms_agnostic<E: WeightedLearner + ?Sized>(
    data: &Dataset,
    spec: &PerturbationSpec,
    erm: &E,
    cfg: &FmsConfig,
) -> Result<FmsOutput> {
    if !spec.is_finite() {
        return Err(Error::Unsupported("fms needs a finite perturbation set".into()));
    }
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let inflated = inflate(data, spec, cfg.inflation_cap)?;
    let mut sizes = vec![0usize; data.len()];
    for t in &inflated.items {
        sizes[t.origin] += 1;
    }
    let (rounds, eta) = cfg.resolve(sizes.iter().copied().max().unwrap_or(1))?;
    let samples = inflated.to_dataset().into_samples();
    let m = data.len() as f64;
    let step = (1.0 + eta).ln();
    let mut weights = PerExampleWeights::uniform(&sizes);
    let mut models = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let mut w = Vec::with_capacity(samples.len());
        for (i, _) in sizes.iter().enumerate() {
            w.extend(weights.normalized(i).into_iter().map(|p| p / m));
        }
        let h = erm.fit(&WeightedDataset::new(samples.clone(), w, data.dim())?)?;
        let mut k = 0;
        for (i, lw) in weights.log_weights.iter_mut().enumerate() {
            for v in lw.iter_mut() {
                let s = &samples[k];
                debug_assert_eq!(inflated.items[k].origin, i);
                if h.predict(&s.x) != s.y {
                    *v += step;
                }
                k += 1;
            }
        }
        models.push(h);
    }
    Ok(FmsOutput {
        models,
        weights,
        rounds,
        eta,
    })
}

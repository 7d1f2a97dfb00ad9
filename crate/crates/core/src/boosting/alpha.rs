use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::{WeightedDataset, WeightedLearner};
use crate::rng::SeedStream;
use crate::robust::{robust_loss_of, Classifier, Dataset, LinearModel, MajorityVote, PerturbationSpec, Sample};

/// Which loss boosting drives to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LossKind {
    ZeroOne,
    Robust { spec: PerturbationSpec },
}

impl LossKind {
    /// Loss of a single halfspace on example `index`.
    pub fn member_loss(&self, h: &LinearModel, s: &Sample, index: usize) -> Result<bool> {
        match self {
            LossKind::ZeroOne => Ok(h.predict(&s.x) != s.y),
            LossKind::Robust { spec } => robust_loss_of(h, s, index, spec),
        }
    }

    /// Loss of any classifier; balls need a closed form from the classifier.
    pub fn loss<C: Classifier + ?Sized>(&self, c: &C, s: &Sample, index: usize) -> Result<bool> {
        match self {
            LossKind::ZeroOne => Ok(c.predict(&s.x) != s.y),
            LossKind::Robust { spec } => robust_loss_of(c, s, index, spec),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaMode {
    /// `α = 1/8`, `T = ⌈1 + 48 ln m⌉`.
    Standard,
    /// `T = ⌈112 ln m⌉`, `α = ½ ln(1 + √(2 ln m / T))`; guarantees every
    /// example a vote agreement of at least 5/9.
    Agreement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaBoostConfig {
    pub alpha: f64,
    pub rounds: usize,
    /// Confidence for the retry budget `⌈ln(2T/δ)⌉`.
    pub delta: f64,
}

impl AlphaBoostConfig {
    pub fn for_size(m: usize, mode: AlphaMode) -> Self {
        let ln_m = (m.max(2) as f64).ln();
        match mode {
            AlphaMode::Standard => AlphaBoostConfig {
                alpha: 0.125,
                rounds: (1.0 + 48.0 * ln_m).ceil() as usize,
                delta: 1.0 / 3.0,
            },
            AlphaMode::Agreement => {
                let t = (112.0 * ln_m).ceil();
                AlphaBoostConfig {
                    alpha: 0.5 * (1.0 + (2.0 * ln_m / t).sqrt()).ln(),
                    rounds: t as usize,
                    delta: 1.0 / 3.0,
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || self.rounds == 0 || !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(
                "alpha-boost needs alpha > 0, rounds >= 1, delta in (0, 1)".into(),
            ));
        }
        Ok(())
    }

    pub fn retry_budget(&self) -> usize {
        (2.0 * self.rounds as f64 / self.delta).ln().ceil().max(1.0) as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaBoostOutput {
    pub models: Vec<LinearModel>,
    /// Weak-learner calls used in each round.
    pub attempts: Vec<usize>,
    /// Final distribution over examples.
    pub weights: Vec<f64>,
}

impl AlphaBoostOutput {
    pub fn majority(&self) -> MajorityVote<LinearModel> {
        MajorityVote::new(self.models.clone())
    }
}

/// Boost a weak learner whose weighted loss is at most 1/3.
///
/// Each round the weight of every example the new hypothesis gets right
/// (robustly, for the robust loss) is multiplied by `e^{−2α}`. A round that
/// fails the 1/3 contract is retried up to `⌈ln(2T/δ)⌉` times.
pub fn alpha_boost<L: WeightedLearner + ?Sized>(
    data: &Dataset,
    weak: &L,
    cfg: &AlphaBoostConfig,
    loss: &LossKind,
) -> Result<AlphaBoostOutput> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let (models, attempts, weights) = alpha_boost_by(
        data.len(),
        cfg,
        |dist, _, _| weak.fit(&WeightedDataset::from_dataset(data, dist.to_vec())?),
        |h, i| loss.member_loss(h, &data.samples()[i], i),
    )?;
    Ok(AlphaBoostOutput {
        models,
        attempts,
        weights,
    })
}

/// α-Boost over `m` abstract examples.
///
/// `fit(dist, round, attempt)` proposes a hypothesis for the current
/// distribution and `loss(h, i)` reports whether `h` errs on example `i`.
/// Returns the hypotheses, the attempts used per round and the final distribution.
pub(crate) fn alpha_boost_by<H, F, G>(
    m: usize,
    cfg: &AlphaBoostConfig,
    mut fit: F,
    loss: G,
) -> Result<(Vec<H>, Vec<usize>, Vec<f64>)>
where
    F: FnMut(&[f64], usize, usize) -> Result<H>,
    G: Fn(&H, usize) -> Result<bool>,
{
    cfg.validate()?;
    if m == 0 {
        return Err(Error::EmptyDataset);
    }
    let mut dist = vec![1.0 / m as f64; m];
    let budget = cfg.retry_budget();
    let shrink = (-2.0 * cfg.alpha).exp();
    let mut models = Vec::with_capacity(cfg.rounds);
    let mut attempts = Vec::with_capacity(cfg.rounds);
    for round in 1..=cfg.rounds {
        let mut accepted = None;
        for attempt in 1..=budget {
            let h = fit(&dist, round, attempt)?;
            let losses = (0..m).map(|i| loss(&h, i)).collect::<Result<Vec<bool>>>()?;
            let err: f64 = losses.iter().zip(&dist).filter(|(l, _)| **l).map(|(_, d)| d).sum();
            if err <= 1.0 / 3.0 + 1e-12 {
                accepted = Some((h, losses, attempt));
                break;
            }
        }
        let Some((h, losses, used)) = accepted else {
            return Err(Error::WeakLearnerFailed {
                round,
                attempts: budget,
            });
        };
        for (d, l) in dist.iter_mut().zip(&losses) {
            if !l {
                *d *= shrink;
            }
        }
        let z: f64 = dist.iter().sum();
        dist.iter_mut().for_each(|d| *d /= z);
        models.push(h);
        attempts.push(used);
    }
    Ok((models, attempts, dist))
}

/// For each example, the fraction of members with zero loss on it.
pub fn vote_agreement(models: &[LinearModel], data: &Dataset, loss: &LossKind) -> Result<Vec<f64>> {
    if models.is_empty() {
        return Err(Error::InvalidParameter("empty vote".into()));
    }
    data.iter()
        .enumerate()
        .map(|(i, s)| {
            let mut ok = 0usize;
            for h in models {
                if !loss.member_loss(h, s, i)? {
                    ok += 1;
                }
            }
            Ok(ok as f64 / models.len() as f64)
        })
        .collect()
}

/// Empirical loss of the unweighted vote over `data`.
pub fn majority_loss(models: &[LinearModel], data: &Dataset, loss: &LossKind) -> Result<f64> {
    let vote = MajorityVote::new(models.to_vec());
    let mut bad = 0usize;
    for (i, s) in data.iter().enumerate() {
        if loss.loss(&vote, s, i)? {
            bad += 1;
        }
    }
    Ok(bad as f64 / data.len().max(1) as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sparsified {
    pub indices: Vec<usize>,
    pub models: Vec<LinearModel>,
    pub attempts: usize,
}

pub const DEFAULT_SPARSIFY_ATTEMPTS: usize = 100;

/// Subsample `n` members (uniformly, with replacement) until the smaller vote
/// still has zero loss on `check`. Attempt `k` draws from its own substream.
pub fn sparsify_majority(
    models: &[LinearModel],
    check: &Dataset,
    n: usize,
    loss: &LossKind,
    seeds: &SeedStream,
    max_attempts: usize,
) -> Result<Sparsified> {
    let (indices, attempts) = sparsify_by(models.len(), n, seeds, max_attempts, |idx| {
        let sub: Vec<LinearModel> = idx.iter().map(|i| models[*i].clone()).collect();
        Ok(check.is_empty() || majority_loss(&sub, check, loss)? == 0.0)
    })?;
    Ok(Sparsified {
        models: indices.iter().map(|i| models[*i].clone()).collect(),
        indices,
        attempts,
    })
}

/// Draw `n` indices into `0..k` until `accept` holds; returns them and the attempt count.
pub(crate) fn sparsify_by<F>(
    k: usize,
    n: usize,
    seeds: &SeedStream,
    max_attempts: usize,
    mut accept: F,
) -> Result<(Vec<usize>, usize)>
where
    F: FnMut(&[usize]) -> Result<bool>,
{
    if k == 0 || n == 0 {
        return Err(Error::InvalidParameter("sparsification needs members and n >= 1".into()));
    }
    for attempt in 1..=max_attempts {
        let mut rng = seeds.rng_indexed("sparsify", attempt as u64);
        let indices: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        if accept(&indices)? {
            return Ok((indices, attempt));
        }
    }
    Err(Error::RetryLimit {
        attempts: max_attempts,
    })
}

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::boosting::alpha::{alpha_boost_by, sparsify_by};
use crate::boosting::{AlphaBoostConfig, AlphaMode, DEFAULT_SPARSIFY_ATTEMPTS};
use crate::error::{Error, Result};
use crate::learners::DatasetLearner;
use crate::rng::SeedStream;
use crate::robust::{
    inflate, Classifier, Dataset, InflatedDataset, LinearModel, MajorityVote, PerturbationSpec,
    Sample, DEFAULT_INFLATION_CAP,
};

/// Default size of a sparsified vote.
pub const DEFAULT_VOTE_SIZE: usize = 25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustifyConfig {
    /// Draws per learner call; default is the size of the data being boosted.
    pub m0: Option<usize>,
    /// Round schedule for both boosting levels.
    pub mode: AlphaMode,
    pub outer_rounds: Option<usize>,
    pub inner_rounds: Option<usize>,
    /// Members kept when sparsifying the inner vote.
    pub inner_vote: usize,
    /// Members kept when sparsifying the outer vote.
    pub outer_vote: usize,
    pub sparsify_attempts: usize,
    pub inflation_cap: usize,
}

impl Default for RobustifyConfig {
    fn default() -> Self {
        RobustifyConfig {
            m0: None,
            mode: AlphaMode::Agreement,
            outer_rounds: None,
            inner_rounds: None,
            inner_vote: DEFAULT_VOTE_SIZE,
            outer_vote: DEFAULT_VOTE_SIZE,
            sparsify_attempts: DEFAULT_SPARSIFY_ATTEMPTS,
            inflation_cap: DEFAULT_INFLATION_CAP,
        }
    }
}

impl RobustifyConfig {
    fn boost_config(&self, m: usize, rounds: Option<usize>) -> AlphaBoostConfig {
        let mut cfg = AlphaBoostConfig::for_size(m, self.mode);
        if let Some(t) = rounds {
            cfg.rounds = t;
        }
        cfg
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustifyOutput {
    pub vote: MajorityVote<MajorityVote<LinearModel>>,
    pub inflated_size: usize,
    pub outer_rounds: usize,
    pub learner_calls: usize,
}

/// Draw `m0` indices from `dist`.
fn draw(dist: &[f64], m0: usize, seeds: &SeedStream, round: usize, attempt: usize) -> Result<Vec<usize>> {
    let index = WeightedIndex::new(dist)
        .map_err(|e| Error::InvalidParameter(format!("boosting distribution: {e}")))?;
    let mut rng = seeds
        .child(&format!("round-{round}"))
        .rng_indexed("draw", attempt as u64);
    Ok((0..m0).map(|_| index.sample(&mut rng)).collect())
}

fn zero_vote_loss<C: Classifier>(vote: &C, inflated: &InflatedDataset) -> bool {
    inflated.items.iter().all(|t| vote.predict(&t.sample.x) == t.sample.y)
}

/// Re-key a per-example perturbation list after selecting `origins` from the data.
fn reindex(spec: &PerturbationSpec, origins: &[usize]) -> Result<PerturbationSpec> {
    match spec {
        PerturbationSpec::FinitePerExample { points } => {
            let mut out = BTreeMap::new();
            for (j, o) in origins.iter().enumerate() {
                let p = points.get(o).ok_or(Error::MissingPerturbations { index: *o })?;
                out.insert(j, p.clone());
            }
            Ok(PerturbationSpec::FinitePerExample { points: out })
        }
        other => Ok(other.clone()),
    }
}

/// Zero empirical robust loss on a robustly realizable `data` from a non-robust learner.
///
/// Boosts `base` on the inflated data with the 0-1 loss, then subsamples the
/// vote down to `inner_vote` members until it has zero robust loss on `data`.
pub fn zero_robust_loss<A: DatasetLearner + ?Sized>(
    data: &Dataset,
    spec: &PerturbationSpec,
    base: &A,
    cfg: &RobustifyConfig,
    seeds: &SeedStream,
) -> Result<MajorityVote<LinearModel>> {
    Ok(zero_robust_loss_counted(data, spec, base, cfg, seeds)?.0)
}

fn zero_robust_loss_counted<A: DatasetLearner + ?Sized>(
    data: &Dataset,
    spec: &PerturbationSpec,
    base: &A,
    cfg: &RobustifyConfig,
    seeds: &SeedStream,
) -> Result<(MajorityVote<LinearModel>, usize)> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let inflated = inflate(data, spec, cfg.inflation_cap)?;
    let items = inflated.to_dataset();
    let m0 = cfg.m0.unwrap_or(items.len()).max(1);
    let boost = cfg.boost_config(items.len(), cfg.inner_rounds);
    let mut calls = 0usize;
    let (models, _, _) = alpha_boost_by(
        items.len(),
        &boost,
        |dist, round, attempt| {
            calls += 1;
            let idx = draw(dist, m0, seeds, round, attempt)?;
            let sub = idx.iter().map(|i| items.samples()[*i].clone()).collect();
            base.fit_dataset(&Dataset::with_dim(sub, data.dim())?)
        },
        |h: &LinearModel, i| {
            let s = &items.samples()[i];
            Ok(h.predict(&s.x) != s.y)
        },
    )?;
    let (idx, _) = sparsify_by(
        models.len(),
        cfg.inner_vote,
        &seeds.child("sparsify"),
        cfg.sparsify_attempts,
        |idx| {
            let vote = MajorityVote::new(idx.iter().map(|i| models[*i].clone()).collect());
            Ok(zero_vote_loss(&vote, &inflated))
        },
    )?;
    let vote = MajorityVote::new(idx.iter().map(|i| models[*i].clone()).collect());
    Ok((vote, calls))
}

/// Robust learner for finite perturbation sets from a black-box non-robust learner.
///
/// Outer boosting runs over the inflated sample; each round draws `m0`
/// perturbations, maps them back to their origin examples (duplicates kept)
/// and calls [`zero_robust_loss`] on that subsample. The final vote is
/// sparsified until it has zero robust loss on `data`.
pub fn robustify_nonrobust<A: DatasetLearner + ?Sized>(
    data: &Dataset,
    spec: &PerturbationSpec,
    base: &A,
    cfg: &RobustifyConfig,
    seeds: &SeedStream,
) -> Result<RobustifyOutput> {
    if !spec.is_finite() {
        return Err(Error::Unsupported("robustify needs a finite perturbation set".into()));
    }
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let inflated = inflate(data, spec, cfg.inflation_cap)?;
    let m0 = cfg.m0.unwrap_or(data.len()).max(1);
    let boost = cfg.boost_config(inflated.len(), cfg.outer_rounds);
    let outer = seeds.child("outer");
    let mut calls = 0usize;
    let (fs, _, _) = alpha_boost_by(
        inflated.len(),
        &boost,
        |dist, round, attempt| {
            let idx = draw(dist, m0, &outer, round, attempt)?;
            let origins: Vec<usize> = idx.iter().map(|i| inflated.items[*i].origin).collect();
            let samples: Vec<Sample> = origins.iter().map(|o| data.samples()[*o].clone()).collect();
            let sub = Dataset::with_dim(samples, data.dim())?;
            let sub_spec = reindex(spec, &origins)?;
            let inner = seeds.child(&format!("inner-{round}-{attempt}"));
            let (f, c) = zero_robust_loss_counted(&sub, &sub_spec, base, cfg, &inner)?;
            calls += c;
            Ok(f)
        },
        |f: &MajorityVote<LinearModel>, i| {
            let s = &inflated.items[i].sample;
            Ok(f.predict(&s.x) != s.y)
        },
    )?;
    let (idx, _) = sparsify_by(
        fs.len(),
        cfg.outer_vote,
        &seeds.child("sparsify-outer"),
        cfg.sparsify_attempts,
        |idx| {
            let vote = MajorityVote::new(idx.iter().map(|i| fs[*i].clone()).collect());
            Ok(zero_vote_loss(&vote, &inflated))
        },
    )?;
    Ok(RobustifyOutput {
        vote: MajorityVote::new(idx.iter().map(|i| fs[*i].clone()).collect()),
        inflated_size: inflated.len(),
        outer_rounds: boost.rounds,
        learner_calls: calls,
    })
}

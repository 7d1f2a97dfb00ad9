use serde::{Deserialize, Serialize};

use crate::boosting::region::rejection_sample;
use crate::boosting::selective::{Cascade, SelectiveClassifier};
use crate::error::{Error, Result};
use crate::learners::DatasetLearner;
use crate::robust::{
    inverse_blowup, robust_loss_of, Classifier, Dataset, LinearModel, PerturbationSpec, Sample,
    SampleSource,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostConfig {
    pub beta: f64,
    pub eps: f64,
    pub delta: f64,
    /// Rounds `T`; default `⌈ln(2/ε)/β⌉`.
    pub rounds: Option<usize>,
    /// Sample size the barely-robust learner needs (`m_A`).
    pub learner_m: usize,
    /// Examples per round; default `max(m_A, ⌈4 ln(2T/δ)⌉)`.
    pub per_round_m: Option<usize>,
    /// Source draws allowed per accepted example; default `⌈4/ε⌉`.
    pub budget_per_draw: Option<usize>,
    /// Stage `t` abstains at radius `γ/2^{t−1}` instead of `γ`.
    pub multi_granularity: bool,
}

impl BoostConfig {
    pub fn new(beta: f64, eps: f64, delta: f64, learner_m: usize) -> Self {
        BoostConfig {
            beta,
            eps,
            delta,
            rounds: None,
            learner_m,
            per_round_m: None,
            budget_per_draw: None,
            multi_granularity: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::InvalidParameter("beta must lie in (0, 1]".into()));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) || !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter("eps and delta must lie in (0, 1)".into()));
        }
        if self.rounds == Some(0) || self.per_round_m == Some(0) || self.budget_per_draw == Some(0) {
            return Err(Error::InvalidParameter("rounds, per-round m and budget must be >= 1".into()));
        }
        Ok(())
    }

    pub fn resolved_rounds(&self) -> usize {
        self.rounds
            .unwrap_or_else(|| ((2.0 / self.eps).ln() / self.beta).ceil().max(1.0) as usize)
    }

    pub fn resolved_m(&self) -> usize {
        let t = self.resolved_rounds() as f64;
        self.per_round_m.unwrap_or_else(|| {
            let conf = (4.0 * (2.0 * t / self.delta).ln()).ceil() as usize;
            self.learner_m.max(conf).max(1)
        })
    }

    pub fn resolved_budget(&self) -> usize {
        self.budget_per_draw
            .unwrap_or_else(|| (4.0 / self.eps).ceil() as usize)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundDiagnostics {
    pub round: usize,
    /// Abstention radius of this round's stage (balls only).
    pub radius: Option<f64>,
    /// Fraction of the round's training set on which `h_t` is robust w.r.t. `U⁻¹(U)`.
    pub beta_hat: f64,
    pub samples: usize,
    pub draws: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostOutput {
    pub cascade: Cascade,
    pub rounds: Vec<RoundDiagnostics>,
    /// Rejection sampling ran out of budget before `T` rounds.
    pub stopped_early: bool,
}

/// Robust correctness of `h` on one example.
pub(crate) fn robustly_correct(h: &LinearModel, s: &Sample, spec: &PerturbationSpec) -> Result<bool> {
    Ok(!robust_loss_of(h, s, 0, spec)?)
}

/// Boost a barely-robust learner into a cascade of selective classifiers.
///
/// Round 1 trains on raw source draws; round `t` trains on draws from the
/// region where every earlier stage is non-robust, and the loop stops early
/// when that region becomes too light to sample.
pub fn beta_roboost<S, L>(
    source: &mut S,
    learner: &L,
    cfg: &BoostConfig,
    attack: &PerturbationSpec,
) -> Result<BoostOutput>
where
    S: SampleSource + ?Sized,
    L: DatasetLearner + ?Sized,
{
    cfg.validate()?;
    let rounds = cfg.resolved_rounds();
    let m = cfg.resolved_m();
    let budget = cfg.resolved_budget();
    let (ball, blowup) = match attack {
        PerturbationSpec::LpBall { p, gamma } => (Some((*p, *gamma)), None),
        PerturbationSpec::FiniteOffsets { .. } => {
            if cfg.multi_granularity {
                return Err(Error::Unsupported(
                    "multi-granularity cascades need a ball perturbation set".into(),
                ));
            }
            (None, Some(inverse_blowup(attack)?))
        }
        PerturbationSpec::FinitePerExample { .. } => {
            return Err(Error::Unsupported(
                "boosting needs U^-1(U), unavailable for per-example sets".into(),
            ))
        }
    };

    let mut stages: Vec<SelectiveClassifier> = Vec::new();
    let mut diags = Vec::new();
    let mut last: Option<LinearModel> = None;
    let mut stopped_early = false;
    for t in 1..=rounds {
        let (data, draws) = if t == 1 {
            let samples = (0..m).map(|_| source.draw()).collect::<Result<Vec<_>>>()?;
            (Dataset::with_dim(samples, source.dim())?, m)
        } else {
            match rejection_sample(source, &stages, attack, m, budget)? {
                Some(r) => (r.data, r.draws),
                None => {
                    stopped_early = true;
                    break;
                }
            }
        };
        let h = learner.fit_dataset(&data)?;
        let (stage_spec, robust_spec, radius) = match ball {
            Some((p, gamma)) => {
                let rho = if cfg.multi_granularity {
                    gamma / 2f64.powi(t as i32 - 1)
                } else {
                    gamma
                };
                (
                    PerturbationSpec::lp_ball(p, rho)?,
                    PerturbationSpec::lp_ball(p, gamma + rho)?,
                    Some(rho),
                )
            }
            None => (attack.clone(), blowup.clone().expect("finite"), None),
        };
        let robust = data
            .iter()
            .map(|s| robustly_correct(&h, s, &robust_spec))
            .collect::<Result<Vec<bool>>>()?;
        diags.push(RoundDiagnostics {
            round: t,
            radius,
            beta_hat: robust.iter().filter(|r| **r).count() as f64 / data.len() as f64,
            samples: data.len(),
            draws,
        });
        stages.push(SelectiveClassifier::new(h.clone(), stage_spec)?);
        last = Some(h);
    }
    let fallback = last.expect("round 1 always trains");
    Ok(BoostOutput {
        cascade: Cascade::new(stages, fallback)?,
        rounds: diags,
        stopped_early,
    })
}

/// Source relabeling an unlabeled stream with a fixed predictor.
struct PseudoLabeled<'a, S: ?Sized> {
    inner: &'a mut S,
    labeler: &'a LinearModel,
    pending: Option<Sample>,
}

impl<S: SampleSource + ?Sized> SampleSource for PseudoLabeled<'_, S> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn next_sample(&mut self) -> Option<Sample> {
        let s = self.pending.take().or_else(|| self.inner.next_sample())?;
        let y = self.labeler.predict(&s.x);
        Some(Sample::new(s.x, y))
    }
}

/// Train `ĥ` on `labeled`, then boost on the unlabeled stream labeled by `ĥ`.
///
/// The stream's own labels are ignored. An empty stream yields the
/// single-stage cascade around `ĥ`.
pub fn beta_uroboost<S, L>(
    labeled: &Dataset,
    unlabeled: &mut S,
    learner: &L,
    cfg: &BoostConfig,
    attack: &PerturbationSpec,
) -> Result<(LinearModel, BoostOutput)>
where
    S: SampleSource + ?Sized,
    L: DatasetLearner + ?Sized,
{
    cfg.validate()?;
    let labeler = learner.fit_dataset(labeled)?;
    let first = unlabeled.next_sample();
    if first.is_none() {
        let stage_spec = match attack {
            PerturbationSpec::LpBall { p, gamma } => PerturbationSpec::lp_ball(*p, *gamma)?,
            other => other.clone(),
        };
        let cascade = Cascade::new(
            vec![SelectiveClassifier::new(labeler.clone(), stage_spec)?],
            labeler.clone(),
        )?;
        return Ok((
            labeler,
            BoostOutput {
                cascade,
                rounds: vec![],
                stopped_early: true,
            },
        ));
    }
    let mut src = PseudoLabeled {
        inner: unlabeled,
        labeler: &labeler,
        pending: first,
    };
    let out = beta_roboost(&mut src, learner, cfg, attack)?;
    Ok((labeler, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::robust::{DatasetSource, FnSource, Label};

    fn fixed(w: Vec<f64>) -> impl Fn(&Dataset) -> Result<LinearModel> {
        move |_| Ok(LinearModel::homogeneous(w.clone()))
    }

    #[test]
    fn defaults() {
        let cfg = BoostConfig::new(0.5, 0.1, 0.1, 10);
        assert_eq!(cfg.resolved_rounds(), 6);
        // 4 ln(120) ≈ 19.15
        assert_eq!(cfg.resolved_m(), 20);
        assert_eq!(cfg.resolved_budget(), 40);
    }

    #[test]
    fn fully_robust_learner_gives_one_stage() {
        let mut src = FnSource::new(2, {
            let mut i = 0u64;
            move || {
                i += 1;
                let y = if i % 2 == 0 { Label::Pos } else { Label::Neg };
                Some(Sample::new(vec![5.0 * y.value(), 0.0], y))
            }
        });
        let mut cfg = BoostConfig::new(1.0, 0.1, 0.1, 10);
        cfg.rounds = Some(3);
        let b = PerturbationSpec::lp_ball(2.0, 1.0).unwrap();
        let out = beta_roboost(&mut src, &fixed(vec![1.0, 0.0]), &cfg, &b).unwrap();
        assert_eq!(out.cascade.stages.len(), 1);
        assert!(out.stopped_early);
        assert_eq!(out.rounds[0].beta_hat, 1.0);
    }

    #[test]
    fn multi_granularity_halves_radius() {
        let mut src = FnSource::new(1, || Some(Sample::new(vec![0.1], Label::Pos)));
        let mut cfg = BoostConfig::new(0.5, 0.1, 0.1, 4);
        cfg.rounds = Some(3);
        cfg.multi_granularity = true;
        let b = PerturbationSpec::lp_ball(2.0, 1.0).unwrap();
        let out = beta_roboost(&mut src, &fixed(vec![1.0]), &cfg, &b).unwrap();
        let radii: Vec<f64> = out.rounds.iter().map(|r| r.radius.unwrap()).collect();
        assert_eq!(radii, vec![1.0, 0.5, 0.25]);
    }

    #[test]
    fn empty_unlabeled_stream() {
        let labeled = Dataset::new(vec![Sample::new(vec![1.0], Label::Pos)]).unwrap();
        let mut src = DatasetSource::new(Dataset::empty(1));
        let b = PerturbationSpec::lp_ball(2.0, 0.5).unwrap();
        let cfg = BoostConfig::new(0.5, 0.1, 0.1, 4);
        let (h, out) = beta_uroboost(&labeled, &mut src, &fixed(vec![1.0]), &cfg, &b).unwrap();
        assert_eq!(out.cascade.stages.len(), 1);
        assert_eq!(out.cascade.fallback, h);
    }
}

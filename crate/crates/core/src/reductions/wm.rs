use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracles::{attack, attack_by_enumeration};
use crate::robust::{Classifier, LinearModel, PerturbationSpec, Sample, SampleSource, WeightedVote};

/// `(a_η, b_η)` of the weighted-majority mistake bound `a_η·OPT + b_η·ln|H|`.
pub fn wm_constants(eta: f64) -> (f64, f64) {
    let l = (2.0 / (1.0 + eta)).ln();
    ((1.0 / eta).ln() / l, 1.0 / l)
}

/// Weights over a finite pool, scaled so the largest is 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleWeights {
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WmOutput {
    pub weights: EnsembleWeights,
    pub vote: WeightedVote<LinearModel>,
    /// Rounds in which the vote was successfully attacked.
    pub mistakes: usize,
    /// Per-member count of attacked points it got wrong.
    pub member_mistakes: Vec<usize>,
    /// Best member's count.
    pub opt: usize,
    pub bound: f64,
    pub rounds: usize,
    /// The successful attacks `(z_t, y_t)`, in order.
    pub witnesses: Vec<Sample>,
}

/// Weighted majority over a finite pool against the attack oracle.
///
/// Each round the current vote is attacked on the next example; on a witness
/// `z_t` every member wrong on `(z_t, y_t)` has its weight multiplied by `η`.
/// Runs until the stream ends or `rounds` examples are read.
pub fn weighted_majority_robust<S: SampleSource + ?Sized>(
    pool: &[LinearModel],
    stream: &mut S,
    spec: &PerturbationSpec,
    eta: f64,
    rounds: Option<usize>,
) -> Result<WmOutput> {
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    if !(0.0..1.0).contains(&eta) {
        return Err(Error::InvalidParameter("eta must lie in [0, 1)".into()));
    }
    if !spec.is_finite() && pool.len() > 1 {
        return Err(Error::Unsupported(
            "ball attacks on a weighted vote have no closed form; use a finite set".into(),
        ));
    }
    let n = pool.len();
    let mut vote = WeightedVote {
        members: pool.to_vec(),
        weights: vec![1.0 / n as f64; n],
    };
    let mut member_mistakes = vec![0usize; n];
    let mut mistakes = 0usize;
    let mut t = 0usize;
    let mut witnesses = Vec::new();
    while rounds.map_or(true, |r| t < r) {
        let Some(s) = stream.next_sample() else { break };
        let witness = if spec.is_finite() {
            attack_by_enumeration(&vote, &s, t, spec)?
        } else {
            attack(&pool[0], &s, t, spec)?
        };
        t += 1;
        let Some(z) = witness else { continue };
        mistakes += 1;
        for (i, h) in pool.iter().enumerate() {
            if h.predict(&z) != s.y {
                member_mistakes[i] += 1;
                vote.weights[i] *= eta;
            }
        }
        witnesses.push(Sample::new(z, s.y));
        let top = vote.weights.iter().copied().fold(0.0, f64::max);
        if top > 0.0 {
            vote.weights.iter_mut().for_each(|w| *w /= top);
        }
    }
    let opt = member_mistakes.iter().copied().min().unwrap_or(0);
    let (a, b) = wm_constants(eta);
    Ok(WmOutput {
        weights: EnsembleWeights {
            weights: vote.weights.clone(),
        },
        vote,
        mistakes,
        member_mistakes,
        opt,
        bound: a * opt as f64 + b * (n as f64).ln(),
        rounds: t,
        witnesses,
    })
}

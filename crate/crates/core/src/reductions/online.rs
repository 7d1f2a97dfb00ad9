use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::OnlineLearner;
use crate::oracles::attack;
use crate::robust::{Dataset, LinearModel, PerturbationSpec, SampleSource};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnePassConfig {
    pub eps: f64,
    pub delta: f64,
    pub mistake_cap: usize,
}

/// Consecutive robust-correct examples a survivor needs: `⌈(1/ε) ln(M/δ)⌉`, at least 1.
pub fn one_pass_run_length(eps: f64, delta: f64, mistake_cap: usize) -> Result<usize> {
    if !(eps > 0.0 && eps <= 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter("eps in (0, 1] and delta in (0, 1) required".into()));
    }
    let m = mistake_cap.max(1) as f64;
    Ok(((m / delta).ln() / eps).ceil().max(1.0) as usize)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnePassOutput {
    pub model: LinearModel,
    pub updates: usize,
    /// Stream examples read.
    pub consumed: usize,
    pub run_length: usize,
}

/// Single pass over a stream: update on every attack witness and return the
/// first model that survives a full run of robust-correct examples.
pub fn one_pass_robust<S, L>(
    stream: &mut S,
    learner: &mut L,
    spec: &PerturbationSpec,
    cfg: &OnePassConfig,
) -> Result<OnePassOutput>
where
    S: SampleSource + ?Sized,
    L: OnlineLearner + ?Sized,
{
    let run_length = one_pass_run_length(cfg.eps, cfg.delta, cfg.mistake_cap)?;
    let mut streak = 0usize;
    let mut updates = 0usize;
    let mut consumed = 0usize;
    let mut index = 0usize;
    while streak < run_length {
        let Some(s) = stream.next_sample() else {
            return Err(Error::StreamExhausted);
        };
        consumed += 1;
        match attack(&learner.model(), &s, index, spec)? {
            Some(z) => {
                if learner.update(&z, s.y) {
                    updates += 1;
                }
                streak = 0;
            }
            None => streak += 1,
        }
        index += 1;
    }
    Ok(OnePassOutput {
        model: learner.model(),
        updates,
        consumed,
        run_length,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleOutput {
    pub model: LinearModel,
    pub updates: usize,
    pub passes: usize,
    pub oracle_calls: usize,
}

/// Cycle over `data` feeding every attack witness to the learner until one
/// full pass finds none. More than `cap` updates means `data` is not robustly
/// realizable within the learner's budget.
pub fn cycle_robust<L: OnlineLearner + ?Sized>(
    data: &Dataset,
    learner: &mut L,
    spec: &PerturbationSpec,
    cap: usize,
) -> Result<CycleOutput> {
    let mut updates = 0usize;
    let mut passes = 0usize;
    let mut calls = 0usize;
    loop {
        passes += 1;
        let mut clean = true;
        for (i, s) in data.iter().enumerate() {
            calls += 1;
            let Some(z) = attack(&learner.model(), s, i, spec)? else {
                continue;
            };
            clean = false;
            if !learner.update(&z, s.y) {
                return Err(Error::Unsupported(
                    "online learner declined an attack witness; the loop cannot progress".into(),
                ));
            }
            updates += 1;
            if updates > cap {
                return Err(Error::MistakeCapExceeded { cap });
            }
        }
        if clean {
            return Ok(CycleOutput {
                model: learner.model(),
                updates,
                passes,
                oracle_calls: calls,
            });
        }
    }
}

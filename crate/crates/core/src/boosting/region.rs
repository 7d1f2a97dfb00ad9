use crate::error::{Error, Result};
use crate::boosting::selective::SelectiveClassifier;
use crate::robust::{check_dim, Dataset, PerturbationSpec, SampleSource, SelectiveLabel};

/// True iff every stage is non-robust at `x`: for each stage some `z ∈ U(x)`
/// makes it abstain.
///
/// For balls this is the closed form `|m_t(x)| ≤ γ + ρ_t` (ρ_t the stage's
/// abstention radius, so `2γ` by default); finite sets are enumerated.
pub fn in_nonrobust_region(
    stages: &[SelectiveClassifier],
    x: &[f64],
    attack: &PerturbationSpec,
) -> Result<bool> {
    if stages.is_empty() {
        return Err(Error::InvalidParameter("need at least one model".into()));
    }
    for st in stages {
        check_dim(st.model.dim(), x.len())?;
        if st.model.is_constant() {
            return Ok(false);
        }
        let nonrobust = match attack {
            PerturbationSpec::LpBall { p, gamma } => match st.radius() {
                Some((sp, rho)) if sp == *p => st.model.margin(x, *p)?.abs() <= gamma + rho,
                _ => {
                    return Err(Error::Unsupported(
                        "ball attacks need stages abstaining on a ball of the same norm".into(),
                    ))
                }
            },
            PerturbationSpec::FiniteOffsets { .. } => attack
                .points(0, x)?
                .iter()
                .any(|z| st.predict_selective(z) == SelectiveLabel::Abstain),
            PerturbationSpec::FinitePerExample { .. } => {
                return Err(Error::Unsupported(
                    "non-robust region of per-example sets needs example indices".into(),
                ))
            }
        };
        if !nonrobust {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RejectionSample {
    pub data: Dataset,
    /// Source draws consumed, accepted or not.
    pub draws: usize,
}

/// Draw `m` examples from the region where all stages are non-robust.
///
/// Returns `None` as soon as a single accepted example takes more than
/// `budget_per_draw` source draws.
pub fn rejection_sample<S: SampleSource + ?Sized>(
    source: &mut S,
    stages: &[SelectiveClassifier],
    attack: &PerturbationSpec,
    m: usize,
    budget_per_draw: usize,
) -> Result<Option<RejectionSample>> {
    let mut out = Dataset::empty(source.dim());
    let mut draws = 0;
    for _ in 0..m {
        let mut accepted = false;
        for _ in 0..budget_per_draw {
            let s = source.draw()?;
            draws += 1;
            if in_nonrobust_region(stages, &s.x, attack)? {
                out.push(s)?;
                accepted = true;
                break;
            }
        }
        if !accepted {
            return Ok(None);
        }
    }
    Ok(Some(RejectionSample { data: out, draws }))
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::robust::{Classifier, Label, LinearModel, PerturbationSpec, SampleSource};

/// `g_y`: predicts `y` on the `U⁻¹(U)`-blowup of the points where `ĥ` is
/// robust and predicts `y`, and `−y` elsewhere.
///
/// For a halfspace and a ball this is `g_y(x) = y ⇔ y·margin(x) > −γ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpandedClassifier {
    pub model: LinearModel,
    pub p: f64,
    pub gamma: f64,
    pub label: Label,
}

impl Classifier for ExpandedClassifier {
    fn predict(&self, x: &[f64]) -> Label {
        if self.model.is_constant() {
            return self.model.predict(x);
        }
        let m = self.model.margin(x, self.p).expect("non-constant model");
        if self.label.value() * m > -self.gamma {
            self.label
        } else {
            self.label.flip()
        }
    }

    fn ball_loss(&self, x: &[f64], y: Label, p: f64, gamma: f64) -> Result<bool> {
        if self.model.is_constant() {
            return Ok(self.model.predict(x) != y);
        }
        if p != self.p {
            return Err(Error::Unsupported("attack norm differs from the expansion norm".into()));
        }
        // g_y is the halfspace label·m > −γ, so its robust loss is a margin test
        let m = self.label.value() * self.model.margin(x, p)? + self.gamma;
        Ok(if y == self.label { m - gamma <= 0.0 } else { -m - gamma < 0.0 })
    }
}

pub fn expand_g(h: &LinearModel, spec: &PerturbationSpec, label: Label) -> Result<ExpandedClassifier> {
    match spec {
        PerturbationSpec::LpBall { p, gamma } => Ok(ExpandedClassifier {
            model: h.clone(),
            p: *p,
            gamma: *gamma,
            label,
        }),
        _ => Err(Error::Unsupported("expansion is implemented for balls only".into())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrongToBarely {
    pub g: ExpandedClassifier,
    /// Fraction of the robust-region sample that `ĥ` labels +1.
    pub m_plus: f64,
    pub samples: usize,
    pub draws: usize,
}

/// `m̃ = ⌈(64/9) ln(1/δ)⌉`.
pub fn strong_to_barely_m(delta: f64) -> usize {
    ((64.0 / 9.0) * (1.0 / delta).ln()).ceil().max(1.0) as usize
}

/// Pick `g₊` or `g₋` by the majority prediction of `ĥ` on `m̃` fresh draws
/// from its robust region `|margin| > γ`. At most `max_draws` source draws are
/// spent; running out is reported as an exhausted source.
pub fn strong_to_barely<S: SampleSource + ?Sized>(
    h: &LinearModel,
    source: &mut S,
    spec: &PerturbationSpec,
    delta: f64,
    max_draws: usize,
) -> Result<StrongToBarely> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter("delta must lie in (0, 1)".into()));
    }
    let PerturbationSpec::LpBall { p, gamma } = *spec else {
        return Err(Error::Unsupported("expansion is implemented for balls only".into()));
    };
    let m = strong_to_barely_m(delta);
    let (mut got, mut plus, mut draws) = (0usize, 0usize, 0usize);
    while got < m {
        if draws == max_draws {
            return Err(Error::SourceExhausted);
        }
        let s = source.draw()?;
        draws += 1;
        let robust = h.is_constant() || h.margin(&s.x, p)?.abs() > gamma;
        if robust {
            got += 1;
            if h.predict(&s.x) == Label::Pos {
                plus += 1;
            }
        }
    }
    let m_plus = plus as f64 / m as f64;
    let label = if m_plus >= 0.5 { Label::Pos } else { Label::Neg };
    Ok(StrongToBarely {
        g: expand_g(h, spec, label)?,
        m_plus,
        samples: m,
        draws,
    })
}

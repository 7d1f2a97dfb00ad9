use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dual_exponent, lp_norm, sub};
use crate::oracles::{ellipsoid_search, separation_oracle, EllipsoidConfig, SeparationAnswer, SetDescriptor};
use crate::robust::{
    check_dim, Classifier, Label, LinearModel, PerturbationSpec, SelectiveLabel,
};

/// `G_h`: predicts `h(z)` when every natural point that could have been moved
/// to `z` gets the same label, abstains otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectiveClassifier {
    pub model: LinearModel,
    pub abstain_spec: PerturbationSpec,
}

impl SelectiveClassifier {
    pub fn new(model: LinearModel, abstain_spec: PerturbationSpec) -> Result<Self> {
        match &abstain_spec {
            PerturbationSpec::LpBall { p, .. } => {
                dual_exponent(*p)?;
            }
            PerturbationSpec::FiniteOffsets { offsets } => {
                check_dim(model.dim(), offsets[0].len())?;
            }
            PerturbationSpec::FinitePerExample { .. } => {
                return Err(Error::Unsupported(
                    "selective prediction needs U^-1(z), unavailable for per-example sets".into(),
                ))
            }
        }
        Ok(SelectiveClassifier {
            model,
            abstain_spec,
        })
    }

    /// Ball radius the stage abstains at, if its spec is a ball.
    pub fn radius(&self) -> Option<(f64, f64)> {
        match self.abstain_spec {
            PerturbationSpec::LpBall { p, gamma } => Some((p, gamma)),
            _ => None,
        }
    }

    pub fn predict_selective(&self, z: &[f64]) -> SelectiveLabel {
        if self.model.is_constant() {
            return self.model.predict(z).into();
        }
        match &self.abstain_spec {
            PerturbationSpec::LpBall { p, gamma } => {
                let m = self.model.margin(z, *p).expect("non-constant model");
                if m.abs() > *gamma {
                    Label::from_score(m).into()
                } else {
                    SelectiveLabel::Abstain
                }
            }
            PerturbationSpec::FiniteOffsets { offsets } => {
                // U⁻¹(z) = {z − o}
                let first = self.model.predict(&sub(z, &offsets[0]));
                if offsets[1..].iter().all(|o| self.model.predict(&sub(z, o)) == first) {
                    first.into()
                } else {
                    SelectiveLabel::Abstain
                }
            }
            PerturbationSpec::FinitePerExample { .. } => unreachable!("rejected at construction"),
        }
    }
}

/// Evaluate `G_h` at `z`.
pub fn selective_predict(sc: &SelectiveClassifier, z: &[f64]) -> Result<SelectiveLabel> {
    check_dim(sc.model.dim(), z.len())?;
    if let PerturbationSpec::FinitePerExample { .. } = sc.abstain_spec {
        return Err(Error::Unsupported("per-example abstention sets".into()));
    }
    Ok(sc.predict_selective(z))
}

/// Ordered selective classifiers; the first one that does not abstain decides,
/// and the fallback's raw prediction is used when all abstain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cascade {
    pub stages: Vec<SelectiveClassifier>,
    pub fallback: LinearModel,
}

impl Cascade {
    pub fn new(stages: Vec<SelectiveClassifier>, fallback: LinearModel) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::InvalidParameter("a cascade needs at least one stage".into()));
        }
        for s in &stages {
            check_dim(fallback.dim(), s.model.dim())?;
        }
        Ok(Cascade { stages, fallback })
    }

    /// Index of the deciding stage (`None` for the fallback) and its label.
    pub fn decide(&self, z: &[f64]) -> (Option<usize>, Label) {
        for (i, s) in self.stages.iter().enumerate() {
            if let Some(l) = s.predict_selective(z).label() {
                return (Some(i), l);
            }
        }
        (None, self.fallback.predict(z))
    }
}

pub fn cascade_predict(c: &Cascade, z: &[f64]) -> Label {
    c.decide(z).1
}

impl Classifier for Cascade {
    fn predict(&self, x: &[f64]) -> Label {
        cascade_predict(self, x)
    }

    /// Exact robust loss over the closed ball `B_p(x, γ)`.
    ///
    /// Stage `s` can err at `z` only if every earlier stage abstains there and
    /// `y·m_s(z) < −ρ_s`; the fallback errs where all stages abstain and
    /// `y·score(z) ≤ 0` (the single-halfspace tie convention). Each such region
    /// is convex and is searched with the ellipsoid method, after cheap
    /// certificates from the margins at `x`. Regions thinner than the ellipsoid
    /// tolerance are reported empty.
    fn ball_loss(&self, x: &[f64], y: Label, p: f64, gamma: f64) -> Result<bool> {
        cascade_ball_loss(self, x, y, p, gamma)
    }
}

/// Gap that turns the strict stage-error inequality into a closed one.
const STRICT: f64 = 1e-9;

/// Linear constraint `a·z ≤ c`.
struct Slab {
    a: Vec<f64>,
    c: f64,
}

fn cascade_ball_loss(cas: &Cascade, x: &[f64], y: Label, p: f64, gamma: f64) -> Result<bool> {
    check_dim(cas.fallback.dim(), x.len())?;
    let yv = y.value();
    // per-stage (normalized w, normalized bias, radius); None for constant stages
    let mut stages = Vec::with_capacity(cas.stages.len());
    for s in &cas.stages {
        if s.model.is_constant() {
            stages.push(None);
            continue;
        }
        let (sp, rho) = s.radius().ok_or_else(|| {
            Error::Unsupported("ball robust loss of a cascade with finite abstention sets".into())
        })?;
        if sp != p {
            return Err(Error::Unsupported(
                "cascade stages must abstain in the attack's norm".into(),
            ));
        }
        let n = lp_norm(&s.model.w, dual_exponent(p)?);
        let w: Vec<f64> = s.model.w.iter().map(|v| v / n).collect();
        stages.push(Some((w, s.model.bias / n, rho)));
    }
    if gamma == 0.0 {
        return Ok(cascade_predict(cas, x) != y);
    }
    let margin_at = |w: &[f64], b: f64| crate::linalg::dot(w, x) + b;

    // certificate of correctness and the first-stage closed form
    let mut certified = false;
    for (i, st) in stages.iter().enumerate() {
        match st {
            None => {
                let l = cas.stages[i].model.predict(x);
                if l != y && i == 0 {
                    return Ok(true);
                }
                certified = l == y;
                break;
            }
            Some((w, b, rho)) => {
                let m = margin_at(w, *b);
                let safe = yv * m - gamma >= -rho;
                if !safe {
                    if i == 0 {
                        return Ok(true);
                    }
                    break;
                }
                if m.abs() - gamma > *rho {
                    certified = true;
                    break;
                }
            }
        }
        if i + 1 == stages.len() {
            // reached the end with every stage safe; the fallback decides the rest
            certified = if cas.fallback.is_constant() {
                cas.fallback.predict(x) == y
            } else {
                yv * cas.fallback.margin(x, p)? > gamma
            };
        }
    }
    if certified {
        return Ok(false);
    }
    if cascade_predict(cas, x) != y {
        return Ok(true);
    }

    let desc = SetDescriptor::Ball { p, gamma };
    let radius = desc.bounding_radius(x.len()).expect("ball");
    let cfg = EllipsoidConfig::for_problem(x.len(), gamma);
    let mut abstain: Vec<Slab> = Vec::new();
    for (i, st) in stages.iter().enumerate() {
        let mut cons: Vec<&Slab> = abstain.iter().collect();
        let err_slab;
        match st {
            None => {
                if cas.stages[i].model.predict(x) == y {
                    // every later stage is unreachable
                    return Ok(false);
                }
                if feasible(&desc, x, radius, &cons, &cfg)? {
                    return Ok(true);
                }
                return Ok(false);
            }
            Some((w, b, rho)) => {
                err_slab = Slab {
                    a: w.iter().map(|v| yv * v).collect(),
                    c: -rho - yv * b - STRICT,
                };
                cons.push(&err_slab);
                if feasible(&desc, x, radius, &cons, &cfg)? {
                    return Ok(true);
                }
                abstain.push(Slab {
                    a: w.clone(),
                    c: rho - b,
                });
                abstain.push(Slab {
                    a: w.iter().map(|v| -v).collect(),
                    c: rho + b,
                });
            }
        }
    }
    let mut cons: Vec<&Slab> = abstain.iter().collect();
    let fb;
    if cas.fallback.is_constant() {
        if cas.fallback.predict(x) == y {
            return Ok(false);
        }
    } else {
        fb = Slab {
            a: cas.fallback.w.iter().map(|v| yv * v).collect(),
            c: -yv * cas.fallback.bias,
        };
        cons.push(&fb);
    }
    feasible(&desc, x, radius, &cons, &cfg)
}

fn feasible(
    desc: &SetDescriptor,
    x: &[f64],
    radius: f64,
    cons: &[&Slab],
    cfg: &EllipsoidConfig,
) -> Result<bool> {
    let oracle = |z: &[f64]| -> Result<SeparationAnswer> {
        match separation_oracle(desc, x, z)? {
            SeparationAnswer::Inside => {}
            cut => return Ok(cut),
        }
        for s in cons {
            if crate::linalg::dot(&s.a, z) > s.c {
                return Ok(SeparationAnswer::Hyperplane {
                    normal: s.a.clone(),
                    offset: s.c,
                });
            }
        }
        Ok(SeparationAnswer::Inside)
    };
    Ok(ellipsoid_search(oracle, x, radius * (1.0 + 1e-9) + 1e-12, cfg)?.is_some())
}

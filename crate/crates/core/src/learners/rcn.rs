use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, lp_norm};
use crate::robust::{LinearModel, SampleSource};

/// Parameters shared by the two noise-tolerant halfspace trainers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RcnConfig {
    pub gamma: f64,
    /// Flip rate of the label noise.
    pub eta: f64,
    pub eps: f64,
    /// Exponent of the constraint `‖w‖_q ≤ 1`; dual to the feature norm.
    pub q: f64,
    pub steps: usize,
}

impl RcnConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.q >= 1.0) {
            return Err(Error::InvalidNorm(self.q));
        }
        if !(self.gamma > 0.0) {
            return Err(Error::InvalidParameter("gamma must be > 0".into()));
        }
        if !(0.0..0.5).contains(&self.eta) {
            return Err(Error::InvalidParameter("eta must lie in [0, 0.5)".into()));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidParameter("eps must lie in (0, 1)".into()));
        }
        if self.steps == 0 {
            return Err(Error::InvalidParameter("steps must be at least 1".into()));
        }
        Ok(())
    }

    pub fn lambda(&self) -> f64 {
        rcn_lambda(self.eps, self.gamma, self.eta)
    }
}

/// `λ = (εγ/2 + η) / (1 + εγ)`, which lies in `[η, 1/2]`.
pub fn rcn_lambda(eps: f64, gamma: f64, eta: f64) -> f64 {
    (eps * gamma / 2.0 + eta) / (1.0 + eps * gamma)
}

/// Surrogate `φ(s)` and its subgradient; the kink `s = γ` takes the left branch.
pub fn rcn_phi(s: f64, lambda: f64, gamma: f64) -> (f64, f64) {
    if s > gamma {
        (lambda * (1.0 - s / gamma), -lambda / gamma)
    } else {
        ((1.0 - lambda) * (1.0 - s / gamma), -(1.0 - lambda) / gamma)
    }
}

/// Stochastic mirror descent on `E[φ(y⟨w,x⟩)]` over `‖w‖_q ≤ 1`.
///
/// Draws up to `cfg.steps` examples; returns the average iterate.
pub fn rcn_train_md<S: SampleSource + ?Sized>(source: &mut S, cfg: &RcnConfig) -> Result<LinearModel> {
    cfg.validate()?;
    let lambda = cfg.lambda();
    let lip = lambda.max(1.0 - lambda) / cfg.gamma;
    mirror_descent(source, cfg.q, cfg.steps, lip, |w, x, y| {
        let (_, g) = rcn_phi(y * dot(w, x), lambda, cfg.gamma);
        g * y
    })
}

/// Shared mirror-descent driver. `coef(w, x, y)` returns the scalar `c` of a
/// gradient of the form `c·x`.
pub(crate) fn mirror_descent<S, F>(
    source: &mut S,
    q: f64,
    steps: usize,
    lipschitz: f64,
    coef: F,
) -> Result<LinearModel>
where
    S: SampleSource + ?Sized,
    F: Fn(&[f64], &[f64], f64) -> f64,
{
    if !(q >= 1.0) {
        return Err(Error::InvalidNorm(q));
    }
    let d = source.dim();
    let mut mirror = Mirror::new(q, d);
    let mut avg = vec![0.0; d];
    let mut used = 0usize;
    for t in 1..=steps {
        let Some(s) = source.next_sample() else { break };
        let w = mirror.point();
        for (a, wj) in avg.iter_mut().zip(&w) {
            *a += wj;
        }
        used += 1;
        let c = coef(&w, &s.x, s.y.value());
        let step = 1.0 / (lipschitz * (t as f64).sqrt());
        mirror.step(&s.x, c * step);
    }
    if used == 0 {
        return Err(Error::SourceExhausted);
    }
    avg.iter_mut().for_each(|a| *a /= used as f64);
    Ok(LinearModel::homogeneous(avg))
}

/// Iterate state of mirror descent over the unit `ℓq` ball.
enum Mirror {
    /// ψ(w) = ½‖w‖_q², 1 < q < ∞.
    Pnorm { q: f64, w: Vec<f64> },
    /// Projected subgradient with coordinate clipping (q = ∞).
    Clip { w: Vec<f64> },
    /// Exponentiated gradient on the doubled simplex, `w = u − v` (q = 1).
    Entropy { u: Vec<f64>, v: Vec<f64> },
}

impl Mirror {
    fn new(q: f64, d: usize) -> Self {
        if q == 1.0 {
            let start = 1.0 / (2 * d) as f64;
            Mirror::Entropy {
                u: vec![start; d],
                v: vec![start; d],
            }
        } else if q.is_infinite() {
            Mirror::Clip { w: vec![0.0; d] }
        } else {
            Mirror::Pnorm { q, w: vec![0.0; d] }
        }
    }

    fn point(&self) -> Vec<f64> {
        match self {
            Mirror::Pnorm { w, .. } | Mirror::Clip { w } => w.clone(),
            Mirror::Entropy { u, v } => u.iter().zip(v).map(|(a, b)| a - b).collect(),
        }
    }

    /// Take a step against the gradient `scaled · x`.
    fn step(&mut self, x: &[f64], scaled: f64) {
        match self {
            Mirror::Pnorm { q, w } => {
                let q = *q;
                let p = q / (q - 1.0);
                let mut theta = pnorm_link(w, q);
                for (th, xj) in theta.iter_mut().zip(x) {
                    *th -= scaled * xj;
                }
                let mut next = pnorm_link(&theta, p);
                let n = lp_norm(&next, q);
                if n > 1.0 {
                    next.iter_mut().for_each(|v| *v /= n);
                }
                *w = next;
            }
            Mirror::Clip { w } => {
                for (wj, xj) in w.iter_mut().zip(x) {
                    *wj = (*wj - scaled * xj).clamp(-1.0, 1.0);
                }
            }
            Mirror::Entropy { u, v } => {
                // gradient is +g on u and −g on v; shift exponents for stability
                let expo: Vec<f64> = x.iter().map(|xj| -scaled * xj).collect();
                let m = expo.iter().fold(0.0_f64, |a, e| a.max(e.abs()));
                let mut z = 0.0;
                for ((ui, vi), e) in u.iter_mut().zip(v.iter_mut()).zip(&expo) {
                    *ui *= (e - m).exp();
                    *vi *= (-e - m).exp();
                    z += *ui + *vi;
                }
                u.iter_mut().for_each(|a| *a /= z);
                v.iter_mut().for_each(|a| *a /= z);
            }
        }
    }
}

/// Gradient of `½‖w‖_r²`: `sign(w_i)|w_i|^{r−1}·‖w‖_r^{2−r}`.
fn pnorm_link(w: &[f64], r: f64) -> Vec<f64> {
    if r == 2.0 {
        return w.to_vec();
    }
    let n = lp_norm(w, r);
    if n == 0.0 {
        return vec![0.0; w.len()];
    }
    let scale = n.powf(2.0 - r);
    w.iter()
        .map(|v| v.signum() * v.abs().powf(r - 1.0) * scale)
        .collect()
}

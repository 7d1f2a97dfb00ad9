use crate::error::Result;
use crate::learners::rcn::{mirror_descent, RcnConfig};
use crate::linalg::dot;
use crate::robust::{LinearModel, SampleSource};

/// Link `u(s)`: `η` below `−γ`, `1 − η` above `γ`, linear in between.
pub fn glm_link_u(s: f64, eta: f64, gamma: f64) -> f64 {
    if s < -gamma {
        eta
    } else if s > gamma {
        1.0 - eta
    } else {
        (1.0 - 2.0 * eta) / (2.0 * gamma) * s + 0.5
    }
}

/// `∫₀^a u(s) ds` in closed form.
fn link_integral(a: f64, eta: f64, gamma: f64) -> f64 {
    let k = (1.0 - 2.0 * eta) / (2.0 * gamma);
    let mid = |t: f64| k * t * t / 2.0 + t / 2.0;
    if a > gamma {
        mid(gamma) + (1.0 - eta) * (a - gamma)
    } else if a < -gamma {
        mid(-gamma) + eta * (a + gamma)
    } else {
        mid(a)
    }
}

/// Surrogate `ℓ = ∫₀^a (u(s) − y) ds` at score `a`, label `y ∈ {0,1}`; returns
/// the value and its derivative in `a` (the gradient in `w` is that times `x`).
pub fn glm_loss(a: f64, y_bit: f64, eta: f64, gamma: f64) -> (f64, f64) {
    (
        link_integral(a, eta, gamma) - y_bit * a,
        glm_link_u(a, eta, gamma) - y_bit,
    )
}

/// Mirror descent on the GLM surrogate over `‖w‖_q ≤ 1` (`cfg.eps` is unused).
pub fn glm_train<S: SampleSource + ?Sized>(source: &mut S, cfg: &RcnConfig) -> Result<LinearModel> {
    cfg.validate()?;
    let (eta, gamma) = (cfg.eta, cfg.gamma);
    mirror_descent(source, cfg.q, cfg.steps, 1.0, |w, x, y| {
        let bit = if y > 0.0 { 1.0 } else { 0.0 };
        glm_loss(dot(w, x), bit, eta, gamma).1
    })
}

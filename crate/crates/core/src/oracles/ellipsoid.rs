//! Ellipsoid method for convex feasibility, robust certification through a
//! separation oracle, and robust ERM for halfspaces built on top of both.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, lp_norm};
use crate::oracles::separation::{separation_oracle, SeparationAnswer, SetDescriptor};
use crate::robust::{check_dim, Dataset, Label, LinearModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipsoidConfig {
    pub max_iters: usize,
    pub init_radius: f64,
    /// Slack `τ` that turns strict robust-separation inequalities into closed ones.
    pub feas_slack: f64,
    /// The region is declared empty once the ellipsoid's mean semi-axis drops below this.
    pub volume_eps: f64,
}

impl EllipsoidConfig {
    /// `max_iters = 50·d²·⌈log₂(R/eps)⌉`, `R = 10`, `τ = γ/10`, `eps = 1e-6`.
    pub fn for_problem(dim: usize, gamma: f64) -> Self {
        let init_radius = 10.0;
        let volume_eps = 1e-6;
        EllipsoidConfig {
            max_iters: default_max_iters(dim, init_radius, volume_eps),
            init_radius,
            feas_slack: gamma / 10.0,
            volume_eps,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0
            || !(self.init_radius > 0.0)
            || !(self.feas_slack > 0.0)
            || !(self.volume_eps > 0.0)
        {
            return Err(Error::InvalidParameter(
                "ellipsoid budget fields must all be positive".into(),
            ));
        }
        Ok(())
    }
}

pub fn default_max_iters(dim: usize, init_radius: f64, volume_eps: f64) -> usize {
    let bits = (init_radius / volume_eps).log2().ceil().max(1.0) as usize;
    50 * dim * dim * bits
}

/// Search the ball of radius `cfg.init_radius` around the origin for a point the
/// oracle accepts. `None` means empty up to `volume_eps`.
pub fn ellipsoid_feasible<F>(sep: F, dim: usize, cfg: &EllipsoidConfig) -> Result<Option<Vec<f64>>>
where
    F: FnMut(&[f64]) -> Result<SeparationAnswer>,
{
    cfg.validate()?;
    ellipsoid_search(sep, &vec![0.0; dim], cfg.init_radius, cfg)
}

/// Ellipsoid search starting from the ball `B(center, radius)`.
pub fn ellipsoid_search<F>(
    mut sep: F,
    center: &[f64],
    radius: f64,
    cfg: &EllipsoidConfig,
) -> Result<Option<Vec<f64>>>
where
    F: FnMut(&[f64]) -> Result<SeparationAnswer>,
{
    let d = center.len();
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    let mut c = DVector::from_column_slice(center);
    let mut p = DMatrix::<f64>::identity(d, d) * (radius * radius);
    // log of the product of semi-axes
    let mut log_axes = d as f64 * radius.ln();
    let log_eps = cfg.volume_eps.ln();
    let df = d as f64;

    for _ in 0..cfg.max_iters {
        let (normal, offset) = match sep(c.as_slice())? {
            SeparationAnswer::Inside => return Ok(Some(c.as_slice().to_vec())),
            SeparationAnswer::Hyperplane { normal, offset } => (normal, offset),
        };
        if normal.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: normal.len(),
            });
        }
        let a = DVector::from_vec(normal);
        let ac = a.dot(&c);
        let tol = 1e-12 * (1.0 + ac.abs() + offset.abs());
        if ac < offset - tol {
            return Err(Error::OracleViolation);
        }
        let pa = &p * &a;
        let apa = a.dot(&pa);
        if !(apa > 0.0) || !apa.is_finite() {
            return Ok(None);
        }
        let s = apa.sqrt();
        // depth of the cut in units of the ellipsoid's extent along a
        let alpha = ((ac - offset) / s).max(0.0);
        if alpha >= 1.0 {
            return Ok(None);
        }
        if d == 1 {
            // the interval [c − r, c + r] intersected with {a·z ≤ offset}
            let r = s / a[0].abs();
            let (lo, hi) = (c[0] - r, c[0] + r);
            let bound = offset / a[0];
            let (lo, hi) = if a[0] > 0.0 { (lo, bound.min(hi)) } else { (bound.max(lo), hi) };
            let half = (hi - lo) / 2.0;
            c[0] = (lo + hi) / 2.0;
            p[(0, 0)] = half * half;
            log_axes = half.ln();
        } else {
            let tau = (1.0 + df * alpha) / (df + 1.0);
            let sigma = 2.0 * (1.0 + df * alpha) / ((df + 1.0) * (1.0 + alpha));
            let delta = df * df * (1.0 - alpha * alpha) / (df * df - 1.0);
            c -= &pa * (tau / s);
            let outer = &pa * pa.transpose() / apa;
            p = (&p - outer * sigma) * delta;
            p = (&p + p.transpose()) * 0.5;
            log_axes += 0.5 * (df * delta.ln() + (1.0 - sigma).ln());
        }
        if log_axes / df < log_eps {
            return Ok(None);
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    Robust,
    Counterexample(Vec<f64>),
}

/// Certify a halfspace on `U(x)` using only a separation oracle for `U(x)`.
///
/// Searches `U(x) ∩ {z : y(⟨w,z⟩ + bias) ≤ 0}` with the ellipsoid method; near-empty
/// intersections (below `volume_eps`) are reported as `Robust`.
pub fn ellipsoid_certify(
    model: &LinearModel,
    x: &[f64],
    y: Label,
    desc: &SetDescriptor,
    cfg: &EllipsoidConfig,
) -> Result<Certificate> {
    certify_at_level(model, x, y, desc, 0.0, cfg)
}

/// As [`ellipsoid_certify`] with the misclassification set widened to
/// `{z : y(⟨w,z⟩ + bias) ≤ level}`.
pub fn certify_at_level(
    model: &LinearModel,
    x: &[f64],
    y: Label,
    desc: &SetDescriptor,
    level: f64,
    cfg: &EllipsoidConfig,
) -> Result<Certificate> {
    check_dim(model.dim(), x.len())?;
    let yw: Vec<f64> = model.w.iter().map(|v| y.value() * v).collect();
    let y_bias = y.value() * model.bias;
    let radius = desc.bounding_radius(x.len()).unwrap_or(cfg.init_radius);
    if radius == 0.0 {
        // U(x) = {x}
        return Ok(if dot(&yw, x) + y_bias <= level {
            Certificate::Counterexample(x.to_vec())
        } else {
            Certificate::Robust
        });
    }
    if crate::linalg::is_zero(&yw) {
        return Ok(if y_bias <= level {
            Certificate::Counterexample(x.to_vec())
        } else {
            Certificate::Robust
        });
    }
    let oracle = |z: &[f64]| -> Result<SeparationAnswer> {
        match separation_oracle(desc, x, z)? {
            SeparationAnswer::Inside => {
                if dot(&yw, z) + y_bias <= level {
                    Ok(SeparationAnswer::Inside)
                } else {
                    Ok(SeparationAnswer::Hyperplane {
                        normal: yw.clone(),
                        offset: level - y_bias,
                    })
                }
            }
            cut => Ok(cut),
        }
    };
    // pad the starting ball slightly so the boundary of U(x) is strictly inside
    Ok(match ellipsoid_search(oracle, x, radius * (1.0 + 1e-9) + 1e-12, cfg)? {
        Some(z) => Certificate::Counterexample(z),
        None => Certificate::Robust,
    })
}

/// Robust ERM for homogeneous halfspaces in the realizable case.
///
/// Searches `{w : ‖w‖₂ ≤ R, y_i⟨w, z⟩ ≥ τ ∀ z ∈ U(x_i)}`; every query `w` is
/// checked against each example with the separation-oracle certifier, and a
/// counterexample `z` yields the cut `⟨−y z, w'⟩ ≤ −τ`.
pub fn rerm_ellipsoid<'a, F>(
    data: &Dataset,
    descriptor_for: F,
    cfg: &EllipsoidConfig,
) -> Result<LinearModel>
where
    F: Fn(usize) -> &'a SetDescriptor,
{
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let tau = cfg.feas_slack;
    let radius = cfg.init_radius;
    let mut infeasible = false;
    let oracle = |w: &[f64]| -> Result<SeparationAnswer> {
        let n = lp_norm(w, 2.0);
        if n > radius {
            return Ok(SeparationAnswer::Hyperplane {
                normal: w.iter().map(|v| v / n).collect(),
                offset: radius,
            });
        }
        let model = LinearModel::homogeneous(w.to_vec());
        for (i, s) in data.iter().enumerate() {
            if let Certificate::Counterexample(z) =
                certify_at_level(&model, &s.x, s.y, descriptor_for(i), tau, cfg)?
            {
                if crate::linalg::is_zero(&z) {
                    // y⟨w, 0⟩ ≥ τ > 0 is unsatisfiable
                    infeasible = true;
                    return Ok(SeparationAnswer::Hyperplane {
                        normal: w.iter().map(|_| 0.0).collect(),
                        offset: -1.0,
                    });
                }
                return Ok(SeparationAnswer::Hyperplane {
                    normal: z.iter().map(|v| -s.y.value() * v).collect(),
                    offset: -tau,
                });
            }
        }
        Ok(SeparationAnswer::Inside)
    };
    let found = ellipsoid_search(oracle, &vec![0.0; data.dim()], radius, cfg);
    if infeasible {
        return Err(Error::NotSeparable);
    }
    match found? {
        Some(w) => Ok(LinearModel::homogeneous(w)),
        None => Err(Error::NotSeparable),
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, lp_norm, sub};
use crate::robust::PerturbationSpec;

/// Convex perturbation region described relative to its center `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SetDescriptor {
    /// Closed `ℓp` ball, p ∈ {1, 2, ∞}.
    Ball { p: f64, gamma: f64 },
    /// `{z : A(z − x) ≤ b}`; rows of `a` are constraint normals.
    Polytope { a: Vec<Vec<f64>>, b: Vec<f64> },
}

impl SetDescriptor {
    pub fn from_spec(spec: &PerturbationSpec) -> Result<Self> {
        match spec {
            PerturbationSpec::LpBall { p, gamma } => Ok(SetDescriptor::Ball {
                p: *p,
                gamma: *gamma,
            }),
            _ => Err(Error::UnsupportedGeometry(
                "finite perturbation sets have no separation oracle".into(),
            )),
        }
    }

    /// Radius of a Euclidean ball around the center guaranteed to contain the set,
    /// or `None` when no bound is known (polytopes).
    pub fn bounding_radius(&self, dim: usize) -> Option<f64> {
        match self {
            SetDescriptor::Ball { p, gamma } => {
                if p.is_infinite() {
                    Some(gamma * (dim as f64).sqrt())
                } else {
                    // ‖·‖₂ ≤ ‖·‖_p for p ≤ 2
                    Some(*gamma)
                }
            }
            SetDescriptor::Polytope { .. } => None,
        }
    }
}

/// Answer of a separation oracle for `U(x)` at a query `z`.
#[derive(Debug, Clone, PartialEq)]
pub enum SeparationAnswer {
    Inside,
    /// `⟨normal, z'⟩ ≤ offset` for every `z' ∈ U(x)` while `⟨normal, z⟩ > offset`.
    Hyperplane { normal: Vec<f64>, offset: f64 },
}

/// Decide `z ∈ U(x)`, or return a hyperplane separating `z` from `U(x)`.
pub fn separation_oracle(desc: &SetDescriptor, x: &[f64], z: &[f64]) -> Result<SeparationAnswer> {
    let diff = sub(z, x);
    match desc {
        SetDescriptor::Ball { p, gamma } => {
            let p = *p;
            if !(p == 1.0 || p == 2.0 || p.is_infinite()) {
                return Err(Error::UnsupportedGeometry(format!(
                    "no separation oracle for the l{p} ball"
                )));
            }
            if lp_norm(&diff, p) <= *gamma {
                return Ok(SeparationAnswer::Inside);
            }
            // normal is a subgradient of ‖· − x‖_p at z; its dual norm is 1
            let normal: Vec<f64> = if p == 2.0 {
                let n = lp_norm(&diff, 2.0);
                diff.iter().map(|d| d / n).collect()
            } else if p.is_infinite() {
                let mut j = 0;
                for (i, d) in diff.iter().enumerate() {
                    if d.abs() > diff[j].abs() {
                        j = i;
                    }
                }
                let mut n = vec![0.0; diff.len()];
                n[j] = diff[j].signum();
                n
            } else {
                diff.iter()
                    .map(|d| if *d == 0.0 { 0.0 } else { d.signum() })
                    .collect()
            };
            let offset = dot(&normal, x) + gamma;
            Ok(SeparationAnswer::Hyperplane { normal, offset })
        }
        SetDescriptor::Polytope { a, b } => {
            if a.len() != b.len() {
                return Err(Error::UnsupportedGeometry(
                    "polytope has mismatched A and b".into(),
                ));
            }
            let mut worst: Option<(usize, f64)> = None;
            for (i, (row, bi)) in a.iter().zip(b).enumerate() {
                if row.len() != x.len() {
                    return Err(Error::DimensionMismatch {
                        expected: x.len(),
                        found: row.len(),
                    });
                }
                let n = lp_norm(row, 2.0);
                if n == 0.0 {
                    continue;
                }
                let violation = (dot(row, &diff) - bi) / n;
                if violation > 0.0 && worst.is_none_or(|(_, v)| violation > v) {
                    worst = Some((i, violation));
                }
            }
            Ok(match worst {
                None => SeparationAnswer::Inside,
                Some((i, _)) => SeparationAnswer::Hyperplane {
                    normal: a[i].clone(),
                    offset: b[i] + dot(&a[i], x),
                },
            })
        }
    }
}

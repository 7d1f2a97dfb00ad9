use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, dual_exponent, is_zero, lp_norm};
use crate::robust::sample::Label;

/// Anything that maps a point to a label.
pub trait Classifier {
    fn predict(&self, x: &[f64]) -> Label;

    /// Exact robust loss against the closed `ℓp` ball of radius `gamma` around `x`.
    ///
    /// Only predictors with a tractable worst case implement this; finite
    /// perturbation sets never need it since they can be enumerated.
    fn ball_loss(&self, _x: &[f64], _y: Label, _p: f64, _gamma: f64) -> Result<bool> {
        Err(Error::Unsupported(
            "robust loss over an lp ball is only available for linear models and cascades".into(),
        ))
    }
}

impl<C: Classifier + ?Sized> Classifier for &C {
    fn predict(&self, x: &[f64]) -> Label {
        (**self).predict(x)
    }
    fn ball_loss(&self, x: &[f64], y: Label, p: f64, gamma: f64) -> Result<bool> {
        (**self).ball_loss(x, y, p, gamma)
    }
}

impl<C: Classifier + ?Sized> Classifier for Box<C> {
    fn predict(&self, x: &[f64]) -> Label {
        (**self).predict(x)
    }
    fn ball_loss(&self, x: &[f64], y: Label, p: f64, gamma: f64) -> Result<bool> {
        (**self).ball_loss(x, y, p, gamma)
    }
}

/// Affine halfspace `x ↦ sign(⟨w, x⟩ + bias)`.
///
/// A zero `w` is allowed and denotes the constant predictor `sign(bias)`;
/// margins reject it with [`Error::ZeroWeight`], while its robust loss is its plain error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub w: Vec<f64>,
    pub bias: f64,
}

impl LinearModel {
    pub fn new(w: Vec<f64>, bias: f64) -> Self {
        LinearModel { w, bias }
    }

    pub fn homogeneous(w: Vec<f64>) -> Self {
        LinearModel { w, bias: 0.0 }
    }

    pub fn constant(dim: usize, label: Label) -> Self {
        LinearModel {
            w: vec![0.0; dim],
            bias: label.value(),
        }
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    pub fn is_constant(&self) -> bool {
        is_zero(&self.w)
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        dot(&self.w, x) + self.bias
    }

    fn dual_norm(&self, p: f64) -> Result<f64> {
        let q = dual_exponent(p)?;
        let n = lp_norm(&self.w, q);
        if n == 0.0 {
            Err(Error::ZeroWeight)
        } else {
            Ok(n)
        }
    }

    /// Signed distance-like margin `(⟨w,x⟩ + bias) / ‖w‖_q` with `q` dual to `p`.
    pub fn margin(&self, x: &[f64], p: f64) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(self.score(x) / self.dual_norm(p)?)
    }
}

impl Classifier for LinearModel {
    fn predict(&self, x: &[f64]) -> Label {
        Label::from_score(self.score(x))
    }

    fn ball_loss(&self, x: &[f64], y: Label, p: f64, gamma: f64) -> Result<bool> {
        if self.is_constant() {
            check_dim(self.dim(), x.len())?;
            return Ok(self.predict(x) != y);
        }
        Ok(y.value() * self.margin(x, p)? <= gamma)
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Unweighted majority vote; ties go to +1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorityVote<H> {
    pub members: Vec<H>,
}

impl<H: Classifier> MajorityVote<H> {
    pub fn new(members: Vec<H>) -> Self {
        MajorityVote { members }
    }

    /// Fraction of members predicting `y` at `x`.
    pub fn agreement(&self, x: &[f64], y: Label) -> f64 {
        if self.members.is_empty() {
            return 0.0;
        }
        let hits = self.members.iter().filter(|h| h.predict(x) == y).count();
        hits as f64 / self.members.len() as f64
    }
}

impl<H: Classifier> Classifier for MajorityVote<H> {
    fn predict(&self, x: &[f64]) -> Label {
        let votes: i64 = self.members.iter().map(|h| h.predict(x).as_i8() as i64).sum();
        Label::from_score(votes as f64)
    }
}

/// Weighted majority vote; ties go to +1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedVote<H> {
    pub members: Vec<H>,
    pub weights: Vec<f64>,
}

impl<H: Classifier> Classifier for WeightedVote<H> {
    fn predict(&self, x: &[f64]) -> Label {
        let (mut pos, mut neg) = (0.0, 0.0);
        for (h, w) in self.members.iter().zip(&self.weights) {
            match h.predict(x) {
                Label::Pos => pos += w,
                Label::Neg => neg += w,
            }
        }
        if pos >= neg {
            Label::Pos
        } else {
            Label::Neg
        }
    }
}

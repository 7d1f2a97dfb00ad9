use serde::{Deserialize, Serialize};

use crate::linalg::dot;
use crate::robust::{Label, LinearModel};

/// A conservative online learner: it changes state only on a mistake.
pub trait OnlineLearner {
    fn predict(&self, x: &[f64]) -> Label;
    /// Feed `(x, y)`; returns whether the state changed.
    fn update(&mut self, x: &[f64], y: Label) -> bool;
    fn mistakes(&self) -> usize;
    fn model(&self) -> LinearModel;
}

/// Homogeneous perceptron.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerceptronState {
    pub w: Vec<f64>,
    pub mistakes: usize,
}

impl PerceptronState {
    pub fn new(dim: usize) -> Self {
        PerceptronState {
            w: vec![0.0; dim],
            mistakes: 0,
        }
    }

    pub fn from_weights(w: Vec<f64>) -> Self {
        PerceptronState { w, mistakes: 0 }
    }
}

/// `w ← w + y·z` when `sign(⟨w,z⟩) ≠ y` (with `sign(0) = +1`); otherwise unchanged.
pub fn perceptron_update(state: &mut PerceptronState, z: &[f64], y: Label) -> bool {
    if Label::from_score(dot(&state.w, z)) == y {
        return false;
    }
    for (wj, zj) in state.w.iter_mut().zip(z) {
        *wj += y.value() * zj;
    }
    state.mistakes += 1;
    true
}

/// Classical mistake bound `⌈(R/γ)²⌉`.
pub fn perceptron_mistake_cap(radius: f64, margin: f64) -> usize {
    ((radius / margin).powi(2)).ceil() as usize
}

impl OnlineLearner for PerceptronState {
    fn predict(&self, x: &[f64]) -> Label {
        Label::from_score(dot(&self.w, x))
    }

    fn update(&mut self, x: &[f64], y: Label) -> bool {
        perceptron_update(self, x, y)
    }

    fn mistakes(&self) -> usize {
        self.mistakes
    }

    fn model(&self) -> LinearModel {
        LinearModel::homogeneous(self.w.clone())
    }
}

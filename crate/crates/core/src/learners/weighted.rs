use crate::error::{Error, Result};
use crate::robust::{check_dim, Classifier, Dataset, LinearModel, Sample};

/// Samples paired with non-negative weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDataset {
    samples: Vec<Sample>,
    weights: Vec<f64>,
    dim: usize,
}

impl WeightedDataset {
    pub fn new(samples: Vec<Sample>, weights: Vec<f64>, dim: usize) -> Result<Self> {
        if samples.len() != weights.len() {
            return Err(Error::InvalidParameter(format!(
                "{} samples but {} weights",
                samples.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter(format!("weight {w} is not a finite non-negative number")));
        }
        for s in &samples {
            check_dim(dim, s.x.len())?;
        }
        Ok(WeightedDataset { samples, weights, dim })
    }

    pub fn uniform(data: &Dataset) -> Self {
        WeightedDataset {
            samples: data.samples().to_vec(),
            weights: vec![1.0; data.len()],
            dim: data.dim(),
        }
    }

    pub fn from_dataset(data: &Dataset, weights: Vec<f64>) -> Result<Self> {
        Self::new(data.samples().to_vec(), weights, data.dim())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Sample, f64)> {
        self.samples.iter().zip(self.weights.iter().copied())
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Fails with `AllZeroWeights` when there is nothing to train on.
    pub fn require_mass(&self) -> Result<f64> {
        let t = self.total_weight();
        if t > 0.0 {
            Ok(t)
        } else {
            Err(Error::AllZeroWeights)
        }
    }

    /// Weighted 0-1 error normalized by the total weight.
    pub fn weighted_error<C: Classifier + ?Sized>(&self, clf: &C) -> Result<f64> {
        let total = self.require_mass()?;
        let wrong: f64 = self
            .iter()
            .filter(|(s, _)| clf.predict(&s.x) != s.y)
            .map(|(_, w)| w)
            .sum();
        Ok(wrong / total)
    }
}

/// A learner trained on weighted examples: the ERM oracle consumed by
/// boosting, reductions and redaction.
pub trait WeightedLearner {
    fn fit(&self, data: &WeightedDataset) -> Result<LinearModel>;
}

impl<F> WeightedLearner for F
where
    F: Fn(&WeightedDataset) -> Result<LinearModel>,
{
    fn fit(&self, data: &WeightedDataset) -> Result<LinearModel> {
        self(data)
    }
}

/// A learner trained on an unweighted dataset.
pub trait DatasetLearner {
    fn fit_dataset(&self, data: &Dataset) -> Result<LinearModel>;
}

impl<F> DatasetLearner for F
where
    F: Fn(&Dataset) -> Result<LinearModel>,
{
    fn fit_dataset(&self, data: &Dataset) -> Result<LinearModel> {
        self(data)
    }
}

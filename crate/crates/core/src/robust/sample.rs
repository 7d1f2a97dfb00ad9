use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary label in {−1, +1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "-1")]
    Neg,
    #[serde(rename = "+1")]
    Pos,
}

impl Label {
    /// `sign(s)` with the tie `sign(0) = +1`.
    pub fn from_score(s: f64) -> Label {
        if s >= 0.0 {
            Label::Pos
        } else {
            Label::Neg
        }
    }

    pub fn from_i64(v: i64) -> Option<Label> {
        match v {
            1 => Some(Label::Pos),
            -1 => Some(Label::Neg),
            _ => None,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Label::Pos => 1.0,
            Label::Neg => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Label::Pos => 1,
            Label::Neg => -1,
        }
    }

    /// {−1,+1} → {0,1}.
    pub fn as_bit(self) -> f64 {
        match self {
            Label::Pos => 1.0,
            Label::Neg => 0.0,
        }
    }

    pub fn flip(self) -> Label {
        match self {
            Label::Pos => Label::Neg,
            Label::Neg => Label::Pos,
        }
    }
}

impl std::ops::Neg for Label {
    type Output = Label;
    fn neg(self) -> Label {
        self.flip()
    }
}

/// Output of a selective classifier: a label or an abstention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SelectiveLabel {
    #[serde(rename = "-1")]
    Neg,
    #[serde(rename = "+1")]
    Pos,
    Abstain,
}

impl From<Label> for SelectiveLabel {
    fn from(l: Label) -> Self {
        match l {
            Label::Pos => SelectiveLabel::Pos,
            Label::Neg => SelectiveLabel::Neg,
        }
    }
}

impl SelectiveLabel {
    pub fn label(self) -> Option<Label> {
        match self {
            SelectiveLabel::Pos => Some(Label::Pos),
            SelectiveLabel::Neg => Some(Label::Neg),
            SelectiveLabel::Abstain => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub x: Vec<f64>,
    pub y: Label,
}

impl Sample {
    pub fn new(x: Vec<f64>, y: Label) -> Self {
        Sample { x, y }
    }
}

/// Ordered labeled samples sharing one feature dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    samples: Vec<Sample>,
    dim: usize,
}

impl Dataset {
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        let dim = samples.first().map(|s| s.x.len()).ok_or(Error::EmptyDataset)?;
        Self::with_dim(samples, dim)
    }

    /// Like [`Dataset::new`], but allows an empty sample list.
    pub fn with_dim(samples: Vec<Sample>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        for s in &samples {
            if s.x.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: s.x.len(),
                });
            }
            if s.x.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter("non-finite feature value".into()));
            }
        }
        Ok(Dataset { samples, dim })
    }

    pub fn empty(dim: usize) -> Self {
        Dataset {
            samples: Vec::new(),
            dim,
        }
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

    pub fn iter(&self) -> std::slice::Iter<'_, Sample> {
        self.samples.iter()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        self.samples.iter().map(|s| s.x.clone()).collect()
    }

    pub fn push(&mut self, sample: Sample) -> Result<()> {
        if sample.x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: sample.x.len(),
            });
        }
        self.samples.push(sample);
        Ok(())
    }

    pub fn into_samples(self) -> Vec<Sample> {
        self.samples
    }
}

impl<'a> IntoIterator for &'a Dataset {
    type Item = &'a Sample;
    type IntoIter = std::slice::Iter<'a, Sample>;
    fn into_iter(self) -> Self::IntoIter {
        self.samples.iter()
    }
}

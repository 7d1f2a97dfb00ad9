use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{add, check_exponent, is_zero, sub};
use crate::robust::sample::{Dataset, Sample};

/// The perturbation set `U(x)` an adversary may move an example within.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PerturbationSpec {
    /// Closed `ℓp` ball of radius `gamma` around `x`.
    LpBall { p: f64, gamma: f64 },
    /// `U(x) = {x + o : o ∈ offsets}`; the zero offset is always present.
    FiniteOffsets { offsets: Vec<Vec<f64>> },
    /// Explicit perturbation points per example index.
    FinitePerExample { points: BTreeMap<usize, Vec<Vec<f64>>> },
}

impl PerturbationSpec {
    pub fn lp_ball(p: f64, gamma: f64) -> Result<Self> {
        check_exponent(p)?;
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!("radius must be >= 0, got {gamma}")));
        }
        Ok(PerturbationSpec::LpBall { p, gamma })
    }

    /// Offsets are deduplicated; the zero offset is added when missing.
    pub fn finite_offsets(offsets: Vec<Vec<f64>>) -> Result<Self> {
        let dim = offsets
            .first()
            .map(|o| o.len())
            .ok_or_else(|| Error::InvalidParameter("offset list is empty".into()))?;
        if offsets.iter().any(|o| o.len() != dim) {
            return Err(Error::InvalidParameter("offsets differ in dimension".into()));
        }
        let mut offsets = dedup_points(offsets);
        if !offsets.iter().any(|o| is_zero(o)) {
            offsets.insert(0, vec![0.0; dim]);
        }
        Ok(PerturbationSpec::FiniteOffsets { offsets })
    }

    pub fn finite_per_example(points: BTreeMap<usize, Vec<Vec<f64>>>) -> Result<Self> {
        if let Some((i, _)) = points.iter().find(|(_, v)| v.is_empty()) {
            return Err(Error::InvalidParameter(format!(
                "perturbation set of example {i} is empty"
            )));
        }
        Ok(PerturbationSpec::FinitePerExample { points })
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, PerturbationSpec::LpBall { .. })
    }

    /// Enumerate `U(x)` for the example at `index`. Fails for balls.
    pub fn points(&self, index: usize, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        match self {
            PerturbationSpec::LpBall { .. } => Err(Error::Unsupported(
                "an lp ball cannot be enumerated".into(),
            )),
            PerturbationSpec::FiniteOffsets { offsets } => {
                if let Some(o) = offsets.first() {
                    if o.len() != x.len() {
                        return Err(Error::DimensionMismatch {
                            expected: o.len(),
                            found: x.len(),
                        });
                    }
                }
                Ok(offsets.iter().map(|o| add(x, o)).collect())
            }
            PerturbationSpec::FinitePerExample { points } => points
                .get(&index)
                .cloned()
                .ok_or(Error::MissingPerturbations { index }),
        }
    }

    /// Largest `|U(x)|` over examples (1 for balls is meaningless, so balls fail).
    pub fn max_size(&self) -> Result<usize> {
        match self {
            PerturbationSpec::LpBall { .. } => {
                Err(Error::Unsupported("an lp ball is not finite".into()))
            }
            PerturbationSpec::FiniteOffsets { offsets } => Ok(offsets.len()),
            PerturbationSpec::FinitePerExample { points } => {
                Ok(points.values().map(|v| v.len()).max().unwrap_or(0))
            }
        }
    }
}

fn dedup_points(points: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(points.len());
    for p in points {
        // -0.0 and 0.0 are the same offset
        let p: Vec<f64> = p.into_iter().map(|v| if v == 0.0 { 0.0 } else { v }).collect();
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

/// The set `U⁻¹(U)(x)` of points sharing a perturbation with `x`.
///
/// Balls double their radius; offsets become the Minkowski sum `O ⊕ (−O)`,
/// deduplicated and sorted lexicographically.
pub fn inverse_blowup(spec: &PerturbationSpec) -> Result<PerturbationSpec> {
    match spec {
        PerturbationSpec::LpBall { p, gamma } => Ok(PerturbationSpec::LpBall {
            p: *p,
            gamma: 2.0 * gamma,
        }),
        PerturbationSpec::FiniteOffsets { offsets } => {
            let mut sums = Vec::with_capacity(offsets.len() * offsets.len());
            for a in offsets {
                for b in offsets {
                    sums.push(sub(a, b));
                }
            }
            let mut sums = dedup_points(sums);
            sums.sort_by(|a, b| {
                a.iter()
                    .zip(b)
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            Ok(PerturbationSpec::FiniteOffsets { offsets: sums })
        }
        PerturbationSpec::FinitePerExample { .. } => Err(Error::Unsupported(
            "U^-1(U) of a per-example perturbation list has no closed form".into(),
        )),
    }
}

/// A perturbed copy of a training example, remembering where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedSample {
    pub sample: Sample,
    pub origin: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InflatedDataset {
    pub dim: usize,
    pub items: Vec<TaggedSample>,
}

impl InflatedDataset {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn to_dataset(&self) -> Dataset {
        Dataset::with_dim(self.items.iter().map(|t| t.sample.clone()).collect(), self.dim)
            .expect("inflation preserves dimension")
    }
}

/// Default cap on the size of an inflated dataset.
pub const DEFAULT_INFLATION_CAP: usize = 5_000_000;

/// Replace every `(x_i, y_i)` by `{(z, y_i) : z ∈ U(x_i)}`, tagging each copy with `i`.
pub fn inflate(data: &Dataset, spec: &PerturbationSpec, cap: usize) -> Result<InflatedDataset> {
    let size: usize = match spec {
        PerturbationSpec::LpBall { .. } => {
            return Err(Error::Unsupported("cannot inflate by an lp ball".into()))
        }
        PerturbationSpec::FiniteOffsets { offsets } => offsets.len() * data.len(),
        PerturbationSpec::FinitePerExample { points } => (0..data.len())
            .map(|i| points.get(&i).map(|v| v.len()).ok_or(Error::MissingPerturbations { index: i }))
            .sum::<Result<usize>>()?,
    };
    if size > cap {
        return Err(Error::SizeLimit { size, cap });
    }
    let mut items = Vec::with_capacity(size);
    for (i, s) in data.iter().enumerate() {
        for z in spec.points(i, &s.x)? {
            if z.len() != data.dim() {
                return Err(Error::DimensionMismatch {
                    expected: data.dim(),
                    found: z.len(),
                });
            }
            items.push(TaggedSample {
                sample: Sample::new(z, s.y),
                origin: i,
            });
        }
    }
    Ok(InflatedDataset {
        dim: data.dim(),
        items,
    })
}

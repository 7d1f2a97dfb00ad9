use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, lp_norm};
use crate::rng::{Rng, SeedStream};
use crate::robust::{Dataset, Label, Sample, SampleSource};

/// One cluster of a [`GenKind::MarginUnion`].
///
/// Points are `center + y·margin·normal + spread·ξ` with `ξ` standard normal
/// noise projected orthogonally to `normal`, so the halfspace through
/// `center` with normal `normal` sees every point at margin exactly `margin`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub center: Vec<f64>,
    pub normal: Vec<f64>,
    pub margin: f64,
    pub spread: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GenKind {
    /// Isotropic Gaussians around `pos_center` (label +1) and `neg_center` (−1).
    GaussianPair {
        pos_center: Vec<f64>,
        neg_center: Vec<f64>,
        sigma: f64,
    },
    /// Two interleaving half circles in the plane, Gaussian jitter `noise`.
    TwoMoons { noise: f64 },
    MarginUnion { clusters: Vec<Cluster> },
    /// Unit-ball points with an `ℓ2` margin of at least `gamma` to a random
    /// homogeneous halfspace.
    PlantedHalfspace { dim: usize, gamma: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub kind: GenKind,
    pub n: usize,
    pub seed: u64,
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        self.kind.validate()
    }
}

impl GenKind {
    pub fn dim(&self) -> usize {
        match self {
            GenKind::GaussianPair { pos_center, .. } => pos_center.len(),
            GenKind::TwoMoons { .. } => 2,
            GenKind::MarginUnion { clusters } => clusters.first().map_or(0, |c| c.center.len()),
            GenKind::PlantedHalfspace { dim, .. } => *dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        match self {
            GenKind::GaussianPair {
                pos_center,
                neg_center,
                sigma,
            } => {
                if pos_center.is_empty() || pos_center.len() != neg_center.len() {
                    return bad("gaussian centers must be non-empty and of equal dimension");
                }
                if !(*sigma >= 0.0) {
                    return bad("sigma must be >= 0");
                }
            }
            GenKind::TwoMoons { noise } => {
                if !(*noise >= 0.0) {
                    return bad("noise must be >= 0");
                }
            }
            GenKind::MarginUnion { clusters } => {
                let Some(first) = clusters.first() else {
                    return bad("margin union needs at least one cluster");
                };
                let d = first.center.len();
                for c in clusters {
                    if d == 0 || c.center.len() != d || c.normal.len() != d {
                        return bad("cluster centers and normals must share one dimension");
                    }
                    if lp_norm(&c.normal, 2.0) == 0.0 {
                        return bad("cluster normal must be non-zero");
                    }
                    if !(c.spread >= 0.0) || !(c.weight > 0.0) || !(c.margin >= 0.0) {
                        return bad("cluster spread, margin must be >= 0 and weight > 0");
                    }
                }
            }
            GenKind::PlantedHalfspace { dim, gamma } => {
                if *dim == 0 || !(*gamma >= 0.0 && *gamma < 1.0) {
                    return bad("planted halfspace needs dim >= 1 and gamma in [0, 1)");
                }
            }
        }
        Ok(())
    }
}

/// Draw `spec.n` points; identical specs give identical datasets.
pub fn generate(spec: &GenSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut src = GeneratorSource::new(spec.kind.clone(), SeedStream::new(spec.seed))?;
    let samples: Vec<Sample> = (0..spec.n).map(|_| src.sample()).collect();
    Dataset::with_dim(samples, spec.kind.dim())
}

/// The separator a planted-halfspace spec draws its labels from.
pub fn planted_normal(dim: usize, seeds: &SeedStream) -> Vec<f64> {
    let mut rng = seeds.rng("planted-normal");
    unit_gaussian(dim, &mut rng)
}

/// Endless i.i.d. source for a generator kind.
#[derive(Debug, Clone)]
pub struct GeneratorSource {
    kind: GenKind,
    rng: Rng,
    normals: Vec<Vec<f64>>,
    cum_weights: Vec<f64>,
}

impl GeneratorSource {
    pub fn new(kind: GenKind, seeds: SeedStream) -> Result<Self> {
        Self::with_streams(kind, &seeds, &seeds)
    }

    /// Fixed parts of the distribution (the planted normal) come from
    /// `distribution`, the draws from `draws`. Sources sharing `distribution`
    /// sample the same distribution independently.
    pub fn with_streams(kind: GenKind, distribution: &SeedStream, draws: &SeedStream) -> Result<Self> {
        kind.validate()?;
        let seeds = distribution;
        let (normals, cum_weights) = match &kind {
            GenKind::MarginUnion { clusters } => {
                let normals = clusters
                    .iter()
                    .map(|c| {
                        let n = lp_norm(&c.normal, 2.0);
                        c.normal.iter().map(|v| v / n).collect()
                    })
                    .collect();
                let mut acc = 0.0;
                let cum = clusters
                    .iter()
                    .map(|c| {
                        acc += c.weight;
                        acc
                    })
                    .collect();
                (normals, cum)
            }
            GenKind::PlantedHalfspace { dim, .. } => (vec![planted_normal(*dim, seeds)], vec![]),
            _ => (vec![], vec![]),
        };
        Ok(GeneratorSource {
            kind,
            rng: draws.rng("generator"),
            normals,
            cum_weights,
        })
    }

    fn sample(&mut self) -> Sample {
        let rng = &mut self.rng;
        let label = if rng.random::<bool>() { Label::Pos } else { Label::Neg };
        let y = label.value();
        match &self.kind {
            GenKind::GaussianPair {
                pos_center,
                neg_center,
                sigma,
            } => {
                let c = if label == Label::Pos { pos_center } else { neg_center };
                let x = c
                    .iter()
                    .map(|v| v + sigma * rng.sample::<f64, _>(StandardNormal))
                    .collect();
                Sample::new(x, label)
            }
            GenKind::TwoMoons { noise } => {
                let t = rng.random::<f64>() * std::f64::consts::PI;
                let (a, b) = if label == Label::Neg {
                    (t.cos(), t.sin())
                } else {
                    (1.0 - t.cos(), 0.5 - t.sin())
                };
                let x = vec![
                    a + noise * rng.sample::<f64, _>(StandardNormal),
                    b + noise * rng.sample::<f64, _>(StandardNormal),
                ];
                Sample::new(x, label)
            }
            GenKind::MarginUnion { clusters } => {
                let total = *self.cum_weights.last().expect("validated non-empty");
                let r = rng.random::<f64>() * total;
                let k = self
                    .cum_weights
                    .iter()
                    .position(|c| r < *c)
                    .unwrap_or(clusters.len() - 1);
                let c = &clusters[k];
                let normal = &self.normals[k];
                let mut xi: Vec<f64> = (0..normal.len())
                    .map(|_| rng.sample::<f64, _>(StandardNormal))
                    .collect();
                let along = dot(&xi, normal);
                xi.iter_mut().zip(normal).for_each(|(v, nj)| *v -= along * nj);
                let x = c
                    .center
                    .iter()
                    .zip(normal)
                    .zip(&xi)
                    .map(|((cj, nj), e)| cj + y * c.margin * nj + c.spread * e)
                    .collect();
                Sample::new(x, label)
            }
            GenKind::PlantedHalfspace { dim, gamma } => {
                let w = &self.normals[0];
                let s = gamma + (1.0 - gamma) * rng.random::<f64>();
                let mut dir = unit_gaussian(*dim, rng);
                let along = dot(&dir, w);
                dir.iter_mut().zip(w).for_each(|(v, wj)| *v -= along * wj);
                let dn = lp_norm(&dir, 2.0);
                let radial = (1.0 - s * s).max(0.0).sqrt() * rng.random::<f64>();
                let x = w
                    .iter()
                    .zip(&dir)
                    .map(|(wj, v)| y * s * wj + if dn > 0.0 { radial * v / dn } else { 0.0 })
                    .collect();
                Sample::new(x, label)
            }
        }
    }
}

impl SampleSource for GeneratorSource {
    fn dim(&self) -> usize {
        self.kind.dim()
    }

    fn next_sample(&mut self) -> Option<Sample> {
        Some(self.sample())
    }
}

fn unit_gaussian(dim: usize, rng: &mut Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let n = lp_norm(&v, 2.0);
        if n > 1e-12 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

/// Flip every label independently with probability `eta`.
pub fn apply_rcn(data: &Dataset, eta: f64, seed: u64) -> Result<Dataset> {
    if !(0.0..0.5).contains(&eta) {
        return Err(Error::InvalidParameter("eta must lie in [0, 0.5)".into()));
    }
    let mut rng = SeedStream::new(seed).rng("rcn");
    let samples = data
        .iter()
        .map(|s| {
            let flip = rng.random::<f64>() < eta;
            Sample::new(s.x.clone(), if flip { s.y.flip() } else { s.y })
        })
        .collect();
    Dataset::with_dim(samples, data.dim())
}

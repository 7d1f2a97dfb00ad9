use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::robust::{check_dim, Classifier, Dataset, Label, LinearModel, PerturbationSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolMode {
    Realizable,
    Agnostic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransductiveOutput {
    pub index: usize,
    pub model: LinearModel,
    pub labels: Vec<Label>,
    /// Fraction of training points with some preimage `h` mislabels.
    pub train_loss: f64,
    /// Fraction of test points whose preimage set `h` splits.
    pub test_loss: f64,
}

/// Per-point `U⁻¹` losses of `h`: train is wrong somewhere on `U⁻¹(z)`, test is not constant there.
fn losses(h: &LinearModel, train: &Dataset, test: &[Vec<f64>], spec: &PerturbationSpec) -> Result<(f64, f64)> {
    let (bad_train, bad_test) = match spec {
        PerturbationSpec::LpBall { p, gamma } => {
            if h.is_constant() {
                let bad = train.iter().filter(|s| h.predict(&s.x) != s.y).count();
                (bad, 0)
            } else {
                let mut bt = 0;
                for s in train.iter() {
                    if s.y.value() * h.margin(&s.x, *p)? <= *gamma {
                        bt += 1;
                    }
                }
                let mut bq = 0;
                for x in test {
                    if h.margin(x, *p)?.abs() <= *gamma {
                        bq += 1;
                    }
                }
                (bt, bq)
            }
        }
        PerturbationSpec::FiniteOffsets { offsets } => {
            let pre = |z: &[f64]| -> Vec<Label> {
                offsets
                    .iter()
                    .map(|o| {
                        let x: Vec<f64> = z.iter().zip(o).map(|(a, b)| a - b).collect();
                        h.predict(&x)
                    })
                    .collect()
            };
            let bt = train.iter().filter(|s| pre(&s.x).iter().any(|l| *l != s.y)).count();
            let bq = test
                .iter()
                .filter(|z| pre(z).windows(2).any(|w| w[0] != w[1]))
                .count();
            (bt, bq)
        }
        PerturbationSpec::FinitePerExample { .. } => {
            return Err(Error::Unsupported("preimages of per-example sets are undefined for test points".into()))
        }
    };
    Ok((
        bad_train as f64 / train.len().max(1) as f64,
        bad_test as f64 / test.len().max(1) as f64,
    ))
}

/// Transductive learner over a finite pool.
///
/// Realizable mode returns the first member with zero loss on both sides;
/// agnostic mode minimizes the larger of the two losses, lowest index on ties.
pub fn transductive_pool(
    pool: &[LinearModel],
    train: &Dataset,
    test: &[Vec<f64>],
    spec: &PerturbationSpec,
    mode: PoolMode,
) -> Result<TransductiveOutput> {
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    for x in test {
        check_dim(train.dim(), x.len())?;
    }
    let mut best: Option<(usize, f64, f64)> = None;
    for (i, h) in pool.iter().enumerate() {
        check_dim(train.dim(), h.dim())?;
        let (lt, lq) = losses(h, train, test, spec)?;
        match mode {
            PoolMode::Realizable => {
                if lt == 0.0 && lq == 0.0 {
                    best = Some((i, lt, lq));
                    break;
                }
            }
            PoolMode::Agnostic => {
                if best.map_or(true, |b| lt.max(lq) < b.1.max(b.2)) {
                    best = Some((i, lt, lq));
                }
            }
        }
    }
    let (index, train_loss, test_loss) = best.ok_or(Error::NoRealizableMember)?;
    let model = pool[index].clone();
    Ok(TransductiveOutput {
        labels: test.iter().map(|x| model.predict(x)).collect(),
        index,
        model,
        train_loss,
        test_loss,
    })
}

use serde::{Deserialize, Serialize};

use crate::data::TradeoffRow;
use crate::error::{Error, Result};
use crate::learners::{WeightedDataset, WeightedLearner};
use crate::redaction::rejectron::RedactConfig;
use crate::redaction::selection::{Discriminators, SelectionSet};
use crate::robust::{check_dim, Classifier, Label, LinearModel, Sample};

/// `s(c, c') = dis_test(c, c') − Λ·dis_train(c, c')`, each normalized by its set size.
pub fn pair_score(
    c: &LinearModel,
    d: &LinearModel,
    train: &[Vec<f64>],
    test: &[Vec<f64>],
    selected: &[bool],
    lambda: f64,
) -> f64 {
    let dis_test = test
        .iter()
        .zip(selected)
        .filter(|(x, sel)| **sel && c.predict(x) != d.predict(x))
        .count();
    let dis_train = train.iter().filter(|x| c.predict(x) != d.predict(x)).count();
    dis_test as f64 / test.len().max(1) as f64 - lambda * dis_train as f64 / train.len().max(1) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct URejectronOutput {
    pub selection: SelectionSet,
    pub lambda: f64,
    pub scores: Vec<f64>,
}

fn check_points(train: &[Vec<f64>], test: &[Vec<f64>]) -> Result<usize> {
    let dim = train
        .first()
        .or(test.first())
        .map(|x| x.len())
        .ok_or(Error::EmptyDataset)?;
    for x in train.iter().chain(test) {
        check_dim(dim, x.len())?;
    }
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(dim)
}

/// Unlabeled redaction with an exhaustive pairwise search over `pool`.
///
/// Each round picks the pair `i < j` of largest [`pair_score`] (lowest
/// indices on ties) and removes the selected test points where it disagrees.
pub fn urejectron_pool(
    train: &[Vec<f64>],
    test: &[Vec<f64>],
    pool: &[LinearModel],
    cfg: &RedactConfig,
) -> Result<URejectronOutput> {
    cfg.validate()?;
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    let dim = check_points(train, test)?;
    let lambda = cfg.resolve_lambda(train.len(), dim);
    // member predictions, reused across rounds
    let on_train: Vec<Vec<Label>> = pool.iter().map(|h| train.iter().map(|x| h.predict(x)).collect()).collect();
    let on_test: Vec<Vec<Label>> = pool.iter().map(|h| test.iter().map(|x| h.predict(x)).collect()).collect();
    let n = train.len() as f64;
    let n_test = test.len().max(1) as f64;
    let mut selected = vec![true; test.len()];
    let mut pairs = Vec::new();
    let mut scores = Vec::new();
    for _ in 0..=cfg.max_rounds() {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..pool.len() {
            for j in i + 1..pool.len() {
                let dt = (0..test.len())
                    .filter(|k| selected[*k] && on_test[i][*k] != on_test[j][*k])
                    .count();
                let dn = (0..train.len()).filter(|k| on_train[i][*k] != on_train[j][*k]).count();
                let s = dt as f64 / n_test - lambda * dn as f64 / n;
                if best.map_or(true, |b| s > b.0) {
                    best = Some((s, i, j));
                }
            }
        }
        let Some((s, i, j)) = best else { break };
        scores.push(s);
        if s <= cfg.eps {
            break;
        }
        for (k, sel) in selected.iter_mut().enumerate() {
            if on_test[i][k] != on_test[j][k] {
                *sel = false;
            }
        }
        pairs.push((pool[i].clone(), pool[j].clone()));
    }
    Ok(URejectronOutput {
        selection: SelectionSet {
            base: None,
            discriminators: Discriminators::URejectron(pairs),
            eps: cfg.eps,
        },
        lambda,
        scores,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistinguisherOutput {
    pub distinguisher: LinearModel,
    pub threshold: f64,
    pub selection: SelectionSet,
    pub tradeoff: Vec<TradeoffRow>,
}

/// One-round unlabeled redaction with a train-versus-test distinguisher.
///
/// The learner separates train (−1, total weight 1) from test (+1, total
/// weight 1); test points scoring above a threshold are rejected. The chosen
/// threshold is the smallest one rejecting at most an ε fraction of train.
/// `labeled` supplies `h` and the test labels for the error column.
pub fn urejectron_distinguisher<E: WeightedLearner + ?Sized>(
    train: &[Vec<f64>],
    test: &[Vec<f64>],
    cfg: &RedactConfig,
    learner: &E,
    labeled: Option<(&LinearModel, &[Label])>,
) -> Result<DistinguisherOutput> {
    cfg.validate()?;
    let dim = check_points(train, test)?;
    if test.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if let Some((_, ys)) = labeled {
        if ys.len() != test.len() {
            return Err(Error::InvalidParameter("one label per test point required".into()));
        }
    }
    let mut samples = Vec::with_capacity(train.len() + test.len());
    let mut weights = Vec::with_capacity(samples.capacity());
    for x in train {
        samples.push(Sample::new(x.clone(), Label::Neg));
        weights.push(1.0 / train.len() as f64);
    }
    for x in test {
        samples.push(Sample::new(x.clone(), Label::Pos));
        weights.push(1.0 / test.len() as f64);
    }
    let dis = learner.fit(&WeightedDataset::new(samples, weights, dim)?)?;
    let scores: Vec<f64> = train.iter().chain(test).map(|x| dis.score(x)).collect();
    let mut sorted = scores.clone();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    // thresholds sit between consecutive distinct scores, so no point lies on one
    let mut cuts = vec![sorted[0] - 1.0];
    cuts.extend(sorted.windows(2).map(|w| w[0] + (w[1] - w[0]) / 2.0));
    cuts.push(sorted[sorted.len() - 1] + 1.0);
    // kept iff τ − score ≥ 0, i.e. the flipped shifted model votes +1
    let keeper = |t: f64| LinearModel::new(dis.w.iter().map(|v| -v).collect(), t - dis.bias);
    let wrong: Option<Vec<bool>> =
        labeled.map(|(h, ys)| test.iter().zip(ys).map(|(x, y)| h.predict(x) != *y).collect());
    let tradeoff: Vec<TradeoffRow> = cuts
        .iter()
        .map(|t| {
            let k = keeper(*t);
            let kp: Vec<bool> = train.iter().map(|x| k.predict(x) == Label::Pos).collect();
            let kq: Vec<bool> = test.iter().map(|x| k.predict(x) == Label::Pos).collect();
            let rej = |v: &[bool]| v.iter().filter(|kept| !**kept).count() as f64 / v.len() as f64;
            let err_q = wrong.as_ref().map(|w| {
                kq.iter().zip(w).filter(|(kept, bad)| **kept && **bad).count() as f64 / kq.len() as f64
            });
            TradeoffRow {
                threshold: *t,
                rej_p: rej(&kp),
                rej_q: rej(&kq),
                err_q,
            }
        })
        .collect();
    let threshold = tradeoff
        .iter()
        .find(|r| r.rej_p <= cfg.eps)
        .map(|r| r.threshold)
        .expect("the top threshold rejects nothing");
    let flipped = keeper(threshold);
    let selection = SelectionSet {
        base: None,
        discriminators: Discriminators::URejectron(vec![(flipped, LinearModel::constant(dim, Label::Pos))]),
        eps: cfg.eps,
    };
    Ok(DistinguisherOutput {
        distinguisher: dis,
        threshold,
        selection,
        tradeoff,
    })
}

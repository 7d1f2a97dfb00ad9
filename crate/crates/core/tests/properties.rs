use std::collections::BTreeMap;

use proptest::prelude::*;
use roblearn::boosting::{cascade_predict, Cascade, SelectiveClassifier};
use roblearn::data::{generate, read_csv, write_csv, GenKind, GenSpec};
use roblearn::learners::{
    glm_link_u, perceptron_update, PerceptronState, PoolErm, WeightedDataset, WeightedLearner,
};
use roblearn::oracles::{attack, ellipsoid_certify, separation_oracle, Certificate, EllipsoidConfig, SeparationAnswer, SetDescriptor};
use roblearn::reductions::{fms_agnostic, FmsConfig};
use roblearn::redaction::{transductive_pool, PoolMode};
use roblearn::robust::{
    robust_loss, robust_risk, Classifier, Dataset, Label, LinearModel,
    PerturbationSpec, Sample,
};

fn label(b: bool) -> Label {
    if b {
        Label::Pos
    } else {
        Label::Neg
    }
}

fn vec_in(d: usize, r: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-r..r, d)
}

fn wx(max_d: usize) -> impl Strategy<Value = (Vec<f64>, f64, Vec<f64>, bool)> {
    (1..=max_d).prop_flat_map(|d| (vec_in(d, 2.0), -1.0..1.0, vec_in(d, 3.0), any::<bool>()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn robust_loss_monotone_in_gamma((w, b, x, y) in wx(5), g1 in 0.0..2.0f64, g2 in 0.0..2.0f64, pinf in any::<bool>()) {
        prop_assume!(w.iter().any(|v| *v != 0.0));
        let p = if pinf { f64::INFINITY } else { 2.0 };
        let (lo, hi) = if g1 <= g2 { (g1, g2) } else { (g2, g1) };
        let h = LinearModel::new(w, b);
        let s = Sample::new(x, label(y));
        let a = robust_loss(&h, &s, 0, &PerturbationSpec::lp_ball(p, lo).unwrap()).unwrap();
        let c = robust_loss(&h, &s, 0, &PerturbationSpec::lp_ball(p, hi).unwrap()).unwrap();
        prop_assert!(a <= c);
    }

    #[test]
    fn attack_agrees_with_loss((w, b, x, y) in wx(4), gamma in 0.01..2.0f64, p in prop::sample::select(vec![1.0, 2.0, f64::INFINITY])) {
        prop_assume!(w.iter().any(|v| *v != 0.0));
        let h = LinearModel::new(w, b);
        let s = Sample::new(x.clone(), label(y));
        let spec = PerturbationSpec::lp_ball(p, gamma).unwrap();
        let loss = robust_loss(&h, &s, 0, &spec).unwrap();
        let z = attack(&h, &s, 0, &spec).unwrap();
        prop_assert_eq!(z.is_some(), loss == 1);
        if let Some(z) = z {
            let desc = SetDescriptor::Ball { p, gamma };
            // membership up to rounding at the boundary
            let inside = match separation_oracle(&desc, &x, &z).unwrap() {
                SeparationAnswer::Inside => true,
                SeparationAnswer::Hyperplane { .. } => {
                    let shrunk: Vec<f64> = x.iter().zip(&z).map(|(a, c)| a + (c - a) * (1.0 - 1e-9)).collect();
                    matches!(separation_oracle(&desc, &x, &shrunk).unwrap(), SeparationAnswer::Inside)
                }
            };
            prop_assert!(inside);
            prop_assert!(h.predict(&z) != s.y);
        }
    }

    #[test]
    fn zero_radius_risk_is_plain_error(w in vec_in(3, 1.0), b in -0.5..0.5f64, pts in prop::collection::vec((vec_in(3, 2.0), any::<bool>()), 1..30)) {
        prop_assume!(w.iter().any(|v| *v != 0.0));
        let h = LinearModel::new(w, b);
        let data = Dataset::new(pts.into_iter().map(|(x, y)| Sample::new(x, label(y))).collect()).unwrap();
        let err = data.iter().filter(|s| h.predict(&s.x) != s.y).count() as f64 / data.len() as f64;
        prop_assert_eq!(robust_risk(&h, &data, &PerturbationSpec::lp_ball(2.0, 0.0).unwrap()).unwrap(), err);
    }

    #[test]
    fn ellipsoid_certifier_matches_closed_form(w in vec_in(2, 1.0), x in vec_in(2, 2.0), y in any::<bool>(), gamma in 0.05..1.0f64, pinf in any::<bool>()) {
        prop_assume!(w.iter().any(|v| v.abs() > 0.05));
        let p = if pinf { f64::INFINITY } else { 2.0 };
        let h = LinearModel::homogeneous(w);
        let cfg = EllipsoidConfig::for_problem(2, gamma);
        let m = label(y).value() * h.margin(&x, p).unwrap();
        prop_assume!((m - gamma).abs() > 10.0 * cfg.volume_eps * 1e3);
        let cert = ellipsoid_certify(&h, &x, label(y), &SetDescriptor::Ball { p, gamma }, &cfg).unwrap();
        prop_assert_eq!(matches!(cert, Certificate::Robust), m > gamma);
    }

    #[test]
    fn perceptron_is_conservative(w in vec_in(3, 1.0), z in vec_in(3, 1.0), y in any::<bool>()) {
        let mut st = PerceptronState::new(3);
        st.w = w.clone();
        let before = st.w.clone();
        let correct = LinearModel::homogeneous(w).predict(&z) == label(y);
        let changed = perceptron_update(&mut st, &z, label(y));
        prop_assert_eq!(changed, !correct);
        if correct {
            prop_assert_eq!(st.w, before);
        }
    }

    #[test]
    fn glm_link_is_monotone(a in -3.0..3.0f64, b in -3.0..3.0f64, eta in 0.0..0.45f64, gamma in 0.1..1.0f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(glm_link_u(lo, eta, gamma) <= glm_link_u(hi, eta, gamma) + 1e-15);
    }

    #[test]
    fn csv_round_trip(pts in prop::collection::vec((vec_in(3, 1e6), any::<bool>()), 1..20)) {
        let data = Dataset::new(pts.into_iter().map(|(x, y)| Sample::new(x, label(y))).collect()).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &data).unwrap();
        prop_assert_eq!(read_csv(buf.as_slice()).unwrap(), data);
    }

    #[test]
    fn generators_are_seed_deterministic(seed in 0u64..1000, n in 1usize..50) {
        for kind in [
            GenKind::PlantedHalfspace { dim: 4, gamma: 0.3 },
            GenKind::GaussianPair { pos_center: vec![2.0, 0.0], neg_center: vec![-2.0, 0.0], sigma: 1.0 },
        ] {
            let spec = GenSpec { kind, n, seed };
            let a = generate(&spec).unwrap();
            prop_assert_eq!(a.len(), n);
            prop_assert_eq!(&a, &generate(&spec).unwrap());
        }
    }
}

const OFFSETS: [[f64; 2]; 3] = [[0.0, 0.0], [0.2, 0.0], [0.0, 0.2]];

/// Larger of: train points with a mislabeled preimage, test points whose preimages disagree.
fn preimage_score(h: &LinearModel, train: &Dataset, test: &[Vec<f64>], offs: &[[f64; 2]]) -> f64 {
    let pre = |z: &[f64]| -> Vec<Label> { offs.iter().map(|o| h.predict(&[z[0] - o[0], z[1] - o[1]])).collect() };
    let bt = train.iter().filter(|s| pre(&s.x).iter().any(|l| *l != s.y)).count() as f64 / train.len() as f64;
    let bq = test.iter().filter(|z| pre(z).iter().any(|l| *l != pre(z)[0])).count() as f64 / test.len() as f64;
    bt.max(bq)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cascade_respects_first_stage(ws in prop::collection::vec(vec_in(2, 1.0), 1..4), z in vec_in(2, 3.0), rho in 0.1..1.0f64) {
        prop_assume!(ws.iter().all(|w| w.iter().any(|v| v.abs() > 1e-3)));
        let stages: Vec<SelectiveClassifier> = ws
            .iter()
            .map(|w| SelectiveClassifier::new(LinearModel::homogeneous(w.clone()), PerturbationSpec::lp_ball(2.0, rho).unwrap()).unwrap())
            .collect();
        let c = Cascade::new(stages.clone(), LinearModel::homogeneous(ws[0].clone())).unwrap();
        let out = cascade_predict(&c, &z);
        if let Some(first) = stages.iter().find_map(|s| s.predict_selective(&z).label()) {
            prop_assert_eq!(out, first);
        }
    }

    #[test]
    fn fms_weights_positive_and_normalized(seed in 0u64..10_000) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let m = rng.random_range(2..6);
        let mut samples = Vec::new();
        let mut pts = BTreeMap::new();
        for i in 0..m {
            let x = rng.random_range(-1.0..1.0);
            samples.push(Sample::new(vec![x], label(rng.random_bool(0.5))));
            let k = rng.random_range(1..=3);
            pts.insert(i, (0..k).map(|_| vec![x + rng.random_range(-0.3..0.3)]).collect());
        }
        let data = Dataset::new(samples).unwrap();
        let spec = PerturbationSpec::finite_per_example(pts).unwrap();
        let pool = PoolErm::new((0..6).map(|t| LinearModel::new(vec![if t % 2 == 0 { 1.0 } else { -1.0 }], t as f64 * 0.1 - 0.3)).collect()).unwrap();
        let out = fms_agnostic(&data, &spec, &pool, &FmsConfig { rounds: Some(30), ..FmsConfig::default() }).unwrap();
        for i in 0..m {
            let p = out.weights.normalized(i);
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!(p.iter().all(|v| *v > 0.0));
            // weights only grow from their initial value of 1
            prop_assert!(out.weights.log_weights[i].iter().all(|l| *l >= 0.0));
        }
    }

    #[test]
    fn transductive_agnostic_is_the_pool_minimum(seed in 0u64..10_000) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let pool: Vec<LinearModel> = (0..8)
            .map(|_| LinearModel::new(vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)], rng.random_range(-0.5..0.5)))
            .collect();
        let train = Dataset::new((0..15).map(|_| Sample::new(vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)], label(rng.random_bool(0.5)))).collect()).unwrap();
        let test: Vec<Vec<f64>> = (0..10).map(|_| vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)]).collect();
        let offs = PerturbationSpec::finite_offsets(OFFSETS.iter().map(|o| o.to_vec()).collect()).unwrap();
        let out = transductive_pool(&pool, &train, &test, &offs, PoolMode::Agnostic).unwrap();
        let scores: Vec<f64> = pool.iter().map(|h| preimage_score(h, &train, &test, &OFFSETS)).collect();
        let best = scores.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert!((scores[out.index] - best).abs() < 1e-12);
        prop_assert_eq!(out.index, scores.iter().position(|s| (*s - best).abs() < 1e-12).unwrap());
    }
}

#[test]
fn weighted_erm_is_deterministic() {
    let data = generate(&GenSpec {
        kind: GenKind::PlantedHalfspace { dim: 3, gamma: 0.2 },
        n: 60,
        seed: 9,
    })
    .unwrap();
    let wd = WeightedDataset::uniform(&data);
    let erm = roblearn::learners::LinearErm::default();
    assert_eq!(erm.fit(&wd).unwrap(), erm.fit(&wd).unwrap());
}

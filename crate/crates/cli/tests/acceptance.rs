//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any fails. Expected values come from oracles written here,
//! independent of the library's own evaluation code.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use roblearn::boosting::{
    alpha_boost, beta_roboost, AlphaBoostConfig, AlphaMode, BoostConfig, LossKind,
};
use roblearn::data::{apply_rcn, generate, planted_normal, Cluster, GenKind, GenSpec, GeneratorSource};
use roblearn::learners::{
    glm_loss, glm_train, rcn_phi, rcn_train_md, svm_margin, LinearErm, PerceptronState, PoolErm,
    RcnConfig, SvmConfig,
};
use roblearn::oracles::{rerm_ellipsoid, EllipsoidConfig, SetDescriptor};
use roblearn::reductions::{cycle_robust, fms_agnostic, weighted_majority_robust, FmsConfig};
use roblearn::redaction::{rejectron, urejectron_distinguisher, Discriminators, RedactConfig, SelectionSet};
use roblearn::rng::{Rng as ChaCha, SeedStream};
use roblearn::robust::{
    robust_loss, robust_risk, Dataset, DatasetSource, Label, LinearModel, PerturbationSpec, Sample,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

// ---------- independent arithmetic ----------

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|v| v.abs()).sum()
}

fn sign(s: f64) -> f64 {
    if s >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn predict(h: &LinearModel, x: &[f64]) -> f64 {
    sign(dot(&h.w, x) + h.bias)
}

fn l2_margin(h: &LinearModel, x: &[f64]) -> f64 {
    (dot(&h.w, x) + h.bias) / norm2(&h.w)
}

fn label(v: f64) -> Label {
    if v >= 0.0 {
        Label::Pos
    } else {
        Label::Neg
    }
}

fn gauss(rng: &mut ChaCha) -> f64 {
    StandardNormal.sample(rng)
}

fn unit(rng: &mut ChaCha, d: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..d).map(|_| gauss(rng)).collect();
    let n = norm2(&v);
    v.into_iter().map(|x| x / n).collect()
}

fn rot(theta: f64) -> Vec<f64> {
    vec![theta.cos(), theta.sin()]
}

// ---------- 1 ----------

fn ball_point(rng: &mut ChaCha, x: &[f64], p: f64, gamma: f64) -> Vec<f64> {
    let d = x.len();
    if p.is_infinite() {
        x.iter().map(|v| v + gamma * rng.random_range(-1.0..=1.0)).collect()
    } else {
        let u = unit(rng, d);
        // half the draws on the sphere, half inside
        let r = if rng.random_bool(0.5) { 1.0 } else { rng.random::<f64>().powf(1.0 / d as f64) };
        x.iter().zip(&u).map(|(a, b)| a + gamma * r * b).collect()
    }
}

fn c1() -> Outcome {
    let start = Instant::now();
    let mut rng = SeedStream::new(1).rng("oracle-equivalence");
    let mut disagreements = 0;
    let mut losses = 0;
    for k in 0..1000 {
        let d = rng.random_range(1..=5);
        let p = if k % 2 == 0 { 2.0 } else { f64::INFINITY };
        let gamma = rng.random_range(1e-3..2.0);
        let w: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b = rng.random_range(-1.0..1.0);
        let x: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
        let y = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let h = LinearModel::new(w.clone(), b);
        let spec = PerturbationSpec::lp_ball(p, gamma).unwrap();
        let closed = robust_loss(&h, &Sample::new(x.clone(), label(y)), 0, &spec).unwrap() == 1;

        let wrong = |z: &[f64]| sign(dot(&w, z) + b) != y;
        // the dual direction of w: ⟨w, v⟩ = ‖w‖_q with ‖v‖_p = 1
        let v: Vec<f64> = if p.is_infinite() {
            w.iter().map(|c| if *c > 0.0 { 1.0 } else if *c < 0.0 { -1.0 } else { 0.0 }).collect()
        } else {
            let n = norm2(&w);
            w.iter().map(|c| c / n).collect()
        };
        let witness: Vec<f64> = x.iter().zip(&v).map(|(a, c)| a - gamma * y * c).collect();
        let mut brute = wrong(&witness);
        for _ in 0..10_000 {
            if brute {
                break;
            }
            brute = wrong(&ball_point(&mut rng, &x, p, gamma));
        }
        if closed != brute {
            disagreements += 1;
        }
        losses += closed as usize;
    }
    let t = start.elapsed();
    outcome(
        disagreements == 0 && t < Duration::from_secs(10),
        format!("{disagreements} disagreements over 1000 cases ({losses} losses), {t:.2?} of 10s"),
    )
}

// ---------- 2 ----------

fn margin_union() -> GenKind {
    let bn = (0.81f64 + 9.0).sqrt();
    GenKind::MarginUnion {
        clusters: vec![
            Cluster {
                center: vec![0.0, 0.0],
                normal: vec![1.0, 0.0],
                margin: 2.7,
                spread: 20.0,
                weight: 1.0,
            },
            Cluster {
                center: vec![0.0, 0.0],
                normal: vec![0.9 / bn, 3.0 / bn],
                margin: bn,
                spread: 0.05,
                weight: 1.0,
            },
        ],
    }
}

/// Cascade label at `z`: first stage with `|margin| > ρ` decides, else the fallback.
fn cascade_label(stages: &[(LinearModel, f64)], fallback: &LinearModel, z: &[f64]) -> f64 {
    for (h, rho) in stages {
        let m = l2_margin(h, z);
        if m.abs() > *rho {
            return sign(m);
        }
    }
    predict(fallback, z)
}

fn c2() -> Outcome {
    let start = Instant::now();
    let gamma = 1.0;
    let ball = PerturbationSpec::lp_ball(2.0, gamma).unwrap();
    let kind = margin_union();
    let mut ok = true;
    let mut notes = Vec::new();
    for seed in 0..5u64 {
        let test = generate(&GenSpec {
            kind: kind.clone(),
            n: 2000,
            seed: 1000 + seed,
        })
        .unwrap();
        let mut src = GeneratorSource::new(kind.clone(), SeedStream::new(seed)).unwrap();
        let learner = |d: &Dataset| svm_margin(d, gamma, 2.0, &SvmConfig::default()).map(|f| f.model);
        let mut cfg = BoostConfig::new(0.5, 0.1, 0.1, 1000);
        cfg.rounds = Some(3);
        let out = beta_roboost(&mut src, &learner, &cfg, &ball).unwrap();
        let stages: Vec<(LinearModel, f64)> = out
            .cascade
            .stages
            .iter()
            .map(|s| (s.model.clone(), s.radius().unwrap().1))
            .collect();

        // single model: robust iff y·margin > γ
        let single = &stages[0].0;
        let single_acc = test.iter().filter(|s| s.y.value() * l2_margin(single, &s.x) > gamma).count() as f64
            / test.len() as f64;
        let cascade_acc = 1.0 - robust_risk(&out.cascade, &test, &ball).unwrap();
        // dense sampling of each disk can only miss errors
        let mut brute_ok = 0;
        for s in test.iter() {
            let mut robust = true;
            'disk: for ring in [0.0, 0.25, 0.5, 0.75, 1.0] {
                let k = if ring == 0.0 { 1 } else { 96 };
                for a in 0..k {
                    let t = 2.0 * PI * a as f64 / k as f64;
                    let z = [s.x[0] + ring * gamma * t.cos(), s.x[1] + ring * gamma * t.sin()];
                    if cascade_label(&stages, &out.cascade.fallback, &z) != s.y.value() {
                        robust = false;
                        break 'disk;
                    }
                }
            }
            brute_ok += robust as usize;
        }
        let brute_acc = brute_ok as f64 / test.len() as f64;
        let cross = brute_acc + 1e-12 >= cascade_acc && brute_acc - cascade_acc <= 0.01;

        // all-stages-non-robust mass versus ∏(1 − β̂_s)
        let n_test = test.len() as f64;
        let mut prod = 1.0;
        let mut train_var = 0.0;
        let mut mass_ok = true;
        let mut masses = Vec::new();
        for (t, r) in out.rounds.iter().enumerate() {
            let b = r.beta_hat;
            prod *= 1.0 - b;
            train_var += b * (1.0 - b) / r.samples as f64 / ((1.0 - b) * (1.0 - b)).max(1e-12);
            let mass = test
                .iter()
                .filter(|s| stages[..=t].iter().all(|(h, rho)| l2_margin(h, &s.x).abs() <= gamma + rho))
                .count() as f64
                / n_test;
            let sigma = (prod * (1.0 - prod) / n_test + prod * prod * train_var).sqrt();
            mass_ok &= mass <= prod + 3.0 * sigma;
            masses.push(format!("{mass:.3}<={prod:.3}+3*{sigma:.3}"));
        }
        let beta1 = out.rounds[0].beta_hat;
        let gain = cascade_acc - single_acc;
        let pass = gain >= 0.15 && mass_ok && cross && (0.4..=0.6).contains(&beta1) && out.rounds.len() == 3;
        ok &= pass;
        notes.push(format!(
            "seed {seed}: beta1 {beta1:.3} single {single_acc:.3} cascade {cascade_acc:.3} (sampled {brute_acc:.3}) mass [{}]",
            masses.join(" ")
        ));
    }
    let t = start.elapsed();
    outcome(
        ok && t < Duration::from_secs(60),
        format!("{}; {t:.2?} of 60s", notes.join("; ")),
    )
}

// ---------- 3 ----------

fn c3() -> Outcome {
    let mut ok = 0;
    let mut worst: f64 = 1.0;
    for seed in 0..20u64 {
        let mut rng = SeedStream::new(seed).rng("alpha-data");
        let m = rng.random_range(30..=500);
        // coordinate k is flipped on about a third of the examples, so sign(x_k) errs there only
        let mut samples = Vec::with_capacity(m);
        for _ in 0..m {
            let y = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let g = rng.random_range(0..3);
            let x: Vec<f64> = (0..3)
                .map(|k| {
                    let s = rng.random_range(0.5..2.0);
                    if k == g {
                        -y * s
                    } else {
                        y * s
                    }
                })
                .collect();
            samples.push(Sample::new(x, label(y)));
        }
        let data = Dataset::new(samples).unwrap();
        let pool = PoolErm::new(vec![
            LinearModel::homogeneous(vec![1.0, 0.0, 0.0]),
            LinearModel::homogeneous(vec![0.0, 1.0, 0.0]),
            LinearModel::homogeneous(vec![0.0, 0.0, 1.0]),
        ])
        .unwrap();
        let cfg = AlphaBoostConfig::for_size(m, AlphaMode::Agreement);
        let Ok(out) = alpha_boost(&data, &pool, &cfg, &LossKind::ZeroOne) else {
            continue;
        };
        let t = out.models.len() as f64;
        let mut min_agree: f64 = 1.0;
        let mut maj_wrong = 0;
        for s in data.iter() {
            let right = out.models.iter().filter(|h| predict(h, &s.x) == s.y.value()).count() as f64;
            min_agree = min_agree.min(right / t);
            let votes: f64 = out.models.iter().map(|h| predict(h, &s.x)).sum();
            if sign(votes) != s.y.value() {
                maj_wrong += 1;
            }
        }
        worst = worst.min(min_agree);
        if min_agree >= 5.0 / 9.0 - 1e-12 && maj_wrong == 0 {
            ok += 1;
        }
    }
    outcome(ok == 20, format!("{ok}/20 runs, smallest vote agreement {worst:.4} (need 0.5556)"))
}

// ---------- 4 ----------

fn member(sel: &SelectionSet, x: &[f64]) -> bool {
    match &sel.discriminators {
        Discriminators::Rejectron(cs) => {
            let h = sel.base.as_ref().unwrap();
            cs.iter().all(|c| predict(c, x) == predict(h, x))
        }
        Discriminators::URejectron(pairs) => pairs.iter().all(|(c, d)| predict(c, x) == predict(d, x)),
    }
}

fn c4() -> Outcome {
    let eps = 0.1;
    let (mut a, mut b, mut c, mut d) = (0, 0, 0, 0);
    let mut max_rounds = 0;
    for seed in 0..50u64 {
        let mut rng = SeedStream::new(seed).rng("rejectron");
        let th = rng.random_range(0.0..2.0 * PI);
        let truth = LinearModel::homogeneous(rot(th));
        let pool = vec![
            LinearModel::homogeneous(rot(th + 0.1)),
            LinearModel::homogeneous(rot(th - 0.1)),
            LinearModel::homogeneous(rot(th + 0.6)),
            LinearModel::homogeneous(rot(th - 0.6)),
            LinearModel::homogeneous(rot(th + 1.5)),
            LinearModel::homogeneous(rot(th + PI)),
            truth.clone(),
        ];
        let erm = PoolErm::new(pool).unwrap();
        let mut train = Vec::new();
        while train.len() < 60 {
            let x = vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            if dot(&truth.w, &x).abs() >= 0.25 {
                let y = predict(&truth, &x);
                train.push(Sample::new(x, label(y)));
            }
        }
        let train = Dataset::new(train).unwrap();
        let h = {
            use roblearn::learners::{WeightedDataset, WeightedLearner};
            erm.fit(&WeightedDataset::uniform(&train)).unwrap()
        };
        let wedge = |rng: &mut ChaCha| loop {
            let x = vec![rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
            if predict(&h, &x) != predict(&truth, &x) {
                return x;
            }
        };
        let mut test: Vec<Vec<f64>> = (0..70)
            .map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
            .collect();
        test.extend((0..30).map(|_| wedge(&mut rng)));
        let cfg = RedactConfig::new(eps);
        let out = rejectron(&train, &test, &cfg, &erm).unwrap();
        max_rounds = max_rounds.max(out.rounds());
        a += (out.rounds() <= (1.0 / eps).floor() as usize) as usize;
        b += train.iter().all(|s| member(&out.selection, &s.x)) as usize;
        let dis = test
            .iter()
            .filter(|x| member(&out.selection, x) && predict(&out.h, x) != predict(&truth, x))
            .count() as f64
            / test.len() as f64;
        c += (dis <= eps) as usize;

        // half the test set is one misclassified point
        let star = wedge(&mut rng);
        let mut adv: Vec<Vec<f64>> = (0..50)
            .map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
            .collect();
        adv.extend(std::iter::repeat(star.clone()).take(50));
        let out = rejectron(&train, &adv, &cfg, &erm).unwrap();
        let err = adv
            .iter()
            .filter(|x| member(&out.selection, x) && predict(&out.h, x) != predict(&truth, x))
            .count() as f64
            / adv.len() as f64;
        d += (!member(&out.selection, &star) && err <= eps) as usize;
    }
    outcome(
        a == 50 && b == 50 && c == 50 && d == 50,
        format!("(a) {a}/50 with at most {max_rounds} rounds, (b) {b}/50, (c) {c}/50, (d) {d}/50"),
    )
}

// ---------- 5 ----------

fn c5() -> Outcome {
    let mut ok = 0;
    let mut notes = Vec::new();
    for seed in 0..10u64 {
        let mut rng = SeedStream::new(seed).rng("urejectron");
        let truth = LinearModel::homogeneous(vec![1.0, 0.5]);
        let p_point = |rng: &mut ChaCha| vec![gauss(rng), gauss(rng)];
        let train: Vec<Vec<f64>> = (0..300).map(|_| p_point(&mut rng)).collect();
        let train_ds = Dataset::new(
            train
                .iter()
                .map(|x| Sample::new(x.clone(), label(predict(&truth, x))))
                .collect(),
        )
        .unwrap();
        let h = {
            use roblearn::learners::{WeightedDataset, WeightedLearner};
            LinearErm::default().fit(&WeightedDataset::uniform(&train_ds)).unwrap()
        };
        // Q: half from P labeled by the truth, half a shifted cluster labeled against h
        let mut test = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..150 {
            let x = p_point(&mut rng);
            labels.push(label(predict(&truth, &x)));
            test.push(x);
        }
        for _ in 0..150 {
            let x = vec![5.0 + 0.5 * gauss(&mut rng), -5.0 + 0.5 * gauss(&mut rng)];
            labels.push(label(-predict(&h, &x)));
            test.push(x);
        }
        let out = urejectron_distinguisher(
            &train,
            &test,
            &RedactConfig::new(0.1),
            &LinearErm::default(),
            Some((&h, &labels)),
        )
        .unwrap();
        let dis = &out.distinguisher;
        let score = |x: &[f64]| dot(&dis.w, x) + dis.bias;
        let mut exists = false;
        let mut best = (1.0f64, 1.0f64);
        for r in &out.tradeoff {
            let kept: Vec<bool> = test.iter().map(|x| score(x) <= r.threshold).collect();
            let rej_p_half = kept[..150].iter().filter(|k| !**k).count() as f64 / 150.0;
            let n_kept = kept.iter().filter(|k| **k).count();
            let wrong = test
                .iter()
                .zip(&labels)
                .zip(&kept)
                .filter(|((x, y), k)| **k && predict(&h, x) != y.value())
                .count();
            let err_sel = if n_kept == 0 { 0.0 } else { wrong as f64 / n_kept as f64 };
            if rej_p_half <= 0.10 && err_sel <= 0.05 {
                exists = true;
                if rej_p_half + err_sel < best.0 + best.1 {
                    best = (rej_p_half, err_sel);
                }
            }
        }
        let rows = &out.tradeoff;
        let monotone = rows.windows(2).all(|w| {
            w[0].threshold < w[1].threshold
                && w[1].rej_p <= w[0].rej_p
                && w[1].rej_q <= w[0].rej_q
                && w[1].err_q.unwrap() >= w[0].err_q.unwrap()
        });
        if exists && monotone {
            ok += 1;
        }
        notes.push(format!("{:.3}/{:.3}", best.0, best.1));
    }
    outcome(
        ok == 10,
        format!("{ok}/10 mixtures with a threshold meeting both limits; best rej/err per seed [{}]", notes.join(" ")),
    )
}

// ---------- 6 ----------

fn c6() -> Outcome {
    let (gamma, eta, d) = (0.5, 0.2, 20);
    let mut passes = [0usize; 2];
    let mut times = [Duration::ZERO; 2];
    let mut errs = [Vec::new(), Vec::new()];
    for seed in 0..10u64 {
        let kind = GenKind::PlantedHalfspace { dim: d, gamma };
        // one draw split in two, so train and test share the planted normal
        let all = generate(&GenSpec { kind, n: 25_000, seed }).unwrap();
        let train = Dataset::new(all.iter().take(20_000).cloned().collect()).unwrap();
        let test = Dataset::new(all.iter().skip(20_000).cloned().collect()).unwrap();
        let noisy = apply_rcn(&train, eta, 77 + seed).unwrap();
        let cfg = RcnConfig {
            gamma,
            eta,
            eps: 0.1,
            q: 2.0,
            steps: 20_000,
        };
        for (k, algo) in ["md", "glm"].iter().enumerate() {
            let t = Instant::now();
            let mut src = DatasetSource::new(noisy.clone());
            let h = if *algo == "md" {
                rcn_train_md(&mut src, &cfg).unwrap()
            } else {
                glm_train(&mut src, &cfg).unwrap()
            };
            times[k] += t.elapsed();
            let bad = test
                .iter()
                .filter(|s| s.y.value() * dot(&h.w, &s.x) / norm2(&h.w) <= gamma / 2.0)
                .count() as f64
                / test.len() as f64;
            errs[k].push(format!("{bad:.3}"));
            passes[k] += (bad <= eta + 0.05) as usize;
        }
        // the planted separator itself must exist with the stated margin
        let w = planted_normal(d, &SeedStream::new(seed));
        assert!(train.iter().all(|s| s.y.value() * dot(&w, &s.x) >= gamma - 1e-9));
    }
    let pass = passes.iter().all(|p| *p >= 9) && times.iter().all(|t| *t < Duration::from_secs(60));
    outcome(
        pass,
        format!(
            "md {}/10 [{}] in {:.2?}; glm {}/10 [{}] in {:.2?}; limit 0.25",
            passes[0],
            errs[0].join(" "),
            times[0],
            passes[1],
            errs[1].join(" "),
            times[1]
        ),
    )
}

// ---------- 7 ----------

fn robust_loss_by_enumeration(
    vote: &dyn Fn(&[f64]) -> f64,
    data: &Dataset,
    points: &BTreeMap<usize, Vec<Vec<f64>>>,
) -> f64 {
    let bad = data
        .iter()
        .enumerate()
        .filter(|(i, s)| points[i].iter().any(|z| vote(z) != s.y.value()))
        .count();
    bad as f64 / data.len() as f64
}

fn c7() -> Outcome {
    let mut ok = 0;
    let mut gaps = Vec::new();
    for seed in 0..30u64 {
        let mut rng = SeedStream::new(seed).rng("fms");
        let m = rng.random_range(3..=8);
        let d = rng.random_range(1..=2);
        let pool: Vec<LinearModel> = (0..rng.random_range(5..=50))
            .map(|_| {
                let w: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
                LinearModel::new(w, rng.random_range(-0.5..0.5))
            })
            .collect();
        let mut samples = Vec::new();
        let mut points = BTreeMap::new();
        for i in 0..m {
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            let y = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let k = if i == 0 { 3 } else { rng.random_range(1..=3) };
            let zs: Vec<Vec<f64>> = (0..k)
                .map(|j| {
                    if j == 0 {
                        x.clone()
                    } else {
                        x.iter().map(|v| v + rng.random_range(-0.4..0.4)).collect()
                    }
                })
                .collect();
            points.insert(i, zs);
            samples.push(Sample::new(x, label(y)));
        }
        let data = Dataset::new(samples).unwrap();
        let spec = PerturbationSpec::finite_per_example(points.clone()).unwrap();
        let opt = pool
            .iter()
            .map(|h| robust_loss_by_enumeration(&|z| predict(h, z), &data, &points))
            .fold(f64::INFINITY, f64::min);
        let out = fms_agnostic(&data, &spec, &PoolErm::new(pool).unwrap(), &FmsConfig::default()).unwrap();
        let vote = |z: &[f64]| sign(out.models.iter().map(|h| predict(h, z)).sum::<f64>());
        let loss = robust_loss_by_enumeration(&vote, &data, &points);
        if loss <= 2.0 * opt + 0.1 + 1e-12 {
            ok += 1;
        }
        gaps.push(format!("{loss:.2}/{opt:.2}"));
    }
    outcome(ok == 30, format!("{ok}/30 instances; loss/OPT [{}]", gaps.join(" ")))
}

// ---------- 8 ----------

fn c8() -> Outcome {
    let mut ok = 0;
    let mut worst_ratio: f64 = 0.0;
    for seed in 0..20u64 {
        let d = 2 + (seed as usize % 4);
        let data = generate(&GenSpec {
            kind: GenKind::PlantedHalfspace { dim: d, gamma: 0.5 },
            n: 100,
            seed,
        })
        .unwrap();
        let attack_r = 0.2;
        let w_star = planted_normal(d, &SeedStream::new(seed));
        let r = data.iter().map(|s| norm2(&s.x)).fold(0.0, f64::max) + attack_r;
        let margin = data
            .iter()
            .map(|s| s.y.value() * dot(&w_star, &s.x) / norm2(&w_star))
            .fold(f64::INFINITY, f64::min)
            - attack_r;
        let cap = ((r / margin).powi(2)).ceil() as usize;
        let spec = PerturbationSpec::lp_ball(2.0, attack_r).unwrap();
        let mut learner = PerceptronState::new(d);
        let Ok(out) = cycle_robust(&data, &mut learner, &spec, cap) else {
            continue;
        };
        let certified = data
            .iter()
            .all(|s| s.y.value() * dot(&out.model.w, &s.x) - attack_r * norm2(&out.model.w) > 0.0);
        let calls_ok = out.oracle_calls <= data.len() * cap;
        worst_ratio = worst_ratio.max(out.oracle_calls as f64 / (data.len() * cap) as f64);
        ok += (certified && calls_ok) as usize;
    }
    outcome(
        ok == 20,
        format!("{ok}/20 seeds certified within budget; largest calls/(m*cap) {worst_ratio:.3}"),
    )
}

// ---------- 9 ----------

fn c9() -> Outcome {
    let mut runs = 0;
    let mut ok = 0;
    let mut tightest: f64 = 0.0;
    for eta in [0.3, 0.5, 0.7] {
        for size in [1usize, 10, 100] {
            for seed in 0..3u64 {
                runs += 1;
                let mut rng = SeedStream::new(seed).rng(&format!("wm-{eta}-{size}"));
                let pool: Vec<LinearModel> = (0..size)
                    .map(|_| LinearModel::new(rot(rng.random_range(0.0..2.0 * PI)), rng.random_range(-0.3..0.3)))
                    .collect();
                let leader = pool[rng.random_range(0..size)].clone();
                // points hug the leader's boundary; a few labels are flipped against it
                let mut samples = Vec::new();
                for t in 0..200 {
                    let mut x = vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
                    let m = l2_margin(&leader, &x);
                    let n = norm2(&leader.w);
                    let shrink = rng.random_range(0.0..0.5);
                    for (xj, wj) in x.iter_mut().zip(&leader.w) {
                        *xj -= (1.0 - shrink) * m * wj / n;
                    }
                    let mut y = predict(&leader, &x);
                    if t % 17 == 0 {
                        y = -y;
                    }
                    samples.push(Sample::new(x, label(y)));
                }
                let spec =
                    PerturbationSpec::finite_offsets(vec![vec![0.0, 0.0], vec![0.1, 0.0], vec![0.0, -0.1]]).unwrap();
                let data = Dataset::new(samples).unwrap();
                let out =
                    weighted_majority_robust(&pool, &mut DatasetSource::new(data), &spec, eta, None).unwrap();
                let opt = pool
                    .iter()
                    .map(|h| out.witnesses.iter().filter(|s| predict(h, &s.x) != s.y.value()).count())
                    .min()
                    .unwrap();
                let l = (2.0 / (1.0 + eta)).ln();
                let bound = (1.0 / eta).ln() / l * opt as f64 + (size as f64).ln() / l;
                let mistakes = out.witnesses.len();
                tightest = tightest.max(mistakes as f64 / bound.max(1e-12));
                ok += (mistakes as f64 <= bound + 1e-9 && mistakes == out.mistakes) as usize;
            }
        }
    }
    outcome(ok == runs, format!("{ok}/{runs} runs within the bound; largest mistakes/bound {tightest:.3}"))
}

// ---------- 10 ----------

fn c10() -> Outcome {
    let mut results = Vec::new();
    let mut all = true;
    for geometry in ["l2", "linf", "polytope"] {
        let mut ok = 0;
        let mut not_separable = 0;
        for seed in 0..50u64 {
            let mut rng = SeedStream::new(seed).rng(&format!("rerm-{geometry}"));
            let gamma = rng.random_range(0.05..0.2);
            let cfg = EllipsoidConfig::for_problem(2, gamma);
            let tau = cfg.feas_slack;
            let w_star = rot(rng.random_range(0.0..2.0 * PI));
            // worst-case drop of ⟨w*, z⟩ over U(x)
            let drop = match geometry {
                "l2" => gamma * norm2(&w_star),
                "linf" => gamma * norm1(&w_star),
                _ => gamma * w_star.iter().fold(0.0f64, |a, v| a.max(v.abs())),
            };
            let mut samples = Vec::new();
            while samples.len() < 20 {
                let x = vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
                let s = dot(&w_star, &x);
                if s.abs() >= drop + 2.0 * tau {
                    samples.push(Sample::new(x, label(s)));
                }
            }
            let data = Dataset::new(samples).unwrap();
            let desc = match geometry {
                "l2" => SetDescriptor::Ball { p: 2.0, gamma },
                "linf" => SetDescriptor::Ball { p: f64::INFINITY, gamma },
                // the ℓ1 diamond |z1| + |z2| ≤ γ as four facets
                _ => SetDescriptor::Polytope {
                    a: vec![vec![1.0, 1.0], vec![1.0, -1.0], vec![-1.0, 1.0], vec![-1.0, -1.0]],
                    b: vec![gamma; 4],
                },
            };
            let h = match rerm_ellipsoid(&data, |_| &desc, &cfg) {
                Ok(h) => h,
                Err(roblearn::Error::NotSeparable) => {
                    not_separable += 1;
                    continue;
                }
                Err(_) => continue,
            };
            let certified = data.iter().all(|s| {
                let y = s.y.value();
                match geometry {
                    "l2" => y * dot(&h.w, &s.x) - gamma * norm2(&h.w) > 0.0,
                    "linf" => y * dot(&h.w, &s.x) - gamma * norm1(&h.w) > 0.0,
                    _ => [[gamma, 0.0], [-gamma, 0.0], [0.0, gamma], [0.0, -gamma]]
                        .iter()
                        .all(|v| y * (h.w[0] * (s.x[0] + v[0]) + h.w[1] * (s.x[1] + v[1])) > 0.0),
                }
            });
            ok += certified as usize;
        }
        all &= ok == 50 && not_separable == 0;
        results.push(format!("{geometry} {ok}/50 ({not_separable} NotSeparable)"));
    }
    outcome(all, results.join(", "))
}

// ---------- 11 ----------

fn c11() -> Outcome {
    let mut rng = SeedStream::new(11).rng("gradients");
    let h = 1e-6;
    let mut bad = 0;
    let mut worst: f64 = 0.0;
    let mut check = |analytic: f64, fd: f64| {
        let rel = (analytic - fd).abs() / analytic.abs().max(1.0);
        worst = worst.max(rel);
        if rel > 1e-4 {
            bad += 1;
        }
    };
    for _ in 0..1000 {
        let gamma = rng.random_range(0.1..1.0);
        let lambda = rng.random_range(0.0..0.5);
        let eta = rng.random_range(0.0..0.45);
        let y_bit = if rng.random_bool(0.5) { 1.0 } else { 0.0 };
        let s = loop {
            let s: f64 = rng.random_range(-3.0..3.0);
            if (s - gamma).abs() > 1e-3 && (s + gamma).abs() > 1e-3 {
                break s;
            }
        };
        let fd = (rcn_phi(s + h, lambda, gamma).0 - rcn_phi(s - h, lambda, gamma).0) / (2.0 * h);
        check(rcn_phi(s, lambda, gamma).1, fd);
        let fd = (glm_loss(s + h, y_bit, eta, gamma).0 - glm_loss(s - h, y_bit, eta, gamma).0) / (2.0 * h);
        check(glm_loss(s, y_bit, eta, gamma).1, fd);
    }
    outcome(bad == 0, format!("{bad} of 2000 mismatches, worst relative error {worst:.2e}"))
}

// ---------- 12 ----------

fn cli(args: &[&str], dir: &Path) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_roblearn"))
        .args(args)
        .current_dir(dir)
        .env("ROBLEARN_THREADS", "2")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn c12() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let planted = r#"{"type":"planted_halfspace","dim":2,"gamma":0.3}"#;
    std::fs::write(d.join("model.json"), r#"{"w":[1.0,0.2],"bias":0.0}"#).unwrap();
    std::fs::write(
        d.join("pool.json"),
        r#"[{"w":[1.0,0.0],"bias":0.0},{"w":[0.0,1.0],"bias":0.0},{"w":[1.0,1.0],"bias":0.1},{"w":[-1.0,0.5],"bias":0.0}]"#,
    )
    .unwrap();
    let setup: [&[&str]; 5] = [
        &["gen-data", "--gen", "gaussian", "--n", "40", "--seed", "3", "--csv-out", "train.csv"],
        &["gen-data", "--gen", "gaussian", "--n", "30", "--seed", "4", "--csv-out", "test.csv"],
        &["gen-data", "--gen", planted, "--n", "20", "--seed", "5", "--csv-out", "sep.csv"],
        &["gen-data", "--gen", planted, "--n", "200", "--seed", "6", "--csv-out", "stream.csv"],
        &["gen-data", "--gen", planted, "--n", "8", "--seed", "7", "--csv-out", "small.csv"],
    ];
    for a in setup {
        if cli(a, d).0 != 0 {
            return outcome(false, format!("fixture command {a:?} failed"));
        }
    }
    let offsets = "[[0.0,0.0],[0.05,0.0],[-0.05,0.0]]";
    let runs: Vec<Vec<&str>> = vec![
        vec!["certify", "--data", "train.csv", "--model", "model.json", "--gamma", "0.5"],
        vec!["attack", "--data", "train.csv", "--model", "model.json", "--gamma", "0.5", "--p", "inf"],
        vec!["rerm-ellipsoid", "--data", "sep.csv", "--gamma", "0.1"],
        vec!["roboost", "--gen", "margin-union", "--gamma", "1", "--rounds", "2", "--learner-m", "200", "--test-n", "300", "--seed", "7"],
        vec!["uroboost", "--gen", "margin-union", "--gamma", "1", "--n", "200", "--rounds", "2", "--learner-m", "200", "--test-n", "300"],
        vec!["alpha-boost", "--data", "sep.csv", "--rounds", "20", "--vote-size", "5"],
        vec!["robustify", "--data", "small.csv", "--offsets", offsets, "--rounds", "8", "--vote-size", "5"],
        vec!["fms", "--data", "small.csv", "--offsets", offsets, "--pool", "pool.json", "--rounds", "50"],
        vec!["cycle-robust", "--data", "sep.csv", "--gamma", "0.1"],
        vec!["one-pass", "--data", "stream.csv", "--gamma", "0.1", "--eps", "0.5", "--delta", "0.5", "--cap", "50"],
        vec!["wm", "--data", "train.csv", "--pool", "pool.json", "--offsets", offsets, "--eta-mw", "0.5"],
        vec!["rcn-train", "md", "--gen", planted, "--n", "2000", "--eta", "0.1", "--gamma", "0.3", "--test-n", "500"],
        vec!["rcn-train", "glm", "--gen", planted, "--n", "2000", "--eta", "0.1", "--gamma", "0.3", "--test-n", "500"],
        vec!["rejectron", "--data", "train.csv", "--test", "test.csv", "--pool", "pool.json", "--eps", "0.2"],
        vec!["urejectron", "--data", "train.csv", "--test", "test.csv", "--model", "model.json"],
        vec!["urejectron", "--data", "train.csv", "--test", "test.csv", "--backend", "pool", "--pool", "pool.json"],
        vec!["transductive-pool", "--data", "train.csv", "--test", "test.csv", "--pool", "pool.json", "--mode", "agnostic", "--gamma", "0.1"],
        vec!["gen-data", "--gen", "moons", "--n", "50", "--seed", "9"],
    ];
    let mut same = 0;
    let mut failures = Vec::new();
    for a in &runs {
        let (c1, o1) = cli(a, d);
        let (c2, o2) = cli(a, d);
        if c1 == 0 && c2 == 0 && o1 == o2 && !o1.is_empty() {
            same += 1;
        } else {
            failures.push(format!("{} (exit {c1}/{c2})", a[0]));
        }
    }
    let covered: std::collections::BTreeSet<&str> = runs.iter().map(|a| a[0]).collect();
    outcome(
        same == runs.len() && covered.len() == 16,
        format!(
            "{same}/{} runs byte-identical over {} subcommands{}",
            runs.len(),
            covered.len(),
            if failures.is_empty() { String::new() } else { format!("; failed: {}", failures.join(", ")) }
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("closed-form robust loss matches brute force", c1),
        ("cascade boosting improves robust accuracy", c2),
        ("alpha-boost agreement and zero training error", c3),
        ("rejectron guarantees on realizable runs", c4),
        ("one-round distinguisher tradeoff", c5),
        ("noise-tolerant halfspace training", c6),
        ("multiplicative weights over perturbations", c7),
        ("cycle-robust perceptron", c8),
        ("weighted majority mistake bound", c9),
        ("ellipsoid robust ERM certified", c10),
        ("surrogate subgradients match finite differences", c11),
        ("CLI determinism", c12),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        println!(
            "criterion {:>2} {}: {name}: {} [{:.2?}]",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed()
        );
        failed += (!o.pass) as usize;
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

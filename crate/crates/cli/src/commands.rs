use roblearn::boosting::{
    alpha_boost, beta_roboost, beta_uroboost, majority_loss, sparsify_majority, vote_agreement,
    AlphaBoostConfig, AlphaMode, BoostConfig, BoostOutput, LossKind, DEFAULT_SPARSIFY_ATTEMPTS,
};
use roblearn::data::{save_csv, ResultsDocument};
use roblearn::learners::{
    erm_linear, glm_train, rcn_train_md, svm_margin, ErmConfig, LinearErm, PerceptronState, PoolErm,
    RcnConfig, SvmConfig, WeightedDataset, WeightedLearner,
};
use roblearn::linalg::dual_exponent;
use roblearn::oracles::{attack, ellipsoid_certify, rerm_ellipsoid, Certificate, EllipsoidConfig};
use roblearn::reductions::{
    cycle_robust, fms_agnostic, one_pass_robust, robustify_nonrobust, weighted_majority_robust,
    FmsConfig, OnePassConfig, RobustifyConfig, DEFAULT_VOTE_SIZE,
};
use roblearn::redaction::{
    massart_denoise_rejectron, rejectron, select_member, transductive_pool, urejectron_distinguisher,
    urejectron_pool, PoolMode, RedactConfig, SelectionSet,
};
use roblearn::rng::SeedStream;
use roblearn::robust::{
    robust_risk, zero_one_error, Classifier, Dataset, DatasetSource, Label, LinearModel,
    PerturbationSpec, SampleSource,
};
use roblearn::{Error, Result};
use serde_json::{json, Value};

use crate::args::{AlphaModeArg, Backend, Command, Mode, RcnAlgo, RunConfig};
use crate::inputs::*;

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

pub fn run(cmd: &Command) -> Result<ResultsDocument> {
    let (name, cfg) = match cmd {
        Command::Certify(c) => ("certify", c),
        Command::Attack(c) => ("attack", c),
        Command::RermEllipsoid(c) => ("rerm-ellipsoid", c),
        Command::Roboost(c) => ("roboost", c),
        Command::Uroboost(c) => ("uroboost", c),
        Command::AlphaBoost(c) => ("alpha-boost", c),
        Command::Robustify(c) => ("robustify", c),
        Command::Fms(c) => ("fms", c),
        Command::CycleRobust(c) => ("cycle-robust", c),
        Command::OnePass(c) => ("one-pass", c),
        Command::Wm(c) => ("wm", c),
        Command::RcnTrain { cfg, .. } => ("rcn-train", cfg),
        Command::Rejectron(c) => ("rejectron", c),
        Command::Urejectron(c) => ("urejectron", c),
        Command::TransductivePool(c) => ("transductive-pool", c),
        Command::GenData(c) => ("gen-data", c),
    };
    let mut echo = to_value(cfg)?;
    if let Command::RcnTrain { algo, .. } = cmd {
        echo["algo"] = to_value(algo)?;
    }
    let mut doc = ResultsDocument::new(name, echo);
    match cmd {
        Command::Certify(c) => certify(c, &mut doc)?,
        Command::Attack(c) => attack_cmd(c, &mut doc)?,
        Command::RermEllipsoid(c) => rerm(c, &mut doc)?,
        Command::Roboost(c) => roboost(c, &mut doc, false)?,
        Command::Uroboost(c) => roboost(c, &mut doc, true)?,
        Command::AlphaBoost(c) => alpha(c, &mut doc)?,
        Command::Robustify(c) => robustify(c, &mut doc)?,
        Command::Fms(c) => fms(c, &mut doc)?,
        Command::CycleRobust(c) => cycle(c, &mut doc)?,
        Command::OnePass(c) => one_pass(c, &mut doc)?,
        Command::Wm(c) => wm(c, &mut doc)?,
        Command::RcnTrain { algo, cfg } => rcn(*algo, cfg, &mut doc)?,
        Command::Rejectron(c) => rejectron_cmd(c, &mut doc)?,
        Command::Urejectron(c) => urejectron_cmd(c, &mut doc)?,
        Command::TransductivePool(c) => transductive(c, &mut doc)?,
        Command::GenData(c) => gen_data(c, &mut doc)?,
    }
    Ok(doc)
}

fn robust_accuracy<C: Classifier + Sync + ?Sized>(h: &C, data: &Dataset, u: &PerturbationSpec) -> Result<f64> {
    Ok(1.0 - robust_risk(h, data, u)?)
}

fn accuracy<C: Classifier + Sync + ?Sized>(h: &C, data: &Dataset) -> Result<f64> {
    Ok(1.0 - zero_one_error(h, data)?)
}

fn certify(cfg: &RunConfig, doc: &mut ResultsDocument) -> Result<()> {
    let (data, h, u) = (train_data(cfg)?, model(cfg)?, spec(cfg)?);
    let losses = data
        .iter()
        .enumerate()
        .map(|(i, s)| roblearn::robust::robust_loss(&h, s, i, &u))
        .collect::<Result<Vec<u8>>>()?;
    doc.metric("robust_accuracy", robust_accuracy(&h, &data, &u)?);
    doc.metric("standard_accuracy", accuracy(&h, &data)?);
    doc.artifacts = json!({ "robust_loss": losses });
    Ok(())
}

fn attack_cmd(cfg: &RunConfig, doc: &mut ResultsDocument) -> Result<()> {
    let (data, h, u) = (train_data(cfg)?, model(cfg)?, spec(cfg)?);
    let witnesses = data
        .iter()
        .enumerate()
        .map(|(i, s)| attack(&h, s, i, &u))
        .collect::<Result<Vec<_>>>()?;
    let hits = witnesses.iter().filter(|w| w.is_some()).count();
    doc.metric("attack_success_rate", hits as f64 / data.len().max(1) as f64);
    doc.artifacts = json!({ "witnesses": witnesses });
    Ok(())
}

fn rerm(cfg: &RunConfig, doc: &mut ResultsDocument) -> Result<()> {
    let data = train_data(cfg)?;
    let desc = descriptor(cfg)?;
    let ecfg = EllipsoidConfig::for_problem(data.dim(), cfg.gamma);
    let h = rerm_ellipsoid(&data, |_| &desc, &ecfg)?;
    let mut robust = 0usize;
    for s in data.iter() {
        if ellipsoid_certify(&h, &s.x, s.y, &desc, &ecfg)? == Certificate::Robust {
            robust += 1;
        }
    }
    doc.metric("certified_fraction", robust as f64 / data.len() as f64);
    doc.metric("standard_accuracy", accuracy(&h, &data)?);
    doc.artifacts = json!({ "model": h, "ellipsoid": ecfg });
    Ok(())
}

fn boost_config(cfg: &RunConfig) -> BoostConfig {
    let mut bc = BoostConfig::new(
        cfg.beta.unwrap_or(0.5),
        cfg.eps.unwrap_or(0.1),
        cfg.delta.unwrap_or(0.1),
        cfg.learner_m.unwrap_or(100),
    );
    bc.rounds = cfg.rounds;
    bc.multi_granularity = cfg.multi_granularity;
    bc
}

fn roboost(cfg: &RunConfig, doc: &mut ResultsDocument, unlabeled: bool) -> Result<()> {
    let (p, gamma) = (p_value(cfg)?, cfg.gamma);
    let u = spec(cfg)?;
    let learner = |d: &Dataset| Ok(svm_margin(d, gamma, p, &SvmConfig::default())?.model);
    let bc = boost_config(cfg);
    let (labeler, out): (Option<LinearModel>, BoostOutput) = if unlabeled {
        let labeled = train_data(cfg)?;
        let mut src: Box<dyn SampleSource> = match aux_data(cfg)? {
            Some(d) => Box::new(DatasetSource::new(d)),
            None => endless_source(cfg, "unlabeled")?,
        };
        let (h, out) = beta_uroboost(&labeled, &mut src, &learner, &bc, &u)?;
        (Some(h), out)
    } else {
        let mut src = endless_source(cfg, "source")?;
        (None, beta_roboost(&mut src, &learner, &bc, &u)?)
    };
    doc.rounds = out.rounds.iter().map(to_value).collect::<Result<_>>()?;
    doc.metric("stages", out.cascade.stages.len() as f64);
    doc.metric("stopped_early", out.stopped_early as u8 as f64);
    if let Some(test) = test_data(cfg)? {
        let single = &out.cascade.stages[0].model;
        doc.metric("cascade_robust_accuracy", robust_accuracy(&out.cascade, &test, &u)?);
        doc.metric("cascade_standard_accuracy", accuracy(&out.cascade, &test)?);
        doc.metric("single_robust_accuracy", robust_accuracy(single, &test, &u)?);
        doc.metric("single_standard_accuracy", accuracy(single, &test)?);
    }
    doc.artifacts = json!({ "cascade": out.cascade, "labeler": labeler });
    Ok(())
}

fn alpha(cfg: &RunConfig, doc: &mut ResultsDocument) -> Result<()> {
    let data = train_data(cfg)?;
    let mode = match cfg.alpha_mode {
        AlphaModeArg::Standard => AlphaMode::Standard,
        AlphaModeArg::Agreement => AlphaMode::Agreement,
    };
    let mut ac = AlphaBoostConfig::for_size(data.len(), mode);
    if let Some(t) = cfg.rounds {
        ac.rounds = t;
    }
    let loss = if cfg.robust {
        LossKind::Robust { spec: spec(cfg)? }
    } else {
        LossKind::ZeroOne
    };
    let out = alpha_boost(&data, &LinearErm::default(), &ac, &loss)?;
    let agree = vote_agreement(&out.models, &data, &loss)?;
    doc.metric("majority_loss", majority_loss(&out.models, &data, &loss)?);
    doc.metric("min_agreement", agree.iter().copied().fold(1.0, f64::min));
    doc.metric("rounds", out.models.len() as f64);
    let mut models = out.models.clone();
    if let Some(n) = cfg.vote_size {
        let seeds = SeedStream::new(cfg.seed).child("sparsify");
        let sp = sparsify_majority(&out.models, &data, n, &loss, &seeds, DEFAULT_SPARSIFY_ATTEMPTS)?;
        doc.metric("sparsify_attempts", sp.attempts as f64);
        models = sp.models;
    }
    doc.rounds = out.attempts.iter().enumerate().map(|(i, a)| json!({"round": i + 1, "attempts": a})).collect();
    doc.artifacts = json!({ "config": ac, "models": models });
    Ok(())
}

fn robustify(cfg: &RunConfig, doc: &mut ResultsDocument) -> Result<()> {
    let data = train_data(cfg)?;
    let u = finite_spec(cfg)?;
    let base = |d: &Dataset| erm_linear(&WeightedDataset::uniform(d), &ErmConfig::default());
    let rc = RobustifyConfig {
        outer_rounds: cfg.rounds,
        inner_rounds: cfg.rounds,
        inner_vote: cfg.vote_size.unwrap_or(DEFAULT_VOTE_SIZE),
        outer_vote: cfg.vote_size.unwrap_or(DEFAULT_VOTE_SIZE),
        ..RobustifyConfig::default()
    };
    let out = robustify_nonrobust(&data, &u, &base, &rc, &SeedStream::new(cfg.seed))?;
    doc.metric("robust_training_loss", robust_risk(&out.vote, &data, &u)?);
    doc.metric("inflated_size", out.inflated_size as f64);
    doc.metric("learner_calls", out.learner_calls as f64);
    if let Some(test) = test_data(cfg)? {
        doc.metric("test_robust_accuracy", robust_accuracy(&out.vote, &test, &u)?);
    }
    doc.artifacts = json!({ "vote": out.vote });
    Ok(())
}

fn weighted_learner(cfg: &RunConfig) -> Result<Box<dyn WeightedLearner>> {
    Ok(match pool(cfg)? {
        Some(p) => Box::new(PoolErm::new(p)?),
        None => Box::new(LinearErm::default()),
    })
}

fn fms(cfg: &RunConfig, doc: &mut ResultsDocument) -> Result<()> {
    let data = train_data(cfg)?;
    let u = finite_spec(cfg)?;
    let erm = weighted_learner(cfg)?;
    let fc = FmsConfig {
        eta: cfg.eta_mw,
        rounds: cfg.rounds,
        eps: cfg.eps.unwrap_or(0.1),
        ..FmsConfig::default()
    };
    let out = fms_agnostic(&data, &u, erm.as_ref(), &fc)?;
    let vote = out.majority();
    doc.metric("robust_training_loss", robust_risk(&vote, &data, &u)?);
    doc.metric("rounds", out.rounds as f64);
    doc.metric("eta_mw", out.eta);
    if let Some(test) = test_data(cfg)? {
        doc.metric("test_robust_accuracy", robust_accuracy(&vote, &test, &u)?);
    }
    doc.artifacts = json!({ "vote": vote });
    Ok(())
}

fn cycle(cfg: &RunConfig, doc: &mut ResultsDocument) -> Result<()> {
    let data = train_data(cfg)?;
    let u = spec(cfg)?;
    let mut learner = PerceptronState::new(data.dim());
    let out = cycle_robust(&data, &mut learner, &u, cfg.cap.unwrap_or(100_000))?;
    doc.metric("robust_training_accuracy", robust_accuracy(&out.model, &data, &u)?);
    doc.metric("updates", out.updates as f64);
    doc.metric("passes", out.passes as f64);
    doc.metric("oracle_calls", out.oracle_calls as f64);
    doc.artifacts = json!({ "model": out.model });
    Ok(())
}

fn one_pass(cfg: &RunConfig, doc: &mut ResultsDocument) -> Result<()> {
    let mut stream = finite_stream(cfg)?;
    let u = spec(cfg)?;
    let mut learner = PerceptronState::new(stream.dim());
    let oc = OnePassConfig {
        eps: cfg.eps.unwrap_or(0.1),
        delta: cfg.delta.unwrap_or(0.1),
        mistake_cap: cfg.cap.unwrap_or(1000),
    };
    let out = one_pass_robust(&mut stream, &mut learner, &u, &oc)?;
    doc.metric("updates", out.updates as f64);
    doc.metric("consumed", out.consumed as f64);
    doc.metric("run_length", out.run_length as f64);
    if let Some(test) = test_data(cfg)? {
        doc.metric("test_robust_accuracy", robust_accuracy(&out.model, &test, &u)?);
    }
    doc.artifacts = json!({ "model": out.model });
    Ok(())
}

fn wm(cfg: &RunConfig, doc: &mut ResultsDocument) -> Result<()> {
    let pool = require_pool(cfg)?;
    let mut stream = finite_stream(cfg)?;
    let u = spec(cfg)?;
    let out = weighted_majority_robust(&pool, &mut stream, &u, cfg.eta_mw.unwrap_or(0.5), cfg.rounds)?;
    doc.metric("mistakes", out.mistakes as f64);
    doc.metric("opt", out.opt as f64);
    doc.metric("bound", out.bound);
    doc.metric("rounds", out.rounds as f64);
    doc.artifacts = json!({ "weights": out.weights, "member_mistakes": out.member_mistakes });
    Ok(())
}

fn rcn(algo: RcnAlgo, cfg: &RunConfig, doc: &mut ResultsDocument) -> Result<()> {
    let mut stream = finite_stream(cfg)?;
    let p = p_value(cfg)?;
    let rc = RcnConfig {
        gamma: cfg.gamma,
        eta: cfg.eta.unwrap_or(0.0),
        eps: cfg.eps.unwrap_or(0.1),
        q: dual_exponent(p)?,
        steps: cfg.rounds.unwrap_or(cfg.n),
    };
    let h = match algo {
        RcnAlgo::Md => rcn_train_md(&mut stream, &rc)?,
        RcnAlgo::Glm => glm_train(&mut stream, &rc)?,
    };
    if let Some(test) = test_data(cfg)? {
        let half = PerturbationSpec::lp_ball(p, cfg.gamma / 2.0)?;
        doc.metric("test_half_margin_error", robust_risk(&h, &test, &half)?);
        doc.metric("test_error", zero_one_error(&h, &test)?);
    }
    doc.metric("lambda", rc.lambda());
    doc.artifacts = json!({ "model": h });
    Ok(())
}

fn redact_config(cfg: &RunConfig) -> RedactConfig {
    RedactConfig {
        lambda: cfg.lambda_weight,
        eta: cfg.eta,
        delta: cfg.delta.unwrap_or(0.1),
        ..RedactConfig::new(cfg.eps.unwrap_or(0.1))
    }
}

fn selection_metrics(
    doc: &mut ResultsDocument,
    sel: &SelectionSet,
    h: Option<&LinearModel>,
    train: &Dataset,
    test: &Dataset,
) {
    let kept_train = train.iter().filter(|s| select_member(sel, &s.x)).count();
    let kept_test: Vec<bool> = test.iter().map(|s| select_member(sel, &s.x)).collect();
    let n_test = test.len().max(1) as f64;
    doc.metric("train_rejection_rate", 1.0 - kept_train as f64 / train.len().max(1) as f64);
    doc.metric(
        "test_rejection_rate",
        kept_test.iter().filter(|k| !**k).count() as f64 / n_test,
    );
    if let Some(h) = h {
        let wrong = test
            .iter()
            .zip(&kept_test)
            .filter(|(s, k)| **k && h.predict(&s.x) != s.y)
            .count();
        doc.metric("selective_test_error", wrong as f64 / n_test);
    }
}

fn rejectron_cmd(cfg: &RunConfig, doc: &mut ResultsDocument) -> Result<()> {
    let train = train_data(cfg)?;
    let test = require_test(cfg)?;
    let erm = weighted_learner(cfg)?;
    let rc = redact_config(cfg);
    let points = test.points();
    let (denoiser, out) = match aux_data(cfg)? {
        Some(noisy) => {
            let (d, o) = massart_denoise_rejectron(&noisy, &train, &points, &rc, erm.as_ref())?;
            (Some(d), o)
        }
        None => (None, rejectron(&train, &points, &rc, erm.as_ref())?),
    };
    doc.rounds = out
        .scores
        .iter()
        .enumerate()
        .map(|(i, s)| json!({"round": i + 1, "score": s, "removed": out.removed.get(i)}))
        .collect();
    doc.metric("rounds", out.rounds() as f64);
    doc.metric("lambda", out.lambda);
    selection_metrics(doc, &out.selection, Some(&out.h), &train, &test);
    doc.artifacts = json!({ "h": out.h, "selection": out.selection, "denoiser": denoiser });
    Ok(())
}

fn urejectron_cmd(cfg: &RunConfig, doc: &mut ResultsDocument) -> Result<()> {
    let train = train_data(cfg)?;
    let test = require_test(cfg)?;
    let rc = redact_config(cfg);
    let (tp, qp) = (train.points(), test.points());
    let h = cfg.model.as_ref().map(|_| model(cfg)).transpose()?;
    match cfg.backend {
        Backend::Pool => {
            let out = urejectron_pool(&tp, &qp, &require_pool(cfg)?, &rc)?;
            doc.rounds = out.scores.iter().enumerate().map(|(i, s)| json!({"round": i + 1, "score": s})).collect();
            doc.metric("rounds", out.selection.len() as f64);
            doc.metric("lambda", out.lambda);
            selection_metrics(doc, &out.selection, h.as_ref(), &train, &test);
            doc.artifacts = json!({ "selection": out.selection });
        }
        Backend::Distinguisher => {
            let labels: Vec<Label> = test.iter().map(|s| s.y).collect();
            let labeled = h.as_ref().map(|m| (m, labels.as_slice()));
            let out = urejectron_distinguisher(&tp, &qp, &rc, &LinearErm::default(), labeled)?;
            doc.metric("threshold", out.threshold);
            selection_metrics(doc, &out.selection, h.as_ref(), &train, &test);
            doc.tradeoff = out.tradeoff;
            doc.artifacts = json!({ "distinguisher": out.distinguisher, "selection": out.selection });
        }
    }
    Ok(())
}

fn transductive(cfg: &RunConfig, doc: &mut ResultsDocument) -> Result<()> {
    let train = train_data(cfg)?;
    let test = require_test(cfg)?;
    let mode = match cfg.mode {
        Mode::Realizable => PoolMode::Realizable,
        Mode::Agnostic => PoolMode::Agnostic,
    };
    let out = transductive_pool(&require_pool(cfg)?, &train, &test.points(), &spec(cfg)?, mode)?;
    doc.metric("index", out.index as f64);
    doc.metric("train_loss", out.train_loss);
    doc.metric("test_loss", out.test_loss);
    doc.metric("test_accuracy", accuracy(&out.model, &test)?);
    doc.artifacts = json!({ "model": out.model, "labels": out.labels });
    Ok(())
}

fn gen_data(cfg: &RunConfig, doc: &mut ResultsDocument) -> Result<()> {
    if cfg.gen.is_none() {
        return Err(Error::InvalidParameter("gen-data needs --gen".into()));
    }
    let data = train_data(cfg)?;
    if let Some(path) = &cfg.csv_out {
        save_csv(path, &data)?;
    }
    let pos = data.iter().filter(|s| s.y == Label::Pos).count();
    doc.metric("n", data.len() as f64);
    doc.metric("dim", data.dim() as f64);
    doc.metric("positive_fraction", pos as f64 / data.len() as f64);
    doc.artifacts = json!({ "kind": gen_kind(cfg)? });
    Ok(())
}

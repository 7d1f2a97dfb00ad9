use std::collections::BTreeMap;

use roblearn::data::{apply_rcn, generate, load_csv, Cluster, GenKind, GenSpec, GeneratorSource};
use roblearn::oracles::SetDescriptor;
use roblearn::rng::SeedStream;
use roblearn::robust::{Dataset, DatasetSource, LinearModel, PerturbationSpec, SampleSource, ShuffledCycle};
use roblearn::{Error, Result};
use serde::de::DeserializeOwned;

use crate::args::RunConfig;

fn config(msg: &str) -> Error {
    Error::InvalidParameter(msg.into())
}

/// Inline JSON, or the contents of the file it names.
fn json_arg<T: DeserializeOwned>(arg: &str) -> Result<T> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(serde_json::from_str(arg)?)
    } else {
        Ok(serde_json::from_str(&std::fs::read_to_string(arg)?)?)
    }
}

fn preset(name: &str) -> Option<GenKind> {
    Some(match name {
        "margin-union" => {
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
        "moons" => GenKind::TwoMoons { noise: 0.1 },
        "gaussian" => GenKind::GaussianPair {
            pos_center: vec![2.0, 0.0],
            neg_center: vec![-2.0, 0.0],
            sigma: 1.0,
        },
        "planted" => GenKind::PlantedHalfspace { dim: 20, gamma: 0.5 },
        _ => return None,
    })
}

pub fn gen_kind(cfg: &RunConfig) -> Result<Option<GenKind>> {
    cfg.gen
        .as_deref()
        .map(|g| preset(g).map(Ok).unwrap_or_else(|| json_arg(g)))
        .transpose()
}

/// Generator sharing the training distribution, with draws from the `label` substream.
fn fresh_source(kind: GenKind, cfg: &RunConfig, label: &str) -> Result<GeneratorSource> {
    let root = SeedStream::new(cfg.seed);
    GeneratorSource::with_streams(kind, &root, &root.child(label))
}

pub fn train_data(cfg: &RunConfig) -> Result<Dataset> {
    if let Some(path) = &cfg.data {
        return load_csv(path);
    }
    match gen_kind(cfg)? {
        Some(kind) => generate(&GenSpec {
            kind,
            n: cfg.n,
            seed: cfg.seed,
        }),
        None => Err(config("pass --data or --gen")),
    }
}

pub fn test_data(cfg: &RunConfig) -> Result<Option<Dataset>> {
    if let Some(path) = &cfg.test {
        return load_csv(path).map(Some);
    }
    match (gen_kind(cfg)?, cfg.data.is_none()) {
        (Some(kind), true) => {
            let dim = kind.dim();
            let mut src = fresh_source(kind, cfg, "test")?;
            let samples = (0..cfg.test_n).map(|_| src.draw()).collect::<Result<Vec<_>>>()?;
            Dataset::with_dim(samples, dim).map(Some)
        }
        _ => Ok(None),
    }
}

pub fn require_test(cfg: &RunConfig) -> Result<Dataset> {
    test_data(cfg)?.ok_or_else(|| config("pass --test or --gen"))
}

/// Endless source for generators, a reshuffling cycle for CSV data.
pub fn endless_source(cfg: &RunConfig, label: &str) -> Result<Box<dyn SampleSource>> {
    let seeds = SeedStream::new(cfg.seed).child(label);
    if let Some(path) = &cfg.data {
        return Ok(Box::new(ShuffledCycle::new(load_csv(path)?, seeds.rng("cycle"))));
    }
    match gen_kind(cfg)? {
        Some(kind) => Ok(Box::new(fresh_source(kind, cfg, label)?)),
        None => Err(config("pass --data or --gen")),
    }
}

/// One pass over the training data, with label noise at rate `--eta` when set.
pub fn finite_stream(cfg: &RunConfig) -> Result<DatasetSource> {
    let mut data = train_data(cfg)?;
    if let Some(eta) = cfg.eta {
        data = apply_rcn(&data, eta, SeedStream::new(cfg.seed).child("noise").seed())?;
    }
    Ok(DatasetSource::new(data))
}

pub fn p_value(cfg: &RunConfig) -> Result<f64> {
    cfg.p
        .parse::<f64>()
        .map_err(|_| config("--p must be a number or inf"))
}

pub fn spec(cfg: &RunConfig) -> Result<PerturbationSpec> {
    match &cfg.offsets {
        Some(o) => PerturbationSpec::finite_offsets(json_arg(o)?),
        None => PerturbationSpec::lp_ball(p_value(cfg)?, cfg.gamma),
    }
}

pub fn finite_spec(cfg: &RunConfig) -> Result<PerturbationSpec> {
    if cfg.offsets.is_none() {
        return Err(config("this command needs --offsets"));
    }
    spec(cfg)
}

pub fn descriptor(cfg: &RunConfig) -> Result<SetDescriptor> {
    match &cfg.polytope {
        Some(poly) => {
            let v: BTreeMap<String, serde_json::Value> = json_arg(poly)?;
            let a = v.get("a").cloned().ok_or_else(|| config("polytope needs a"))?;
            let b = v.get("b").cloned().ok_or_else(|| config("polytope needs b"))?;
            Ok(SetDescriptor::Polytope {
                a: serde_json::from_value(a)?,
                b: serde_json::from_value(b)?,
            })
        }
        None => SetDescriptor::from_spec(&spec(cfg)?),
    }
}

pub fn model(cfg: &RunConfig) -> Result<LinearModel> {
    json_arg(cfg.model.as_deref().ok_or_else(|| config("pass --model"))?)
}

pub fn pool(cfg: &RunConfig) -> Result<Option<Vec<LinearModel>>> {
    cfg.pool.as_deref().map(json_arg).transpose()
}

pub fn require_pool(cfg: &RunConfig) -> Result<Vec<LinearModel>> {
    pool(cfg)?.ok_or_else(|| config("pass --pool"))
}

pub fn aux_data(cfg: &RunConfig) -> Result<Option<Dataset>> {
    cfg.aux.as_deref().map(load_csv).transpose()
}

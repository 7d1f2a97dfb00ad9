//! Domain types and exact robust-loss evaluation.

mod loss;
mod model;
mod perturbation;
mod sample;
mod source;

pub use loss::{
    margin, robust_loss, robust_loss_of, robust_risk, worst_case_point, zero_one_error,
};
pub(crate) use model::check_dim;
pub use model::{Classifier, LinearModel, MajorityVote, WeightedVote};
pub use perturbation::{
    inflate, inverse_blowup, InflatedDataset, PerturbationSpec, TaggedSample,
    DEFAULT_INFLATION_CAP,
};
pub use sample::{Dataset, Label, Sample, SelectiveLabel};
pub use source::{DatasetSource, FnSource, SampleSource, ShuffledCycle};

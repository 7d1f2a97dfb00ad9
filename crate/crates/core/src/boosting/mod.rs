//! Selective classifiers, cascades and the boosting algorithms built on them.

pub(crate) mod alpha;
mod expand;
mod region;
mod roboost;
mod selective;

pub use alpha::{
    alpha_boost, majority_loss, sparsify_majority, vote_agreement, AlphaBoostConfig,
    AlphaBoostOutput, AlphaMode, LossKind, Sparsified, DEFAULT_SPARSIFY_ATTEMPTS,
};
pub use expand::{expand_g, strong_to_barely, strong_to_barely_m, ExpandedClassifier, StrongToBarely};
pub use region::{in_nonrobust_region, rejection_sample, RejectionSample};
pub use roboost::{beta_roboost, beta_uroboost, BoostConfig, BoostOutput, RoundDiagnostics};
pub use selective::{cascade_predict, selective_predict, Cascade, SelectiveClassifier};

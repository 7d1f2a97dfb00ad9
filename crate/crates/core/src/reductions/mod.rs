//! Robust learners built from non-robust ones: boosting over inflated data,
//! multiplicative weights over perturbations, and online-oracle loops.

mod fms;
mod online;
mod robustify;
mod wm;

pub use fms::{fms_agnostic, fms_update, FmsConfig, FmsOutput, PerExampleWeights};
pub use online::{cycle_robust, one_pass_robust, one_pass_run_length, CycleOutput, OnePassConfig, OnePassOutput};
pub use robustify::{
    robustify_nonrobust, zero_robust_loss, RobustifyConfig, RobustifyOutput, DEFAULT_VOTE_SIZE,
};
pub use wm::{weighted_majority_robust, wm_constants, EnsembleWeights, WmOutput};

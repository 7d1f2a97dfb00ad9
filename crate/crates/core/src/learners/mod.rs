//! Base learners: weighted ERM, margin SVM, perceptron and the two
//! noise-tolerant halfspace trainers.

mod erm;
mod glm;
mod perceptron;
mod rcn;
mod svm;
mod weighted;

pub use erm::{erm_linear, ErmConfig, LinearErm, PoolErm};
pub use glm::{glm_link_u, glm_loss, glm_train};
pub use perceptron::{perceptron_mistake_cap, perceptron_update, OnlineLearner, PerceptronState};
pub use rcn::{rcn_lambda, rcn_phi, rcn_train_md, RcnConfig};
pub use svm::{beta_hat, svm_margin, SvmConfig, SvmFit};
pub use weighted::{DatasetLearner, WeightedDataset, WeightedLearner};

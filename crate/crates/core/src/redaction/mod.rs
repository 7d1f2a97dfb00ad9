//! Transductive selective classification: Rejectron, URejectron, Massart
//! denoising and the finite-pool transductive learner.

mod rejectron;
mod selection;
mod transductive;
mod urejectron;

pub use rejectron::{lambda_star, massart_denoise_rejectron, rejectron, RedactConfig, RejectronOutput};
pub use selection::{select_member, selective_classify, Discriminators, SelectionSet};
pub use transductive::{transductive_pool, PoolMode, TransductiveOutput};
pub use urejectron::{
    pair_score, urejectron_distinguisher, urejectron_pool, DistinguisherOutput,
    URejectronOutput,
};

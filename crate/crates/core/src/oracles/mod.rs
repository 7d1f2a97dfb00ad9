//! Attack, separation and ellipsoid-based certification oracles.

mod attack;
mod ellipsoid;
mod separation;

pub use attack::{attack, attack_by_enumeration};
pub use ellipsoid::{
    certify_at_level, default_max_iters, ellipsoid_certify, ellipsoid_feasible, ellipsoid_search,
    rerm_ellipsoid, Certificate, EllipsoidConfig,
};
pub use separation::{separation_oracle, SeparationAnswer, SetDescriptor};

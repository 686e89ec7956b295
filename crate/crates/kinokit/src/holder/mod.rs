//! Kinetic-degree polynomials, sampled kinetic Hölder seminorms, increments, and the
//! inequality checks built on them.

mod checks;
mod increments;
mod poly;
mod seminorm;

pub use checks::{
    check_increment_v_bound, check_increment_x_bound, check_interpolation, check_localization, check_product,
    HolderCheckSpec,
};
pub use increments::{increment_v, increment_x};
pub use poly::{kdeg, taylor_expansion, KMultiIndex, KPolynomial};
pub use seminorm::{grad_x_sup, seminorm_est, seminorm_est_mapped, weighted_norm_est, SampleSpec, SeminormEstimate};

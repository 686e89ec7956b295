//! Quadrature, principal values, Monte Carlo and power-law fits.
//!
//! Every reduction in this module sums in a fixed order so results do not depend on threading.

pub mod fit;
pub mod gauss;
pub mod mc;
pub mod pv;
pub mod quad;
pub mod special;
pub mod sphere;

pub use fit::{fit_power_law, FitResult};
pub use gauss::{adaptive, adaptive_pieces, power_weighted, GaussLegendre, QuadResult};
pub use mc::{mc_integrate, mc_integrate_many, McResult, Sampler};
pub use pv::{pv_ring_integral, PvResult, PvSpec};
pub use quad::{integrate_box, integrate_hyperplane, integrate_hyperplane_about, QuadratureSpec};
pub use sphere::{ball_volume, sphere_area, SphereRule};

/// Pairwise (cascade) summation; the split points depend only on the length.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

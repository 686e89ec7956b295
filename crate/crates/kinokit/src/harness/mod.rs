//! Scenario files, parallel runs over the check sweeps, and report output.

mod emit;
mod report;
mod scenario;

pub use emit::{emit, report_csv, series_csv, Format};
pub use report::{run, verifier, CheckSummary, Report, ReportSummary, Worst};
pub use scenario::Scenario;

use crate::ModelParams;

/// Parameter triples `(γ, s)` of the reference suite.
pub const REFERENCE_TRIPLES: [(f64, f64); 3] = [(0.0, 0.25), (-0.5, 0.75), (1.0, 0.5)];

/// Checks run on every reference triple in three dimensions.
pub const REFERENCE_CHECKS: &[&str] = &[
    "bounded1",
    "bounded2",
    "cancel1",
    "cancel2",
    "cancel_ratio",
    "classK_ii",
    "classK_iv",
    "cone",
    "cone_transformed",
    "cov_pv",
    "da_equivalence",
    "nondeg1",
    "tail_mass",
];

/// The reference suite with seed 42: one three-dimensional scenario per triple and the
/// two-dimensional coercivity scenario, keyed by a file-system friendly name.
pub fn reference_scenarios() -> Vec<(String, Scenario)> {
    let mut out: Vec<(String, Scenario)> = REFERENCE_TRIPLES
        .iter()
        .map(|&(gamma, s)| {
            let p = ModelParams::new(3, s, gamma).expect("reference parameters are valid");
            (format!("d3_gamma{gamma}_s{s}"), Scenario::new(p, 42).with_checks(REFERENCE_CHECKS))
        })
        .collect();
    let p = ModelParams::new(2, 0.25, 0.0).expect("reference parameters are valid");
    out.push(("d2_gamma0_s0.25".into(), Scenario::new(p, 42).with_checks(&["gs_coercivity"])));
    out
}

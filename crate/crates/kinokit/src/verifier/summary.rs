//! Sweep-level tolerances and summary records.
//!
//! Per-point records get their tolerance here because some bounds depend on the whole sweep.
//! Checks with a sweep-level claim (uniformity, a fitted exponent, a spread) get one extra
//! record with default coordinates, so it sorts first within its check.

use super::{CheckResult, CheckSelection, Coords, Tolerance, Verifier, UNIFORMITY_CHECKS};
use crate::numerics::fit_power_law;

#[derive(Clone, Copy, PartialEq)]
enum Agg {
    Min,
    Max,
}

fn aggregate(xs: impl Iterator<Item = f64>, agg: Agg) -> f64 {
    xs.fold(None, |acc: Option<f64>, x| {
        Some(match acc {
            None => x,
            Some(a) if a.is_nan() || x.is_nan() => f64::NAN,
            Some(a) => match agg {
                Agg::Min => a.min(x),
                Agg::Max => a.max(x),
            },
        })
    })
    .unwrap_or(f64::NAN)
}

fn is_error(r: &CheckResult) -> bool {
    r.tolerance.quantity == "error"
}

/// `max / min` of nonnegative values: 1 when all vanish, infinite when only some do.
fn spread_ratio(xs: &[f64]) -> f64 {
    let hi = aggregate(xs.iter().map(|x| x.abs()), Agg::Max);
    let lo = aggregate(xs.iter().map(|x| x.abs()), Agg::Min);
    if hi == 0.0 {
        1.0
    } else if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

impl Verifier {
    fn summary_record(&self, id: &str, tolerance: Tolerance) -> CheckResult {
        let mut r = self.record(id, Coords::default()).note("sweep summary");
        r.tolerance = tolerance;
        r
    }

    /// Fits `value ~ C abscissa^p` and stores the fit with its exponent and `r²` as constants.
    fn attach_fit(rec: &mut CheckResult, points: &[(f64, f64)]) {
        match fit_power_law(points) {
            Ok(fit) => {
                rec.push("exponent", fit.exponent);
                rec.push("r_squared", fit.r_squared);
                rec.fit = Some(fit);
            }
            Err(e) => rec.notes.push(format!("no power-law fit: {e}")),
        }
    }

    /// Sets every tolerance, appends the summary record and finishes all records.
    pub fn summarize(&self, sel: &CheckSelection, records: Vec<CheckResult>) -> Vec<CheckResult> {
        if records.is_empty() {
            return records;
        }
        let (mut points, errors): (Vec<_>, Vec<_>) = records.into_iter().partition(|r| !is_error(r));
        if points.is_empty() {
            return errors.into_iter().map(CheckResult::finish).collect();
        }
        let summary = if UNIFORMITY_CHECKS.contains(&sel.id.as_str()) {
            self.uniformity(&sel.id, &mut points)
        } else {
            self.sweep_claim(&sel.id, &mut points)
        };
        let mut out = points;
        out.extend(summary);
        if !errors.is_empty() {
            for r in &mut out {
                if r.coords == Coords::default() {
                    r.notes.push(format!("{} sweep value(s) failed to measure", errors.len()));
                }
            }
        }
        out.into_iter()
            .map(|mut r| {
                r.tolerance = r.tolerance.scaled(self.tolerance_scale);
                r.finish()
            })
            .chain(errors.into_iter().map(CheckResult::finish))
            .collect()
    }

    fn uniformity(&self, id: &str, points: &mut [CheckResult]) -> Option<CheckResult> {
        let (name, agg) = match id {
            "nondeg1" | "classK_iv" => ("lambda", Agg::Min),
            "cone_transformed" => ("measure", Agg::Min),
            _ => ("lambda_upper", Agg::Max),
        };
        let mut v0s: Vec<f64> = points.iter().filter_map(|r| r.coords.v0).collect();
        v0s.sort_by(f64::total_cmp);
        v0s.dedup();
        if v0s.is_empty() {
            return None;
        }
        let per_v0: Vec<(f64, f64)> = v0s
            .iter()
            .map(|&v0| {
                let xs =
                    points.iter().filter(|r| r.coords.v0 == Some(v0)).map(|r| r.constant(name).unwrap_or(f64::NAN));
                (v0, aggregate(xs, agg))
            })
            .collect();
        let at = |v0: f64| per_v0.iter().find(|p| p.0 == v0).map(|p| p.1);
        let anchor =
            if id == "cone_transformed" { at(self.tol.cone_anchor_v0).unwrap_or(per_v0[0].1) } else { per_v0[0].1 };
        let point_tol = match id {
            "nondeg1" | "classK_iv" => Tolerance::at_least(name, self.tol.lambda_min),
            "cone_transformed" => Tolerance::at_least(name, self.tol.cone_anchor_fraction * anchor),
            _ => Tolerance::at_most(name, self.tol.anchor_factor * anchor),
        };
        for r in points.iter_mut() {
            r.tolerance = point_tol.clone();
        }
        let values: Vec<f64> = per_v0.iter().map(|p| p.1).collect();
        let mut rec = self
            .summary_record(id, Tolerance::at_most("uniformity_ratio", self.tol.uniformity_max))
            .with("uniformity_ratio", spread_ratio(&values))
            .with("min", aggregate(values.iter().copied(), Agg::Min))
            .with("max", aggregate(values.iter().copied(), Agg::Max))
            .with("anchor", anchor);
        Self::attach_fit(&mut rec, &per_v0);
        if id == "cancel1" {
            // The decay in |v0| is carried by the whole-space integral; the local one levels off.
            let p = self.kernel.params();
            rec.push("expected_exponent", -2.0 * p.s);
            let whole: Vec<(f64, f64)> = points
                .iter()
                .filter_map(|r| Some((r.coords.v0?, r.constant("whole_space_at_origin")?.abs())))
                .collect();
            if let Ok(fit) = fit_power_law(&whole) {
                rec.push("decay_exponent", fit.exponent);
                rec.push("decay_r_squared", fit.r_squared);
            }
        }
        Some(rec)
    }

    fn sweep_claim(&self, id: &str, points: &mut [CheckResult]) -> Option<CheckResult> {
        let p = *self.kernel.params();
        let tol = &self.tol;
        let speed = |r: &CheckResult| r.coords.v.as_ref().map_or(f64::NAN, |v| v[0]);
        let series = |points: &[CheckResult], x: &dyn Fn(&CheckResult) -> f64, name: &str| -> Vec<(f64, f64)> {
            points.iter().map(|r| (x(r), r.constant(name).unwrap_or(f64::NAN))).collect()
        };
        let set_all = |points: &mut [CheckResult], t: Tolerance| {
            for r in points.iter_mut() {
                r.tolerance = t.clone();
            }
        };
        match id {
            "tail_mass" => {
                set_all(points, Tolerance::at_least("lambda_upper", 0.0));
                let order = p.gamma + 2.0 * p.s;
                let tol = Tolerance::between("exponent", order - tol.exponent_tol, order + tol.exponent_tol)
                    .with_r_squared(tol.min_r_squared);
                let mut rec = self.summary_record(id, tol).with("expected_exponent", order);
                Self::attach_fit(&mut rec, &series(points, &|r| 1.0 + speed(r), "lambda_upper"));
                Some(rec)
            }
            "cone" => {
                set_all(points, Tolerance::at_least("measure", f64::MIN_POSITIVE));
                let t = Tolerance::between(
                    "exponent",
                    tol.cone_exponent - tol.cone_exponent_tol,
                    tol.cone_exponent + tol.cone_exponent_tol,
                )
                .with_r_squared(tol.min_r_squared);
                let width = aggregate(points.iter().map(|r| r.constant("width").unwrap_or(f64::NAN)), Agg::Max);
                let mut rec = self.summary_record(id, t).with("width_max", width);
                Self::attach_fit(&mut rec, &series(points, &speed, "measure"));
                Some(rec)
            }
            "cov_pv" => {
                set_all(points, Tolerance::at_least("abs_discrepancy", 0.0));
                let order = 2.0 - 2.0 * p.s;
                let mut rec = self
                    .summary_record(id, Tolerance::at_least("exponent", order - tol.exponent_tol))
                    .with("expected_exponent", order);
                Self::attach_fit(&mut rec, &series(points, &|r| r.coords.r.unwrap_or(f64::NAN), "abs_discrepancy"));
                Some(rec)
            }
            "cancel_ratio" => {
                set_all(points, Tolerance::finite("ratio"));
                let ratios: Vec<f64> = points.iter().map(|r| r.constant("ratio").unwrap_or(f64::NAN)).collect();
                let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
                Some(
                    self.summary_record(id, Tolerance::at_most("spread", tol.cancel_ratio_spread))
                        .with("spread", spread_ratio(&ratios) - 1.0)
                        .with("mean_ratio", mean),
                )
            }
            "da_equivalence" => {
                set_all(points, Tolerance::at_most("band", tol.da_band));
                let band = aggregate(points.iter().map(|r| r.constant("band").unwrap_or(f64::NAN)), Agg::Max);
                Some(self.summary_record(id, Tolerance::at_most("band", tol.da_band)).with("band", band))
            }
            "measure_condition" => {
                set_all(points, Tolerance::at_least("mu", tol.mu_min));
                let mu = aggregate(points.iter().map(|r| r.constant("mu").unwrap_or(f64::NAN)), Agg::Min);
                Some(self.summary_record(id, Tolerance::at_least("mu", tol.mu_min)).with("mu", mu))
            }
            "a0" => {
                let series = series(points, &|r| r.coords.v0.unwrap_or(f64::NAN), "a0");
                let expected = points.first().and_then(|r| r.constant("expected_exponent")).unwrap_or(0.0);
                let (v_min, anchor) = series.first().copied().unwrap_or((1.0, f64::NAN));
                for (r, (v0, _)) in points.iter_mut().zip(&series) {
                    r.tolerance = Tolerance::at_most("a0", tol.anchor_factor * anchor * (v0 / v_min).powf(expected));
                }
                let mut rec = self
                    .summary_record(id, Tolerance::at_most("exponent", expected + tol.exponent_tol))
                    .with("expected_exponent", expected);
                Self::attach_fit(&mut rec, &series);
                Some(rec)
            }
            "bilinear_q1" | "bilinear_q2" => {
                set_all(points, Tolerance::at_most("ratio", tol.bilinear_c_max));
                let worst = aggregate(points.iter().map(|r| r.constant("ratio").unwrap_or(f64::NAN)), Agg::Max);
                Some(self.summary_record(id, Tolerance::at_most("ratio", tol.bilinear_c_max)).with("ratio", worst))
            }
            "holder_sandwich" => {
                set_all(points, Tolerance::at_most("lower_ratio", tol.c_max));
                let expected = points.first().and_then(|r| r.constant("expected_exponent")).unwrap_or(0.0);
                let mut rec = self
                    .summary_record(id, Tolerance::at_most("exponent", expected + tol.exponent_tol))
                    .with("expected_exponent", expected);
                Self::attach_fit(&mut rec, &series(points, &|r| r.coords.v0.unwrap_or(f64::NAN), "upper_ratio"));
                Some(rec)
            }
            "gs_coercivity" => {
                set_all(points, Tolerance::at_least("c_lower", f64::MIN_POSITIVE));
                None
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spread_handles_zeros() {
        assert_eq!(spread_ratio(&[0.0, 0.0]), 1.0);
        assert_eq!(spread_ratio(&[0.0, 1.0]), f64::INFINITY);
        assert_eq!(spread_ratio(&[2.0, 1.0, 4.0]), 4.0);
        assert!(spread_ratio(&[1.0, f64::NAN]).is_nan());
    }

    #[test]
    fn aggregate_propagates_nan() {
        assert!(aggregate([1.0, f64::NAN, 3.0].into_iter(), Agg::Max).is_nan());
        assert_eq!(aggregate([1.0, 3.0].into_iter(), Agg::Min), 1.0);
    }
}

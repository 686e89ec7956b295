use super::Scenario;
use crate::kernel::Kernel;
use crate::numerics::FitResult;
use crate::verifier::{CheckResult, CheckSelection, Verifier};
use crate::{Error, Profile};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::time::Instant;

/// Worst record of a check, measured by how close its constant sits to the bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Worst {
    pub quantity: String,
    #[serde(with = "crate::verifier::result::nonfinite")]
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub check_id: String,
    pub pass: bool,
    pub records: usize,
    pub failed_records: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst: Option<Worst>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitResult>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub records: usize,
    pub passed: usize,
    pub failed: usize,
    pub errored: usize,
    /// Selected checks that do not apply to these parameters.
    pub skipped: Vec<String>,
    pub checks: Vec<CheckSummary>,
}

/// Outcome of a run. Wall-clock times are kept out of the serialized body so that the body
/// depends only on the scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub scenario_digest: String,
    pub records: Vec<CheckResult>,
    pub summary: ReportSummary,
    #[serde(skip)]
    pub timing: BTreeMap<String, f64>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    /// 0 when every record passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        i32::from(!self.all_pass())
    }

    pub fn to_json(&self) -> Result<String, Error> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Config(format!("json: {e}")))
    }
}

fn compare_records(a: &CheckResult, b: &CheckResult) -> Ordering {
    a.check_id.cmp(&b.check_id).then_with(|| {
        let (ka, kb) = (a.coords.sort_key(), b.coords.sort_key());
        ka.iter().zip(&kb).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or_else(|| ka.len().cmp(&kb.len()))
    })
}

/// How far a record sits from failing: below 1 inside the tolerance, above 1 outside.
fn severity(r: &CheckResult) -> f64 {
    let Some(v) = r.constant(&r.tolerance.quantity) else {
        return f64::INFINITY;
    };
    if !v.is_finite() {
        return f64::INFINITY;
    }
    let over = r.tolerance.max.map_or(0.0, |m| if m > 0.0 { v / m } else { (v - m).max(0.0) + 1.0 });
    let under = r.tolerance.min.map_or(0.0, |m| {
        if v > 0.0 && m > 0.0 {
            m / v
        } else if v >= m {
            0.0
        } else {
            f64::INFINITY
        }
    });
    over.max(under)
}

fn summarize(records: &[CheckResult], selected: &[CheckSelection]) -> ReportSummary {
    let mut out = ReportSummary { records: records.len(), ..ReportSummary::default() };
    for r in records {
        if r.pass {
            out.passed += 1;
        } else {
            out.failed += 1;
        }
        if r.tolerance.quantity == "error" {
            out.errored += 1;
        }
    }
    for sel in selected {
        let mine: Vec<&CheckResult> = records.iter().filter(|r| r.check_id == sel.id).collect();
        if mine.is_empty() {
            out.skipped.push(sel.id.clone());
            continue;
        }
        let worst = mine.iter().max_by(|a, b| severity(a).total_cmp(&severity(b))).map(|r| Worst {
            quantity: r.tolerance.quantity.clone(),
            value: r.constant(&r.tolerance.quantity).unwrap_or(f64::NAN),
            bound: r.tolerance.max.or(r.tolerance.min),
        });
        out.checks.push(CheckSummary {
            check_id: sel.id.clone(),
            pass: mine.iter().all(|r| r.pass),
            records: mine.len(),
            failed_records: mine.iter().filter(|r| !r.pass).count(),
            worst,
            fit: mine.iter().find_map(|r| r.fit),
        });
    }
    out
}

/// Selections of the scenario, first occurrence of each id kept, overridden by `checks` when given.
fn selections(scenario: &Scenario) -> Vec<CheckSelection> {
    let mut out: Vec<CheckSelection> = Vec::new();
    for c in &scenario.checks {
        let sel = c.selection();
        if !out.iter().any(|s| s.id == sel.id) {
            out.push(sel);
        }
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out
}

/// Builds the verifier a scenario describes.
pub fn verifier(scenario: &Scenario) -> Result<Verifier, Error> {
    scenario.validate()?;
    let profile = Profile::from_spec(&scenario.profile, scenario.params.d)?;
    let kernel = Kernel::new(profile, scenario.params, scenario.quadrature)?;
    let mut v = Verifier::new(
        kernel,
        scenario.hydro_bounds,
        scenario.sweep.clone(),
        scenario.tolerances.clone(),
        scenario.mc,
        scenario.seed,
    )?;
    v.tolerance_scale = scenario.tolerance_scale;
    Ok(v)
}

/// Runs every selected check on `workers` threads. Each (check, sweep value) pair is one task
/// and all randomness is derived from the seed and the task, so the report does not depend on
/// the worker count. Measurement failures become failing records; only an invalid scenario
/// is an error.
pub fn run(scenario: &Scenario, workers: usize) -> Result<Report, Error> {
    let ver = verifier(scenario)?;
    let selected = selections(scenario);
    let mut tasks = Vec::new();
    for (i, sel) in selected.iter().enumerate() {
        for v in ver.sweep_values(sel)? {
            tasks.push((i, v));
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let measured: Vec<(usize, Vec<CheckResult>, f64)> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(i, v)| {
                let start = Instant::now();
                let recs = ver.measure_or_record(&selected[i], v);
                (i, recs, start.elapsed().as_secs_f64())
            })
            .collect()
    });
    let mut per_check: Vec<Vec<CheckResult>> = vec![Vec::new(); selected.len()];
    let mut timing = BTreeMap::new();
    for (i, recs, secs) in measured {
        per_check[i].extend(recs);
        *timing.entry(selected[i].id.clone()).or_insert(0.0) += secs;
    }
    let mut records: Vec<CheckResult> =
        per_check.into_iter().zip(&selected).flat_map(|(recs, sel)| ver.summarize(sel, recs)).collect();
    records.sort_by(compare_records);
    let summary = summarize(&records, &selected);
    Ok(Report {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        scenario_digest: scenario.digest()?,
        records,
        summary,
        timing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ModelParams;

    #[test]
    fn empty_check_list_gives_empty_passing_report() {
        let s = Scenario::new(ModelParams::new(3, 0.25, 0.0).unwrap(), 42);
        let r = run(&s, 2).unwrap();
        assert!(r.records.is_empty());
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn inapplicable_check_is_skipped() {
        let s = Scenario::new(ModelParams::new(3, 0.25, 0.0).unwrap(), 42).with_checks(&["cancel2"]);
        let r = run(&s, 1).unwrap();
        assert_eq!(r.summary.skipped, vec!["cancel2".to_string()]);
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn records_are_sorted_and_worker_independent() {
        let mut s =
            Scenario::new(ModelParams::new(3, 0.25, 0.0).unwrap(), 42).with_checks(&["da_equivalence", "cov_pv"]);
        s.checks.push(crate::verifier::CheckEntry::Selection(CheckSelection {
            n: Some(500),
            ..CheckSelection::new("da_equivalence")
        }));
        let a = run(&s, 1).unwrap();
        let b = run(&s, 4).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        for w in a.records.windows(2) {
            assert_ne!(compare_records(&w[0], &w[1]), Ordering::Greater);
        }
    }
}

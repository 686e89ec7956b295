use super::Report;
use crate::verifier::CheckResult;
use crate::Error;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Config(format!("unknown format '{other}', expected json or csv"))),
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

const AXES: [&str; 4] = ["v0", "speed", "r", "rho"];

fn coordinate(r: &CheckResult, axis: &str) -> Option<f64> {
    let c = &r.coords;
    match axis {
        "v0" => c.v0,
        "speed" => c.v.as_ref().map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt()),
        "r" => c.r,
        _ => c.rho,
    }
}

/// Abscissa of a check's series: the first coordinate that varies over its records, else the
/// first one present.
fn abscissa(records: &[&CheckResult]) -> Option<&'static str> {
    let values = |axis| {
        let mut xs: Vec<f64> = records.iter().filter_map(|r| coordinate(r, axis)).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs.len()
    };
    AXES.iter().find(|a| values(a) > 1).or_else(|| AXES.iter().find(|a| values(a) > 0)).copied()
}

/// One row per measured constant: `check_id, v0, r, constant, value, pass`.
pub fn report_csv(report: &Report) -> Result<String, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["check_id", "v0", "r", "constant", "value", "pass"]).map_err(csv_err)?;
    for r in &report.records {
        for c in &r.constants {
            w.write_record([
                r.check_id.as_str(),
                &opt(r.coords.v0),
                &opt(r.coords.r),
                &c.name,
                &c.value.to_string(),
                if r.pass { "true" } else { "false" },
            ])
            .map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(std::io::Error::other(e)))
}

/// Plot data of one check: the series of every constant against the abscissa, then the
/// sweep-level fit as rows with `x_name = fit`.
pub fn series_csv(report: &Report, check_id: &str) -> Result<String, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x_name", "x", "constant", "value"]).map_err(csv_err)?;
    let mine: Vec<&CheckResult> = report.records.iter().filter(|r| r.check_id == check_id).collect();
    let axis = abscissa(&mine);
    for r in mine {
        if let Some((name, x)) = axis.and_then(|a| Some((a, coordinate(r, a)?))) {
            for c in &r.constants {
                w.write_record([name, &x.to_string(), &c.name, &c.value.to_string()]).map_err(csv_err)?;
            }
        }
        if let Some(fit) = &r.fit {
            for (name, v) in [("exponent", fit.exponent), ("r_squared", fit.r_squared)] {
                w.write_record(["fit", "", name, &v.to_string()]).map_err(csv_err)?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(std::io::Error::other(e)))
}

/// Writes `report.json` or `report.csv`, one `series_<id>.csv` per check and `timing.json`.
/// Returns the written paths.
pub fn emit(report: &Report, dir: &Path, format: Format) -> Result<Vec<PathBuf>, Error> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut write = |name: String, body: String| -> Result<(), Error> {
        let p = dir.join(name);
        std::fs::write(&p, body)?;
        written.push(p);
        Ok(())
    };
    match format {
        Format::Json => write("report.json".into(), report.to_json()? + "\n")?,
        Format::Csv => write("report.csv".into(), report_csv(report)?)?,
    }
    let mut ids: Vec<&str> = report.records.iter().map(|r| r.check_id.as_str()).collect();
    ids.dedup();
    for id in ids {
        write(format!("series_{id}.csv"), series_csv(report, id)?)?;
    }
    let timing = serde_json::to_string_pretty(&report.timing).map_err(|e| Error::Config(e.to_string()))?;
    write("timing.json".into(), timing + "\n")?;
    Ok(written)
}

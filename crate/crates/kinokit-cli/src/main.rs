use clap::{Args, Parser, Subcommand};
use kinokit::geometry::{kdistance, Point};
use kinokit::harness::{emit, reference_scenarios, run, Format, Report, Scenario};
use kinokit::kernel::Kernel;
use kinokit::numerics::quad::QuadratureSpec;
use kinokit::verifier::{CheckEntry, CheckSelection};
use kinokit::{Error, ModelParams, Profile, Vec3};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "kinokit", version, about = "Kinetic geometry and collision-kernel ellipticity checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Kinetic distance between two phase-space points `t,x..,v..`.
    Distance {
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, allow_hyphen_values = true)]
        z1: String,
        #[arg(long, allow_hyphen_values = true)]
        z2: String,
    },
    /// Kernel value `K_f(v, v')` for the scenario's profile and parameters.
    Kernel {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long, allow_hyphen_values = true)]
        vp: String,
    },
    /// Mass, energy and entropy of the scenario's profile against its bounds.
    Hydro {
        #[arg(long)]
        config: PathBuf,
    },
    /// Runs the scenario's checks, writes the report and exits 1 if any record fails.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Runs the built-in reference suite instead of `--config`.
        #[arg(long)]
        all: bool,
    },
    /// Runs the checks named by `--checks` and writes their plot series.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Prints the summary of a written report, optionally re-emitting it.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: String,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; falls back to KINOKIT_WORKERS, then to 1.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value = "json")]
    format: String,
    /// Comma-separated check ids replacing the scenario's selection.
    #[arg(long)]
    checks: Option<String>,
    /// Comma-separated `|v0|` grid replacing the scenario's.
    #[arg(long)]
    v0: Option<String>,
    #[arg(long)]
    tolerance_scale: Option<f64>,
}

/// Failure before any check ran: exit code 2.
struct ConfigError(String);

impl From<Error> for ConfigError {
    fn from(e: Error) -> Self {
        ConfigError(e.to_string())
    }
}

fn numbers(text: &str, what: &str) -> Result<Vec<f64>, ConfigError> {
    text.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| ConfigError(format!("{what}: cannot parse '{x}'"))))
        .collect()
}

fn vector(xs: &[f64], d: usize, what: &str) -> Result<Vec3, ConfigError> {
    if xs.len() != d {
        return Err(ConfigError(format!("{what} needs {d} components, got {}", xs.len())));
    }
    Ok(Vec3::from_fn(|i, _| xs.get(i).copied().unwrap_or(0.0)))
}

fn point(text: &str, d: usize) -> Result<Point, ConfigError> {
    let xs = numbers(text, "point")?;
    if xs.len() != 1 + 2 * d {
        return Err(ConfigError(format!("a point has 1 + 2d = {} components, got {}", 1 + 2 * d, xs.len())));
    }
    Ok(Point::new(xs[0], vector(&xs[1..=d], d, "x")?, vector(&xs[d + 1..], d, "v")?))
}

fn workers(flag: Option<usize>) -> Result<usize, ConfigError> {
    match flag {
        Some(n) => Ok(n),
        None => match std::env::var("KINOKIT_WORKERS") {
            Ok(v) => v.trim().parse().map_err(|_| ConfigError(format!("KINOKIT_WORKERS: cannot parse '{v}'"))),
            Err(_) => Ok(1),
        },
    }
    .and_then(|n| if n == 0 { Err(ConfigError("workers must be positive".into())) } else { Ok(n) })
}

/// Applies the command-line overrides and revalidates.
fn apply_overrides(mut s: Scenario, a: &RunArgs) -> Result<Scenario, ConfigError> {
    if let Some(seed) = a.seed {
        s.seed = seed;
    }
    if let Some(ids) = &a.checks {
        let old = std::mem::take(&mut s.checks);
        for id in ids.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let kept = old.iter().find(|c| c.selection().id == id).cloned();
            s.checks.push(kept.unwrap_or_else(|| CheckEntry::Selection(CheckSelection::new(id)).normalized()));
        }
    }
    if let Some(v0) = &a.v0 {
        s.sweep.v0_magnitudes = numbers(v0, "--v0")?;
    }
    if let Some(x) = a.tolerance_scale {
        s.tolerance_scale = x;
    }
    s.validate()?;
    Ok(s)
}

fn print_summary(name: &str, report: &Report) {
    let sm = &report.summary;
    println!("{name}: {} records, {} passed, {} failed, {} errored", sm.records, sm.passed, sm.failed, sm.errored);
    for c in &sm.checks {
        let worst = c.worst.as_ref().map_or(String::new(), |w| match w.bound {
            Some(b) => format!(" worst {}={:.4e} (bound {:.4e})", w.quantity, w.value, b),
            None => format!(" worst {}={:.4e}", w.quantity, w.value),
        });
        let fit = c.fit.map_or(String::new(), |f| format!(" exponent={:.4} r2={:.4}", f.exponent, f.r_squared));
        println!("  {} {}{}{}", if c.pass { "PASS" } else { "FAIL" }, c.check_id, worst, fit);
    }
    for id in &sm.skipped {
        println!("  SKIP {id}");
    }
}

fn run_one(name: &str, scenario: &Scenario, a: &RunArgs, dir: &Path) -> Result<bool, ConfigError> {
    let format: Format = a.format.parse()?;
    let report = run(scenario, workers(a.workers)?)?;
    emit(&report, dir, format).map_err(|e| ConfigError(format!("writing {}: {e}", dir.display())))?;
    print_summary(name, &report);
    Ok(report.all_pass())
}

fn load(path: &Option<PathBuf>) -> Result<Scenario, ConfigError> {
    match path {
        Some(p) => Ok(Scenario::load(p)?),
        None => Err(ConfigError("--config is required".into())),
    }
}

fn execute(cli: Cli) -> Result<bool, ConfigError> {
    match cli.command {
        Command::Distance { s, d, z1, z2 } => {
            if d != 2 && d != 3 {
                return Err(ConfigError(format!("d must be 2 or 3, got {d}")));
            }
            ModelParams::new(d, s, 0.0)?;
            println!("{}", kdistance(&point(&z1, d)?, &point(&z2, d)?, s));
            Ok(true)
        }
        Command::Kernel { config, v, vp } => {
            let sc = Scenario::load(&config)?;
            let d = sc.params.d;
            let k = Kernel::new(Profile::from_spec(&sc.profile, d)?, sc.params, sc.quadrature)?;
            let e = k
                .eval(&vector(&numbers(&v, "--v")?, d, "--v")?, &vector(&numbers(&vp, "--vp")?, d, "--vp")?)
                .map_err(|e| ConfigError(e.to_string()))?;
            println!("{}", serde_json::json!({ "value": e.value, "error_est": e.error_est }));
            Ok(true)
        }
        Command::Hydro { config } => {
            let sc = Scenario::load(&config)?;
            let profile = Profile::from_spec(&sc.profile, sc.params.d)?;
            let h = profile.hydro_quantities(&QuadratureSpec::default())?;
            let ok = sc.hydro_bounds.admits(&h);
            println!("{}", serde_json::json!({ "hydro": h, "bounds": sc.hydro_bounds, "admitted": ok }));
            Ok(ok)
        }
        Command::Verify { run: a, all } => {
            if all {
                let mut ok = true;
                for (name, s) in reference_scenarios() {
                    let s = apply_overrides(s, &a)?;
                    ok &= run_one(&name, &s, &a, &a.out.join(&name))?;
                }
                Ok(ok)
            } else {
                let s = apply_overrides(load(&a.config)?, &a)?;
                run_one("scenario", &s, &a, &a.out)
            }
        }
        Command::Sweep { run: a } => {
            if a.checks.is_none() {
                return Err(ConfigError("sweep needs --checks".into()));
            }
            let s = apply_overrides(load(&a.config)?, &a)?;
            run_one("sweep", &s, &a, &a.out)
        }
        Command::Report { input, out, format } => {
            let text = std::fs::read_to_string(&input).map_err(|e| ConfigError(format!("{}: {e}", input.display())))?;
            let report: Report =
                serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", input.display())))?;
            if let Some(dir) = out {
                emit(&report, &dir, format.parse()?).map_err(|e| ConfigError(e.to_string()))?;
            }
            print_summary(&input.display().to_string(), &report);
            Ok(report.all_pass())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(ConfigError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

//! The `crpoly` command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numeric
//! failure. `CRPOLY_TOL` overrides the base membership tolerance.

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};
use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use crate::crmap::{build_basis, RealCoeffVector};
use crate::symmetry;
use crate::volume::{self, VolumeMethod};
use crate::wn_set::{self, Tolerances};
use crate::{rng, Error};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

pub const TOLERANCE_ENV: &str = "CRPOLY_TOL";

#[derive(Debug, Parser)]
#[command(
    name = "crpoly",
    version,
    about = "Conjugate-reciprocal polynomials with all roots on the unit circle"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the basis matrix X_{N,omega} (omega^{1/2} on the principal branch).
    Basis {
        #[arg(long = "n")]
        n: usize,
        /// Argument of omega in radians.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        omega_arg: f64,
        #[arg(long)]
        json: bool,
    },
    /// Classify a point of R^{N-1} as interior, boundary or exterior of W_N.
    Classify {
        #[arg(long = "n")]
        n: usize,
        /// Comma-separated coordinates a_1,...,a_{N-1}.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        coords: Vec<f64>,
        /// Base radial tolerance for simple roots.
        #[arg(long)]
        tol: Option<f64>,
        /// Angular span below which roots count as repeated.
        #[arg(long)]
        cluster_angle: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Sample uniform root vectors and their points of W_N.
    Sample {
        #[arg(long = "n")]
        n: usize,
        #[arg(long)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = SampleFormat::Csv)]
        format: SampleFormat,
    },
    /// Run the basis, vertex and symmetry invariant suite.
    Verify {
        #[arg(long = "n")]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Compute or estimate vol(W_N).
    Volume {
        #[arg(long = "n")]
        n: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::ClosedForm)]
        method: MethodArg,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Independent random streams; defaults to the available parallelism.
        #[arg(long)]
        streams: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Emit the boundary curve of W_3, or the (3,1) edge family of W_4.
    Boundary {
        #[arg(long = "n")]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        points: usize,
        #[arg(long, value_enum, default_value_t = CurveFormat::Csv)]
        format: CurveFormat,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SampleFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurveFormat {
    Csv,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    ClosedForm,
    McJacobian,
    McHit,
}

impl From<MethodArg> for VolumeMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::ClosedForm => VolumeMethod::ClosedForm,
            MethodArg::McJacobian => VolumeMethod::McJacobian,
            MethodArg::McHit => VolumeMethod::McHit,
        }
    }
}

enum Failure {
    Library(Error),
    Io(std::io::Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

/// Parse `args` (program name first) and run; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{rendered}")
            } else {
                write!(out, "{rendered}")
            };
            return code;
        }
    };
    match execute(&config, out) {
        Ok(code) => code,
        Err(Failure::Library(e)) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::NumericFailure { .. } | Error::QuadratureFailure { .. } => EXIT_NUMERIC,
                _ => EXIT_USAGE,
            }
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

/// Base tolerance: explicit flag, else `CRPOLY_TOL`, else the default.
fn tolerances(flag: Option<f64>, cluster_angle: Option<f64>) -> Result<Tolerances, Failure> {
    let mut tol = Tolerances::default();
    let env = std::env::var(TOLERANCE_ENV).ok();
    let base = match (flag, env) {
        (Some(t), _) => Some(t),
        (None, Some(s)) => Some(
            s.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("{TOLERANCE_ENV}={s} is not a number")))?,
        ),
        (None, None) => None,
    };
    if let Some(b) = base {
        if !(b > 0.0 && b < 1.0) {
            return Err(Failure::Usage(format!("tolerance {b} must lie in (0, 1)")));
        }
        tol.base = b;
    }
    if let Some(c) = cluster_angle {
        if c.is_nan() || c <= 0.0 {
            return Err(Failure::Usage(format!("cluster angle {c} must be positive")));
        }
        tol.cluster_angle = c;
    }
    Ok(tol)
}

/// Six significant digits for text output.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if (-4..6).contains(&magnitude) {
        format!("{:.*}", (5 - magnitude).max(0) as usize, x)
    } else {
        format!("{x:.5e}")
    }
}

fn complex_pair(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn write_json(out: &mut dyn Write, value: &Value) -> std::io::Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value).expect("serializable"))
}

fn default_streams() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn execute(config: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    match &config.command {
        Command::Basis { n, omega_arg, json } => {
            let basis = build_basis(*n, Complex64::from_polar(1.0, *omega_arg))?;
            if *json {
                let rows: Vec<Value> = basis
                    .rows()
                    .into_iter()
                    .map(|row| Value::Array(row.into_iter().map(complex_pair).collect()))
                    .collect();
                write_json(
                    out,
                    &json!({
                        "n": n,
                        "omega_arg": omega_arg,
                        "sqrt_branch": "principal",
                        "entries": rows,
                    }),
                )?;
            } else {
                writeln!(
                    out,
                    "X_{{{n}}} (omega = e^{{i {}}}, principal branch for omega^(1/2))",
                    sig6(*omega_arg)
                )?;
                for row in basis.rows() {
                    let cells: Vec<String> = row
                        .iter()
                        .map(|z| format!("{:>10} {:>+10}i", sig6(z.re), sig6(z.im)))
                        .collect();
                    writeln!(out, "{}", cells.join("  "))?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Classify {
            n,
            coords,
            tol,
            cluster_angle,
            json,
        } => {
            if coords.len() + 1 != *n {
                return Err(Failure::Usage(format!(
                    "--n {n} needs {} coordinates, got {}",
                    n - 1,
                    coords.len()
                )));
            }
            let tol = tolerances(*tol, *cluster_angle)?;
            let a = RealCoeffVector::new(coords.clone())?;
            let verdict = wn_set::classify(&a, &tol)?;
            if *json {
                write_json(
                    out,
                    &json!({
                        "n": n,
                        "coords": coords,
                        "status": verdict.status,
                        "unit_residual": verdict.unit_residual,
                        "residual_ratio": verdict.residual_ratio,
                        "disc_magnitude": verdict.disc_magnitude,
                        "partition": verdict.partition,
                        "diagnostic": verdict.diagnostic,
                    }),
                )?;
            } else {
                let partition = verdict.partition.as_ref().map_or("-".to_string(), |p| p.to_string());
                writeln!(out, "status         {}", verdict.status)?;
                writeln!(out, "partition      {partition}")?;
                writeln!(out, "unit_residual  {}", sig6(verdict.unit_residual))?;
                writeln!(out, "disc_magnitude {}", sig6(verdict.disc_magnitude))?;
                if let Some(d) = &verdict.diagnostic {
                    writeln!(out, "diagnostic     {d}")?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Sample { n, count, seed, format } => {
            let mut stream = rng::stream(*seed, 0);
            let mut rows = Vec::with_capacity(*count as usize);
            for _ in 0..*count {
                let (rv, a) = wn_set::sample_point(*n, &mut stream)?;
                rows.push((rv.angles(), a.into_coords()));
            }
            match format {
                SampleFormat::Csv => {
                    let header: Vec<String> = (1..=*n)
                        .map(|k| format!("theta_{k}"))
                        .chain((1..*n).map(|k| format!("a_{k}")))
                        .collect();
                    writeln!(out, "{}", header.join(","))?;
                    for (thetas, coords) in rows {
                        let cells: Vec<String> = thetas.iter().chain(&coords).map(|x| format!("{x:?}")).collect();
                        writeln!(out, "{}", cells.join(","))?;
                    }
                }
                SampleFormat::Json => {
                    let samples: Vec<Value> = rows
                        .into_iter()
                        .map(|(thetas, coords)| json!({ "thetas": thetas, "coords": coords }))
                        .collect();
                    write_json(
                        out,
                        &json!({ "n": n, "seed": seed, "count": count, "samples": samples }),
                    )?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Verify { n, seed, json } => {
            let checks = symmetry::verification_suite(*n, *seed)?;
            let all = checks.iter().all(|c| c.passed);
            if *json {
                write_json(out, &json!({ "n": n, "seed": seed, "passed": all, "checks": checks }))?;
            } else {
                writeln!(out, "{:<44} {:>12} {:>12}  result", "check", "residual", "threshold")?;
                for c in &checks {
                    writeln!(
                        out,
                        "{:<44} {:>12} {:>12}  {}",
                        c.name,
                        sig6(c.residual),
                        sig6(c.threshold),
                        if c.passed { "PASS" } else { "FAIL" }
                    )?;
                }
                writeln!(
                    out,
                    "{}",
                    if all {
                        "all checks passed"
                    } else {
                        "verification FAILED"
                    }
                )?;
            }
            Ok(if all { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
        Command::Volume {
            n,
            method,
            samples,
            seed,
            streams,
            json,
        } => {
            let streams = streams.unwrap_or_else(default_streams).max(1);
            let start = Instant::now();
            let estimate = match VolumeMethod::from(*method) {
                VolumeMethod::ClosedForm => volume::volume_closed_form(*n)?,
                VolumeMethod::McJacobian => volume::volume_mc_jacobian(*n, *samples, *seed, streams)?,
                VolumeMethod::McHit => volume::volume_mc_hit(*n, *samples, *seed, streams)?,
            };
            let seconds = start.elapsed().as_secs_f64();
            if *json {
                let mut record = json!({
                    "n": n,
                    "method": estimate.method,
                    "value": estimate.value,
                    "std_error": estimate.std_error,
                    "samples": estimate.samples,
                    "seed": estimate.seed,
                    "streams": estimate.streams,
                    "seconds": seconds,
                });
                if let Some(p) = estimate.hit_fraction {
                    record["hit_fraction"] = json!(p);
                }
                write_json(out, &record)?;
            } else {
                writeln!(out, "method     {}", estimate.method)?;
                writeln!(out, "value      {}", sig6(estimate.value))?;
                writeln!(out, "std_error  {}", sig6(estimate.std_error))?;
                writeln!(out, "samples    {}", estimate.samples)?;
                if let Some(p) = estimate.hit_fraction {
                    writeln!(out, "hit_frac   {}", sig6(p))?;
                }
                writeln!(out, "seconds    {}", sig6(seconds))?;
            }
            Ok(EXIT_OK)
        }
        Command::Boundary { n, points, format } => {
            let curve = volume::boundary_curve(*n, *points)?;
            match format {
                CurveFormat::Svg => write!(out, "{}", volume::boundary_svg(&curve))?,
                CurveFormat::Csv => {
                    let mut header = vec!["phi".to_string()];
                    header.extend((1..*n).map(|k| format!("a_{k}")));
                    header.push("proj_x".into());
                    header.push("proj_y".into());
                    writeln!(out, "{}", header.join(","))?;
                    for ((phi, a), [x, y]) in curve.angles.iter().zip(&curve.points).zip(&curve.projection) {
                        let mut cells = vec![format!("{phi:?}")];
                        cells.extend(a.coords().iter().map(|v| format!("{v:?}")));
                        cells.push(format!("{x:?}"));
                        cells.push(format!("{y:?}"));
                        writeln!(out, "{}", cells.join(","))?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["crpoly"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn sig6_formatting() {
        assert_eq!(sig6(12.566370614359172), "12.5664");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(1.5e-9), "1.50000e-9");
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_capture(&["nonsense"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["classify", "--n", "3", "--coords", "1"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["basis", "--n", "1"]).0, EXIT_USAGE);
    }

    #[test]
    fn classify_text() {
        let (code, out, _) = run_capture(&["classify", "--n", "3", "--coords", "0,0"]);
        assert_eq!(code, 0);
        assert!(out.contains("interior"));
        assert!(out.contains("(1,1,1)"));
    }
}

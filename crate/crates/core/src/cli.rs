//! The `shapeflow` command line.
//!
//! Exit status 0 on success, 1 on usage errors (bad flags, malformed manifold
//! JSON, inputs of the wrong dimension), 2 on numerical failures, which are
//! reported on the error stream as JSON `{code, message, tau?}`.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::curvature::{total_curvature, CurvatureValue};
use crate::error::{Error, Result};
use crate::ga::Multivector;
use crate::manifold::{Manifold, ManifoldKind};
use crate::shapemin::{shape_min_solve, verify_minimality, ShapeMinProblem};
use crate::transport::{
    format_float, geodesic_trace, sphere_loop, transport_rotors, CurveTrace, LOOP_NAMES,
};

#[derive(Debug, Parser)]
#[command(name = "shapeflow", version, about = "Shape-tensor geometry of embedded manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Shape tensor S(a) at a point.
    Shape {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        point: PointArgs,
        /// Direction a.
        #[arg(long, value_parser = parse_vector)]
        a: Coords,
    },
    /// Total curvature S(a)×S(b) with its intrinsic and extrinsic parts.
    Curvature {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, value_parser = parse_vector)]
        a: Coords,
        #[arg(long, value_parser = parse_vector)]
        b: Coords,
    },
    /// Parallel transport of a vector along a geodesic or a named sphere loop.
    Transport {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        curve: CurveArgs,
        /// Named sphere loop used instead of a geodesic.
        #[arg(long = "loop")]
        loop_name: Option<String>,
        /// Vector to transport [default: the initial direction].
        #[arg(long, value_parser = parse_vector)]
        vector: Option<Coords>,
    },
    /// Geodesic from x0 in direction u0.
    Geodesic {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        curve: CurveArgs,
    },
    /// Shape-minimizing curve from x0 in direction u0.
    Shapemin {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        curve: CurveArgs,
    },
    /// Holonomy rotation angle of a named sphere loop.
    Holonomy {
        #[command(flatten)]
        common: Common,
        /// One of: octant, equator, latitude:<deg>.
        #[arg(long = "loop")]
        loop_name: String,
    },
    /// Perturbation check of a shape-minimizing curve.
    Verify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long, default_value_t = 20)]
        perturbations: usize,
        /// Perturbation size.
        #[arg(long, default_value_t = 1e-2)]
        amplitude: f64,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Manifold description (JSON file).
    #[arg(long)]
    manifold: PathBuf,
    /// Output file [default: standard output].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Integration step.
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    /// Random seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output format [default: csv for curves, json otherwise].
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct PointArgs {
    /// Point on the manifold, comma separated.
    #[arg(long, value_parser = parse_vector)]
    x0: Coords,
}

#[derive(Debug, Args)]
struct CurveArgs {
    /// Start point, comma separated.
    #[arg(long, value_parser = parse_vector)]
    x0: Option<Coords>,
    /// Start direction, comma separated.
    #[arg(long, value_parser = parse_vector)]
    u0: Option<Coords>,
    /// Arc length to integrate.
    #[arg(long)]
    length: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Gnuplot,
}

/// A comma-separated vector argument.
#[derive(Debug, Clone, PartialEq)]
struct Coords(Vec<f64>);

fn parse_vector(text: &str) -> std::result::Result<Coords, String> {
    text.split(',')
        .map(|part| {
            part.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("`{part}` is not a number"))
        })
        .collect::<std::result::Result<Vec<_>, _>>()
        .map(Coords)
}

/// Failure of a command: usage errors exit 1, numerical ones exit 2.
enum Failure {
    Usage(String),
    Numeric(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numeric() {
            Failure::Numeric(e)
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure::Usage(message.into())
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    1
                }
            };
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => 0,
        Err(Failure::Usage(message)) => {
            let _ = writeln!(stderr, "error: {message}");
            1
        }
        Err(Failure::Numeric(e)) => {
            let mut obj = Map::new();
            obj.insert("code".into(), json!(e.code()));
            obj.insert("message".into(), json!(e.to_string()));
            if let Some(tau) = e.tau() {
                obj.insert("tau".into(), json!(tau));
            }
            let _ = writeln!(stderr, "{}", Value::Object(obj));
            2
        }
    }
}

fn load_manifold(path: &Path) -> std::result::Result<Manifold, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(Manifold::from_json(&text)?)
}

fn emit(common: &Common, bytes: &[u8], stdout: &mut dyn Write) -> std::result::Result<(), Failure> {
    match &common.out {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(bytes)
            .map_err(|e| usage(format!("cannot write output: {e}"))),
    }
}

fn json_bytes(value: &Value) -> Vec<u8> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    text.push('\n');
    text.into_bytes()
}

/// Bivector part as `{"e12": …, "e13": …}`.
pub fn bivector_json(b: &Multivector) -> Value {
    let mut map = Map::new();
    for (i, j, v) in b.bivector_components() {
        map.insert(format!("e{i}{j}"), json!(v));
    }
    Value::Object(map)
}

/// The JSON form `{point, a, b, total, intrinsic, extrinsic}`.
pub fn curvature_json(c: &CurvatureValue) -> Value {
    json!({
        "point": c.base_point,
        "a": c.a,
        "b": c.b,
        "total": bivector_json(&c.total),
        "intrinsic": bivector_json(&c.intrinsic),
        "extrinsic": bivector_json(&c.extrinsic),
    })
}

/// Writes a trace as CSV or gnuplot columns.
pub fn emit_plot_data(trace: &CurveTrace, gnuplot: bool) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    if gnuplot {
        trace.write_gnuplot(&mut buf, true)?;
    } else {
        trace.write_csv(&mut buf, true)?;
    }
    Ok(buf)
}

fn json_only(common: &Common) -> std::result::Result<(), Failure> {
    match common.format {
        None | Some(Format::Json) => Ok(()),
        Some(_) => Err(usage("this command only produces json output")),
    }
}

fn check_step(common: &Common) -> std::result::Result<(), Failure> {
    if common.step > 0.0 && common.step.is_finite() {
        Ok(())
    } else {
        Err(usage("--step must be positive"))
    }
}

fn check_vector(m: &Manifold, name: &str, v: &[f64]) -> std::result::Result<(), Failure> {
    if v.len() == m.ambient_dim() {
        Ok(())
    } else {
        Err(usage(format!(
            "--{name} has {} components, the manifold lives in R^{}",
            v.len(),
            m.ambient_dim()
        )))
    }
}

struct Start {
    x0: Vec<f64>,
    u0: Vec<f64>,
    length: f64,
}

fn start(m: &Manifold, curve: &CurveArgs) -> std::result::Result<Start, Failure> {
    let x0 = curve.x0.clone().ok_or_else(|| usage("--x0 is required"))?.0;
    let u0 = curve.u0.clone().ok_or_else(|| usage("--u0 is required"))?.0;
    let length = curve.length.ok_or_else(|| usage("--length is required"))?;
    check_vector(m, "x0", &x0)?;
    check_vector(m, "u0", &u0)?;
    if !(length >= 0.0 && length.is_finite()) {
        return Err(usage("--length must be non-negative"));
    }
    Ok(Start { x0, u0, length })
}

fn named_loop(m: &Manifold, name: &str, step: f64) -> std::result::Result<CurveTrace, Failure> {
    match m.kind() {
        ManifoldKind::Sphere {
            radius,
            ambient_dim: 3,
        } => Ok(sphere_loop(*radius, name, step)?),
        _ => Err(usage(format!(
            "named loops ({}) need a sphere in R^3",
            LOOP_NAMES.join(", ")
        ))),
    }
}

fn trace_output(
    common: &Common,
    trace: &CurveTrace,
    extra: Vec<(&str, Value)>,
) -> std::result::Result<Vec<u8>, Failure> {
    Ok(match common.format.unwrap_or(Format::Csv) {
        Format::Csv => emit_plot_data(trace, false)?,
        Format::Gnuplot => emit_plot_data(trace, true)?,
        Format::Json => {
            let last = trace.last();
            let mut obj = Map::new();
            obj.insert("final_point".into(), json!(last.x));
            obj.insert("final_direction".into(), json!(last.u));
            obj.insert("length".into(), json!(trace.length()));
            obj.insert("samples".into(), json!(trace.len()));
            for (k, v) in extra {
                obj.insert(k.into(), v);
            }
            json_bytes(&Value::Object(obj))
        }
    })
}

fn execute(command: Command, stdout: &mut dyn Write) -> std::result::Result<(), Failure> {
    match command {
        Command::Shape { common, point, a } => {
            json_only(&common)?;
            let m = load_manifold(&common.manifold)?;
            let (x0, a) = (point.x0.0, a.0);
            check_vector(&m, "x0", &x0)?;
            check_vector(&m, "a", &a)?;
            let s = m.shape_tensor_estimate(&x0, &a)?;
            let value = json!({
                "point": x0,
                "a": a,
                "shape": bivector_json(&s.value),
                "discarded": s.discarded,
            });
            emit(&common, &json_bytes(&value), stdout)
        }
        Command::Curvature { common, point, a, b } => {
            json_only(&common)?;
            let m = load_manifold(&common.manifold)?;
            let (x0, a, b) = (point.x0.0, a.0, b.0);
            check_vector(&m, "x0", &x0)?;
            check_vector(&m, "a", &a)?;
            check_vector(&m, "b", &b)?;
            let c = total_curvature(&m, &x0, &a, &b)?;
            emit(&common, &json_bytes(&curvature_json(&c)), stdout)
        }
        Command::Transport {
            common,
            curve,
            loop_name,
            vector,
        } => {
            check_step(&common)?;
            let m = load_manifold(&common.manifold)?;
            let trace = match &loop_name {
                Some(name) => named_loop(&m, name, common.step)?,
                None => {
                    let s = start(&m, &curve)?;
                    geodesic_trace(&m, &s.x0, &s.u0, s.length, common.step)?
                }
            };
            let v = vector.map_or_else(|| trace.first().u.clone(), |c| c.0);
            check_vector(&m, "vector", &v)?;
            let report = transport_rotors(&m, &trace)?;
            let moved = report
                .rotors
                .iter()
                .map(|r| r.apply_vector(&v))
                .collect::<Result<Vec<_>>>()?;
            let bytes = match common.format.unwrap_or(Format::Csv) {
                Format::Json => {
                    let r = report.final_rotor();
                    json_bytes(&json!({
                        "final_point": trace.last().x,
                        "vector": v,
                        "transported": moved.last(),
                        "rotation_angle": r.rotation_angle(),
                        "max_defect": report.max_defect,
                    }))
                }
                format => transported_columns(&trace, &moved, format == Format::Gnuplot)?,
            };
            emit(&common, &bytes, stdout)
        }
        Command::Geodesic { common, curve } => {
            check_step(&common)?;
            let m = load_manifold(&common.manifold)?;
            let s = start(&m, &curve)?;
            let trace = geodesic_trace(&m, &s.x0, &s.u0, s.length, common.step)?;
            let bytes = trace_output(&common, &trace, Vec::new())?;
            emit(&common, &bytes, stdout)
        }
        Command::Shapemin { common, curve } => {
            check_step(&common)?;
            let m = load_manifold(&common.manifold)?;
            let s = start(&m, &curve)?;
            let problem = ShapeMinProblem::new(m, &s.x0, &s.u0, s.length, common.step);
            let solution = shape_min_solve(&problem)?;
            let extra = vec![("max_span_residual", json!(solution.max_span_residual))];
            let bytes = trace_output(&common, &solution.trace, extra)?;
            emit(&common, &bytes, stdout)
        }
        Command::Holonomy { common, loop_name } => {
            json_only(&common)?;
            check_step(&common)?;
            let m = load_manifold(&common.manifold)?;
            let trace = named_loop(&m, &loop_name, common.step)?;
            let r = crate::transport::holonomy(&m, &trace)?;
            let value = json!({
                "loop": loop_name,
                "rotation_angle": r.rotation_angle(),
            });
            emit(&common, &json_bytes(&value), stdout)
        }
        Command::Verify {
            common,
            curve,
            perturbations,
            amplitude,
        } => {
            json_only(&common)?;
            check_step(&common)?;
            if !(amplitude > 0.0 && amplitude.is_finite()) {
                return Err(usage("--amplitude must be positive"));
            }
            let m = load_manifold(&common.manifold)?;
            let s = start(&m, &curve)?;
            let problem = ShapeMinProblem::new(m.clone(), &s.x0, &s.u0, s.length, common.step);
            let trace = shape_min_solve(&problem)?.trace;
            let report = verify_minimality(&m, &trace, perturbations, amplitude, common.seed)?;
            let value = serde_json::to_value(&report).expect("report serializes");
            emit(&common, &json_bytes(&value), stdout)
        }
    }
}

/// Columns `tau, x1…xN, v1…vN` with the transported vector `v`.
fn transported_columns(trace: &CurveTrace, moved: &[Vec<f64>], gnuplot: bool) -> Result<Vec<u8>> {
    let n = trace.dim();
    let mut header = vec!["tau".to_string()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    header.extend((1..=n).map(|i| format!("v{i}")));
    let rows = trace.samples().iter().zip(moved).map(|(s, v)| {
        std::iter::once(s.tau)
            .chain(s.x.iter().copied())
            .chain(v.iter().copied())
            .map(format_float)
            .collect::<Vec<_>>()
    });
    let mut buf = Vec::new();
    if gnuplot {
        writeln!(buf, "# {}", header.join(" "))?;
        for row in rows {
            writeln!(buf, "{}", row.join(" "))?;
        }
    } else {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(&header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
    }
    Ok(buf)
}

//! `eisenhart` command-line tool.

mod analyze;
mod render;

use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use eisenhart_core::diagnostics::DEFAULT_ROUTE_TOL;
use eisenhart_core::error::{MathError, ModelError};
use eisenhart_core::matter::{parse_profile_expr, solve_antisym_profile, ProfileProblem};
use eisenhart_core::metric::{builtin_model, load_model, CoeffSet, ExampleProfiles, SpacetimeModel};
use eisenhart_core::verify::{linearity_check, verify_example, Grid, VerifyConfig};

use analyze::{run_analyze, AnalysisRequest};

const EXIT_INPUT: u8 = 1;
const EXIT_MATH: u8 = 2;
const EXIT_CONSISTENCY: u8 = 3;

#[derive(Parser)]
#[command(name = "eisenhart", version, about = "Tensor calculus for spaces with non-symmetric metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Full report for one model at one point.
    Analyze {
        /// Model file, or the name of a built-in model.
        #[arg(long)]
        model: String,
        /// Coordinates `t,x,y,z`; defaults to the model's reference point.
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        point: Option<[f64; 4]>,
        /// `u,u1,v,v1,w`; defaults to the model's coefficients.
        #[arg(long, value_parser = parse_coeffs, allow_hyphen_values = true)]
        coeffs: Option<CoeffSet>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        lambda: f64,
        /// `comoving` or `u0,u1,u2,u3`; defaults to the model's frame.
        #[arg(long, value_parser = parse_frame, allow_hyphen_values = true)]
        frame: Option<FrameArg>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[arg(long)]
        strict: bool,
        #[arg(long, default_value_t = DEFAULT_ROUTE_TOL)]
        tol: f64,
    },
    /// Sweep the built-in example over a grid in t.
    VerifyExample {
        /// `start:stop:points`
        #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
        grid: Option<Grid>,
        #[arg(long)]
        s0: Option<String>,
        #[arg(long)]
        s1: Option<String>,
        #[arg(long)]
        s2: Option<String>,
        #[arg(long)]
        s3: Option<String>,
        #[arg(long, value_parser = parse_coeffs, allow_hyphen_values = true)]
        coeffs: Option<CoeffSet>,
        #[arg(long)]
        strict: bool,
        #[arg(long, default_value_t = DEFAULT_ROUTE_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Antisymmetric profile producing a prescribed matter Lagrangian.
    SolveProfile {
        /// `start:stop:points`
        #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
        grid: Option<Grid>,
        #[arg(long, default_value = "1")]
        s0: String,
        #[arg(long, default_value = "1 + t^2")]
        s1: String,
        #[arg(long, default_value = "2 + sin(t)")]
        s2: String,
        #[arg(long, default_value = "exp(t)")]
        s3: String,
        /// Direction ratios `a3,a4,a5`.
        #[arg(long, value_parser = parse_alphas, allow_hyphen_values = true, default_value = "1,0.5,-0.3")]
        alpha: [f64; 3],
        /// Target Lagrangian as an expression in t.
        #[arg(long, default_value = "1 + 0.5*sin(3*t)", allow_hyphen_values = true)]
        target: String,
        /// `u,u1,v,v1,w`; only `v1 + w` enters.
        #[arg(long, value_parser = parse_coeffs, allow_hyphen_values = true, default_value = "0,0,0,-1,0")]
        coeffs: CoeffSet,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Linearity of combined matter terms over random term sets.
    LinearityCheck {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        sets: usize,
        #[arg(long, default_value_t = 3)]
        terms: usize,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug)]
enum FrameArg {
    Comoving,
    Vector([f64; 4]),
}

fn parse_list<const N: usize>(s: &str, what: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!("{what} needs {N} comma-separated numbers, got {}", parts.len()));
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(&parts) {
        *o = p.parse().map_err(|_| format!("'{p}' is not a number"))?;
    }
    Ok(out)
}

fn parse_point(s: &str) -> Result<[f64; 4], String> {
    parse_list(s, "point")
}

fn parse_alphas(s: &str) -> Result<[f64; 3], String> {
    parse_list(s, "alpha")
}

fn parse_coeffs(s: &str) -> Result<CoeffSet, String> {
    let [u, u1, v, v1, w] = parse_list(s, "coeffs")?;
    Ok(CoeffSet::new(u, u1, v, v1, w))
}

fn parse_frame(s: &str) -> Result<FrameArg, String> {
    if s.trim() == "comoving" {
        Ok(FrameArg::Comoving)
    } else {
        parse_list(s, "frame").map(FrameArg::Vector)
    }
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err("grid is start:stop:points".into());
    };
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("'{x}' is not a number"));
    let steps = n.trim().parse::<usize>().map_err(|_| format!("'{n}' is not a point count"))?;
    Ok(Grid {
        start: num(a)?,
        stop: num(b)?,
        steps,
    })
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    code: u8,
    kind: &'a str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    offset: Option<usize>,
}

#[derive(Serialize)]
struct ErrorDoc<'a> {
    error: ErrorBody<'a>,
}

/// Writes the error as JSON on stderr and returns its exit code.
fn fail(code: u8, kind: &str, message: String, offset: Option<usize>) -> ExitCode {
    let doc = ErrorDoc {
        error: ErrorBody {
            code,
            kind,
            message,
            offset,
        },
    };
    eprintln!("{}", serde_json::to_string(&doc).expect("error document serializes"));
    ExitCode::from(code)
}

fn model_failure(e: &ModelError) -> ExitCode {
    let (kind, offset) = match e {
        ModelError::Document { offset, .. } => ("document", *offset),
        ModelError::Expression { source, .. } => ("expression", Some(source.offset)),
        ModelError::MissingSection(_) => ("missing_section", None),
        ModelError::Shape { .. } => ("shape", None),
        ModelError::UnknownKey(_) => ("unknown_key", None),
        ModelError::Invalid(_) => ("invalid", None),
        ModelError::Reference(inner) => return math_failure(inner),
    };
    fail(EXIT_INPUT, kind, e.to_string(), offset)
}

fn math_failure(e: &MathError) -> ExitCode {
    let kind = match e {
        MathError::Domain { .. } => "domain",
        MathError::SingularMetric { .. } => "singular_metric",
        MathError::NotTimelike(_) => "not_timelike",
        MathError::NegativeRadicand { .. } => "negative_radicand",
        MathError::VanishingDenominator { .. } => "vanishing_denominator",
        MathError::NoConvergence { .. } => "no_convergence",
        MathError::ConformalSingularity => "conformal_singularity",
        _ => "math",
    };
    fail(EXIT_MATH, kind, e.to_string(), None)
}

fn load(spec: &str) -> Result<SpacetimeModel, ExitCode> {
    let path = Path::new(spec);
    if !path.exists() {
        if let Some(m) = builtin_model(spec) {
            return Ok(m);
        }
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(EXIT_INPUT, "io", format!("{}: {e}", path.display()), None))?;
    load_model(&text).map_err(|e| model_failure(&e))
}

fn emit<T: Serialize>(format: Format, value: &T, table: impl FnOnce(&T) -> String) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(value).expect("report serializes")),
        Format::Table => print!("{}", table(value)),
    }
}

fn profile_expr(src: &str, name: &str) -> Result<eisenhart_core::expr::Expression, ExitCode> {
    parse_profile_expr(src).map_err(|e| fail(EXIT_INPUT, "expression", format!("{name}: {e}"), Some(e.offset)))
}

fn run(cli: Cli) -> Result<ExitCode, ExitCode> {
    match cli.command {
        Command::Analyze {
            model,
            point,
            coeffs,
            lambda,
            frame,
            format,
            strict,
            tol,
        } => {
            let model = load(&model)?;
            let frame = frame.map(|f| match f {
                FrameArg::Comoving => [1.0, 0.0, 0.0, 0.0],
                FrameArg::Vector(u) => u,
            });
            let req = AnalysisRequest {
                point: point.unwrap_or(model.reference_point),
                coeffs: coeffs.unwrap_or(model.coeffs),
                model: &model,
                lambda,
                tol,
                frame,
            };
            let report = run_analyze(&req).map_err(|e| math_failure(&e))?;
            emit(format, &report, render::analysis);
            let failing = report.failing(strict);
            if let Some(first) = failing.first() {
                return Err(fail(
                    EXIT_CONSISTENCY,
                    "consistency",
                    format!("{} diagnostic(s) beyond tolerance; first: {}", failing.len(), first.summary()),
                    None,
                ));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyExample {
            grid,
            s0,
            s1,
            s2,
            s3,
            coeffs,
            strict,
            tol,
            format,
        } => {
            let mut cfg = VerifyConfig {
                coeffs,
                strict,
                tol,
                ..VerifyConfig::default()
            };
            if let Some(g) = grid {
                cfg.grid = g;
            }
            let defaults = ExampleProfiles::default();
            for (k, s) in [s0, s1, s2, s3].into_iter().enumerate() {
                cfg.profiles.s[k] = s.unwrap_or_else(|| defaults.s[k].clone());
            }
            let report = verify_example(&cfg).map_err(|e| model_failure(&e))?;
            emit(format, &report, render::verify);
            if !report.passed {
                let failed: Vec<&str> = report.failed_checks().map(|c| c.name.as_str()).collect();
                let message = if failed.is_empty() {
                    format!("strict mode: {} ledger entries", report.ledger.len())
                } else {
                    format!("failed checks: {}", failed.join(", "))
                };
                return Err(fail(EXIT_CONSISTENCY, "consistency", message, None));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::SolveProfile {
            grid,
            s0,
            s1,
            s2,
            s3,
            alpha,
            target,
            coeffs,
            format,
        } => {
            let grid = grid.unwrap_or_default();
            if grid.steps < 2 {
                return Err(fail(EXIT_INPUT, "invalid", "profile grid needs at least 2 points".into(), None));
            }
            let s = [
                profile_expr(&s0, "s0")?,
                profile_expr(&s1, "s1")?,
                profile_expr(&s2, "s2")?,
                profile_expr(&s3, "s3")?,
            ];
            let problem = ProfileProblem {
                s,
                alphas: alpha,
                target: profile_expr(&target, "target")?,
                vw: coeffs.vw(),
                t_start: grid.start,
                t_end: grid.stop,
                steps: grid.steps - 1,
            };
            let sol = solve_antisym_profile(&problem).map_err(|e| math_failure(&e))?;
            emit(format, &sol, render::profile);
            Ok(ExitCode::SUCCESS)
        }
        Command::LinearityCheck {
            seed,
            sets,
            terms,
            format,
        } => {
            let report = linearity_check(seed, sets, terms);
            emit(format, &report, render::linearity);
            if !report.passed {
                return Err(fail(
                    EXIT_CONSISTENCY,
                    "consistency",
                    format!("linearity deviation {:e} exceeds {:e}", report.max_deviation, report.tol),
                    None,
                ));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    run(cli).unwrap_or_else(|code| code)
}

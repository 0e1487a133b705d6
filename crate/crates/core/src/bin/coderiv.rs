//! Command-line surface: frontier sampling, coderivative queries, domination
//! and validation reports, the sampling oracle, and builtin problem files.

use clap::{Args, Parser, Subcommand, ValueEnum};
use coderiv::domination::{check_domination, DominationOptions};
use coderiv::efficiency::{efficient_points, frontier_sample, weight_grid, Variant};
use coderiv::oracle::{candidate, epi_cloud, frechet_quotient, EpiOptions, Norm};
use coderiv::problem::{builtins, parse_problem, to_document_string, validate_seeded, BasePoint, ParametricProblem};
use coderiv::report::{analyze_coderivative, CoderivativeRequest, DominationMode, Method, Report};
use coderiv::scalar::{format_scalar, parse_list, Scalar};
use coderiv::{Error, Result};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "coderiv", version, about = "Coderivatives of perturbation maps in parametric vector optimization")]
struct Cli {
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Sampling seed, hexadecimal.
    #[arg(long, global = true, default_value = "0x5EED")]
    seed: String,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Min,
    Weak,
    Proper,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Min => Variant::Min,
            VariantArg::Weak => Variant::Weak,
            VariantArg::Proper => Variant::Proper,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Formula,
    Oracle,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    Euclidean,
    Product,
}

#[derive(Subcommand)]
enum Command {
    /// Sample Min_K F(p) by weighted sums and classify the samples.
    Frontier {
        problem: String,
        #[arg(long, allow_hyphen_values = true)]
        p: Option<String>,
        /// Simplex steps of the weight grid over the generators of K*.
        #[arg(long, default_value_t = 20)]
        weights: usize,
    },
    /// Coderivative of the frontier map at the base point.
    Coderivative {
        problem: String,
        #[command(flatten)]
        base: BaseArgs,
        /// Dual direction; repeat for several queries.
        #[arg(long, required = true, allow_hyphen_values = true)]
        ystar: Vec<String>,
        #[arg(long, value_enum, default_value_t = VariantArg::Min)]
        variant: VariantArg,
        #[arg(long, value_enum, default_value_t = MethodArg::Formula)]
        method: MethodArg,
        /// Skip domination sampling; records are marked formula-unjustified.
        #[arg(long)]
        assume_domination: bool,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Sample the domination property on a ball around the base parameter.
    Domination {
        problem: String,
        #[arg(long, allow_hyphen_values = true)]
        p: Option<String>,
        #[arg(long, value_enum, default_value_t = VariantArg::Min)]
        variant: VariantArg,
        /// Use cone_tilde in place of K when testing membership.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Check the standing convexity and cone hypotheses.
    Validate {
        problem: String,
        #[arg(long, default_value_t = 16)]
        samples: usize,
    },
    /// Fréchet quotients of candidate normals (p*, -y*) against a sampled graph.
    Oracle {
        problem: String,
        #[command(flatten)]
        base: BaseArgs,
        #[arg(long, allow_hyphen_values = true)]
        ystar: String,
        /// Candidate p*; repeat for several.
        #[arg(long, required = true, allow_hyphen_values = true)]
        pstar: Vec<String>,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Write a builtin problem file.
    Example { name: String },
}

#[derive(Args)]
struct BaseArgs {
    /// Base parameter; defaults to the problem's base point.
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    /// Base decision; defaults to the problem's base point.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
}

#[derive(Args)]
struct SamplingArgs {
    #[arg(long, default_value_t = 0.5)]
    radius: f64,
    /// Number of sampled parameters.
    #[arg(long, default_value_t = 32)]
    samples: usize,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Parameter grid points per axis.
    #[arg(long, default_value_t = 9)]
    grid: usize,
    #[arg(long, value_enum, default_value_t = NormArg::Euclidean)]
    norm: NormArg,
}

impl OracleArgs {
    fn epi(&self) -> EpiOptions {
        EpiOptions { delta: self.delta, grid: self.grid, ..EpiOptions::default() }
    }

    fn norm(&self) -> Norm {
        match self.norm {
            NormArg::Euclidean => Norm::Euclidean,
            NormArg::Product => Norm::Product,
        }
    }
}

fn list(flag: &str, s: &str) -> Result<Vec<Scalar>> {
    parse_list(s).map_err(|e| Error::Schema { path: flag.into(), message: e.0 })
}

fn strings(v: &[Scalar]) -> Vec<String> {
    v.iter().map(format_scalar).collect()
}

fn parse_seed(s: &str) -> Result<u64> {
    let t = s.trim_start_matches("0x").trim_start_matches("0X");
    u64::from_str_radix(t, 16).map_err(|_| Error::InvalidArgument(format!("seed {s:?} is not hexadecimal")))
}

fn load(problem: &str) -> Result<ParametricProblem> {
    if let Some(pr) = builtins::by_name(problem) {
        return Ok(pr);
    }
    let text = std::fs::read_to_string(problem).map_err(|e| Error::Io(format!("cannot read {problem}: {e}")))?;
    parse_problem(&text)
}

fn base_param(pr: &ParametricProblem, p: Option<&str>) -> Result<Vec<Scalar>> {
    match (p, &pr.base_point) {
        (Some(s), _) => list("--p", s),
        (None, Some((p, _))) => Ok(p.clone()),
        (None, None) => Err(Error::InvalidArgument("no --p given and the problem has no base point".into())),
    }
}

fn base_pair(pr: &ParametricProblem, b: &BaseArgs) -> Result<(Vec<Scalar>, Vec<Scalar>)> {
    let p = base_param(pr, b.p.as_deref())?;
    let x = match (&b.x, &pr.base_point) {
        (Some(s), _) => list("--x", s)?,
        (None, Some((_, x))) => x.clone(),
        (None, None) => return Err(Error::InvalidArgument("no --x given and the problem has no base point".into())),
    };
    Ok((p, x))
}

/// A report plus the exit status to use after emitting it.
struct Outcome {
    report: Option<Report>,
    raw: Option<String>,
    status: u8,
}

fn run(cli: &Cli) -> Result<Outcome> {
    let seed = parse_seed(&cli.seed)?;
    let start = Instant::now();
    let ms = |s: Instant| s.elapsed().as_secs_f64() * 1e3;
    let done = |command: &str, pr: Option<&ParametricProblem>, body: Value, status: u8| Outcome {
        report: Some(Report::new(command, pr, body, ms(start))),
        raw: None,
        status,
    };
    match &cli.command {
        Command::Frontier { problem, p, weights } => {
            let pr = load(problem)?;
            let p = base_param(&pr, p.as_deref())?;
            let fr = frontier_sample(&pr, &p, &weight_grid(&pr.cone, (*weights).max(1)))?;
            if fr.points.is_empty() {
                return Err(Error::FrontierEmpty(p));
            }
            let mut classes = serde_json::Map::new();
            for v in [Variant::Min, Variant::Weak, Variant::Proper] {
                let r = efficient_points(&fr.points, &pr.cone, v)?;
                classes.insert(v.name().into(), json!(r.indices));
            }
            let body = json!({
                "p": strings(&p),
                "exact": fr.exact,
                "points": fr.points.iter().map(|y| strings(y)).collect::<Vec<_>>(),
                "preimages": fr.preimages.iter().map(|x| strings(x)).collect::<Vec<_>>(),
                "classification": classes,
            });
            Ok(done("frontier", Some(&pr), body, 0))
        }
        Command::Coderivative { problem, base, ystar, variant, method, assume_domination, sampling, oracle } => {
            let pr = load(problem)?;
            let (p, x) = base_pair(&pr, base)?;
            let ystars = ystar.iter().map(|s| list("--ystar", s)).collect::<Result<Vec<_>>>()?;
            let mut req = CoderivativeRequest::new(ystars, (*variant).into());
            req.method = match method {
                MethodArg::Formula => Method::Formula,
                MethodArg::Oracle => Method::Oracle,
                MethodArg::Both => Method::Both,
            };
            req.domination = if *assume_domination {
                DominationMode::Assume
            } else {
                DominationMode::Sample(DominationOptions {
                    radius: sampling.radius,
                    n_param_samples: sampling.samples,
                    seed,
                    ..DominationOptions::default()
                })
            };
            req.oracle = oracle.epi();
            req.eps = oracle.eps;
            req.norm = oracle.norm();
            let body = analyze_coderivative(&pr, &p, &x, &req)?;
            Ok(done("coderivative", Some(&pr), serde_json::to_value(body).expect("report serializes"), 0))
        }
        Command::Domination { problem, p, variant, strict, sampling } => {
            let pr = load(problem)?;
            let p = base_param(&pr, p.as_deref())?;
            let opts = DominationOptions {
                radius: sampling.radius,
                n_param_samples: sampling.samples,
                seed,
                strict: *strict,
                ..DominationOptions::default()
            };
            let cert = check_domination(&pr, &p, (*variant).into(), &opts)?;
            let status = if cert.holds_empirically { 0 } else { Error::DominationNotCertified.exit_code() as u8 };
            let mut body = serde_json::to_value(&cert).expect("report serializes");
            body["seed"] = json!(format!("{:#x}", cert.seed));
            Ok(done("domination", Some(&pr), body, status))
        }
        Command::Validate { problem, samples } => {
            let pr = load(problem)?;
            let rep = validate_seeded(&pr, seed, *samples);
            Ok(done("validate", Some(&pr), serde_json::to_value(&rep).expect("report serializes"), 0))
        }
        Command::Oracle { problem, base, ystar, pstar, oracle } => {
            let pr = load(problem)?;
            let (p, x) = base_pair(&pr, base)?;
            let bp = BasePoint::feasible(&pr, &p, &x)?;
            let ys = list("--ystar", ystar)?;
            if ys.len() != pr.dims.y {
                return Err(Error::DimensionMismatch("--ystar must have length y".into()));
            }
            let cloud = epi_cloud(&pr, &bp, &oracle.epi())?;
            let mut verdicts = Vec::new();
            for s in pstar {
                let ps = list("--pstar", s)?;
                if ps.len() != pr.dims.p {
                    return Err(Error::DimensionMismatch("--pstar must have length p".into()));
                }
                let q = frechet_quotient(&cloud, &candidate(&ps, &ys), pr.dims.p, oracle.norm());
                verdicts.push(json!({"pstar": strings(&ps), "quotient": q, "accepted": q <= oracle.eps}));
            }
            let body = json!({
                "base_point": bp,
                "ystar": strings(&ys),
                "cloud_size": cloud.len(),
                "delta": cloud.delta,
                "eps": oracle.eps,
                "verdicts": verdicts,
            });
            Ok(done("oracle", Some(&pr), body, 0))
        }
        Command::Example { name } => {
            let pr = builtins::by_name(name)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown example {name:?}; known: {}", builtins::NAMES.join(", "))))?;
            Ok(Outcome { report: None, raw: Some(to_document_string(&pr) + "\n"), status: 0 })
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli).and_then(|o| {
        let text = match (&o.report, &o.raw) {
            (_, Some(raw)) => raw.clone(),
            (Some(r), None) => match cli.format {
                Format::Json => r.to_json() + "\n",
                Format::Text => r.to_text(),
            },
            (None, None) => String::new(),
        };
        emit(&cli, &text).map(|_| o.status)
    });
    match outcome {
        Ok(status) => ExitCode::from(status),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

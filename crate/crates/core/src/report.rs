//! Structured reports for the command-line surface, and the coderivative
//! query pipeline they record.

use crate::coderivative::{frontier_coderivative, qualification_check, Provenance, QualReport};
use crate::domination::{check_domination, DominationCertificate, DominationOptions, MidpointSample};
use crate::efficiency::Variant;
use crate::error::{Error, Result};
use crate::geometry::HPolyhedron;
use crate::oracle::{discrimination, epi_cloud, verify_set, Discrimination, EpiOptions, Norm, OracleVerdict};
use crate::problem::{check_solution_variant, to_document_string, BasePoint, ParametricProblem};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// SHA-256 of the canonical problem document.
pub fn problem_digest(pr: &ParametricProblem) -> String {
    hex::encode(Sha256::digest(to_document_string(pr).as_bytes()))
}

/// Envelope shared by every command. Everything except `timing_ms` is a
/// deterministic function of the invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem_digest: Option<String>,
    pub body: Value,
    pub timing_ms: f64,
}

impl Report {
    pub fn new(command: &str, pr: Option<&ParametricProblem>, body: Value, timing_ms: f64) -> Self {
        Report {
            tool: "coderiv".into(),
            version: TOOL_VERSION.into(),
            command: command.into(),
            problem: pr.and_then(|p| p.name.clone()),
            problem_digest: pr.map(problem_digest),
            body,
            timing_ms,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Indented `key: value` rendering of the same content.
    pub fn to_text(&self) -> String {
        let v = serde_json::to_value(self).expect("reports serialize");
        let mut out = String::new();
        render(&v, 0, &mut out);
        out
    }
}

fn is_leaf(v: &Value) -> bool {
    match v {
        Value::Array(a) => a.iter().all(|x| !x.is_object() && is_leaf(x)),
        Value::Object(_) => false,
        _ => true,
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => format!("[{}]", a.iter().map(inline).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

fn render(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                if is_leaf(x) {
                    let _ = writeln!(out, "{pad}{k}: {}", inline(x));
                } else {
                    let _ = writeln!(out, "{pad}{k}:");
                    render(x, depth + 1, out);
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                if is_leaf(x) {
                    let _ = writeln!(out, "{pad}- {}", inline(x));
                } else {
                    let _ = writeln!(out, "{pad}-");
                    render(x, depth + 1, out);
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", inline(other));
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Formula,
    Oracle,
    Both,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "formula" => Ok(Method::Formula),
            "oracle" => Ok(Method::Oracle),
            "both" => Ok(Method::Both),
            _ => Err(Error::InvalidArgument(format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DominationMode {
    Assume,
    Sample(DominationOptions),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoderivativeRequest {
    pub ystars: Vec<Vec<Scalar>>,
    pub variant: Variant,
    pub method: Method,
    pub domination: DominationMode,
    pub oracle: EpiOptions,
    pub eps: f64,
    pub norm: Norm,
    /// Perturbed non-members per query for the discrimination count.
    pub perturbations: usize,
}

impl CoderivativeRequest {
    pub fn new(ystars: Vec<Vec<Scalar>>, variant: Variant) -> Self {
        CoderivativeRequest {
            ystars,
            variant,
            method: Method::Formula,
            domination: DominationMode::Sample(DominationOptions::default()),
            oracle: EpiOptions::default(),
            eps: 1e-3,
            norm: Norm::Euclidean,
            perturbations: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominationSummary {
    pub variant: Variant,
    pub assumed: bool,
    pub holds_empirically: bool,
    pub radius: f64,
    pub seed: String,
    pub n_param_samples: usize,
    pub n_image_samples: usize,
    pub n_violations: usize,
    pub truncated: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tilde_convexity: Option<MidpointSample>,
}

impl From<&DominationCertificate> for DominationSummary {
    fn from(c: &DominationCertificate) -> Self {
        DominationSummary {
            variant: c.variant,
            assumed: c.assumed,
            holds_empirically: c.holds_empirically,
            radius: c.radius,
            seed: format!("{:#x}", c.seed),
            n_param_samples: c.n_param_samples,
            n_image_samples: c.n_image_samples,
            n_violations: c.violations.len(),
            truncated: c.truncated,
            tilde_convexity: c.tilde_convexity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub cloud_size: usize,
    pub eps: f64,
    pub delta: f64,
    pub verdicts: Vec<OracleVerdict>,
    pub all_accepted: bool,
    pub discrimination: Discrimination,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    #[serde(with = "crate::serde_scalar::vec")]
    pub ystar: Vec<Scalar>,
    pub variant: Variant,
    pub empty: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<HPolyhedron>,
    /// The single element, when the set is a point.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::serde_scalar::opt_vec")]
    pub point: Option<Vec<Scalar>>,
    pub provenance: Provenance,
    pub rule: String,
    /// Why the formula value is the coderivative asked for.
    pub justification: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoderivativeBody {
    pub base_point: BasePoint,
    pub qualification: QualReport,
    pub domination: DominationSummary,
    pub records: Vec<QueryRecord>,
}

/// Runs the full query: feasibility, qualification, domination, efficiency
/// of the base point, then the formula (and the oracle on its extreme
/// points) for each `y*`.
pub fn analyze_coderivative(
    pr: &ParametricProblem,
    p: &[Scalar],
    x: &[Scalar],
    req: &CoderivativeRequest,
) -> Result<CoderivativeBody> {
    let base = BasePoint::feasible(pr, p, x)?;
    let qualification = qualification_check(pr, &base)?;
    if !qualification.holds() {
        return Err(Error::QualificationFailed(serde_json::to_string(&qualification).unwrap_or_default()));
    }
    if req.variant == Variant::Weak && pr.cone_tilde.is_none() {
        return Err(Error::MissingTildeCone);
    }
    let cert = match &req.domination {
        DominationMode::Assume => DominationCertificate::assumed(req.variant),
        DominationMode::Sample(opts) => check_domination(pr, p, req.variant, opts)?,
    };
    cert.require(req.variant)?;
    check_solution_variant(pr, p, x, req.variant)?;
    let cloud = match req.method {
        Method::Formula => None,
        Method::Oracle | Method::Both => Some(epi_cloud(pr, &base, &req.oracle)?),
    };
    let justification = if cert.assumed {
        "formula-unjustified: domination assumed by the caller, not sampled".to_string()
    } else {
        format!(
            "qualification conditions hold; domination sampled at {} parameters without violation",
            cert.n_param_samples
        )
    };
    let mut records = Vec::new();
    for (i, ys) in req.ystars.iter().enumerate() {
        let set = frontier_coderivative(pr, &base, ys, req.variant, &cert)?;
        let oracle = cloud.as_ref().map(|c| {
            let verdicts = verify_set(c, &set, req.eps, req.norm);
            OracleSummary {
                cloud_size: c.len(),
                eps: req.eps,
                delta: c.delta,
                all_accepted: verdicts.iter().all(|v| v.accepted),
                verdicts,
                discrimination: discrimination(c, &set, req.perturbations, 0.1, req.eps, i as u64),
            }
        });
        let show_set = req.method != Method::Oracle;
        records.push(QueryRecord {
            ystar: ys.clone(),
            variant: req.variant,
            empty: set.is_empty(),
            point: if show_set { set.as_point() } else { None },
            provenance: set.provenance,
            rule: set.provenance.describe(),
            justification: if set.provenance == Provenance::KStarGate {
                "y* outside the dual cone; empty without further hypotheses".into()
            } else {
                justification.clone()
            },
            tolerance: set.tolerance,
            set: show_set.then(|| set.set.clone()),
            oracle,
        });
    }
    Ok(CoderivativeBody { base_point: base, qualification, domination: (&cert).into(), records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::builtins;
    use crate::scalar::ints;

    #[test]
    fn digest_is_stable_and_distinguishes_problems() {
        let a = problem_digest(&builtins::example_4_1());
        assert_eq!(a, problem_digest(&builtins::example_4_1()));
        assert_eq!(a.len(), 64);
        assert_ne!(a, problem_digest(&builtins::example_5_1()));
    }

    #[test]
    fn pipeline_on_example_4_1() {
        let pr = builtins::example_4_1();
        let mut req = CoderivativeRequest::new(vec![ints(&[1, 1]), ints(&[-1, 0])], Variant::Min);
        req.method = Method::Both;
        req.oracle.grid = 5;
        let body = analyze_coderivative(&pr, &ints(&[0, 0, 0]), &ints(&[0]), &req).unwrap();
        assert_eq!(body.records[0].point, Some(ints(&[3, 6, 3])));
        assert!(body.records[0].oracle.as_ref().unwrap().all_accepted);
        assert!(body.records[1].empty);
        assert!(body.domination.holds_empirically);
    }

    #[test]
    fn pipeline_stops_at_domination() {
        let pr = builtins::ray_counterexample();
        let req = CoderivativeRequest::new(vec![ints(&[1, 1])], Variant::Min);
        assert_eq!(analyze_coderivative(&pr, &ints(&[0]), &ints(&[0]), &req), Err(Error::DominationNotCertified));
    }

    #[test]
    fn text_rendering() {
        let r = Report::new("demo", None, serde_json::json!({"a": ["1/2", "3"], "b": {"c": true}}), 0.0);
        let t = r.to_text();
        assert!(t.contains("a: [1/2, 3]"));
        assert!(t.contains("  c: true"));
    }
}

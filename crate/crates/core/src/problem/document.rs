//! JSON problem documents.
//!
//! Numbers are written as strings holding exact rationals (`"1/3"`); plain
//! JSON integers are accepted on input. Matrices are dense and row-major.

use super::*;
use crate::serde_scalar::Q;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dims: Dims,
    pub cone: ConeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone_tilde: Option<ConeSpec>,
    pub objective: ObjectiveDoc,
    pub constraints: ConstraintsDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_point: Option<BasePointDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObjectiveDoc {
    Affine { fp: Vec<Vec<Q>>, fx: Vec<Vec<Q>>, c: Vec<Q> },
    Quadratic { q: Vec<Vec<Vec<Q>>>, linear: Vec<Vec<Q>>, constant: Vec<Q> },
    Builtin { name: ObjectiveBuiltin },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstraintsDoc {
    Affine {
        #[serde(default)]
        rows: Vec<AffineRow>,
    },
    SemiInfinite {
        family: Vec<SemiInfiniteFamily>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        rows: Vec<AffineRow>,
    },
    Builtin { names: Vec<SmoothConstraint> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasePointDoc {
    pub p: Vec<Q>,
    pub x: Vec<Q>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BuiltinRef {
    builtin: String,
}

fn unq(v: Vec<Q>) -> Vec<Scalar> {
    v.into_iter().map(|q| q.0).collect()
}

fn unq2(m: Vec<Vec<Q>>) -> Matrix {
    m.into_iter().map(unq).collect()
}

fn q(v: &[Scalar]) -> Vec<Q> {
    v.iter().cloned().map(Q).collect()
}

fn q2(m: &[Vec<Scalar>]) -> Vec<Vec<Q>> {
    m.iter().map(|r| q(r)).collect()
}

impl ProblemDocument {
    pub fn into_problem(self) -> Result<ParametricProblem> {
        let objective = match self.objective {
            ObjectiveDoc::Affine { fp, fx, c } => ObjectiveSpec::Affine { fp: unq2(fp), fx: unq2(fx), c: unq(c) },
            ObjectiveDoc::Quadratic { q, linear, constant } => ObjectiveSpec::Quadratic {
                q: q.into_iter().map(unq2).collect(),
                linear: unq2(linear),
                constant: unq(constant),
            },
            ObjectiveDoc::Builtin { name } => ObjectiveSpec::Builtin(name),
        };
        let constraints = match self.constraints {
            ConstraintsDoc::Affine { rows } => ConstraintSpec::Affine(rows),
            ConstraintsDoc::SemiInfinite { family, rows } => ConstraintSpec::SemiInfinite { families: family, rows },
            ConstraintsDoc::Builtin { names } => ConstraintSpec::Smooth(names),
        };
        let mut pr = ParametricProblem::new(self.dims, self.cone, objective, constraints)?;
        pr.name = self.name;
        if let Some(t) = self.cone_tilde {
            pr = pr.with_cone_tilde(t)?;
        }
        if let Some(b) = self.base_point {
            pr = pr.with_base_point(unq(b.p), unq(b.x))?;
        }
        Ok(pr)
    }

    pub fn from_problem(pr: &ParametricProblem) -> Self {
        let objective = match &pr.objective {
            ObjectiveSpec::Affine { fp, fx, c } => ObjectiveDoc::Affine { fp: q2(fp), fx: q2(fx), c: q(c) },
            ObjectiveSpec::Quadratic { q: qs, linear, constant } => ObjectiveDoc::Quadratic {
                q: qs.iter().map(|m| q2(m)).collect(),
                linear: q2(linear),
                constant: q(constant),
            },
            ObjectiveSpec::Builtin(b) => ObjectiveDoc::Builtin { name: *b },
        };
        let constraints = match &pr.constraints {
            ConstraintSpec::Affine(rows) => ConstraintsDoc::Affine { rows: rows.clone() },
            ConstraintSpec::SemiInfinite { families, rows } => {
                ConstraintsDoc::SemiInfinite { family: families.clone(), rows: rows.clone() }
            }
            ConstraintSpec::Smooth(gs) => ConstraintsDoc::Builtin { names: gs.clone() },
        };
        ProblemDocument {
            name: pr.name.clone(),
            dims: pr.dims,
            cone: pr.cone_spec.clone(),
            cone_tilde: pr.cone_tilde_spec.clone(),
            objective,
            constraints,
            base_point: pr.base_point.as_ref().map(|(p, x)| BasePointDoc { p: q(p), x: q(x) }),
        }
    }
}

fn schema_error(e: serde_path_to_error::Error<serde_json::Error>) -> Error {
    let path = e.path().to_string();
    Error::Schema { path, message: e.into_inner().to_string() }
}

/// Parses a problem document, or a reference `{"builtin": "example_4_1"}`.
pub fn parse_problem(text: &str) -> Result<ParametricProblem> {
    if let Ok(r) = serde_json::from_str::<BuiltinRef>(text) {
        return builtins::by_name(&r.builtin).ok_or_else(|| Error::Schema {
            path: "builtin".into(),
            message: format!("unknown builtin {:?}", r.builtin),
        });
    }
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: ProblemDocument = serde_path_to_error::deserialize(de).map_err(schema_error)?;
    doc.into_problem()
}

/// Resolves a builtin name or parses the document text.
pub fn parse_problem_str(name_or_text: &str) -> Result<ParametricProblem> {
    match builtins::by_name(name_or_text.trim()) {
        Some(pr) => Ok(pr),
        None => parse_problem(name_or_text),
    }
}

pub fn to_document_string(pr: &ParametricProblem) -> String {
    serde_json::to_string_pretty(&ProblemDocument::from_problem(pr)).expect("documents serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_round_trip() {
        for name in builtins::NAMES {
            let pr = builtins::by_name(name).unwrap();
            let text = to_document_string(&pr);
            assert_eq!(parse_problem(&text).unwrap(), pr, "{name}");
        }
    }

    #[test]
    fn builtin_reference() {
        let pr = parse_problem(r#"{"builtin": "example_4_1"}"#).unwrap();
        assert_eq!(pr.dims, Dims { p: 3, x: 1, y: 2 });
        assert!(parse_problem_str("example_5_1").is_ok());
    }

    #[test]
    fn wrong_column_count_is_a_dimension_mismatch() {
        let text = r#"{
            "dims": {"p": 1, "x": 1, "y": 2},
            "cone": {"generators": [["1","0"],["0","1"]]},
            "objective": {"kind": "affine", "fp": [["0"],["0"]], "fx": [["1","0"],["2","0"]], "c": ["0","0"]},
            "constraints": {"kind": "affine", "rows": []}
        }"#;
        assert!(matches!(parse_problem(text), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn schema_errors_carry_a_path() {
        let text = r#"{
            "dims": {"p": 1, "x": 1, "y": 2},
            "cone": {"generators": [["1","0"],["0","x"]]},
            "objective": {"kind": "builtin", "name": "abs_pair"},
            "constraints": {"kind": "affine"}
        }"#;
        match parse_problem(text) {
            Err(Error::Schema { path, .. }) => assert!(path.starts_with("cone"), "{path}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_problem("{"), Err(Error::Schema { .. })));
    }

    #[test]
    fn integers_and_fractions_accepted() {
        let text = r#"{
            "dims": {"p": 1, "x": 1, "y": 2},
            "cone": {"halfspaces": [[1, 0], [0, 1]]},
            "objective": {"kind": "affine", "fp": [[0],[0]], "fx": [["1/2"],[2]], "c": [0, 0]},
            "constraints": {"kind": "affine", "rows": [{"ap": [0], "ax": [-1], "b": 0, "rel": "<="}]}
        }"#;
        let pr = parse_problem(text).unwrap();
        assert!(matches!(pr.objective, ObjectiveSpec::Affine { .. }));
    }
}

//! Closed-subspace conditions that license the chain and pair rules.

use crate::error::Result;
use crate::geometry::{cone_hull, HPolyhedron, PolyCone};
use crate::problem::{BasePoint, ParametricProblem};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

/// Generator view of a cone for reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeSummary {
    #[serde(with = "crate::serde_scalar::mat")]
    pub rays: Vec<Vec<Scalar>>,
    #[serde(with = "crate::serde_scalar::mat")]
    pub lines: Vec<Vec<Scalar>>,
}

impl From<&PolyCone> for ConeSummary {
    fn from(c: &PolyCone) -> Self {
        ConeSummary { rays: c.rays().to_vec(), lines: c.lines().to_vec() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub holds: bool,
    pub cone: ConeSummary,
}

impl ConditionReport {
    pub fn from_cone(c: &PolyCone) -> Self {
        ConditionReport { holds: c.is_linear_subspace(), cone: c.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QualReport {
    /// `ℝ⁺(rge H - dom f)` in `P × X`, with `rge H = gph C`.
    pub condition_i: ConditionReport,
    /// `ℝ⁺(P - dom C)` in `P`.
    pub condition_ii: ConditionReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl QualReport {
    pub fn holds(&self) -> bool {
        self.condition_i.holds && self.condition_ii.holds
    }
}

/// `ℝ⁺(A - B)` and whether it is a linear subspace.
pub fn difference_cone(a: &HPolyhedron, b: &HPolyhedron) -> PolyCone {
    cone_hull(&a.minkowski_difference(b))
}

/// Both conditions, computed from the polyhedral data.
///
/// Every shipped objective is defined on all of `P × X`, so `dom f` is the
/// whole space. For smooth constraint systems `gph C` is not polyhedral, but
/// any nonempty set minus the whole space is the whole space; the cones are
/// then reported directly.
pub fn qualification_check(pr: &ParametricProblem, base: &BasePoint) -> Result<QualReport> {
    let n = pr.n_px();
    let np = pr.dims.p;
    let dom_f = HPolyhedron::universe(n);
    if !pr.constraints.is_polyhedral() {
        let _ = base;
        return Ok(QualReport {
            condition_i: ConditionReport::from_cone(&PolyCone::full(n)),
            condition_ii: ConditionReport::from_cone(&PolyCone::full(np)),
            note: Some("dom f is the whole space and C(p̄) is nonempty".into()),
        });
    }
    let gph = pr.graph_polyhedron()?;
    let cond_i = difference_cone(&gph, &dom_f);
    let dom_c = gph.project(&(0..np).collect::<Vec<_>>());
    let cond_ii = difference_cone(&HPolyhedron::universe(np), &dom_c);
    Ok(QualReport {
        condition_i: ConditionReport::from_cone(&cond_i),
        condition_ii: ConditionReport::from_cone(&cond_ii),
        note: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::builtins;
    use crate::scalar::ints;

    #[test]
    fn builtin_conditions_hold() {
        let pr = builtins::example_4_1();
        let base = BasePoint::feasible(&pr, &ints(&[0, 0, 0]), &ints(&[0])).unwrap();
        let q = qualification_check(&pr, &base).unwrap();
        assert!(q.holds());
        assert_eq!(q.condition_i.cone.lines.len(), 4);
        assert_eq!(q.condition_ii.cone.lines.len(), 3);
        let pr = builtins::example_5_1();
        let base = BasePoint::feasible(&pr, &ints(&[0]), &ints(&[0, 0])).unwrap();
        let q = qualification_check(&pr, &base).unwrap();
        assert!(q.holds());
        assert_eq!(q.condition_i.cone.lines.len(), 3);
    }

    #[test]
    fn difference_cone_of_half_lines() {
        // [0, ∞) - [1, ∞) = ℝ; [0, ∞) - {-1} gives a half line, not a subspace
        let a = HPolyhedron::from_ineqs(1, vec![(ints(&[-1]), ints(&[0])[0].clone())]);
        let b = HPolyhedron::from_ineqs(1, vec![(ints(&[-1]), ints(&[-1])[0].clone())]);
        assert!(difference_cone(&a, &b).is_linear_subspace());
        let c = HPolyhedron::point(&ints(&[-1]));
        let d = difference_cone(&a, &c);
        assert!(!d.is_linear_subspace());
        assert_eq!(d.rays(), &[ints(&[1])]);
    }
}

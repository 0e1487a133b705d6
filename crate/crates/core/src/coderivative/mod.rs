//! Coderivatives of the profile map `F + K` and of the frontier maps at a
//! base point, via the scalarized subdifferential of the objective and the
//! normal cone of the constraint graph.

pub mod calculus;
mod qualification;

pub use qualification::{difference_cone, qualification_check, ConditionReport, ConeSummary, QualReport};

use crate::constraints::{constraint_normal_cone, slice_p};
use crate::domination::DominationCertificate;
use crate::efficiency::Variant;
use crate::error::{Error, Result};
use crate::geometry::{linalg, normal_cone, HPolyhedron, OrderCone, PolyCone, Row};
use crate::problem::{check_solution_variant, validate::tilde_inside_interior, BasePoint, ObjectiveBuiltin, ObjectiveSpec, ParametricProblem};
use crate::scalar::{mat_t_vec, round_f64, to_f64_vec, zeros, Matrix, Scalar};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// Tolerance attached to results built from floating-point gradients.
pub const FLOAT_GRADIENT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule")]
pub enum Provenance {
    /// `y* ∉ K*`: normals of a `K`-upward closed graph have `y*`-part in `K*`.
    KStarGate,
    /// Coderivative of the constraint map from the normal cone of its graph.
    ConstraintGraph,
    /// `∂⟨y*, f⟩(p̄, x̄)` composed with `p* + D*C(p̄, x̄)(x*)`.
    Profile,
    /// The profile value, transferred to the frontier map by a domination
    /// certificate of the given variant.
    Frontier { variant: Variant },
    /// Frontier value through the cone of active semi-infinite gradients.
    SemiInfinite,
}

impl Provenance {
    pub fn describe(&self) -> String {
        match self {
            Provenance::KStarGate => "y* lies outside the dual cone; the set is empty".into(),
            Provenance::ConstraintGraph => "slice of the normal cone of gph C at (p̄, x̄)".into(),
            Provenance::Profile => "∂⟨y*, f⟩(p̄, x̄) pushed through p* + D*C(p̄, x̄)(x*)".into(),
            Provenance::Frontier { variant } => format!(
                "profile formula, equal to the {} frontier coderivative under the domination certificate",
                variant.name()
            ),
            Provenance::SemiInfinite => "∇_p f ᵀ y* + slice of the active-gradient cone at -∇_x f ᵀ y*".into(),
        }
    }
}

/// A possibly empty polyhedron in `P*`, the value of a coderivative at `y*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoderivSet {
    pub set: HPolyhedron,
    pub provenance: Provenance,
    #[serde(with = "crate::serde_scalar::vec")]
    pub ystar: Vec<Scalar>,
    /// Set when the data came from floating-point gradients.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl CoderivSet {
    pub fn new(set: HPolyhedron, ystar: &[Scalar], provenance: Provenance, tolerance: Option<f64>) -> Self {
        CoderivSet { set: set.canonical(), provenance, ystar: ystar.to_vec(), tolerance }
    }

    pub fn empty(dim: usize, ystar: &[Scalar], provenance: Provenance) -> Self {
        CoderivSet::new(HPolyhedron::empty(dim), ystar, provenance, None)
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    /// The single element, if the set is a point.
    pub fn as_point(&self) -> Option<Vec<Scalar>> {
        let v = self.set.vrep();
        (v.points.len() == 1 && v.rays.is_empty() && v.lines.is_empty()).then(|| v.points[0].clone())
    }

    pub fn contains(&self, pstar: &[Scalar]) -> bool {
        self.set.is_member(pstar)
    }

    pub fn set_eq(&self, other: &HPolyhedron) -> bool {
        self.set.set_eq(other)
    }
}

/// `∂⟨y*, f⟩(p̄, x̄) ⊆ P* × X*`.
#[derive(Debug, Clone, PartialEq)]
pub struct Subdifferential {
    pub set: HPolyhedron,
    pub tolerance: Option<f64>,
}

/// Subdifferential of the scalarization `⟨y*, f⟩` at the base point: the
/// adjoint Jacobian applied to `y*` where `f` is differentiable, and the
/// exact kink interval for the absolute-value builtin at `x = 0`.
pub fn scalar_subdifferential(pr: &ParametricProblem, base: &BasePoint, ystar: &[Scalar]) -> Result<Subdifferential> {
    let (np, nx) = (pr.dims.p, pr.dims.x);
    check_ystar(pr, ystar)?;
    let adjoint = |jp: &Matrix, jx: &Matrix| {
        let mut g = mat_t_vec(jp, ystar, np);
        g.extend(mat_t_vec(jx, ystar, nx));
        g
    };
    if let Some((jp, jx)) = pr.objective.jacobian(&base.p, &base.x) {
        return Ok(Subdifferential { set: HPolyhedron::point(&adjoint(&jp, &jx)), tolerance: None });
    }
    match &pr.objective {
        ObjectiveSpec::Builtin(ObjectiveBuiltin::AbsPair) => {
            // ⟨y*, (|x|, |x|)⟩ = s |x| with s = y₁ + y₂; at 0 its subdifferential
            // is [-s, s] when s >= 0 and empty otherwise
            let s = &ystar[0] + &ystar[1];
            let mut lo = zeros(np + nx);
            let mut hi = zeros(np + nx);
            lo[np] = -s.clone();
            hi[np] = s;
            Ok(Subdifferential { set: HPolyhedron::boxed(&lo, &hi), tolerance: None })
        }
        _ => {
            let (jp, jx) = pr.objective.jacobian_f64(&to_f64_vec(&base.p), &to_f64_vec(&base.x));
            let y = to_f64_vec(ystar);
            let col = |m: &Vec<Vec<f64>>, j: usize| m.iter().zip(&y).map(|(r, w)| r[j] * w).sum::<f64>();
            let g: Vec<Scalar> =
                (0..np).map(|j| col(&jp, j)).chain((0..nx).map(|j| col(&jx, j))).map(|v| round_f64(v, 12)).collect();
            Ok(Subdifferential { set: HPolyhedron::point(&g), tolerance: Some(FLOAT_GRADIENT_TOLERANCE) })
        }
    }
}

/// Whether `⟨y*, f⟩` is convex, which the subdifferential formula needs.
/// Automatic for `y* ∈ K*` once `f` is `K`-convex; the weak variant may ask
/// about `y*` in the larger cone `K̃*`.
pub fn scalarization_is_convex(obj: &ObjectiveSpec, ystar: &[Scalar]) -> bool {
    match obj {
        ObjectiveSpec::Affine { .. } => true,
        ObjectiveSpec::Quadratic { q, .. } => {
            let n = q[0].len();
            let mut m = vec![zeros(n); n];
            for (qi, w) in q.iter().zip(ystar) {
                for r in 0..n {
                    for c in 0..n {
                        m[r][c] += &qi[r][c] * w;
                    }
                }
            }
            linalg::psd_witness(&m).is_none()
        }
        ObjectiveSpec::Builtin(ObjectiveBuiltin::AbsPair) => !(&ystar[0] + &ystar[1]).is_negative(),
        ObjectiveSpec::Builtin(ObjectiveBuiltin::ExpTradeoff) => ystar.iter().all(|w| !w.is_negative()),
    }
}

fn check_ystar(pr: &ParametricProblem, ystar: &[Scalar]) -> Result<()> {
    if ystar.len() != pr.dims.y {
        return Err(Error::DimensionMismatch(format!("y* must have length {}", pr.dims.y)));
    }
    Ok(())
}

/// `None` when `y*` is outside the dual of `cone`; otherwise the
/// subdifferential of the scalarization.
pub(crate) fn gate_and_subdifferential(
    pr: &ParametricProblem,
    base: &BasePoint,
    ystar: &[Scalar],
    cone: &OrderCone,
) -> Result<Option<Subdifferential>> {
    check_ystar(pr, ystar)?;
    if !cone.dual_contains(ystar) {
        return Ok(None);
    }
    if !scalarization_is_convex(&pr.objective, ystar) {
        return Err(Error::InvalidArgument("⟨y*, f⟩ is not convex for this y*".into()));
    }
    scalar_subdifferential(pr, base, ystar).map(Some)
}

/// `{q : ∃ (p₀, x₀) ∈ sub, (q - p₀, -x₀) ∈ cone}`, by projecting the lifted
/// system in `(q, p₀, x₀)`.
pub(crate) fn combine(sub: &HPolyhedron, cone: &PolyCone, np: usize, nx: usize) -> HPolyhedron {
    let total = 2 * np + nx;
    let mut lifted = sub.embed(total, np);
    let h = cone.h();
    let lift = |r: &Row| {
        let mut c = zeros(total);
        for k in 0..np {
            c[k] = r.coeffs[k].clone();
            c[np + k] = -r.coeffs[k].clone();
        }
        for j in 0..nx {
            c[2 * np + j] = -r.coeffs[np + j].clone();
        }
        c
    };
    for r in h.ineqs() {
        lifted = lifted.with_ineq(lift(r), Scalar::zero());
    }
    for r in h.eqs() {
        lifted = lifted.with_eq(lift(r), Scalar::zero());
    }
    lifted.project(&(0..np).collect::<Vec<_>>()).canonical()
}

/// `D*C(p̄, x̄)(x*) = {p* : (p*, -x*) ∈ N((p̄, x̄), gph C)}`.
pub fn coderivative_constraint(pr: &ParametricProblem, base: &BasePoint, xstar: &[Scalar]) -> Result<CoderivSet> {
    if xstar.len() != pr.dims.x {
        return Err(Error::DimensionMismatch("x* must have length x".into()));
    }
    let n = normal_cone(&pr.graph_polyhedron()?, &base.px()).map_err(|_| Error::InfeasiblePoint)?;
    Ok(CoderivSet::new(slice_p(&n, xstar, pr.dims.p), xstar, Provenance::ConstraintGraph, None))
}

fn require_qualification(pr: &ParametricProblem, base: &BasePoint) -> Result<QualReport> {
    let q = qualification_check(pr, base)?;
    if !q.holds() {
        return Err(Error::QualificationFailed(serde_json::to_string(&q).unwrap_or_default()));
    }
    Ok(q)
}

fn profile_with(
    pr: &ParametricProblem,
    base: &BasePoint,
    ystar: &[Scalar],
    cone: &OrderCone,
    provenance: Provenance,
) -> Result<CoderivSet> {
    let np = pr.dims.p;
    let Some(sub) = gate_and_subdifferential(pr, base, ystar, cone)? else {
        return Ok(CoderivSet::empty(np, ystar, Provenance::KStarGate));
    };
    require_qualification(pr, base)?;
    let n = constraint_normal_cone(pr, base)?;
    let set = combine(&sub.set, &n, np, pr.dims.x);
    Ok(CoderivSet::new(set, ystar, provenance, sub.tolerance))
}

/// `D*(F + K)(p̄, ȳ)(y*)`: empty for `y* ∉ K*`, otherwise
/// `⋃ {p* + D*C(p̄, x̄)(x*) : (p*, x*) ∈ ∂⟨y*, f⟩(p̄, x̄)}`.
pub fn profile_coderivative(pr: &ParametricProblem, base: &BasePoint, ystar: &[Scalar]) -> Result<CoderivSet> {
    profile_with(pr, base, ystar, &pr.cone, Provenance::Profile)
}

/// Coderivative of the minimal, weakly minimal (with `K̃`) or properly
/// minimal frontier map plus its cone, given a domination certificate for
/// that variant.
pub fn frontier_coderivative(
    pr: &ParametricProblem,
    base: &BasePoint,
    ystar: &[Scalar],
    variant: Variant,
    cert: &DominationCertificate,
) -> Result<CoderivSet> {
    let cone = match variant {
        Variant::Weak => {
            let tilde = pr.cone_tilde.as_ref().ok_or(Error::MissingTildeCone)?;
            if !tilde_inside_interior(&pr.cone, tilde) {
                return Err(Error::TildeConeNotInterior);
            }
            tilde
        }
        Variant::Min | Variant::Proper => &pr.cone,
    };
    check_ystar(pr, ystar)?;
    if !cone.dual_contains(ystar) {
        return Ok(CoderivSet::empty(pr.dims.p, ystar, Provenance::KStarGate));
    }
    cert.require(variant)?;
    check_solution_variant(pr, &base.p, &base.x, variant)?;
    profile_with(pr, base, ystar, cone, Provenance::Frontier { variant })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::builtins;
    use crate::scalar::{int, ints, ratio};

    fn base(pr: &ParametricProblem, p: &[i64], x: &[i64]) -> BasePoint {
        BasePoint::feasible(pr, &ints(p), &ints(x)).unwrap()
    }

    fn point(v: &[i64]) -> HPolyhedron {
        HPolyhedron::point(&ints(v))
    }

    #[test]
    fn subdifferentials() {
        let pr = builtins::example_4_1();
        let b = base(&pr, &[0, 0, 0], &[0]);
        let s = scalar_subdifferential(&pr, &b, &ints(&[1, 3])).unwrap();
        assert!(s.set.set_eq(&point(&[0, 0, 0, 7])));
        let s = scalar_subdifferential(&pr, &b, &ints(&[0, 0])).unwrap();
        assert!(s.set.set_eq(&point(&[0, 0, 0, 0])));
        let pr = builtins::example_5_1();
        let b = base(&pr, &[0], &[0, 0]);
        let s = scalar_subdifferential(&pr, &b, &ints(&[2, 5])).unwrap();
        assert!(s.set.set_eq(&point(&[0, 2, 5])));
        // kink of |x| at 0
        let pr = builtins::example_2_1();
        let b = base(&pr, &[0], &[0]);
        let s = scalar_subdifferential(&pr, &b, &ints(&[1, 2])).unwrap();
        assert!(s.set.set_eq(&HPolyhedron::boxed(&ints(&[0, -3]), &ints(&[0, 3]))));
    }

    #[test]
    fn constraint_coderivative_of_the_half_line() {
        let pr = builtins::example_4_1();
        let b = base(&pr, &[0, 0, 0], &[0]);
        assert!(coderivative_constraint(&pr, &b, &ints(&[2])).unwrap().set_eq(&point(&[2, 4, 2])));
        assert!(coderivative_constraint(&pr, &b, &ints(&[-1])).unwrap().is_empty());
        let pr = builtins::example_5_1();
        let b = base(&pr, &[0], &[0, 0]);
        assert!(coderivative_constraint(&pr, &b, &ints(&[1, 1])).unwrap().set_eq(&point(&[0])));
        assert!(coderivative_constraint(&pr, &b, &ints(&[-1, 0])).unwrap().is_empty());
    }

    #[test]
    fn profile_values() {
        let pr = builtins::example_4_1();
        let b = base(&pr, &[0, 0, 0], &[0]);
        let c = profile_coderivative(&pr, &b, &ints(&[1, 1])).unwrap();
        assert_eq!(c.as_point(), Some(ints(&[3, 6, 3])));
        assert_eq!(c.provenance, Provenance::Profile);
        let c = profile_coderivative(&pr, &b, &ints(&[-1, 0])).unwrap();
        assert!(c.is_empty());
        assert_eq!(c.provenance, Provenance::KStarGate);
        let c = profile_coderivative(&pr, &b, &[ratio(1, 2), int(0)]).unwrap();
        assert_eq!(c.as_point(), Some(vec![ratio(1, 2), int(1), ratio(1, 2)]));
        let pr = builtins::example_5_1();
        let b = base(&pr, &[0], &[0, 0]);
        assert_eq!(profile_coderivative(&pr, &b, &ints(&[2, 5])).unwrap().as_point(), Some(ints(&[0])));
    }

    #[test]
    fn abs_pair_profile_at_the_kink() {
        // C(p) = {x >= |p|} at p = 0, x = 0: the kink interval meets the
        // constraint normals
        let pr = builtins::example_2_1();
        let b = base(&pr, &[0], &[0]);
        let c = profile_coderivative(&pr, &b, &ints(&[1, 1])).unwrap();
        assert!(!c.is_empty());
        assert!(c.contains(&ints(&[0])));
    }

    #[test]
    fn smooth_constraints_use_active_gradients() {
        let pr = builtins::acq_failure();
        let b = base(&pr, &[0], &[0]);
        assert_eq!(profile_coderivative(&pr, &b, &ints(&[1, 1])), Err(Error::AcqRequired));
    }

    #[test]
    fn weak_variant_needs_a_tilde_cone() {
        let pr = builtins::example_4_1();
        let b = base(&pr, &[0, 0, 0], &[0]);
        let cert = DominationCertificate::assumed(Variant::Weak);
        assert_eq!(
            frontier_coderivative(&pr, &b, &ints(&[1, 1]), Variant::Weak, &cert),
            Err(Error::MissingTildeCone)
        );
        let pr = pr.with_cone_tilde(crate::problem::ConeSpec::Generators(vec![ints(&[2, 1]), ints(&[1, 2])])).unwrap();
        // (2, -1) pairs nonnegatively with K̃ but not with K
        let c = frontier_coderivative(&pr, &b, &ints(&[2, -1]), Variant::Weak, &cert).unwrap();
        assert_eq!(c.as_point(), Some(ints(&[0, 0, 0])));
        let c = frontier_coderivative(&pr, &b, &ints(&[1, 1]), Variant::Weak, &cert).unwrap();
        assert_eq!(c.as_point(), Some(ints(&[3, 6, 3])));
    }

    #[test]
    fn frontier_requires_a_matching_certificate() {
        let pr = builtins::example_4_1();
        let b = base(&pr, &[0, 0, 0], &[0]);
        let wrong = DominationCertificate::assumed(Variant::Proper);
        assert_eq!(
            frontier_coderivative(&pr, &b, &ints(&[1, 1]), Variant::Min, &wrong),
            Err(Error::DominationNotCertified)
        );
        let ok = DominationCertificate::assumed(Variant::Min);
        let c = frontier_coderivative(&pr, &b, &ints(&[2, 3]), Variant::Min, &ok).unwrap();
        assert_eq!(c.as_point(), Some(ints(&[8, 16, 8])));
        let dominated = base(&pr, &[0, 0, 0], &[1]);
        assert!(matches!(
            frontier_coderivative(&pr, &dominated, &ints(&[1, 1]), Variant::Min, &ok),
            Err(Error::NotEfficient { .. })
        ));
    }
}

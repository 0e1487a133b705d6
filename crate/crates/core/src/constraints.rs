//! Active sets, constraint qualifications and Lagrange-multiplier descriptions
//! of the constraint coderivative, including semi-infinite families.

use crate::coderivative::{gate_and_subdifferential, qualification_check, CoderivSet, Provenance};
use crate::domination::DominationCertificate;
use crate::error::{Error, Result};
use crate::geometry::{normal_cone, tangent_cone, HPolyhedron, PolyCone, Row};
use crate::problem::{BasePoint, ConstraintSpec, ParametricProblem, Relation, SemiInfiniteFamily, SmoothConstraint};
use crate::scalar::{int, neg, to_f64, zeros, Scalar};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Where `t ↦ g_t(p̄, x̄)` vanishes on the index interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyActivity {
    pub family: usize,
    /// Closed sub-intervals on which the family is identically active.
    #[serde(with = "crate::serde_scalar::mat")]
    pub intervals: Vec<Vec<Scalar>>,
    #[serde(with = "crate::serde_scalar::vec")]
    pub roots: Vec<Scalar>,
}

impl FamilyActivity {
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty() && self.roots.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActiveSet {
    /// Indices into the explicit rows (affine rows, smooth constraints, or the
    /// extra rows of a semi-infinite system). Equalities are always active.
    pub rows: Vec<usize>,
    pub families: Vec<FamilyActivity>,
}

impl ActiveSet {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty() && self.families.iter().all(|f| f.is_empty())
    }
}

/// Exact rational square root, if there is one.
fn rational_sqrt(q: &Scalar) -> Option<Scalar> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer().sqrt(), q.denom().sqrt());
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Scalar::new(n, d))
}

fn family_activity(i: usize, f: &SemiInfiniteFamily, p: &[Scalar], x: &[Scalar]) -> Result<FamilyActivity> {
    let c = f.value_poly(p, x);
    let (lo, hi) = (&f.t_lo, &f.t_hi);
    let inside = |t: &Scalar| t >= lo && t <= hi;
    let mut act = FamilyActivity { family: i, intervals: vec![], roots: vec![] };
    if c.iter().all(|a| a.is_zero()) {
        act.intervals.push(vec![lo.clone(), hi.clone()]);
        return Ok(act);
    }
    if c[2].is_zero() {
        if !c[1].is_zero() {
            let t = -&c[0] / &c[1];
            if inside(&t) {
                act.roots.push(t);
            }
        }
        return Ok(act);
    }
    let disc = &c[1] * &c[1] - int(4) * &c[0] * &c[2];
    if disc.is_negative() {
        return Ok(act);
    }
    let two_a = int(2) * &c[2];
    match rational_sqrt(&disc) {
        Some(s) => {
            let mut ts = vec![(-&c[1] - &s) / &two_a, (-&c[1] + &s) / &two_a];
            ts.sort();
            ts.dedup();
            act.roots = ts.into_iter().filter(inside).collect();
        }
        None => {
            let s = to_f64(&disc).sqrt();
            for r in [(-to_f64(&c[1]) - s) / to_f64(&two_a), (-to_f64(&c[1]) + s) / to_f64(&two_a)] {
                if r >= to_f64(lo) - 1e-12 && r <= to_f64(hi) + 1e-12 {
                    return Err(Error::IrrationalRoot(r));
                }
            }
        }
    }
    Ok(act)
}

fn rows_active(rows: &[crate::problem::AffineRow], p: &[Scalar], x: &[Scalar]) -> Vec<usize> {
    rows.iter()
        .enumerate()
        .filter(|(_, r)| r.rel == Relation::Eq || r.eval(p, x).is_zero())
        .map(|(i, _)| i)
        .collect()
}

/// `I(p̄, x̄)` and, for each family, the active part of the index interval.
pub fn active_set(pr: &ParametricProblem, base: &BasePoint) -> Result<ActiveSet> {
    let (p, x) = (&base.p, &base.x);
    if !pr.constraints.is_feasible(p, x)? {
        return Err(Error::InfeasiblePoint);
    }
    Ok(match &pr.constraints {
        ConstraintSpec::Affine(rows) => ActiveSet { rows: rows_active(rows, p, x), families: vec![] },
        ConstraintSpec::SemiInfinite { families, rows } => ActiveSet {
            rows: rows_active(rows, p, x),
            families: families
                .iter()
                .enumerate()
                .map(|(i, f)| family_activity(i, f, p, x))
                .collect::<Result<_>>()?,
        },
        ConstraintSpec::Smooth(gs) => ActiveSet {
            rows: (0..gs.len()).filter(|&i| gs[i].eval(p, x).is_zero()).collect(),
            families: vec![],
        },
    })
}

/// One differentiable constraint at the base point.
#[derive(Debug, Clone)]
struct Linearized {
    grad: Vec<Scalar>,
    equality: bool,
    active: bool,
}

fn linearize(pr: &ParametricProblem, base: &BasePoint) -> Result<Vec<Linearized>> {
    let (p, x) = (&base.p, &base.x);
    match &pr.constraints {
        ConstraintSpec::Smooth(gs) => Ok(gs
            .iter()
            .map(|g| Linearized { grad: g.gradient(p, x), equality: false, active: g.eval(p, x).is_zero() })
            .collect()),
        c => Ok(c
            .polyhedral_rows()?
            .iter()
            .map(|r| Linearized {
                grad: r.gradient(),
                equality: r.rel == Relation::Eq,
                active: r.rel == Relation::Eq || r.eval(p, x).is_zero(),
            })
            .collect()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcqReport {
    pub holds: bool,
    pub tangent: PolyCone,
    pub linearization: PolyCone,
}

/// Tangent cone of `gph C` at a point of a smooth system, from the closed form
/// of each shipped constraint: `‖x‖² <= 0` pins `x = 0`, the others have a
/// Slater point and contribute their linearization.
fn smooth_tangent(gs: &[SmoothConstraint], base: &BasePoint, n: usize) -> PolyCone {
    let np = base.p.len();
    let mut ineqs = Vec::new();
    let mut eqs = Vec::new();
    for g in gs {
        if *g == SmoothConstraint::XSquared {
            eqs.extend((np..n).map(|i| crate::scalar::unit(n, i)));
        } else if g.eval(&base.p, &base.x).is_zero() {
            ineqs.push(g.gradient(&base.p, &base.x));
        }
    }
    PolyCone::from_rows(n, &ineqs, &eqs)
}

fn linearization_cone(lin: &[Linearized], n: usize) -> PolyCone {
    let ineqs: Vec<_> = lin.iter().filter(|l| l.active && !l.equality).map(|l| l.grad.clone()).collect();
    let eqs: Vec<_> = lin.iter().filter(|l| l.equality).map(|l| l.grad.clone()).collect();
    PolyCone::from_rows(n, &ineqs, &eqs)
}

/// Abadie's condition: the tangent cone of `gph C` contains the linearized
/// cone of the active constraints. The reverse inclusion always holds, so
/// `holds` means the two agree.
pub fn acq_check(pr: &ParametricProblem, base: &BasePoint) -> Result<AcqReport> {
    let n = pr.n_px();
    let lin = linearize(pr, base)?;
    let linearization = linearization_cone(&lin, n);
    let tangent = match &pr.constraints {
        ConstraintSpec::Smooth(gs) => smooth_tangent(gs, base, n),
        _ => tangent_cone(&pr.graph_polyhedron()?, &base.px()).map_err(|_| Error::InfeasiblePoint)?,
    };
    Ok(AcqReport { holds: tangent.contains_cone(&linearization), tangent, linearization })
}

/// `N((p̄, x̄), gph C)`: exact for polyhedral graphs, and the cone of active
/// gradients for smooth systems satisfying ACQ.
pub fn constraint_normal_cone(pr: &ParametricProblem, base: &BasePoint) -> Result<PolyCone> {
    if pr.constraints.is_polyhedral() {
        return normal_cone(&pr.graph_polyhedron()?, &base.px()).map_err(|_| Error::InfeasiblePoint);
    }
    let acq = acq_check(pr, base)?;
    if !acq.holds {
        return Err(Error::AcqRequired);
    }
    Ok(acq.linearization.negative_polar())
}

/// `Λ(p̄, x̄, x*)` together with the `p`-gradients that map it to `P*`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierPolyhedron {
    /// Polyhedron in `λ`-space, one coordinate per constraint.
    pub lambda: HPolyhedron,
    /// `∇_p g_i(p̄, x̄)` for every constraint.
    pub grads_p: Vec<Vec<Scalar>>,
    pub equality: Vec<bool>,
    pub active: Vec<bool>,
}

/// `{λ : -x* = Σ λ_i ∇_x g_i, λ_i >= 0 on inequalities, λ_i = 0 off the active set}`.
pub fn multiplier_polyhedron(pr: &ParametricProblem, base: &BasePoint, xstar: &[Scalar]) -> Result<MultiplierPolyhedron> {
    if xstar.len() != pr.dims.x {
        return Err(Error::DimensionMismatch("x* must have length x".into()));
    }
    if !acq_check(pr, base)?.holds {
        return Err(Error::AcqRequired);
    }
    let lin = linearize(pr, base)?;
    let m = lin.len();
    let np = pr.dims.p;
    let mut lambda = HPolyhedron::universe(m);
    for (i, l) in lin.iter().enumerate() {
        if !l.active {
            lambda = lambda.with_eq(crate::scalar::unit(m, i), Scalar::zero());
        } else if !l.equality {
            lambda = lambda.with_ineq(neg(&crate::scalar::unit(m, i)), Scalar::zero());
        }
    }
    for j in 0..pr.dims.x {
        let coeffs: Vec<Scalar> = lin.iter().map(|l| l.grad[np + j].clone()).collect();
        lambda = lambda.with_eq(coeffs, -xstar[j].clone());
    }
    Ok(MultiplierPolyhedron {
        lambda,
        grads_p: lin.iter().map(|l| l.grad[..np].to_vec()).collect(),
        equality: lin.iter().map(|l| l.equality).collect(),
        active: lin.iter().map(|l| l.active).collect(),
    })
}

/// `{Σ λ_i ∇_p g_i : λ ∈ Λ}`.
pub fn image_p_star(mp: &MultiplierPolyhedron) -> HPolyhedron {
    let m = mp.lambda.dim();
    let np = mp.grads_p.first().map_or(0, |g| g.len());
    // lifted variables (p*, λ)
    let mut lifted = HPolyhedron::universe(np).product(&mp.lambda);
    for k in 0..np {
        let mut row = zeros(np + m);
        row[k] = Scalar::one();
        for (i, g) in mp.grads_p.iter().enumerate() {
            row[np + i] = -g[k].clone();
        }
        lifted = lifted.with_eq(row, Scalar::zero());
    }
    lifted.project(&(0..np).collect::<Vec<_>>()).canonical()
}

fn family_gradients(f: &SemiInfiniteFamily, act: &FamilyActivity) -> Result<Vec<Vec<Scalar>>> {
    let mut ts: Vec<Scalar> = act.roots.clone();
    for iv in &act.intervals {
        ts.push(iv[0].clone());
        ts.push(iv[1].clone());
        // the gradient curve of a parallel quadratic family turns at its
        // critical point, which then generates as well
        for t in f.reduction_points()? {
            if t > iv[0] && t < iv[1] {
                ts.push(t);
            }
        }
    }
    Ok(ts.iter().map(|t| f.row_at(t).gradient()).collect())
}

/// Cone generated by the active gradients `∇g_t(p̄, x̄)`, which is the union
/// over finitely supported active multipliers of `Σ λ_t ∂g_t(p̄, x̄)`.
pub fn bcq_cone(pr: &ParametricProblem, base: &BasePoint) -> Result<PolyCone> {
    let n = pr.n_px();
    let act = active_set(pr, base)?;
    let mut rays = Vec::new();
    let mut lines = Vec::new();
    let explicit: &[crate::problem::AffineRow] = match &pr.constraints {
        ConstraintSpec::Affine(rows) => rows,
        ConstraintSpec::SemiInfinite { families, rows } => {
            for fa in &act.families {
                rays.extend(family_gradients(&families[fa.family], fa)?);
            }
            rows
        }
        ConstraintSpec::Smooth(_) => {
            return Err(Error::UnsupportedConstraintKind("the multiplier cone needs affine constraint data".into()))
        }
    };
    for &i in &act.rows {
        let r = &explicit[i];
        match r.rel {
            Relation::Le => rays.push(r.gradient()),
            Relation::Eq => lines.push(r.gradient()),
        }
    }
    Ok(PolyCone::from_generators(n, &rays, &lines))
}

/// `N(gph C) ⊆ bcq_cone`.
pub fn bcq_check(pr: &ParametricProblem, base: &BasePoint) -> Result<bool> {
    let cone = bcq_cone(pr, base)?;
    let n = normal_cone(&pr.graph_polyhedron()?, &base.px()).map_err(|_| Error::InfeasiblePoint)?;
    Ok(cone.contains_cone(&n))
}

/// `{u* : (u*, -x*) ∈ cone}` for a cone in `P* × X*`.
pub(crate) fn slice_p(cone: &PolyCone, xstar: &[Scalar], np: usize) -> HPolyhedron {
    let h = cone.h();
    let substitute = |r: &Row| {
        let rhs = r.rhs.clone() + r.coeffs[np..].iter().zip(xstar).map(|(a, v)| a * v).sum::<Scalar>();
        Row::new(r.coeffs[..np].to_vec(), rhs)
    };
    HPolyhedron::new(np, h.ineqs().iter().map(substitute).collect(), h.eqs().iter().map(substitute).collect())
}

/// Frontier coderivative of a semi-infinite problem through the multiplier
/// cone: `∇_p f(p̄, x̄)ᵀ y* + {u* : (u*, -∇_x f(p̄, x̄)ᵀ y*) ∈ bcq_cone}`.
pub fn semi_infinite_frontier_coderivative(
    pr: &ParametricProblem,
    base: &BasePoint,
    ystar: &[Scalar],
    cert: &DominationCertificate,
) -> Result<CoderivSet> {
    let np = pr.dims.p;
    let Some(sub) = gate_and_subdifferential(pr, base, ystar, &pr.cone)? else {
        return Ok(CoderivSet::empty(np, ystar, Provenance::KStarGate));
    };
    cert.require(crate::efficiency::Variant::Min)?;
    if !bcq_check(pr, base)? {
        return Err(Error::BcqRequired);
    }
    let q = qualification_check(pr, base)?;
    if !q.holds() {
        return Err(Error::QualificationFailed(serde_json::to_string(&q).unwrap_or_default()));
    }
    let cone = bcq_cone(pr, base)?;
    let set = crate::coderivative::combine(&sub.set, &cone, np, pr.dims.x);
    Ok(CoderivSet::new(set, ystar, Provenance::SemiInfinite, sub.tolerance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::builtins;
    use crate::scalar::{ints, ratio};

    fn base(pr: &ParametricProblem, p: &[i64], x: &[i64]) -> BasePoint {
        BasePoint::feasible(pr, &ints(p), &ints(x)).unwrap()
    }

    #[test]
    fn active_sets_of_the_family() {
        let pr = builtins::example_5_1();
        let a = active_set(&pr, &base(&pr, &[0], &[0, 0])).unwrap();
        assert_eq!(a.families[0].intervals, vec![ints(&[0, 1])]);
        // g_t = -t at x = (1, 0)
        let a = active_set(&pr, &base(&pr, &[0], &[1, 0])).unwrap();
        assert!(a.families[0].intervals.is_empty());
        assert_eq!(a.families[0].roots, ints(&[0]));
        let a = active_set(&pr, &base(&pr, &[0], &[1, 1])).unwrap();
        assert!(a.is_empty());
    }

    #[test]
    fn quadratic_family_roots() {
        // b(t) = t² - t vanishes at both endpoints
        let f = SemiInfiniteFamily {
            ap: vec![],
            ax: vec![],
            b: vec![int(0), int(-1), int(1)],
            t_lo: int(0),
            t_hi: int(1),
        };
        let a = family_activity(0, &f, &[], &[]).unwrap();
        assert_eq!(a.roots, ints(&[0, 1]));
        // t² - 2 has the irrational root √2 inside [0, 2]
        let f = SemiInfiniteFamily { b: vec![int(-2), int(0), int(1)], t_lo: int(0), t_hi: int(2), ..f };
        assert!(matches!(family_activity(0, &f, &[], &[]), Err(Error::IrrationalRoot(r)) if (r - 2f64.sqrt()).abs() < 1e-12));
        assert_eq!(rational_sqrt(&ratio(9, 4)), Some(ratio(3, 2)));
    }

    #[test]
    fn acq_on_affine_and_smooth() {
        let pr = builtins::example_4_1();
        assert!(acq_check(&pr, &base(&pr, &[0, 0, 0], &[0])).unwrap().holds);
        let pr = builtins::acq_failure();
        let r = acq_check(&pr, &base(&pr, &[0], &[0])).unwrap();
        assert!(!r.holds);
        assert!(r.linearization.is_linear_subspace());
        assert_eq!(r.linearization.lines().len(), 2);
        assert_eq!(r.tangent.lines().len(), 1);
        assert_eq!(constraint_normal_cone(&pr, &base(&pr, &[0], &[0])), Err(Error::AcqRequired));
    }

    #[test]
    fn multipliers_match_the_graph_route() {
        let pr = builtins::example_4_1();
        let b = base(&pr, &[0, 0, 0], &[0]);
        let mp = multiplier_polyhedron(&pr, &b, &ints(&[3])).unwrap();
        assert_eq!(mp.lambda.vertices(), vec![ints(&[3])]);
        assert!(image_p_star(&mp).set_eq(&HPolyhedron::point(&ints(&[3, 6, 3]))));
        let mp = multiplier_polyhedron(&pr, &b, &ints(&[-1])).unwrap();
        assert!(mp.lambda.is_empty());
        assert!(image_p_star(&mp).is_empty());
        // strictly feasible: only x* = 0 has multipliers
        let b = base(&pr, &[0, 0, 0], &[1]);
        let mp = multiplier_polyhedron(&pr, &b, &ints(&[0])).unwrap();
        assert!(image_p_star(&mp).set_eq(&HPolyhedron::point(&ints(&[0, 0, 0]))));
    }

    #[test]
    fn bcq_of_the_family() {
        let pr = builtins::example_5_1();
        let b = base(&pr, &[0], &[0, 0]);
        let c = bcq_cone(&pr, &b).unwrap();
        let expected = PolyCone::from_generators(3, &[ints(&[0, -1, 0]), ints(&[0, 0, -1])], &[]);
        assert_eq!(c, expected);
        assert!(bcq_check(&pr, &b).unwrap());
        // monotone in the active set
        let small = bcq_cone(&pr, &base(&pr, &[0], &[1, 0])).unwrap();
        let none = bcq_cone(&pr, &base(&pr, &[0], &[1, 1])).unwrap();
        assert!(c.contains_cone(&small) && small.contains_cone(&none));
        assert_eq!(none, PolyCone::zero(3));
        assert_eq!(small.rays(), &[ints(&[0, 0, -1])]);
    }
}

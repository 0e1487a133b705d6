//! Base points `(p̄, x̄, ȳ)` with `x̄ ∈ 𝒮(p̄)`.

use super::*;
use crate::efficiency::{default_weights, frontier_sample, Variant};
use crate::geometry::{lp, LpOutcome};
use crate::scalar::{neg, round_f64, sub, to_f64_vec};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasePoint {
    #[serde(with = "crate::serde_scalar::vec")]
    pub p: Vec<Scalar>,
    #[serde(with = "crate::serde_scalar::vec")]
    pub x: Vec<Scalar>,
    /// `f(p̄, x̄)`, recomputed; rounded to 12 digits when `f` is not rational.
    #[serde(with = "crate::serde_scalar::vec")]
    pub y: Vec<Scalar>,
    pub exact: bool,
}

impl BasePoint {
    /// `(p̄, x̄)` with `ȳ = f(p̄, x̄)`, checking feasibility only.
    pub fn feasible(pr: &ParametricProblem, p: &[Scalar], x: &[Scalar]) -> Result<BasePoint> {
        if p.len() != pr.dims.p || x.len() != pr.dims.x {
            return Err(Error::DimensionMismatch("base point has the wrong length".into()));
        }
        if !pr.constraints.is_feasible(p, x)? {
            return Err(Error::InfeasiblePoint);
        }
        let (y, exact) = match pr.objective.eval(p, x) {
            Some(y) => (y, true),
            None => {
                let yf = pr.objective.eval_f64(&to_f64_vec(p), &to_f64_vec(x));
                (yf.iter().map(|&v| round_f64(v, 12)).collect(), false)
            }
        };
        Ok(BasePoint { p: p.to_vec(), x: x.to_vec(), y, exact })
    }

    /// `(p̄, x̄)` concatenated.
    pub fn px(&self) -> Vec<Scalar> {
        self.p.iter().chain(&self.x).cloned().collect()
    }
}

/// Checks `x̄ ∈ C(p̄)` and `f(p̄, x̄) ∈ Min_K F(p̄)`.
pub fn check_solution_point(pr: &ParametricProblem, p: &[Scalar], x: &[Scalar]) -> Result<BasePoint> {
    check_solution_variant(pr, p, x, Variant::Min)
}

/// As [`check_solution_point`] for minimal, weakly minimal or properly minimal
/// values.
///
/// Affine objectives over polyhedral constraints are decided exactly by LP.
/// For those, minimal points of the image are properly minimal as well, so
/// `Proper` reduces to `Min`. Other instances are compared against a frontier
/// sample at `p̄` with tolerance `1e-7`.
pub fn check_solution_variant(pr: &ParametricProblem, p: &[Scalar], x: &[Scalar], variant: Variant) -> Result<BasePoint> {
    let base = BasePoint::feasible(pr, p, x)?;
    if pr.objective.is_affine() && pr.constraints.is_polyhedral() {
        exact_efficiency(pr, &base, variant)?;
    } else {
        sampled_efficiency(pr, &base, variant)?;
    }
    Ok(base)
}

fn exact_efficiency(pr: &ParametricProblem, base: &BasePoint, variant: Variant) -> Result<()> {
    let ObjectiveSpec::Affine { fp, fx, c } = &pr.objective else { unreachable!() };
    let nx = pr.dims.x;
    // d(x) = ȳ - f(p̄, x) = r - Fx x with r = ȳ - Fp p̄ - c
    let r: Vec<Scalar> = base
        .y
        .iter()
        .zip(fp)
        .zip(c)
        .map(|((yi, row), ci)| yi - dot(row, &base.p) - ci)
        .collect();
    let k = pr.cone.cone().h();
    let feasible = pr.feasible_polyhedron(&base.p)?;
    let strict = variant == Variant::Weak;
    if strict && !pr.cone.is_solid() {
        return Err(Error::ConeNotSolid);
    }
    // rows a·d <= -s for K's inequalities, e·d = 0 for its equalities,
    // over variables (x, s)
    let mut ineqs = Vec::new();
    let mut eqs = Vec::new();
    let lift = |v: Vec<Scalar>, s: Scalar| {
        let mut v = v;
        v.push(s);
        v
    };
    for row in feasible.ineqs() {
        ineqs.push(Row::new(lift(row.coeffs.clone(), Scalar::zero()), row.rhs.clone()));
    }
    for row in feasible.eqs() {
        eqs.push(Row::new(lift(row.coeffs.clone(), Scalar::zero()), row.rhs.clone()));
    }
    for a in k.ineqs() {
        // a·(r - Fx x) + s <= 0
        let coeffs = neg(&crate::scalar::mat_t_vec(fx, &a.coeffs, nx));
        let s = if strict { Scalar::one() } else { Scalar::zero() };
        ineqs.push(Row::new(lift(coeffs, s), -dot(&a.coeffs, &r)));
    }
    for e in k.eqs() {
        let coeffs = neg(&crate::scalar::mat_t_vec(fx, &e.coeffs, nx));
        eqs.push(Row::new(lift(coeffs, Scalar::zero()), -dot(&e.coeffs, &r)));
    }
    let mut s_cap = zeros(nx + 1);
    s_cap[nx] = Scalar::one();
    ineqs.push(Row::new(s_cap, Scalar::one()));
    let poly = HPolyhedron::new(nx + 1, ineqs, eqs);
    // objective: strict mode maximizes s, otherwise maximizes ⟨w0, d(x)⟩
    let objective = if strict {
        let mut o = zeros(nx + 1);
        o[nx] = Scalar::one();
        o
    } else {
        let w0 = pr.cone.interior_dual_vector().ok_or(Error::ConeDegenerate)?;
        lift(neg(&crate::scalar::mat_t_vec(fx, &w0, nx)), Scalar::zero())
    };
    let offset = if strict {
        Scalar::zero()
    } else {
        let w0 = pr.cone.interior_dual_vector().unwrap();
        dot(&w0, &r)
    };
    let witness = match lp::maximize(&objective, &poly) {
        LpOutcome::Infeasible => None,
        LpOutcome::Optimal { point, value } => (value + &offset > Scalar::zero()).then_some(point),
        LpOutcome::Unbounded => {
            let mut bar = objective.clone();
            bar = neg(&bar);
            lp::find_point(&poly.clone().with_ineq(bar, &offset - Scalar::one()))
        }
    };
    if let Some(mut point) = witness {
        point.truncate(nx);
        let wy = pr.objective.eval(&base.p, &point).unwrap();
        return Err(Error::NotEfficient { witness_x: point, witness_y: wy });
    }
    Ok(())
}

fn sampled_efficiency(pr: &ParametricProblem, base: &BasePoint, variant: Variant) -> Result<()> {
    const TOL: f64 = 1e-7;
    let frontier = match frontier_sample(pr, &base.p, &default_weights(&pr.cone)) {
        Ok(f) => f,
        // no bounded scalarization: some direction improves without limit
        Err(Error::UnboundedScalarization(_)) if variant != Variant::Weak => {
            return Err(Error::NotEfficient { witness_x: Vec::new(), witness_y: Vec::new() })
        }
        Err(e) => return Err(e),
    };
    let w0 = pr.cone.interior_dual_vector().ok_or(Error::ConeDegenerate)?;
    for (y, x) in frontier.points.iter().zip(&frontier.preimages) {
        let d = sub(&base.y, y);
        let dominated = match variant {
            Variant::Weak => pr.cone.contains_interior(&d) && to_f64(&dot(&w0, &d)) > TOL,
            _ => pr.cone.contains(&d) && to_f64(&dot(&w0, &d)) > TOL,
        };
        if dominated {
            return Err(Error::NotEfficient { witness_x: x.clone(), witness_y: y.clone() });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::builtins;
    use super::*;
    use crate::scalar::ints;

    #[test]
    fn builtin_base_points() {
        let b = check_solution_point(&builtins::example_4_1(), &ints(&[0, 0, 0]), &ints(&[0])).unwrap();
        assert_eq!(b.y, ints(&[0, 0]));
        let b = check_solution_point(&builtins::example_5_1(), &ints(&[0]), &ints(&[0, 0])).unwrap();
        assert_eq!(b.y, ints(&[2, 3]));
    }

    #[test]
    fn dominated_base_point() {
        let r = check_solution_point(&builtins::example_4_1(), &ints(&[0, 0, 0]), &ints(&[1]));
        assert_eq!(r, Err(Error::NotEfficient { witness_x: ints(&[0]), witness_y: ints(&[0, 0]) }));
        let r = check_solution_point(&builtins::example_4_1(), &ints(&[0, 0, 0]), &ints(&[-1]));
        assert_eq!(r, Err(Error::InfeasiblePoint));
    }

    #[test]
    fn ray_points_are_weak_but_not_minimal() {
        let pr = builtins::ray_counterexample();
        assert!(matches!(check_solution_point(&pr, &ints(&[0]), &ints(&[0])), Err(Error::NotEfficient { .. })));
        assert!(check_solution_variant(&pr, &ints(&[0]), &ints(&[0]), Variant::Weak).is_ok());
    }

    #[test]
    fn float_path_base_points() {
        let pr = builtins::exp_tradeoff();
        assert!(check_solution_point(&pr, &ints(&[0]), &ints(&[0])).is_ok());
        let pr = builtins::example_2_1();
        assert!(check_solution_point(&pr, &ints(&[1]), &ints(&[1])).is_ok());
        assert!(matches!(check_solution_point(&pr, &ints(&[1]), &ints(&[2])), Err(Error::NotEfficient { .. })));
    }
}

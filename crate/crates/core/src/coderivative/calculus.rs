//! Set-valued maps with polyhedral graphs and the pair, chain and sum rules
//! for their coderivatives, alongside the direct normal-cone computation on
//! the assembled graph.

use super::qualification::difference_cone;
use crate::constraints::slice_p;
use crate::error::{Error, Result};
use crate::geometry::{lp, normal_cone, HPolyhedron, PolyCone, Row};
use crate::problem::{BasePoint, ObjectiveBuiltin, ObjectiveSpec, ParametricProblem};
use crate::scalar::{ints, neg, sub, zeros, Matrix, Scalar};
use num_traits::{One, Zero};

/// `H : ℝ^dom ⇉ ℝ^img` given by its graph in `ℝ^dom × ℝ^img`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMap {
    dom_dim: usize,
    img_dim: usize,
    graph: HPolyhedron,
}

impl PolyMap {
    pub fn new(dom_dim: usize, img_dim: usize, graph: HPolyhedron) -> Result<Self> {
        if graph.dim() != dom_dim + img_dim {
            return Err(Error::DimensionMismatch(format!(
                "graph of dimension {} for a map ℝ^{} ⇉ ℝ^{}",
                graph.dim(),
                dom_dim,
                img_dim
            )));
        }
        Ok(PolyMap { dom_dim, img_dim, graph })
    }

    /// `x ↦ {A x + b}`.
    pub fn affine(a: &Matrix, b: &[Scalar], dom_dim: usize) -> Self {
        let img = b.len();
        let mut g = HPolyhedron::universe(dom_dim + img);
        for (i, row) in a.iter().enumerate() {
            let mut c = neg(row);
            c.extend((0..img).map(|k| if k == i { Scalar::one() } else { Scalar::zero() }));
            g = g.with_eq(c, b[i].clone());
        }
        PolyMap { dom_dim, img_dim: img, graph: g }
    }

    pub fn identity(n: usize) -> Self {
        let a: Matrix = (0..n).map(|i| crate::scalar::unit(n, i)).collect();
        PolyMap::affine(&a, &zeros(n), n)
    }

    /// `x ↦ set` for every `x`.
    pub fn constant(dom_dim: usize, set: &HPolyhedron) -> Self {
        PolyMap { dom_dim, img_dim: set.dim(), graph: HPolyhedron::universe(dom_dim).product(set) }
    }

    pub fn dom_dim(&self) -> usize {
        self.dom_dim
    }

    pub fn img_dim(&self) -> usize {
        self.img_dim
    }

    pub fn graph(&self) -> &HPolyhedron {
        &self.graph
    }

    pub fn domain(&self) -> HPolyhedron {
        self.graph.project(&(0..self.dom_dim).collect::<Vec<_>>())
    }

    pub fn range(&self) -> HPolyhedron {
        self.graph.project(&(self.dom_dim..self.dom_dim + self.img_dim).collect::<Vec<_>>())
    }

    /// `H(x)`.
    pub fn value_at(&self, x: &[Scalar]) -> HPolyhedron {
        let d = self.dom_dim;
        let fix = |r: &Row| {
            let rhs = &r.rhs - r.coeffs[..d].iter().zip(x).map(|(a, v)| a * v).sum::<Scalar>();
            Row::new(r.coeffs[d..].to_vec(), rhs)
        };
        HPolyhedron::new(
            self.img_dim,
            self.graph.ineqs().iter().map(fix).collect(),
            self.graph.eqs().iter().map(fix).collect(),
        )
    }

    /// `D*H(x̄, ȳ)(y*) = {x* : (x*, -y*) ∈ N((x̄, ȳ), gph H)}`.
    pub fn coderivative(&self, x: &[Scalar], y: &[Scalar], ystar: &[Scalar]) -> Result<HPolyhedron> {
        Ok(slice_p(&self.normal_cone(x, y)?, ystar, self.dom_dim).canonical())
    }

    fn normal_cone(&self, x: &[Scalar], y: &[Scalar]) -> Result<PolyCone> {
        if x.len() != self.dom_dim || y.len() != self.img_dim {
            return Err(Error::DimensionMismatch("base point does not fit the map".into()));
        }
        let xy: Vec<Scalar> = x.iter().chain(y).cloned().collect();
        normal_cone(&self.graph, &xy).map_err(|_| Error::BasePointNotOnGraph)
    }

    /// `x ↦ H(x) × other(x)`.
    pub fn pair(&self, other: &PolyMap) -> Result<PolyMap> {
        same_domain(self, other)?;
        let (d, m1, m2) = (self.dom_dim, self.img_dim, other.img_dim);
        let total = d + m1 + m2;
        let g1 = self.graph.embed(total, 0);
        // other's graph lives on (x, y₂) = coordinates 0..d and d+m1..
        let g2 = remap(&other.graph, total, &(0..d).chain(d + m1..total).collect::<Vec<_>>());
        PolyMap::new(d, m1 + m2, g1.intersect(&g2))
    }

    /// `L ∘ H` with `self = L` and `inner = H`.
    pub fn compose(&self, inner: &PolyMap) -> Result<PolyMap> {
        if inner.img_dim != self.dom_dim {
            return Err(Error::DimensionMismatch("inner image and outer domain differ".into()));
        }
        let (d, m, k) = (inner.dom_dim, inner.img_dim, self.img_dim);
        let total = d + m + k;
        let gh = inner.graph.embed(total, 0);
        let gl = self.graph.embed(total, d);
        let keep: Vec<usize> = (0..d).chain(d + m..total).collect();
        PolyMap::new(d, k, gh.intersect(&gl).project(&keep))
    }

    /// `x ↦ H(x) + other(x)`.
    pub fn sum(&self, other: &PolyMap) -> Result<PolyMap> {
        same_domain(self, other)?;
        if self.img_dim != other.img_dim {
            return Err(Error::DimensionMismatch("summands have different image spaces".into()));
        }
        let (d, m) = (self.dom_dim, self.img_dim);
        // variables (x, y₁, y₂, y) with y = y₁ + y₂
        let total = d + 3 * m;
        let g1 = self.graph.embed(total, 0);
        let g2 = remap(&other.graph, total, &(0..d).chain(d + m..d + 2 * m).collect::<Vec<_>>());
        let mut g = g1.intersect(&g2);
        for i in 0..m {
            let mut c = zeros(total);
            c[d + i] = Scalar::one();
            c[d + m + i] = Scalar::one();
            c[d + 2 * m + i] = -Scalar::one();
            g = g.with_eq(c, Scalar::zero());
        }
        let keep: Vec<usize> = (0..d).chain(d + 2 * m..total).collect();
        PolyMap::new(d, m, g.project(&keep))
    }
}

fn same_domain(a: &PolyMap, b: &PolyMap) -> Result<()> {
    if a.dom_dim != b.dom_dim {
        return Err(Error::DimensionMismatch("maps have different domains".into()));
    }
    Ok(())
}

/// Places the coordinates of `poly` at positions `at` of a larger space.
fn remap(poly: &HPolyhedron, total: usize, at: &[usize]) -> HPolyhedron {
    let spread = |r: &Row| {
        let mut c = zeros(total);
        for (k, &i) in at.iter().enumerate() {
            c[i] = r.coeffs[k].clone();
        }
        Row::new(c, r.rhs.clone())
    };
    HPolyhedron::new(total, poly.ineqs().iter().map(spread).collect(), poly.eqs().iter().map(spread).collect())
}

fn require_subspace(a: &HPolyhedron, b: &HPolyhedron, what: &str) -> Result<()> {
    if !difference_cone(a, b).is_linear_subspace() {
        return Err(Error::SubspaceConditionFailed(what.into()));
    }
    Ok(())
}

/// `D*(H₁, H₂)(x̄, (ȳ₁, ȳ₂))(y₁*, y₂*) = D*H₁(x̄, ȳ₁)(y₁*) + D*H₂(x̄, ȳ₂)(y₂*)`,
/// under `ℝ⁺(dom H₁ - dom H₂)` being a subspace.
pub fn pair_coderivative(
    h1: &PolyMap,
    h2: &PolyMap,
    x: &[Scalar],
    y: (&[Scalar], &[Scalar]),
    ystar: (&[Scalar], &[Scalar]),
) -> Result<HPolyhedron> {
    same_domain(h1, h2)?;
    require_subspace(&h1.domain(), &h2.domain(), "ℝ⁺(dom H₁ - dom H₂)")?;
    let a = h1.coderivative(x, y.0, ystar.0)?;
    let b = h2.coderivative(x, y.1, ystar.1)?;
    Ok(a.minkowski_sum(&b).canonical())
}

/// `D*(L ∘ H)(x̄, z̄)(z*) = ⋃ {D*H(x̄, ȳ)(y*) : y* ∈ D*L(ȳ, z̄)(z*)}` under
/// `ℝ⁺(rge H - dom L)` being a subspace. Without `ybar`, the intermediate
/// point is the lexicographic minimum of `H(x̄) ∩ L⁻¹(z̄)`.
pub fn chain_coderivative(
    outer: &PolyMap,
    inner: &PolyMap,
    x: &[Scalar],
    z: &[Scalar],
    zstar: &[Scalar],
    ybar: Option<&[Scalar]>,
) -> Result<HPolyhedron> {
    if inner.img_dim != outer.dom_dim {
        return Err(Error::DimensionMismatch("inner image and outer domain differ".into()));
    }
    require_subspace(&inner.range(), &outer.domain(), "ℝ⁺(rge H - dom L)")?;
    let (d, m) = (inner.dom_dim, inner.img_dim);
    let y = match ybar {
        Some(y) => y.to_vec(),
        None => {
            let fiber = inner.value_at(x).intersect(&outer.inverse_value_at(z));
            lp::lex_min_point(&fiber).ok_or(Error::NoIntermediatePoint)?
        }
    };
    let nh = inner.normal_cone(x, &y)?;
    let nl = outer.normal_cone(&y, z)?;
    // lifted variables (x*, y*): (x*, -y*) ∈ N_H and (y*, -z*) ∈ N_L
    let total = d + m;
    let mut lifted = HPolyhedron::universe(total);
    let h_row = |c: &[Scalar]| {
        let mut r = c[..d].to_vec();
        r.extend(neg(&c[d..]));
        r
    };
    for r in nh.h().ineqs() {
        lifted = lifted.with_ineq(h_row(&r.coeffs), Scalar::zero());
    }
    for r in nh.h().eqs() {
        lifted = lifted.with_eq(h_row(&r.coeffs), Scalar::zero());
    }
    let sl = slice_p(&nl, zstar, m);
    let yslice = remap(&sl, total, &(d..total).collect::<Vec<_>>());
    Ok(lifted.intersect(&yslice).project(&(0..d).collect::<Vec<_>>()).canonical())
}

impl PolyMap {
    /// `{y : z ∈ L(y)}`.
    fn inverse_value_at(&self, z: &[Scalar]) -> HPolyhedron {
        let d = self.dom_dim;
        let fix = |r: &Row| {
            let rhs = &r.rhs - r.coeffs[d..].iter().zip(z).map(|(a, v)| a * v).sum::<Scalar>();
            Row::new(r.coeffs[..d].to_vec(), rhs)
        };
        HPolyhedron::new(d, self.graph.ineqs().iter().map(fix).collect(), self.graph.eqs().iter().map(fix).collect())
    }
}

/// `D*(H + L)(x̄, ȳ)(y*) = D*H(x̄, ȳ₁)(y*) + D*L(x̄, ȳ₂)(y*)` for a split
/// `ȳ₁ + ȳ₂ = ȳ`, under `ℝ⁺(dom H - dom L)` being a subspace. Without
/// `split`, `ȳ₁` is the lexicographic minimum over feasible splits.
pub fn sum_coderivative(
    h: &PolyMap,
    l: &PolyMap,
    x: &[Scalar],
    y: &[Scalar],
    ystar: &[Scalar],
    split: Option<(&[Scalar], &[Scalar])>,
) -> Result<HPolyhedron> {
    same_domain(h, l)?;
    require_subspace(&h.domain(), &l.domain(), "ℝ⁺(dom H - dom L)")?;
    let (y1, y2) = match split {
        Some((a, b)) => (a.to_vec(), b.to_vec()),
        None => {
            // ȳ - y₁ ∈ L(x̄) ⇔ y₁ ∈ ȳ - L(x̄)
            let cands = h.value_at(x).intersect(&l.value_at(x).negated().translated(y));
            let y1 = lp::lex_min_point(&cands).ok_or(Error::NoFeasibleSplit)?;
            let y2 = sub(y, &y1);
            (y1, y2)
        }
    };
    let a = h.coderivative(x, &y1, ystar)?;
    let b = l.coderivative(x, &y2, ystar)?;
    Ok(a.minkowski_sum(&b).canonical())
}

/// `p ↦ ({p}, C(p))` with polyhedral `C`.
pub fn parameter_pair_map(pr: &ParametricProblem) -> Result<PolyMap> {
    let np = pr.dims.p;
    let c = PolyMap::new(np, pr.dims.x, pr.graph_polyhedron()?)?;
    PolyMap::identity(np).pair(&c)
}

/// `(p, x) ↦ f(p, x) + K` when its graph is polyhedral: affine objectives,
/// and the absolute-value pair whenever `(1, 1) ∈ K`, where
/// `(|x|, |x|) + K = {(s, s) : s >= |x|} + K`.
pub fn objective_profile_map(pr: &ParametricProblem) -> Option<PolyMap> {
    let (np, nx, ny) = (pr.dims.p, pr.dims.x, pr.dims.y);
    let n = np + nx;
    let k = pr.cone.cone().to_polyhedron();
    match &pr.objective {
        ObjectiveSpec::Affine { fp, fx, c } => {
            let a: Matrix = fp.iter().zip(fx).map(|(u, v)| u.iter().chain(v).cloned().collect()).collect();
            let f = PolyMap::affine(&a, c, n);
            f.sum(&PolyMap::constant(n, &k)).ok()
        }
        ObjectiveSpec::Builtin(ObjectiveBuiltin::AbsPair) if pr.cone.contains(&ints(&[1, 1])) => {
            // variables (p, x, s, y): s >= ±x, y - (s, s) ∈ K
            let total = n + 1 + ny;
            let mut g = HPolyhedron::universe(total);
            for sign in [1, -1] {
                let mut c = zeros(total);
                c[np] = Scalar::from_integer(sign.into());
                c[n] = -Scalar::one();
                g = g.with_ineq(c, Scalar::zero());
            }
            for r in k.ineqs() {
                let mut c = zeros(total);
                for i in 0..ny {
                    c[n + 1 + i] = r.coeffs[i].clone();
                    c[n] -= &r.coeffs[i];
                }
                g = g.with_ineq(c, Scalar::zero());
            }
            let keep: Vec<usize> = (0..n).chain(n + 1..total).collect();
            PolyMap::new(n, ny, g.project(&keep)).ok()
        }
        _ => None,
    }
}

/// `D*(F + K)(p̄, ȳ)(y*)` assembled by the chain rule as
/// `(f + K) ∘ (p ↦ ({p}, C(p)))` with intermediate point `(p̄, x̄)`.
pub fn profile_by_chain(pr: &ParametricProblem, base: &BasePoint, ystar: &[Scalar]) -> Result<HPolyhedron> {
    let outer = objective_profile_map(pr)
        .ok_or_else(|| Error::UnsupportedConstraintKind("objective profile graph is not polyhedral".into()))?;
    let inner = parameter_pair_map(pr)?;
    let mid = base.px();
    chain_coderivative(&outer, &inner, &base.p, &base.y, ystar, Some(&mid))
}

/// The same value read directly off the normal cone of the assembled graph
/// `gph(F + K)`.
pub fn profile_direct(pr: &ParametricProblem, base: &BasePoint, ystar: &[Scalar]) -> Result<HPolyhedron> {
    let outer = objective_profile_map(pr)
        .ok_or_else(|| Error::UnsupportedConstraintKind("objective profile graph is not polyhedral".into()))?;
    let composed = outer.compose(&parameter_pair_map(pr)?)?;
    composed.coderivative(&base.p, &base.y, ystar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coderivative::profile_coderivative;
    use crate::problem::builtins;
    use crate::scalar::int;

    #[test]
    fn identity_pair_adds_duals() {
        let id = PolyMap::identity(1);
        let s = pair_coderivative(&id, &id, &ints(&[0]), (&ints(&[0]), &ints(&[0])), (&ints(&[2]), &ints(&[5]))).unwrap();
        assert!(s.set_eq(&HPolyhedron::point(&ints(&[7]))));
        let paired = id.pair(&id).unwrap();
        let d = paired.coderivative(&ints(&[0]), &ints(&[0, 0]), &ints(&[2, 5])).unwrap();
        assert!(d.set_eq(&s));
    }

    #[test]
    fn pair_with_the_constraint_map() {
        // D*H(p̄, (p̄, x̄))(p*, x*) = p* + D*C(p̄, x̄)(x*)
        let pr = builtins::example_4_1();
        let np = 3;
        let c = PolyMap::new(np, 1, pr.graph_polyhedron().unwrap()).unwrap();
        let id = PolyMap::identity(np);
        let z = ints(&[0, 0, 0]);
        let s = pair_coderivative(&id, &c, &z, (&z, &ints(&[0])), (&ints(&[1, 0, 0]), &ints(&[2]))).unwrap();
        assert!(s.set_eq(&HPolyhedron::point(&ints(&[3, 4, 2]))));
        let d = parameter_pair_map(&pr).unwrap().coderivative(&z, &ints(&[0, 0, 0, 0]), &ints(&[1, 0, 0, 2])).unwrap();
        assert!(d.set_eq(&s));
    }

    #[test]
    fn off_graph_base_point() {
        let id = PolyMap::identity(1);
        assert_eq!(id.coderivative(&ints(&[0]), &ints(&[1]), &ints(&[1])), Err(Error::BasePointNotOnGraph));
    }

    #[test]
    fn chain_through_the_profile() {
        for pr in [builtins::example_4_1(), builtins::example_5_1()] {
            let (p, x) = pr.base_point.clone().unwrap();
            let b = BasePoint::feasible(&pr, &p, &x).unwrap();
            for y in [ints(&[1, 1]), ints(&[1, 0]), ints(&[2, 3]), ints(&[-1, 2])] {
                let chain = profile_by_chain(&pr, &b, &y).unwrap();
                let direct = profile_direct(&pr, &b, &y).unwrap();
                let formula = profile_coderivative(&pr, &b, &y).unwrap();
                assert!(chain.set_eq(&direct), "{y:?}");
                assert!(formula.set_eq(&direct), "{y:?}");
            }
        }
    }

    #[test]
    fn chain_with_identity_outer() {
        let pr = builtins::example_4_1();
        let inner = parameter_pair_map(&pr).unwrap();
        let outer = PolyMap::identity(4);
        let x = ints(&[0, 0, 0]);
        let z = ints(&[0, 0, 0, 0]);
        let zs = ints(&[1, 1, 1, 1]);
        let chain = chain_coderivative(&outer, &inner, &x, &z, &zs, None).unwrap();
        assert!(chain.set_eq(&inner.coderivative(&x, &z, &zs).unwrap()));
    }

    #[test]
    fn sum_with_cone_and_zero() {
        let pr = builtins::example_4_1();
        let ObjectiveSpec::Affine { fp, fx, c } = &pr.objective else { unreachable!() };
        let a: Matrix = fp.iter().zip(fx).map(|(u, v)| u.iter().chain(v).cloned().collect()).collect();
        let f = PolyMap::affine(&a, c, 4);
        let k = PolyMap::constant(4, &pr.cone.cone().to_polyhedron());
        let zero = PolyMap::constant(4, &HPolyhedron::point(&ints(&[0, 0])));
        let z = ints(&[0, 0, 0, 0]);
        let y = ints(&[0, 0]);
        for ys in [ints(&[1, 1]), ints(&[3, 0]), ints(&[-1, 1])] {
            let s = sum_coderivative(&f, &k, &z, &y, &ys, None).unwrap();
            let direct = f.sum(&k).unwrap().coderivative(&z, &y, &ys).unwrap();
            assert!(s.set_eq(&direct));
            let s0 = sum_coderivative(&f, &zero, &z, &y, &ys, None).unwrap();
            assert!(s0.set_eq(&f.coderivative(&z, &y, &ys).unwrap()));
        }
        // no split of ȳ = (-1, 0) with ȳ₁ = f(0) and ȳ₂ ∈ K
        assert_eq!(sum_coderivative(&f, &k, &z, &ints(&[-1, 0]), &ints(&[1, 1]), None), Err(Error::NoFeasibleSplit));
    }

    #[test]
    fn subspace_condition_can_fail() {
        // dom H = [0, ∞) and dom L = {-1}: the difference cone is a half line
        let h = PolyMap::new(1, 1, HPolyhedron::from_ineqs(2, vec![(ints(&[-1, 0]), int(0))])).unwrap();
        let l = PolyMap::new(1, 1, HPolyhedron::point(&ints(&[-1, 0]))).unwrap();
        assert!(matches!(
            sum_coderivative(&h, &l, &ints(&[0]), &ints(&[0]), &ints(&[0]), None),
            Err(Error::SubspaceConditionFailed(_))
        ));
    }

    #[test]
    fn abs_pair_profile_graph() {
        let pr = builtins::example_2_1();
        let g = objective_profile_map(&pr).unwrap();
        // (p, x, y) = (0, -2, 2, 3) is in gph((|x|, |x|) + ℝ²₊), (0, -2, 1, 3) is not
        assert!(g.graph().is_member(&ints(&[0, -2, 2, 3])));
        assert!(!g.graph().is_member(&ints(&[0, -2, 1, 3])));
        let (p, x) = pr.base_point.clone().unwrap();
        let b = BasePoint::feasible(&pr, &p, &x).unwrap();
        for y in [ints(&[1, 1]), ints(&[2, 0])] {
            let chain = profile_by_chain(&pr, &b, &y).unwrap();
            assert!(chain.set_eq(&profile_direct(&pr, &b, &y).unwrap()));
            assert!(chain.set_eq(&profile_coderivative(&pr, &b, &y).unwrap().set));
        }
    }
}

//! Polyhedral cones in both H- and generator form, converted by the double
//! description method.

use super::linalg;
use super::poly::{HPolyhedron, Row};
use crate::error::Error;
use crate::scalar::{dot, is_zero_vec, neg, primitive, primitive_signed, unit, zeros, Scalar};
use num_traits::{Signed, Zero};

/// Generators of `{x : a·x <= 0 (a ∈ ineqs), e·x = 0 (e ∈ eqs)}`.
///
/// Returns `(rays, lines)`: the cone equals `cone(rays) + span(lines)` and
/// `rays` are the extreme rays of the cone modulo its lineality space, as
/// primitive integer vectors.
pub fn double_description(
    n: usize,
    ineqs: &[Vec<Scalar>],
    eqs: &[Vec<Scalar>],
) -> (Vec<Vec<Scalar>>, Vec<Vec<Scalar>>) {
    let mut lines: Vec<Vec<Scalar>> = (0..n).map(|i| unit(n, i)).collect();
    let mut rays: Vec<Vec<Scalar>> = Vec::new();
    // processed constraints, used for the combinatorial adjacency test
    let mut done: Vec<&Vec<Scalar>> = Vec::new();
    let constraints = eqs.iter().map(|a| (a, true)).chain(ineqs.iter().map(|a| (a, false)));

    for (a, is_eq) in constraints {
        if is_zero_vec(a) {
            continue;
        }
        if let Some(k) = lines.iter().position(|l| !dot(a, l).is_zero()) {
            let mut big_l = lines.remove(k);
            if dot(a, &big_l).is_positive() {
                big_l = neg(&big_l);
            }
            let al = dot(a, &big_l);
            let reduce = |v: &mut Vec<Scalar>| {
                let f = dot(a, v) / &al;
                if !f.is_zero() {
                    for (x, y) in v.iter_mut().zip(&big_l) {
                        *x -= &f * y;
                    }
                }
            };
            lines.iter_mut().for_each(reduce);
            rays.iter_mut().for_each(reduce);
            for r in rays.iter_mut() {
                *r = primitive(r);
            }
            if !is_eq {
                rays.push(primitive(&big_l));
            }
            done.push(a);
            continue;
        }

        let vals: Vec<Scalar> = rays.iter().map(|r| dot(a, r)).collect();
        let zsets: Vec<Vec<bool>> = rays
            .iter()
            .map(|r| done.iter().map(|c| dot(c, r).is_zero()).collect())
            .collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let negs: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        let mut next: Vec<Vec<Scalar>> = (0..rays.len())
            .filter(|&i| vals[i].is_zero() || (!is_eq && vals[i].is_negative()))
            .map(|i| rays[i].clone())
            .collect();
        for &p in &pos {
            for &q in &negs {
                if !adjacent(p, q, &zsets) {
                    continue;
                }
                let comb: Vec<Scalar> = rays[q]
                    .iter()
                    .zip(&rays[p])
                    .map(|(rq, rp)| &vals[p] * rq - &vals[q] * rp)
                    .collect();
                next.push(primitive(&comb));
            }
        }
        next.sort();
        next.dedup();
        rays = next;
        done.push(a);
    }
    rays.sort();
    rays.dedup();
    (rays, canonical_basis(&lines, n))
}

fn adjacent(p: usize, q: usize, zsets: &[Vec<bool>]) -> bool {
    let common: Vec<usize> = (0..zsets[p].len()).filter(|&k| zsets[p][k] && zsets[q][k]).collect();
    !zsets.iter().enumerate().any(|(r, z)| r != p && r != q && common.iter().all(|&k| z[k]))
}

/// A canonical basis (RREF, primitive, leading entry positive) of `span(vs)`.
fn canonical_basis(vs: &[Vec<Scalar>], n: usize) -> Vec<Vec<Scalar>> {
    let mut m = vs.to_vec();
    linalg::rref(&mut m, n);
    m.iter().map(|v| primitive_signed(v)).collect()
}

/// A closed convex polyhedral cone, stored in both forms.
///
/// The H-form is `{x : a·x <= 0, e·x = 0}` with a minimal, canonically ordered
/// row set, so two equal cones have identical representations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyCone {
    h: HPolyhedron,
    rays: Vec<Vec<Scalar>>,
    lines: Vec<Vec<Scalar>>,
}

impl PolyCone {
    pub fn from_generators(dim: usize, rays: &[Vec<Scalar>], lines: &[Vec<Scalar>]) -> Self {
        // minimal generators come from a round trip through the polar
        let neg_rays: Vec<Vec<Scalar>> = rays.iter().map(|r| neg(r)).collect();
        let (facets, eqs) = double_description(dim, &neg_rays, lines);
        Self::from_rows(dim, &neg_all(&facets), &eqs)
    }

    /// Builds from H-rows `a·x <= 0` and `e·x = 0`.
    pub fn from_rows(dim: usize, ineqs: &[Vec<Scalar>], eqs: &[Vec<Scalar>]) -> Self {
        let (rays, lines) = double_description(dim, ineqs, eqs);
        Self::assemble(dim, rays, lines)
    }

    /// Builds from a homogeneous polyhedron.
    pub fn from_h(h: &HPolyhedron) -> Result<Self, Error> {
        if !h.is_homogeneous() {
            return Err(Error::NotACone);
        }
        let ineqs: Vec<Vec<Scalar>> = h.ineqs().iter().map(|r| r.coeffs.clone()).collect();
        let eqs: Vec<Vec<Scalar>> = h.eqs().iter().map(|r| r.coeffs.clone()).collect();
        let (rays, lines) = double_description(h.dim(), &ineqs, &eqs);
        Ok(Self::assemble(h.dim(), rays, lines))
    }

    /// Given minimal generators, derives the minimal H-form from the polar.
    fn assemble(dim: usize, rays: Vec<Vec<Scalar>>, lines: Vec<Vec<Scalar>>) -> Self {
        let rays = reduce_mod(&rays, &lines);
        let neg_rays = neg_all(&rays);
        let (facets, eq_basis) = double_description(dim, &neg_rays, &lines);
        let facets = reduce_mod(&facets, &eq_basis);
        // facets g satisfy g·x >= 0 on the cone, i.e. rows -g <= 0
        let mut ineq_rows: Vec<Row> = facets
            .iter()
            .map(|g| Row::new(neg(g), Scalar::zero()))
            .collect();
        ineq_rows.sort();
        let eq_rows: Vec<Row> = eq_basis.into_iter().map(|e| Row::new(e, Scalar::zero())).collect();
        PolyCone {
            h: HPolyhedron::new(dim, ineq_rows, eq_rows),
            rays,
            lines,
        }
    }

    pub fn full(dim: usize) -> Self {
        Self::assemble(dim, Vec::new(), (0..dim).map(|i| unit(dim, i)).collect())
    }

    pub fn zero(dim: usize) -> Self {
        Self::assemble(dim, Vec::new(), Vec::new())
    }

    /// The nonnegative orthant.
    pub fn orthant(dim: usize) -> Self {
        Self::assemble(dim, (0..dim).map(|i| unit(dim, i)).collect(), Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    pub fn h(&self) -> &HPolyhedron {
        &self.h
    }

    /// Extreme rays modulo the lineality space.
    pub fn rays(&self) -> &[Vec<Scalar>] {
        &self.rays
    }

    /// Basis of the lineality space.
    pub fn lines(&self) -> &[Vec<Scalar>] {
        &self.lines
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.h.is_member(v)
    }

    pub fn contains_cone(&self, other: &PolyCone) -> bool {
        other.rays.iter().all(|r| self.contains(r))
            && other.lines.iter().all(|l| self.contains(l) && self.contains(&neg(l)))
    }

    pub fn set_eq(&self, other: &PolyCone) -> bool {
        self.contains_cone(other) && other.contains_cone(self)
    }

    /// Whether `v` lies in the interior, tested by strict row inequalities.
    pub fn contains_interior(&self, v: &[Scalar]) -> bool {
        self.h.eqs().is_empty() && self.h.ineqs().iter().all(|r| r.eval(v).is_negative())
    }

    /// `K* = {y : ⟨y, k⟩ >= 0 for all k ∈ K}`.
    pub fn polar(&self) -> PolyCone {
        let gens: Vec<Vec<Scalar>> = self.h.ineqs().iter().map(|r| neg(&r.coeffs)).collect();
        let lines: Vec<Vec<Scalar>> = self.h.eqs().iter().map(|r| r.coeffs.clone()).collect();
        PolyCone::from_generators(self.dim(), &gens, &lines)
    }

    /// `K⁻ = {y : ⟨y, k⟩ <= 0 for all k ∈ K}`.
    pub fn negative_polar(&self) -> PolyCone {
        self.polar().negated()
    }

    pub fn negated(&self) -> PolyCone {
        PolyCone::from_generators(self.dim(), &neg_all(&self.rays), &self.lines)
    }

    /// True iff the cone equals its negative, checked on generators.
    pub fn is_linear_subspace(&self) -> bool {
        self.rays.iter().all(|r| self.contains(&neg(r)))
    }

    /// `K ∩ -K`.
    pub fn lineality(&self) -> PolyCone {
        PolyCone::from_generators(self.dim(), &[], &self.lines)
    }

    pub fn is_pointed(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn intersect(&self, other: &PolyCone) -> PolyCone {
        PolyCone::from_h(&self.h.intersect(&other.h)).expect("intersection of cones is a cone")
    }

    /// `K₁ + K₂`.
    pub fn sum(&self, other: &PolyCone) -> PolyCone {
        let mut rays = self.rays.clone();
        rays.extend(other.rays.iter().cloned());
        let mut lines = self.lines.clone();
        lines.extend(other.lines.iter().cloned());
        PolyCone::from_generators(self.dim(), &rays, &lines)
    }

    /// Image under the linear map `v ↦ M v` (`M` has `out_dim` rows).
    pub fn image(&self, m: &[Vec<Scalar>], out_dim: usize) -> PolyCone {
        let apply = |v: &Vec<Scalar>| m.iter().map(|row| dot(row, v)).collect::<Vec<_>>();
        let rays: Vec<Vec<Scalar>> = self.rays.iter().map(apply).collect();
        let lines: Vec<Vec<Scalar>> = self.lines.iter().map(apply).collect();
        PolyCone::from_generators(out_dim, &rays, &lines)
    }

    /// The cone as a polyhedron (its canonical H-form).
    pub fn to_polyhedron(&self) -> HPolyhedron {
        self.h.clone()
    }
}

/// Canonical representatives of `vs` modulo `span(basis)`, where `basis` is in
/// the form produced by [`canonical_basis`]: each vector is cleared on the
/// basis pivot columns, made primitive, and the list is sorted.
fn reduce_mod(vs: &[Vec<Scalar>], basis: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let mut out: Vec<Vec<Scalar>> = vs
        .iter()
        .map(|v| {
            let mut v = v.clone();
            for b in basis {
                let c = b.iter().position(|x| !x.is_zero()).expect("basis vectors are nonzero");
                if !v[c].is_zero() {
                    let f = &v[c] / &b[c];
                    for (x, y) in v.iter_mut().zip(b) {
                        *x -= &f * y;
                    }
                }
            }
            primitive(&v)
        })
        .filter(|v| !is_zero_vec(v))
        .collect();
    out.sort();
    out.dedup();
    out
}

fn neg_all(vs: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    vs.iter().map(|v| neg(v)).collect()
}

/// Closed conic hull `cl ℝ₊·Ω`; `{0}` for an empty set.
pub fn cone_hull(poly: &HPolyhedron) -> PolyCone {
    if poly.is_empty() {
        return PolyCone::zero(poly.dim());
    }
    let v = poly.vrep();
    let mut gens = v.points;
    gens.extend(v.rays);
    PolyCone::from_generators(poly.dim(), &gens, &v.lines)
}

/// `T(x̄, Ω)`: the active inequality rows plus all equalities, made homogeneous.
pub fn tangent_cone(poly: &HPolyhedron, point: &[Scalar]) -> Result<PolyCone, Error> {
    if !poly.is_member(point) {
        return Err(Error::PointNotInSet);
    }
    let ineqs: Vec<Vec<Scalar>> = poly
        .active_rows(point)
        .into_iter()
        .map(|i| poly.ineqs()[i].coeffs.clone())
        .collect();
    let eqs: Vec<Vec<Scalar>> = poly.eqs().iter().map(|r| r.coeffs.clone()).collect();
    let (rays, lines) = double_description(poly.dim(), &ineqs, &eqs);
    Ok(PolyCone::assemble(poly.dim(), rays, lines))
}

/// `N(x̄, Ω)`: cone of active row vectors plus the span of equality rows.
pub fn normal_cone(poly: &HPolyhedron, point: &[Scalar]) -> Result<PolyCone, Error> {
    if !poly.is_member(point) {
        return Err(Error::PointNotInSet);
    }
    let rays: Vec<Vec<Scalar>> = poly
        .active_rows(point)
        .into_iter()
        .map(|i| poly.ineqs()[i].coeffs.clone())
        .collect();
    let lines: Vec<Vec<Scalar>> = poly.eqs().iter().map(|r| r.coeffs.clone()).collect();
    Ok(PolyCone::from_generators(poly.dim(), &rays, &lines))
}

/// A pointed ordering cone together with its dual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderCone {
    cone: PolyCone,
    dual: PolyCone,
    solid: bool,
}

impl OrderCone {
    pub fn new(cone: PolyCone) -> Result<Self, Error> {
        if !cone.is_pointed() {
            return Err(Error::ConeNotPointed);
        }
        let dual = cone.polar();
        let solid = cone.h().eqs().is_empty();
        Ok(OrderCone { cone, dual, solid })
    }

    pub fn from_generators(dim: usize, gens: &[Vec<Scalar>]) -> Result<Self, Error> {
        Self::new(PolyCone::from_generators(dim, gens, &[]))
    }

    pub fn orthant(dim: usize) -> Self {
        Self::new(PolyCone::orthant(dim)).expect("orthant is pointed")
    }

    pub fn dim(&self) -> usize {
        self.cone.dim()
    }

    pub fn cone(&self) -> &PolyCone {
        &self.cone
    }

    pub fn dual(&self) -> &PolyCone {
        &self.dual
    }

    pub fn is_solid(&self) -> bool {
        self.solid
    }

    /// `int K* ≠ ∅`, which for closed cones is equivalent to pointedness of `K`.
    pub fn dual_is_solid(&self) -> bool {
        self.dual.h().eqs().is_empty()
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.cone.contains(v)
    }

    pub fn contains_interior(&self, v: &[Scalar]) -> bool {
        self.solid && self.cone.contains_interior(v)
    }

    pub fn dual_contains(&self, w: &[Scalar]) -> bool {
        self.dual.contains(w)
    }

    /// A fixed vector of `int K*`: the sum of the dual's extreme rays.
    pub fn interior_dual_vector(&self) -> Option<Vec<Scalar>> {
        if !self.dual_is_solid() {
            return None;
        }
        let mut w = zeros(self.dim());
        for g in self.dual.rays() {
            for (a, b) in w.iter_mut().zip(g) {
                *a += b;
            }
        }
        Some(w)
    }
}

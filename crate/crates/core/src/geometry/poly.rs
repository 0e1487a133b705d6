//! H-represented polyhedra `{x : A x <= b, E x = d}`.

use super::cone::double_description;
use super::linalg;
use super::lp::{self, LpOutcome};
use crate::scalar::{dot, is_zero_vec, neg, primitive, zeros, Scalar};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// One affine row `coeffs · x (<= | =) rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Row {
    #[serde(with = "crate::serde_scalar::vec")]
    pub coeffs: Vec<Scalar>,
    #[serde(with = "crate::serde_scalar::one")]
    pub rhs: Scalar,
}

impl Row {
    pub fn new(coeffs: Vec<Scalar>, rhs: Scalar) -> Self {
        Row { coeffs, rhs }
    }

    pub fn eval(&self, x: &[Scalar]) -> Scalar {
        dot(&self.coeffs, x)
    }

    /// Positive rescaling to a primitive integer row.
    fn normalized(&self) -> Row {
        let mut all = self.coeffs.clone();
        all.push(self.rhs.clone());
        let mut p = primitive(&all);
        let rhs = p.pop().unwrap();
        Row { coeffs: p, rhs }
    }

    /// Rescaling for equalities: primitive with a positive leading coefficient.
    fn normalized_eq(&self) -> Row {
        let mut all = self.coeffs.clone();
        all.push(self.rhs.clone());
        let mut p = crate::scalar::primitive_signed(&all);
        let rhs = p.pop().unwrap();
        Row { coeffs: p, rhs }
    }
}

/// Generator description of a polyhedron: `conv(points) + cone(rays) + span(lines)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VRep {
    pub points: Vec<Vec<Scalar>>,
    pub rays: Vec<Vec<Scalar>>,
    pub lines: Vec<Vec<Scalar>>,
}

/// `{x ∈ ℝⁿ : A x <= b, E x = d}`. Emptiness is a legitimate, queryable state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HPolyhedron {
    dim: usize,
    ineqs: Vec<Row>,
    eqs: Vec<Row>,
}

impl HPolyhedron {
    pub fn universe(dim: usize) -> Self {
        HPolyhedron { dim, ineqs: Vec::new(), eqs: Vec::new() }
    }

    /// Canonical empty set `{x : 0 <= -1}`.
    pub fn empty(dim: usize) -> Self {
        HPolyhedron {
            dim,
            ineqs: vec![Row::new(zeros(dim), -Scalar::one())],
            eqs: Vec::new(),
        }
    }

    pub fn new(dim: usize, ineqs: Vec<Row>, eqs: Vec<Row>) -> Self {
        for r in ineqs.iter().chain(&eqs) {
            assert_eq!(r.coeffs.len(), dim, "row length must equal the ambient dimension");
        }
        HPolyhedron { dim, ineqs, eqs }
    }

    pub fn from_ineqs(dim: usize, rows: Vec<(Vec<Scalar>, Scalar)>) -> Self {
        let ineqs = rows.into_iter().map(|(a, b)| Row::new(a, b)).collect();
        HPolyhedron::new(dim, ineqs, Vec::new())
    }

    /// The single point `{x}`.
    pub fn point(x: &[Scalar]) -> Self {
        let n = x.len();
        let eqs = (0..n)
            .map(|i| Row::new(crate::scalar::unit(n, i), x[i].clone()))
            .collect();
        HPolyhedron::new(n, Vec::new(), eqs)
    }

    /// The box `∏ [lo_i, hi_i]`.
    pub fn boxed(lo: &[Scalar], hi: &[Scalar]) -> Self {
        let n = lo.len();
        let mut rows = Vec::new();
        for i in 0..n {
            rows.push(Row::new(crate::scalar::unit(n, i), hi[i].clone()));
            rows.push(Row::new(neg(&crate::scalar::unit(n, i)), -lo[i].clone()));
        }
        HPolyhedron::new(n, rows, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ineqs(&self) -> &[Row] {
        &self.ineqs
    }

    pub fn eqs(&self) -> &[Row] {
        &self.eqs
    }

    pub fn with_ineq(mut self, coeffs: Vec<Scalar>, rhs: Scalar) -> Self {
        assert_eq!(coeffs.len(), self.dim);
        self.ineqs.push(Row::new(coeffs, rhs));
        self
    }

    pub fn with_eq(mut self, coeffs: Vec<Scalar>, rhs: Scalar) -> Self {
        assert_eq!(coeffs.len(), self.dim);
        self.eqs.push(Row::new(coeffs, rhs));
        self
    }

    pub fn is_member(&self, x: &[Scalar]) -> bool {
        x.len() == self.dim
            && self.ineqs.iter().all(|r| r.eval(x) <= r.rhs)
            && self.eqs.iter().all(|r| r.eval(x) == r.rhs)
    }

    pub fn is_feasible(&self) -> bool {
        lp::find_point(self).is_some()
    }

    pub fn is_empty(&self) -> bool {
        !self.is_feasible()
    }

    /// Inequality rows tight at `x`.
    pub fn active_rows(&self, x: &[Scalar]) -> Vec<usize> {
        self.ineqs
            .iter()
            .enumerate()
            .filter(|(_, r)| r.eval(x) == r.rhs)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn intersect(&self, other: &HPolyhedron) -> HPolyhedron {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        out.ineqs.extend(other.ineqs.iter().cloned());
        out.eqs.extend(other.eqs.iter().cloned());
        out
    }

    /// Places this polyhedron on coordinates `offset..offset+dim` of `ℝ^total`.
    pub fn embed(&self, total: usize, offset: usize) -> HPolyhedron {
        assert!(offset + self.dim <= total);
        let lift = |r: &Row| {
            let mut c = zeros(total);
            c[offset..offset + self.dim].clone_from_slice(&r.coeffs);
            Row::new(c, r.rhs.clone())
        };
        HPolyhedron {
            dim: total,
            ineqs: self.ineqs.iter().map(lift).collect(),
            eqs: self.eqs.iter().map(lift).collect(),
        }
    }

    /// `{(x, y) : x ∈ self, y ∈ other}`.
    pub fn product(&self, other: &HPolyhedron) -> HPolyhedron {
        let total = self.dim + other.dim;
        self.embed(total, 0).intersect(&other.embed(total, self.dim))
    }

    /// `{-x : x ∈ self}`.
    pub fn negated(&self) -> HPolyhedron {
        let flip = |r: &Row| Row::new(neg(&r.coeffs), r.rhs.clone());
        HPolyhedron {
            dim: self.dim,
            ineqs: self.ineqs.iter().map(flip).collect(),
            eqs: self.eqs.iter().map(flip).collect(),
        }
    }

    /// `{t x : x ∈ self}` for `t > 0`.
    pub fn scaled(&self, t: &Scalar) -> HPolyhedron {
        assert!(t.is_positive(), "scaling factor must be positive");
        let sc = |r: &Row| Row::new(r.coeffs.clone(), &r.rhs * t);
        HPolyhedron {
            dim: self.dim,
            ineqs: self.ineqs.iter().map(sc).collect(),
            eqs: self.eqs.iter().map(sc).collect(),
        }
    }

    /// `{x + v : x ∈ self}`.
    pub fn translated(&self, v: &[Scalar]) -> HPolyhedron {
        let sh = |r: &Row| Row::new(r.coeffs.clone(), &r.rhs + dot(&r.coeffs, v));
        HPolyhedron {
            dim: self.dim,
            ineqs: self.ineqs.iter().map(sh).collect(),
            eqs: self.eqs.iter().map(sh).collect(),
        }
    }

    /// Preimage `{z : M z + t ∈ self}` where `M` is `dim × cols`.
    pub fn preimage(&self, m: &[Vec<Scalar>], t: &[Scalar], cols: usize) -> HPolyhedron {
        let pull = |r: &Row| {
            let coeffs = crate::scalar::mat_t_vec(&m.to_vec(), &r.coeffs, cols);
            Row::new(coeffs, &r.rhs - dot(&r.coeffs, t))
        };
        HPolyhedron {
            dim: cols,
            ineqs: self.ineqs.iter().map(pull).collect(),
            eqs: self.eqs.iter().map(pull).collect(),
        }
    }

    /// Exact projection onto the coordinates in `keep` (in the given order) by
    /// Gaussian substitution of equalities and Fourier–Motzkin elimination.
    pub fn project(&self, keep: &[usize]) -> HPolyhedron {
        let n = self.dim;
        let mut ineqs: Vec<Row> = self.ineqs.clone();
        let mut eqs: Vec<Row> = self.eqs.clone();
        let elim: Vec<usize> = (0..n).filter(|c| !keep.contains(c)).collect();
        for &j in &elim {
            if let Some(k) = eqs.iter().position(|e| !e.coeffs[j].is_zero()) {
                let e = eqs.remove(k);
                let substitute = |r: &mut Row| {
                    if r.coeffs[j].is_zero() {
                        return;
                    }
                    let f = &r.coeffs[j] / &e.coeffs[j];
                    for (c, ec) in r.coeffs.iter_mut().zip(&e.coeffs) {
                        *c -= &f * ec;
                    }
                    r.rhs -= &f * &e.rhs;
                };
                ineqs.iter_mut().for_each(substitute);
                eqs.iter_mut().for_each(substitute);
            } else {
                let (mut pos, mut negs, mut rest) = (Vec::new(), Vec::new(), Vec::new());
                for r in ineqs {
                    if r.coeffs[j].is_positive() {
                        pos.push(r);
                    } else if r.coeffs[j].is_negative() {
                        negs.push(r);
                    } else {
                        rest.push(r);
                    }
                }
                for p in &pos {
                    for q in &negs {
                        let (fp, fq) = (-q.coeffs[j].clone(), p.coeffs[j].clone());
                        let coeffs: Vec<Scalar> = p
                            .coeffs
                            .iter()
                            .zip(&q.coeffs)
                            .map(|(a, b)| a * &fp + b * &fq)
                            .collect();
                        rest.push(Row::new(coeffs, &p.rhs * &fp + &q.rhs * &fq));
                    }
                }
                ineqs = rest;
            }
            match tidy(&mut ineqs, &mut eqs) {
                Tidy::Empty => return HPolyhedron::empty(keep.len()),
                Tidy::Ok => {}
            }
            if ineqs.len() > 48 {
                let tmp = HPolyhedron { dim: n, ineqs, eqs: eqs.clone() }.without_redundancy();
                ineqs = tmp.ineqs;
            }
        }
        let restrict = |r: &Row| Row::new(keep.iter().map(|&c| r.coeffs[c].clone()).collect(), r.rhs.clone());
        HPolyhedron {
            dim: keep.len(),
            ineqs: ineqs.iter().map(restrict).collect(),
            eqs: eqs.iter().map(restrict).collect(),
        }
    }

    /// `{a + b : a ∈ self, b ∈ other}`.
    pub fn minkowski_sum(&self, other: &HPolyhedron) -> HPolyhedron {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        // variables (z, a): a ∈ self, z - a ∈ other
        let lifted_a = self.embed(2 * n, n);
        let diff = |r: &Row| {
            let mut c = r.coeffs.clone();
            c.extend(neg(&r.coeffs));
            Row::new(c, r.rhs.clone())
        };
        let lifted_b = HPolyhedron {
            dim: 2 * n,
            ineqs: other.ineqs.iter().map(diff).collect(),
            eqs: other.eqs.iter().map(diff).collect(),
        };
        lifted_a.intersect(&lifted_b).project(&(0..n).collect::<Vec<_>>())
    }

    /// `{a - b : a ∈ self, b ∈ other}`.
    pub fn minkowski_difference(&self, other: &HPolyhedron) -> HPolyhedron {
        self.minkowski_sum(&other.negated())
    }

    /// Whether `other ⊆ self`, decided with one LP per row of `self`.
    pub fn contains(&self, other: &HPolyhedron) -> bool {
        assert_eq!(self.dim, other.dim);
        if other.is_empty() {
            return true;
        }
        let row_holds = |r: &Row| match lp::maximize(&r.coeffs, other) {
            LpOutcome::Optimal { value, .. } => value <= r.rhs,
            LpOutcome::Unbounded => false,
            LpOutcome::Infeasible => true,
        };
        self.ineqs.iter().all(row_holds)
            && self.eqs.iter().all(|r| {
                row_holds(r) && row_holds(&Row::new(neg(&r.coeffs), -r.rhs.clone()))
            })
    }

    pub fn set_eq(&self, other: &HPolyhedron) -> bool {
        self.contains(other) && other.contains(self)
    }

    /// Drops inequality rows implied by the others (one LP per row).
    pub fn without_redundancy(&self) -> HPolyhedron {
        if self.is_empty() {
            return HPolyhedron::empty(self.dim);
        }
        let mut kept: Vec<Row> = self.ineqs.clone();
        let mut i = 0;
        while i < kept.len() {
            let row = kept.remove(i);
            let rest = HPolyhedron { dim: self.dim, ineqs: kept.clone(), eqs: self.eqs.clone() };
            let implied = match lp::maximize(&row.coeffs, &rest) {
                LpOutcome::Optimal { value, .. } => value <= row.rhs,
                _ => false,
            };
            if !implied {
                kept.insert(i, row);
                i += 1;
            }
        }
        HPolyhedron { dim: self.dim, ineqs: kept, eqs: self.eqs.clone() }
    }

    /// Deterministic representative: redundancy removed, equalities in reduced
    /// row echelon form, rows primitive and sorted lexicographically.
    pub fn canonical(&self) -> HPolyhedron {
        if self.is_empty() {
            return HPolyhedron::empty(self.dim);
        }
        let n = self.dim;
        let mut aug: Vec<Vec<Scalar>> = self
            .eqs
            .iter()
            .map(|r| {
                let mut v = r.coeffs.clone();
                v.push(r.rhs.clone());
                v
            })
            .collect();
        linalg::rref(&mut aug, n + 1);
        let eqs: Vec<Row> = aug
            .into_iter()
            .map(|mut v| {
                let rhs = v.pop().unwrap();
                Row::new(v, rhs).normalized_eq()
            })
            .collect();
        let base = HPolyhedron { dim: n, ineqs: self.ineqs.clone(), eqs: eqs.clone() }.without_redundancy();
        let mut ineqs: Vec<Row> = base.ineqs.iter().map(Row::normalized).collect();
        ineqs.sort();
        ineqs.dedup();
        let mut eqs = eqs;
        eqs.sort();
        HPolyhedron { dim: n, ineqs, eqs }
    }

    /// Generator description via homogenization and double description.
    pub fn vrep(&self) -> VRep {
        let n = self.dim;
        let hom = |r: &Row| {
            let mut c = r.coeffs.clone();
            c.push(-r.rhs.clone());
            c
        };
        let mut ineq_rows: Vec<Vec<Scalar>> = self.ineqs.iter().map(hom).collect();
        let mut t_row = zeros(n + 1);
        t_row[n] = -Scalar::one();
        ineq_rows.push(t_row);
        let eq_rows: Vec<Vec<Scalar>> = self.eqs.iter().map(hom).collect();
        let (rays, lines) = double_description(n + 1, &ineq_rows, &eq_rows);
        let mut out = VRep::default();
        for r in rays {
            let t = r[n].clone();
            if t.is_positive() {
                out.points.push(r[..n].iter().map(|v| v / &t).collect());
            } else {
                out.rays.push(r[..n].to_vec());
            }
        }
        out.lines = lines.into_iter().map(|l| l[..n].to_vec()).collect();
        out.points.sort();
        out
    }

    /// Vertices (extreme points); empty when the polyhedron has lines or is empty.
    pub fn vertices(&self) -> Vec<Vec<Scalar>> {
        let v = self.vrep();
        if v.lines.is_empty() { v.points } else { Vec::new() }
    }

    /// Per-coordinate bounds `(min, max)`; `None` marks an unbounded side.
    /// Returns `None` overall for an empty polyhedron.
    pub fn bounding_box(&self) -> Option<Vec<(Option<Scalar>, Option<Scalar>)>> {
        if self.is_empty() {
            return None;
        }
        let n = self.dim;
        Some(
            (0..n)
                .map(|k| {
                    let e = crate::scalar::unit(n, k);
                    let lo = match lp::minimize(&e, self) {
                        LpOutcome::Optimal { value, .. } => Some(value),
                        _ => None,
                    };
                    let hi = match lp::maximize(&e, self) {
                        LpOutcome::Optimal { value, .. } => Some(value),
                        _ => None,
                    };
                    (lo, hi)
                })
                .collect(),
        )
    }

    /// Whether every row is homogeneous (`b = 0`, `d = 0`).
    pub fn is_homogeneous(&self) -> bool {
        self.ineqs.iter().chain(&self.eqs).all(|r| r.rhs.is_zero())
    }
}

enum Tidy {
    Ok,
    Empty,
}

/// Normalizes rows, drops trivial ones, and detects trivially infeasible rows.
fn tidy(ineqs: &mut Vec<Row>, eqs: &mut Vec<Row>) -> Tidy {
    let mut out = Vec::with_capacity(ineqs.len());
    for r in ineqs.drain(..) {
        if is_zero_vec(&r.coeffs) {
            if r.rhs.is_negative() {
                return Tidy::Empty;
            }
            continue;
        }
        out.push(r.normalized());
    }
    out.sort();
    out.dedup();
    *ineqs = out;
    let mut keep = Vec::with_capacity(eqs.len());
    for r in eqs.drain(..) {
        if is_zero_vec(&r.coeffs) {
            if !r.rhs.is_zero() {
                return Tidy::Empty;
            }
            continue;
        }
        keep.push(r.normalized_eq());
    }
    keep.sort();
    keep.dedup();
    *eqs = keep;
    Tidy::Ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ints, ratio};

    fn unit_square() -> HPolyhedron {
        HPolyhedron::boxed(&ints(&[0, 0]), &ints(&[1, 1]))
    }

    #[test]
    fn project_square_to_interval() {
        let p = unit_square().project(&[0]);
        assert!(p.set_eq(&HPolyhedron::boxed(&ints(&[0]), &ints(&[1]))));
    }

    #[test]
    fn project_triangle_to_interval() {
        let t = HPolyhedron::from_ineqs(
            2,
            vec![(ints(&[1, 1]), int(1)), (ints(&[-1, 0]), int(0)), (ints(&[0, -1]), int(0))],
        );
        assert!(t.project(&[0]).set_eq(&HPolyhedron::boxed(&ints(&[0]), &ints(&[1]))));
    }

    #[test]
    fn project_through_equality() {
        // {x + y = 2, 0 <= y <= 1} onto x is [1, 2]
        let p = HPolyhedron::from_ineqs(2, vec![(ints(&[0, 1]), int(1)), (ints(&[0, -1]), int(0))])
            .with_eq(ints(&[1, 1]), int(2));
        assert!(p.project(&[0]).set_eq(&HPolyhedron::boxed(&ints(&[1]), &ints(&[2]))));
    }

    #[test]
    fn project_detects_empty() {
        let p = HPolyhedron::from_ineqs(2, vec![(ints(&[1, 1]), int(-1)), (ints(&[-1, 0]), int(0)), (ints(&[0, -1]), int(0))]);
        assert!(p.project(&[0]).is_empty());
    }

    #[test]
    fn minkowski_sum_of_intervals() {
        let a = HPolyhedron::boxed(&ints(&[0]), &ints(&[1]));
        let b = HPolyhedron::boxed(&ints(&[2]), &ints(&[5]));
        assert!(a.minkowski_sum(&b).set_eq(&HPolyhedron::boxed(&ints(&[2]), &ints(&[6]))));
        assert!(a.minkowski_difference(&b).set_eq(&HPolyhedron::boxed(&ints(&[-5]), &ints(&[-1]))));
    }

    #[test]
    fn vrep_of_square_and_halfline() {
        let v = unit_square().vrep();
        assert_eq!(v.points.len(), 4);
        assert!(v.rays.is_empty() && v.lines.is_empty());
        let h = HPolyhedron::from_ineqs(1, vec![(ints(&[-1]), int(-2))]);
        let v = h.vrep();
        assert_eq!(v.points, vec![ints(&[2])]);
        assert_eq!(v.rays, vec![ints(&[1])]);
    }

    #[test]
    fn canonical_is_deterministic() {
        let a = unit_square().with_ineq(ints(&[2, 2]), int(5));
        let b = HPolyhedron::from_ineqs(
            2,
            vec![
                (ints(&[0, -3]), int(0)),
                (ints(&[2, 0]), int(2)),
                (ints(&[-1, 0]), int(0)),
                (ints(&[0, 1]), int(1)),
            ],
        );
        assert_eq!(a.canonical(), b.canonical());
    }

    #[test]
    fn scaled_and_translated() {
        let s = unit_square().scaled(&ratio(1, 2)).translated(&ints(&[1, 1]));
        assert!(s.is_member(&[ratio(3, 2), int(1)]));
        assert!(!s.is_member(&[int(2), int(1)]));
    }

    #[test]
    fn membership_and_emptiness() {
        assert!(HPolyhedron::empty(2).is_empty());
        assert!(HPolyhedron::universe(3).is_member(&ints(&[1, 2, 3])));
        let orth = HPolyhedron::from_ineqs(2, vec![(ints(&[-1, 0]), int(0)), (ints(&[0, -1]), int(0))]);
        assert!(orth.is_member(&ints(&[0, 0])));
    }
}

//! Samples of the frontier `Min_K F(p)` by weighted-sum scalarization.

use crate::error::{Error, Result};
use crate::geometry::{linalg, lp, OrderCone, VRep};
#[cfg(test)]
use crate::geometry::{HPolyhedron, LpOutcome};
use crate::problem::{ConstraintSpec, ObjectiveSpec, ParametricProblem};
use crate::scalar::{dot, mat_t_vec, Matrix, ratio, round_f64, to_f64, to_f64_vec, zeros, Scalar};
use num_traits::{Signed, Zero};
use rayon::prelude::*;

/// Half-width of the box that truncates unbounded feasible sets on the float path.
pub const TRUNCATION: f64 = 10.0;
const GRID: usize = 15;
const DIGITS: u32 = 9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frontier {
    /// Distinct frontier points, sorted lexicographically.
    pub points: Vec<Vec<Scalar>>,
    /// A minimizer `x` for each point.
    pub preimages: Vec<Vec<Scalar>>,
    /// Whether every value is exact (LP path) rather than rounded floats.
    pub exact: bool,
}

/// Weights `Σ λ_j g_j` over the generators `g_j` of `K*` with `λ` on the
/// simplex grid of step `1/steps`; `steps = 20` gives 21 weights for a 2D cone.
pub fn weight_grid(k: &OrderCone, steps: usize) -> Vec<Vec<Scalar>> {
    let gens = k.dual().rays();
    let n = k.dim();
    if gens.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut lam = vec![0usize; gens.len()];
    compositions(steps, 0, &mut lam, &mut |lam| {
        let mut w = zeros(n);
        for (l, g) in lam.iter().zip(gens) {
            if *l > 0 {
                let c = ratio(*l as i64, steps as i64);
                for (a, b) in w.iter_mut().zip(g) {
                    *a += &c * b;
                }
            }
        }
        out.push(w);
    });
    out.sort();
    out.dedup();
    out
}

fn compositions(rest: usize, i: usize, lam: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
    if i + 1 == lam.len() {
        lam[i] = rest;
        emit(lam);
        return;
    }
    for v in 0..=rest {
        lam[i] = v;
        compositions(rest - v, i + 1, lam, emit);
    }
}

pub fn default_weights(k: &OrderCone) -> Vec<Vec<Scalar>> {
    weight_grid(k, 20)
}

/// For each weight `w ∈ K* \ {0}`, minimizes `⟨w, f(p, ·)⟩` over `C(p)` and
/// collects the images.
///
/// Affine objectives over polyhedral constraints use exact LPs, with ties
/// broken by a fixed interior dual weight so boundary weights still return
/// minimal points. Everything else uses grid refinement in floats, truncated
/// to `[-10, 10]` on unbounded sides; minimizers on the truncation boundary
/// count as unbounded scalarizations.
pub fn frontier_sample(pr: &ParametricProblem, p: &[Scalar], weights: &[Vec<Scalar>]) -> Result<Frontier> {
    if p.len() != pr.dims.p {
        return Err(Error::DimensionMismatch("p has the wrong length".into()));
    }
    for w in weights {
        if w.len() != pr.dims.y || w.iter().all(Zero::is_zero) || !pr.cone.dual_contains(w) {
            return Err(Error::InvalidArgument("weights must lie in K* \\ {0}".into()));
        }
    }
    let exact = pr.objective.is_affine() && pr.constraints.is_polyhedral();
    let results: Vec<Result<Option<(Vec<Scalar>, Vec<Scalar>)>>> = if exact {
        let c = pr.feasible_polyhedron(p)?;
        if c.is_empty() {
            return Err(Error::Infeasible(p.to_vec()));
        }
        let v = c.vrep();
        let (fx, shift) = affine_parts(pr, p);
        let w0 = pr.cone.interior_dual_vector().ok_or(Error::ConeDegenerate)?;
        let tie = mat_t_vec(&fx, &w0, pr.dims.x);
        weights.par_iter().map(|w| scalarize_vertices(&v, &fx, &shift, &tie, w)).collect()
    } else {
        let region = FloatRegion::new(pr, p)?;
        weights.par_iter().map(|w| scalarize_float(pr, p, &region, w)).collect()
    };
    let mut pairs = Vec::new();
    for r in results {
        if let Some(pair) = r? {
            pairs.push(pair);
        }
    }
    pairs.sort();
    pairs.dedup_by(|a, b| a.0 == b.0);
    let (points, preimages) = pairs.into_iter().unzip();
    Ok(Frontier { points, preimages, exact })
}

fn affine_parts(pr: &ParametricProblem, p: &[Scalar]) -> (Vec<Vec<Scalar>>, Vec<Scalar>) {
    match &pr.objective {
        ObjectiveSpec::Affine { fp, fx, c } => {
            let shift: Vec<Scalar> = fp.iter().zip(c).map(|(row, ci)| dot(row, p) + ci).collect();
            (fx.clone(), shift)
        }
        _ => unreachable!("exact path needs an affine objective"),
    }
}

/// A linear cost over `C(p)` is unbounded exactly when it decreases along an
/// extreme ray or varies along a line; otherwise it is minimized at a vertex.
/// Ties on the optimal face are broken by the cost `tie`, then by the
/// lexicographically smallest vertex.
fn scalarize_vertices(
    v: &VRep,
    fx: &Matrix,
    shift: &[Scalar],
    tie: &[Scalar],
    w: &[Scalar],
) -> Result<Option<(Vec<Scalar>, Vec<Scalar>)>> {
    let cost = mat_t_vec(fx, w, tie.len());
    if v.lines.iter().any(|l| !dot(&cost, l).is_zero()) || v.rays.iter().any(|r| dot(&cost, r).is_negative()) {
        return Err(Error::UnboundedScalarization(w.to_vec()));
    }
    let Some(best) = v.points.iter().map(|x| dot(&cost, x)).min() else {
        return Ok(None);
    };
    let flat_rays = v.rays.iter().filter(|r| dot(&cost, r).is_zero());
    if v.lines.iter().any(|l| !dot(tie, l).is_zero()) || flat_rays.into_iter().any(|r| dot(tie, r).is_negative()) {
        // the optimal face only holds weakly minimal points
        return Ok(None);
    }
    let x = v
        .points
        .iter()
        .filter(|x| dot(&cost, x) == best)
        .min_by(|a, b| dot(tie, a).cmp(&dot(tie, b)).then_with(|| a.cmp(b)))
        .expect("a vertex attains the minimum");
    let y = fx.iter().zip(shift).map(|(row, s)| dot(row, x) + s).collect();
    Ok(Some((y, x.clone())))
}

/// Two-phase LP route for the same scalarization; the vertex route is
/// checked against it.
#[cfg(test)]
fn scalarize_exact(
    pr: &ParametricProblem,
    p: &[Scalar],
    c: &HPolyhedron,
    w: &[Scalar],
) -> Result<Option<(Vec<Scalar>, Vec<Scalar>)>> {
    let (fx, shift) = affine_parts(pr, p);
    let cost = mat_t_vec(&fx, w, pr.dims.x);
    let value = match lp::minimize(&cost, c) {
        LpOutcome::Optimal { value, .. } => value,
        LpOutcome::Unbounded => return Err(Error::UnboundedScalarization(w.to_vec())),
        LpOutcome::Infeasible => return Err(Error::Infeasible(p.to_vec())),
    };
    let w0 = pr.cone.interior_dual_vector().ok_or(Error::ConeDegenerate)?;
    let face = c.clone().with_eq(cost, value);
    let tie = mat_t_vec(&fx, &w0, pr.dims.x);
    match lp::minimize(&tie, &face) {
        LpOutcome::Optimal { point, .. } => {
            let y: Vec<Scalar> = fx.iter().zip(&shift).map(|(row, s)| dot(row, &point) + s).collect();
            Ok(Some((y, point)))
        }
        // the optimal face only holds weakly minimal points
        _ => Ok(None),
    }
}

/// Search region for the float path: `x = x0 + N u` with `u` in a box.
struct FloatRegion {
    x0_exact: Vec<Scalar>,
    basis_exact: Vec<Vec<Scalar>>,
    x0: Vec<f64>,
    basis: Vec<Vec<f64>>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    truncated_lo: Vec<bool>,
    truncated_hi: Vec<bool>,
}

impl FloatRegion {
    fn new(pr: &ParametricProblem, p: &[Scalar]) -> Result<Self> {
        let nx = pr.dims.x;
        let (x0, basis, bbox) = match &pr.constraints {
            ConstraintSpec::Smooth(_) => {
                let bb = pr.feasible_box(p)?;
                let basis = (0..nx).map(|i| crate::scalar::unit(nx, i)).collect();
                (zeros(nx), basis, bb)
            }
            _ => {
                let c = pr.feasible_polyhedron(p)?;
                let x0 = lp::find_point(&c).ok_or_else(|| Error::Infeasible(p.to_vec()))?;
                let eqs: Vec<Vec<Scalar>> = c.eqs().iter().map(|r| r.coeffs.clone()).collect();
                let basis = if eqs.is_empty() {
                    (0..nx).map(|i| crate::scalar::unit(nx, i)).collect()
                } else {
                    linalg::null_space(&eqs, nx)
                };
                // u-space polyhedron {u : x0 + N u ∈ C}
                let cols: Vec<Vec<Scalar>> =
                    (0..nx).map(|r| basis.iter().map(|b| b[r].clone()).collect()).collect();
                let cu = c.preimage(&cols, &x0, basis.len());
                let bb = cu.bounding_box().ok_or_else(|| Error::Infeasible(p.to_vec()))?;
                let bb = bb.into_iter().map(|(l, h)| (l.as_ref().map(to_f64), h.as_ref().map(to_f64))).collect();
                (x0, basis, bb)
            }
        };
        let lo: Vec<f64> = bbox.iter().map(|(l, _)| l.unwrap_or(-TRUNCATION).max(-TRUNCATION)).collect();
        let hi: Vec<f64> = bbox.iter().map(|(_, h)| h.unwrap_or(TRUNCATION).min(TRUNCATION)).collect();
        let truncated_lo = bbox.iter().map(|(l, _)| l.map_or(true, |v| v < -TRUNCATION)).collect();
        let truncated_hi = bbox.iter().map(|(_, h)| h.map_or(true, |v| v > TRUNCATION)).collect();
        Ok(FloatRegion {
            x0: to_f64_vec(&x0),
            basis: basis.iter().map(|b| to_f64_vec(b)).collect(),
            x0_exact: x0,
            basis_exact: basis,
            lo,
            hi,
            truncated_lo,
            truncated_hi,
        })
    }

    fn point(&self, u: &[f64]) -> Vec<f64> {
        let mut x = self.x0.clone();
        for (ui, b) in u.iter().zip(&self.basis) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += ui * bi;
            }
        }
        x
    }

    /// Box coordinates of a feasible `x`, if it lies inside the box.
    fn coords(&self, x: &[Scalar]) -> Option<Vec<f64>> {
        let nx = x.len();
        let cols: Vec<Vec<Scalar>> = (0..nx).map(|r| self.basis_exact.iter().map(|b| b[r].clone()).collect()).collect();
        let rhs: Vec<Scalar> = x.iter().zip(&self.x0_exact).map(|(a, b)| a - b).collect();
        let u = to_f64_vec(&linalg::solve(&cols, &rhs, self.basis_exact.len())?);
        let inside = u.iter().zip(&self.lo).zip(&self.hi).all(|((v, l), h)| l <= v && v <= h);
        inside.then_some(u)
    }

    fn touches_truncation(&self, u: &[f64]) -> bool {
        let tol = 1e-6;
        (0..u.len()).any(|k| {
            (self.truncated_lo[k] && u[k] - self.lo[k] < tol) || (self.truncated_hi[k] && self.hi[k] - u[k] < tol)
        })
    }
}

/// Minimizes `f` over the box `[lo, hi]` restricted to `feasible`, by
/// repeatedly gridding a shrinking box around the incumbent.
pub fn grid_minimize(
    f: &dyn Fn(&[f64]) -> f64,
    feasible: &dyn Fn(&[f64]) -> bool,
    lo: &[f64],
    hi: &[f64],
) -> Option<Vec<f64>> {
    grid_minimize_from(f, feasible, lo, hi, None)
}

fn grid_minimize_from(
    f: &dyn Fn(&[f64]) -> f64,
    feasible: &dyn Fn(&[f64]) -> bool,
    lo: &[f64],
    hi: &[f64],
    start: Option<Vec<f64>>,
) -> Option<Vec<f64>> {
    let d = lo.len();
    let (mut a, mut b) = (lo.to_vec(), hi.to_vec());
    let mut best: Option<(f64, Vec<f64>)> = start.filter(|u| feasible(u)).map(|u| (f(&u), u));
    for _ in 0..80 {
        let mut idx = vec![0usize; d];
        loop {
            let u: Vec<f64> = (0..d)
                .map(|k| {
                    if GRID == 1 || a[k] == b[k] {
                        a[k]
                    } else {
                        a[k] + (b[k] - a[k]) * idx[k] as f64 / (GRID - 1) as f64
                    }
                })
                .collect();
            if feasible(&u) {
                let v = f(&u);
                if best.as_ref().map_or(true, |(bv, _)| v < *bv) {
                    best = Some((v, u));
                }
            }
            let mut k = 0;
            while k < d {
                idx[k] += 1;
                if idx[k] < GRID {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == d {
                break;
            }
        }
        let (_, c) = best.as_ref()?;
        let mut width = 0.0f64;
        for k in 0..d {
            let step = (b[k] - a[k]) / (GRID - 1) as f64;
            a[k] = (c[k] - 2.0 * step).max(lo[k]);
            b[k] = (c[k] + 2.0 * step).min(hi[k]);
            width = width.max(b[k] - a[k]);
        }
        if width < 1e-12 {
            break;
        }
    }
    best.map(|(_, u)| u)
}

fn scalarize_float(
    pr: &ParametricProblem,
    p: &[Scalar],
    region: &FloatRegion,
    w: &[Scalar],
) -> Result<Option<(Vec<Scalar>, Vec<Scalar>)>> {
    let pf = to_f64_vec(p);
    let wf = to_f64_vec(w);
    let obj = |u: &[f64]| {
        let y = pr.objective.eval_f64(&pf, &region.point(u));
        y.iter().zip(&wf).map(|(a, b)| a * b).sum::<f64>()
    };
    let feas = |u: &[f64]| pr.feasible_f64(&pf, &region.point(u));
    let u = grid_minimize(&obj, &feas, &region.lo, &region.hi).ok_or_else(|| Error::Infeasible(p.to_vec()))?;
    if region.touches_truncation(&u) {
        return Err(Error::UnboundedScalarization(w.to_vec()));
    }
    let xf = region.point(&u);
    let x: Vec<Scalar> = xf.iter().map(|&v| round_f64(v, DIGITS)).collect();
    let y = match pr.objective.eval(p, &x) {
        Some(y) => y,
        None => pr.objective.eval_f64(&pf, &xf).iter().map(|&v| round_f64(v, DIGITS)).collect(),
    };
    Ok(Some((y, x)))
}

/// Float-path search for a minimal point below the image of a feasible `x`:
/// minimizes `⟨w0, f(p, ·)⟩` with `w0 ∈ int K*` over the section
/// `{x' ∈ C(p) : f(p, x) - f(p, x') ∈ member}`, starting from `x` itself.
/// Returns the minimizer's image, or `None` when the search runs into the
/// truncation box.
pub(crate) fn minimal_point_below(
    pr: &ParametricProblem,
    p: &[Scalar],
    x: &[Scalar],
    member: &OrderCone,
) -> Result<Option<Vec<f64>>> {
    let region = FloatRegion::new(pr, p)?;
    let w0 = to_f64_vec(&pr.cone.interior_dual_vector().ok_or(Error::ConeDegenerate)?);
    let pf = to_f64_vec(p);
    let y = pr.objective.eval_f64(&pf, &to_f64_vec(x));
    let h = member.cone().h();
    let unit = |c: &[Scalar]| {
        let v = to_f64_vec(c);
        let norm = v.iter().fold(0.0f64, |m, a| m.max(a.abs())).max(1e-300);
        v.into_iter().map(|a| a / norm).collect::<Vec<f64>>()
    };
    let ineqs: Vec<Vec<f64>> = h.ineqs().iter().map(|r| unit(&r.coeffs)).collect();
    let eqs: Vec<Vec<f64>> = h.eqs().iter().map(|r| unit(&r.coeffs)).collect();
    let slack = 1e-9 * (1.0 + y.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    let below = |fy: &[f64]| {
        let d: Vec<f64> = y.iter().zip(fy).map(|(a, b)| a - b).collect();
        let val = |r: &Vec<f64>| r.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>();
        ineqs.iter().all(|r| val(r) <= slack) && eqs.iter().all(|r| val(r).abs() <= slack)
    };
    let obj = |u: &[f64]| {
        let fy = pr.objective.eval_f64(&pf, &region.point(u));
        fy.iter().zip(&w0).map(|(a, b)| a * b).sum::<f64>()
    };
    let feas = |u: &[f64]| {
        let xf = region.point(u);
        pr.feasible_f64(&pf, &xf) && below(&pr.objective.eval_f64(&pf, &xf))
    };
    let Some(u) = grid_minimize_from(&obj, &feas, &region.lo, &region.hi, region.coords(x)) else {
        return Ok(None);
    };
    if region.touches_truncation(&u) {
        return Ok(None);
    }
    Ok(Some(pr.objective.eval_f64(&pf, &region.point(&u))))
}

//! Structural checks on a problem: pointed cone, K-convex objective, convex
//! constraints, and a sampled midpoint test of `epi F`.

use super::*;
use crate::geometry::{linalg, lp};
use crate::scalar::{ratio, sub};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn pass() -> Self {
        Check { holds: true, detail: None }
    }

    fn fail(detail: String) -> Self {
        Check { holds: false, detail: Some(detail) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub cone_pointed: Check,
    pub objective_k_convex: Check,
    /// An extreme ray `w` of `K*` along which `⟨w, f⟩` is not convex.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::serde_scalar::opt_vec")]
    pub convexity_witness: Option<Vec<Scalar>>,
    pub constraints_convex: Check,
    pub tilde_cone_inside: Option<Check>,
    pub midpoint_samples: usize,
    pub midpoint_failures: usize,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.cone_pointed.holds
            && self.objective_k_convex.holds
            && self.constraints_convex.holds
            && self.tilde_cone_inside.as_ref().map_or(true, |c| c.holds)
            && self.midpoint_failures == 0
    }
}

/// Whether `K̃ \ {0} ⊆ int K`, checked on the generators of `K̃`.
pub fn tilde_inside_interior(k: &OrderCone, tilde: &OrderCone) -> bool {
    tilde.cone().rays().iter().all(|g| k.contains_interior(g))
}

pub fn validate(pr: &ParametricProblem) -> ValidationReport {
    validate_seeded(pr, 0x5EED, 16)
}

pub fn validate_seeded(pr: &ParametricProblem, seed: u64, samples: usize) -> ValidationReport {
    let (objective_k_convex, convexity_witness) = k_convexity(pr);
    let tilde_cone_inside = pr.cone_tilde.as_ref().map(|t| {
        if tilde_inside_interior(&pr.cone, t) {
            Check::pass()
        } else {
            Check::fail("a generator of cone_tilde is not interior to K".into())
        }
    });
    let (midpoint_samples, midpoint_failures) = midpoint_test(pr, seed, samples);
    ValidationReport {
        // OrderCone construction rejects cones with lines
        cone_pointed: Check::pass(),
        objective_k_convex,
        convexity_witness,
        constraints_convex: Check::pass(),
        tilde_cone_inside,
        midpoint_samples,
        midpoint_failures,
    }
}

/// `⟨w, f⟩` convex for every extreme ray `w` of `K*`.
fn k_convexity(pr: &ParametricProblem) -> (Check, Option<Vec<Scalar>>) {
    let rays = pr.cone.dual().rays();
    let lines = pr.cone.dual().lines();
    // lines of K* enter with both signs
    let dirs: Vec<Vec<Scalar>> = rays
        .iter()
        .cloned()
        .chain(lines.iter().cloned())
        .chain(lines.iter().map(|l| crate::scalar::neg(l)))
        .collect();
    for w in dirs {
        let bad = match &pr.objective {
            ObjectiveSpec::Affine { .. } => false,
            ObjectiveSpec::Quadratic { q, .. } => {
                let n = pr.n_px();
                let mut m = vec![zeros(n); n];
                for (wi, qi) in w.iter().zip(q) {
                    for r in 0..n {
                        for c in 0..n {
                            m[r][c] += wi * &qi[r][c];
                        }
                    }
                }
                linalg::psd_witness(&m).is_some()
            }
            ObjectiveSpec::Builtin(ObjectiveBuiltin::AbsPair) => (&w[0] + &w[1]).is_negative(),
            ObjectiveSpec::Builtin(ObjectiveBuiltin::ExpTradeoff) => w.iter().any(|v| v.is_negative()),
        };
        if bad {
            let msg = format!("<w, f> is not convex for w = {:?}", w.iter().map(|v| v.to_string()).collect::<Vec<_>>());
            return (Check::fail(msg), Some(w));
        }
    }
    (Check::pass(), None)
}

/// Samples `(p₁, x₁)`, `(p₂, x₂)` in `gph C` and tests `½y₁ + ½y₂ ∈ F(½p₁ + ½p₂) + K`
/// with `y_i = f(p_i, x_i)`. The midpoint `x` is tried first as a certificate;
/// affine instances fall back to an exact LP.
fn midpoint_test(pr: &ParametricProblem, seed: u64, samples: usize) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    let mut failures = 0;
    let base_p = pr.base_point.as_ref().map(|(p, _)| p.clone()).unwrap_or_else(|| zeros(pr.dims.p));
    let mut attempts = 0;
    while done < samples && attempts < samples * 20 {
        attempts += 1;
        let draw = |rng: &mut ChaCha8Rng| -> Option<(Vec<Scalar>, Vec<Scalar>)> {
            let p: Vec<Scalar> = base_p.iter().map(|v| v + ratio(rng.gen_range(-8..=8), 8)).collect();
            let x = sample_x(pr, &p, rng)?;
            Some((p, x))
        };
        let (Some((p1, x1)), Some((p2, x2))) = (draw(&mut rng), draw(&mut rng)) else { continue };
        let half = ratio(1, 2);
        let mid = |a: &[Scalar], b: &[Scalar]| a.iter().zip(b).map(|(u, v)| (u + v) * &half).collect::<Vec<_>>();
        let (pm, xm) = (mid(&p1, &p2), mid(&x1, &x2));
        let ok = match (pr.objective.eval(&p1, &x1), pr.objective.eval(&p2, &x2), pr.objective.eval(&pm, &xm)) {
            (Some(y1), Some(y2), Some(ym_at)) => {
                let ym = mid(&y1, &y2);
                pr.cone.contains(&sub(&ym, &ym_at)) || (pr.objective.is_affine() && lp_member(pr, &pm, &ym))
            }
            _ => {
                let f = |p: &[Scalar], x: &[Scalar]| pr.objective.eval_f64(&to_f64_vec(p), &to_f64_vec(x));
                let (y1, y2, ya) = (f(&p1, &x1), f(&p2, &x2), f(&pm, &xm));
                let d: Vec<Scalar> = (0..pr.dims.y)
                    .map(|i| crate::scalar::round_f64(0.5 * (y1[i] + y2[i]) - ya[i] + 1e-9, 12))
                    .collect();
                pr.cone.contains(&d)
            }
        };
        done += 1;
        if !ok {
            failures += 1;
        }
    }
    (done, failures)
}

/// A feasible `x` for `C(p)`: a random vertex-biased point for polyhedral
/// constraints, a random grid point for smooth ones.
fn sample_x(pr: &ParametricProblem, p: &[Scalar], rng: &mut ChaCha8Rng) -> Option<Vec<Scalar>> {
    if pr.constraints.is_polyhedral() {
        let c = pr.feasible_polyhedron(p).ok()?;
        let dir: Vec<Scalar> = (0..pr.dims.x).map(|_| int(rng.gen_range(-3..=3))).collect();
        let boxed = c.intersect(&HPolyhedron::boxed(&vec![int(-10); pr.dims.x], &vec![int(10); pr.dims.x]));
        let a = lp::minimize(&dir, &boxed).point()?.to_vec();
        let b = lp::find_point(&boxed)?;
        let t = ratio(rng.gen_range(0..=4), 4);
        Some(a.iter().zip(&b).map(|(u, v)| u * &t + v * (Scalar::one() - &t)).collect())
    } else {
        for _ in 0..50 {
            let x: Vec<Scalar> = (0..pr.dims.x).map(|_| ratio(rng.gen_range(-8..=8), 8)).collect();
            if pr.constraints.is_feasible(p, &x).unwrap_or(false) {
                return Some(x);
            }
        }
        pr.constraints.is_feasible(p, &zeros(pr.dims.x)).unwrap_or(false).then(|| zeros(pr.dims.x))
    }
}

/// Exact `y ∈ F(p) + K` for affine objectives and polyhedral constraints.
pub fn lp_member(pr: &ParametricProblem, p: &[Scalar], y: &[Scalar]) -> bool {
    let ObjectiveSpec::Affine { fp, fx, c } = &pr.objective else { return false };
    let Ok(cp) = pr.feasible_polyhedron(p) else { return false };
    // y - Fp p - c - Fx x ∈ K
    let r: Vec<Scalar> = y.iter().zip(fp).zip(c).map(|((yi, row), ci)| yi - dot(row, p) - ci).collect();
    let k = pr.cone.cone().h();
    let mut poly = cp;
    for a in k.ineqs() {
        let coeffs = crate::scalar::neg(&crate::scalar::mat_t_vec(fx, &a.coeffs, pr.dims.x));
        poly = poly.with_ineq(coeffs, -dot(&a.coeffs, &r));
    }
    for e in k.eqs() {
        let coeffs = crate::scalar::neg(&crate::scalar::mat_t_vec(fx, &e.coeffs, pr.dims.x));
        poly = poly.with_eq(coeffs, -dot(&e.coeffs, &r));
    }
    poly.is_feasible()
}

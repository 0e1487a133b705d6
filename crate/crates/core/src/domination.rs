//! Sampling certificates for `F(p) ⊆ 𝓕(p) + K` on a ball around `p̄`.

use crate::efficiency::frontier::minimal_point_below;
use crate::efficiency::{default_weights, frontier_sample, Variant};
use crate::error::{Error, Result};
use crate::geometry::{lp, HPolyhedron, LpOutcome, OrderCone};
use crate::problem::ParametricProblem;
use crate::scalar::{dot, round_f64, sub, to_f64, to_f64_vec, Scalar};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const DEFAULT_SEED: u64 = 0x5EED;
/// Row slack for membership tests on frontiers computed in floats.
pub const FLOAT_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominationOptions {
    pub radius: f64,
    pub seed: u64,
    pub n_param_samples: usize,
    /// Grid points per `x`-axis when sampling `F(p)`.
    pub grid: usize,
    /// Half-width of the box that truncates `C(p)`.
    pub box_limit: f64,
    /// Test against `𝓦(p) + K̃` instead of `+ K`.
    pub strict: bool,
}

impl Default for DominationOptions {
    fn default() -> Self {
        DominationOptions { radius: 0.5, seed: DEFAULT_SEED, n_param_samples: 32, grid: 15, box_limit: 10.0, strict: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    #[serde(with = "crate::serde_scalar::vec")]
    pub p: Vec<Scalar>,
    #[serde(with = "crate::serde_scalar::vec")]
    pub y: Vec<Scalar>,
    /// Largest normalized row violation of `y - c ∈ K` for the best frontier
    /// sample `c`; `None` when no frontier point exists at `p`.
    pub distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominationCertificate {
    pub variant: Variant,
    pub strict: bool,
    pub radius: f64,
    pub seed: u64,
    pub n_param_samples: usize,
    pub n_image_samples: usize,
    pub holds_empirically: bool,
    pub violations: Vec<Violation>,
    /// Sampled parameters with `C(p) = ∅`.
    #[serde(with = "crate::serde_scalar::mat")]
    pub infeasible: Vec<Vec<Scalar>>,
    /// Whether some `C(p)` was cut by the sampling box.
    pub truncated: bool,
    /// Set when the hypothesis was assumed rather than sampled.
    pub assumed: bool,
    /// Weak variant only: sampled midpoint convexity of `gph(𝓦 + K̃)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tilde_convexity: Option<MidpointSample>,
}

/// Midpoints of pairs of sampled graph points, and how many fell outside.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MidpointSample {
    pub pairs: usize,
    pub failures: usize,
}

impl DominationCertificate {
    /// A certificate standing for a user assumption; reports mark it as such.
    pub fn assumed(variant: Variant) -> Self {
        DominationCertificate {
            variant,
            strict: false,
            radius: 0.0,
            seed: DEFAULT_SEED,
            n_param_samples: 0,
            n_image_samples: 0,
            holds_empirically: true,
            violations: vec![],
            infeasible: vec![],
            truncated: false,
            assumed: true,
            tilde_convexity: None,
        }
    }

    /// Fails unless this certificate holds for `variant`.
    pub fn require(&self, variant: Variant) -> Result<()> {
        if self.variant != variant || !self.holds_empirically {
            return Err(Error::DominationNotCertified);
        }
        Ok(())
    }
}

/// Uniform samples of the closed ball of `radius` around `center`, rounded to
/// six decimals. Drawn sequentially so that more samples extend fewer.
pub fn ball_samples(center: &[Scalar], radius: f64, n: usize, seed: u64) -> Vec<Vec<Scalar>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = to_f64_vec(center);
    (0..n)
        .map(|_| {
            let u = loop {
                let u: Vec<f64> = c.iter().map(|_| rng.gen_range(-1.0..=1.0)).collect();
                if u.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
                    break u;
                }
            };
            c.iter().zip(&u).map(|(a, b)| round_f64(a + radius * b, 6)).collect()
        })
        .collect()
}

fn grid_axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 || hi <= lo {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Points of `C(p) ∩ [-L, L]^n`: a regular grid over the box, plus for
/// polyhedral constraints the exact vertices of the truncated set.
fn image_preimages(pr: &ParametricProblem, p: &[Scalar], grid: usize, limit: f64) -> Result<(Vec<Vec<Scalar>>, bool)> {
    let nx = pr.dims.x;
    let bbox = pr.feasible_box(p)?;
    let mut truncated = false;
    let axes: Vec<Vec<f64>> = bbox
        .iter()
        .map(|&(lo, hi)| {
            let lo = match lo {
                Some(v) if v >= -limit => v,
                _ => {
                    truncated = true;
                    -limit
                }
            };
            let hi = match hi {
                Some(v) if v <= limit => v,
                _ => {
                    truncated = true;
                    limit
                }
            };
            grid_axis(lo, hi, grid)
        })
        .collect();
    let pf = to_f64_vec(p);
    let mut out = Vec::new();
    let mut idx = vec![0usize; nx];
    loop {
        let x: Vec<f64> = idx.iter().zip(&axes).map(|(&i, a)| a[i]).collect();
        let xs: Vec<Scalar> = x.iter().map(|&v| round_f64(v, 9)).collect();
        if pr.constraints.is_feasible(p, &xs)? || (!pr.constraints.is_polyhedral() && pr.feasible_f64(&pf, &x)) {
            out.push(xs);
        }
        let mut k = 0;
        while k < nx {
            idx[k] += 1;
            if idx[k] < axes[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == nx {
            break;
        }
    }
    if pr.constraints.is_polyhedral() {
        let lim = round_f64(limit, 9);
        let cube = HPolyhedron::boxed(&vec![-lim.clone(); nx], &vec![lim; nx]);
        out.extend(pr.feasible_polyhedron(p)?.intersect(&cube).vertices());
    }
    out.sort();
    out.dedup();
    Ok((out, truncated))
}

fn image(pr: &ParametricProblem, p: &[Scalar], x: &[Scalar]) -> Vec<Scalar> {
    pr.objective.eval(p, x).unwrap_or_else(|| {
        pr.objective.eval_f64(&to_f64_vec(p), &to_f64_vec(x)).into_iter().map(|v| round_f64(v, 12)).collect()
    })
}

/// Largest violation of the rows of `K` (normalized to unit max-norm) by `d`.
fn row_violation(k: &OrderCone, d: &[Scalar]) -> f64 {
    let h = k.cone().h();
    let f = to_f64_vec(d);
    let val = |c: &[Scalar]| {
        let norm = c.iter().map(|a| to_f64(a).abs()).fold(0.0, f64::max).max(1e-300);
        c.iter().zip(&f).map(|(a, b)| to_f64(a) * b).sum::<f64>() / norm
    };
    let ineq = h.ineqs().iter().map(|r| val(&r.coeffs)).fold(0.0, f64::max);
    h.eqs().iter().map(|r| val(&r.coeffs).abs()).fold(ineq, f64::max)
}

/// `y ∈ conv(cloud) + K` by LP over the convex weights.
fn in_hull_plus_cone(cloud: &[Vec<Scalar>], k: &OrderCone, y: &[Scalar]) -> bool {
    let m = cloud.len();
    // variables λ ∈ Δ; y - Σ λ_i c_i ∈ K
    let mut poly = HPolyhedron::universe(m).with_eq(vec![Scalar::one(); m], Scalar::one());
    for i in 0..m {
        let mut c = vec![Scalar::zero(); m];
        c[i] = -Scalar::one();
        poly = poly.with_ineq(c, Scalar::zero());
    }
    let h = k.cone().h();
    // a · (y - Σ λ c) <= 0  ⇔  -Σ λ (a · c) <= -a · y
    for r in h.ineqs() {
        let coeffs: Vec<Scalar> = cloud.iter().map(|c| -dot(&r.coeffs, c)).collect();
        poly = poly.with_ineq(coeffs, -dot(&r.coeffs, y));
    }
    for r in h.eqs() {
        let coeffs: Vec<Scalar> = cloud.iter().map(|c| -dot(&r.coeffs, c)).collect();
        poly = poly.with_eq(coeffs, -dot(&r.coeffs, y));
    }
    !matches!(lp::minimize(&vec![Scalar::zero(); m], &poly), LpOutcome::Infeasible)
}

struct Sampled {
    p: Vec<Scalar>,
    images: usize,
    infeasible: bool,
    truncated: bool,
    violations: Vec<Violation>,
}

fn check_at(pr: &ParametricProblem, p: &[Scalar], opts: &DominationOptions, member: &OrderCone) -> Result<Sampled> {
    let mut s = Sampled { p: p.to_vec(), images: 0, infeasible: false, truncated: false, violations: vec![] };
    let (xs, truncated) = match image_preimages(pr, p, opts.grid, opts.box_limit) {
        Ok(v) => v,
        Err(Error::Infeasible(_)) => {
            s.infeasible = true;
            return Ok(s);
        }
        Err(e) => return Err(e),
    };
    s.truncated = truncated;
    if xs.is_empty() {
        if pr.constraints.is_polyhedral() && pr.feasible_polyhedron(p)?.is_empty() {
            s.infeasible = true;
        }
        return Ok(s);
    }
    let cloud = match frontier_sample(pr, p, &default_weights(&pr.cone)) {
        Ok(f) => f,
        Err(Error::Infeasible(_)) => {
            s.infeasible = true;
            return Ok(s);
        }
        Err(Error::UnboundedScalarization(_)) | Err(Error::FrontierEmpty(_)) => {
            crate::efficiency::frontier::Frontier { points: vec![], preimages: vec![], exact: true }
        }
        Err(e) => return Err(e),
    };
    s.images = xs.len();
    for x in &xs {
        let y = image(pr, p, x);
        if cloud.points.is_empty() {
            s.violations.push(Violation { p: p.to_vec(), y, distance: None });
            continue;
        }
        let dist = cloud
            .points
            .iter()
            .map(|c| row_violation(member, &sub(&y, c)))
            .fold(f64::INFINITY, f64::min);
        let ok = if cloud.exact {
            cloud.points.iter().any(|c| member.contains(&sub(&y, c))) || in_hull_plus_cone(&cloud.points, member, &y)
        } else {
            dist <= FLOAT_SLACK
                || in_hull_plus_cone(&cloud.points, member, &y)
                || minimal_point_below(pr, p, x, member)?.is_some()
        };
        if !ok {
            s.violations.push(Violation { p: p.to_vec(), y, distance: Some(dist) });
        }
    }
    Ok(s)
}

/// Samples `p` in the ball around `p̄` and `F(p)` on a grid of the truncated
/// feasible set, testing each image against the frontier sample plus the
/// cone. The result is empirical evidence, never a proof.
pub fn check_domination(
    pr: &ParametricProblem,
    pbar: &[Scalar],
    variant: Variant,
    opts: &DominationOptions,
) -> Result<DominationCertificate> {
    if pbar.len() != pr.dims.p {
        return Err(Error::DimensionMismatch("p̄ has the wrong length".into()));
    }
    if !(opts.radius > 0.0) || !opts.radius.is_finite() {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    let member = if opts.strict {
        pr.cone_tilde.as_ref().ok_or(Error::MissingTildeCone)?
    } else {
        &pr.cone
    };
    if variant == Variant::Weak && pr.cone_tilde.is_none() {
        return Err(Error::MissingTildeCone);
    }
    let ps = ball_samples(pbar, opts.radius, opts.n_param_samples, opts.seed);
    let results: Vec<Sampled> = ps.par_iter().map(|p| check_at(pr, p, opts, member)).collect::<Result<_>>()?;
    let mut violations = Vec::new();
    let mut infeasible = Vec::new();
    let mut images = 0;
    let mut truncated = false;
    for r in results {
        images += r.images;
        truncated |= r.truncated;
        if r.infeasible {
            infeasible.push(r.p);
        }
        violations.extend(r.violations);
    }
    let tilde_convexity = match (variant, &pr.cone_tilde) {
        (Variant::Weak, Some(t)) => Some(tilde_midpoints(pr, &ps, t)?),
        _ => None,
    };
    violations.sort_by(|a, b| (&a.p, &a.y).cmp(&(&b.p, &b.y)));
    violations.dedup_by(|a, b| a.p == b.p && a.y == b.y);
    infeasible.sort();
    Ok(DominationCertificate {
        variant,
        strict: opts.strict,
        radius: opts.radius,
        seed: opts.seed,
        n_param_samples: ps.len(),
        n_image_samples: images,
        holds_empirically: violations.is_empty(),
        violations,
        infeasible,
        truncated,
        assumed: false,
        tilde_convexity,
    })
}

fn frontier_points(pr: &ParametricProblem, p: &[Scalar]) -> Result<Option<crate::efficiency::Frontier>> {
    match frontier_sample(pr, p, &default_weights(&pr.cone)) {
        Ok(f) if !f.points.is_empty() => Ok(Some(f)),
        Ok(_) | Err(Error::Infeasible(_)) | Err(Error::UnboundedScalarization(_)) | Err(Error::FrontierEmpty(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// For consecutive sampled parameters `p_i, p_j` and frontier points
/// `c_i, c_j`, tests `(c_i + c_j) / 2` against the frontier sample at the
/// midpoint parameter plus `K̃`, the same membership rule as the domination
/// test. Pairs with an empty frontier at either end are not counted.
fn tilde_midpoints(pr: &ParametricProblem, ps: &[Vec<Scalar>], tilde: &OrderCone) -> Result<MidpointSample> {
    let half = Scalar::new(1.into(), 2.into());
    let pairs: Vec<(&Vec<Scalar>, &Vec<Scalar>)> = ps.iter().zip(ps.iter().skip(1)).collect();
    let counts: Vec<(usize, usize)> = pairs
        .par_iter()
        .map(|(a, b)| {
            let (Some(fa), Some(fb)) = (frontier_points(pr, a)?, frontier_points(pr, b)?) else {
                return Ok((0, 0));
            };
            let pm: Vec<Scalar> = a.iter().zip(b.iter()).map(|(u, v)| (u + v) * &half).collect();
            let Some(fm) = frontier_points(pr, &pm)? else {
                return Ok((fa.points.len() * fb.points.len(), fa.points.len() * fb.points.len()));
            };
            let mut fails = 0;
            for ca in &fa.points {
                for cb in &fb.points {
                    let mid: Vec<Scalar> = ca.iter().zip(cb).map(|(u, v)| (u + v) * &half).collect();
                    let ok = if fm.exact {
                        fm.points.iter().any(|c| tilde.contains(&sub(&mid, c)))
                    } else {
                        fm.points.iter().map(|c| row_violation(tilde, &sub(&mid, c))).fold(f64::INFINITY, f64::min) <= FLOAT_SLACK
                    };
                    if !(ok || in_hull_plus_cone(&fm.points, tilde, &mid)) {
                        fails += 1;
                    }
                }
            }
            Ok((fa.points.len() * fb.points.len(), fails))
        })
        .collect::<Result<_>>()?;
    Ok(MidpointSample { pairs: counts.iter().map(|c| c.0).sum(), failures: counts.iter().map(|c| c.1).sum() })
}

/// For affine problems whose frontier at `p` is a single point `c`, decides
/// `F(p) ⊆ c + K` exactly: every facet functional of `K` is minimized over
/// `F(p)` by LP. `None` when the frontier sample is not a singleton.
pub fn singleton_domination_exact(pr: &ParametricProblem, p: &[Scalar]) -> Result<Option<bool>> {
    let crate::problem::ObjectiveSpec::Affine { fp, fx, c } = &pr.objective else {
        return Ok(None);
    };
    let front = match frontier_sample(pr, p, &default_weights(&pr.cone)) {
        Ok(f) => f,
        Err(Error::UnboundedScalarization(_)) => return Ok(Some(false)),
        Err(e) => return Err(e),
    };
    if front.points.len() != 1 {
        return Ok(None);
    }
    let top = &front.points[0];
    let feasible = pr.feasible_polyhedron(p)?;
    let shift: Vec<Scalar> = fp.iter().zip(c).map(|(r, ci)| dot(r, p) + ci).collect();
    let h = pr.cone.cone().h();
    // y - top ∈ K ⇔ a · (Fx x + shift - top) <= 0 for inequality rows a
    let rows = h.ineqs().iter().map(|r| (r.coeffs.clone(), false)).chain(h.eqs().iter().map(|r| (r.coeffs.clone(), true)));
    for (a, eq) in rows {
        let cost = crate::scalar::mat_t_vec(fx, &a, pr.dims.x);
        let offset = dot(&a, &sub(&shift, top));
        for sign in if eq { vec![1, -1] } else { vec![1] } {
            let cs: Vec<Scalar> = cost.iter().map(|v| v * Scalar::from_integer(sign.into())).collect();
            match lp::maximize(&cs, &feasible) {
                LpOutcome::Optimal { value, .. } => {
                    if value + &offset * Scalar::from_integer(sign.into()) > Scalar::zero() {
                        return Ok(Some(false));
                    }
                }
                LpOutcome::Unbounded => return Ok(Some(false)),
                LpOutcome::Infeasible => return Err(Error::Infeasible(p.to_vec())),
            }
        }
    }
    Ok(Some(true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::builtins;
    use crate::scalar::ints;

    #[test]
    fn weak_variant_samples_tilde_convexity() {
        let pr = builtins::example_4_1()
            .with_cone_tilde(crate::problem::ConeSpec::Generators(vec![ints(&[2, 1]), ints(&[1, 2])]))
            .unwrap();
        let opts = DominationOptions { n_param_samples: 8, ..DominationOptions::default() };
        let c = check_domination(&pr, &ints(&[0, 0, 0]), Variant::Weak, &opts).unwrap();
        let m = c.tilde_convexity.unwrap();
        assert!(m.pairs > 0);
        assert_eq!(m.failures, 0);
        let c = check_domination(&pr, &ints(&[0, 0, 0]), Variant::Min, &opts).unwrap();
        assert!(c.tilde_convexity.is_none());
    }

    #[test]
    fn ball_samples_are_prefix_stable() {
        let a = ball_samples(&ints(&[0, 0]), 0.5, 8, DEFAULT_SEED);
        let b = ball_samples(&ints(&[0, 0]), 0.5, 16, DEFAULT_SEED);
        assert_eq!(a[..], b[..8]);
        assert!(a.iter().all(|p| to_f64_vec(p).iter().map(|v| v * v).sum::<f64>() <= 0.25 + 1e-9));
    }

    #[test]
    fn reference_examples_are_dominated() {
        for pr in [builtins::example_4_1(), builtins::example_5_1()] {
            let pbar = pr.base_point.clone().unwrap().0;
            let c = check_domination(&pr, &pbar, Variant::Min, &DominationOptions::default()).unwrap();
            assert!(c.holds_empirically, "{:?}", c.violations.first());
            assert_eq!(c.n_param_samples, 32);
            assert!(c.n_image_samples > 32);
            assert!(c.require(Variant::Min).is_ok());
            for p in ball_samples(&pbar, 0.5, 4, 1) {
                assert_eq!(singleton_domination_exact(&pr, &p).unwrap(), Some(true));
            }
        }
    }

    #[test]
    fn ray_counterexample_fails() {
        let pr = builtins::ray_counterexample();
        let c = check_domination(&pr, &ints(&[0]), Variant::Min, &DominationOptions::default()).unwrap();
        assert!(!c.holds_empirically);
        assert!(!c.violations.is_empty());
        assert!(c.violations.iter().all(|v| v.distance.is_none()));
        assert_eq!(c.require(Variant::Min), Err(Error::DominationNotCertified));
        assert_eq!(singleton_domination_exact(&pr, &ints(&[0])).unwrap(), Some(false));
    }

    #[test]
    fn abs_pair_float_frontier() {
        let pr = builtins::example_2_1();
        let opts = DominationOptions { n_param_samples: 4, grid: 7, ..Default::default() };
        let c = check_domination(&pr, &ints(&[1]), Variant::Min, &opts).unwrap();
        assert!(c.holds_empirically, "{:?}", c.violations.first());
    }

    #[test]
    fn curved_float_frontier_is_dominated_between_samples() {
        // images between sampled frontier points sit below the chords
        let pr = builtins::exp_tradeoff();
        let pbar = pr.base_point.clone().unwrap().0;
        let opts = DominationOptions { n_param_samples: 4, ..Default::default() };
        let c = check_domination(&pr, &pbar, Variant::Min, &opts).unwrap();
        assert!(c.holds_empirically, "{:?}", c.violations.first());
    }

    #[test]
    fn bad_radius() {
        let pr = builtins::example_4_1();
        let opts = DominationOptions { radius: 0.0, ..Default::default() };
        assert!(matches!(check_domination(&pr, &ints(&[0, 0, 0]), Variant::Min, &opts), Err(Error::InvalidArgument(_))));
    }
}

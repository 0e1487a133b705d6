//! Brute-force checks that share no code path with the formulas: sampled
//! profile graphs, the Fréchet-normal quotient test, central differences and
//! pairwise efficiency.

use crate::coderivative::CoderivSet;
use crate::efficiency::{frontier_sample, weight_grid};
use crate::error::{Error, Result};
use crate::geometry::{OrderCone, PolyCone};
use crate::problem::{BasePoint, ObjectiveSpec, ParametricProblem};
use crate::scalar::{from_f64, is_zero_vec, round_f64, sub, to_f64, to_f64_vec, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const MAX_CLOUD: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpiOptions {
    pub delta: f64,
    /// Grid points per parameter axis.
    pub grid: usize,
    /// Multiples of each cone generator added to frontier points.
    pub cone_steps: usize,
    /// Simplex step count for the scalarization weights.
    pub weight_steps: usize,
}

impl Default for EpiOptions {
    fn default() -> Self {
        EpiOptions { delta: 0.1, grid: 9, cone_steps: 4, weight_steps: 20 }
    }
}

/// Finite sample of `gph(𝓕 + K)` in `P × Y` near `(p̄, ȳ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpiCloud {
    pub base: Vec<f64>,
    pub samples: Vec<Vec<f64>>,
    pub delta: f64,
    pub options: EpiOptions,
    /// Parameters skipped because no frontier point was found there.
    pub skipped: Vec<Vec<f64>>,
}

impl EpiCloud {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

fn axis(center: f64, delta: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![center];
    }
    (0..n).map(|i| center - delta + 2.0 * delta * i as f64 / (n - 1) as f64).collect()
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Samples the profile graph: parameters on a grid over the `δ`-cube, the
/// frontier at each by scalarization, frontier points shifted along the cone
/// generators, and every sample farther than `δ` pulled radially onto the
/// `δ`-sphere around the base point. The pull keeps samples inside the graph
/// because `gph(𝓕 + K) = gph(F + K)` is convex under domination.
pub fn epi_cloud(pr: &ParametricProblem, base: &BasePoint, opts: &EpiOptions) -> Result<EpiCloud> {
    let pf = to_f64_vec(&base.p);
    let mut center = pf.clone();
    center.extend(to_f64_vec(&base.y));
    let mut cloud =
        EpiCloud { base: center.clone(), samples: vec![center.clone()], delta: opts.delta, options: opts.clone(), skipped: vec![] };
    if opts.delta <= 0.0 {
        return Ok(cloud);
    }
    let axes: Vec<Vec<f64>> = pf.iter().map(|&c| axis(c, opts.delta, opts.grid)).collect();
    let mut params: Vec<Vec<f64>> = vec![vec![]];
    for a in &axes {
        params = params.iter().flat_map(|p| a.iter().map(move |v| [p.clone(), vec![*v]].concat())).collect();
    }
    let weights = weight_grid(&pr.cone, opts.weight_steps.max(1));
    let gens: Vec<Vec<f64>> = pr.cone.cone().rays().iter().map(|r| to_f64_vec(r)).collect();
    let per_p: Vec<Result<(Vec<f64>, Option<Vec<Vec<f64>>>)>> = params
        .par_iter()
        .map(|p| {
            let ps: Vec<Scalar> = p.iter().map(|&v| round_f64(v, 9)).collect();
            match frontier_sample(pr, &ps, &weights) {
                Ok(f) => Ok((p.clone(), Some(f.points.iter().map(|y| to_f64_vec(y)).collect()))),
                Err(Error::Infeasible(_)) | Err(Error::UnboundedScalarization(_)) | Err(Error::FrontierEmpty(_)) => {
                    Ok((p.clone(), None))
                }
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut raw = Vec::new();
    for r in per_p {
        let (p, front) = r?;
        let Some(front) = front else {
            cloud.skipped.push(p);
            continue;
        };
        for y in front {
            let mut pt = p.clone();
            pt.extend(&y);
            raw.push(pt.clone());
            for g in &gens {
                let scale = opts.delta / norm2(g).max(1e-300);
                for s in 1..=opts.cone_steps {
                    let t = scale * s as f64 / opts.cone_steps as f64;
                    let mut q = pt.clone();
                    for (i, gi) in g.iter().enumerate() {
                        q[p.len() + i] += t * gi;
                    }
                    raw.push(q);
                }
            }
        }
    }
    for mut u in raw {
        let d: Vec<f64> = u.iter().zip(&center).map(|(a, b)| a - b).collect();
        let n = norm2(&d);
        if n > opts.delta {
            u = center.iter().zip(&d).map(|(c, di)| c + di * opts.delta / n).collect();
        }
        cloud.samples.push(u);
    }
    cloud.samples.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    cloud.samples.dedup();
    if cloud.samples.len() > MAX_CLOUD {
        // keep an even subsample, always including the base point
        let step = cloud.samples.len().div_ceil(MAX_CLOUD);
        let mut kept: Vec<Vec<f64>> = cloud.samples.iter().step_by(step).cloned().collect();
        if !kept.contains(&center) {
            kept.push(center);
        }
        cloud.samples = kept;
    }
    Ok(cloud)
}

/// Which norm measures `u - ω̄` in the quotient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    #[default]
    Euclidean,
    /// `‖(p, y)‖ = ‖p‖ + ‖y‖` with Euclidean parts.
    Product,
}

fn measure(d: &[f64], np: usize, norm: Norm) -> f64 {
    match norm {
        Norm::Euclidean => norm2(d),
        Norm::Product => norm2(&d[..np]) + norm2(&d[np..]),
    }
}

/// `max ⟨v*, u - ω̄⟩ / ‖u - ω̄‖` over the samples `u ≠ ω̄` (0 for a lone base point).
pub fn frechet_quotient(cloud: &EpiCloud, v: &[f64], np: usize, norm: Norm) -> f64 {
    cloud
        .samples
        .iter()
        .filter_map(|u| {
            let d: Vec<f64> = u.iter().zip(&cloud.base).map(|(a, b)| a - b).collect();
            let n = measure(&d, np, norm);
            (n > 1e-14).then(|| d.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() / n)
        })
        .fold(0.0, f64::max)
}

/// `⟨v*, u - ω̄⟩ <= ε ‖u - ω̄‖` for every sample `u`. Passing is evidence
/// at the sampling resolution, not a proof.
pub fn frechet_normal_test(cloud: &EpiCloud, v: &[f64], eps: f64, np: usize, norm: Norm) -> bool {
    frechet_quotient(cloud, v, np, norm) <= eps
}

/// `(p*, -y*)` as a float vector in `P* × Y*`.
pub fn candidate(pstar: &[Scalar], ystar: &[Scalar]) -> Vec<f64> {
    let mut v = to_f64_vec(pstar);
    v.extend(ystar.iter().map(|a| -to_f64(a)));
    v
}

/// Points worth testing from a coderivative set: its vertices, each vertex
/// plus every recession ray, and plus/minus every lineality direction.
pub fn extreme_candidates(set: &CoderivSet) -> Vec<Vec<Scalar>> {
    let v = set.set.vrep();
    let mut out = v.points.clone();
    for p in &v.points {
        for r in &v.rays {
            out.push(crate::scalar::add(p, r));
        }
        for l in &v.lines {
            out.push(crate::scalar::add(p, l));
            out.push(sub(p, l));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleVerdict {
    #[serde(with = "crate::serde_scalar::vec")]
    pub pstar: Vec<Scalar>,
    pub quotient: f64,
    pub accepted: bool,
}

/// Tests every extreme candidate of `set` against the cloud.
pub fn verify_set(cloud: &EpiCloud, set: &CoderivSet, eps: f64, norm: Norm) -> Vec<OracleVerdict> {
    let np = set.dim();
    extreme_candidates(set)
        .into_iter()
        .map(|p| {
            let q = frechet_quotient(cloud, &candidate(&p, &set.ystar), np, norm);
            OracleVerdict { pstar: p, quotient: q, accepted: q <= eps }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrimination {
    pub tested: usize,
    pub rejected: usize,
}

/// Moves extreme candidates by `magnitude` in random unit directions and
/// counts how many of the resulting non-members the test rejects.
pub fn discrimination(
    cloud: &EpiCloud,
    set: &CoderivSet,
    count: usize,
    magnitude: f64,
    eps: f64,
    seed: u64,
) -> Discrimination {
    let np = set.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Discrimination { tested: 0, rejected: 0 };
    let cands = extreme_candidates(set);
    if cands.is_empty() || np == 0 {
        return out;
    }
    for i in 0..count {
        let base = &cands[i % cands.len()];
        let d: Vec<f64> = loop {
            let d: Vec<f64> = (0..np).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let n = norm2(&d);
            if n > 1e-3 && n <= 1.0 {
                break d.iter().map(|v| v / n).collect();
            }
        };
        let moved: Vec<Scalar> = base.iter().zip(&d).map(|(b, di)| b + round_f64(magnitude * di, 9)).collect();
        if set.contains(&moved) {
            continue;
        }
        out.tested += 1;
        if !frechet_normal_test(cloud, &candidate(&moved, &set.ystar), eps, np, Norm::Euclidean) {
            out.rejected += 1;
        }
    }
    out
}

/// Central differences `(∇_p f, ∇_x f)` with step `h`.
pub fn finite_diff_gradient(obj: &ObjectiveSpec, p: &[f64], x: &[f64], h: f64) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let z: Vec<f64> = p.iter().chain(x).copied().collect();
    let np = p.len();
    let f = |z: &[f64]| obj.eval_f64(&z[..np], &z[np..]);
    let ny = f(&z).len();
    let mut cols = Vec::with_capacity(z.len());
    for k in 0..z.len() {
        let mut up = z.clone();
        let mut dn = z.clone();
        up[k] += h;
        dn[k] -= h;
        let (a, b) = (f(&up), f(&dn));
        cols.push((0..ny).map(|i| (a[i] - b[i]) / (2.0 * h)).collect::<Vec<f64>>());
    }
    let part = |r: std::ops::Range<usize>| (0..ny).map(|i| r.clone().map(|k| cols[k][i]).collect()).collect();
    (part(0..np), part(np..z.len()))
}

/// Pairwise reference for minimal points: `ā` is kept unless some `a` has
/// `ā - a ∈ K \ {0}`. Duplicates are not merged.
pub fn brute_force_min(cloud: &[Vec<Scalar>], k: &PolyCone) -> Vec<usize> {
    (0..cloud.len())
        .filter(|&i| {
            !cloud.iter().any(|a| {
                let d = sub(&cloud[i], a);
                !is_zero_vec(&d) && k.contains(&d)
            })
        })
        .collect()
}

/// Float version of [`brute_force_min`] for sampled clouds.
pub fn brute_force_min_f64(cloud: &[Vec<f64>], k: &OrderCone) -> Vec<usize> {
    let exact: Vec<Vec<Scalar>> = cloud.iter().map(|v| v.iter().map(|&a| from_f64(a)).collect()).collect();
    brute_force_min(&exact, k.cone())
}

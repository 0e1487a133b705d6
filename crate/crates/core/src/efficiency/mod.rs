//! Efficiency of finite point clouds with respect to an ordering cone.

pub mod frontier;

use crate::error::{Error, Result};
use crate::geometry::{lp, HPolyhedron, OrderCone, Row};
use crate::scalar::{dot, sub, zeros, Scalar};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub use frontier::{frontier_sample, default_weights, weight_grid, Frontier};

/// Which efficiency notion a computation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Min,
    Weak,
    Proper,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Min => "min",
            Variant::Weak => "weak",
            Variant::Proper => "proper",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(Variant::Min),
            "weak" | "wmin" => Ok(Variant::Weak),
            "proper" | "prmin" => Ok(Variant::Proper),
            _ => Err(Error::InvalidArgument(format!("unknown variant {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EfficiencyResult {
    pub variant: Variant,
    /// Indices into the input cloud (first occurrence of duplicated points).
    pub indices: Vec<usize>,
    /// For `Proper`, the scalarization weight certifying each index.
    pub certificates: Vec<Vec<Scalar>>,
}

/// Distinct points with the index of their first occurrence.
fn dedup(cloud: &[Vec<Scalar>]) -> Vec<(usize, &Vec<Scalar>)> {
    let mut seen = std::collections::BTreeSet::new();
    cloud.iter().enumerate().filter(|(_, a)| seen.insert(*a)).collect()
}

fn check_cloud(cloud: &[Vec<Scalar>], k: &OrderCone) -> Result<()> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    if cloud.iter().any(|a| a.len() != k.dim()) {
        return Err(Error::DimensionMismatch("cloud points and cone differ in dimension".into()));
    }
    Ok(())
}

/// `b` dominates `a` when `a - b ∈ K \ {0}`.
pub fn dominates(k: &OrderCone, b: &[Scalar], a: &[Scalar]) -> bool {
    let d = sub(a, b);
    !d.iter().all(Zero::is_zero) && k.contains(&d)
}

/// Pareto minimal points: `(A - ā) ∩ (-K \ {0}) = ∅`.
///
/// Points are visited in increasing order of `⟨w, a⟩` for a fixed `w ∈ int K*`.
/// A dominating point always has a strictly smaller value, and domination is
/// transitive, so each point is compared with the minimal points found so far.
pub fn min_points(cloud: &[Vec<Scalar>], k: &OrderCone) -> Result<EfficiencyResult> {
    check_cloud(cloud, k)?;
    let w = k.interior_dual_vector().ok_or(Error::ConeDegenerate)?;
    let mut order = dedup(cloud);
    order.sort_by_cached_key(|(_, a)| dot(&w, a));
    let mut minimal: Vec<(usize, &Vec<Scalar>)> = Vec::new();
    for (i, a) in order {
        if !minimal.iter().any(|(_, m)| dominates(k, m, a)) {
            minimal.push((i, a));
        }
    }
    let mut indices: Vec<usize> = minimal.into_iter().map(|(i, _)| i).collect();
    indices.sort_unstable();
    Ok(EfficiencyResult { variant: Variant::Min, indices, certificates: Vec::new() })
}

/// Weakly minimal points: `(A - ā) ∩ (-int K) = ∅`.
///
/// If some point strictly dominates `ā`, so does a minimal point below it
/// (`int K + K ⊆ int K`), so only minimal points are tested as dominators.
pub fn wmin_points(cloud: &[Vec<Scalar>], k: &OrderCone) -> Result<EfficiencyResult> {
    check_cloud(cloud, k)?;
    if !k.is_solid() {
        return Err(Error::ConeNotSolid);
    }
    let mins = min_points(cloud, k)?;
    let indices = dedup(cloud)
        .into_iter()
        .filter(|(_, a)| !mins.indices.iter().any(|&m| k.contains_interior(&sub(a, &cloud[m]))))
        .map(|(i, _)| i)
        .collect();
    Ok(EfficiencyResult { variant: Variant::Weak, indices, certificates: Vec::new() })
}

/// Properly minimal points, certified by a weight `w ∈ int K*` for which `ā`
/// minimizes `⟨w, ·⟩` over the cloud.
///
/// A normalized grid over the dual generators is tried first; otherwise an
/// exact LP searches `w = Σ μ_j g_j` with `μ_j >= 1`, which sweeps all of
/// `int K*` up to scaling.
pub fn prmin_points(cloud: &[Vec<Scalar>], k: &OrderCone) -> Result<EfficiencyResult> {
    check_cloud(cloud, k)?;
    if !k.dual_is_solid() {
        return Err(Error::ConeDegenerate);
    }
    let gens = k.dual().rays().to_vec();
    let grid: Vec<Vec<Scalar>> = weight_grid(k, 20)
        .into_iter()
        .filter(|w| k.dual().contains_interior(w))
        .collect();
    let pts = dedup(cloud);
    let mins = min_points(cloud, k)?;
    let mut indices = Vec::new();
    let mut certificates = Vec::new();
    for &i in &mins.indices {
        let a = &cloud[i];
        let optimal = |w: &Vec<Scalar>| {
            let v = dot(w, a);
            pts.iter().all(|(_, b)| dot(w, b) >= v)
        };
        if let Some(w) = grid.iter().find(|w| optimal(w)) {
            indices.push(i);
            certificates.push(w.clone());
            continue;
        }
        if let Some(w) = certificate_lp(&gens, a, &pts) {
            indices.push(i);
            certificates.push(w);
        }
    }
    Ok(EfficiencyResult { variant: Variant::Proper, indices, certificates })
}

fn certificate_lp(gens: &[Vec<Scalar>], a: &[Scalar], pts: &[(usize, &Vec<Scalar>)]) -> Option<Vec<Scalar>> {
    let r = gens.len();
    let mut rows = Vec::new();
    for j in 0..r {
        let mut c = zeros(r);
        c[j] = -Scalar::one();
        rows.push(Row::new(c, -Scalar::one()));
    }
    for (_, b) in pts {
        // Σ μ_j ⟨g_j, b - a⟩ >= 0
        let d = sub(b, a);
        let c: Vec<Scalar> = gens.iter().map(|g| -dot(g, &d)).collect();
        rows.push(Row::new(c, Scalar::zero()));
    }
    let poly = HPolyhedron::new(r, rows, Vec::new());
    let mu = lp::lex_min_point(&poly)?;
    let total: Scalar = mu.iter().sum();
    let mut w = zeros(a.len());
    for (m, g) in mu.iter().zip(gens) {
        for (x, y) in w.iter_mut().zip(g) {
            *x += m * y / &total;
        }
    }
    Some(w)
}

/// Convenience wrapper dispatching on the variant.
pub fn efficient_points(cloud: &[Vec<Scalar>], k: &OrderCone, variant: Variant) -> Result<EfficiencyResult> {
    match variant {
        Variant::Min => min_points(cloud, k),
        Variant::Weak => wmin_points(cloud, k),
        Variant::Proper => prmin_points(cloud, k),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ints, ratio};
    use num_traits::Signed;

    fn pts(v: &[&[i64]]) -> Vec<Vec<Scalar>> {
        v.iter().map(|p| ints(p)).collect()
    }

    #[test]
    fn square_corners() {
        let k = OrderCone::orthant(2);
        let c = pts(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(min_points(&c, &k).unwrap().indices, vec![0]);
        let pr = prmin_points(&c, &k).unwrap();
        assert_eq!(pr.indices, vec![0]);
        assert!(k.dual().contains_interior(&pr.certificates[0]));
        assert_eq!(wmin_points(&c, &k).unwrap().indices, vec![0, 1, 2]);
    }

    #[test]
    fn abs_pair_samples() {
        let k = OrderCone::orthant(2);
        let c = vec![ints(&[1, 1]), vec![ratio(3, 2), ratio(3, 2)], ints(&[2, 2])];
        assert_eq!(min_points(&c, &k).unwrap().indices, vec![0]);
    }

    #[test]
    fn weak_cases() {
        let k = OrderCone::orthant(2);
        let all = pts(&[&[0, 0], &[0, 1], &[1, 0]]);
        assert_eq!(wmin_points(&all, &k).unwrap().indices, vec![0, 1, 2]);
        assert_eq!(wmin_points(&pts(&[&[0, 0], &[1, 1]]), &k).unwrap().indices, vec![0]);
        let ray = OrderCone::from_generators(2, &[ints(&[1, 1])]).unwrap();
        assert_eq!(wmin_points(&all, &ray), Err(Error::ConeNotSolid));
    }

    #[test]
    fn singletons_duplicates_and_empty() {
        let k = OrderCone::orthant(2);
        assert_eq!(min_points(&pts(&[&[3, 4]]), &k).unwrap().indices, vec![0]);
        let dup = pts(&[&[1, 0], &[0, 1], &[1, 0]]);
        assert_eq!(min_points(&dup, &k).unwrap().indices, vec![0, 1]);
        assert_eq!(min_points(&[], &k), Err(Error::EmptyCloud));
    }

    #[test]
    fn proper_excludes_unsupported_points() {
        // (3,3) is minimal but no positive weight prefers it
        let k = OrderCone::orthant(2);
        let c = pts(&[&[0, 4], &[4, 0], &[3, 3]]);
        assert_eq!(min_points(&c, &k).unwrap().indices, vec![0, 1, 2]);
        assert_eq!(prmin_points(&c, &k).unwrap().indices, vec![0, 1]);
    }

    #[test]
    fn proper_needs_lp_refinement() {
        // only weights near (1, 1000) support (0, 0) here; the grid misses them
        let k = OrderCone::orthant(2);
        let c = pts(&[&[0, 0], &[-1000, 1], &[1000, -1]]);
        let pr = prmin_points(&c, &k).unwrap();
        assert!(pr.indices.contains(&0));
        let w = &pr.certificates[pr.indices.iter().position(|&i| i == 0).unwrap()];
        assert!(w.iter().all(|x| x.is_positive()));
    }
}

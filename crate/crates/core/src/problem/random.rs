//! Seeded random affine instances with an efficient base point.

use super::*;
use crate::efficiency::{default_weights, frontier_sample};
use crate::geometry::{lp, LpOutcome};
use crate::scalar::{dot, int, mat_t_vec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomShape {
    pub max_p: usize,
    pub max_x: usize,
    pub max_rows: usize,
}

impl Default for RandomShape {
    fn default() -> Self {
        RandomShape { max_p: 3, max_x: 3, max_rows: 4 }
    }
}

fn small(rng: &mut ChaCha8Rng, r: i64) -> Scalar {
    int(rng.gen_range(-r..=r))
}

/// Affine objective into `ℝ²` ordered by `ℝ²₊`, with at most `max_rows`
/// inequality rows. Rows are drawn to pass through or near a random point,
/// the draw is repeated until every default weight scalarizes boundedly at
/// `p̄`, and the base `x̄` minimizes `⟨(1, 1), f(p̄, ·)⟩`, so it is efficient.
pub fn random_affine(seed: u64, shape: RandomShape) -> ParametricProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let np = rng.gen_range(1..=shape.max_p);
        let nx = rng.gen_range(1..=shape.max_x);
        let m = rng.gen_range(1..=shape.max_rows);
        let pbar: Vec<Scalar> = (0..np).map(|_| small(&mut rng, 1)).collect();
        let x0: Vec<Scalar> = (0..nx).map(|_| small(&mut rng, 1)).collect();
        let rows: Vec<AffineRow> = (0..m)
            .map(|_| {
                let ap: Vec<Scalar> = (0..np).map(|_| small(&mut rng, 2)).collect();
                let ax: Vec<Scalar> = (0..nx).map(|_| small(&mut rng, 2)).collect();
                let slack = int(rng.gen_range(0..=1));
                let b = -(dot(&ap, &pbar) + dot(&ax, &x0)) - slack;
                AffineRow::le(ap, ax, b)
            })
            .collect();
        let objective = ObjectiveSpec::Affine {
            fp: (0..2).map(|_| (0..np).map(|_| small(&mut rng, 2)).collect()).collect(),
            fx: (0..2).map(|_| (0..nx).map(|_| small(&mut rng, 2)).collect()).collect(),
            c: (0..2).map(|_| small(&mut rng, 1)).collect(),
        };
        let gens = vec![crate::scalar::unit(2, 0), crate::scalar::unit(2, 1)];
        let Ok(pr) = ParametricProblem::new(Dims { p: np, x: nx, y: 2 }, ConeSpec::Generators(gens), objective, ConstraintSpec::Affine(rows))
        else {
            continue;
        };
        if frontier_sample(&pr, &pbar, &default_weights(&pr.cone)).is_err() {
            continue;
        }
        let ObjectiveSpec::Affine { fx, .. } = &pr.objective else { unreachable!() };
        let cost = mat_t_vec(fx, &[int(1), int(1)], nx);
        let Ok(c) = pr.feasible_polyhedron(&pbar) else { continue };
        let LpOutcome::Optimal { value, .. } = lp::minimize(&cost, &c) else { continue };
        let Some(xbar) = lp::lex_min_point(&c.with_eq(cost, value)) else { continue };
        let name = format!("random_affine_{seed:x}");
        return pr.with_base_point(pbar, xbar).expect("dimensions match").with_name(&name);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::check_solution_point;

    #[test]
    fn instances_are_reproducible_and_efficient() {
        for seed in 0..10 {
            let a = random_affine(seed, RandomShape::default());
            assert_eq!(a, random_affine(seed, RandomShape::default()));
            let (p, x) = a.base_point.clone().unwrap();
            check_solution_point(&a, &p, &x).unwrap();
            assert!(a.dims.p <= 3 && a.dims.x <= 3 && a.dims.y == 2);
        }
    }
}

//! Shipped problem instances.

use super::*;
use crate::scalar::{int, ints};

pub const NAMES: &[&str] = &[
    "example_2_1",
    "example_2_2",
    "example_4_1",
    "example_5_1",
    "ray_counterexample",
    "exp_tradeoff",
    "acq_failure",
];

pub fn by_name(name: &str) -> Option<ParametricProblem> {
    Some(match name {
        "example_2_1" => example_2_1(),
        "example_2_2" => example_2_2(),
        "example_4_1" => example_4_1(),
        "example_5_1" => example_5_1(),
        "ray_counterexample" => ray_counterexample(),
        "exp_tradeoff" => exp_tradeoff(),
        "acq_failure" => acq_failure(),
        _ => return None,
    })
}

fn orthant_spec(n: usize) -> ConeSpec {
    ConeSpec::Generators((0..n).map(|i| crate::scalar::unit(n, i)).collect())
}

/// `f = (|x|, |x|)`, `C(p) = {x : x >= |p|}`; the frontier `(|p|, |p|)` is not convex.
pub fn example_2_1() -> ParametricProblem {
    let rows = vec![
        AffineRow::le(ints(&[1]), ints(&[-1]), int(0)),
        AffineRow::le(ints(&[-1]), ints(&[-1]), int(0)),
    ];
    ParametricProblem::new(
        Dims { p: 1, x: 1, y: 2 },
        orthant_spec(2),
        ObjectiveSpec::Builtin(ObjectiveBuiltin::AbsPair),
        ConstraintSpec::Affine(rows),
    )
    .and_then(|pr| pr.with_base_point(ints(&[1]), ints(&[1])))
    .expect("valid builtin")
    .with_name("example_2_1")
}

/// `f = (x, 2x)`, `C(p) = {x : x >= p₁ + 2p₂ + p₃}`, based at the origin.
pub fn example_4_1() -> ParametricProblem {
    ParametricProblem::new(
        Dims { p: 3, x: 1, y: 2 },
        orthant_spec(2),
        ObjectiveSpec::Affine {
            fp: vec![ints(&[0, 0, 0]), ints(&[0, 0, 0])],
            fx: vec![ints(&[1]), ints(&[2])],
            c: ints(&[0, 0]),
        },
        ConstraintSpec::Affine(vec![AffineRow::le(ints(&[1, 2, 1]), ints(&[-1]), int(0))]),
    )
    .and_then(|pr| pr.with_base_point(ints(&[0, 0, 0]), ints(&[0])))
    .expect("valid builtin")
    .with_name("example_4_1")
}

/// Same data as [`example_4_1`]; the instance whose frontier map is linear.
pub fn example_2_2() -> ParametricProblem {
    example_4_1().with_name("example_2_2")
}

/// `f = (x₁ + 2, x₂ + 3)` under `-t x₁ - (1 - t) x₂ <= 0` for all `t ∈ [0, 1]`.
pub fn example_5_1() -> ParametricProblem {
    let family = SemiInfiniteFamily {
        ap: vec![vec![]],
        ax: vec![vec![int(0), int(-1)], vec![int(-1), int(1)]],
        b: vec![],
        t_lo: int(0),
        t_hi: int(1),
    };
    ParametricProblem::new(
        Dims { p: 1, x: 2, y: 2 },
        orthant_spec(2),
        ObjectiveSpec::Affine {
            fp: vec![ints(&[0]), ints(&[0])],
            fx: vec![ints(&[1, 0]), ints(&[0, 1])],
            c: ints(&[2, 3]),
        },
        ConstraintSpec::SemiInfinite { families: vec![family], rows: vec![] },
    )
    .and_then(|pr| pr.with_base_point(ints(&[0]), ints(&[0, 0])))
    .expect("valid builtin")
    .with_name("example_5_1")
}

/// `f = (-x, 0)` on `x >= 0`: every image point is dominated, so the frontier is empty.
pub fn ray_counterexample() -> ParametricProblem {
    ParametricProblem::new(
        Dims { p: 1, x: 1, y: 2 },
        orthant_spec(2),
        ObjectiveSpec::Affine {
            fp: vec![ints(&[0]), ints(&[0])],
            fx: vec![ints(&[-1]), ints(&[0])],
            c: ints(&[0, 0]),
        },
        ConstraintSpec::Affine(vec![AffineRow::le(ints(&[0]), ints(&[-1]), int(0))]),
    )
    .and_then(|pr| pr.with_base_point(ints(&[0]), ints(&[0])))
    .expect("valid builtin")
    .with_name("ray_counterexample")
}

/// `f = (exp(x - p), exp(-x))` on `-1 <= x <= 1`; smooth, non-polynomial.
pub fn exp_tradeoff() -> ParametricProblem {
    let rows = vec![
        AffineRow::le(ints(&[0]), ints(&[1]), int(-1)),
        AffineRow::le(ints(&[0]), ints(&[-1]), int(-1)),
    ];
    ParametricProblem::new(
        Dims { p: 1, x: 1, y: 2 },
        orthant_spec(2),
        ObjectiveSpec::Builtin(ObjectiveBuiltin::ExpTradeoff),
        ConstraintSpec::Affine(rows),
    )
    .and_then(|pr| pr.with_base_point(ints(&[0]), ints(&[0])))
    .expect("valid builtin")
    .with_name("exp_tradeoff")
}

/// `f = (x, -x)` under `x² <= 0`: the constraint gradient vanishes at the only
/// feasible point, so the Abadie qualification fails.
pub fn acq_failure() -> ParametricProblem {
    ParametricProblem::new(
        Dims { p: 1, x: 1, y: 2 },
        orthant_spec(2),
        ObjectiveSpec::Affine {
            fp: vec![ints(&[0]), ints(&[0])],
            fx: vec![ints(&[1]), ints(&[-1])],
            c: ints(&[0, 0]),
        },
        ConstraintSpec::Smooth(vec![SmoothConstraint::XSquared]),
    )
    .and_then(|pr| pr.with_base_point(ints(&[0]), ints(&[0])))
    .expect("valid builtin")
    .with_name("acq_failure")
}

use coderiv::coderivative::{profile_coderivative, scalarization_is_convex};
use coderiv::efficiency::{min_points, prmin_points, wmin_points};
use coderiv::geometry::{normal_cone, tangent_cone, HPolyhedron, OrderCone, PolyCone};
use coderiv::oracle::{brute_force_min, finite_diff_gradient};
use coderiv::problem::random::{random_affine, RandomShape};
use coderiv::problem::{parse_problem, to_document_string, BasePoint, ObjectiveSpec};
use coderiv::scalar::{dot, int, ratio, zeros, Scalar};
use proptest::prelude::*;
use std::collections::BTreeSet;

fn vec_of(dim: usize, r: i64) -> impl Strategy<Value = Vec<Scalar>> {
    prop::collection::vec((-r..=r).prop_map(int), dim)
}

fn cone_gens() -> impl Strategy<Value = (usize, Vec<Vec<Scalar>>)> {
    (2usize..=3).prop_flat_map(|d| (Just(d), prop::collection::vec(vec_of(d, 3), 1..=4)))
}

fn cloud() -> impl Strategy<Value = Vec<Vec<Scalar>>> {
    prop::collection::vec(vec_of(2, 5), 1..=60)
}

/// Box `[-3, 3]^n` cut by a few random rows that keep the origin feasible.
fn polytope() -> impl Strategy<Value = HPolyhedron> {
    (2usize..=3).prop_flat_map(|n| {
        prop::collection::vec((vec_of(n, 3), 0i64..=3), 0..=4).prop_map(move |rows| {
            let mut p = HPolyhedron::boxed(&vec![int(-3); n], &vec![int(3); n]);
            for (a, b) in rows {
                p = p.with_ineq(a, int(b));
            }
            p
        })
    })
}

fn symmetric(n: usize) -> impl Strategy<Value = Vec<Vec<Scalar>>> {
    prop::collection::vec(-2i64..=2, n * n).prop_map(move |v| {
        let mut m = vec![zeros(n); n];
        for i in 0..n {
            for j in i..n {
                m[i][j] = int(v[i * n + j]);
                m[j][i] = int(v[i * n + j]);
            }
        }
        m
    })
}

/// `BᵀB` for a random square `B`.
fn gram(n: usize) -> impl Strategy<Value = Vec<Vec<Scalar>>> {
    prop::collection::vec(-2i64..=2, n * n).prop_map(move |b| {
        let mut m = vec![zeros(n); n];
        for i in 0..n {
            for j in 0..n {
                m[i][j] = (0..n).map(|k| int(b[k * n + i] * b[k * n + j])).sum();
            }
        }
        m
    })
}

fn convex_quadratic() -> impl Strategy<Value = (ObjectiveSpec, usize, usize)> {
    (1usize..=2, 1usize..=2).prop_flat_map(|(np, nx)| {
        let n = np + nx;
        (prop::collection::vec(gram(n), 2), prop::collection::vec(vec_of(n, 2), 2)).prop_map(move |(q, linear)| {
            (ObjectiveSpec::Quadratic { q, linear, constant: zeros(2) }, np, nx)
        })
    })
}

fn quadratic() -> impl Strategy<Value = (ObjectiveSpec, usize, usize)> {
    (1usize..=2, 1usize..=2).prop_flat_map(|(np, nx)| {
        let n = np + nx;
        (prop::collection::vec(symmetric(n), 2), prop::collection::vec(vec_of(n, 2), 2)).prop_map(move |(q, linear)| {
            (ObjectiveSpec::Quadratic { q, linear, constant: zeros(2) }, np, nx)
        })
    })
}

fn index_set(cloud: &[Vec<Scalar>], idx: Vec<usize>) -> BTreeSet<Vec<Scalar>> {
    idx.into_iter().map(|i| cloud[i].clone()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polar_of_polar_is_the_cone((d, gens) in cone_gens()) {
        let c = PolyCone::from_generators(d, &gens, &[]);
        prop_assert!(c.polar().polar().set_eq(&c));
    }

    #[test]
    fn proper_within_min_within_weak(cl in cloud()) {
        let k = OrderCone::orthant(2);
        let pr = index_set(&cl, prmin_points(&cl, &k).unwrap().indices);
        let mn = index_set(&cl, min_points(&cl, &k).unwrap().indices);
        let wm = index_set(&cl, wmin_points(&cl, &k).unwrap().indices);
        prop_assert!(pr.is_subset(&mn));
        prop_assert!(mn.is_subset(&wm));
    }

    #[test]
    fn min_points_match_brute_force(cl in cloud(), skew in 0i64..=2) {
        let k = OrderCone::from_generators(2, &[vec![int(1), int(skew)], vec![int(0), int(1)]]).unwrap();
        let fast = index_set(&cl, min_points(&cl, &k).unwrap().indices);
        prop_assert_eq!(fast, index_set(&cl, brute_force_min(&cl, k.cone())));
    }

    #[test]
    fn normal_cone_is_negative_polar_of_tangent_cone(p in polytope(), pick in 0usize..64) {
        let verts = p.vertices();
        prop_assume!(!verts.is_empty());
        let v = &verts[pick % verts.len()];
        let n = normal_cone(&p, v).unwrap();
        prop_assert!(n.set_eq(&tangent_cone(&p, v).unwrap().negative_polar()));
        // v maximizes ⟨u, ·⟩ over the polytope for each generator u of N(v)
        for u in n.rays() {
            let best = verts.iter().map(|w| dot(u, w)).max().unwrap();
            prop_assert_eq!(dot(u, v), best);
        }
    }

    #[test]
    fn projection_agrees_with_fiber_feasibility(p in polytope(), q in vec_of(2, 4), half in any::<bool>()) {
        let q: Vec<Scalar> = q.iter().map(|v| if half { v * ratio(1, 2) } else { v.clone() }).collect();
        let proj = p.project(&[0, 1]);
        let mut fiber = p.clone();
        for (i, qi) in q.iter().enumerate() {
            let mut e = zeros(p.dim());
            e[i] = int(1);
            fiber = fiber.with_eq(e, qi.clone());
        }
        prop_assert_eq!(proj.is_member(&q), !fiber.is_empty());
    }

    #[test]
    fn convex_scalarizations_satisfy_midpoint_inequality(
        (obj, np, nx) in convex_quadratic(),
        w in prop::collection::vec((0i64..=3).prop_map(int), 2),
        a in vec_of(4, 6),
        b in vec_of(4, 6),
    ) {
        prop_assert!(scalarization_is_convex(&obj, &w));
        let n = np + nx;
        let g = |z: &[Scalar]| dot(&w, &obj.eval(&z[..np], &z[np..n]).unwrap());
        let mid: Vec<Scalar> = a[..n].iter().zip(&b[..n]).map(|(u, v)| (u + v) * ratio(1, 2)).collect();
        prop_assert!(g(&mid) * int(2) <= g(&a[..n]) + g(&b[..n]));
    }

    #[test]
    fn finite_differences_match_jacobian((obj, np, nx) in quadratic(), z in prop::collection::vec(-1.0f64..1.0, 4)) {
        let (p, x) = (&z[..np], &z[np..np + nx]);
        let (ap, ax) = obj.jacobian_f64(p, x);
        let (dp, dx) = finite_diff_gradient(&obj, p, x, 1e-5);
        for (r, s) in ap.iter().chain(&ax).zip(dp.iter().chain(&dx)) {
            for (u, v) in r.iter().zip(s) {
                prop_assert!((u - v).abs() <= 1e-6, "analytic {} vs difference {}", u, v);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn profile_coderivative_is_gated_and_homogeneous(seed in 0u64..10_000, y in vec_of(2, 3), t in 1i64..=4) {
        let pr = random_affine(seed, RandomShape::default());
        let (p, x) = pr.base_point.clone().unwrap();
        let b = BasePoint::feasible(&pr, &p, &x).unwrap();
        let s = profile_coderivative(&pr, &b, &y).unwrap();
        if !pr.cone.dual_contains(&y) {
            prop_assert!(s.is_empty());
        } else {
            let t = ratio(t, 2);
            let ty: Vec<Scalar> = y.iter().map(|v| v * &t).collect();
            let st = profile_coderivative(&pr, &b, &ty).unwrap();
            for v in s.set.vertices() {
                let tv: Vec<Scalar> = v.iter().map(|c| c * &t).collect();
                prop_assert!(st.contains(&tv));
            }
            for v in st.set.vertices() {
                let back: Vec<Scalar> = v.iter().map(|c| c / &t).collect();
                prop_assert!(s.contains(&back));
            }
        }
    }

    #[test]
    fn documents_round_trip(seed in 0u64..10_000) {
        let pr = random_affine(seed, RandomShape::default());
        let back = parse_problem(&to_document_string(&pr)).unwrap();
        prop_assert_eq!(back, pr);
    }
}

//! Pair, chain and sum rules on polyhedral set-valued maps, against the
//! normal cone of the assembled graph.

use coderiv::coderivative::calculus::{objective_profile_map, parameter_pair_map, profile_by_chain, profile_direct, sum_coderivative, PolyMap};
use coderiv::geometry::HPolyhedron;
use coderiv::problem::{builtins, BasePoint};
use coderiv::scalar::{format_vec, int, ints};

fn main() {
    let pr = builtins::example_4_1();
    let base = BasePoint::feasible(&pr, &ints(&[0, 0, 0]), &ints(&[0])).unwrap();
    for y in [[1, 0], [1, 1], [0, -1]] {
        let chain = profile_by_chain(&pr, &base, &ints(&y)).unwrap();
        let direct = profile_direct(&pr, &base, &ints(&y)).unwrap();
        let pts: Vec<String> = chain.vrep().points.iter().map(|v| format_vec(v)).collect();
        println!("y* = {y:?}: chain rule {{{}}}, equal to direct = {}", pts.join(", "), chain.set_eq(&direct));
    }
    let inner = parameter_pair_map(&pr).unwrap();
    println!("p -> ({{p}}, C(p)) has graph in dimension {}", inner.graph().dim());
    println!("f + K is polyhedral: {}", objective_profile_map(&pr).is_some());

    // H(x) = [x, x + 1] plus L(x) = {2x}, at (0, 1)
    let h = PolyMap::new(1, 1, HPolyhedron::from_ineqs(2, vec![(ints(&[1, -1]), int(0)), (ints(&[-1, 1]), int(1))])).unwrap();
    let l = PolyMap::affine(&vec![ints(&[2])], &ints(&[0]), 1);
    let sum = h.sum(&l).unwrap();
    for ys in [1, -1] {
        let by_rule = sum_coderivative(&h, &l, &ints(&[0]), &ints(&[1]), &ints(&[ys]), None).unwrap();
        let direct = sum.coderivative(&ints(&[0]), &ints(&[1]), &ints(&[ys])).unwrap();
        let v = by_rule.vrep();
        let show = |vs: &[Vec<coderiv::Scalar>]| if vs.is_empty() { "none".to_string() } else { vs.iter().map(|v| format_vec(v)).collect::<Vec<_>>().join(" ") };
        println!(
            "sum rule at y* = {ys}: points {}, rays {}, equal to direct = {}",
            show(&v.points),
            show(&v.rays),
            by_rule.set_eq(&direct)
        );
    }
}

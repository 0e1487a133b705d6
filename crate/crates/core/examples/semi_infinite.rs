//! Constraint systems indexed by t in an interval: active parameters, the
//! multiplier cone, and the frontier coderivative built from it.

use coderiv::constraints::{active_set, bcq_check, bcq_cone, semi_infinite_frontier_coderivative};
use coderiv::coderivative::coderivative_constraint;
use coderiv::domination::{check_domination, DominationOptions};
use coderiv::efficiency::Variant;
use coderiv::problem::{builtins, BasePoint};
use coderiv::scalar::{format_vec, ints};

fn main() {
    let pr = builtins::example_5_1();
    let base = BasePoint::feasible(&pr, &ints(&[0]), &ints(&[0, 0])).unwrap();

    let act = active_set(&pr, &base).unwrap();
    for f in &act.families {
        let iv: Vec<String> = f.intervals.iter().map(|i| format_vec(i)).collect();
        println!("family {}: active on {}", f.family, iv.join(" "));
    }
    println!("basic qualification holds: {}", bcq_check(&pr, &base).unwrap());
    let cone = bcq_cone(&pr, &base).unwrap();
    let rays: Vec<String> = cone.rays().iter().map(|r| format_vec(r)).collect();
    println!("multiplier cone rays {}, {} lines", rays.join(" "), cone.lines().len());

    for xs in [[1, 2], [0, 0], [-1, 1]] {
        let d = coderivative_constraint(&pr, &base, &ints(&xs)).unwrap();
        println!("D*C at x* = {xs:?}: {}", if d.is_empty() { "empty".into() } else { d.as_point().map_or("a polyhedron".into(), |p| format!("{{{}}}", format_vec(&p))) });
    }

    let cert = check_domination(&pr, &base.p, Variant::Min, &DominationOptions::default()).unwrap();
    for ys in [[1, 0], [2, 5]] {
        let s = semi_infinite_frontier_coderivative(&pr, &base, &ints(&ys), &cert).unwrap();
        println!("frontier coderivative at y* = {ys:?}: {}", s.as_point().map_or("a polyhedron".into(), |p| format!("{{{}}}", format_vec(&p))));
    }
}

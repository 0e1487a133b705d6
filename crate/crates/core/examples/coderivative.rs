//! Coderivative of the frontier map at a base point, with its justification.

use coderiv::coderivative::{frontier_coderivative, qualification_check};
use coderiv::domination::{check_domination, DominationOptions};
use coderiv::efficiency::Variant;
use coderiv::problem::{builtins, BasePoint};
use coderiv::scalar::{format_vec, ints};

fn main() {
    let pr = builtins::example_4_1();
    let base = BasePoint::feasible(&pr, &ints(&[0, 0, 0]), &ints(&[0])).unwrap();

    let q = qualification_check(&pr, &base).unwrap();
    println!("qualification conditions hold: {}", q.holds());

    let cert = check_domination(&pr, &base.p, Variant::Min, &DominationOptions::default()).unwrap();
    println!(
        "domination sampled at {} parameters, {} images: holds = {}",
        cert.n_param_samples, cert.n_image_samples, cert.holds_empirically
    );

    for y in [[1, 0], [0, 1], [1, 1], [2, 3], [-1, 0]] {
        let set = frontier_coderivative(&pr, &base, &ints(&y), Variant::Min, &cert).unwrap();
        match set.as_point() {
            Some(p) => println!("y* = {y:?} -> {{{}}} ({})", format_vec(&p), set.provenance.describe()),
            None if set.is_empty() => println!("y* = {y:?} -> empty ({})", set.provenance.describe()),
            None => println!("y* = {y:?} -> polyhedron with {} inequalities", set.set.ineqs().len()),
        }
    }
}

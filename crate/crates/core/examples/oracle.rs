//! The sampling oracle: a cloud from the graph near the base point, and
//! Fréchet quotients of candidate normals against it.

use coderiv::coderivative::profile_coderivative;
use coderiv::oracle::{candidate, discrimination, epi_cloud, frechet_quotient, verify_set, EpiOptions, Norm};
use coderiv::problem::{builtins, BasePoint};
use coderiv::scalar::{format_vec, ints};

fn main() {
    let pr = builtins::example_4_1();
    let base = BasePoint::feasible(&pr, &ints(&[0, 0, 0]), &ints(&[0])).unwrap();
    let cloud = epi_cloud(&pr, &base, &EpiOptions { grid: 5, ..EpiOptions::default() }).unwrap();
    println!("cloud: {} samples within distance {}", cloud.len(), cloud.delta);

    let y = ints(&[1, 1]);
    for p in [[3, 6, 3], [3, 6, 4], [0, 0, 0]] {
        let q = frechet_quotient(&cloud, &candidate(&ints(&p), &y), 3, Norm::Euclidean);
        println!("p* = {p:?}: quotient {q:.3e}");
    }

    let set = profile_coderivative(&pr, &base, &y).unwrap();
    for v in verify_set(&cloud, &set, 1e-3, Norm::Euclidean) {
        println!("formula point {} accepted: {}", format_vec(&v.pstar), v.accepted);
    }
    let d = discrimination(&cloud, &set, 20, 0.1, 1e-3, 7);
    println!("perturbed non-members rejected: {}/{}", d.rejected, d.tested);
}

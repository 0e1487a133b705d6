//! Weighted-sum samples of the frontier and their min / weak / proper classification.

use coderiv::efficiency::{default_weights, efficient_points, frontier_sample, Variant};
use coderiv::problem::builtins;
use coderiv::scalar::{format_vec, ints, ratio};

fn main() {
    let pr = builtins::example_4_1();
    for p in [ints(&[1, 0, 0]), ints(&[0, 1, 0]), vec![ratio(1, 2), ratio(-1, 4), ratio(0, 1)]] {
        let f = frontier_sample(&pr, &p, &default_weights(&pr.cone)).unwrap();
        let pts: Vec<String> = f.points.iter().map(|v| format_vec(v)).collect();
        println!("example_4_1 at p = {}: frontier {}", format_vec(&p), pts.join(" "));
    }

    // a float-path objective: the frontier is a curve, sampled by 21 weights
    let pr = builtins::exp_tradeoff();
    let f = frontier_sample(&pr, &ints(&[0]), &default_weights(&pr.cone)).unwrap();
    println!("exp_tradeoff: {} sampled frontier points (exact: {})", f.points.len(), f.exact);

    // classification of an arbitrary cloud under the orthant
    let cloud = vec![ints(&[0, 3]), ints(&[1, 1]), ints(&[3, 0]), ints(&[2, 2]), ints(&[0, 4]), ints(&[3, 3])];
    for v in [Variant::Min, Variant::Weak, Variant::Proper] {
        let r = efficient_points(&cloud, &builtins::example_4_1().cone, v).unwrap();
        let pts: Vec<String> = r.indices.iter().map(|&i| format_vec(&cloud[i])).collect();
        println!("{:>6}: {}", v.name(), pts.join(" "));
    }
}

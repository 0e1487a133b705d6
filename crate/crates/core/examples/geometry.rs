//! Exact polyhedra and cones: projection, vertices, polars, tangent and normal cones.

use coderiv::geometry::{normal_cone, tangent_cone, HPolyhedron, PolyCone};
use coderiv::scalar::{format_vec as show, int, ints};

fn main() {
    // triangle x >= 0, y >= 0, x + y <= 2 lifted to z = x - y
    let tri = HPolyhedron::from_ineqs(
        3,
        vec![(ints(&[-1, 0, 0]), int(0)), (ints(&[0, -1, 0]), int(0)), (ints(&[1, 1, 0]), int(2))],
    )
    .with_eq(ints(&[1, -1, -1]), int(0));
    println!("vertices:");
    for v in tri.vertices() {
        println!("  {}", show(&v));
    }

    let shadow = tri.project(&[0, 2]);
    println!("projection onto (x, z) has {} inequalities", shadow.canonical().ineqs().len());

    let apex = ints(&[0, 0, 0]);
    let t = tangent_cone(&tri, &apex).unwrap();
    let n = normal_cone(&tri, &apex).unwrap();
    println!("tangent cone rays at the origin: {}", t.rays().iter().map(|r| show(r)).collect::<Vec<_>>().join(" "));
    println!("normal cone = negative polar of tangent cone: {}", n.set_eq(&t.negative_polar()));

    let k = PolyCone::from_generators(2, &[ints(&[2, 1]), ints(&[1, 2])], &[]);
    println!("cone{{(2,1),(1,2)}}: dual cone rays {}", k.polar().rays().iter().map(|r| show(r)).collect::<Vec<_>>().join(" "));
    println!("dual of the dual is the cone: {}", k.polar().polar().set_eq(&k));
}

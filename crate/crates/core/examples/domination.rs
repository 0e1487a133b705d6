//! Sampling certificates for "every image is dominated by the frontier".

use coderiv::domination::{check_domination, DominationOptions};
use coderiv::efficiency::Variant;
use coderiv::problem::builtins;
use coderiv::scalar::format_vec;

fn main() {
    let opts = DominationOptions::default();
    for name in ["example_4_1", "example_5_1", "exp_tradeoff", "ray_counterexample"] {
        let pr = builtins::by_name(name).unwrap();
        let p = pr.base_point.clone().unwrap().0;
        let c = check_domination(&pr, &p, Variant::Min, &opts).unwrap();
        println!(
            "{name:>18}: holds = {:5}, {} parameters, {} images, {} violations",
            c.holds_empirically,
            c.n_param_samples,
            c.n_image_samples,
            c.violations.len()
        );
        if let Some(v) = c.violations.first() {
            println!("{:>20}first witness p = {}, y = {}", "", format_vec(&v.p), format_vec(&v.y));
        }
    }
}

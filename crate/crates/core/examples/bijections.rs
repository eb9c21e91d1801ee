//! Certified piecewise-affine bijections, and the invariants they preserve.

use grothlin::euler::{chi_b, chi_g};
use grothlin::fixtures::bijections;

fn main() {
    for f in bijections() {
        let ok = f.map.certify_bijection(&f.source, &f.target).expect("dimensions agree");
        println!(
            "{:<24} bijective {ok:<5}  (chi_g, chi_b): ({}, {}) -> ({}, {})",
            f.name,
            chi_g(&f.source),
            chi_b(&f.source),
            chi_g(&f.target),
            chi_b(&f.target)
        );
    }

    // the same map as JSON, which is what the command-line tool reads
    let halve = &bijections()[0];
    println!("{}", halve.map.to_json(Some(&["x".to_string()])));
}

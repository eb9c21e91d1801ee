//! Sublevel sets of a distance function: beyond mu, their chi_g equals the
//! chi_b of the whole set.

use grothlin::euler::bd_check;
use grothlin::fixtures::bd_fixtures;
use grothlin::qe::QeConfig;

fn main() {
    for f in bd_fixtures() {
        let r = bd_check(&f.set, &f.graph, &QeConfig::from_env());
        println!("== {} ({})", f.name, if r.passed() { "stabilizes" } else { "fails" });
        print!("{}", r.render());
    }
}

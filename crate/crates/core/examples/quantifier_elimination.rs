//! Eliminating quantifiers from formulas over the ordered rationals.

use grothlin::formula::parse;
use grothlin::qe::{qe_with, QeConfig};

fn main() {
    let vars: Vec<String> = ["x", "z"].map(String::from).to_vec();
    for text in [
        "EX y. (x < y & y < 1)",
        "EX y. (y = x & 0 < y)",
        "EX y. (z < y & y < x)",
        "ALL y. (y < x | z <= y)",
        "EX y. EX w. (x < y & y < w & w < z)",
        "EX x. (0 < x & x < 0)",
    ] {
        let f = parse(text, &vars).expect("formula parses");
        let s = qe_with(&f, vars.len(), &QeConfig::unbounded()).expect("no cap");
        println!("{text:<40} ~> {}", s.display_with(&vars));
    }

    // a depth cap turns runaway eliminations into an error
    let f = parse("EX y. EX w. (x < y & y < w & w < z)", &vars).unwrap();
    match qe_with(&f, 2, &QeConfig::with_cap(1)) {
        Ok(s) => println!("with cap 1: {}", s.display_with(&vars)),
        Err(e) => println!("with cap 1: {e}"),
    }
}

//! Characteristics and class of a few sets, given as formulas.
//!
//! `cargo run --example eval_class -- "0 < x & x < y & y < 1"` evaluates
//! a formula of your own; its free variables are taken in order of appearance.

use grothlin::cell::decompose;
use grothlin::euler::class_of;
use grothlin::formula::{free_names, DefSet};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let formulas: Vec<String> = if args.is_empty() {
        ["0 < x & x < 1", "0 < x", "x = x", "0 <= x & x <= 1", "0 < x & 0 < y", "x = 0 | 1 < x"]
            .map(String::from)
            .to_vec()
    } else {
        args
    };
    for text in formulas {
        let vars = free_names(&text).expect("formula parses");
        let s = DefSet::parse(&text, &vars).expect("formula parses");
        let d = decompose(&s);
        println!(
            "{text:<28} chi_g {:>3}  chi_b {:>3}  class {}",
            d.chi_g(),
            d.chi_b(),
            class_of(&d)
        );
    }
}

//! Cylindrical cells of a set in the plane, with kinds and dimensions.

use grothlin::cell::{decompose_with, refine, DecomposeOptions};
use grothlin::formula::DefSet;

fn main() {
    let vars: Vec<String> = ["x", "y"].map(String::from).to_vec();
    let text = "0 < y & y < x & x < 1 | x = 2 & 0 <= y";
    let s = DefSet::parse(text, &vars).unwrap();
    let d = decompose_with(&s, DecomposeOptions::verified()).expect("certified");
    println!("{text}");
    for c in d.cells() {
        println!("  {:<4} dim {}  {}", c.kind().as_str(), c.dim(), c.display_with(&vars));
    }
    println!("chi_g = {}, chi_b = {}", d.chi_g(), d.chi_b());

    // cutting along y = 1/2 adds cells without changing either characteristic
    let cut = grothlin::formula::parse_term("y - 1/2", &vars).unwrap();
    let r = refine(&d, &[cut]);
    println!("after refinement: {} cells, chi_g = {}, chi_b = {}", r.cells().len(), r.chi_g(), r.chi_b());
    println!("first cell as JSON: {}", d.cells()[0].to_json(&vars));
}

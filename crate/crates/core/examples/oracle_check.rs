//! Cross-checks the cell decomposition against the hyperplane-arrangement
//! oracle on the bundled corpus.

use grothlin::cell::decompose;
use grothlin::corpus::bundled;
use grothlin::oracle::{arrangement, oracle_chi, OracleCaps};

fn main() {
    let caps = OracleCaps::default();
    let mut agree = 0;
    let corpus = bundled();
    for e in &corpus {
        let d = decompose(&e.set);
        match oracle_chi(&e.set, caps) {
            Ok(pair) => {
                let faces = arrangement(&e.set, caps).map(|a| a.faces.len()).unwrap_or(0);
                let same = pair == (d.chi_g(), d.chi_b());
                agree += usize::from(same);
                println!("{:<24} cells {:>3}  faces {:>4}  {pair:?} {}", e.name, d.cells().len(), faces, if same { "ok" } else { "DIFFERS" });
            }
            Err(err) => println!("{:<24} skipped: {err}", e.name),
        }
    }
    println!("{agree} of {} corpus sets agree", corpus.len());
}

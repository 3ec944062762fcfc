// The degree-5 factor of the FE has several affine factorizations.

use std::error::Error;

use invforge::anf::{parse_forms, render_with, Names};
use invforge::lab::{explore_factorizations, mu};

pub fn run() -> Result<(), Box<dyn Error>> {
    let mu = mu();
    println!("mu = {}", render_with(&mu, Names::Forms));
    let via_bdg = ["C+H+1", "C+F+1", "F+H+1"].map(|s| parse_forms(s).unwrap());
    let via_chf = ["B+D+1", "D+G+1", "B+G+1"].map(|s| parse_forms(s).unwrap());

    let trees = explore_factorizations(&mu, 32, 0);
    let paths: Vec<_> = trees.iter().flat_map(|t| t.paths()).collect();
    println!("{} trees, {} paths", trees.len(), paths.len());
    for path in paths.iter().take(6) {
        let factors: Vec<String> = path.factors.iter().map(|l| format!("({})", render_with(l, Names::Forms))).collect();
        println!("  {}", factors.concat());
        assert_eq!(path.product(), mu);
    }
    let bdg = paths.iter().filter(|p| p.contains_product_of(&via_bdg)).count();
    let chf = paths.iter().filter(|p| p.contains_product_of(&via_chf)).count();
    println!("paths containing (C+H+1)(C+F+1)(F+H+1): {bdg}");
    println!("paths containing (B+D+1)(D+G+1)(B+G+1): {chf}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}

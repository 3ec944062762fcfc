// How often does a random round function keep the degree-7 invariant?

use std::error::Error;

use invforge::cipher::Wiring;
use invforge::lab::{solution_function, search_random_functions, theorem_invariant};

pub fn run() -> Result<(), Box<dyn Error>> {
    let w = Wiring::lzs_265_like();
    let report = search_random_functions(&w, &theorem_invariant(), 200, 42)?;
    println!(
        "{} hits in {} trials, 95% interval [{:.4}, {:.4}]",
        report.hits.len(),
        report.trials,
        report.interval.0,
        report.interval.1
    );
    for (i, f) in &report.hits {
        println!("  trial {i}: {}", f.to_hex());
    }
    println!("the known solution has truth table {}", solution_function().to_hex());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}

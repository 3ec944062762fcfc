// Every step of the degree-7 argument, and the second degree-7 invariant.

use std::error::Error;

use invforge::cipher::Wiring;
use invforge::lab::{alternate_invariant, solution_function, theorem_invariant, verify_invariant, verify_proof_chain};

pub fn run() -> Result<(), Box<dyn Error>> {
    let w = Wiring::lzs_265_like();
    let f = solution_function();
    let report = verify_proof_chain(&w, &f)?;
    println!("{report}");
    assert!(report.all_passed());

    // the two degree-7 invariants are one and the same polynomial
    println!("\nsecond invariant equals the first: {}", alternate_invariant() == theorem_invariant());
    let again = verify_invariant(&w, &f, &alternate_invariant())?;
    println!("its verdict: {}", if again.all_passed() { "ALL STEPS PASS" } else { "SOME STEPS FAIL" });

    let broken = Wiring::parse(&w.to_config().replace("D = 4,24", "D = 24,4"))?;
    match verify_proof_chain(&broken, &f) {
        Ok(_) => println!("unexpected: broken wiring accepted"),
        Err(e) => println!("broken wiring: {e}"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}

// The fundamental equation of the degree-7 invariant, three ways.

use std::error::Error;

use invforge::boolfun::BoolFun6;
use invforge::cipher::{RoundMode, RoundSystem, Wiring};
use invforge::fe::{build_fe, check_invariant_empirically, symbolic_fe, CoefficientSystem, DEFAULT_TERM_BUDGET};
use invforge::lab::{solution_function, theorem_invariant};

pub fn run() -> Result<(), Box<dyn Error>> {
    let w = Wiring::lzs_265_like();
    let p = theorem_invariant();
    println!("P has {} terms over {} state bits", p.len(), p.support().len());

    let placeholder = build_fe(&p, &RoundSystem::new(&w, RoundMode::Placeholder))?;
    println!("placeholder FE: {} terms, depends on {:?}", placeholder.fe.len(), placeholder.depends_on);

    let f = solution_function();
    let fe = build_fe(&p, &RoundSystem::new(&w, RoundMode::Expanded(f)))?;
    println!("with Z: FE = {} (zero: {})", fe.fe, fe.is_zero);
    let check = check_invariant_empirically(&p, &w, &f, 1 << 14, 1)?;
    println!("random states changing P: {} of {}", check.mismatches, check.trials);

    let other = BoolFun6::from_truth_table(0x9e37_79b9_7f4a_7c15);
    let fe = build_fe(&p, &RoundSystem::new(&w, RoundMode::Expanded(other)))?;
    println!("with another function: {} terms, zero: {}", fe.fe.len(), fe.is_zero);

    // keeping the 64 coefficients of Z as unknowns
    let symbolic = symbolic_fe(&p, &w, Some(DEFAULT_TERM_BUDGET))?;
    let system = CoefficientSystem::from_report(&symbolic);
    println!(
        "symbolic FE: {} terms, {} coefficient equations, linear: {}",
        symbolic.fe.len(),
        system.equations.len(),
        system.is_linear()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}

// The round function, its Möbius transform and its annihilators.

use std::error::Error;

use invforge::anf::parse;
use invforge::boolfun::{annihilators, argument_vars, is_absorber, mobius, random_boolfun, BoolFun6};
use invforge::lab::solution_function;

pub fn run() -> Result<(), Box<dyn Error>> {
    let z = solution_function();
    println!("Z = {}", z.render_anf());
    println!("truth table {}, weight {}, degree {}", z.to_hex(), z.weight(), z.degree());
    assert_eq!(mobius(mobius(z.truth_table())), z.truth_table());
    assert_eq!(BoolFun6::from_hex(&z.to_hex())?, z);

    // (Z+1) is annihilated by products of three affine factors
    let complement = z.to_polynomial().complement();
    for g in ["(f+e)(d+a)(b+c)", "(f+e+1)(d+a+1)(b+c+1)"] {
        let g = parse(g)?;
        println!("(Z+1) * {g} = {}", complement.mul(&g));
    }
    // equivalently Z absorbs g, since g * Z = g
    let g = parse("(f+e)(d+a)(b+c)")?;
    println!("(f+e)(d+a)(b+c) * Z = itself: {}", is_absorber(&g, &z.to_polynomial()));

    for d in 1..=3 {
        let space = annihilators(&complement, &argument_vars(), d)?;
        println!("annihilators of Z+1 up to degree {d}: dimension {}", space.dimension());
        for g in space.basis.iter().take(3) {
            println!("  {g}");
        }
    }

    // how common are low-degree annihilators of Z or Z+1 for random functions?
    let trials = 1000;
    for d in 2..=3 {
        let mut hits = 0;
        for seed in 0..trials {
            let f = random_boolfun(seed, None).to_polynomial();
            let any = [f.clone(), f.complement()]
                .iter()
                .any(|g| annihilators(g, &argument_vars(), d).is_ok_and(|s| s.dimension() > 0));
            hits += any as u32;
        }
        println!("random functions with an annihilator of degree <= {d} for Z or Z+1: {hits}/{trials}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}

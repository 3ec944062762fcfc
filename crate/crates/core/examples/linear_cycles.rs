// Periodic linear invariants of the key-independent part of a round.

use std::error::Error;

use invforge::cipher::Wiring;
use invforge::lincycle::{affine_of, linear_invariant_periods, orbit, weight_sequence, AffineRound, WeightMask};

pub fn run() -> Result<(), Box<dyn Error>> {
    // a rotation of 36 bits as three cycles of lengths 5, 12 and 19
    let mut perm: Vec<usize> = (0..36).collect();
    for (start, len) in [(0, 5), (5, 12), (17, 19)] {
        for i in 0..len {
            perm[start + i] = start + (i + 1) % len;
        }
    }
    let ar = AffineRound::from_permutation(&perm);
    for class in linear_invariant_periods(&ar, 240)? {
        println!("period {:>3}: {} new functionals", class.period, class.basis.len());
    }

    let w = Wiring::lzs_265_like();
    let ar = affine_of(&w);
    let classes = linear_invariant_periods(&ar, 64)?;
    println!("265-like wiring, invertible: {}", ar.is_invertible());
    for class in &classes {
        let u = &class.basis[0];
        let weights = weight_sequence(&orbit(&ar, u, 16), &WeightMask::Lowercase26);
        println!("  period {} (dim {}): weights {:?}", class.period, class.invariant_dim, weights);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}

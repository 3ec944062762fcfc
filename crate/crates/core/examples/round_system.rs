// A wiring, its round equations and the bit-level step.

use std::error::Error;

use invforge::anf::Instance;
use invforge::cipher::{step, CipherState, RoundBits, RoundMode, RoundSystem, Wiring};
use invforge::lab::solution_function;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CONFIG: &str = include_str!("../data/lzs-265-like.cfg");

pub fn run() -> Result<(), Box<dyn Error>> {
    let w = Wiring::parse(CONFIG)?;
    assert_eq!(w, Wiring::lzs_265_like());
    let report = w.validate();
    println!("{}", w.to_config().trim_end());
    for (h, ok) in &report.hypotheses {
        println!("  {:<32} {}", h.describe(), if *ok { "holds" } else { "fails" });
    }
    println!("  bijective shape: {}", report.invertible_shape);
    for inst in Instance::ALL {
        println!("  {} takes {:?}", inst.letter(), w.instance_args(inst));
    }

    let placeholder = RoundSystem::new(&w, RoundMode::Placeholder);
    for i in [1, 5, 9, 13, 17, 21, 25, 29, 33] {
        println!("  x{i:<2} <- {}", placeholder.output(i));
    }

    let f = solution_function();
    let expanded = RoundSystem::new(&w, RoundMode::Expanded(f));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut s = CipherState::random(&mut rng);
    for round in 1..=4 {
        let bits = RoundBits::random(&mut rng);
        let next = step(s, &w, &f, bits);
        assert_eq!(next, expanded.apply(s, bits)?);
        println!("round {round}: {:09x} -> {:09x}", s.bits(), next.bits());
        s = next;
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}

// Boolean polynomials: parsing, arithmetic, substitution and factors.

use std::error::Error;

use invforge::anf::{parse, render, Assignment, Polynomial, Substitution, VarId};

pub fn run() -> Result<(), Box<dyn Error>> {
    let p = parse("(a+b)(c+d) + ab")?;
    let q = parse("a + b + 1")?;
    println!("p        = {p}");
    println!("p + p    = {}", p.add(&p));
    println!("(a+b)^2  = {}", parse("a+b")?.mul(&parse("a+b")?));
    println!("p * q    = {}", p.mul(&q));
    println!("deg p = {}, support = {:?}", p.degree(), p.support());

    // letters name the state bits backwards: a = x36, z = x11, V = x1
    println!("a is {}, V is {}", VarId::state(36), VarId::state(1));
    println!("x36 + x1 renders as {}", render(&parse("x36 + x1")?));

    let at = Assignment::new().with(VarId::from_name("a").unwrap(), true).with(VarId::from_name("c").unwrap(), true);
    let partial = p.evaluate(&at);
    println!("p(a=1, c=1, rest unset) -> {partial:?}");
    let full = Assignment::total(parse("ac")?.terms().next().unwrap());
    println!("p at the point a=c=1, others 0: {}", p.evaluate(&full)? as u8);

    let shift = Substitution::single(VarId::from_name("a").unwrap(), parse("b+c")?);
    println!("p[a := b+c] = {}", p.substitute(&shift));

    // an affine factor splits off exactly
    let l = parse("a+b+1")?;
    let r = l.mul(&parse("cd + e")?);
    let quotient = r.factor_out(&l)?;
    println!("({l}) divides {r}: quotient {quotient}");
    assert_eq!(l.mul(&quotient), r);
    assert!(Polynomial::one().add(&Polynomial::one()).is_zero());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}

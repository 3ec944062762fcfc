//! Symbolic workbench for polynomial invariant attacks on the T-310 block
//! cipher family.
//!
//! The building blocks are:
//!
//! * [`anf`]: sparse Boolean polynomials with bitmask monomials,
//! * [`boolfun`]: 6-input Boolean functions, annihilators and absorbers,
//! * [`cipher`]: the long-term key wiring and the one-round ANF system,
//! * [`fe`]: construction and reduction of the Fundamental Equation,
//! * [`lab`]: the degree-7 product invariant, its proof chain and the
//!   factorization explorer,
//! * [`lincycle`]: periodic linear properties when the round function is zero.

pub mod anf;
pub mod gf2;
pub mod boolfun;
pub mod cipher;
pub mod fe;
pub mod lab;
pub mod lincycle;
pub mod cli;

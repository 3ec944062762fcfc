//! The degree-7 product invariant for wirings shaped like long-term key 265.
//!
//! Identities are checked at two levels. Over the abstract ring in the form
//! variables `A..H` (plus the placeholders `Y`, `W`), and over the state bits,
//! through the homomorphism of [`LinearFormBank`].

mod factor;
mod proof;
mod search;

pub use factor::{explore_factorizations, Factorization, FactorizationTree};
pub use proof::{verify_invariant, verify_proof_chain, HypothesisError, ProofReport, ProofStep, StepResult};
pub use search::{search_random_functions, wilson_interval, SearchReport};

use crate::anf::{parse_forms, Polynomial, Substitution, VarId};
use crate::boolfun::BoolFun6;

/// The round function for which both annihilator hypotheses hold.
pub const SOLUTION_FUNCTION: &str = "b+ac+bc+abc+bd+abd+bcd+abcd+e+ce+ace+bde+af+bf+abf+bcf+df+cdf+abcdf+ef+bef+cef+acef+bcef+bcdef+abcdef+1";

pub const THEOREM_INVARIANT: &str = "(A+B)(C+D)(D+F)(B+F)(E+F)(G+F)(G+H)";
pub const ALTERNATE_INVARIANT: &str = "(1+A+H)(B+H)(1+C+H)(D+H)(E+H)(1+F+H)(G+H)";
pub const MU: &str = "(G+F)(G+H)(C+D)(B+C)(D+F)";
pub const F_BRACKET: &str = "(A+B)(E+F)(B+F) + (A+H)(D+E)(B+F) + (G+D+1)(B+F)(H+F+1)(A+H) + (H+F+1)(G+D+1)(D+E) + 1";
/// `mu` as a multiple of a degree-4 polynomial absorbing `Y`.
pub const MU_VIA_BDG: &str = "(H(B+1)(D+1)(G+1) + (H+1)BDG)(C+H+1)(C+F+1)(F+H+1)";
/// `mu` as a multiple of a degree-4 polynomial absorbing `W`.
pub const MU_VIA_CHF: &str = "(G(C+1)(F+1)(H+1) + (G+1)CHF)(B+D+1)(D+G+1)(B+G+1)";
pub const FE_GROUPED: &str = "(G+H)(F+G)((A+B)(C+D)(D+F)(B+F)(E+F) + (B+C)(C+G)(D+Y+E)(Y+E+G)(H+W+A))";
pub const FE_BRACKET: &str =
    "(A+B)(E+F)(B+F) + (A+H)(D+E)(B+F) + Y(G+D+1)(B+F)(H+F+1)(A+H) + W(H+F+1)(G+D+1)(D+E) + YW";

pub fn solution_function() -> BoolFun6 {
    BoolFun6::parse_anf(SOLUTION_FUNCTION).expect("fixture parses")
}

pub(crate) fn forms(text: &str) -> Polynomial {
    parse_forms(text).expect("fixture parses")
}

/// Eight affine forms, each the sum of two state bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearFormBank {
    bits: [(usize, usize); 8],
}

impl Default for LinearFormBank {
    fn default() -> Self {
        Self::standard()
    }
}

impl LinearFormBank {
    pub const LETTERS: [char; 8] = ['A', 'B', 'C', 'D', 'E', 'F', 'G', 'H'];

    /// `A = x24+x28, B = x23+x27, C = x22+x26, D = x21+x25, E = x8+x12,
    /// F = x7+x11, G = x6+x10, H = x5+x9`.
    pub fn standard() -> Self {
        LinearFormBank {
            bits: [(24, 28), (23, 27), (22, 26), (21, 25), (8, 12), (7, 11), (6, 10), (5, 9)],
        }
    }

    /// The two state bits of form `k` (`0 => A`).
    pub fn bits(&self, k: usize) -> (usize, usize) {
        self.bits[k]
    }

    /// Form `k` over the state bits.
    pub fn form(&self, k: usize) -> Polynomial {
        let (a, b) = self.bits[k];
        Polynomial::linear([VarId::state(a), VarId::state(b)])
    }

    /// The homomorphism from the abstract ring to the state ring.
    pub fn homomorphism(&self) -> Substitution {
        (0..8).map(|k| (VarId::form(k), self.form(k))).collect()
    }

    pub fn expand(&self, p: &Polynomial) -> Polynomial {
        p.substitute(&self.homomorphism())
    }

    /// Images of `A..H` under one round when the theorem's wiring hypotheses
    /// hold: `A <- B <- C <- D`, `E <- F <- G <- H`, with `D -> E + Y` and
    /// `H -> A + W` closing the two chains.
    pub fn round_images() -> [Polynomial; 8] {
        ["B", "C", "D", "E+Y", "F", "G", "H", "A+W"].map(forms)
    }
}

/// The degree-7 invariant over `A..H`.
pub fn theorem_invariant_forms() -> Polynomial {
    forms(THEOREM_INVARIANT)
}

/// The degree-7 invariant over the state bits.
pub fn theorem_invariant() -> Polynomial {
    LinearFormBank::standard().expand(&theorem_invariant_forms())
}

pub fn alternate_invariant_forms() -> Polynomial {
    forms(ALTERNATE_INVARIANT)
}

pub fn alternate_invariant() -> Polynomial {
    LinearFormBank::standard().expand(&alternate_invariant_forms())
}

/// The degree-5 common factor of the FE.
pub fn mu() -> Polynomial {
    forms(MU)
}

/// The bracket left after absorbing `Y` and `W` into `mu`.
pub fn f_bracket() -> Polynomial {
    forms(F_BRACKET)
}

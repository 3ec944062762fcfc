//! Boolean functions of six inputs and annihilator spaces of small polynomials.

use std::fmt;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::anf::{self, BitIter, Monomial, ParseError, Polynomial, VarId};
use crate::gf2::{reduced_basis, BitMatrix, BitVector};

/// Largest variable set accepted by [`annihilators`].
pub const MAX_ANNIHILATOR_VARS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoolFunError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("variable {0} is not one of the formal arguments a..f")]
    NotAnArgument(String),
    #[error("invalid truth table {0:?}: expected 16 hexadecimal digits")]
    BadTruthTable(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnnihilatorError {
    #[error("degree bound {bound} exceeds the number of variables ({vars})")]
    DegreeBoundTooLarge { bound: usize, vars: usize },
    #[error("{0} variables requested; at most {MAX_ANNIHILATOR_VARS} are supported")]
    TooManyVariables(usize),
    #[error("polynomial uses {0}, which is not in the declared variable set")]
    UndeclaredVariable(String),
    #[error("variable {0} is declared twice")]
    DuplicateVariable(String),
}

const MOBIUS_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

/// Binary Möbius transform of a 6-variable table. It is an involution and maps
/// a truth table to its ANF coefficient vector and back.
pub fn mobius(table: u64) -> u64 {
    let mut t = table;
    for (i, mask) in MOBIUS_MASKS.iter().enumerate() {
        t ^= (t & mask) << (1 << i);
    }
    t
}

/// Möbius transform of a `2^n`-entry table stored as little-endian bits.
fn mobius_words(words: &mut [u64], n: usize) {
    let in_word = n.min(6);
    for (i, mask) in MOBIUS_MASKS.iter().enumerate().take(in_word) {
        for w in words.iter_mut() {
            *w ^= (*w & mask) << (1 << i);
        }
    }
    for i in 6..n {
        let stride = 1 << (i - 6);
        for block in (0..words.len()).step_by(2 * stride) {
            for k in block..block + stride {
                words[k + stride] ^= words[k];
            }
        }
    }
}

/// A Boolean function on six inputs `a..f`, kept both as a truth table and as
/// its ANF.
///
/// Bit `x` of the truth table is the value at the input where argument `i`
/// equals bit `i` of `x` (`a` is bit 0). Bit `k` of the ANF is the coefficient
/// of the monomial made of the arguments in `k`, so it is the coefficient
/// called `Zkk` in the symbolic expansion.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoolFun6 {
    truth_table: u64,
    anf: u64,
}

/// Optional restriction for [`random_boolfun`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    /// Exactly 32 ones in the truth table.
    Balanced,
}

impl BoolFun6 {
    pub fn from_truth_table(truth_table: u64) -> Self {
        BoolFun6 { truth_table, anf: mobius(truth_table) }
    }

    pub fn from_anf(anf: u64) -> Self {
        BoolFun6 { truth_table: mobius(anf), anf }
    }

    pub fn zero() -> Self {
        Self::from_truth_table(0)
    }

    pub fn one() -> Self {
        Self::from_truth_table(u64::MAX)
    }

    pub fn truth_table(&self) -> u64 {
        self.truth_table
    }

    pub fn anf(&self) -> u64 {
        self.anf
    }

    /// Value at input `x` (bit `i` of `x` is argument `i`).
    pub fn eval(&self, x: u8) -> bool {
        self.truth_table >> (x & 63) & 1 == 1
    }

    /// Value at `x` computed from the ANF coefficients.
    pub fn eval_anf(&self, x: u8) -> bool {
        BitIter(self.anf as u128).filter(|&k| k as u8 & !x == 0).count() % 2 == 1
    }

    pub fn weight(&self) -> u32 {
        self.truth_table.count_ones()
    }

    pub fn degree(&self) -> u32 {
        BitIter(self.anf as u128).map(|k| k.count_ones()).max().unwrap_or(0)
    }

    pub fn complement(&self) -> Self {
        Self::from_truth_table(!self.truth_table)
    }

    /// The ANF as a polynomial in the formal arguments `a..f`.
    pub fn to_polynomial(&self) -> Polynomial {
        Polynomial::from_monomials(BitIter(self.anf as u128).map(|k| Monomial::from_mask(k as u128)))
    }

    /// Reads the ANF text form with formal arguments `a..f`.
    pub fn parse_anf(text: &str) -> Result<Self, BoolFunError> {
        let p = anf::parse(text)?;
        Self::from_polynomial(&p)
    }

    /// Interprets a polynomial over `a..f` as a function of the six arguments.
    pub fn from_polynomial(p: &Polynomial) -> Result<Self, BoolFunError> {
        if let Some(v) = p.support().into_iter().find(|v| v.index() >= 6) {
            return Err(BoolFunError::NotAnArgument(v.name()));
        }
        let anf = p.terms().fold(0u64, |acc, m| acc | 1u64 << m.mask());
        Ok(Self::from_anf(anf))
    }

    pub fn render_anf(&self) -> String {
        anf::render(&self.to_polynomial())
    }

    /// Truth table as 16 hex digits, most significant entry first.
    pub fn to_hex(&self) -> String {
        format!("{:016x}", self.truth_table)
    }

    pub fn from_hex(text: &str) -> Result<Self, BoolFunError> {
        let digits = text.trim().trim_start_matches("0x");
        if digits.len() != 16 || !digits.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(BoolFunError::BadTruthTable(text.trim().to_string()));
        }
        Ok(Self::from_truth_table(u64::from_str_radix(digits, 16).unwrap()))
    }

    /// Reads a function file: either exactly 16 hex digits (truth table) or ANF
    /// text. `#` comments are allowed in both.
    pub fn from_file_contents(text: &str) -> Result<Self, BoolFunError> {
        let stripped: String = text
            .lines()
            .map(|l| l.split('#').next().unwrap())
            .collect::<String>()
            .split_whitespace()
            .collect();
        let digits = stripped.trim_start_matches("0x");
        if digits.len() == 16 && digits.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Self::from_hex(digits);
        }
        Self::parse_anf(text)
    }

    /// Substitutes the arguments with the given variables.
    pub fn instantiate(&self, args: &[VarId; 6]) -> Polynomial {
        Polynomial::from_monomials(BitIter(self.anf as u128).map(|k| {
            Monomial::from_vars(BitIter(k as u128).map(|i| args[i]))
        }))
    }

    /// Substitutes the arguments with arbitrary polynomials.
    pub fn compose(&self, args: &[Polynomial; 6]) -> Polynomial {
        let mut products = vec![Polynomial::one(); 64];
        let mut out = Polynomial::zero();
        for k in 0..64usize {
            if k > 0 {
                let low = k.trailing_zeros() as usize;
                products[k] = products[k & (k - 1)].mul(&args[low]);
            }
            if self.anf >> k & 1 == 1 {
                out += &products[k];
            }
        }
        out
    }

    /// `Z00 + Z01*a1 + Z02*a2 + ... + Z63*a1a2a3a4a5a6` for arguments `a1..a6`.
    pub fn symbolic_instance(args: &[VarId; 6]) -> Polynomial {
        Polynomial::from_monomials((0..64usize).map(|k| {
            Monomial::from_vars(
                std::iter::once(VarId::coefficient(k)).chain(BitIter(k as u128).map(|i| args[i])),
            )
        }))
    }

    /// Assignment of the coefficient variables `Z00..Z63` to this function's ANF.
    pub fn coefficient_substitution(&self) -> anf::Substitution {
        (0..64)
            .map(|k| (VarId::coefficient(k), Polynomial::constant(self.anf >> k & 1 == 1)))
            .collect()
    }
}

impl fmt::Debug for BoolFun6 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoolFun6({})", self.to_hex())
    }
}

impl fmt::Display for BoolFun6 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_anf())
    }
}

/// Deterministic pseudo-random function for a seed.
pub fn random_boolfun(seed: u64, constraint: Option<Constraint>) -> BoolFun6 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match constraint {
        None => BoolFun6::from_truth_table(rng.gen()),
        Some(Constraint::Balanced) => {
            let table = sample(&mut rng, 64, 32).iter().fold(0u64, |t, i| t | 1 << i);
            BoolFun6::from_truth_table(table)
        }
    }
}

/// A basis of the degree-bounded annihilator space of a polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnihilatorBasis {
    pub degree_bound: usize,
    pub variables: Vec<VarId>,
    /// Reduced row-echelon basis over the canonical monomial order.
    pub basis: Vec<Polynomial>,
}

impl AnnihilatorBasis {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Every non-zero element of the space. Only sensible for small dimensions.
    pub fn elements(&self) -> Vec<Polynomial> {
        assert!(self.dimension() < 24, "annihilator space too large to enumerate");
        (1u32..1 << self.dimension())
            .map(|sel| {
                BitIter(sel as u128).fold(Polynomial::zero(), |acc, i| acc.add(&self.basis[i]))
            })
            .collect()
    }
}

/// Truth table of `f` over `vars` (point bit `j` is `vars[j]`), as packed bits.
fn truth_table_over(f: &Polynomial, vars: &[VarId]) -> Vec<u64> {
    let n = vars.len();
    let mut words = vec![0u64; (1usize << n).div_ceil(64)];
    for m in f.terms() {
        let local = vars
            .iter()
            .enumerate()
            .filter(|(_, v)| m.contains(**v))
            .fold(0usize, |acc, (j, _)| acc | 1 << j);
        words[local / 64] ^= 1 << (local % 64);
    }
    mobius_words(&mut words, n);
    words
}

/// Computes a basis of `{g : deg g <= degree_bound, f * g = 0}` where `g` ranges
/// over polynomials in `vars`.
///
/// Works on the truth table of `f`: a candidate `g` annihilates `f` exactly
/// when it vanishes on every point where `f` is 1, which is a linear condition
/// on the coefficients of `g`.
pub fn annihilators(
    f: &Polynomial,
    vars: &[VarId],
    degree_bound: usize,
) -> Result<AnnihilatorBasis, AnnihilatorError> {
    let n = vars.len();
    if n > MAX_ANNIHILATOR_VARS {
        return Err(AnnihilatorError::TooManyVariables(n));
    }
    if degree_bound > n {
        return Err(AnnihilatorError::DegreeBoundTooLarge { bound: degree_bound, vars: n });
    }
    for (i, v) in vars.iter().enumerate() {
        if vars[..i].contains(v) {
            return Err(AnnihilatorError::DuplicateVariable(v.name()));
        }
    }
    if let Some(v) = f.support().into_iter().find(|v| !vars.contains(v)) {
        return Err(AnnihilatorError::UndeclaredVariable(v.name()));
    }

    let to_monomial = |local: usize| Monomial::from_vars(BitIter(local as u128).map(|j| vars[j]));
    let mut candidates: Vec<usize> =
        (0..1usize << n).filter(|k| k.count_ones() as usize <= degree_bound).collect();
    candidates.sort_by_key(|&k| to_monomial(k));
    let cols = candidates.len();

    // Echelon basis of the constraint rows, one row per support point of f.
    let table = truth_table_over(f, vars);
    let mut rows: Vec<BitVector> = Vec::new();
    let mut pivot_row: Vec<Option<usize>> = vec![None; cols];
    for x in 0..1usize << n {
        if table[x / 64] >> (x % 64) & 1 == 0 {
            continue;
        }
        let mut row = BitVector::zeros(cols);
        for (c, &k) in candidates.iter().enumerate() {
            if k & !x == 0 {
                row.set(c, true);
            }
        }
        while let Some(c) = row.first_one() {
            match pivot_row[c] {
                Some(r) => row.xor_assign(&rows[r]),
                None => {
                    pivot_row[c] = Some(rows.len());
                    rows.push(row);
                    break;
                }
            }
        }
        if rows.len() == cols {
            break;
        }
    }

    let kernel = if rows.is_empty() {
        (0..cols)
            .map(|c| {
                let mut v = BitVector::zeros(cols);
                v.set(c, true);
                v
            })
            .collect()
    } else {
        BitMatrix::from_rows(cols, &rows).kernel()
    };
    let basis = reduced_basis(&kernel, cols)
        .into_iter()
        .map(|v| Polynomial::from_monomials(v.ones().map(|c| to_monomial(candidates[c]))))
        .collect();
    Ok(AnnihilatorBasis { degree_bound, variables: vars.to_vec(), basis })
}

/// `f` absorbs `g` when `f * g = f`.
pub fn is_absorber(f: &Polynomial, g: &Polynomial) -> bool {
    f.mul(g) == *f
}

/// The formal arguments `a..f` as variables.
pub fn argument_vars() -> [VarId; 6] {
    std::array::from_fn(|i| VarId::from_index(i).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anf::parse;

    #[test]
    fn mobius_basics() {
        assert_eq!(mobius(0), 0);
        assert_eq!(mobius(u64::MAX), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let t: u64 = rng.gen();
            assert_eq!(mobius(mobius(t)), t);
        }
    }

    #[test]
    fn mobius_words_matches_word_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut words: Vec<u64> = (0..4).map(|_| rng.gen()).collect();
        let orig = words.clone();
        mobius_words(&mut words, 8);
        mobius_words(&mut words, 8);
        assert_eq!(words, orig);
        let mut one = vec![orig[0]];
        mobius_words(&mut one, 6);
        assert_eq!(one[0], mobius(orig[0]));
    }

    #[test]
    fn anf_and_table_agree() {
        for seed in 0..200 {
            let f = random_boolfun(seed, None);
            for x in 0..64u8 {
                assert_eq!(f.eval(x), f.eval_anf(x));
            }
        }
    }

    #[test]
    fn parse_small_functions() {
        assert_eq!(BoolFun6::parse_anf("1").unwrap(), BoolFun6::one());
        let a = BoolFun6::parse_anf("a").unwrap();
        assert_eq!(a.weight(), 32);
        assert_eq!(a.truth_table(), 0xaaaa_aaaa_aaaa_aaaa);
        assert!(matches!(BoolFun6::parse_anf("ag"), Err(BoolFunError::NotAnArgument(_))));
        let f = BoolFun6::parse_anf("b+ac+abcdef+1").unwrap();
        assert_eq!(BoolFun6::parse_anf(&f.render_anf()).unwrap(), f);
        assert_eq!(f.degree(), 6);
    }

    #[test]
    fn file_format_autodetect() {
        let f = BoolFun6::parse_anf("ab+c").unwrap();
        assert_eq!(BoolFun6::from_file_contents(&f.to_hex()).unwrap(), f);
        assert_eq!(BoolFun6::from_file_contents("# anf\nab + c\n").unwrap(), f);
        assert_eq!(BoolFun6::from_file_contents(&format!("0x{}\n", f.to_hex())).unwrap(), f);
        assert!(BoolFun6::from_hex("123").is_err());
    }

    #[test]
    fn random_is_deterministic_and_balanced() {
        assert_eq!(random_boolfun(42, None), random_boolfun(42, None));
        assert_ne!(random_boolfun(42, None), random_boolfun(43, None));
        for seed in 0..100 {
            assert_eq!(random_boolfun(seed, Some(Constraint::Balanced)).weight(), 32);
        }
    }

    #[test]
    fn instantiate_and_compose_agree() {
        let f = random_boolfun(5, None);
        let args: [VarId; 6] = [12, 3, 7, 20, 1, 9].map(VarId::state);
        let polys = args.map(Polynomial::var);
        assert_eq!(f.instantiate(&args), f.compose(&polys));
        assert_eq!(f.instantiate(&argument_vars()), f.to_polynomial());
    }

    #[test]
    fn instantiate_with_repeated_argument() {
        let f = BoolFun6::parse_anf("ab+a").unwrap();
        let x = VarId::state(3);
        let args = [x, x, VarId::state(4), VarId::state(5), VarId::state(6), VarId::state(7)];
        assert!(f.instantiate(&args).is_zero());
    }

    #[test]
    fn annihilators_of_single_variable() {
        let vars = [VarId::from_name("a").unwrap(), VarId::from_name("b").unwrap()];
        let basis = annihilators(&parse("a").unwrap(), &vars, 1).unwrap();
        assert_eq!(basis.dimension(), 1);
        assert_eq!(basis.basis[0], parse("a+1").unwrap());
        let basis = annihilators(&parse("a").unwrap(), &vars, 2).unwrap();
        assert_eq!(basis.dimension(), 2);
        for g in &basis.basis {
            assert!(parse("a").unwrap().mul(g).is_zero());
        }
    }

    #[test]
    fn annihilators_of_zero_are_everything() {
        let vars = argument_vars();
        let basis = annihilators(&Polynomial::zero(), &vars, 2).unwrap();
        assert_eq!(basis.dimension(), 1 + 6 + 15);
    }

    #[test]
    fn annihilator_errors() {
        let vars = argument_vars();
        assert!(matches!(
            annihilators(&parse("a").unwrap(), &vars[..2], 3),
            Err(AnnihilatorError::DegreeBoundTooLarge { .. })
        ));
        assert!(matches!(
            annihilators(&parse("g").unwrap(), &vars, 1),
            Err(AnnihilatorError::UndeclaredVariable(_))
        ));
        assert!(matches!(
            annihilators(&parse("a").unwrap(), &[vars[0], vars[0]], 1),
            Err(AnnihilatorError::DuplicateVariable(_))
        ));
        let many: Vec<VarId> = VarId::states().take(17).collect();
        assert!(matches!(
            annihilators(&Polynomial::zero(), &many, 1),
            Err(AnnihilatorError::TooManyVariables(17))
        ));
    }

    #[test]
    fn absorbers() {
        let f = parse("ab+c").unwrap();
        assert!(is_absorber(&f, &Polynomial::one()));
        assert!(!is_absorber(&parse("a").unwrap(), &parse("b").unwrap()));
        assert!(is_absorber(&parse("ab").unwrap(), &parse("a").unwrap()));
    }
}

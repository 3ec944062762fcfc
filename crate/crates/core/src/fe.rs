//! The Fundamental Equation `FE = P(x) + P(y(x))` of a candidate invariant.
//!
//! `P` is a round invariant exactly when the FE is the zero polynomial. The FE
//! is built in two passes: the round outputs are first substituted with the
//! round-function instances kept as placeholders `Z, Y, X, W`, then the
//! placeholders are expanded. Most of the cancellation happens in the first
//! pass, where the polynomials are still small.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::anf::{BitIter, Polynomial, TermBudgetExceeded, VarClass, VarId, UNIVERSE};
use crate::boolfun::BoolFun6;
use crate::cipher::{RoundMode, RoundSystem, Wiring};
use crate::gf2::{BitMatrix, BitVector};

/// Default monomial budget for symbolic expansion.
pub const DEFAULT_TERM_BUDGET: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeError {
    #[error("candidate invariant uses non-state variables: {}", .0.iter().map(|v| v.name()).collect::<Vec<_>>().join(", "))]
    NonStateVariables(Vec<VarId>),
    #[error(transparent)]
    Budget(#[from] TermBudgetExceeded),
}

#[derive(Debug, Clone)]
pub struct FeReport {
    pub fe: Polynomial,
    pub is_zero: bool,
    /// Non-state variables left in the FE, in index order.
    pub depends_on: Vec<VarId>,
    pub mode: RoundMode,
}

impl FeReport {
    fn new(fe: Polynomial, mode: RoundMode) -> Self {
        let depends_on = fe.support().into_iter().filter(|v| v.class() != VarClass::State).collect();
        FeReport { is_zero: fe.is_zero(), fe, depends_on, mode }
    }

    /// The FE after substituting some of its variables, e.g. the coefficients.
    pub fn specialize(&self, subst: &crate::anf::Substitution) -> FeReport {
        FeReport::new(self.fe.substitute(subst), self.mode)
    }
}

fn check_state_only(p: &Polynomial) -> Result<(), FeError> {
    let bad: Vec<VarId> = p.support().into_iter().filter(|v| v.class() != VarClass::State).collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(FeError::NonStateVariables(bad))
    }
}

/// Builds the FE of `p` against a round system without a term budget, except
/// in symbolic mode where [`DEFAULT_TERM_BUDGET`] applies.
pub fn build_fe(p: &Polynomial, rs: &RoundSystem) -> Result<FeReport, FeError> {
    let budget = match rs.mode() {
        RoundMode::Symbolic => Some(DEFAULT_TERM_BUDGET),
        _ => None,
    };
    build_fe_with_budget(p, rs, budget)
}

pub fn build_fe_with_budget(p: &Polynomial, rs: &RoundSystem, budget: Option<usize>) -> Result<FeReport, FeError> {
    check_state_only(p)?;
    let shifted = p.substitute_with_budget(&rs.placeholder_substitution(), budget)?;
    let image = p.add(&shifted);
    let fe = image.substitute_with_budget(&rs.instance_substitution(), budget)?;
    Ok(FeReport::new(fe, rs.mode()))
}

/// The FE with every round-function instance written over the 64 unknown ANF
/// coefficients `Z00..Z63`.
pub fn symbolic_fe(p: &Polynomial, w: &Wiring, budget: Option<usize>) -> Result<FeReport, FeError> {
    build_fe_with_budget(p, &RoundSystem::new(w, RoundMode::Symbolic), budget)
}

/// Whether a concrete function solves a symbolic FE.
pub fn check_candidate(report: &FeReport, f: &BoolFun6) -> bool {
    report.fe.substitute(&f.coefficient_substitution()).is_zero()
}

/// The conditions on `Z00..Z63` for a symbolic FE to vanish identically.
///
/// Writing `FE = sum_m m * c_m(Z)` over monomials `m` in the remaining
/// variables, the FE is zero for every input exactly when every `c_m` is.
#[derive(Debug, Clone)]
pub struct CoefficientSystem {
    pub equations: Vec<Polynomial>,
}

/// Solution set of a linear [`CoefficientSystem`]: `particular + span(kernel)`.
#[derive(Debug, Clone)]
pub struct LinearSolution {
    pub particular: BoolFun6,
    pub kernel: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("nonlinear in Zij: {0} equations contain products of coefficients")]
    Nonlinear(usize),
    #[error("the coefficient system is inconsistent")]
    Inconsistent,
}

impl CoefficientSystem {
    pub fn from_report(report: &FeReport) -> Self {
        let coeff_mask: u128 = (0..64).fold(0, |m, k| m | 1u128 << VarId::coefficient(k).index());
        let mut by_rest: std::collections::BTreeMap<u128, Vec<u128>> = Default::default();
        for t in report.fe.terms() {
            let t = t.mask();
            by_rest.entry(t & !coeff_mask).or_default().push(t & coeff_mask);
        }
        let equations = by_rest
            .into_values()
            .map(|c| Polynomial::from_monomials(c.into_iter().map(crate::anf::Monomial::from_mask)))
            .filter(|p| !p.is_zero())
            .collect();
        CoefficientSystem { equations }
    }

    pub fn is_linear(&self) -> bool {
        self.equations.iter().all(|e| e.degree() <= 1)
    }

    /// `A z = b` with one row per equation and column `k` for `Zk`.
    pub fn linear_system(&self) -> Result<(BitMatrix, BitVector), SolveError> {
        let nonlinear = self.equations.iter().filter(|e| e.degree() > 1).count();
        if nonlinear > 0 {
            return Err(SolveError::Nonlinear(nonlinear));
        }
        let mut a = BitMatrix::zeros(self.equations.len(), 64);
        let mut b = BitVector::zeros(self.equations.len());
        for (r, e) in self.equations.iter().enumerate() {
            for v in e.support() {
                a.set(r, v.coefficient_index().unwrap(), true);
            }
            b.set(r, e.has_constant_term());
        }
        Ok((a, b))
    }

    /// All functions solving a linear system, as an affine space of ANFs.
    pub fn solve(&self) -> Result<LinearSolution, SolveError> {
        let (a, b) = self.linear_system()?;
        let x = a.solve(&b).ok_or(SolveError::Inconsistent)?;
        Ok(LinearSolution {
            particular: BoolFun6::from_anf(x.to_u64()),
            kernel: a.kernel().iter().map(BitVector::to_u64).collect(),
        })
    }
}

/// Result of a randomized invariance check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmpiricalReport {
    pub trials: u64,
    pub rounds: usize,
    pub mismatches: u64,
}

/// Compares `P(x)` with `P(step(x))` on random states and round bits.
pub fn check_invariant_empirically(
    p: &Polynomial,
    w: &Wiring,
    f: &BoolFun6,
    trials: u64,
    seed: u64,
) -> Result<EmpiricalReport, FeError> {
    check_rounds(p, w, f, 1, trials, seed)
}

/// Runs `rounds` rounds with fresh random `F, K, L` per round and per trial,
/// counting trials where `P` ever differs from its starting value.
pub fn check_rounds(
    p: &Polynomial,
    w: &Wiring,
    f: &BoolFun6,
    rounds: usize,
    trials: u64,
    seed: u64,
) -> Result<EmpiricalReport, FeError> {
    check_state_only(p)?;
    let batches = trials.div_ceil(64);
    let mismatches = (0..batches)
        .into_par_iter()
        .map(|batch| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(batch);
            let lanes = if batch + 1 == batches && !trials.is_multiple_of(64) { (1u64 << (trials % 64)) - 1 } else { u64::MAX };
            let mut s = Sliced::random(&mut rng);
            let start = s.eval(p);
            let mut diff = 0u64;
            for _ in 0..rounds {
                s = s.step(w, f, &mut rng);
                diff |= s.eval(p) ^ start;
            }
            (diff & lanes).count_ones() as u64
        })
        .sum();
    Ok(EmpiricalReport { trials, rounds, mismatches })
}

/// 64 cipher states side by side, one per bit lane.
#[derive(Clone)]
struct Sliced {
    x: [u64; 36],
    fkl: [u64; 3],
}

impl Sliced {
    fn random(rng: &mut impl Rng) -> Self {
        Sliced { x: std::array::from_fn(|_| rng.gen()), fkl: [0; 3] }
    }

    fn column(&self, v: usize) -> u64 {
        match VarId::from_index(v).unwrap() {
            VarId::F => self.fkl[0],
            VarId::K => self.fkl[1],
            VarId::L => self.fkl[2],
            var => self.x[var.state_index().expect("state variable") - 1],
        }
    }

    fn eval(&self, p: &Polynomial) -> u64 {
        let mut cols = [0u64; UNIVERSE];
        for (i, c) in cols.iter_mut().enumerate().take(39) {
            *c = self.column(i);
        }
        p.raw_terms()
            .iter()
            .fold(0, |acc, &t| acc ^ BitIter(t).fold(u64::MAX, |m, v| m & cols[v]))
    }

    fn step(&self, w: &Wiring, f: &BoolFun6, rng: &mut impl Rng) -> Sliced {
        let [bf, bk, bl]: [u64; 3] = std::array::from_fn(|_| rng.gen());
        let x = |b: u8| if b == 0 { bk } else { self.x[b as usize - 1] };
        let xp = |i: usize| x(w.p(i));
        let xd = |i: usize| x(w.d(i));
        let anf = f.anf();
        let z = |args: [u64; 6]| {
            let mut prod = [u64::MAX; 64];
            let mut out = 0;
            for k in 0..64usize {
                if k > 0 {
                    prod[k] = prod[k & (k - 1)] & args[k.trailing_zeros() as usize];
                }
                if anf >> k & 1 == 1 {
                    out ^= prod[k];
                }
            }
            out
        };
        let z1 = z([bl, xp(1), xp(2), xp(3), xp(4), xp(5)]);
        let z2 = z(std::array::from_fn(|i| xp(7 + i)));
        let z3 = z(std::array::from_fn(|i| xp(14 + i)));
        let z4 = z(std::array::from_fn(|i| xp(21 + i)));

        let mut y = [0u64; 36];
        y[1..].copy_from_slice(&self.x[..35]);
        let mut acc = bf;
        let mut put = |out: usize, acc: u64, d: usize| y[out - 1] = acc ^ xd(d);
        put(33, acc, 9);
        acc ^= z1;
        put(29, acc, 8);
        acc ^= xp(6);
        put(25, acc, 7);
        acc ^= z2;
        put(21, acc, 6);
        acc ^= xp(13);
        put(17, acc, 5);
        acc ^= bl ^ z3;
        put(13, acc, 4);
        acc ^= xp(20);
        put(9, acc, 3);
        acc ^= z4;
        put(5, acc, 2);
        acc ^= xp(27);
        put(1, acc, 1);
        Sliced { x: y, fkl: [bf, bk, bl] }
    }
}

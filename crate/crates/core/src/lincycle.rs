//! The round with an all-zero round function is affine: `y = M x + F o_F +
//! K o_K + L o_L`. A linear functional `u` of the state satisfies
//! `u . y = (M^T u) . x + u . (offsets)`, so `u` is invariant over `k` rounds
//! for every choice of round bits exactly when `(M^T)^k u = u` and `u` is
//! orthogonal to `M^i o` for `i < k` and each offset `o`.

use thiserror::Error;

use crate::anf::{Polynomial, VarClass, VarId, STATE_BITS};
use crate::boolfun::BoolFun6;
use crate::cipher::{CipherState, RoundBits, RoundMode, RoundSystem, Wiring};
use crate::gf2::{reduced_basis, BitMatrix, BitVector};

/// Largest accepted `max_period`.
pub const MAX_PERIOD_LIMIT: usize = 1 << 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinCycleError {
    #[error("max period must be between 1 and {MAX_PERIOD_LIMIT}, got {0}")]
    MaxPeriod(usize),
    #[error("unknown mask {0:?}; expected lowercase26, all36 or a 9-digit hex bit mask")]
    Mask(String),
}

/// Linear part and round-bit offsets of the round.
///
/// Row `i` of `matrix` is output `y_{i+1}`, column `j` is input `x_{j+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineRound {
    pub matrix: BitMatrix,
    /// Offsets contributed by `F`, `K` and `L`.
    pub offsets: [BitVector; 3],
}

impl AffineRound {
    /// A pure permutation of the state bits: `y_{perm[j]+1} = x_{j+1}`.
    pub fn from_permutation(perm: &[usize]) -> Self {
        assert_eq!(perm.len(), STATE_BITS);
        let mut matrix = BitMatrix::zeros(STATE_BITS, STATE_BITS);
        for (j, &i) in perm.iter().enumerate() {
            matrix.set(i, j, true);
        }
        AffineRound { matrix, offsets: std::array::from_fn(|_| BitVector::zeros(STATE_BITS)) }
    }

    pub fn apply(&self, state: CipherState, bits: RoundBits) -> CipherState {
        let x = BitVector::from_u64(state.bits(), STATE_BITS);
        let mut y = self.matrix.mul_vec(&x);
        for (bit, o) in [bits.f, bits.k, bits.l].into_iter().zip(&self.offsets) {
            if bit {
                y.xor_assign(o);
            }
        }
        CipherState::new(y.to_u64())
    }

    /// `M^T u`: the functional `u` read one round earlier.
    pub fn pull_back(&self, u: &BitVector) -> BitVector {
        self.matrix.transpose().mul_vec(u)
    }

    pub fn is_invertible(&self) -> bool {
        self.matrix.rank() == STATE_BITS
    }
}

/// The affine round of a wiring with the zero round function.
pub fn affine_of(w: &Wiring) -> AffineRound {
    let rs = RoundSystem::new(w, RoundMode::Expanded(BoolFun6::zero()));
    let mut matrix = BitMatrix::zeros(STATE_BITS, STATE_BITS);
    let mut offsets: [BitVector; 3] = std::array::from_fn(|_| BitVector::zeros(STATE_BITS));
    for (i, y) in rs.outputs().iter().enumerate() {
        debug_assert!(y.degree() <= 1);
        for v in y.support() {
            match v.class() {
                VarClass::State => matrix.set(i, v.state_index().unwrap() - 1, true),
                _ if v == VarId::F => offsets[0].set(i, true),
                _ if v == VarId::K => offsets[1].set(i, true),
                _ if v == VarId::L => offsets[2].set(i, true),
                _ => unreachable!("zero function leaves only state and round bits"),
            }
        }
    }
    AffineRound { matrix, offsets }
}

/// Functionals whose minimal period is exactly `period`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodClass {
    pub period: usize,
    /// Dimension of all functionals invariant over `period` rounds.
    pub invariant_dim: usize,
    /// Basis of a complement of the functionals with a smaller period
    /// dividing `period`; each has minimal period `period`.
    pub basis: Vec<BitVector>,
}

/// Minimal periods of round-bit independent linear invariants up to
/// `max_period` rounds.
pub fn linear_invariant_periods(ar: &AffineRound, max_period: usize) -> Result<Vec<PeriodClass>, LinCycleError> {
    if max_period == 0 || max_period > MAX_PERIOD_LIMIT {
        return Err(LinCycleError::MaxPeriod(max_period));
    }
    let mt = ar.matrix.transpose();
    let identity = BitMatrix::identity(STATE_BITS);
    let mut power = identity.clone();
    // M^i o for the current i, and the span of all of them so far
    let mut moved: Vec<BitVector> = ar.offsets.to_vec();
    let mut orthogonal: Vec<BitVector> = Vec::new();
    let mut spaces: Vec<Vec<BitVector>> = vec![Vec::new()];
    let mut out = Vec::new();
    for k in 1..=max_period {
        power = power.mul(&mt);
        let mut constraints = orthogonal.clone();
        constraints.extend(moved.iter().cloned());
        orthogonal = reduced_basis(&constraints, STATE_BITS);
        moved = moved.iter().map(|o| ar.matrix.mul_vec(o)).collect();

        let fixed = power.add(&identity);
        let mut rows: Vec<BitVector> = (0..STATE_BITS).map(|r| fixed.row(r)).collect();
        rows.extend(orthogonal.iter().cloned());
        let space = reduced_basis(&BitMatrix::from_rows(STATE_BITS, &rows).kernel(), STATE_BITS);

        let older: Vec<BitVector> =
            (1..k).filter(|d| k % d == 0).flat_map(|d| spaces[d].iter().cloned()).collect();
        let mut span = reduced_basis(&older, STATE_BITS);
        let mut basis = Vec::new();
        for u in &space {
            let mut extended = span.clone();
            extended.push(u.clone());
            let extended = reduced_basis(&extended, STATE_BITS);
            if extended.len() > span.len() {
                span = extended;
                basis.push(u.clone());
            }
        }
        if !basis.is_empty() {
            out.push(PeriodClass { period: k, invariant_dim: space.len(), basis });
        }
        spaces.push(space);
    }
    Ok(out)
}

/// `u, M^T u, (M^T)^2 u, ...`, `len` entries.
pub fn orbit(ar: &AffineRound, u: &BitVector, len: usize) -> Vec<BitVector> {
    let mut out = Vec::with_capacity(len);
    let mut cur = u.clone();
    for _ in 0..len {
        out.push(cur.clone());
        cur = ar.pull_back(&cur);
    }
    out
}

/// Which state bits count towards a functional's weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightMask {
    /// `x11..x36`, the bits named by lowercase letters.
    Lowercase26,
    All36,
    /// Bit `i - 1` selects `x_i`.
    Custom(u64),
}

impl WeightMask {
    pub fn bits(&self) -> u64 {
        match self {
            WeightMask::Lowercase26 => ((1u64 << 26) - 1) << 10,
            WeightMask::All36 => (1u64 << STATE_BITS) - 1,
            WeightMask::Custom(m) => *m,
        }
    }

    pub fn parse(text: &str) -> Result<Self, LinCycleError> {
        match text {
            "lowercase26" => Ok(WeightMask::Lowercase26),
            "all36" => Ok(WeightMask::All36),
            hex => u64::from_str_radix(hex.trim_start_matches("0x"), 16)
                .ok()
                .filter(|m| m >> STATE_BITS == 0)
                .map(WeightMask::Custom)
                .ok_or_else(|| LinCycleError::Mask(text.into())),
        }
    }
}

pub fn weight_sequence(orbit: &[BitVector], mask: &WeightMask) -> Vec<u32> {
    orbit.iter().map(|u| (u.to_u64() & mask.bits()).count_ones()).collect()
}

/// The functional `u` as a linear polynomial in the state bits.
pub fn functional_polynomial(u: &BitVector) -> Polynomial {
    Polynomial::linear(u.ones().map(|j| VarId::state(j + 1)))
}

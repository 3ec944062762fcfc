//! Long-term key wiring and the one-round ANF system of the cipher.
//!
//! One round keeps 27 bits (`y_{i+1} = x_i` for `i` not a multiple of 4) and
//! recomputes the nine bits `y1, y5, ..., y33` as a running XOR of the public
//! bit `F`, the key bit `L = S2`, four instances of the round function and the
//! wired inputs selected by the `D` and `P` boxes. `D(i) = 0` selects the key
//! bit `K = S1` instead of a state bit.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::anf::{Assignment, EvalError, Instance, Polynomial, Substitution, VarId, STATE_BITS};
use crate::boolfun::BoolFun6;

pub const D_LEN: usize = 9;
pub const P_LEN: usize = 27;

/// Indices of the freshly computed outputs, in computation order.
pub const NONTRIVIAL_OUTPUTS: [usize; 9] = [33, 29, 25, 21, 17, 13, 9, 5, 1];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WiringError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{table} has {found} entries, expected {expected}")]
    WrongLength { table: char, expected: usize, found: usize },
    #[error("{table}({position}) = {value} is out of range {min}..={max}")]
    OutOfRange { table: char, position: usize, value: i64, min: u8, max: u8 },
    #[error("missing {0} table")]
    Missing(char),
}

/// A long-term key: `D: {1..9} -> {0..36}` and `P: {1..27} -> {1..36}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Wiring {
    d: [u8; D_LEN],
    p: [u8; P_LEN],
}

/// The wiring constraints assumed by the degree-7 product invariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremHypothesis {
    /// `{D(2), D(3)} = {24, 28}`
    D23,
    /// `{D(6), D(7)} = {8, 12}`
    D67,
    /// inputs of `Y` are bits `27, 6, 10, 23, 21, 25` in order
    YInputs,
    /// inputs of `W` are bits `26, 9, 5, 22, 7, 11` in order
    WInputs,
}

impl TheoremHypothesis {
    pub const ALL: [TheoremHypothesis; 4] = [
        TheoremHypothesis::D23,
        TheoremHypothesis::D67,
        TheoremHypothesis::YInputs,
        TheoremHypothesis::WInputs,
    ];

    pub fn describe(self) -> &'static str {
        match self {
            TheoremHypothesis::D23 => "{D(2),D(3)} = {24,28}",
            TheoremHypothesis::D67 => "{D(6),D(7)} = {8,12}",
            TheoremHypothesis::YInputs => "P(7..12) = (27,6,10,23,21,25)",
            TheoremHypothesis::WInputs => "P(21..26) = (26,9,5,22,7,11)",
        }
    }
}

pub const THEOREM_Y_INPUTS: [u8; 6] = [27, 6, 10, 23, 21, 25];
pub const THEOREM_W_INPUTS: [u8; 6] = [26, 9, 5, 22, 7, 11];

/// Outcome of [`Wiring::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    /// Bits wired more than once through `P` (allowed, reported as warnings).
    pub duplicate_p: Vec<u8>,
    /// Repeated `D` values.
    pub duplicate_d: Vec<u8>,
    pub hypotheses: Vec<(TheoremHypothesis, bool)>,
    /// `D` is a permutation of the multiples of 4 and `P` avoids them, which
    /// makes the round a bijection for every function and round bits.
    pub invertible_shape: bool,
}

impl ValidationReport {
    pub fn theorem_applies(&self) -> bool {
        self.hypotheses.iter().all(|(_, holds)| *holds)
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        for b in &self.duplicate_p {
            w.push(format!("P wires bit {b} more than once"));
        }
        for b in &self.duplicate_d {
            w.push(format!("D wires bit {b} more than once"));
        }
        w
    }
}

fn duplicates(values: &[u8]) -> Vec<u8> {
    let mut seen = [0u8; 37];
    for &v in values {
        seen[v as usize] += 1;
    }
    (0..37u8).filter(|&v| seen[v as usize] > 1).collect()
}

impl Wiring {
    /// Builds a wiring from 1-based tables given as 0-based arrays.
    pub fn new(d: [u8; D_LEN], p: [u8; P_LEN]) -> Result<Wiring, WiringError> {
        for (i, &v) in d.iter().enumerate() {
            if v > 36 {
                return Err(WiringError::OutOfRange { table: 'D', position: i + 1, value: v as i64, min: 0, max: 36 });
            }
        }
        for (i, &v) in p.iter().enumerate() {
            if !(1..=36).contains(&v) {
                return Err(WiringError::OutOfRange { table: 'P', position: i + 1, value: v as i64, min: 1, max: 36 });
            }
        }
        Ok(Wiring { d, p })
    }

    /// `D(i)`, `1 <= i <= 9`.
    pub fn d(&self, i: usize) -> u8 {
        self.d[i - 1]
    }

    /// `P(i)`, `1 <= i <= 27`.
    pub fn p(&self, i: usize) -> u8 {
        self.p[i - 1]
    }

    pub fn d_table(&self) -> &[u8; D_LEN] {
        &self.d
    }

    pub fn p_table(&self) -> &[u8; P_LEN] {
        &self.p
    }

    /// Reads the line-oriented format:
    ///
    /// ```text
    /// # comment
    /// D = 4,24,28,16,20,8,12,32,36
    /// P = 1,2,3,...
    /// ```
    pub fn parse(text: &str) -> Result<Wiring, WiringError> {
        let mut d: Option<Vec<i64>> = None;
        let mut p: Option<Vec<i64>> = None;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |message: String| WiringError::Syntax { line: n + 1, message };
            let (key, values) = line
                .split_once('=')
                .ok_or_else(|| syntax(format!("expected `KEY = v1,v2,...`, got {line:?}")))?;
            let values = values
                .split(',')
                .map(|v| {
                    let v = v.trim();
                    v.parse::<i64>().map_err(|_| syntax(format!("not a decimal number: {v:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let slot = match key.trim() {
                "D" => &mut d,
                "P" => &mut p,
                other => return Err(syntax(format!("unknown key {other:?}"))),
            };
            if slot.is_some() {
                return Err(syntax(format!("duplicate key {}", key.trim())));
            }
            *slot = Some(values);
        }
        let d = d.ok_or(WiringError::Missing('D'))?;
        let p = p.ok_or(WiringError::Missing('P'))?;
        let table = |name: char, values: &[i64], len: usize, min: u8| -> Result<Vec<u8>, WiringError> {
            if values.len() != len {
                return Err(WiringError::WrongLength { table: name, expected: len, found: values.len() });
            }
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    if v < min as i64 || v > 36 {
                        Err(WiringError::OutOfRange { table: name, position: i + 1, value: v, min, max: 36 })
                    } else {
                        Ok(v as u8)
                    }
                })
                .collect()
        };
        let d = table('D', &d, D_LEN, 0)?;
        let p = table('P', &p, P_LEN, 1)?;
        Wiring::new(d.try_into().unwrap(), p.try_into().unwrap())
    }

    pub fn to_config(&self) -> String {
        let join = |v: &[u8]| v.iter().map(u8::to_string).collect::<Vec<_>>().join(",");
        format!("D = {}\nP = {}\n", join(&self.d), join(&self.p))
    }

    pub fn hypothesis(&self, h: TheoremHypothesis) -> bool {
        let set_eq = |a: u8, b: u8, x: u8, y: u8| (a == x && b == y) || (a == y && b == x);
        match h {
            TheoremHypothesis::D23 => set_eq(self.d(2), self.d(3), 24, 28),
            TheoremHypothesis::D67 => set_eq(self.d(6), self.d(7), 8, 12),
            TheoremHypothesis::YInputs => self.p[6..12] == THEOREM_Y_INPUTS,
            TheoremHypothesis::WInputs => self.p[20..26] == THEOREM_W_INPUTS,
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut d_sorted = self.d;
        d_sorted.sort_unstable();
        let invertible_shape =
            d_sorted == [4, 8, 12, 16, 20, 24, 28, 32, 36] && self.p.iter().all(|v| v % 4 != 0);
        ValidationReport {
            duplicate_p: duplicates(&self.p),
            duplicate_d: duplicates(&self.d),
            hypotheses: TheoremHypothesis::ALL.iter().map(|&h| (h, self.hypothesis(h))).collect(),
            invertible_shape,
        }
    }

    /// A completion of the published constraints of long-term key 265.
    ///
    /// `D(2), D(3), D(6), D(7)` and the inputs of `Y` and `W` are fixed by the
    /// degree-7 attack. The remaining `D` entries take the unused multiples of
    /// 4 and the remaining `P` entries take the unused other bits, both in
    /// increasing order, so the round is a bijection and nothing else touches
    /// bits 5..12 or 21..28.
    pub fn lzs_265_like() -> Wiring {
        let d = [4, 24, 28, 16, 20, 8, 12, 32, 36];
        let mut p = [0u8; P_LEN];
        p[6..12].copy_from_slice(&THEOREM_Y_INPUTS);
        p[20..26].copy_from_slice(&THEOREM_W_INPUTS);
        let mut free = (1..=36u8).filter(|b| b % 4 != 0 && !(5..=12).contains(b) && !(21..=28).contains(b));
        for (i, slot) in p.iter_mut().enumerate() {
            if !(6..12).contains(&i) && !(20..26).contains(&i) {
                *slot = free.next().expect("enough free bits");
            }
        }
        debug_assert!(free.next().is_none());
        Wiring::new(d, p).unwrap()
    }

    /// A uniformly random wiring satisfying only the range constraints.
    pub fn random(seed: u64) -> Wiring {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = std::array::from_fn(|_| rng.gen_range(0..=36));
        let p = std::array::from_fn(|_| rng.gen_range(1..=36));
        Wiring::new(d, p).unwrap()
    }

    /// A random wiring of invertible shape (see [`ValidationReport::invertible_shape`]).
    pub fn random_invertible(seed: u64) -> Wiring {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut d: Vec<u8> = (1..=9).map(|k| 4 * k).collect();
        d.shuffle(&mut rng);
        let mut p: Vec<u8> = (1..=36).filter(|b| b % 4 != 0).collect();
        p.shuffle(&mut rng);
        Wiring::new(d.try_into().unwrap(), p.try_into().unwrap()).unwrap()
    }

    /// Variable wired through `D(i)`: the state bit, or `K` when `D(i) = 0`.
    pub fn d_var(&self, i: usize) -> VarId {
        match self.d(i) {
            0 => VarId::K,
            b => VarId::state(b as usize),
        }
    }

    pub fn p_var(&self, i: usize) -> VarId {
        VarId::state(self.p(i) as usize)
    }

    /// Ordered arguments of a round-function instance.
    pub fn instance_args(&self, inst: Instance) -> [VarId; 6] {
        match inst {
            Instance::Z => [VarId::L, self.p_var(1), self.p_var(2), self.p_var(3), self.p_var(4), self.p_var(5)],
            Instance::Y => std::array::from_fn(|i| self.p_var(7 + i)),
            Instance::X => std::array::from_fn(|i| self.p_var(14 + i)),
            Instance::W => std::array::from_fn(|i| self.p_var(21 + i)),
        }
    }
}

impl fmt::Debug for Wiring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Wiring {{ D: {:?}, P: {:?} }}", self.d, self.p)
    }
}

/// 36-bit cipher state; bit `i - 1` holds `x_i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct CipherState(u64);

impl CipherState {
    pub const MASK: u64 = (1 << STATE_BITS) - 1;

    pub fn new(bits: u64) -> Self {
        CipherState(bits & Self::MASK)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// `x_i`, `1 <= i <= 36`.
    pub fn get(self, i: usize) -> bool {
        self.0 >> (i - 1) & 1 == 1
    }

    pub fn set(&mut self, i: usize, b: bool) {
        if b {
            self.0 |= 1 << (i - 1);
        } else {
            self.0 &= !(1 << (i - 1));
        }
    }

    pub fn random(rng: &mut impl Rng) -> Self {
        CipherState::new(rng.gen())
    }

    /// The state as a monomial mask of its true variables.
    pub fn to_var_mask(self) -> u128 {
        (1..=STATE_BITS).filter(|&i| self.get(i)).fold(0, |m, i| m | (1u128 << VarId::state(i).index()))
    }
}

impl fmt::Debug for CipherState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CipherState({:09x})", self.0)
    }
}

/// The per-round bits `F`, `K = S1`, `L = S2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct RoundBits {
    pub f: bool,
    pub k: bool,
    pub l: bool,
}

impl RoundBits {
    pub fn new(f: bool, k: bool, l: bool) -> Self {
        RoundBits { f, k, l }
    }

    /// Bit 0 = F, bit 1 = K, bit 2 = L.
    pub fn from_index(i: u8) -> Self {
        RoundBits { f: i & 1 == 1, k: i & 2 == 2, l: i & 4 == 4 }
    }

    pub fn random(rng: &mut impl Rng) -> Self {
        Self::from_index(rng.gen_range(0..8))
    }

    /// The round bits as a monomial mask of their true variables.
    pub fn to_var_mask(self) -> u128 {
        let mut m = 0u128;
        for (bit, v) in [(self.f, VarId::F), (self.k, VarId::K), (self.l, VarId::L)] {
            if bit {
                m |= 1u128 << v.index();
            }
        }
        m
    }
}

/// How the four round-function instances appear in the round system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundMode {
    /// `Z, Y, X, W` stay as opaque symbols.
    Placeholder,
    /// Each instance is the ANF of the given function on its arguments.
    Expanded(BoolFun6),
    /// Each instance is `Z00 + Z01*arg1 + ... + Z63*arg1..arg6`.
    Symbolic,
}

impl RoundMode {
    pub fn name(&self) -> &'static str {
        match self {
            RoundMode::Placeholder => "placeholder",
            RoundMode::Expanded(_) => "expanded",
            RoundMode::Symbolic => "symbolic",
        }
    }
}

/// The 36 output polynomials of one round.
#[derive(Debug, Clone)]
pub struct RoundSystem {
    wiring: Wiring,
    mode: RoundMode,
    placeholder: Vec<Polynomial>,
    instances: Option<[Polynomial; 4]>,
    outputs: Vec<Polynomial>,
}

impl RoundSystem {
    pub fn new(wiring: &Wiring, mode: RoundMode) -> RoundSystem {
        let var = Polynomial::var;
        let z = |inst| var(VarId::placeholder(inst));
        let mut placeholder = vec![Polynomial::zero(); STATE_BITS];
        for i in 1..=STATE_BITS {
            if i % 4 != 0 && i < STATE_BITS {
                placeholder[i] = var(VarId::state(i));
            }
        }
        let mut acc = var(VarId::F);
        let set = |out: &mut Vec<Polynomial>, y: usize, acc: &Polynomial, d: usize| {
            out[y - 1] = acc.add(&var(wiring.d_var(d)));
        };
        set(&mut placeholder, 33, &acc, 9);
        acc += &z(Instance::Z);
        set(&mut placeholder, 29, &acc, 8);
        acc += &var(wiring.p_var(6));
        set(&mut placeholder, 25, &acc, 7);
        acc += &z(Instance::Y);
        set(&mut placeholder, 21, &acc, 6);
        acc += &var(wiring.p_var(13));
        set(&mut placeholder, 17, &acc, 5);
        acc += &var(VarId::L);
        acc += &z(Instance::X);
        set(&mut placeholder, 13, &acc, 4);
        acc += &var(wiring.p_var(20));
        set(&mut placeholder, 9, &acc, 3);
        acc += &z(Instance::W);
        set(&mut placeholder, 5, &acc, 2);
        acc += &var(wiring.p_var(27));
        set(&mut placeholder, 1, &acc, 1);

        let instances = match mode {
            RoundMode::Placeholder => None,
            RoundMode::Expanded(f) => Some(Instance::ALL.map(|i| f.instantiate(&wiring.instance_args(i)))),
            RoundMode::Symbolic => {
                Some(Instance::ALL.map(|i| BoolFun6::symbolic_instance(&wiring.instance_args(i))))
            }
        };
        let outputs = match &instances {
            None => placeholder.clone(),
            Some(inst) => {
                let subst = instance_substitution(inst);
                placeholder.iter().map(|p| p.substitute(&subst)).collect()
            }
        };
        RoundSystem { wiring: wiring.clone(), mode, placeholder, instances, outputs }
    }

    pub fn wiring(&self) -> &Wiring {
        &self.wiring
    }

    pub fn mode(&self) -> RoundMode {
        self.mode
    }

    /// `y_i` in the system's mode, `1 <= i <= 36`.
    pub fn output(&self, i: usize) -> &Polynomial {
        &self.outputs[i - 1]
    }

    pub fn outputs(&self) -> &[Polynomial] {
        &self.outputs
    }

    /// `y_i` with `Z, Y, X, W` left symbolic.
    pub fn placeholder_output(&self, i: usize) -> &Polynomial {
        &self.placeholder[i - 1]
    }

    /// Expansions of `Z, Y, X, W`, absent in placeholder mode.
    pub fn instances(&self) -> Option<&[Polynomial; 4]> {
        self.instances.as_ref()
    }

    /// Substitution `x_i -> y_i` of this system's outputs.
    pub fn output_substitution(&self) -> Substitution {
        VarId::states().zip(self.outputs.iter().cloned()).collect()
    }

    /// Substitution `x_i -> y_i` with placeholders kept.
    pub fn placeholder_substitution(&self) -> Substitution {
        VarId::states().zip(self.placeholder.iter().cloned()).collect()
    }

    /// Substitution of the placeholders by their expansions (identity in
    /// placeholder mode).
    pub fn instance_substitution(&self) -> Substitution {
        self.instances.as_ref().map(instance_substitution).unwrap_or_default()
    }

    /// Evaluates the output polynomials on a state. Fails if the system still
    /// contains placeholders or coefficient variables.
    pub fn apply(&self, state: CipherState, bits: RoundBits) -> Result<CipherState, EvalError> {
        let mut assignment: Assignment =
            VarId::states().enumerate().map(|(i, v)| (v, state.get(i + 1))).collect();
        assignment.set(VarId::F, bits.f).set(VarId::K, bits.k).set(VarId::L, bits.l);
        let mut out = CipherState::default();
        for (i, y) in self.outputs.iter().enumerate() {
            out.set(i + 1, y.evaluate(&assignment)?);
        }
        Ok(out)
    }
}

fn instance_substitution(inst: &[Polynomial; 4]) -> Substitution {
    Instance::ALL.iter().map(|&i| (VarId::placeholder(i), inst[i.index()].clone())).collect()
}

/// One concrete round computed bit by bit from the wiring and the function's
/// truth table.
pub fn step(state: CipherState, wiring: &Wiring, f: &BoolFun6, bits: RoundBits) -> CipherState {
    let x = |b: u8| -> bool {
        match b {
            0 => bits.k,
            b => state.get(b as usize),
        }
    };
    let xp = |i: usize| x(wiring.p(i));
    let xd = |i: usize| x(wiring.d(i));
    let z = |args: [bool; 6]| {
        let idx = args.iter().enumerate().fold(0u8, |a, (i, &b)| a | (b as u8) << i);
        f.eval(idx)
    };
    let z1 = z([bits.l, xp(1), xp(2), xp(3), xp(4), xp(5)]);
    let z2 = z(std::array::from_fn(|i| xp(7 + i)));
    let z3 = z(std::array::from_fn(|i| xp(14 + i)));
    let z4 = z(std::array::from_fn(|i| xp(21 + i)));

    // y_{i+1} = x_i; the nine recomputed bits are overwritten below
    let mut out = CipherState::new(state.bits() << 1);
    let mut acc = bits.f;
    out.set(33, acc ^ xd(9));
    acc ^= z1;
    out.set(29, acc ^ xd(8));
    acc ^= xp(6);
    out.set(25, acc ^ xd(7));
    acc ^= z2;
    out.set(21, acc ^ xd(6));
    acc ^= xp(13);
    out.set(17, acc ^ xd(5));
    acc ^= bits.l ^ z3;
    out.set(13, acc ^ xd(4));
    acc ^= xp(20);
    out.set(9, acc ^ xd(3));
    acc ^= z4;
    out.set(5, acc ^ xd(2));
    acc ^= xp(27);
    out.set(1, acc ^ xd(1));
    out
}

use std::fmt;

/// Number of cipher state bits.
pub const STATE_BITS: usize = 36;
/// Size of the variable universe (fits in a `u128` monomial mask).
pub const UNIVERSE: usize = 115;

const IV: u8 = 36;
const KEY1: u8 = 37;
const KEY2: u8 = 38;
const PLACEHOLDER0: u8 = 39;
const COEFF0: u8 = 43;
const FORM0: u8 = 107;

/// Which partition of the universe a variable belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarClass {
    /// Cipher state bit `x1..x36`.
    State,
    /// The public per-round bit `F`.
    Iv,
    /// Key bits `K = S1` and `L = S2`.
    Key,
    /// Symbolic instance of the round function (`Z, Y, X, W`).
    Placeholder,
    /// ANF coefficient `Z00..Z63` of the round function.
    Coefficient,
    /// Abstract linear-form variable used for identities over `B_8`.
    Form,
}

/// One of the four occurrences of the round's Boolean function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Instance {
    Z,
    Y,
    X,
    W,
}

impl Instance {
    pub const ALL: [Instance; 4] = [Instance::Z, Instance::Y, Instance::X, Instance::W];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> char {
        ['Z', 'Y', 'X', 'W'][self.index()]
    }
}

/// A variable of the fixed universe.
///
/// Indices are laid out so that the natural order matches the letter order
/// used when writing state bits: `a = x36` has index 0 and `V = x1` has index 35.
/// After the state come `F, K, L`, the placeholders `Z, Y, X, W`, the 64 ANF
/// coefficients `Z00..Z63` and finally eight abstract form variables.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(u8);

impl VarId {
    pub const F: VarId = VarId(IV);
    pub const K: VarId = VarId(KEY1);
    pub const L: VarId = VarId(KEY2);

    /// Builds a variable from its raw index.
    pub fn from_index(index: usize) -> Option<VarId> {
        (index < UNIVERSE).then_some(VarId(index as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub(crate) fn bit(self) -> u128 {
        1u128 << self.0
    }

    /// State bit `x_i`, `1 <= i <= 36`.
    ///
    /// # Panics
    /// Panics if `i` is out of range.
    pub fn state(i: usize) -> VarId {
        assert!((1..=STATE_BITS).contains(&i), "state bit x{i} out of range");
        VarId((STATE_BITS - i) as u8)
    }

    pub fn placeholder(inst: Instance) -> VarId {
        VarId(PLACEHOLDER0 + inst as u8)
    }

    /// ANF coefficient `Zkk`, `k < 64`.
    pub fn coefficient(k: usize) -> VarId {
        assert!(k < 64, "coefficient Z{k:02} out of range");
        VarId(COEFF0 + k as u8)
    }

    /// Abstract form variable, `0 => A` through `7 => H`.
    pub fn form(k: usize) -> VarId {
        assert!(k < 8, "form index {k} out of range");
        VarId(FORM0 + k as u8)
    }

    pub fn class(self) -> VarClass {
        match self.0 {
            0..IV => VarClass::State,
            IV => VarClass::Iv,
            KEY1 | KEY2 => VarClass::Key,
            PLACEHOLDER0..COEFF0 => VarClass::Placeholder,
            COEFF0..FORM0 => VarClass::Coefficient,
            _ => VarClass::Form,
        }
    }

    /// The `i` of `x_i` for a state variable.
    pub fn state_index(self) -> Option<usize> {
        (self.class() == VarClass::State).then(|| STATE_BITS - self.0 as usize)
    }

    pub fn instance(self) -> Option<Instance> {
        (self.class() == VarClass::Placeholder).then(|| Instance::ALL[(self.0 - PLACEHOLDER0) as usize])
    }

    pub fn coefficient_index(self) -> Option<usize> {
        (self.class() == VarClass::Coefficient).then(|| (self.0 - COEFF0) as usize)
    }

    pub fn form_index(self) -> Option<usize> {
        (self.class() == VarClass::Form).then(|| (self.0 - FORM0) as usize)
    }

    /// Canonical textual name, as accepted by the polynomial parser.
    pub fn name(self) -> String {
        match self.class() {
            VarClass::State => {
                let k = self.0;
                if k < 26 {
                    char::from(b'a' + k).to_string()
                } else {
                    char::from(b'M' + (k - 26)).to_string()
                }
            }
            VarClass::Iv => "F".into(),
            VarClass::Key => if self == VarId::K { "K" } else { "L" }.into(),
            VarClass::Placeholder => self.instance().unwrap().letter().to_string(),
            VarClass::Coefficient => format!("Z{:02}", self.coefficient_index().unwrap()),
            VarClass::Form => format!("@{}", char::from(b'A' + self.form_index().unwrap() as u8)),
        }
    }

    /// Looks a variable up by name. Accepts the canonical names plus the
    /// aliases `S1`/`S2` (key bits), `Z1..Z4` (placeholders) and `x1..x36`.
    pub fn from_name(name: &str) -> Option<VarId> {
        let bytes = name.as_bytes();
        match bytes {
            [c @ b'a'..=b'z'] => Some(VarId(c - b'a')),
            [c @ b'M'..=b'V'] => Some(VarId(26 + c - b'M')),
            [b'F'] => Some(VarId::F),
            [b'K'] => Some(VarId::K),
            [b'L'] => Some(VarId::L),
            [b'Z'] => Some(VarId::placeholder(Instance::Z)),
            [b'Y'] => Some(VarId::placeholder(Instance::Y)),
            [b'X'] => Some(VarId::placeholder(Instance::X)),
            [b'W'] => Some(VarId::placeholder(Instance::W)),
            [b'S', b'1'] => Some(VarId::K),
            [b'S', b'2'] => Some(VarId::L),
            [b'Z', d @ b'1'..=b'4'] => Some(VarId::placeholder(Instance::ALL[(d - b'1') as usize])),
            [b'Z', d1 @ b'0'..=b'9', d0 @ b'0'..=b'9'] => {
                let k = ((d1 - b'0') * 10 + (d0 - b'0')) as usize;
                (k < 64).then(|| VarId::coefficient(k))
            }
            [b'@', c @ b'A'..=b'H'] => Some(VarId::form((c - b'A') as usize)),
            [b'x', rest @ ..] if !rest.is_empty() => {
                let i: usize = std::str::from_utf8(rest).ok()?.parse().ok()?;
                (1..=STATE_BITS).contains(&i).then(|| VarId::state(i))
            }
            _ => None,
        }
    }

    /// Iterator over all 36 state variables, `x1` first.
    pub fn states() -> impl Iterator<Item = VarId> {
        (1..=STATE_BITS).map(VarId::state)
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backwards_numbering() {
        assert_eq!(VarId::state(36).name(), "a");
        assert_eq!(VarId::state(11).name(), "z");
        assert_eq!(VarId::state(10).name(), "M");
        assert_eq!(VarId::state(1).name(), "V");
        assert_eq!(VarId::from_name("i").unwrap().state_index(), Some(28));
        assert_eq!(VarId::from_name("R").unwrap().state_index(), Some(5));
    }

    #[test]
    fn names_round_trip_over_universe() {
        for k in 0..UNIVERSE {
            let v = VarId::from_index(k).unwrap();
            assert_eq!(VarId::from_name(&v.name()), Some(v), "{}", v.name());
        }
        assert!(VarId::from_index(UNIVERSE).is_none());
    }

    #[test]
    fn partitions() {
        assert_eq!(VarId::F.class(), VarClass::Iv);
        assert_eq!(VarId::from_name("S1"), Some(VarId::K));
        assert_eq!(VarId::from_name("S2"), Some(VarId::L));
        assert_eq!(VarId::from_name("Z3"), Some(VarId::placeholder(Instance::X)));
        assert_eq!(VarId::from_name("Z63"), Some(VarId::coefficient(63)));
        assert_eq!(VarId::from_name("Z64"), None);
        assert_eq!(VarId::from_name("x7"), Some(VarId::state(7)));
        assert_eq!(VarId::form(7).class(), VarClass::Form);
        let classes: Vec<_> = (0..UNIVERSE).map(|k| VarId::from_index(k).unwrap().class()).collect();
        assert_eq!(classes.iter().filter(|c| **c == VarClass::State).count(), 36);
        assert_eq!(classes.iter().filter(|c| **c == VarClass::Coefficient).count(), 64);
    }
}

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul};

use thiserror::Error;

use super::var::{VarClass, VarId, UNIVERSE};

const KEY_SHIFT: u32 = UNIVERSE as u32;
const LOW_MASK: u128 = (1u128 << UNIVERSE) - 1;

/// A product of distinct variables; the empty product is the constant 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial(u128);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn from_mask(mask: u128) -> Monomial {
        debug_assert_eq!(mask & !LOW_MASK, 0);
        Monomial(mask)
    }

    pub fn from_vars<I: IntoIterator<Item = VarId>>(vars: I) -> Monomial {
        Monomial(vars.into_iter().fold(0, |m, v| m | v.bit()))
    }

    pub fn mask(self) -> u128 {
        self.0
    }

    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    pub fn contains(self, v: VarId) -> bool {
        self.0 & v.bit() != 0
    }

    /// Variables in increasing index order.
    pub fn vars(self) -> impl Iterator<Item = VarId> {
        BitIter(self.0).map(|i| VarId::from_index(i).unwrap())
    }

    /// Sort key realising the canonical term order: higher degree first, then
    /// lexicographic on the increasing variable lists.
    #[inline]
    fn key(mask: u128) -> u128 {
        let deg = mask.count_ones() as u128;
        let rev = mask.reverse_bits() >> (128 - UNIVERSE as u32);
        ((127 - deg) << KEY_SHIFT) | (LOW_MASK ^ rev)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        Monomial::key(self.0).cmp(&Monomial::key(other.0))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::parse::render_monomial(*self, &super::parse::Names::Standard))
    }
}

pub(crate) struct BitIter(pub(crate) u128);

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("expansion exceeded the term budget of {budget} monomials (reached {reached})")]
pub struct TermBudgetExceeded {
    pub budget: usize,
    pub reached: usize,
}

/// Collects monomials and cancels duplicates mod 2.
///
/// The buffer is compacted whenever it doubles, so memory stays proportional to
/// the live term count. With a budget set, a compacted size above the budget is
/// an error.
pub(crate) struct TermAccumulator {
    buf: Vec<u128>,
    compact_at: usize,
    budget: Option<usize>,
}

impl TermAccumulator {
    const MIN_COMPACT: usize = 1 << 16;

    pub(crate) fn new(budget: Option<usize>) -> Self {
        TermAccumulator {
            buf: Vec::new(),
            compact_at: Self::MIN_COMPACT,
            budget,
        }
    }

    #[inline]
    pub(crate) fn push(&mut self, m: u128) -> Result<(), TermBudgetExceeded> {
        self.buf.push(m);
        if self.buf.len() >= self.compact_at {
            self.compact()?;
        }
        Ok(())
    }

    fn compact(&mut self) -> Result<(), TermBudgetExceeded> {
        canonicalize(&mut self.buf);
        if let Some(budget) = self.budget {
            if self.buf.len() > budget {
                return Err(TermBudgetExceeded {
                    budget,
                    reached: self.buf.len(),
                });
            }
        }
        self.compact_at = (2 * self.buf.len()).max(Self::MIN_COMPACT);
        Ok(())
    }

    pub(crate) fn finish(mut self) -> Result<Polynomial, TermBudgetExceeded> {
        self.compact()?;
        Ok(Polynomial { terms: self.buf })
    }
}

/// Sorts into canonical order and removes pairs of equal monomials.
fn canonicalize(buf: &mut Vec<u128>) {
    buf.sort_unstable_by_key(|&m| Monomial::key(m));
    let mut write = 0;
    let mut read = 0;
    while read < buf.len() {
        let m = buf[read];
        let mut run = 1;
        while read + run < buf.len() && buf[read + run] == m {
            run += 1;
        }
        if run % 2 == 1 {
            buf[write] = m;
            write += 1;
        }
        read += run;
    }
    buf.truncate(write);
}

/// A Boolean polynomial: a canonical set of monomials over GF(2) with `x^2 = x`.
///
/// Terms are kept sorted in the canonical order (see [`Monomial`]'s `Ord`), so
/// structural equality is polynomial equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: Vec<u128>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unassigned variables: {}", names(.0))]
    Unassigned(Vec<VarId>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorError {
    #[error("divisor {0} is not affine")]
    NotAffine(String),
    #[error("{divisor} does not divide the polynomial: (divisor + 1) * p != 0")]
    NotAFactor { divisor: String },
    #[error("pivot {0} does not occur in the divisor")]
    NotAPivot(String),
}

fn names(vars: &[VarId]) -> String {
    vars.iter().map(|v| v.name()).collect::<Vec<_>>().join(", ")
}

impl Polynomial {
    pub fn zero() -> Polynomial {
        Polynomial { terms: Vec::new() }
    }

    pub fn one() -> Polynomial {
        Polynomial { terms: vec![0] }
    }

    pub fn var(v: VarId) -> Polynomial {
        Polynomial { terms: vec![v.bit()] }
    }

    pub fn constant(bit: bool) -> Polynomial {
        if bit {
            Polynomial::one()
        } else {
            Polynomial::zero()
        }
    }

    pub fn monomial(m: Monomial) -> Polynomial {
        Polynomial { terms: vec![m.0] }
    }

    /// Sum of the given monomials; repeated monomials cancel in pairs.
    pub fn from_monomials<I: IntoIterator<Item = Monomial>>(terms: I) -> Polynomial {
        Self::from_masks(terms.into_iter().map(|m| m.0).collect())
    }

    pub(crate) fn from_masks(mut terms: Vec<u128>) -> Polynomial {
        canonicalize(&mut terms);
        Polynomial { terms }
    }

    /// Sum of the given variables.
    pub fn linear<I: IntoIterator<Item = VarId>>(vars: I) -> Polynomial {
        Self::from_masks(vars.into_iter().map(VarId::bit).collect())
    }

    /// Product of the given polynomials.
    pub fn product<'a, I: IntoIterator<Item = &'a Polynomial>>(factors: I) -> Polynomial {
        factors.into_iter().fold(Polynomial::one(), |acc, f| acc.mul(f))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms == [0]
    }

    /// Number of monomials.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl ExactSizeIterator<Item = Monomial> + '_ {
        self.terms.iter().map(|&m| Monomial(m))
    }

    pub(crate) fn raw_terms(&self) -> &[u128] {
        &self.terms
    }

    pub fn has_constant_term(&self) -> bool {
        self.terms.last() == Some(&0)
    }

    /// Degree of the polynomial; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        // canonical order puts the highest degree first
        self.terms.first().map_or(0, |m| m.count_ones())
    }

    pub fn support_mask(&self) -> u128 {
        self.terms.iter().fold(0, |acc, m| acc | m)
    }

    /// Variables occurring in the polynomial, in increasing index order.
    pub fn support(&self) -> Vec<VarId> {
        Monomial(self.support_mask()).vars().collect()
    }

    pub fn support_in(&self, class: VarClass) -> Vec<VarId> {
        self.support().into_iter().filter(|v| v.class() == class).collect()
    }

    pub fn contains_var(&self, v: VarId) -> bool {
        self.support_mask() & v.bit() != 0
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let (ka, kb) = (Monomial::key(a[i]), Monomial::key(b[j]));
            if ka < kb {
                out.push(a[i]);
                i += 1;
            } else if kb < ka {
                out.push(b[j]);
                j += 1;
            } else {
                i += 1;
                j += 1;
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Polynomial { terms: out }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        self.mul_with_budget(other, None).expect("unbounded multiplication")
    }

    pub fn mul_with_budget(
        &self,
        other: &Polynomial,
        budget: Option<usize>,
    ) -> Result<Polynomial, TermBudgetExceeded> {
        if self.is_zero() || other.is_zero() {
            return Ok(Polynomial::zero());
        }
        if self.is_one() {
            return Ok(other.clone());
        }
        if other.is_one() {
            return Ok(self.clone());
        }
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = TermAccumulator::new(budget);
        for &s in &small.terms {
            for &l in &large.terms {
                acc.push(s | l)?;
            }
        }
        acc.finish()
    }

    /// Multiplies every term by a single monomial.
    pub fn mul_monomial(&self, m: Monomial) -> Polynomial {
        Self::from_masks(self.terms.iter().map(|t| t | m.0).collect())
    }

    /// `self + 1`.
    pub fn complement(&self) -> Polynomial {
        self.add(&Polynomial::one())
    }

    /// Evaluates over GF(2). Every variable in the support must be assigned.
    pub fn evaluate(&self, assignment: &Assignment) -> Result<bool, EvalError> {
        let missing = self.support_mask() & !assignment.assigned;
        if missing != 0 {
            return Err(EvalError::Unassigned(Monomial(missing).vars().collect()));
        }
        Ok(self.eval_mask(assignment.values))
    }

    /// Evaluation at the point whose true variables are `ones`; unassigned
    /// variables read as 0.
    #[inline]
    pub fn eval_mask(&self, ones: u128) -> bool {
        self.terms.iter().filter(|&&t| t & !ones == 0).count() % 2 == 1
    }

    /// Simultaneous substitution; variables without an image are left as is.
    pub fn substitute(&self, subst: &Substitution) -> Polynomial {
        self.substitute_with_budget(subst, None).expect("unbounded substitution")
    }

    pub fn substitute_with_budget(
        &self,
        subst: &Substitution,
        budget: Option<usize>,
    ) -> Result<Polynomial, TermBudgetExceeded> {
        let mapped = subst.mapped_mask() & self.support_mask();
        if mapped == 0 {
            return Ok(self.clone());
        }

        // Images that are single monomials (or zero) are applied directly to
        // each term; the rest are expanded per distinct combination.
        let mut rename_mask = 0u128;
        let mut killed = 0u128;
        let mut expand_mask = 0u128;
        let mut rename_to = [0u128; UNIVERSE];
        for i in BitIter(mapped) {
            let image = subst.images[i].as_ref().unwrap();
            match image.terms.as_slice() {
                [] => killed |= 1u128 << i,
                [m] => {
                    rename_mask |= 1u128 << i;
                    rename_to[i] = *m;
                }
                _ => expand_mask |= 1u128 << i,
            }
        }

        let mut groups: HashMap<u128, Vec<u128>> = HashMap::new();
        for &t in &self.terms {
            if t & killed != 0 {
                continue;
            }
            let mut rest = t & !mapped;
            for i in BitIter(t & rename_mask) {
                rest |= rename_to[i];
            }
            groups.entry(t & expand_mask).or_default().push(rest);
        }

        let mut products: HashMap<u128, Polynomial> = HashMap::new();
        products.insert(0, Polynomial::one());
        let mut keys: Vec<u128> = groups.keys().copied().collect();
        keys.sort_unstable();
        let mut acc = TermAccumulator::new(budget);
        for key in keys {
            let prod = expand_product(key, subst, &mut products, budget)?;
            let cofactor = Polynomial::from_masks(groups.remove(&key).unwrap());
            for &a in &prod.terms {
                for &b in &cofactor.terms {
                    acc.push(a | b)?;
                }
            }
        }
        acc.finish()
    }

    /// Divides by an affine factor `l` with `(l + 1) * self = 0`.
    ///
    /// The quotient is obtained by substituting the lowest-index variable `v`
    /// of `l` with `v + l + 1`, which forces `l` to 1 and removes `v`.
    pub fn factor_out(&self, l: &Polynomial) -> Result<Polynomial, FactorError> {
        match l.support().first() {
            Some(&pivot) => self.factor_out_at(l, pivot),
            None => self.factor_out_at(l, VarId::from_index(0).unwrap()),
        }
    }

    /// As [`factor_out`](Self::factor_out), eliminating `pivot`, which must
    /// occur in `l`.
    pub fn factor_out_at(&self, l: &Polynomial, pivot: VarId) -> Result<Polynomial, FactorError> {
        if l.degree() > 1 {
            return Err(FactorError::NotAffine(l.to_string()));
        }
        if !l.complement().mul(self).is_zero() {
            return Err(FactorError::NotAFactor {
                divisor: l.to_string(),
            });
        }
        if !l.contains_var(pivot) {
            // only l == 1 gets here without a pivot, and it divides everything
            return if l.is_one() { Ok(self.clone()) } else { Err(FactorError::NotAPivot(pivot.name())) };
        }
        let image = Polynomial::var(pivot).add(l).complement();
        Ok(self.substitute(&Substitution::single(pivot, image)))
    }
}

fn expand_product(
    key: u128,
    subst: &Substitution,
    memo: &mut HashMap<u128, Polynomial>,
    budget: Option<usize>,
) -> Result<Polynomial, TermBudgetExceeded> {
    if let Some(p) = memo.get(&key) {
        return Ok(p.clone());
    }
    let low = key.trailing_zeros() as usize;
    let rest = expand_product(key & (key - 1), subst, memo, budget)?;
    let prod = rest.mul_with_budget(subst.images[low].as_ref().unwrap(), budget)?;
    memo.insert(key, prod.clone());
    Ok(prod)
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        Polynomial::add(self, rhs)
    }
}

impl AddAssign<&Polynomial> for Polynomial {
    fn add_assign(&mut self, rhs: &Polynomial) {
        *self = Polynomial::add(self, rhs);
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        Polynomial::mul(self, rhs)
    }
}

impl From<VarId> for Polynomial {
    fn from(v: VarId) -> Self {
        Polynomial::var(v)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::parse::render(self))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({})", self)
    }
}

/// Partial assignment of bits to variables.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Assignment {
    values: u128,
    assigned: u128,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Assigns every variable: those in `ones` to 1, the rest to 0.
    pub fn total(ones: Monomial) -> Self {
        Assignment {
            values: ones.0,
            assigned: LOW_MASK,
        }
    }

    pub fn set(&mut self, v: VarId, bit: bool) -> &mut Self {
        self.assigned |= v.bit();
        if bit {
            self.values |= v.bit();
        } else {
            self.values &= !v.bit();
        }
        self
    }

    pub fn with(mut self, v: VarId, bit: bool) -> Self {
        self.set(v, bit);
        self
    }

    pub fn get(&self, v: VarId) -> Option<bool> {
        (self.assigned & v.bit() != 0).then_some(self.values & v.bit() != 0)
    }

    pub fn ones_mask(&self) -> u128 {
        self.values
    }
}

impl FromIterator<(VarId, bool)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (VarId, bool)>>(iter: I) -> Self {
        let mut a = Assignment::new();
        for (v, b) in iter {
            a.set(v, b);
        }
        a
    }
}

/// Simultaneous substitution map `VarId -> Polynomial`.
#[derive(Clone)]
pub struct Substitution {
    images: Vec<Option<Polynomial>>,
}

impl Default for Substitution {
    fn default() -> Self {
        Substitution {
            images: vec![None; UNIVERSE],
        }
    }
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(v: VarId, image: Polynomial) -> Self {
        let mut s = Self::new();
        s.set(v, image);
        s
    }

    pub fn set(&mut self, v: VarId, image: Polynomial) -> &mut Self {
        self.images[v.index()] = Some(image);
        self
    }

    pub fn get(&self, v: VarId) -> Option<&Polynomial> {
        self.images[v.index()].as_ref()
    }

    fn mapped_mask(&self) -> u128 {
        self.images
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_some())
            .fold(0, |m, (i, _)| m | (1u128 << i))
    }
}

impl FromIterator<(VarId, Polynomial)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (VarId, Polynomial)>>(iter: I) -> Self {
        let mut s = Substitution::new();
        for (v, p) in iter {
            s.set(v, p);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anf::parse;

    fn p(s: &str) -> Polynomial {
        parse(s).unwrap()
    }

    #[test]
    fn add_cancels() {
        assert_eq!(&p("a+b") + &p("b+c"), p("a+c"));
        assert!((&p("ab+c") + &p("ab+c")).is_zero());
        assert_eq!(&Polynomial::zero() + &p("q"), p("q"));
    }

    #[test]
    fn mul_is_idempotent() {
        assert_eq!(&p("a+b") * &p("a+b"), p("a+b"));
        assert_eq!(&p("a") * &p("a"), p("a"));
        assert_eq!(&p("a+1") * &p("a"), Polynomial::zero());
        assert_eq!(&p("ab+b") * &p("a"), Polynomial::zero());
        assert_eq!(&p("ab+b") * &p("a+1"), p("ab+b"));
    }

    #[test]
    fn degree_and_support() {
        let q = p("abcdijkl+efg+efh+egh+fgh");
        assert_eq!(q.degree(), 8);
        assert_eq!(q.len(), 5);
        assert_eq!(q.support().len(), 12);
        assert_eq!(Polynomial::zero().degree(), 0);
    }

    #[test]
    fn evaluate_examples() {
        let a = Assignment::new()
            .with(VarId::state(36), true)
            .with(VarId::state(35), true)
            .with(VarId::state(34), true);
        assert!(!p("ab+c").evaluate(&a).unwrap());
        assert!(p("1").evaluate(&Assignment::new()).unwrap());
        let bd = Assignment::total(Monomial::from_vars([VarId::state(35), VarId::state(33)]));
        assert!(p("bd").evaluate(&bd).unwrap());
    }

    #[test]
    fn evaluate_reports_missing() {
        let a = Assignment::new().with(VarId::state(36), true);
        let err = p("ab+c").evaluate(&a).unwrap_err();
        assert_eq!(err, EvalError::Unassigned(vec![VarId::state(35), VarId::state(34)]));
    }

    #[test]
    fn substitution_is_simultaneous() {
        let a = VarId::from_name("a").unwrap();
        let b = VarId::from_name("b").unwrap();
        let s: Substitution = [(a, p("b")), (b, p("c"))].into_iter().collect();
        assert_eq!(p("ab").substitute(&s), p("bc"));
        let s: Substitution = [(a, p("b+1")), (b, p("a+1"))].into_iter().collect();
        assert_eq!(p("a+b").substitute(&s), p("a+b"));
        let d = VarId::from_name("d").unwrap();
        assert_eq!(p("d").substitute(&Substitution::single(d, p("F+i"))), p("F+i"));
    }

    #[test]
    fn substitution_expands_and_kills() {
        let a = VarId::from_name("a").unwrap();
        let b = VarId::from_name("b").unwrap();
        let s: Substitution = [(a, p("c+d")), (b, Polynomial::zero())].into_iter().collect();
        assert_eq!(p("ae+b+ab+f").substitute(&s), p("ce+de+f"));
        let s: Substitution = [(a, p("c+d")), (b, p("c+e"))].into_iter().collect();
        assert_eq!(p("ab+a").substitute(&s), p("c+ce+dc+de+c+d"));
    }

    #[test]
    fn factor_out_examples() {
        let q = p("ab+b").factor_out(&p("a+1")).unwrap();
        assert_eq!(q, p("b"));
        assert_eq!(&p("a+1") * &q, p("ab+b"));
        assert!(matches!(p("a").factor_out(&p("b")), Err(FactorError::NotAFactor { .. })));
        assert!(matches!(p("a").factor_out(&p("ab")), Err(FactorError::NotAffine(_))));
    }

    #[test]
    fn budget_is_enforced() {
        let big = p("a+b+c+d+e+f+g+h");
        let big2 = p("i+j+k+l+m+n+o+p");
        let err = big.mul_with_budget(&big2, Some(10)).unwrap_err();
        assert_eq!(err.budget, 10);
        assert_eq!(big.mul_with_budget(&big2, Some(64)).unwrap().len(), 64);
    }

    #[test]
    fn canonical_order_is_graded() {
        let q = p("1+a+ab+b+abc");
        let degs: Vec<u32> = q.terms().map(Monomial::degree).collect();
        assert_eq!(degs, vec![3, 2, 1, 1, 0]);
        assert_eq!(q.to_string(), "abc+ab+a+b+1");
    }
}

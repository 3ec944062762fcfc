//! Dense bit matrices over GF(2).

use std::fmt;

/// A bit vector of fixed length.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = BitVector::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// The low `len` bits of `word`.
    pub fn from_u64(word: u64, len: usize) -> Self {
        assert!(len <= 64);
        let mut v = BitVector::zeros(len);
        if len > 0 {
            v.words[0] = word & (u64::MAX >> (64 - len));
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if b {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    /// Low 64 bits as a word.
    pub fn to_u64(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Row-major dense matrix over GF(2).
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64).max(1);
        BitMatrix { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: &[BitVector]) -> Self {
        let mut m = BitMatrix::zeros(rows.len(), cols);
        for (r, v) in rows.iter().enumerate() {
            assert_eq!(v.len(), cols);
            m.row_words_mut(r)[..v.words.len()].copy_from_slice(&v.words);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.stride + c / 64] >> (c % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, b: bool) {
        let w = &mut self.data[r * self.stride + c / 64];
        let mask = 1u64 << (c % 64);
        if b {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVector {
        let mut v = BitVector::zeros(self.cols);
        let n = v.words.len();
        v.words.copy_from_slice(&self.row_words(r)[..n]);
        v
    }

    /// row[dst] ^= row[src]
    fn xor_row(&mut self, dst: usize, src: usize) {
        debug_assert_ne!(dst, src);
        let s = self.stride;
        let (a, b) = if dst < src {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&mut lo[dst * s..dst * s + s], &hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&mut hi[..s], &lo[src * s..src * s + s])
        };
        for (x, y) in a.iter_mut().zip(b) {
            *x ^= y;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.stride {
            self.data.swap(a * self.stride + k, b * self.stride + k);
        }
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) {
                    let src = other.row_words(k).to_vec();
                    for (x, y) in out.row_words_mut(r).iter_mut().zip(&src) {
                        *x ^= y;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &BitVector) -> BitVector {
        assert_eq!(self.cols, v.len());
        BitVector::from_bits((0..self.rows).map(|r| {
            self.row_words(r)
                .iter()
                .zip(&v.words)
                .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
                & 1
                == 1
        }))
    }

    pub fn add(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(&other.data) {
            *x ^= y;
        }
        out
    }

    /// Brings the matrix to reduced row-echelon form in place and returns the
    /// pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut next = 0;
        for c in 0..self.cols {
            if next == self.rows {
                break;
            }
            let Some(p) = (next..self.rows).find(|&r| self.get(r, c)) else {
                continue;
            };
            self.swap_rows(p, next);
            for r in 0..self.rows {
                if r != next && self.get(r, c) {
                    self.xor_row(r, next);
                }
            }
            pivots.push(c);
            next += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of `{x : A x = 0}`, one vector per free column, in the order of
    /// the free columns.
    pub fn kernel(&self) -> Vec<BitVector> {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = BitVector::zeros(self.cols);
                v.set(free, true);
                for (r, &p) in pivots.iter().enumerate() {
                    if m.get(r, free) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }

    /// Solves `A x = b`, returning one solution if the system is consistent.
    pub fn solve(&self, b: &BitVector) -> Option<BitVector> {
        assert_eq!(b.len(), self.rows);
        let mut aug = BitMatrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    aug.set(r, c, true);
                }
            }
            aug.set(r, self.cols, b.get(r));
        }
        let pivots = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = BitVector::zeros(self.cols);
        for (r, &p) in pivots.iter().enumerate() {
            x.set(p, aug.get(r, self.cols));
        }
        Some(x)
    }
}

/// Reduces a list of vectors to a basis of their span in reduced row-echelon
/// form (leading ones in increasing column order).
pub fn reduced_basis(vectors: &[BitVector], len: usize) -> Vec<BitVector> {
    let mut m = BitMatrix::from_rows(len, vectors);
    let rank = m.rref().len();
    (0..rank).map(|r| m.row(r)).collect()
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            writeln!(f, "{:?}", self.row(r))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&str]) -> BitMatrix {
        let vs: Vec<BitVector> = rows
            .iter()
            .map(|r| BitVector::from_bits(r.chars().map(|c| c == '1')))
            .collect();
        BitMatrix::from_rows(vs[0].len(), &vs)
    }

    #[test]
    fn rref_and_rank() {
        let mut a = m(&["110", "011", "101"]);
        assert_eq!(a.rank(), 2);
        assert_eq!(a.rref(), vec![0, 1]);
        assert_eq!(format!("{:?}", a), "101\n011\n000\n");
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let a = m(&["1101", "0111", "1010"]);
        let k = a.kernel();
        assert_eq!(k.len(), 4 - a.rank());
        for v in &k {
            assert!(a.mul_vec(v).is_zero());
        }
    }

    #[test]
    fn wide_matrices_cross_word_boundaries() {
        let cols = 150;
        let mut a = BitMatrix::zeros(3, cols);
        a.set(0, 0, true);
        a.set(0, 149, true);
        a.set(1, 70, true);
        a.set(2, 149, true);
        a.set(2, 70, true);
        assert_eq!(a.rank(), 3);
        for v in a.kernel() {
            assert!(a.mul_vec(&v).is_zero());
        }
        assert_eq!(a.transpose().transpose(), a);
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let a = m(&["11", "11"]);
        assert!(a.solve(&BitVector::from_bits([true, false])).is_none());
        let x = a.solve(&BitVector::from_bits([true, true])).unwrap();
        assert_eq!(a.mul_vec(&x), BitVector::from_bits([true, true]));
    }

    #[test]
    fn multiplication_matches_identity() {
        let a = m(&["101", "011", "110"]);
        assert_eq!(a.mul(&BitMatrix::identity(3)), a);
        assert_eq!(BitMatrix::identity(3).mul(&a), a);
        assert_eq!(a.add(&a), BitMatrix::zeros(3, 3));
    }
}

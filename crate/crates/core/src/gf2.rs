//! Dense bit-packed linear algebra over GF(2).
//!
//! Vectors and matrix rows are packed 64 entries per `u64` word; entry `i`
//! lives in word `i / 64` at bit `i % 64`. Unused high bits of the last word
//! are always zero.
//!
//! Elimination uses a fixed pivot rule: columns are scanned in increasing
//! order and the pivot is the lowest-index remaining row with a one in that
//! column. Solutions and nullspace bases are therefore reproducible.

use std::fmt;

use crate::error::{Error, Result};
use crate::exec::Exec;

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A vector over GF(2) with a fixed length.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for w in v.words.iter_mut() {
            *w = u64::MAX;
        }
        v.mask_tail();
        v
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
            v.flip(i);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    fn from_words(len: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), words_for(len));
        let mut v = Self { len, words };
        v.mask_tail();
        v
    }

    fn mask_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range (len {})", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range (len {})", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range (len {})", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    /// GF(2) addition in place.
    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &BitVector) -> BitVector {
        assert_eq!(self.len, other.len);
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        BitVector::from_words(self.len, words)
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len);
        let parity = self
            .words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones());
        parity & 1 == 1
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Indices of the nonzero entries, in increasing order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + b)
            })
        })
    }

    pub fn first_one(&self) -> Option<usize> {
        self.iter_ones().next()
    }

    /// Concatenation `self ‖ other`.
    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Entries at the given positions, in the given order.
    pub fn select(&self, positions: &[usize]) -> BitVector {
        let mut out = BitVector::zeros(positions.len());
        for (j, &p) in positions.iter().enumerate() {
            if self.get(p) {
                out.set(j, true);
            }
        }
        out
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector[")?;
        for i in 0..self.len {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        write!(f, "]")
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

/// Below this many words, elimination stays on the calling thread.
const PAR_THRESHOLD_WORDS: usize = 1 << 14;
/// Rows handed to one task during parallel elimination.
const PAR_ROW_BLOCK: usize = 64;

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix whose rows are the given vectors, all of length `cols`.
    pub fn from_rows(cols: usize, rows: &[BitVector]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (r, v) in rows.iter().enumerate() {
            assert_eq!(v.len(), cols, "row {r} has length {} != {cols}", v.len());
            m.row_words_mut(r).copy_from_slice(v.words());
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.stride + c / WORD];
        let mask = 1u64 << (c % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn row(&self, r: usize) -> BitVector {
        BitVector::from_words(self.cols, self.row_words(r).to_vec())
    }

    pub fn row_vectors(&self) -> Vec<BitVector> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row(r).iter_ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    /// `self · x`.
    pub fn mul_vec(&self, x: &BitVector) -> Result<BitVector> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!(
                "matrix has {} columns, vector has length {}",
                self.cols,
                x.len()
            )));
        }
        let mut out = BitVector::zeros(self.rows);
        for r in 0..self.rows {
            let parity = self
                .row_words(r)
                .iter()
                .zip(x.words())
                .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones());
            if parity & 1 == 1 {
                out.set(r, true);
            }
        }
        Ok(out)
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in self.row(r).iter_ones() {
                let src = other.row_words(k).to_vec();
                for (a, b) in out.row_words_mut(r).iter_mut().zip(&src) {
                    *a ^= b;
                }
            }
        }
        Ok(out)
    }

    /// Submatrix made of the listed columns, in that order.
    pub fn select_columns(&self, columns: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows, columns.len());
        for r in 0..self.rows {
            let row = self.row_words(r);
            for (j, &c) in columns.iter().enumerate() {
                if (row[c / WORD] >> (c % WORD)) & 1 == 1 {
                    out.set(r, j, true);
                }
            }
        }
        out
    }

    /// Appends the rows of `other` below `self`.
    pub fn stack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "cannot stack matrices with {} and {} columns",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(BitMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            stride: self.stride,
            data,
        })
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    /// `row[dst] ^= row[src]`.
    pub fn add_row(&mut self, src: usize, dst: usize) {
        assert_ne!(src, dst);
        for w in 0..self.stride {
            let v = self.data[src * self.stride + w];
            self.data[dst * self.stride + w] ^= v;
        }
    }

    /// In-place Gaussian elimination; returns the pivot columns.
    ///
    /// With `full = true` the result is the reduced row echelon form, otherwise
    /// only rows below each pivot are cleared.
    fn eliminate(&mut self, full: bool, exec: Exec) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut prow = 0;
        let stride = self.stride;
        let parallel = exec.is_parallel() && self.data.len() >= PAR_THRESHOLD_WORDS;
        for col in 0..self.cols {
            if prow == self.rows {
                break;
            }
            let word = col / WORD;
            let mask = 1u64 << (col % WORD);
            let Some(found) = (prow..self.rows).find(|&r| self.data[r * stride + word] & mask != 0)
            else {
                continue;
            };
            self.swap_rows(found, prow);
            // The pivot row is zero left of `col`, so only words from `word` on matter.
            let pivot: Vec<u64> = self.data[prow * stride + word..(prow + 1) * stride].to_vec();
            let start = if full { 0 } else { prow + 1 };
            let p = prow;
            let reduce = |r: usize, row: &mut [u64]| {
                if r != p && row[word] & mask != 0 {
                    for (a, b) in row[word..].iter_mut().zip(&pivot) {
                        *a ^= b;
                    }
                }
            };
            let tail = &mut self.data[start * stride..];
            if parallel && tail.len() >= PAR_THRESHOLD_WORDS {
                let block = PAR_ROW_BLOCK * stride;
                exec.for_each_chunk_mut(tail, block, |bi, rows| {
                    for (i, row) in rows.chunks_mut(stride).enumerate() {
                        reduce(start + bi * PAR_ROW_BLOCK + i, row);
                    }
                });
            } else {
                for (i, row) in tail.chunks_mut(stride).enumerate() {
                    reduce(start + i, row);
                }
            }
            pivots.push(col);
            prow += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.rank_with(Exec::default())
    }

    pub fn rank_with(&self, exec: Exec) -> usize {
        let mut m = self.clone();
        m.eliminate(false, exec).len()
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (BitMatrix, Vec<usize>) {
        self.rref_with(Exec::default())
    }

    pub fn rref_with(&self, exec: Exec) -> (BitMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.eliminate(true, exec);
        (m, pivots)
    }

    /// Some `x` with `self · x = b`, or `None` when the system is inconsistent.
    ///
    /// Free variables are set to zero, so the answer is deterministic.
    pub fn solve(&self, b: &BitVector) -> Result<Option<BitVector>> {
        self.solve_with(b, Exec::default())
    }

    pub fn solve_with(&self, b: &BitVector, exec: Exec) -> Result<Option<BitVector>> {
        if b.len() != self.rows {
            return Err(Error::Dimension(format!(
                "right-hand side has length {}, matrix has {} rows",
                b.len(),
                self.rows
            )));
        }
        let mut aug = BitMatrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in self.row(r).iter_ones() {
                aug.set(r, c, true);
            }
            if b.get(r) {
                aug.set(r, self.cols, true);
            }
        }
        let pivots = aug.eliminate(true, exec);
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = BitVector::zeros(self.cols);
        for (r, &c) in pivots.iter().enumerate() {
            if aug.get(r, self.cols) {
                x.set(c, true);
            }
        }
        Ok(Some(x))
    }

    /// A basis of `{x : self · x = 0}`, one vector per free column in increasing order.
    pub fn nullspace(&self) -> Vec<BitVector> {
        self.nullspace_with(Exec::default())
    }

    pub fn nullspace_with(&self, exec: Exec) -> Vec<BitVector> {
        let (r, pivots) = self.rref_with(exec);
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut x = BitVector::zeros(self.cols);
                x.set(f, true);
                for (row, &p) in pivots.iter().enumerate() {
                    if r.get(row, f) {
                        x.set(p, true);
                    }
                }
                x
            })
            .collect()
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                write!(f, "{}", if self.get(r, c) { '1' } else { '0' })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Incremental echelon basis for membership tests against a growing span.
#[derive(Clone, Debug)]
pub struct SpanBasis {
    len: usize,
    // (pivot, vector) with each vector reduced against earlier pivots.
    rows: Vec<(usize, BitVector)>,
}

impl SpanBasis {
    pub fn new(len: usize) -> Self {
        Self {
            len,
            rows: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis; the result is zero iff `v` lies in the span.
    pub fn reduce(&self, v: &BitVector) -> BitVector {
        assert_eq!(v.len(), self.len);
        let mut v = v.clone();
        for (p, row) in &self.rows {
            if v.get(*p) {
                v.xor_assign(row);
            }
        }
        v
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v`; returns `false` when it was already in the span.
    pub fn insert(&mut self, v: &BitVector) -> bool {
        let r = self.reduce(v);
        match r.first_one() {
            None => false,
            Some(p) => {
                // keep earlier rows free of the new pivot so `reduce` stays one pass
                for (_, row) in self.rows.iter_mut() {
                    if row.get(p) {
                        row.xor_assign(&r);
                    }
                }
                self.rows.push((p, r));
                true
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hollow_triangle_d1() -> BitMatrix {
        // rows: vertices 0,1,2; cols: edges {0,1},{0,2},{1,2}
        let mut m = BitMatrix::zeros(3, 3);
        for (e, (a, b)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
            m.set(a, e, true);
            m.set(b, e, true);
        }
        m
    }

    #[test]
    fn rank_examples() {
        assert_eq!(BitMatrix::identity(3).rank(), 3);
        assert_eq!(BitMatrix::zeros(4, 5).rank(), 0);
        assert_eq!(hollow_triangle_d1().rank(), 2);
    }

    #[test]
    fn solve_examples() {
        let b = BitVector::from_indices(3, [0, 2]);
        assert_eq!(BitMatrix::identity(3).solve(&b).unwrap(), Some(b.clone()));

        let d1 = hollow_triangle_d1();
        let rhs = BitVector::from_indices(3, [1, 2]);
        let x = d1.solve(&rhs).unwrap().expect("solvable");
        assert_eq!(d1.mul_vec(&x).unwrap(), rhs);
        // edge {1,2} is column 2, the free column; setting it to zero forces {0,1} + {0,2}
        assert_eq!(x, BitVector::from_indices(3, [0, 1]));
        assert!(BitMatrix::identity(3).solve(&rhs).unwrap().is_some());

        let z = BitMatrix::zeros(2, 2);
        assert_eq!(z.solve(&BitVector::from_indices(2, [1])).unwrap(), None);
    }

    #[test]
    fn solve_dimension_mismatch() {
        let err = BitMatrix::identity(3).solve(&BitVector::zeros(2)).unwrap_err();
        assert!(matches!(err, Error::Dimension(_)));
    }

    #[test]
    fn nullspace_examples() {
        assert!(BitMatrix::identity(4).nullspace().is_empty());
        assert_eq!(BitMatrix::zeros(2, 4).nullspace().len(), 4);
        let ns = hollow_triangle_d1().nullspace();
        assert_eq!(ns, vec![BitVector::ones(3)]);
    }

    #[test]
    fn tail_bits_are_masked() {
        let v = BitVector::ones(70);
        assert_eq!(v.weight(), 70);
        assert_eq!(v.words()[1], (1u64 << 6) - 1);
    }

    #[test]
    fn span_basis_membership() {
        let mut s = SpanBasis::new(5);
        assert!(s.insert(&BitVector::from_indices(5, [0, 1])));
        assert!(s.insert(&BitVector::from_indices(5, [1, 2])));
        assert!(!s.insert(&BitVector::from_indices(5, [0, 2])));
        assert!(!s.contains(&BitVector::from_indices(5, [3])));
        assert_eq!(s.dim(), 2);
    }

    fn arb_matrix(max: usize) -> impl Strategy<Value = BitMatrix> {
        (1..max, 1..max).prop_flat_map(|(r, c)| {
            proptest::collection::vec(any::<bool>(), r * c).prop_map(move |bits| {
                let mut m = BitMatrix::zeros(r, c);
                for (i, b) in bits.into_iter().enumerate() {
                    m.set(i / c, i % c, b);
                }
                m
            })
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in arb_matrix(90)) {
            let ns = m.nullspace();
            prop_assert_eq!(m.rank() + ns.len(), m.cols());
            prop_assert!(m.rank() <= m.rows().min(m.cols()));
            for v in &ns {
                prop_assert!(m.mul_vec(v).unwrap().is_zero());
            }
        }

        #[test]
        fn solve_reproduces_rhs(m in arb_matrix(80), seed in any::<u64>()) {
            // rhs in the column space: b = m·x0
            let mut x0 = BitVector::zeros(m.cols());
            for c in 0..m.cols() {
                if (seed >> (c % 64)) & 1 == 1 { x0.set(c, true); }
            }
            let b = m.mul_vec(&x0).unwrap();
            let x = m.solve(&b).unwrap().expect("consistent by construction");
            prop_assert_eq!(m.mul_vec(&x).unwrap(), b.clone());
            prop_assert_eq!(m.solve(&b).unwrap(), Some(x));
        }

        #[test]
        fn rank_invariant_under_row_ops(m in arb_matrix(60), ops in proptest::collection::vec((any::<usize>(), any::<usize>(), any::<bool>()), 0..40)) {
            let mut m2 = m.clone();
            for (a, b, swap) in ops {
                let (a, b) = (a % m2.rows(), b % m2.rows());
                if swap { m2.swap_rows(a, b) } else if a != b { m2.add_row(a, b) }
            }
            prop_assert_eq!(m.rank(), m2.rank());
        }

        #[test]
        fn sequential_and_parallel_agree(m in arb_matrix(70)) {
            prop_assert_eq!(m.rank_with(Exec::Sequential), m.rank_with(Exec::Parallel));
            prop_assert_eq!(m.rref_with(Exec::Sequential), m.rref_with(Exec::Parallel));
        }
    }

    #[test]
    fn large_parallel_elimination_matches_sequential() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut m = BitMatrix::zeros(600, 900);
        for r in 0..600 {
            for c in 0..900 {
                if rng.random_bool(0.1) {
                    m.set(r, c, true);
                }
            }
        }
        assert_eq!(m.rref_with(Exec::Sequential), m.rref_with(Exec::Parallel));
    }
}

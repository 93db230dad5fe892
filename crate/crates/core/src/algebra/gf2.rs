//! Dense GF(2) matrices packed 64 entries to a machine word.

use std::fmt;

/// Number of `u64` words needed for `bits` bits.
pub fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

/// A dense row-major GF(2) matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows.min(32) {
            let s: String = (0..self.cols.min(64)).map(|c| if self.get(r, c) { '1' } else { '.' }).collect();
            writeln!(f, "  {s}")?;
        }
        Ok(())
    }
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        BitMatrix { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix whose column `j` is the packed vector `columns[j]`
    /// (each of length `words_for(rows)`).
    pub fn from_columns(rows: usize, columns: &[Vec<u64>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for_each_bit(col, |i| m.set(i, j, true));
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.stride + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.data[r * self.stride + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        self.data[r * self.stride + c / 64] ^= 1 << (c % 64);
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// `self ^= other`, entrywise.
    pub fn add_assign(&mut self, other: &BitMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a ^= b;
        }
    }

    /// Copies `block` into the sub-matrix starting at (`r0`, `c0`), XOR-ing
    /// with what is there.
    pub fn add_block(&mut self, r0: usize, c0: usize, block: &BitMatrix) {
        for r in 0..block.rows {
            for_each_bit(block.row(r), |c| self.flip(r0 + r, c0 + c));
        }
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for_each_bit(self.row(r), |c| t.set(c, r, true));
        }
        t
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let (lo, hi) = (r * out.stride, (r + 1) * out.stride);
            for_each_bit(self.row(r), |k| {
                let src = other.row(k);
                for (d, s) in out.data[lo..hi].iter_mut().zip(src) {
                    *d ^= s;
                }
            });
        }
        out
    }

    /// Rank by word-parallel Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.eliminate().len()
    }

    pub fn kernel_dim(&self) -> usize {
        self.cols - self.rank()
    }

    /// Reduces to row echelon form in place; returns pivot columns.
    fn eliminate(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut rank = 0;
        let stride = self.stride;
        for c in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let (w, bit) = (c / 64, 1u64 << (c % 64));
            let Some(p) = (rank..self.rows).find(|&r| self.data[r * stride + w] & bit != 0) else {
                continue;
            };
            if p != rank {
                for k in 0..stride {
                    self.data.swap(p * stride + k, rank * stride + k);
                }
            }
            let (head, tail) = self.data.split_at_mut((rank + 1) * stride);
            let pivot = &head[rank * stride..];
            for row in tail.chunks_mut(stride) {
                if row[w] & bit != 0 {
                    for k in w..stride {
                        row[k] ^= pivot[k];
                    }
                }
            }
            pivots.push(c);
            rank += 1;
        }
        pivots
    }

    /// Some `x` with `self * x = b`, or `None` if `b` is outside the column space.
    pub fn solve(&self, b: &[bool]) -> Option<Vec<bool>> {
        assert_eq!(b.len(), self.rows);
        // augmented matrix [A | b]
        let mut aug = BitMatrix::zeros(self.rows, self.cols + 1);
        for (r, &br) in b.iter().enumerate() {
            for_each_bit(self.row(r), |c| aug.set(r, c, true));
            aug.set(r, self.cols, br);
        }
        let pivots = aug.eliminate();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![false; self.cols];
        for (i, &pc) in pivots.iter().enumerate().rev() {
            let flips = (pc + 1..self.cols).filter(|&c| aug.get(i, c) && x[c]).count();
            x[pc] = aug.get(i, self.cols) ^ (flips % 2 == 1);
        }
        Some(x)
    }
}

/// Calls `f` with the index of every set bit of a packed vector.
pub fn for_each_bit(words: &[u64], mut f: impl FnMut(usize)) {
    for (wi, &w) in words.iter().enumerate() {
        let mut w = w;
        while w != 0 {
            let t = w.trailing_zeros() as usize;
            f(wi * 64 + t);
            w &= w - 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rows: usize, cols: usize, seed: u64) -> BitMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = BitMatrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, rng.gen());
            }
        }
        m
    }

    #[test]
    fn basic_ranks() {
        let z = BitMatrix::zeros(3, 5);
        assert_eq!((z.rank(), z.kernel_dim()), (0, 5));
        let i = BitMatrix::identity(4);
        assert_eq!((i.rank(), i.kernel_dim()), (4, 0));
        assert_eq!(BitMatrix::zeros(0, 7).kernel_dim(), 7);
    }

    #[test]
    fn product_against_naive() {
        let a = random(70, 90, 1);
        let b = random(90, 65, 2);
        let p = a.mul(&b);
        for r in 0..70 {
            for c in 0..65 {
                let v = (0..90).fold(false, |acc, k| acc ^ (a.get(r, k) & b.get(k, c)));
                assert_eq!(p.get(r, c), v);
            }
        }
    }

    #[test]
    fn transpose_keeps_rank() {
        let a = random(40, 130, 3);
        assert_eq!(a.rank(), a.transpose().rank());
        assert_eq!(a.transpose().transpose(), a);
    }

    #[test]
    fn solve_roundtrip() {
        let a = random(50, 80, 4);
        let x: Vec<bool> = (0..80).map(|i| i % 3 == 0).collect();
        let mut xm = BitMatrix::zeros(80, 1);
        for (i, &v) in x.iter().enumerate() {
            xm.set(i, 0, v);
        }
        let b: Vec<bool> = (0..50).map(|r| a.mul(&xm).get(r, 0)).collect();
        let y = a.solve(&b).unwrap();
        let mut ym = BitMatrix::zeros(80, 1);
        for (i, &v) in y.iter().enumerate() {
            ym.set(i, 0, v);
        }
        assert_eq!(a.mul(&ym), a.mul(&xm));
        // inconsistent system
        let mut z = BitMatrix::zeros(2, 1);
        z.set(0, 0, true);
        z.set(1, 0, true);
        assert!(z.solve(&[true, false]).is_none());
    }

    #[test]
    fn from_columns_places_bits() {
        let m = BitMatrix::from_columns(70, &[vec![1, 0], vec![0, 1 << 5]]);
        assert!(m.get(0, 0) && m.get(69, 1));
        assert_eq!(m.rank(), 2);
    }
}

//! Dense linear algebra over a prime field `F_p`.
//!
//! Vectors are `Vec<u32>` with entries in `[0, p)`; matrices act on column
//! vectors. Subspaces are kept as reduced row echelon bases, which are unique
//! per subspace and therefore usable as hash keys.

use crate::error::{domain, Result};
use std::fmt;

pub(crate) fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(a % p != 0);
    let mut acc = 1u64;
    let mut base = (a % p) as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpMatrix {
    p: u32,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FpMatrix over F_{} ({}x{})", self.p, self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl FpMatrix {
    pub fn zeros(p: u32, rows: usize, cols: usize) -> Self {
        FpMatrix { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: u32, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from its columns.
    pub fn from_columns(p: u32, rows: usize, columns: &[Vec<u32>]) -> Self {
        let mut m = Self::zeros(p, rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (r, &x) in col.iter().enumerate() {
                m.set(r, c, x % p);
            }
        }
        m
    }

    pub fn from_rows(p: u32, rows: &[Vec<u32>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(p, rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            for (c, &x) in row.iter().enumerate() {
                m.set(r, c, x % p);
            }
        }
        m
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!(self.cols, other.rows);
        let p = self.p as u64;
        let mut out = FpMatrix::zeros(self.p, self.rows, other.cols);
        let mut acc = vec![0u64; other.cols];
        for r in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.get(r, k) as u64;
                if a == 0 {
                    continue;
                }
                for (c, slot) in acc.iter_mut().enumerate() {
                    *slot += a * other.get(k, c) as u64;
                }
                if k % 256 == 255 {
                    acc.iter_mut().for_each(|x| *x %= p);
                }
            }
            for (c, &v) in acc.iter().enumerate() {
                out.set(r, c, (v % p) as u32);
            }
        }
        out
    }

    pub fn add(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let p = self.p;
        FpMatrix {
            p,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| (a + b) % p).collect(),
        }
    }

    pub fn scale(&self, k: u32) -> FpMatrix {
        let p = self.p as u64;
        FpMatrix {
            p: self.p,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| (a as u64 * (k as u64 % p) % p) as u32).collect(),
        }
    }

    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        let mut out = vec![0u32; self.rows];
        self.apply_into(v, &mut out);
        out
    }

    pub fn apply_into(&self, v: &[u32], out: &mut [u32]) {
        debug_assert_eq!(v.len(), self.cols);
        let p = self.p as u64;
        for (r, slot) in out.iter_mut().enumerate() {
            let row = self.row(r);
            let mut acc = 0u64;
            for (a, b) in row.iter().zip(v) {
                acc += *a as u64 * *b as u64;
            }
            *slot = (acc % p) as u32;
        }
    }

    pub fn pow(&self, mut exp: u128) -> FpMatrix {
        assert!(self.is_square());
        let mut acc = FpMatrix::identity(self.p, self.rows);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| (0..self.cols).all(|c| self.get(r, c) == u32::from(r == c)))
    }

    /// The scalar `k` when the matrix equals `k I`.
    pub fn as_scalar(&self) -> Option<u32> {
        if !self.is_square() || self.rows == 0 {
            return None;
        }
        let k = self.get(0, 0);
        let ok = (0..self.rows)
            .all(|r| (0..self.cols).all(|c| self.get(r, c) == if r == c { k } else { 0 }));
        ok.then_some(k)
    }

    pub fn rank(&self) -> usize {
        let rows: Vec<Vec<u32>> = (0..self.rows).map(|r| self.row(r).to_vec()).collect();
        Subspace::span(self.p, self.cols, rows).dim()
    }

    /// Basis of the null space `{x : A x = 0}` in reduced echelon form.
    pub fn kernel(&self) -> Subspace {
        let p = self.p;
        let mut rows: Vec<Vec<u32>> = (0..self.rows).map(|r| self.row(r).to_vec()).collect();
        let pivots = rref_in_place(&mut rows, p);
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivot_cols.contains(c)) {
            let mut v = vec![0u32; self.cols];
            v[free] = 1;
            for &(r, c) in &pivots {
                v[c] = (p - rows[r][free]) % p;
            }
            basis.push(v);
        }
        Subspace::span(p, self.cols, basis)
    }

    pub fn inverse(&self) -> Result<FpMatrix> {
        if !self.is_square() {
            return domain("only square matrices are invertible");
        }
        let n = self.rows;
        let p = self.p;
        let mut rows: Vec<Vec<u32>> = (0..n)
            .map(|r| {
                let mut row = self.row(r).to_vec();
                row.extend((0..n).map(|c| u32::from(c == r)));
                row
            })
            .collect();
        let pivots = rref_in_place(&mut rows, p);
        if pivots.len() < n || pivots.iter().any(|&(_, c)| c >= n) {
            return domain("matrix is singular");
        }
        let inv_rows: Vec<Vec<u32>> = rows.iter().take(n).map(|r| r[n..].to_vec()).collect();
        Ok(FpMatrix::from_rows(p, &inv_rows))
    }

    /// Block diagonal sum.
    pub fn direct_sum(blocks: &[FpMatrix]) -> FpMatrix {
        let p = blocks.first().map_or(2, |b| b.p);
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let mut out = FpMatrix::zeros(p, n, n);
        let mut off = 0;
        for b in blocks {
            assert!(b.is_square());
            for r in 0..b.rows {
                for c in 0..b.cols {
                    out.set(off + r, off + c, b.get(r, c));
                }
            }
            off += b.rows;
        }
        out
    }
}

// Gauss-Jordan on a list of row vectors; returns (row, pivot column) pairs and
// leaves `rows` in reduced echelon form (zero rows at the end).
fn rref_in_place(rows: &mut [Vec<u32>], p: u32) -> Vec<(usize, usize)> {
    let cols = rows.first().map_or(0, Vec::len);
    let p64 = p as u64;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(sel) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, sel);
        let inv = inv_mod(rows[r][c], p) as u64;
        for x in rows[r].iter_mut() {
            *x = (*x as u64 * inv % p64) as u32;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let f = p64 - row[c] as u64;
            for (x, &y) in row.iter_mut().zip(&pivot_row) {
                *x = ((*x as u64 + f * y as u64) % p64) as u32;
            }
        }
        pivots.push((r, c));
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

/// A subspace of `F_p^n` held as its reduced row echelon basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    p: u32,
    ambient: usize,
    basis: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(p: u32, ambient: usize) -> Self {
        Subspace { p, ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(p: u32, ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| (0..ambient).map(|j| u32::from(i == j)).collect())
            .collect();
        Subspace { p, ambient, basis, pivots: (0..ambient).collect() }
    }

    pub fn span(p: u32, ambient: usize, mut vectors: Vec<Vec<u32>>) -> Self {
        for v in &vectors {
            assert_eq!(v.len(), ambient);
        }
        let pivots = rref_in_place(&mut vectors, p);
        vectors.truncate(pivots.len());
        Subspace { p, ambient, basis: vectors, pivots: pivots.into_iter().map(|(_, c)| c).collect() }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Reduced echelon basis (canonical for the subspace).
    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `v` against the basis in place; returns true when the result is zero.
    pub fn reduce(&self, v: &mut [u32]) -> bool {
        let p = self.p as u64;
        for (b, &c) in self.basis.iter().zip(&self.pivots) {
            let k = v[c];
            if k == 0 {
                continue;
            }
            let f = p - k as u64;
            for (x, &y) in v.iter_mut().zip(b) {
                if y != 0 {
                    *x = ((*x as u64 + f * y as u64) % p) as u32;
                }
            }
        }
        v.iter().all(|&x| x == 0)
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w)
    }

    /// Adds a vector, keeping the basis in reduced echelon form. Returns
    /// false when `v` was already in the span.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        if self.reduce(&mut w) {
            return false;
        }
        let p = self.p;
        let c = w.iter().position(|&x| x != 0).expect("nonzero after reduction");
        let inv = inv_mod(w[c], p) as u64;
        for x in w.iter_mut() {
            *x = (*x as u64 * inv % p as u64) as u32;
        }
        for b in self.basis.iter_mut() {
            let k = b[c];
            if k != 0 {
                let f = (p - k) as u64;
                for (x, &y) in b.iter_mut().zip(&w) {
                    *x = ((*x as u64 + f * y as u64) % p as u64) as u32;
                }
            }
        }
        let pos = self.pivots.partition_point(|&q| q < c);
        self.pivots.insert(pos, c);
        self.basis.insert(pos, w);
        true
    }

    /// Coordinates of `v` (assumed to lie in the subspace) on the echelon basis.
    pub fn coordinates(&self, v: &[u32]) -> Vec<u32> {
        self.pivots.iter().map(|&c| v[c]).collect()
    }

    /// Matrix of `op` restricted to this (op-invariant) subspace, on the echelon basis.
    pub fn restrict(&self, op: &FpMatrix) -> Result<FpMatrix> {
        let mut cols = Vec::with_capacity(self.dim());
        for b in &self.basis {
            let image = op.apply(b);
            if !self.contains(&image) {
                return domain("subspace is not invariant under the operator");
            }
            cols.push(self.coordinates(&image));
        }
        Ok(FpMatrix::from_columns(self.p, self.dim(), &cols))
    }

    /// The vector with the given coordinates on the echelon basis.
    pub fn combine(&self, coords: &[u32]) -> Vec<u32> {
        let p = self.p as u64;
        let mut out = vec![0u64; self.ambient];
        for (b, &k) in self.basis.iter().zip(coords) {
            if k == 0 {
                continue;
            }
            for (o, &y) in out.iter_mut().zip(b) {
                *o = (*o + k as u64 * y as u64) % p;
            }
        }
        out.into_iter().map(|x| x as u32).collect()
    }

    /// Basis vectors embedded into a larger ambient space at `offset`.
    pub fn embedded_basis(&self, total: usize, offset: usize) -> Vec<Vec<u32>> {
        self.basis
            .iter()
            .map(|b| {
                let mut v = vec![0u32; total];
                v[offset..offset + self.ambient].copy_from_slice(b);
                v
            })
            .collect()
    }
}

/// Iterates over the nonzero vectors of `F_p^n` whose first nonzero
/// coordinate is 1 (one representative per line), in lexicographic order of
/// their base-p index.
pub fn projective_points(p: u32, n: usize) -> impl Iterator<Item = Vec<u32>> {
    (0..n).rev().flat_map(move |lead| {
        let tail = n - lead - 1;
        let count = (p as u128).pow(tail as u32);
        (0..count).map(move |mut code| {
            let mut v = vec![0u32; n];
            v[lead] = 1;
            for x in v[lead + 1..].iter_mut().rev() {
                *x = (code % p as u128) as u32;
                code /= p as u128;
            }
            v
        })
    })
}

/// Number of lines in `F_p^n`, `(p^n - 1) / (p - 1)`.
pub fn projective_count(p: u32, n: usize) -> u128 {
    ((p as u128).pow(n as u32) - 1) / (p as u128 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn kernel_and_rank() {
        let a = FpMatrix::from_rows(3, &[vec![1, 2, 0], vec![2, 1, 0]]);
        assert_eq!(a.rank(), 1);
        let k = a.kernel();
        assert_eq!(k.dim(), 2);
        for v in k.basis() {
            assert!(a.apply(v).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let a = FpMatrix::from_rows(5, &[vec![1, 2, 3], vec![0, 1, 4], vec![2, 0, 1]]);
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).is_identity());
        let singular = FpMatrix::from_rows(5, &[vec![1, 2], vec![2, 4]]);
        assert!(singular.inverse().is_err());
    }

    #[test]
    fn projective_points_cover_lines() {
        for &(p, n) in &[(2u32, 4usize), (3, 3), (5, 2)] {
            let pts: Vec<_> = projective_points(p, n).collect();
            assert_eq!(pts.len() as u128, projective_count(p, n));
            let spans: std::collections::HashSet<_> = pts
                .iter()
                .map(|v| Subspace::span(p, n, vec![v.clone()]))
                .collect();
            assert_eq!(spans.len(), pts.len());
        }
    }

    proptest! {
        #[test]
        fn echelon_basis_is_canonical(seed in prop::collection::vec(0u32..3, 12)) {
            let vs: Vec<Vec<u32>> = seed.chunks(4).map(|c| c.to_vec()).collect();
            let a = Subspace::span(3, 4, vs.clone());
            let mut rev = vs.clone();
            rev.reverse();
            let b = Subspace::span(3, 4, rev);
            prop_assert_eq!(&a, &b);
            let mut c = Subspace::zero(3, 4);
            for v in &vs {
                c.insert(v);
            }
            prop_assert_eq!(&a, &c);
            for v in &vs {
                prop_assert!(a.contains(v));
                let coords = a.coordinates(v);
                prop_assert_eq!(a.combine(&coords), v.clone());
            }
        }
    }
}

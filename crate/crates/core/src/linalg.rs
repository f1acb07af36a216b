//! Dense exact linear algebra over prime fields.
//!
//! Vectors are rows and matrices act on the right: the image of `v` under `m` is `v * m`,
//! and the composite "first `f`, then `g`" is the product `f * g`.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("{0} is not a prime below 65536")]
    NotPrime(u32),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("subspace is not contained in the given ambient subspace")]
    NotContained,
    #[error("map does not respect the given subquotient flags")]
    NotWellDefined,
}

/// A prime field GF(p) with p < 2^16, so that products of two residues fit in `u32`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    p: u32,
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldSpec {
    pub fn new(p: u32) -> Result<Self, LinalgError> {
        if p >= 1 << 16 || !is_prime(p) {
            return Err(LinalgError::NotPrime(p));
        }
        Ok(Self { p })
    }

    pub fn p(self) -> u32 {
        self.p
    }

    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        (a * b) % self.p
    }

    pub fn pow(self, mut a: u32, mut e: u64) -> u32 {
        let mut r = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    pub fn inv(self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.p), "inverse of zero in GF({})", self.p);
        self.pow(a, (self.p - 2) as u64)
    }

    /// The residue of (−1)^k.
    pub fn sign(self, k: i64) -> u32 {
        if k.rem_euclid(2) == 0 {
            1
        } else {
            self.p - 1
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpMatrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FpMatrix[GF({}) {}x{}]", self.field.p, self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "\n  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

impl fmt::Display for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

const WORD: usize = 64;

fn pack_row(row: &[u32]) -> Vec<u64> {
    let mut w = vec![0u64; row.len().div_ceil(WORD)];
    for (j, &x) in row.iter().enumerate() {
        if x & 1 == 1 {
            w[j / WORD] |= 1 << (j % WORD);
        }
    }
    w
}

#[inline]
fn bit(w: &[u64], j: usize) -> bool {
    (w[j / WORD] >> (j % WORD)) & 1 == 1
}

/// In-place reduced echelon form with pivots restricted to the first `limit` columns.
/// Returns the pivot columns; pivot `k` sits in row `k`.
fn echelon(m: &mut FpMatrix, limit: usize) -> Vec<usize> {
    if m.field.p == 2 {
        echelon_gf2(m, limit)
    } else {
        echelon_generic(m, limit)
    }
}

fn echelon_gf2(m: &mut FpMatrix, limit: usize) -> Vec<usize> {
    let (rows, cols) = (m.rows, m.cols);
    let mut packed: Vec<Vec<u64>> = (0..rows).map(|i| pack_row(m.row(i))).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..limit.min(cols) {
        if r == rows {
            break;
        }
        let Some(s) = (r..rows).find(|&i| bit(&packed[i], c)) else {
            continue;
        };
        packed.swap(r, s);
        let (head, tail) = packed.split_at_mut(r);
        let (pivot_row, rest) = tail.split_first_mut().unwrap();
        let first = c / WORD;
        for other in head.iter_mut().chain(rest.iter_mut()) {
            if bit(other, c) {
                for (o, p) in other[first..].iter_mut().zip(&pivot_row[first..]) {
                    *o ^= *p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    for (i, w) in packed.iter().enumerate() {
        let row = &mut m.data[i * cols..(i + 1) * cols];
        for (j, x) in row.iter_mut().enumerate() {
            *x = bit(w, j) as u32;
        }
    }
    pivots
}

fn echelon_generic(m: &mut FpMatrix, limit: usize) -> Vec<usize> {
    let f = m.field;
    let (rows, cols) = (m.rows, m.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..limit.min(cols) {
        if r == rows {
            break;
        }
        let Some(s) = (r..rows).find(|&i| m.data[i * cols + c] != 0) else {
            continue;
        };
        if s != r {
            for j in 0..cols {
                m.data.swap(r * cols + j, s * cols + j);
            }
        }
        let inv = f.inv(m.data[r * cols + c]);
        for j in c..cols {
            m.data[r * cols + j] = f.mul(m.data[r * cols + j], inv);
        }
        let pivot_row: Vec<u32> = m.data[r * cols + c..(r + 1) * cols].to_vec();
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = m.data[i * cols + c];
            if factor == 0 {
                continue;
            }
            let neg = f.neg(factor);
            let row = &mut m.data[i * cols + c..(i + 1) * cols];
            for (x, &pv) in row.iter_mut().zip(&pivot_row) {
                if pv != 0 {
                    *x = (*x + neg * pv) % f.p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

impl FpMatrix {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Self { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % field.p;
        }
        m
    }

    pub fn scalar(field: FieldSpec, n: usize, c: u32) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = c % field.p;
        }
        m
    }

    pub fn from_vec(field: FieldSpec, rows: usize, cols: usize, data: Vec<u32>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows*cols");
        let data = data.into_iter().map(|x| x % field.p).collect();
        Self { field, rows, cols, data }
    }

    pub fn from_i64(field: FieldSpec, rows: usize, cols: usize, data: &[i64]) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows*cols");
        Self { field, rows, cols, data: data.iter().map(|&x| field.reduce(x)).collect() }
    }

    /// Builds a matrix from signed rows; all rows must have length `cols`.
    pub fn from_rows(field: FieldSpec, cols: usize, rows: &[Vec<i64>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().map(|&x| field.reduce(x)));
        }
        Self { field, rows: rows.len(), cols, data }
    }

    pub fn row_vector(field: FieldSpec, v: &[u32]) -> Self {
        Self::from_vec(field, 1, v.len(), v.to_vec())
    }

    pub fn from_fn(field: FieldSpec, rows: usize, cols: usize, f: impl Fn(usize, usize) -> i64) -> Self {
        let mut m = Self::zeros(field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = field.reduce(f(i, j));
            }
        }
        m
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.field.p;
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: u32) {
        let k = i * self.cols + j;
        self.data[k] = self.field.add(self.data[k], v % self.field.p);
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_matrix(&self, i: usize) -> FpMatrix {
        Self::row_vector(self.field, self.row(i))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Self::identity(self.field, self.rows)
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn scale(&self, c: u32) -> FpMatrix {
        let c = c % self.field.p;
        Self {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| self.field.mul(x, c)).collect(),
        }
    }

    /// Scales by (−1)^k.
    pub fn signed(&self, k: i64) -> FpMatrix {
        if k.rem_euclid(2) == 0 {
            self.clone()
        } else {
            -self
        }
    }

    /// `v * self` for a row vector `v`.
    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.rows, "vector length must equal row count");
        let mut acc = vec![0u64; self.cols];
        for (k, &c) in v.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (a, &b) in acc.iter_mut().zip(self.row(k)) {
                *a += (c * b) as u64;
            }
        }
        acc.into_iter().map(|a| (a % self.field.p as u64) as u32).collect()
    }

    pub fn hstack(field: FieldSpec, rows: usize, parts: &[&FpMatrix]) -> FpMatrix {
        let cols: usize = parts.iter().map(|m| m.cols).sum();
        let mut out = Self::zeros(field, rows, cols);
        let mut off = 0;
        for m in parts {
            assert_eq!(m.rows, rows, "hstack row mismatch");
            out.set_block(0, off, m);
            off += m.cols;
        }
        out
    }

    pub fn vstack(field: FieldSpec, cols: usize, parts: &[&FpMatrix]) -> FpMatrix {
        let mut data = Vec::new();
        let mut rows = 0;
        for m in parts {
            assert_eq!(m.cols, cols, "vstack column mismatch");
            data.extend_from_slice(&m.data);
            rows += m.rows;
        }
        Self { field, rows, cols, data }
    }

    pub fn block_diag(field: FieldSpec, parts: &[&FpMatrix]) -> FpMatrix {
        let rows = parts.iter().map(|m| m.rows).sum();
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Self::zeros(field, rows, cols);
        let (mut r, mut c) = (0, 0);
        for m in parts {
            out.set_block(r, c, m);
            r += m.rows;
            c += m.cols;
        }
        out
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> FpMatrix {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "block out of range");
        let mut out = Self::zeros(self.field, rows, cols);
        for i in 0..rows {
            out.data[i * cols..(i + 1) * cols]
                .copy_from_slice(&self.data[(r0 + i) * self.cols + c0..(r0 + i) * self.cols + c0 + cols]);
        }
        out
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, m: &FpMatrix) {
        assert!(r0 + m.rows <= self.rows && c0 + m.cols <= self.cols, "block out of range");
        for i in 0..m.rows {
            self.data[(r0 + i) * self.cols + c0..(r0 + i) * self.cols + c0 + m.cols].copy_from_slice(m.row(i));
        }
    }

    pub fn add_block(&mut self, r0: usize, c0: usize, m: &FpMatrix) {
        for i in 0..m.rows {
            for j in 0..m.cols {
                self.add_at(r0 + i, c0 + j, m.get(i, j));
            }
        }
    }

    pub fn select_rows(&self, idx: &[usize]) -> FpMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Self { field: self.field, rows: idx.len(), cols: self.cols, data }
    }

    pub fn select_cols(&self, idx: &[usize]) -> FpMatrix {
        let mut out = Self::zeros(self.field, self.rows, idx.len());
        for i in 0..self.rows {
            for (k, &j) in idx.iter().enumerate() {
                out.data[i * idx.len() + k] = self.data[i * self.cols + j];
            }
        }
        out
    }

    /// Kronecker product; row index `(i, k)` maps to `i * rhs.rows + k`.
    pub fn kron(&self, rhs: &FpMatrix) -> FpMatrix {
        let f = self.field;
        let mut out = Self::zeros(f, self.rows * rhs.rows, self.cols * rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == 0 {
                    continue;
                }
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        let b = rhs.get(k, l);
                        if b != 0 {
                            out.data[(i * rhs.rows + k) * out.cols + j * rhs.cols + l] = f.mul(a, b);
                        }
                    }
                }
            }
        }
        out
    }

    fn check_same_shape(&self, rhs: &FpMatrix, what: &str) {
        assert_eq!(self.field, rhs.field, "{what}: field mismatch");
        assert_eq!(self.shape(), rhs.shape(), "{what}: shape mismatch");
    }

    pub fn rref(&self) -> (FpMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = echelon(&mut m, self.cols);
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inverse(&self) -> Option<FpMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::hstack(self.field, n, &[self, &Self::identity(self.field, n)]);
        let pivots = echelon(&mut aug, n);
        if pivots.len() < n {
            return None;
        }
        Some(aug.block(0, n, n, n))
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    pub fn row_space(&self) -> Subspace {
        Subspace::from_rows(self)
    }
}

impl Add for &FpMatrix {
    type Output = FpMatrix;
    fn add(self, rhs: &FpMatrix) -> FpMatrix {
        self.check_same_shape(rhs, "add");
        let f = self.field;
        FpMatrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f.add(a, b)).collect(),
        }
    }
}

impl Sub for &FpMatrix {
    type Output = FpMatrix;
    fn sub(self, rhs: &FpMatrix) -> FpMatrix {
        self.check_same_shape(rhs, "sub");
        let f = self.field;
        FpMatrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f.sub(a, b)).collect(),
        }
    }
}

impl Neg for &FpMatrix {
    type Output = FpMatrix;
    fn neg(self) -> FpMatrix {
        let f = self.field;
        FpMatrix { field: f, rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| f.neg(a)).collect() }
    }
}

impl Mul for &FpMatrix {
    type Output = FpMatrix;
    fn mul(self, rhs: &FpMatrix) -> FpMatrix {
        assert_eq!(self.field, rhs.field, "mul: field mismatch");
        assert_eq!(self.cols, rhs.rows, "mul: inner dimension mismatch ({}x{} * {}x{})", self.rows, self.cols, rhs.rows, rhs.cols);
        let f = self.field;
        let (n, m) = (self.rows, rhs.cols);
        let mut out = FpMatrix::zeros(f, n, m);
        if m == 0 || n == 0 {
            return out;
        }
        if f.p == 2 {
            let packed: Vec<Vec<u64>> = (0..rhs.rows).map(|k| pack_row(rhs.row(k))).collect();
            let words = m.div_ceil(WORD);
            let mut acc = vec![0u64; words];
            for i in 0..n {
                acc.iter_mut().for_each(|w| *w = 0);
                for (k, &a) in self.row(i).iter().enumerate() {
                    if a != 0 {
                        for (w, &b) in acc.iter_mut().zip(&packed[k]) {
                            *w ^= b;
                        }
                    }
                }
                let row = &mut out.data[i * m..(i + 1) * m];
                for (j, x) in row.iter_mut().enumerate() {
                    *x = bit(&acc, j) as u32;
                }
            }
        } else {
            let mut acc = vec![0u64; m];
            for i in 0..n {
                acc.iter_mut().for_each(|w| *w = 0);
                for (k, &a) in self.row(i).iter().enumerate() {
                    if a != 0 {
                        for (w, &b) in acc.iter_mut().zip(rhs.row(k)) {
                            *w += (a * b) as u64;
                        }
                    }
                }
                let row = &mut out.data[i * m..(i + 1) * m];
                for (x, &a) in row.iter_mut().zip(&acc) {
                    *x = (a % f.p as u64) as u32;
                }
            }
        }
        out
    }
}

/// Basis of `{v : v * m = 0}`.
pub fn kernel_basis(m: &FpMatrix) -> Subspace {
    let f = m.field;
    let n = m.rows;
    let mut aug = FpMatrix::hstack(f, n, &[m, &FpMatrix::identity(f, n)]);
    let rank = echelon(&mut aug, m.cols).len();
    let kernel = aug.block(rank, m.cols, n - rank, n);
    Subspace::from_rows(&kernel)
}

/// Row space of `m`.
pub fn image_basis(m: &FpMatrix) -> Subspace {
    Subspace::from_rows(m)
}

/// Some `x` with `x * a = b`, or `None` when no solution exists.
pub fn solve(a: &FpMatrix, b: &FpMatrix) -> Option<FpMatrix> {
    LeftSolver::new(a).solve(b)
}

/// Precomputed reduction of `a` for repeated solves of `x * a = b`.
#[derive(Clone, Debug)]
pub struct LeftSolver {
    reduced: FpMatrix,
    transform: FpMatrix,
    pivots: Vec<usize>,
}

impl LeftSolver {
    pub fn new(a: &FpMatrix) -> Self {
        let f = a.field;
        let n = a.rows;
        let mut aug = FpMatrix::hstack(f, n, &[a, &FpMatrix::identity(f, n)]);
        let pivots = echelon(&mut aug, a.cols);
        let r = pivots.len();
        Self { reduced: aug.block(0, 0, r, a.cols), transform: aug.block(0, a.cols, r, n), pivots }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn solve(&self, b: &FpMatrix) -> Option<FpMatrix> {
        assert_eq!(b.cols, self.reduced.cols, "solve: column count mismatch");
        let y = b.select_cols(&self.pivots);
        if &(&y * &self.reduced) != b {
            return None;
        }
        Some(&y * &self.transform)
    }
}

/// A subspace of GF(p)^n held by its reduced row-echelon basis.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subspace {
    ambient: usize,
    basis: FpMatrix,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}) {:?}", self.dim(), self.ambient, self.basis)
    }
}

impl Subspace {
    pub fn from_rows(m: &FpMatrix) -> Self {
        let mut r = m.clone();
        let pivots = echelon(&mut r, m.cols);
        let basis = r.block(0, 0, pivots.len(), m.cols);
        Self { ambient: m.cols, basis, pivots }
    }

    pub fn zero(field: FieldSpec, ambient: usize) -> Self {
        Self { ambient, basis: FpMatrix::zeros(field, 0, ambient), pivots: vec![] }
    }

    pub fn full(field: FieldSpec, ambient: usize) -> Self {
        Self { ambient, basis: FpMatrix::identity(field, ambient), pivots: (0..ambient).collect() }
    }

    pub fn field(&self) -> FieldSpec {
        self.basis.field
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &FpMatrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn check_ambient(&self, other: &Subspace) -> Result<(), LinalgError> {
        if self.ambient != other.ambient || self.field() != other.field() {
            return Err(LinalgError::DimensionMismatch(format!(
                "ambient {} vs {}",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }

    /// Residual of `v` after subtracting its projection along the echelon basis.
    fn residual(&self, v: &[u32]) -> Vec<u32> {
        let f = self.field();
        let mut r = v.to_vec();
        for (k, &c) in self.pivots.iter().enumerate() {
            let a = r[c];
            if a == 0 {
                continue;
            }
            let neg = f.neg(a);
            for (x, &b) in r.iter_mut().zip(self.basis.row(k)) {
                if b != 0 {
                    *x = f.add(*x, f.mul(neg, b));
                }
            }
        }
        r
    }

    pub fn contains_vector(&self, v: &[u32]) -> bool {
        assert_eq!(v.len(), self.ambient, "vector length must equal ambient dimension");
        self.residual(v).iter().all(|&x| x == 0)
    }

    /// Every row of `m` lies in the subspace.
    pub fn contains_rows(&self, m: &FpMatrix) -> bool {
        (0..m.rows).all(|i| self.contains_vector(m.row(i)))
    }

    pub fn contains(&self, other: &Subspace) -> Result<bool, LinalgError> {
        self.check_ambient(other)?;
        Ok(self.contains_rows(&other.basis))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_ambient(other)?;
        let stacked = FpMatrix::vstack(self.field(), self.ambient, &[&self.basis, &other.basis]);
        Ok(Subspace::from_rows(&stacked))
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_ambient(other)?;
        let stacked = FpMatrix::vstack(self.field(), self.ambient, &[&self.basis, &other.basis]);
        let k = kernel_basis(&stacked);
        let coeffs = k.basis.block(0, 0, k.dim(), self.dim());
        Ok(Subspace::from_rows(&(&coeffs * &self.basis)))
    }

    /// Coordinates of vectors in the span with respect to the echelon basis.
    pub fn coordinates(&self, m: &FpMatrix) -> Result<FpMatrix, LinalgError> {
        if !self.contains_rows(m) {
            return Err(LinalgError::NotContained);
        }
        Ok(m.select_cols(&self.pivots))
    }

    /// Image of the subspace under `f` (a map from the ambient space).
    pub fn image_under(&self, f: &FpMatrix) -> Subspace {
        Subspace::from_rows(&(&self.basis * f))
    }

    /// Preimage `{v : v * f ∈ self}` inside the source of `f`.
    pub fn preimage_under(&self, f: &FpMatrix) -> Subspace {
        let stacked = FpMatrix::vstack(self.field(), self.ambient, &[f, &self.basis]);
        let k = kernel_basis(&stacked);
        Subspace::from_rows(&k.basis.block(0, 0, k.dim(), f.rows))
    }

    /// Projection `V → V/U` (here `self = U`) in coordinates: rows are indexed by the echelon basis of `V`.
    pub fn quotient_map(&self, v: &Subspace) -> Result<FpMatrix, LinalgError> {
        let sq = Subquotient::new(v.clone(), self.clone())?;
        sq.coords(&v.basis)
    }
}

/// A subquotient `num / den` of an ambient space with a deterministic complement of `den` in `num`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subquotient {
    num: Subspace,
    den: Subspace,
    complement: FpMatrix,
    proj: FpMatrix,
}

impl Subquotient {
    pub fn new(num: Subspace, den: Subspace) -> Result<Self, LinalgError> {
        if !num.contains(&den)? {
            return Err(LinalgError::NotContained);
        }
        let f = num.field();
        let n = num.ambient;
        // Complement: echelon rows of `num` not already spanned by `den` plus earlier picks.
        let mut acc = den.clone();
        let mut picked = Vec::new();
        for i in 0..num.dim() {
            let row = num.basis.row(i);
            if !acc.contains_vector(row) {
                picked.push(i);
                let stacked = FpMatrix::vstack(f, n, &[&acc.basis, &num.basis.row_matrix(i)]);
                acc = Subspace::from_rows(&stacked);
            }
        }
        let complement = num.basis.select_rows(&picked);
        let frame = FpMatrix::vstack(f, n, &[&den.basis, &complement]).select_cols(&num.pivots);
        let inv = frame.inverse().expect("frame of a subquotient is invertible");
        let proj = inv.block(0, den.dim(), num.dim(), complement.rows);
        Ok(Self { num, den, complement, proj })
    }

    /// The whole space `GF(p)^n` as a subquotient of itself.
    pub fn full(field: FieldSpec, n: usize) -> Self {
        Self::new(Subspace::full(field, n), Subspace::zero(field, n)).expect("0 ⊆ full")
    }

    pub fn dim(&self) -> usize {
        self.complement.rows
    }

    pub fn ambient_dim(&self) -> usize {
        self.num.ambient
    }

    pub fn field(&self) -> FieldSpec {
        self.num.field()
    }

    pub fn num(&self) -> &Subspace {
        &self.num
    }

    pub fn den(&self) -> &Subspace {
        &self.den
    }

    /// Ambient representatives of the quotient basis.
    pub fn complement(&self) -> &FpMatrix {
        &self.complement
    }

    /// Quotient coordinates of ambient vectors that lie in `num`.
    pub fn coords(&self, m: &FpMatrix) -> Result<FpMatrix, LinalgError> {
        if !self.num.contains_rows(m) {
            return Err(LinalgError::NotContained);
        }
        Ok(self.coords_unchecked(m))
    }

    pub fn coords_unchecked(&self, m: &FpMatrix) -> FpMatrix {
        &m.select_cols(&self.num.pivots) * &self.proj
    }

    /// Ambient representatives of quotient coordinate rows.
    pub fn lift(&self, c: &FpMatrix) -> FpMatrix {
        c * &self.complement
    }

    /// Induced map `self → tgt` of an ambient map `f`.
    pub fn induced(&self, f: &FpMatrix, tgt: &Subquotient) -> Result<FpMatrix, LinalgError> {
        induced_map_on_subquotients(f, self, tgt)
    }
}

pub fn induced_map_on_subquotients(f: &FpMatrix, src: &Subquotient, tgt: &Subquotient) -> Result<FpMatrix, LinalgError> {
    if f.rows != src.ambient_dim() || f.cols != tgt.ambient_dim() {
        return Err(LinalgError::DimensionMismatch(format!(
            "map {}x{} between ambients {} and {}",
            f.rows,
            f.cols,
            src.ambient_dim(),
            tgt.ambient_dim()
        )));
    }
    let num_img = &src.num.basis * f;
    let den_img = &src.den.basis * f;
    if !tgt.num.contains_rows(&num_img) || !tgt.den.contains_rows(&den_img) {
        return Err(LinalgError::NotWellDefined);
    }
    Ok(tgt.coords_unchecked(&(&src.complement * f)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32) -> FieldSpec {
        FieldSpec::new(p).unwrap()
    }

    #[test]
    fn field_rejects_composites() {
        assert!(FieldSpec::new(4).is_err());
        assert!(FieldSpec::new(1).is_err());
        assert_eq!(gf(7).inv(3), 5);
    }

    #[test]
    fn rref_examples() {
        let m = FpMatrix::from_rows(gf(2), 2, &[vec![1, 1], vec![1, 1]]);
        let (r, piv) = m.rref();
        assert_eq!(r, FpMatrix::from_rows(gf(2), 2, &[vec![1, 1], vec![0, 0]]));
        assert_eq!(piv, vec![0]);
        let e = FpMatrix::zeros(gf(2), 0, 0);
        assert_eq!(e.rref().1.len(), 0);
        let m = FpMatrix::from_rows(gf(3), 1, &[vec![2]]);
        assert_eq!(m.rref().0, FpMatrix::from_rows(gf(3), 1, &[vec![1]]));
    }

    #[test]
    fn kernel_image_examples() {
        let z = FpMatrix::zeros(gf(2), 3, 2);
        assert_eq!((kernel_basis(&z).dim(), image_basis(&z).dim()), (3, 0));
        let i = FpMatrix::identity(gf(3), 4);
        assert_eq!((kernel_basis(&i).dim(), image_basis(&i).dim()), (0, 4));
        let m = FpMatrix::from_rows(gf(2), 2, &[vec![1, 0], vec![1, 0], vec![0, 1]]);
        assert_eq!((kernel_basis(&m).dim(), image_basis(&m).dim()), (1, 2));
    }

    #[test]
    fn solve_examples() {
        let f = gf(5);
        let b = FpMatrix::from_rows(f, 2, &[vec![1, 4], vec![3, 3]]);
        assert_eq!(solve(&FpMatrix::identity(f, 2), &b), Some(b.clone()));
        let z = FpMatrix::zeros(f, 3, 2);
        let x = solve(&z, &FpMatrix::zeros(f, 1, 2)).unwrap();
        assert!((&x * &z).is_zero());
        let a = FpMatrix::from_rows(gf(2), 2, &[vec![1, 1]]);
        assert_eq!(solve(&a, &FpMatrix::from_rows(gf(2), 2, &[vec![1, 0]])), None);
    }

    #[test]
    fn subspace_examples() {
        let f = gf(2);
        let u = Subspace::from_rows(&FpMatrix::from_rows(f, 2, &[vec![1, 0]]));
        let w = Subspace::from_rows(&FpMatrix::from_rows(f, 2, &[vec![0, 1]]));
        assert_eq!(u.sum(&w).unwrap().dim(), 2);
        assert_eq!(u.intersect(&w).unwrap().dim(), 0);
        assert_eq!(u.sum(&u).unwrap(), u);
        assert_eq!(u.intersect(&u).unwrap(), u);
        let big = Subspace::zero(f, 3);
        assert!(matches!(u.sum(&big), Err(LinalgError::DimensionMismatch(_))));
        assert!(matches!(u.quotient_map(&w), Err(LinalgError::NotContained)));
    }

    #[test]
    fn induced_map_examples() {
        let f = gf(3);
        let v = Subspace::full(f, 3);
        let u = Subspace::from_rows(&FpMatrix::from_rows(f, 3, &[vec![1, 1, 0]]));
        let sq = Subquotient::new(v.clone(), u.clone()).unwrap();
        let id = induced_map_on_subquotients(&FpMatrix::identity(f, 3), &sq, &sq).unwrap();
        assert!(id.is_identity());
        let zero = induced_map_on_subquotients(&FpMatrix::zeros(f, 3, 3), &sq, &sq).unwrap();
        assert!(zero.is_zero());
        // A map landing inside the denominator induces zero.
        let into_u = FpMatrix::from_rows(f, 3, &[vec![1, 1, 0], vec![2, 2, 0], vec![0, 0, 0]]);
        assert!(induced_map_on_subquotients(&into_u, &sq, &sq).unwrap().is_zero());
        let swap = FpMatrix::from_rows(f, 3, &[vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
        assert_eq!(induced_map_on_subquotients(&swap, &sq, &sq), Err(LinalgError::NotWellDefined));
    }
}

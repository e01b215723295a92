//! Exact arithmetic over GF(p) and dense linear algebra.
//!
//! Scalars carry their modulus and refuse to mix moduli. Matrices are dense
//! row-major grids over a single modulus with deterministic row reduction
//! (leftmost pivot, topmost row), so every derived basis is canonical and
//! subspace equality is literal equality of the reduced representations.

use serde::Serialize;
use std::fmt;
use thiserror::Error;

/// Largest modulus accepted by [`Prime::new`]. Everything in this crate is
/// desk-scale; larger primes are rejected rather than silently slow.
pub const DEFAULT_MAX_MODULUS: u32 = 97;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfpError {
    #[error("modulus {0} is not prime")]
    NotPrime(u32),
    #[error("modulus {0} exceeds supported bound {1}")]
    ModulusTooLarge(u32, u32),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("inversion of zero in GF({0})")]
    ZeroInverse(u32),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("not a subspace: {0}")]
    NotASubspace(String),
}

/// A validated prime modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Prime(u32);

impl Prime {
    /// Validate `p` by trial division, bounded by [`DEFAULT_MAX_MODULUS`].
    pub fn new(p: u32) -> Result<Self, GfpError> {
        Self::with_bound(p, DEFAULT_MAX_MODULUS)
    }

    /// Validate `p` by trial division against an explicit bound.
    pub fn with_bound(p: u32, bound: u32) -> Result<Self, GfpError> {
        if p > bound {
            return Err(GfpError::ModulusTooLarge(p, bound));
        }
        if p < 2 {
            return Err(GfpError::NotPrime(p));
        }
        let mut d = 2;
        while d * d <= p {
            if p % d == 0 {
                return Err(GfpError::NotPrime(p));
            }
            d += 1;
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

/// A residue in GF(p), bundled with its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u32,
    modulus: u32,
}

impl Fp {
    pub fn new(value: i64, p: Prime) -> Self {
        let m = p.get() as i64;
        Fp {
            value: value.rem_euclid(m) as u32,
            modulus: p.get(),
        }
    }

    pub fn zero(p: Prime) -> Self {
        Fp { value: 0, modulus: p.get() }
    }

    pub fn one(p: Prime) -> Self {
        Fp { value: 1 % p.get(), modulus: p.get() }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn same_modulus(self, rhs: Fp) -> Result<(), GfpError> {
        if self.modulus == rhs.modulus {
            Ok(())
        } else {
            Err(GfpError::ModulusMismatch(self.modulus, rhs.modulus))
        }
    }

    pub fn try_add(self, rhs: Fp) -> Result<Fp, GfpError> {
        self.same_modulus(rhs)?;
        Ok(Fp {
            value: add_mod(self.value, rhs.value, self.modulus),
            modulus: self.modulus,
        })
    }

    pub fn try_mul(self, rhs: Fp) -> Result<Fp, GfpError> {
        self.same_modulus(rhs)?;
        Ok(Fp {
            value: mul_mod(self.value, rhs.value, self.modulus),
            modulus: self.modulus,
        })
    }

    pub fn neg(self) -> Fp {
        Fp {
            value: neg_mod(self.value, self.modulus),
            modulus: self.modulus,
        }
    }

    /// Multiplicative inverse; rejects zero.
    pub fn inv(self) -> Result<Fp, GfpError> {
        if self.value == 0 {
            return Err(GfpError::ZeroInverse(self.modulus));
        }
        Ok(Fp {
            value: inv_mod(self.value, self.modulus),
            modulus: self.modulus,
        })
    }

    pub fn pow(self, mut e: u32) -> Fp {
        let mut base = self.value;
        let mut acc = 1 % self.modulus;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(acc, base, self.modulus);
            }
            base = mul_mod(base, base, self.modulus);
            e >>= 1;
        }
        Fp { value: acc, modulus: self.modulus }
    }

    /// The field Frobenius `x -> x^p`. On the prime field this is the
    /// identity, which the tests assert rather than assume.
    pub fn frobenius(self) -> Fp {
        self.pow(self.modulus)
    }
}

impl std::ops::Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        self.try_add(rhs).expect("Fp addition")
    }
}

impl std::ops::Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        self.try_add(rhs.neg()).expect("Fp subtraction")
    }
}

impl std::ops::Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        self.try_mul(rhs).expect("Fp multiplication")
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[inline]
pub(crate) fn add_mod(a: u32, b: u32, p: u32) -> u32 {
    let s = a as u64 + b as u64;
    (s % p as u64) as u32
}

#[inline]
pub(crate) fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

#[inline]
pub(crate) fn neg_mod(a: u32, p: u32) -> u32 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

#[inline]
pub(crate) fn inv_mod(a: u32, p: u32) -> u32 {
    // p is tiny and prime: Fermat.
    let mut acc = 1u64;
    let mut base = a as u64 % p as u64;
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

/// Coordinate-vector helpers over a shared modulus. Vectors are plain
/// `Vec<u32>` residues; the modulus travels with the enclosing object.
pub mod vec_ops {
    use super::{add_mod, mul_mod, neg_mod};

    pub fn zero(dim: usize) -> Vec<u32> {
        vec![0; dim]
    }

    pub fn unit(dim: usize, i: usize) -> Vec<u32> {
        let mut v = vec![0; dim];
        v[i] = 1;
        v
    }

    pub fn add(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        debug_assert_eq!(a.len(), b.len());
        a.iter().zip(b).map(|(&x, &y)| add_mod(x, y, p)).collect()
    }

    pub fn add_assign(a: &mut [u32], b: &[u32], p: u32) {
        debug_assert_eq!(a.len(), b.len());
        for (x, &y) in a.iter_mut().zip(b) {
            *x = add_mod(*x, y, p);
        }
    }

    pub fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| add_mod(x, neg_mod(y, p), p))
            .collect()
    }

    pub fn scale(c: u32, a: &[u32], p: u32) -> Vec<u32> {
        a.iter().map(|&x| mul_mod(c, x, p)).collect()
    }

    pub fn neg(a: &[u32], p: u32) -> Vec<u32> {
        a.iter().map(|&x| neg_mod(x, p)).collect()
    }

    pub fn is_zero(a: &[u32]) -> bool {
        a.iter().all(|&x| x == 0)
    }

    /// All p^dim coordinate vectors, in counting order. Desk-scale only.
    pub fn enumerate_all(dim: usize, p: u32) -> impl Iterator<Item = Vec<u32>> {
        let total = (p as u64).pow(dim as u32);
        (0..total).map(move |mut r| {
            let mut v = Vec::with_capacity(dim);
            for _ in 0..dim {
                v.push((r % p as u64) as u32);
                r /= p as u64;
            }
            v
        })
    }
}

/// Result of row reduction: the reduced matrix, its pivot columns and rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub matrix: MatGfp,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

/// Dense matrix over GF(p), row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct MatGfp {
    rows: usize,
    cols: usize,
    p: u32,
    data: Vec<u32>,
}

impl MatGfp {
    pub fn zeros(rows: usize, cols: usize, p: Prime) -> Self {
        MatGfp {
            rows,
            cols,
            p: p.get(),
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize, p: Prime) -> Self {
        let mut m = Self::zeros(n, n, p);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<u32>>, cols: usize, p: Prime) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in &rows {
            assert_eq!(row.len(), cols, "row length mismatch");
            for &x in row {
                data.push(x % p.get());
            }
        }
        MatGfp { rows: r, cols, p: p.get(), data }
    }

    pub fn from_fn(rows: usize, cols: usize, p: Prime, f: impl Fn(usize, usize) -> u32) -> Self {
        let mut m = Self::zeros(rows, cols, p);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.p;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn add(&self, rhs: &MatGfp) -> MatGfp {
        assert_eq!((self.rows, self.cols, self.p), (rhs.rows, rhs.cols, rhs.p));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(&a, &b)| add_mod(a, b, self.p))
            .collect();
        MatGfp { rows: self.rows, cols: self.cols, p: self.p, data }
    }

    pub fn sub(&self, rhs: &MatGfp) -> MatGfp {
        self.add(&rhs.scale(neg_mod(1, self.p)))
    }

    pub fn scale(&self, c: u32) -> MatGfp {
        let data = self.data.iter().map(|&a| mul_mod(a, c, self.p)).collect();
        MatGfp { rows: self.rows, cols: self.cols, p: self.p, data }
    }

    pub fn matmul(&self, rhs: &MatGfp) -> MatGfp {
        assert_eq!(self.cols, rhs.rows, "matmul shape");
        assert_eq!(self.p, rhs.p, "matmul modulus");
        let mut out = MatGfp::zeros(self.rows, rhs.cols, Prime(self.p));
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = add_mod(out.get(i, j), mul_mod(a, rhs.get(k, j), self.p), self.p);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Matrix power by repeated multiplication (exponents here are <= p).
    pub fn pow(&self, e: u32) -> MatGfp {
        assert_eq!(self.rows, self.cols, "pow requires square");
        let mut acc = MatGfp::identity(self.rows, Prime(self.p));
        for _ in 0..e {
            acc = acc.matmul(self);
        }
        acc
    }

    /// Apply to a column vector.
    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols, "mul_vec shape");
        let mut out = vec![0u32; self.rows];
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0u64;
            for j in 0..self.cols {
                acc += self.get(i, j) as u64 * v[j] as u64;
            }
            *o = (acc % self.p as u64) as u32;
        }
        out
    }

    pub fn transpose(&self) -> MatGfp {
        let mut out = MatGfp::zeros(self.cols, self.rows, Prime(self.p));
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn commutator(&self, rhs: &MatGfp) -> MatGfp {
        self.matmul(rhs).sub(&rhs.matmul(self))
    }

    pub fn flatten(&self) -> Vec<u32> {
        self.data.clone()
    }

    pub fn from_flat(rows: usize, cols: usize, p: Prime, data: Vec<u32>) -> Self {
        assert_eq!(data.len(), rows * cols);
        let data = data.into_iter().map(|x| x % p.get()).collect();
        MatGfp { rows, cols, p: p.get(), data }
    }

    /// Reduced row-echelon form, deterministic: scan columns left to right,
    /// pick the topmost unused row with a nonzero entry as pivot, normalize,
    /// eliminate above and below.
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let p = self.p;
        let mut pivots = Vec::new();
        let mut pivot_row = 0usize;
        for col in 0..m.cols {
            if pivot_row == m.rows {
                break;
            }
            let mut sel = None;
            for r in pivot_row..m.rows {
                if m.get(r, col) != 0 {
                    sel = Some(r);
                    break;
                }
            }
            let Some(sel) = sel else { continue };
            if sel != pivot_row {
                for c in 0..m.cols {
                    let a = m.get(sel, c);
                    let b = m.get(pivot_row, c);
                    m.set(sel, c, b);
                    m.set(pivot_row, c, a);
                }
            }
            let inv = inv_mod(m.get(pivot_row, col), p);
            for c in 0..m.cols {
                m.set(pivot_row, c, mul_mod(m.get(pivot_row, c), inv, p));
            }
            for r in 0..m.rows {
                if r == pivot_row {
                    continue;
                }
                let factor = m.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in 0..m.cols {
                    let v = add_mod(
                        m.get(r, c),
                        mul_mod(neg_mod(factor, p), m.get(pivot_row, c), p),
                        p,
                    );
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        let rank = pivots.len();
        debug_assert!(rank <= self.rows.min(self.cols));
        Rref { matrix: m, pivots, rank }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Canonical basis of the right null space `{v : M v = 0}`.
    pub fn kernel_basis(&self) -> Subspace {
        let Rref { matrix, pivots, rank } = self.rref();
        let p = Prime(self.p);
        let mut free_cols = Vec::new();
        for c in 0..self.cols {
            if !pivots.contains(&c) {
                free_cols.push(c);
            }
        }
        let mut vectors = Vec::new();
        for &fc in &free_cols {
            let mut v = vec![0u32; self.cols];
            v[fc] = 1;
            for (r, &pc) in pivots.iter().enumerate().take(rank) {
                v[pc] = neg_mod(matrix.get(r, fc), self.p);
            }
            vectors.push(v);
        }
        Subspace::from_spanning(self.cols, p, vectors)
    }

    /// Canonical basis of the column space `{M v}`.
    pub fn image_basis(&self) -> Subspace {
        let t = self.transpose();
        Subspace::from_spanning(self.rows, Prime(self.p), (0..t.rows).map(|r| t.row(r).to_vec()).collect())
    }

    /// Solve `M x = b`; returns the solution with all free coordinates zero,
    /// or None if inconsistent.
    pub fn solve(&self, b: &[u32]) -> Option<Vec<u32>> {
        assert_eq!(b.len(), self.rows);
        let p = Prime(self.p);
        let mut aug = MatGfp::zeros(self.rows, self.cols + 1, p);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, b[r]);
        }
        let Rref { matrix, pivots, rank } = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // pivot in the augmented column
        }
        let mut x = vec![0u32; self.cols];
        for (r, &pc) in pivots.iter().enumerate().take(rank) {
            x[pc] = matrix.get(r, self.cols);
        }
        Some(x)
    }
}

impl fmt::Debug for MatGfp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatGfp {}x{} mod {}", self.rows, self.cols, self.p)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// A linear subspace of GF(p)^n, stored as a reduced-echelon row basis so
/// that equal subspaces have equal representations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Subspace {
    ambient_dim: usize,
    modulus: u32,
    basis: Vec<Vec<u32>>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize, p: Prime) -> Self {
        Subspace {
            ambient_dim,
            modulus: p.get(),
            basis: Vec::new(),
        }
    }

    pub fn full(ambient_dim: usize, p: Prime) -> Self {
        let vectors = (0..ambient_dim).map(|i| vec_ops::unit(ambient_dim, i)).collect();
        Subspace {
            ambient_dim,
            modulus: p.get(),
            basis: vectors,
        }
    }

    pub fn from_spanning(ambient_dim: usize, p: Prime, vectors: Vec<Vec<u32>>) -> Self {
        if vectors.is_empty() {
            return Subspace::zero(ambient_dim, p);
        }
        let m = MatGfp::from_rows(vectors, ambient_dim, p);
        let Rref { matrix, rank, .. } = m.rref();
        let basis = (0..rank).map(|r| matrix.row(r).to_vec()).collect();
        Subspace {
            ambient_dim,
            modulus: p.get(),
            basis,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Membership by reduction against the echelon basis.
    pub fn contains(&self, v: &[u32]) -> bool {
        assert_eq!(v.len(), self.ambient_dim, "ambient dimension mismatch");
        let p = self.modulus;
        let mut w = v.to_vec();
        for b in &self.basis {
            let lead = b.iter().position(|&x| x != 0).expect("echelon row");
            if w[lead] != 0 {
                let c = mul_mod(w[lead], inv_mod(b[lead], p), p);
                for (wi, &bi) in w.iter_mut().zip(b) {
                    *wi = add_mod(*wi, mul_mod(neg_mod(c, p), bi, p), p);
                }
            }
        }
        vec_ops::is_zero(&w)
    }

    pub fn is_contained_in(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        let mut vectors = self.basis.clone();
        vectors.extend(other.basis.iter().cloned());
        Subspace::from_spanning(self.ambient_dim, Prime(self.modulus), vectors)
    }

    /// Intersection via the kernel of the stacked coefficient matrix: a
    /// combination `u . B1 = v . B2` is found from `(u, v)` in the kernel of
    /// `[B1^T | -B2^T]`.
    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        let p = Prime(self.modulus);
        let k1 = self.dim();
        let k2 = other.dim();
        if k1 == 0 || k2 == 0 {
            return Subspace::zero(self.ambient_dim, p);
        }
        let m = MatGfp::from_fn(self.ambient_dim, k1 + k2, p, |r, c| {
            if c < k1 {
                self.basis[c][r]
            } else {
                neg_mod(other.basis[c - k1][r], self.modulus)
            }
        });
        let ker = m.kernel_basis();
        let mut vectors = Vec::new();
        for w in ker.basis() {
            let mut v = vec![0u32; self.ambient_dim];
            for (i, b) in self.basis.iter().enumerate() {
                vec_ops::add_assign(&mut v, &vec_ops::scale(w[i], b, self.modulus), self.modulus);
            }
            vectors.push(v);
        }
        Subspace::from_spanning(self.ambient_dim, p, vectors)
    }

    /// dim(big) - dim(small), verifying the inclusion first.
    pub fn quotient_dim(&self, small: &Subspace) -> Result<usize, GfpError> {
        if !small.is_contained_in(self) {
            return Err(GfpError::NotASubspace(format!(
                "claimed subspace of dim {} is not contained in space of dim {}",
                small.dim(),
                self.dim()
            )));
        }
        Ok(self.dim() - small.dim())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(v: u32) -> Prime {
        Prime::new(v).unwrap()
    }

    #[test]
    fn prime_validation() {
        assert!(Prime::new(2).is_ok());
        assert!(Prime::new(97).is_ok());
        assert_eq!(Prime::new(1), Err(GfpError::NotPrime(1)));
        assert_eq!(Prime::new(91), Err(GfpError::NotPrime(91))); // 7 * 13
        assert_eq!(Prime::new(101), Err(GfpError::ModulusTooLarge(101, 97)));
    }

    #[test]
    fn inv_one_over_gf2() {
        let one = Fp::one(p(2));
        assert_eq!(one.inv().unwrap(), one);
    }

    #[test]
    fn inv_two_over_gf5_matches_exhaustive_search() {
        // Oracle: the unique c in GF(5) with 2c = 1.
        let five = p(5);
        let two = Fp::new(2, five);
        let mut expected = None;
        for c in 0..5 {
            if (2 * c) % 5 == 1 {
                expected = Some(c);
            }
        }
        assert_eq!(expected, Some(3));
        assert_eq!(two.inv().unwrap().value(), 3);
        assert_eq!((two.inv().unwrap() * two).value(), 1);
    }

    #[test]
    fn additive_inverse_over_gf7() {
        let seven = p(7);
        for a in 0..7 {
            let x = Fp::new(a, seven);
            assert!((x + x.neg()).is_zero());
        }
    }

    #[test]
    fn modulus_mismatch_rejected() {
        let a = Fp::new(1, p(5));
        let b = Fp::new(1, p(7));
        assert_eq!(a.try_add(b), Err(GfpError::ModulusMismatch(5, 7)));
        assert_eq!(a.try_mul(b), Err(GfpError::ModulusMismatch(5, 7)));
    }

    #[test]
    fn zero_inverse_rejected() {
        assert_eq!(Fp::zero(p(5)).inv(), Err(GfpError::ZeroInverse(5)));
    }

    #[test]
    fn frobenius_is_identity_on_prime_field() {
        assert!(Fp::zero(p(3)).frobenius().is_zero());
        assert_eq!(Fp::new(2, p(3)).frobenius().value(), 2);
        for q in [2u32, 3, 5, 7, 11] {
            let pr = p(q);
            for a in 0..q {
                let x = Fp::new(a as i64, pr);
                assert_eq!(x.frobenius(), x, "Fermat on GF({q})");
            }
        }
    }

    #[test]
    fn rref_identity_and_zero() {
        let id = MatGfp::identity(3, p(2));
        let r = id.rref();
        assert_eq!(r.matrix, id);
        assert_eq!(r.rank, 3);

        let z = MatGfp::zeros(2, 3, p(2));
        let r = z.rref();
        assert_eq!(r.matrix, z);
        assert_eq!(r.rank, 0);
    }

    #[test]
    fn rref_rank_one_over_gf2() {
        // [[1,1],[1,1]] -> [[1,1],[0,0]], hand row reduction.
        let m = MatGfp::from_rows(vec![vec![1, 1], vec![1, 1]], 2, p(2));
        let r = m.rref();
        assert_eq!(r.rank, 1);
        assert_eq!(r.matrix.row(0), &[1, 1]);
        assert_eq!(r.matrix.row(1), &[0, 0]);
    }

    #[test]
    fn kernel_fixtures() {
        // Kernel of the identity is trivial.
        assert_eq!(MatGfp::identity(3, p(2)).kernel_basis().dim(), 0);
        // Kernel of the zero map on GF(2)^3 is everything.
        assert_eq!(MatGfp::zeros(3, 3, p(2)).kernel_basis().dim(), 3);
        // Kernel of [[1,1]] over GF(2): oracle enumerates all 4 vectors.
        let m = MatGfp::from_rows(vec![vec![1, 1]], 2, p(2));
        let ker = m.kernel_basis();
        let mut members = Vec::new();
        for v in vec_ops::enumerate_all(2, 2) {
            if vec_ops::is_zero(&m.mul_vec(&v)) {
                members.push(v);
            }
        }
        for v in &members {
            assert!(ker.contains(v));
        }
        assert_eq!(ker.dim(), 1);
        assert!(ker.contains(&[1, 1]));
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = MatGfp::from_rows(vec![vec![1, 1], vec![0, 1]], 2, p(5));
        let x = m.solve(&[3, 2]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![3, 2]);
        let sing = MatGfp::from_rows(vec![vec![1, 1], vec![2, 2]], 2, p(5));
        assert!(sing.solve(&[1, 0]).is_none());
    }

    #[test]
    fn quotient_dim_rejects_non_subspace() {
        let big = Subspace::from_spanning(2, p(2), vec![vec![1, 0]]);
        let small = Subspace::from_spanning(2, p(2), vec![vec![0, 1]]);
        assert!(big.quotient_dim(&small).is_err());
        assert_eq!(big.quotient_dim(&Subspace::zero(2, p(2))).unwrap(), 1);
    }

    fn arb_matrix() -> impl Strategy<Value = MatGfp> {
        (1usize..5, 1usize..5, prop::sample::select(vec![2u32, 3, 5, 7])).prop_flat_map(
            |(r, c, q)| {
                prop::collection::vec(0u32..q, r * c)
                    .prop_map(move |data| MatGfp::from_flat(r, c, Prime::new(q).unwrap(), data))
            },
        )
    }

    proptest! {
        #[test]
        fn rank_nullity(m in arb_matrix()) {
            let r = m.rref();
            let ker = m.kernel_basis();
            prop_assert_eq!(r.rank + ker.dim(), m.cols());
        }

        #[test]
        fn rref_idempotent(m in arb_matrix()) {
            let once = m.rref().matrix;
            let twice = once.rref().matrix;
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn image_contains_every_product(m in arb_matrix(), seed in 0u64..1000) {
            let im = m.image_basis();
            // pseudo-random vector from the seed
            let q = m.modulus();
            let v: Vec<u32> = (0..m.cols())
                .map(|i| ((seed >> (i % 16)) as u32 + i as u32) % q)
                .collect();
            prop_assert!(im.contains(&m.mul_vec(&v)));
        }

        #[test]
        fn kernel_vectors_annihilate(m in arb_matrix()) {
            let ker = m.kernel_basis();
            for v in ker.basis() {
                prop_assert!(vec_ops::is_zero(&m.mul_vec(v)));
            }
        }

        #[test]
        fn intersect_commutative_idempotent(
            (m, n) in (1usize..5, 1usize..5, 2usize..5, prop::sample::select(vec![2u32, 3, 5]))
                .prop_flat_map(|(r1, r2, c, q)| {
                    let a = prop::collection::vec(0u32..q, r1 * c)
                        .prop_map(move |d| MatGfp::from_flat(r1, c, Prime::new(q).unwrap(), d));
                    let b = prop::collection::vec(0u32..q, r2 * c)
                        .prop_map(move |d| MatGfp::from_flat(r2, c, Prime::new(q).unwrap(), d));
                    (a, b)
                })
        ) {
            let s1 = m.kernel_basis();
            let s2 = n.kernel_basis();
            prop_assert_eq!(s1.intersect(&s2), s2.intersect(&s1));
            prop_assert_eq!(s1.intersect(&s1.clone()), s1);
        }
    }
}

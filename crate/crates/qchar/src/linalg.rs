//! Exact linear algebra over Q(q) or over the rationals.
//!
//! Matrices come in two flavors:
//!
//! - [`SpMat`]: sparse row-major matrices used for module operators
//!   (coproduct tensors keep these very sparse),
//! - [`DenseMat`]: small dense matrices for kernel and solve steps.
//!
//! Both are generic over [`Scalar`], implemented for [`QScalar`] (symbolic)
//! and [`BigRational`] (specialized q). All elimination is fraction-free in
//! spirit: entries stay exact, no pivots are compared by magnitude.

use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

use crate::qscalar::QScalar;

/// Exact field of coefficients.
pub trait Scalar: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self) -> Option<Self>;
}

impl Scalar for QScalar {
    fn zero() -> Self {
        QScalar::zero()
    }
    fn one() -> Self {
        QScalar::one()
    }
    fn is_zero(&self) -> bool {
        QScalar::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        QScalar::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        QScalar::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        QScalar::mul(self, other)
    }
    fn neg(&self) -> Self {
        QScalar::neg(self)
    }
    fn inv(&self) -> Option<Self> {
        QScalar::inv(self).ok()
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}

/// Sparse row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpMat<F: Scalar> {
    nrows: usize,
    ncols: usize,
    rows: Vec<BTreeMap<usize, F>>,
}

impl<F: Scalar> SpMat<F> {
    /// Zero matrix.
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            rows: vec![BTreeMap::new(); nrows],
        }
    }

    /// Identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.rows[i].insert(i, F::one());
        }
        m
    }

    /// Diagonal matrix from entries.
    pub fn diagonal(diag: &[F]) -> Self {
        let mut m = Self::zero(diag.len(), diag.len());
        for (i, v) in diag.iter().enumerate() {
            if !v.is_zero() {
                m.rows[i].insert(i, v.clone());
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Number of stored nonzero entries.
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    /// Entry at `(r, c)`.
    pub fn get(&self, r: usize, c: usize) -> F {
        self.rows[r].get(&c).cloned().unwrap_or_else(F::zero)
    }

    /// Set entry at `(r, c)`.
    pub fn set(&mut self, r: usize, c: usize, v: F) {
        assert!(r < self.nrows && c < self.ncols, "index out of range");
        if v.is_zero() {
            self.rows[r].remove(&c);
        } else {
            self.rows[r].insert(c, v);
        }
    }

    /// Add `v` into entry `(r, c)`.
    pub fn add_at(&mut self, r: usize, c: usize, v: &F) {
        let cur = self.get(r, c);
        self.set(r, c, cur.add(v));
    }

    /// Iterate nonzero entries of row `r`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (&usize, &F)> {
        self.rows[r].iter()
    }

    /// Matrix sum.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut out = self.clone();
        for (r, row) in other.rows.iter().enumerate() {
            for (c, v) in row {
                out.add_at(r, *c, v);
            }
        }
        out
    }

    /// Matrix difference.
    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&F::one().neg()))
    }

    /// Scalar multiple.
    pub fn scale(&self, s: &F) -> Self {
        let mut out = Self::zero(self.nrows, self.ncols);
        if s.is_zero() {
            return out;
        }
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                out.rows[r].insert(*c, v.mul(s));
            }
        }
        out
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows, "dimension mismatch in product");
        let mut out = Self::zero(self.nrows, other.ncols);
        for (r, row) in self.rows.iter().enumerate() {
            for (k, a) in row {
                for (c, b) in &other.rows[*k] {
                    let cur = out.get(r, *c);
                    out.set(r, *c, cur.add(&a.mul(b)));
                }
            }
        }
        out
    }

    /// Commutator `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// Kronecker product (`self` acts on the left tensor factor).
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nrows * other.nrows, self.ncols * other.ncols);
        for (ra, rowa) in self.rows.iter().enumerate() {
            for (ca, va) in rowa {
                for (rb, rowb) in other.rows.iter().enumerate() {
                    for (cb, vb) in rowb {
                        out.rows[ra * other.nrows + rb]
                            .insert(ca * other.ncols + cb, va.mul(vb));
                    }
                }
            }
        }
        out
    }

    /// Apply to a column vector.
    pub fn apply(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.ncols, "vector length mismatch");
        let mut out = vec![F::zero(); self.nrows];
        for (r, row) in self.rows.iter().enumerate() {
            let mut acc = F::zero();
            for (c, a) in row {
                if !v[*c].is_zero() {
                    acc = acc.add(&a.mul(&v[*c]));
                }
            }
            out[r] = acc;
        }
        out
    }

    /// True if every stored entry is zero (after cleanup, no entries).
    pub fn is_zero_matrix(&self) -> bool {
        self.rows.iter().all(|r| r.values().all(|v| v.is_zero()))
    }

    /// Map entries through a scalar conversion.
    pub fn map<G: Scalar>(&self, f: &impl Fn(&F) -> G) -> SpMat<G> {
        let mut out = SpMat::zero(self.nrows, self.ncols);
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                let g = f(v);
                if !g.is_zero() {
                    out.rows[r].insert(*c, g);
                }
            }
        }
        out
    }

    /// Dense copy of the sub-block `rows x cols`.
    pub fn block(&self, rows: &[usize], cols: &[usize]) -> DenseMat<F> {
        let mut m = DenseMat::zero(rows.len(), cols.len());
        for (i, r) in rows.iter().enumerate() {
            for (j, c) in cols.iter().enumerate() {
                m.set(i, j, self.get(*r, *c));
            }
        }
        m
    }

    /// Full dense copy.
    pub fn to_dense(&self) -> DenseMat<F> {
        let rows: Vec<usize> = (0..self.nrows).collect();
        let cols: Vec<usize> = (0..self.ncols).collect();
        self.block(&rows, &cols)
    }
}

/// Small dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMat<F: Scalar> {
    nrows: usize,
    ncols: usize,
    data: Vec<F>,
}

impl<F: Scalar> DenseMat<F> {
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            data: vec![F::zero(); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, r: usize, c: usize) -> &F {
        &self.data[r * self.ncols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: F) {
        self.data[r * self.ncols + c] = v;
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows);
        let mut out = Self::zero(self.nrows, other.ncols);
        for r in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.ncols {
                    let b = other.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(r, c).add(&a.mul(b));
                    out.set(r, c, cur);
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut out = self.clone();
        for i in 0..self.data.len() {
            out.data[i] = out.data[i].sub(&other.data[i]);
        }
        out
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.ncols {
            if row >= self.nrows {
                break;
            }
            // Find a pivot in this column at or below `row`.
            let Some(p) = (row..self.nrows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            if p != row {
                for c in 0..self.ncols {
                    self.data.swap(p * self.ncols + c, row * self.ncols + c);
                }
            }
            let inv = self.get(row, col).inv().expect("nonzero pivot");
            for c in col..self.ncols {
                let v = self.get(row, c).mul(&inv);
                self.set(row, c, v);
            }
            for r in 0..self.nrows {
                if r != row && !self.get(r, col).is_zero() {
                    let f = self.get(r, col).clone();
                    for c in col..self.ncols {
                        let v = self.get(r, c).sub(&f.mul(self.get(row, c)));
                        self.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    /// Rank via elimination on a copy.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right kernel (vectors `v` with `self * v = 0`).
    ///
    /// The basis is in column echelon form: each vector has a 1 in a free
    /// column and zeros in the other free columns.
    pub fn kernel_basis(&self) -> Vec<Vec<F>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.ncols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![F::zero(); self.ncols];
            v[free] = F::one();
            for (prow, pcol) in pivots.iter().enumerate() {
                v[*pcol] = m.get(prow, free).neg();
            }
            basis.push(v);
        }
        basis
    }

    /// Solve `self * x = b`; `None` if inconsistent. Free variables are 0.
    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        assert_eq!(b.len(), self.nrows);
        let mut aug = DenseMat::zero(self.nrows, self.ncols + 1);
        for r in 0..self.nrows {
            for c in 0..self.ncols {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, self.ncols, b[r].clone());
        }
        let pivots = aug.rref();
        if pivots.contains(&self.ncols) {
            return None;
        }
        let mut x = vec![F::zero(); self.ncols];
        for (prow, pcol) in pivots.iter().enumerate() {
            x[*pcol] = aug.get(prow, self.ncols).clone();
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn sparse_product_and_kron() {
        let mut a = SpMat::<BigRational>::zero(2, 2);
        a.set(0, 1, rat(1, 1));
        let mut b = SpMat::<BigRational>::zero(2, 2);
        b.set(1, 0, rat(2, 1));
        let ab = a.mul(&b);
        assert_eq!(ab.get(0, 0), rat(2, 1));
        assert_eq!(ab.nnz(), 1);
        let k = a.kron(&b);
        assert_eq!(k.nrows(), 4);
        assert_eq!(k.get(1, 2), rat(2, 1));
        assert_eq!(k.nnz(), 1);
    }

    #[test]
    fn commutator_of_commuting_is_zero() {
        let a = SpMat::<BigRational>::diagonal(&[rat(2, 1), rat(3, 1)]);
        let b = SpMat::<BigRational>::diagonal(&[rat(5, 1), rat(7, 1)]);
        assert!(a.commutator(&b).is_zero_matrix());
    }

    #[test]
    fn kernel_of_rank_one_matrix() {
        // [[1, 2], [2, 4]] has kernel spanned by (-2, 1).
        let mut m = DenseMat::<BigRational>::zero(2, 2);
        m.set(0, 0, rat(1, 1));
        m.set(0, 1, rat(2, 1));
        m.set(1, 0, rat(2, 1));
        m.set(1, 1, rat(4, 1));
        assert_eq!(m.rank(), 1);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], vec![rat(-2, 1), rat(1, 1)]);
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let mut m = DenseMat::<BigRational>::zero(2, 2);
        m.set(0, 0, rat(1, 1));
        m.set(1, 1, rat(2, 1));
        let x = m.solve(&[rat(3, 1), rat(4, 1)]).unwrap();
        assert_eq!(x, vec![rat(3, 1), rat(2, 1)]);
        let mut s = DenseMat::<BigRational>::zero(2, 1);
        s.set(0, 0, rat(1, 1));
        s.set(1, 0, rat(1, 1));
        assert!(s.solve(&[rat(0, 1), rat(1, 1)]).is_none());
    }

    #[test]
    fn symbolic_kernel_over_q() {
        use crate::qscalar::QScalar;
        // [[1, [2]_q]] has kernel spanned by (-[2]_q, 1).
        let mut m = DenseMat::<QScalar>::zero(1, 2);
        m.set(0, 0, QScalar::one());
        m.set(0, 1, QScalar::q_int(2));
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0][0], QScalar::q_int(2).neg());
        assert_eq!(k[0][1], QScalar::one());
    }
}

//! Exact linear algebra over the rationals and the integers.
//!
//! `QMat` (rational, row-major) provides multiplication, inverses, solving,
//! determinants, the `L D L^T` factorization of positive-definite matrices,
//! Schur complements, Kronecker products and exact characteristic
//! polynomials. `ZMat` (integer) provides Hermite and Smith normal forms
//! with unimodular transforms, integer kernels, saturations and basis
//! completions. Everything is exact; nothing here rounds.

use crate::poly::Poly;
use crate::rational::{qi, Q, Z};
use num_traits::{One, Signed, Zero};
use std::fmt;

// ---------------------------------------------------------------------------
// Rational matrices
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq, Eq)]
pub struct QMat {
    nrows: usize,
    ncols: usize,
    data: Vec<Q>,
}

impl fmt::Debug for QMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QMat {}x{} [", self.nrows, self.ncols)?;
        for i in 0..self.nrows {
            let row: Vec<String> = (0..self.ncols)
                .map(|j| crate::rational::fmt_q(self.at(i, j)))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl QMat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        QMat {
            nrows,
            ncols,
            data: vec![Q::zero(); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, qi(1));
        }
        m
    }

    /// Builds from rows; panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged rows");
            data.extend(r);
        }
        QMat { nrows, ncols, data }
    }

    pub fn from_int_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        QMat::from_rows(
            rows.iter()
                .map(|r| r.as_ref().iter().map(|&n| qi(n)).collect())
                .collect(),
        )
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn at(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.ncols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.data[i * self.ncols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<Q> {
        (0..self.ncols).map(|j| self.at(i, j).clone()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<Q> {
        (0..self.nrows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn rows_vec(&self) -> Vec<Vec<Q>> {
        (0..self.nrows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> QMat {
        let mut t = QMat::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                t.set(j, i, self.at(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.ncols, other.nrows, "dimension mismatch");
        let mut out = QMat::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.ncols {
                    let b = other.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.at(i, j).clone();
                    out.set(i, j, cur + a.clone() * b);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &QMat) -> QMat {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &QMat) -> QMat {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, s: &Q) -> QMat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    pub fn mul_vec(&self, x: &[Q]) -> Vec<Q> {
        assert_eq!(self.ncols, x.len());
        (0..self.nrows)
            .map(|i| {
                let mut acc = Q::zero();
                for j in 0..self.ncols {
                    if !x[j].is_zero() {
                        acc += self.at(i, j).clone() * &x[j];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        if self.nrows != self.ncols {
            return false;
        }
        for i in 0..self.nrows {
            for j in i + 1..self.ncols {
                if self.at(i, j) != self.at(j, i) {
                    return false;
                }
            }
        }
        true
    }

    /// First index (i, j) with `a_ij != a_ji`, if any.
    pub fn asymmetry_witness(&self) -> Option<(usize, usize)> {
        for i in 0..self.nrows {
            for j in i + 1..self.ncols {
                if self.at(i, j) != self.at(j, i) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> QMat {
        let mut out = QMat::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                out.set(i - r0, j - c0, self.at(i, j).clone());
            }
        }
        out
    }

    /// `L D L^T` factorization of a symmetric matrix; fails with the index of
    /// the first non-positive pivot (equivalently: the order of the first
    /// non-positive leading principal minor, zero-based).
    pub fn ldlt(&self) -> Result<Ldlt, usize> {
        assert!(self.is_symmetric(), "ldlt requires a symmetric matrix");
        let n = self.nrows;
        let mut l = QMat::identity(n);
        let mut d = vec![Q::zero(); n];
        for j in 0..n {
            let mut dj = self.at(j, j).clone();
            for k in 0..j {
                dj -= l.at(j, k).clone() * l.at(j, k) * &d[k];
            }
            if !dj.is_positive() {
                return Err(j);
            }
            d[j] = dj;
            for i in j + 1..n {
                let mut v = self.at(i, j).clone();
                for k in 0..j {
                    v -= l.at(i, k).clone() * l.at(j, k) * &d[k];
                }
                l.set(i, j, v / d[j].clone());
            }
        }
        Ok(Ldlt { l, d })
    }

    /// Exact determinant by Gaussian elimination with pivot search.
    pub fn det(&self) -> Q {
        assert_eq!(self.nrows, self.ncols, "determinant of non-square matrix");
        let n = self.nrows;
        if n == 0 {
            return qi(1);
        }
        let mut m = self.rows_vec();
        let mut det = qi(1);
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
                return Q::zero();
            };
            if p != col {
                m.swap(p, col);
                det = -det;
            }
            let pv = m[col][col].clone();
            det *= pv.clone();
            for r in col + 1..n {
                if m[r][col].is_zero() {
                    continue;
                }
                let f = m[r][col].clone() / pv.clone();
                for c in col..n {
                    let sub = f.clone() * m[col][c].clone();
                    m[r][c] -= sub;
                }
            }
        }
        det
    }

    /// Exact inverse; `None` when singular.
    pub fn inverse(&self) -> Option<QMat> {
        assert_eq!(self.nrows, self.ncols);
        let n = self.nrows;
        let mut m = self.rows_vec();
        let mut inv = QMat::identity(n).rows_vec();
        for col in 0..n {
            let p = (col..n).find(|&r| !m[r][col].is_zero())?;
            m.swap(p, col);
            inv.swap(p, col);
            let pv = m[col][col].clone();
            for c in 0..n {
                m[col][c] /= pv.clone();
                inv[col][c] /= pv.clone();
            }
            for r in 0..n {
                if r == col || m[r][col].is_zero() {
                    continue;
                }
                let f = m[r][col].clone();
                for c in 0..n {
                    let sm = f.clone() * m[col][c].clone();
                    m[r][c] -= sm;
                    let si = f.clone() * inv[col][c].clone();
                    inv[r][c] -= si;
                }
            }
        }
        Some(QMat::from_rows(inv))
    }

    /// Solves `self * X = B` exactly; `None` when singular (square only).
    pub fn solve(&self, b: &QMat) -> Option<QMat> {
        assert_eq!(self.nrows, self.ncols);
        assert_eq!(self.nrows, b.nrows);
        let n = self.nrows;
        let k = b.ncols;
        let mut m = self.rows_vec();
        let mut rhs = b.rows_vec();
        for col in 0..n {
            let p = (col..n).find(|&r| !m[r][col].is_zero())?;
            m.swap(p, col);
            rhs.swap(p, col);
            let pv = m[col][col].clone();
            for c in 0..n {
                m[col][c] /= pv.clone();
            }
            for c in 0..k {
                rhs[col][c] /= pv.clone();
            }
            for r in 0..n {
                if r == col || m[r][col].is_zero() {
                    continue;
                }
                let f = m[r][col].clone();
                for c in 0..n {
                    let s = f.clone() * m[col][c].clone();
                    m[r][c] -= s;
                }
                for c in 0..k {
                    let s = f.clone() * rhs[col][c].clone();
                    rhs[r][c] -= s;
                }
            }
        }
        Some(QMat::from_rows(rhs))
    }

    pub fn solve_vec(&self, b: &[Q]) -> Option<Vec<Q>> {
        let bm = QMat::from_rows(b.iter().map(|x| vec![x.clone()]).collect());
        self.solve(&bm).map(|m| m.col(0))
    }

    /// Kronecker product: index `(u, v) -> u * other.ncols + v`.
    pub fn kron(&self, other: &QMat) -> QMat {
        let mut out = QMat::zeros(self.nrows * other.nrows, self.ncols * other.ncols);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                let a = self.at(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.nrows {
                    for l in 0..other.ncols {
                        out.set(
                            i * other.nrows + k,
                            j * other.ncols + l,
                            a.clone() * other.at(k, l),
                        );
                    }
                }
            }
        }
        out
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(&self, other: &QMat) -> QMat {
        let mut out = QMat::zeros(self.nrows + other.nrows, self.ncols + other.ncols);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                out.set(i, j, self.at(i, j).clone());
            }
        }
        for i in 0..other.nrows {
            for j in 0..other.ncols {
                out.set(self.nrows + i, self.ncols + j, other.at(i, j).clone());
            }
        }
        out
    }

    /// Schur complement of the leading `k x k` block of a symmetric matrix:
    /// `D - B^T A^{-1} B`. `None` when the leading block is singular.
    pub fn schur_complement(&self, k: usize) -> Option<QMat> {
        assert!(self.is_symmetric());
        let n = self.nrows;
        assert!(k <= n);
        let a = self.submatrix(0, k, 0, k);
        let b = self.submatrix(0, k, k, n);
        let d = self.submatrix(k, n, k, n);
        let ainv_b = a.solve(&b)?;
        Some(d.sub(&b.transpose().mul(&ainv_b)))
    }

    /// Pullback of a symmetric form along a linear map given by columns:
    /// `m^T * self * m`.
    pub fn pullback(&self, m: &QMat) -> QMat {
        m.transpose().mul(&self.mul(m))
    }

    /// Characteristic polynomial `det(x I - self)`, monic, exact
    /// (Faddeev–LeVerrier).
    pub fn charpoly(&self) -> Poly {
        assert_eq!(self.nrows, self.ncols);
        let n = self.nrows;
        let mut coeffs = vec![Q::zero(); n + 1];
        coeffs[n] = qi(1);
        let mut m = QMat::identity(n);
        for k in 1..=n {
            let am = self.mul(&m);
            let mut tr = Q::zero();
            for i in 0..n {
                tr += am.at(i, i).clone();
            }
            let c = -tr / qi(k as i64);
            coeffs[n - k] = c.clone();
            m = am;
            for i in 0..n {
                let cur = m.at(i, i).clone();
                m.set(i, i, cur + c.clone());
            }
        }
        Poly::from_coeffs(coeffs)
    }

    /// `true` when every entry is an integer.
    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|c| c.denom().is_one())
    }

    /// Exact conversion to an integer matrix; `None` if any entry is
    /// non-integral.
    pub fn to_zmat(&self) -> Option<ZMat> {
        if !self.is_integral() {
            return None;
        }
        let mut out = ZMat::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                out.set(i, j, self.at(i, j).numer().clone());
            }
        }
        Some(out)
    }
}

#[derive(Debug, Clone)]
pub struct Ldlt {
    /// Unit lower-triangular factor.
    pub l: QMat,
    /// Positive diagonal.
    pub d: Vec<Q>,
}

/// Value of the quadratic form `x^T g x` (rational coordinates).
pub fn gram_quad(g: &QMat, x: &[Q]) -> Q {
    gram_pair(g, x, x)
}

/// Value of the bilinear form `x^T g y`.
pub fn gram_pair(g: &QMat, x: &[Q], y: &[Q]) -> Q {
    assert_eq!(g.nrows(), x.len());
    assert_eq!(g.ncols(), y.len());
    let mut acc = Q::zero();
    for i in 0..x.len() {
        if x[i].is_zero() {
            continue;
        }
        for j in 0..y.len() {
            if y[j].is_zero() {
                continue;
            }
            acc += x[i].clone() * g.at(i, j) * &y[j];
        }
    }
    acc
}

pub fn zvec_to_q(x: &[Z]) -> Vec<Q> {
    x.iter().map(|n| Q::from_integer(n.clone())).collect()
}

pub fn qvec_add(x: &[Q], y: &[Q]) -> Vec<Q> {
    x.iter().zip(y).map(|(a, b)| a.clone() + b).collect()
}

pub fn qvec_sub(x: &[Q], y: &[Q]) -> Vec<Q> {
    x.iter().zip(y).map(|(a, b)| a.clone() - b).collect()
}

pub fn qvec_scale(x: &[Q], s: &Q) -> Vec<Q> {
    x.iter().map(|a| a.clone() * s).collect()
}

// ---------------------------------------------------------------------------
// Integer matrices
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq, Eq)]
pub struct ZMat {
    nrows: usize,
    ncols: usize,
    data: Vec<Z>,
}

impl fmt::Debug for ZMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ZMat {}x{} [", self.nrows, self.ncols)?;
        for i in 0..self.nrows {
            let row: Vec<String> = (0..self.ncols).map(|j| self.at(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl ZMat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        ZMat {
            nrows,
            ncols,
            data: vec![Z::zero(); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ZMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Z::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Z>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged rows");
            data.extend(r);
        }
        ZMat { nrows, ncols, data }
    }

    pub fn from_int_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        ZMat::from_rows(
            rows.iter()
                .map(|r| r.as_ref().iter().map(|&n| Z::from(n)).collect())
                .collect(),
        )
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(cols: Vec<Vec<Z>>) -> Self {
        let ncols = cols.len();
        let nrows = cols.first().map_or(0, |c| c.len());
        let mut m = ZMat::zeros(nrows, ncols);
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), nrows, "ragged columns");
            for (i, v) in c.iter().enumerate() {
                m.set(i, j, v.clone());
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

    pub fn at(&self, i: usize, j: usize) -> &Z {
        &self.data[i * self.ncols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Z) {
        self.data[i * self.ncols + j] = v;
    }

    pub fn col(&self, j: usize) -> Vec<Z> {
        (0..self.nrows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<Z> {
        (0..self.ncols).map(|j| self.at(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> ZMat {
        let mut t = ZMat::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                t.set(j, i, self.at(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &ZMat) -> ZMat {
        assert_eq!(self.ncols, other.nrows);
        let mut out = ZMat::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.ncols {
                    let b = other.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.at(i, j).clone();
                    out.set(i, j, cur + a * b);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[Z]) -> Vec<Z> {
        assert_eq!(self.ncols, x.len());
        (0..self.nrows)
            .map(|i| {
                let mut acc = Z::zero();
                for j in 0..self.ncols {
                    acc += self.at(i, j) * &x[j];
                }
                acc
            })
            .collect()
    }

    pub fn to_qmat(&self) -> QMat {
        let mut out = QMat::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                out.set(i, j, Q::from_integer(self.at(i, j).clone()));
            }
        }
        out
    }

    pub fn det(&self) -> Z {
        let d = self.to_qmat().det();
        debug_assert!(d.denom().is_one());
        d.numer().clone()
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.nrows {
            let t = self.at(i, a).clone();
            let u = self.at(i, b).clone();
            self.set(i, a, u);
            self.set(i, b, t);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.nrows {
            let v = -self.at(i, j).clone();
            self.set(i, j, v);
        }
    }

    /// `col_a += c * col_b`
    fn addmul_col(&mut self, a: usize, b: usize, c: &Z) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.nrows {
            let v = self.at(i, a).clone() + c * self.at(i, b);
            self.set(i, a, v);
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.ncols {
            let t = self.at(a, j).clone();
            let u = self.at(b, j).clone();
            self.set(a, j, u);
            self.set(b, j, t);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.ncols {
            let v = -self.at(i, j).clone();
            self.set(i, j, v);
        }
    }

    /// `row_a += c * row_b`
    fn addmul_row(&mut self, a: usize, b: usize, c: &Z) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.ncols {
            let v = self.at(a, j).clone() + c * self.at(b, j);
            self.set(a, j, v);
        }
    }

    /// Column-style Hermite normal form: returns `(h, v)` with `h = self * v`,
    /// `v` unimodular. Pivots descend left-to-right with positive pivot
    /// entries, entries to the right of each pivot row are zero, and columns
    /// beyond the rank are zero.
    pub fn hnf_col(&self) -> (ZMat, ZMat) {
        let mut h = self.clone();
        let mut v = ZMat::identity(self.ncols);
        let mut piv_col = 0usize;
        for r in 0..self.nrows {
            if piv_col >= self.ncols {
                break;
            }
            // Reduce row r across columns piv_col.. to a single nonzero.
            loop {
                // Find column with minimal nonzero |entry| in row r.
                let mut best: Option<(usize, Z)> = None;
                for j in piv_col..self.ncols {
                    let e = h.at(r, j).clone();
                    if e.is_zero() {
                        continue;
                    }
                    let a = e.abs();
                    match &best {
                        None => best = Some((j, a)),
                        Some((_, cur)) if a < *cur => best = Some((j, a)),
                        _ => {}
                    }
                }
                let Some((jmin, _)) = best else {
                    break; // row r is zero beyond piv_col; no pivot here
                };
                h.swap_cols(piv_col, jmin);
                v.swap_cols(piv_col, jmin);
                let p = h.at(r, piv_col).clone();
                let mut done = true;
                for j in piv_col + 1..self.ncols {
                    let e = h.at(r, j).clone();
                    if e.is_zero() {
                        continue;
                    }
                    // Euclidean step: subtract the rounded quotient.
                    let q = div_round(&e, &p);
                    h.addmul_col(j, piv_col, &-q.clone());
                    if !h.at(r, j).is_zero() {
                        done = false;
                    }
                    v.addmul_col(j, piv_col, &-q);
                }
                if done {
                    break;
                }
            }
            if h.at(r, piv_col).is_zero() {
                continue; // no pivot in this row
            }
            if h.at(r, piv_col).is_negative() {
                h.negate_col(piv_col);
                v.negate_col(piv_col);
            }
            // Reduce entries to the LEFT of the pivot into [0, pivot).
            let p = h.at(r, piv_col).clone();
            for j in 0..piv_col {
                let e = h.at(r, j).clone();
                let q = num_integer::Integer::div_floor(&e, &p);
                h.addmul_col(j, piv_col, &-q.clone());
                v.addmul_col(j, piv_col, &-q);
            }
            piv_col += 1;
        }
        (h, v)
    }

    /// Column rank (via HNF).
    pub fn rank(&self) -> usize {
        let (h, _) = self.hnf_col();
        (0..h.ncols)
            .filter(|&j| (0..h.nrows).any(|i| !h.at(i, j).is_zero()))
            .count()
    }

    /// Basis of the integer right kernel `{x : self * x = 0}` as columns.
    /// Integer kernels of integer matrices are automatically saturated.
    pub fn right_kernel(&self) -> ZMat {
        let (h, v) = self.hnf_col();
        let zero_cols: Vec<usize> = (0..h.ncols)
            .filter(|&j| (0..h.nrows).all(|i| h.at(i, j).is_zero()))
            .collect();
        let mut out = ZMat::zeros(self.ncols, zero_cols.len());
        for (k, &j) in zero_cols.iter().enumerate() {
            for i in 0..self.ncols {
                out.set(i, k, v.at(i, j).clone());
            }
        }
        out
    }

    /// Smith normal form with transforms: `s = u * self * v`, all four of
    /// `u, u^{-1}, v, v^{-1}` returned exactly.
    pub fn snf(&self) -> Snf {
        let mut s = self.clone();
        let n = self.nrows;
        let k = self.ncols;
        let mut u = ZMat::identity(n);
        let mut uinv = ZMat::identity(n);
        let mut v = ZMat::identity(k);
        let mut vinv = ZMat::identity(k);

        // Row op helpers keep the invariants s = u*A*v, uinv = u^{-1}, etc.
        macro_rules! row_swap {
            ($a:expr, $b:expr) => {{
                s.swap_rows($a, $b);
                u.swap_rows($a, $b);
                uinv.swap_cols($a, $b);
            }};
        }
        macro_rules! row_addmul {
            ($a:expr, $b:expr, $c:expr) => {{
                let c: Z = $c;
                s.addmul_row($a, $b, &c);
                u.addmul_row($a, $b, &c);
                uinv.addmul_col($b, $a, &-c);
            }};
        }
        macro_rules! row_neg {
            ($a:expr) => {{
                s.negate_row($a);
                u.negate_row($a);
                uinv.negate_col($a);
            }};
        }
        macro_rules! col_swap {
            ($a:expr, $b:expr) => {{
                s.swap_cols($a, $b);
                v.swap_cols($a, $b);
                vinv.swap_rows($a, $b);
            }};
        }
        macro_rules! col_addmul {
            ($a:expr, $b:expr, $c:expr) => {{
                let c: Z = $c;
                s.addmul_col($a, $b, &c);
                v.addmul_col($a, $b, &c);
                vinv.addmul_row($b, $a, &-c);
            }};
        }

        let t_max = n.min(k);
        let mut t = 0usize;
        while t < t_max {
            // Find a nonzero entry of minimal absolute value in s[t.., t..].
            let mut best: Option<(usize, usize, Z)> = None;
            for i in t..n {
                for j in t..k {
                    let e = s.at(i, j).clone();
                    if e.is_zero() {
                        continue;
                    }
                    let a = e.abs();
                    match &best {
                        None => best = Some((i, j, a)),
                        Some((_, _, cur)) if a < *cur => best = Some((i, j, a)),
                        _ => {}
                    }
                }
            }
            let Some((bi, bj, _)) = best else {
                break; // remaining block is zero
            };
            row_swap!(t, bi);
            col_swap!(t, bj);
            // Clear row and column t.
            loop {
                let p = s.at(t, t).clone();
                let mut dirty = false;
                for i in t + 1..n {
                    let e = s.at(i, t).clone();
                    if e.is_zero() {
                        continue;
                    }
                    let q = div_round(&e, &p);
                    row_addmul!(i, t, -q);
                    if !s.at(i, t).is_zero() {
                        // Remainder became the smaller entry; promote it.
                        row_swap!(t, i);
                        dirty = true;
                        break;
                    }
                }
                if dirty {
                    continue;
                }
                for j in t + 1..k {
                    let e = s.at(t, j).clone();
                    if e.is_zero() {
                        continue;
                    }
                    let q = div_round(&e, &p);
                    col_addmul!(j, t, -q);
                    if !s.at(t, j).is_zero() {
                        col_swap!(t, j);
                        dirty = true;
                        break;
                    }
                }
                if !dirty {
                    break;
                }
            }
            // Divisibility: ensure s[t][t] divides every later entry.
            let p = s.at(t, t).clone();
            let mut violated = None;
            'scan: for i in t + 1..n {
                for j in t + 1..k {
                    if !(s.at(i, j) % &p).is_zero() {
                        violated = Some(i);
                        break 'scan;
                    }
                }
            }
            if let Some(i) = violated {
                // Fold row i into row t and redo this pivot.
                row_addmul!(t, i, Z::one());
                continue;
            }
            if s.at(t, t).is_negative() {
                row_neg!(t);
            }
            t += 1;
        }
        debug_assert_eq!(u.mul(self).mul(&v), s);
        debug_assert_eq!(u.mul(&uinv), ZMat::identity(n));
        debug_assert_eq!(v.mul(&vinv), ZMat::identity(k));
        Snf { s, u, uinv, v, vinv }
    }

    /// Elementary divisors (positive diagonal of the Smith form).
    pub fn elementary_divisors(&self) -> Vec<Z> {
        let snf = self.snf();
        let t = self.nrows.min(self.ncols);
        (0..t)
            .map(|i| snf.s.at(i, i).clone())
            .filter(|d| !d.is_zero())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }
}

/// Rounded quotient with `|a - q*b| <= |b|/2` — keeps HNF/SNF remainders
/// small.
fn div_round(a: &Z, b: &Z) -> Z {
    use num_integer::Integer;
    debug_assert!(!b.is_zero());
    // Floor division: a = q*b + r with r between 0 and b (taking b's sign),
    // so |r| < |b| and r, b share a sign. Stepping q once toward the excess
    // side flips the remainder to r - b with |r - b| = |b| - |r| < |b|/2.
    let (q, r) = a.div_mod_floor(b);
    if Z::from(2) * r.abs() > b.abs() {
        q + 1
    } else {
        q
    }
}

pub struct Snf {
    pub s: ZMat,
    pub u: ZMat,
    pub uinv: ZMat,
    pub v: ZMat,
    pub vinv: ZMat,
}

/// Whether the columns of `b` span a saturated subgroup (primitive
/// sublattice) of `Z^n`: all elementary divisors are 1 and the rank is full.
pub fn is_saturated(b: &ZMat) -> bool {
    let divs = b.elementary_divisors();
    divs.len() == b.ncols() && divs.iter().all(|d| d.is_one())
}

/// Saturation of the column span of `b` (requires full column rank):
/// the smallest saturated subgroup containing it, as a column basis.
pub fn saturation(b: &ZMat) -> ZMat {
    let snf = b.snf();
    let r = b.ncols();
    assert!(
        (0..r).all(|i| !snf.s.at(i, i).is_zero()),
        "saturation requires full column rank"
    );
    let mut out = ZMat::zeros(b.nrows(), r);
    for j in 0..r {
        for i in 0..b.nrows() {
            out.set(i, j, snf.uinv.at(i, j).clone());
        }
    }
    out
}

/// Completes a saturated column basis `b` (n x k) to a unimodular n x n
/// matrix whose first k columns span the same subgroup.
pub fn complete_basis(b: &ZMat) -> ZMat {
    assert!(is_saturated(b), "complete_basis requires a saturated basis");
    let snf = b.snf();
    // b * v = uinv * s * ... with s = [I_k; 0]: the first k columns of uinv
    // span im(b); uinv is unimodular.
    snf.uinv
}

/// Solves `a * x = b` over the integers when `a` has full column rank;
/// `None` if no integral solution exists.
pub fn solve_exact_integer(a: &ZMat, b: &[Z]) -> Option<Vec<Z>> {
    // Solve the rational system restricted to k independent rows, then
    // verify the full system and integrality.
    let aq = a.to_qmat();
    let k = a.ncols();
    let rows = independent_rows(&aq, k)?;
    let mut sys = QMat::zeros(k, k);
    let mut rhs = vec![Q::zero(); k];
    for (ri, &i) in rows.iter().enumerate() {
        for j in 0..k {
            sys.set(ri, j, aq.at(i, j).clone());
        }
        rhs[ri] = Q::from_integer(b[i].clone());
    }
    let x = sys.solve_vec(&rhs)?;
    if x.iter().any(|c| !c.denom().is_one()) {
        return None;
    }
    let xi: Vec<Z> = x.iter().map(|c| c.numer().clone()).collect();
    // Verify all rows.
    let ax = a.mul_vec(&xi);
    if ax.iter().zip(b.iter()).all(|(p, q)| p == q) {
        Some(xi)
    } else {
        None
    }
}

/// Indices of `k` linearly independent rows of `m`, in ascending order;
/// `None` if the row rank is below `k`.
fn independent_rows(m: &QMat, k: usize) -> Option<Vec<usize>> {
    let mut chosen = Vec::new();
    // Reduced rows with recorded pivot column.
    let mut echelon: Vec<(usize, Vec<Q>)> = Vec::new();
    for i in 0..m.nrows() {
        let mut r = m.row(i);
        for (pc, er) in &echelon {
            if !r[*pc].is_zero() {
                let f = r[*pc].clone();
                for (c, e) in r.iter_mut().zip(er.iter()) {
                    *c -= f.clone() * e;
                }
            }
        }
        if let Some(pc) = r.iter().position(|c| !c.is_zero()) {
            let pv = r[pc].clone();
            for c in r.iter_mut() {
                *c /= pv.clone();
            }
            echelon.push((pc, r));
            chosen.push(i);
            if chosen.len() == k {
                return Some(chosen);
            }
        }
    }
    None
}

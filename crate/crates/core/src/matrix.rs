//! Dense field-generic matrices.
//!
//! Storage is row-major. Elimination follows a fixed pivot rule: exact fields
//! take the first nonzero entry of the column, floating fields take the entry
//! of largest magnitude and treat anything at or below
//! `eps * max|a_ij|` (of the input) as zero.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::{Rng, RngCore};
use serde::{Serialize, Serializer};

use crate::error::{shape_err, Error, Result};
use crate::field::Field;

/// Sorted, distinct, 1-based indices into `1..=bound`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexSet {
    indices: Vec<usize>,
    bound: usize,
}

impl IndexSet {
    /// Builds a set from 1-based indices in any order.
    pub fn new(indices: impl IntoIterator<Item = usize>, bound: usize) -> Result<Self> {
        let mut indices: Vec<usize> = indices.into_iter().collect();
        indices.sort_unstable();
        for w in indices.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateIndex(w[0]));
            }
        }
        if let Some(&bad) = indices.iter().find(|&&i| i == 0 || i > bound) {
            return Err(Error::IndexOutOfRange { index: bad, bound });
        }
        Ok(IndexSet { indices, bound })
    }

    pub fn from_zero_based(indices: impl IntoIterator<Item = usize>, bound: usize) -> Result<Self> {
        Self::new(indices.into_iter().map(|i| i + 1), bound)
    }

    pub fn full(bound: usize) -> Self {
        IndexSet {
            indices: (1..=bound).collect(),
            bound,
        }
    }

    pub fn empty(bound: usize) -> Self {
        IndexSet {
            indices: Vec::new(),
            bound,
        }
    }

    /// Every subset of `1..=bound`, in bitmask order (starting with the empty
    /// set). Intended for exhaustive sweeps over tiny bounds.
    pub fn subsets(bound: usize) -> impl Iterator<Item = IndexSet> {
        assert!(bound < 32, "subset enumeration is for tiny bounds");
        (0u32..1 << bound).map(move |mask| IndexSet {
            indices: (0..bound).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect(),
            bound,
        })
    }

    /// Parses `1,3,4`; an empty string or `all`/`:` means the full range.
    pub fn parse(s: &str, bound: usize) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "all" || s == ":" {
            return Ok(Self::full(bound));
        }
        if s == "none" {
            return Ok(Self::empty(bound));
        }
        let mut out = Vec::new();
        for tok in s.split(',') {
            let v: usize = tok.trim().parse().map_err(|_| Error::Parse {
                line: 0,
                msg: format!("bad index `{tok}`"),
            })?;
            out.push(v);
        }
        Self::new(out, bound)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    /// The 1-based indices.
    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }

    pub fn zero_based(&self) -> Vec<usize> {
        self.indices.iter().map(|i| i - 1).collect()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn complement(&self) -> IndexSet {
        IndexSet {
            indices: (1..=self.bound).filter(|&i| !self.contains(i)).collect(),
            bound: self.bound,
        }
    }

    pub fn is_full(&self) -> bool {
        self.indices.len() == self.bound
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.indices.serialize(serializer)
    }
}

/// Pivot positions found by row elimination, zero-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pivots {
    /// Source rows that ended up in pivot positions, in pivot order.
    pub rows: Vec<usize>,
    /// Pivot columns, increasing.
    pub cols: Vec<usize>,
}

impl Pivots {
    pub fn rank(&self) -> usize {
        self.cols.len()
    }
}

/// Dense `rows x cols` matrix over `F`, row-major.
///
/// Zero-sized dimensions are allowed; they arise from empty index sets.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

impl<F: Field> Matrix<F> {
    pub fn new(field: &F, rows: usize, cols: usize, data: Vec<F::Elem>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(shape_err(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix {
            field: field.clone(),
            rows,
            cols,
            data,
        })
    }

    pub fn zeros(field: &F, rows: usize, cols: usize) -> Self {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = field.one();
        }
        m
    }

    pub fn from_fn(field: &F, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F::Elem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data,
        }
    }

    /// Integer literal rows, mapped into the field.
    pub fn from_i64<const N: usize>(field: &F, rows: &[[i64; N]]) -> Self {
        Self::from_fn(field, rows.len(), N, |i, j| field.from_i64(rows[i][j]))
    }

    pub fn random<R: Rng + ?Sized>(field: &F, rows: usize, cols: usize, rng: &mut R) -> Self {
        Self::from_fn(field, rows, cols, |_, _| field.sample(rng))
    }

    pub fn field(&self) -> &F {
        &self.field
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[F::Elem] {
        &self.data
    }

    pub fn into_data(self) -> Vec<F::Elem> {
        self.data
    }

    /// Zero-based entry access.
    pub fn get(&self, i: usize, j: usize) -> &F::Elem {
        assert!(
            i < self.rows && j < self.cols,
            "({i},{j}) outside {}x{}",
            self.rows,
            self.cols
        );
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F::Elem) {
        assert!(
            i < self.rows && j < self.cols,
            "({i},{j}) outside {}x{}",
            self.rows,
            self.cols
        );
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Moves the matrix into another field entrywise.
    pub fn map_into<G: Field>(&self, field: &G, f: impl Fn(&F::Elem) -> G::Elem) -> Matrix<G> {
        Matrix {
            field: field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Conjugate transpose under the field involution (the `*` operator).
    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(&self.field, self.cols, self.rows, |i, j| {
            self.field.conj(self.get(j, i))
        })
    }

    fn check_field(&self, other: &Self) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(shape_err(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let (m, k, n) = (self.rows, self.cols, other.cols);
        let mut data = vec![f.zero(); m * n];
        for i in 0..m {
            let out = &mut data[i * n..(i + 1) * n];
            for l in 0..k {
                let a = &self.data[i * k + l];
                if f.is_zero(a) {
                    continue;
                }
                let brow = &other.data[l * n..(l + 1) * n];
                for (o, b) in out.iter_mut().zip(brow) {
                    *o = f.add(o, &f.mul(a, b));
                }
            }
        }
        Ok(Matrix {
            field: f.clone(),
            rows: m,
            cols: n,
            data,
        })
    }

    fn zip_with(&self, other: &Self, op: impl Fn(&F::Elem, &F::Elem) -> F::Elem) -> Result<Self> {
        self.check_field(other)?;
        if self.shape() != other.shape() {
            return Err(shape_err(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| op(a, b)).collect();
        Ok(Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| self.field.add(a, b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| self.field.sub(a, b))
    }

    pub fn scale(&self, s: &F::Elem) -> Self {
        let data = self.data.iter().map(|a| self.field.mul(a, s)).collect();
        Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Square matrix power, `A^0 = I`.
    pub fn pow(&self, k: u32) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut out = Self::identity(&self.field, self.rows);
        for _ in 0..k {
            out = out.matmul(self)?;
        }
        Ok(out)
    }

    /// Zero-based selection; panics on out-of-range indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(&self.field, rows.len(), cols.len(), |i, j| {
            self.get(rows[i], cols[j]).clone()
        })
    }

    fn check_bounds(&self, rows: &IndexSet, cols: &IndexSet) -> Result<()> {
        for (set, bound) in [(rows, self.rows), (cols, self.cols)] {
            if let Some(&bad) = set.as_slice().last().filter(|&&i| i > bound) {
                return Err(Error::IndexOutOfRange { index: bad, bound });
            }
        }
        Ok(())
    }

    /// `A(I, J)`.
    pub fn submatrix(&self, rows: &IndexSet, cols: &IndexSet) -> Result<Self> {
        self.check_bounds(rows, cols)?;
        Ok(self.select(&rows.zero_based(), &cols.zero_based()))
    }

    /// `A(I, :)`.
    pub fn select_rows(&self, rows: &IndexSet) -> Result<Self> {
        self.submatrix(rows, &IndexSet::full(self.cols))
    }

    /// `A(:, J)`.
    pub fn select_cols(&self, cols: &IndexSet) -> Result<Self> {
        self.submatrix(&IndexSet::full(self.rows), cols)
    }

    pub fn hstack(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        if self.rows != other.rows {
            return Err(shape_err("hstack needs equal row counts"));
        }
        Ok(Self::from_fn(&self.field, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        }))
    }

    pub fn vstack(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        if self.cols != other.cols {
            return Err(shape_err("vstack needs equal column counts"));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Matrix {
            field: self.field.clone(),
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// `[[tl, tr], [bl, br]]`.
    pub fn from_blocks(tl: &Self, tr: &Self, bl: &Self, br: &Self) -> Result<Self> {
        tl.hstack(tr)?.vstack(&bl.hstack(br)?)
    }

    /// Kronecker product `[a_ij * B]`.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        let f = &self.field;
        let (t, s) = other.shape();
        Ok(Self::from_fn(f, self.rows * t, self.cols * s, |i, j| {
            f.mul(self.get(i / t, j / s), other.get(i % t, j % s))
        }))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .map(|a| {
                let m = self.field.magnitude(a);
                m * m
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(|a| self.field.magnitude(a)).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| self.field.is_zero(a))
    }

    /// Exact equality for exact fields; for floats
    /// `|A - B|_F <= eps * max(|A|_F, |B|_F)`.
    pub fn approx_eq(&self, other: &Self) -> bool {
        self.approx_eq_scaled(other, 0.0)
    }

    /// As [`Matrix::approx_eq`] with an extra reference magnitude folded into
    /// the tolerance, for results that went through large intermediates.
    pub fn approx_eq_scaled(&self, other: &Self, scale: f64) -> bool {
        if self.shape() != other.shape() || self.field != other.field {
            return false;
        }
        if self.field.is_exact() {
            return self.data == other.data;
        }
        let diff = self.try_sub(other).expect("shapes checked").frobenius_norm();
        let reference = self.frobenius_norm().max(other.frobenius_norm()).max(scale);
        diff <= self.field.eps() * reference
    }

    /// Zero test against a reference magnitude (`|A|_F <= eps * scale` for
    /// floats, exact otherwise).
    pub fn is_approx_zero(&self, scale: f64) -> bool {
        if self.field.is_exact() {
            self.is_zero()
        } else {
            self.frobenius_norm() <= self.field.eps() * scale
        }
    }

    /// Relative Frobenius distance `|A - B|_F / max(|B|_F, tiny)`.
    pub fn relative_error(&self, reference: &Self) -> f64 {
        let diff = self.try_sub(reference).expect("conformable").frobenius_norm();
        let r = reference.frobenius_norm();
        if r == 0.0 {
            diff
        } else {
            diff / r
        }
    }

    fn pivot_tolerance(&self) -> f64 {
        self.field.eps() * self.max_magnitude()
    }

    /// Pivot row among `from..rows` in column `col` of row-major `w`.
    fn find_pivot(
        &self,
        w: &[F::Elem],
        col: usize,
        from: usize,
        tol: f64,
        rng: &mut Option<&mut dyn RngCore>,
    ) -> Option<usize> {
        let f = &self.field;
        let n = self.cols;
        if f.is_exact() {
            return (from..self.rows).find(|&i| !f.is_zero(&w[i * n + col]));
        }
        let mags: Vec<(usize, f64)> = (from..self.rows).map(|i| (i, f.magnitude(&w[i * n + col]))).collect();
        let best = mags.iter().map(|&(_, m)| m).fold(0.0, f64::max);
        if best <= tol || best == 0.0 {
            return None;
        }
        let ties: Vec<usize> = mags.iter().filter(|&&(_, m)| m == best).map(|&(i, _)| i).collect();
        match rng {
            Some(r) if ties.len() > 1 => Some(ties[r.random_range(0..ties.len())]),
            _ => Some(ties[0]),
        }
    }

    fn echelon(&self, mut rng: Option<&mut dyn RngCore>) -> Pivots {
        let f = &self.field;
        let (m, n) = self.shape();
        let mut w = self.data.clone();
        let mut perm: Vec<usize> = (0..m).collect();
        let tol = self.pivot_tolerance();
        let mut cols = Vec::new();
        let mut r = 0;
        for c in 0..n {
            if r == m {
                break;
            }
            let Some(p) = self.find_pivot(&w, c, r, tol, &mut rng) else {
                continue;
            };
            if p != r {
                for j in 0..n {
                    w.swap(r * n + j, p * n + j);
                }
                perm.swap(r, p);
            }
            let inv = f.recip(&w[r * n + c]).expect("pivot is nonzero");
            for i in r + 1..m {
                let factor = f.mul(&w[i * n + c], &inv);
                if f.is_zero(&factor) {
                    continue;
                }
                for j in c..n {
                    let t = f.mul(&factor, &w[r * n + j]);
                    w[i * n + j] = f.sub(&w[i * n + j], &t);
                }
            }
            cols.push(c);
            r += 1;
        }
        perm.truncate(r);
        Pivots { rows: perm, cols }
    }

    /// Pivot rows and columns of Gaussian elimination.
    pub fn pivots(&self) -> Pivots {
        self.echelon(None)
    }

    /// As [`Matrix::pivots`], with `rng` breaking exact magnitude ties between
    /// floating pivot candidates. Exact fields ignore it.
    pub fn pivots_with(&self, rng: &mut dyn RngCore) -> Pivots {
        self.echelon(Some(rng))
    }

    pub fn rank(&self) -> usize {
        self.pivots().rank()
    }

    /// Two-sided elimination: `F * diag(I_r, 0) * G^-1 = A`.
    pub fn rank_normal_form(&self) -> RankNormalForm<F> {
        let f = &self.field;
        let (m, n) = self.shape();
        let mut work = self.clone();
        let mut left = Self::identity(f, m); // F
        let mut left_inv = Self::identity(f, m); // F^-1
        let mut right = Self::identity(f, n); // G
        let mut right_inv = Self::identity(f, n); // G^-1
        let tol = self.pivot_tolerance();
        let mut pivot_cols = Vec::new();
        let mut r = 0;

        for c in 0..n {
            if r == m {
                break;
            }
            let Some(p) = work.find_pivot(&work.data, c, r, tol, &mut None) else {
                continue;
            };
            if p != r {
                work.swap_rows(r, p);
                left_inv.swap_rows(r, p);
                left.swap_cols(r, p);
            }
            let pivot = work.get(r, c).clone();
            let s = f.recip(&pivot).expect("pivot is nonzero");
            work.scale_row(r, &s);
            left_inv.scale_row(r, &s);
            left.scale_col(r, &pivot);
            for i in 0..m {
                if i == r {
                    continue;
                }
                let factor = work.get(i, c).clone();
                if f.is_zero(&factor) {
                    continue;
                }
                let neg = f.neg(&factor);
                // row_i -= factor * row_r
                work.add_row_multiple(i, r, &neg);
                left_inv.add_row_multiple(i, r, &neg);
                // F <- F * E^-1: col_r += factor * col_i
                left.add_col_multiple(r, i, &factor);
            }
            pivot_cols.push(c);
            r += 1;
        }

        // Rows past r are numerically zero; bring the pivot columns to the
        // front and clear the rest of the pivot rows with column operations.
        for (k, &pc) in pivot_cols.iter().enumerate() {
            if pc != k {
                work.swap_cols(k, pc);
                right.swap_cols(k, pc);
                right_inv.swap_rows(k, pc);
            }
        }
        for k in 0..r {
            for c in r..n {
                let a = work.get(k, c).clone();
                if f.is_zero(&a) {
                    continue;
                }
                let neg = f.neg(&a);
                // col_c -= a * col_k
                work.add_col_multiple(c, k, &neg);
                right.add_col_multiple(c, k, &neg);
                // G^-1 <- E^-1 * G^-1: row_k += a * row_c
                right_inv.add_row_multiple(k, c, &a);
            }
        }

        RankNormalForm {
            f: left,
            f_inv: left_inv,
            g: right,
            g_inv: right_inv,
            rank: r,
        }
    }

    /// Inverse of a nonsingular square matrix, `G * F^-1` from the rank normal form.
    pub fn invert(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let rnf = self.rank_normal_form();
        if rnf.rank != self.rows {
            return Err(Error::Singular);
        }
        rnf.g.matmul(&rnf.f_inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        let n = self.cols;
        for j in 0..n {
            self.data.swap(a * n + j, b * n + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        let n = self.cols;
        for i in 0..self.rows {
            self.data.swap(i * n + a, i * n + b);
        }
    }

    fn scale_row(&mut self, i: usize, s: &F::Elem) {
        let n = self.cols;
        for j in 0..n {
            self.data[i * n + j] = self.field.mul(&self.data[i * n + j], s);
        }
    }

    fn scale_col(&mut self, j: usize, s: &F::Elem) {
        let n = self.cols;
        for i in 0..self.rows {
            self.data[i * n + j] = self.field.mul(&self.data[i * n + j], s);
        }
    }

    /// `row_dst += c * row_src`
    fn add_row_multiple(&mut self, dst: usize, src: usize, c: &F::Elem) {
        let n = self.cols;
        for j in 0..n {
            let t = self.field.mul(c, &self.data[src * n + j]);
            self.data[dst * n + j] = self.field.add(&self.data[dst * n + j], &t);
        }
    }

    /// `col_dst += c * col_src`
    fn add_col_multiple(&mut self, dst: usize, src: usize, c: &F::Elem) {
        let n = self.cols;
        for i in 0..self.rows {
            let t = self.field.mul(c, &self.data[i * n + src]);
            self.data[i * n + dst] = self.field.add(&self.data[i * n + dst], &t);
        }
    }
}

impl<F: Field> fmt::Display for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|a| self.field.format_elem(a)).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl<F: Field> Mul for &Matrix<F> {
    type Output = Matrix<F>;

    /// Panics on shape or field mismatch; use [`Matrix::matmul`] to get an error.
    fn mul(self, rhs: Self) -> Matrix<F> {
        self.matmul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<F: Field> Add for &Matrix<F> {
    type Output = Matrix<F>;

    fn add(self, rhs: Self) -> Matrix<F> {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<F: Field> Sub for &Matrix<F> {
    type Output = Matrix<F>;

    fn sub(self, rhs: Self) -> Matrix<F> {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<F: Field> Neg for &Matrix<F> {
    type Output = Matrix<F>;

    fn neg(self) -> Matrix<F> {
        let data = self.data.iter().map(|a| self.field.neg(a)).collect();
        Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }
}

/// Invertible `F` (m x m) and `G` (n x n) with `A = F * diag(I_r, 0) * G^-1`.
///
/// Both factors are kept together with their inverses, since every
/// generalized inverse of `A` is `G * [[I, X], [Y, Z]] * F^-1`.
#[derive(Clone, Debug, PartialEq)]
pub struct RankNormalForm<F: Field> {
    pub f: Matrix<F>,
    pub f_inv: Matrix<F>,
    pub g: Matrix<F>,
    pub g_inv: Matrix<F>,
    pub rank: usize,
}

impl<F: Field> RankNormalForm<F> {
    /// `diag(I_r, 0)` with the shape of the source matrix.
    pub fn core(&self) -> Matrix<F> {
        let field = self.f.field();
        let (m, n) = (self.f.rows(), self.g.rows());
        Matrix::from_fn(field, m, n, |i, j| {
            if i == j && i < self.rank {
                field.one()
            } else {
                field.zero()
            }
        })
    }

    /// `F * diag(I_r, 0) * G^-1`.
    pub fn reconstruct(&self) -> Matrix<F> {
        &(&self.f * &self.core()) * &self.g_inv
    }
}

/// Random `rows x cols` matrix of rank exactly `rank`, built as a product of
/// random `rows x rank` and `rank x cols` factors and resampled (up to
/// `retries` times) when the product comes out rank deficient.
pub fn random_rank_matrix<F: Field, R: Rng + ?Sized>(
    field: &F,
    rows: usize,
    cols: usize,
    rank: usize,
    rng: &mut R,
    retries: usize,
) -> Result<Matrix<F>> {
    if rank > rows.min(cols) {
        return Err(Error::InfeasibleRank(format!("rank {rank} in a {rows}x{cols} matrix")));
    }
    for _ in 0..retries.max(1) {
        let a = &Matrix::random(field, rows, rank, rng) * &Matrix::random(field, rank, cols, rng);
        if a.rank() == rank {
            return Ok(a);
        }
    }
    Err(Error::RetriesExhausted(retries))
}

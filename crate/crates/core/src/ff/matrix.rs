use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;

use super::field::PrimeField;
use crate::error::{Error, Result};

/// Dense row-major matrix over a prime field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

/// Output of [`FieldMatrix::rank_rref`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowEchelon {
    pub rank: usize,
    pub rref: FieldMatrix,
    pub pivot_cols: Vec<usize>,
}

/// Row-space intersection with the coefficient matrices that realise it:
/// `proj_a * a == basis == proj_b * b`, all three with `dim` rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Intersection {
    pub basis: FieldMatrix,
    pub proj_a: FieldMatrix,
    pub proj_b: FieldMatrix,
}

impl Intersection {
    pub fn dim(&self) -> usize {
        self.basis.rows
    }
}

impl FieldMatrix {
    pub fn new(field: PrimeField, rows: usize, cols: usize, data: Vec<u64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(&bad) = data.iter().find(|&&v| v >= field.modulus()) {
            return Err(Error::EntryOutOfRange {
                value: bad,
                p: field.modulus(),
            });
        }
        Ok(FieldMatrix {
            field,
            rows,
            cols,
            data,
        })
    }

    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        FieldMatrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % field.modulus();
        }
        m
    }

    /// Builds a matrix from explicit rows; `cols` is needed when `rows` is empty.
    pub fn from_rows_with_cols(field: PrimeField, rows: &[Vec<u64>], cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::new(field, rows.len(), cols, data)
    }

    pub fn from_rows(field: PrimeField, rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows_with_cols(field, rows, cols)
    }

    /// Reduces arbitrary signed integers into the field.
    pub fn from_i64_rows(field: PrimeField, rows: &[Vec<i64>]) -> Result<Self> {
        let reduced: Vec<Vec<u64>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| field.from_i64(v)).collect())
            .collect();
        Self::from_rows(field, &reduced)
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
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
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = self.field.reduce(v);
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(
                self.field.modulus(),
                other.field.modulus(),
            ));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = f.add(out.data[idx], f.mul(a, other.get(k, j)));
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols, "vector length");
        let f = self.field;
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect()
    }

    fn zip_with(&self, other: &Self, op: impl Fn(u64, u64) -> u64) -> Result<Self> {
        self.same_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "shape {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Ok(FieldMatrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let f = self.field;
        self.zip_with(other, |a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let f = self.field;
        self.zip_with(other, |a, b| f.sub(a, b))
    }

    pub fn scale(&self, c: u64) -> Self {
        let f = self.field;
        let c = f.reduce(c);
        FieldMatrix {
            data: self.data.iter().map(|&a| f.mul(a, c)).collect(),
            ..self.clone()
        }
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j);
            }
        }
        out
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        if self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "column counts differ: {} vs {}",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(FieldMatrix {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        if self.rows != other.rows {
            return Err(Error::Dimension(format!(
                "row counts differ: {} vs {}",
                self.rows, other.rows
            )));
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Ok(FieldMatrix {
            field: self.field,
            rows: self.rows,
            cols,
            data,
        })
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        FieldMatrix {
            field: self.field,
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.rows);
        for i in 0..self.rows {
            for &j in idx {
                data.push(self.get(i, j));
            }
        }
        FieldMatrix {
            field: self.field,
            rows: self.rows,
            cols: idx.len(),
            data,
        }
    }

    /// Gauss-Jordan elimination in place, choosing pivots only among the first
    /// `pivot_limit` columns. Returns the pivot columns; the first
    /// `pivots.len()` rows are the nonzero (on those columns) rows.
    fn reduce_in_place(&mut self, pivot_limit: usize) -> Vec<usize> {
        let f = self.field;
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..pivot_limit.min(cols) {
            if r == rows {
                break;
            }
            let Some(pr) = (r..rows).find(|&i| self.data[i * cols + c] != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..cols {
                    self.data.swap(pr * cols + j, r * cols + j);
                }
            }
            let inv = f.inv(self.data[r * cols + c]).expect("nonzero pivot");
            for j in 0..cols {
                let idx = r * cols + j;
                self.data[idx] = f.mul(self.data[idx], inv);
            }
            for i in 0..rows {
                if i == r {
                    continue;
                }
                let factor = self.data[i * cols + c];
                if factor == 0 {
                    continue;
                }
                for j in 0..cols {
                    let sub = f.mul(factor, self.data[r * cols + j]);
                    let idx = i * cols + j;
                    self.data[idx] = f.sub(self.data[idx], sub);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank_rref(&self) -> RowEchelon {
        let mut m = self.clone();
        let pivot_cols = m.reduce_in_place(self.cols);
        RowEchelon {
            rank: pivot_cols.len(),
            rref: m,
            pivot_cols,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank_rref().rank
    }

    /// Basis (as rows) of `{x : self * x = 0}`, in the standard form
    /// obtained from the reduced echelon form.
    pub fn right_nullspace(&self) -> Self {
        let RowEchelon {
            rref, pivot_cols, ..
        } = self.rank_rref();
        let f = self.field;
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_cols.contains(c)).collect();
        let mut out = Self::zeros(f, free.len(), self.cols);
        for (k, &fc) in free.iter().enumerate() {
            out.data[k * self.cols + fc] = 1;
            for (r, &pc) in pivot_cols.iter().enumerate() {
                out.data[k * self.cols + pc] = f.neg(rref.get(r, fc));
            }
        }
        out
    }

    /// Basis (as rows) of `{y : y * self = 0}`.
    pub fn left_nullspace(&self) -> Self {
        self.transpose().right_nullspace()
    }

    /// Some solution of `self * x = rhs` (free variables set to zero), or
    /// `None` when the system is inconsistent.
    pub fn solve(&self, rhs: &[u64]) -> Option<Vec<u64>> {
        assert_eq!(rhs.len(), self.rows, "rhs length");
        let column = FieldMatrix {
            field: self.field,
            rows: self.rows,
            cols: 1,
            data: rhs.to_vec(),
        };
        let mut aug = self.hstack(&column).expect("same field");
        let pivots = aug.reduce_in_place(self.cols);
        let rank = pivots.len();
        if (rank..self.rows).any(|i| aug.get(i, self.cols) != 0) {
            return None;
        }
        let mut x = vec![0; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.get(r, self.cols);
        }
        Some(x)
    }

    /// Determinant of a square matrix.
    pub fn determinant(&self) -> Result<u64> {
        if self.rows != self.cols {
            return Err(Error::Dimension(format!(
                "determinant of non-square {}x{}",
                self.rows, self.cols
            )));
        }
        let f = self.field;
        let n = self.rows;
        let mut m = self.data.clone();
        let mut det = 1 % f.modulus();
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| m[i * n + c] != 0) else {
                return Ok(0);
            };
            if pr != c {
                for j in 0..n {
                    m.swap(pr * n + j, c * n + j);
                }
                det = f.neg(det);
            }
            let piv = m[c * n + c];
            det = f.mul(det, piv);
            let inv = f.inv(piv)?;
            for i in c + 1..n {
                let factor = f.mul(m[i * n + c], inv);
                if factor == 0 {
                    continue;
                }
                for j in c..n {
                    let sub = f.mul(factor, m[c * n + j]);
                    m[i * n + j] = f.sub(m[i * n + j], sub);
                }
            }
        }
        Ok(det)
    }
}

/// Intersection of the row spaces of `a` and `b`.
///
/// Every left-null vector `(x, y)` of the stacked matrix `[a; b]` gives a
/// relation `x a = -y b`, i.e. a vector of the intersection together with its
/// coefficients on both sides. Row-reducing `[x a | x | -y]` with pivots
/// restricted to the first block yields the intersection in reduced echelon
/// form while carrying the coefficient rows along, so `proj_a * a` and
/// `proj_b * b` both equal the returned basis exactly.
pub fn rowspace_intersection(a: &FieldMatrix, b: &FieldMatrix) -> Result<Intersection> {
    a.same_field(b)?;
    if a.cols != b.cols {
        return Err(Error::Dimension(format!(
            "row-space intersection needs equal column counts ({} vs {})",
            a.cols, b.cols
        )));
    }
    let f = a.field;
    let stacked = a.vstack(b)?;
    let null = stacked.left_nullspace();
    let ra: Vec<usize> = (0..a.rows).collect();
    let rb: Vec<usize> = (a.rows..a.rows + b.rows).collect();
    let coeff_a = null.select_cols(&ra);
    let coeff_b = null.select_cols(&rb).scale(f.modulus() - 1);
    let vectors = coeff_a.mul(a)?;

    let mut aug = vectors.hstack(&coeff_a)?.hstack(&coeff_b)?;
    let dim = aug.reduce_in_place(a.cols).len();
    let keep: Vec<usize> = (0..dim).collect();
    let top = aug.select_rows(&keep);
    let basis = top.select_cols(&(0..a.cols).collect::<Vec<_>>());
    let proj_a = top.select_cols(&(a.cols..a.cols + a.rows).collect::<Vec<_>>());
    let proj_b = top.select_cols(&(a.cols + a.rows..aug.cols).collect::<Vec<_>>());
    Ok(Intersection {
        basis,
        proj_a,
        proj_b,
    })
}

/// Cauchy matrix with entries `1 / (x_i - y_j)`.
pub fn cauchy_matrix(xs: &[u64], ys: &[u64], field: PrimeField) -> Result<FieldMatrix> {
    let mut seen = std::collections::BTreeSet::new();
    for &v in xs.iter().chain(ys) {
        let v = field.reduce(v);
        if !seen.insert(v) {
            return Err(Error::CauchyRepeat(v));
        }
    }
    if (xs.len() + ys.len()) as u64 > field.modulus() {
        return Err(Error::CauchyTooLarge {
            needed: xs.len() + ys.len(),
            p: field.modulus(),
        });
    }
    let mut m = FieldMatrix::zeros(field, xs.len(), ys.len());
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            let d = field.sub(field.reduce(x), field.reduce(y));
            m.data[i * ys.len() + j] = field.inv(d)?;
        }
    }
    Ok(m)
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldMatrix[{}; {}x{}]", self.field, self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "\n  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

/// Serde adapter: a matrix as a JSON array of rows. The field and the column
/// count are not part of the wire form, so deserialisation yields raw rows.
pub fn serialize_rows<S: Serializer>(m: &FieldMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize;
    m.to_rows().serialize(s)
}

pub fn deserialize_rows<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<u64>>, D::Error> {
    use serde::Deserialize;
    let rows = Vec::<Vec<u64>>::deserialize(d)?;
    if let Some(w) = rows.first().map(Vec::len) {
        if rows.iter().any(|r| r.len() != w) {
            return Err(de::Error::custom("ragged matrix rows"));
        }
    }
    Ok(rows)
}

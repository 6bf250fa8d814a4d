use std::fmt;
use std::ops::{Add, Mul, Sub};

use super::echelon::{kernel_from_rref, EchelonBasis, Subspace};
use super::Polynomial;
use crate::error::{Error, Result};
use crate::field::{FieldDescriptor, Scalar};

/// Dense matrix over an exact field, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    field: FieldDescriptor,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl ExactMatrix {
    pub fn new(field: &FieldDescriptor, rows: usize, cols: usize, data: Vec<Scalar>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::shape("matrices need at least one row and one column"));
        }
        if data.len() != rows * cols {
            return Err(Error::shape(format!("{} entries for a {rows}×{cols} matrix", data.len())));
        }
        if let Some(bad) = data.iter().find(|x| !field.owns(x)) {
            return Err(Error::MixedField {
                left: format!("{bad:?}"),
                right: field.to_string(),
            });
        }
        Ok(ExactMatrix {
            field: field.clone(),
            rows,
            cols,
            data,
        })
    }

    pub fn from_rows(field: &FieldDescriptor, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::shape("ragged rows"));
        }
        Self::new(field, r, c, rows.into_iter().flatten().collect())
    }

    /// Parses a grid of scalar literals.
    pub fn parse<S: AsRef<str>>(field: &FieldDescriptor, grid: &[Vec<S>]) -> Result<Self> {
        let rows = grid
            .iter()
            .map(|row| row.iter().map(|t| field.parse_scalar(t.as_ref())).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(field, rows)
    }

    pub fn from_fn(field: &FieldDescriptor, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ExactMatrix {
            field: field.clone(),
            rows,
            cols,
            data,
        }
    }

    pub fn zeros(field: &FieldDescriptor, rows: usize, cols: usize) -> Self {
        Self::from_fn(field, rows, cols, |_, _| field.zero())
    }

    pub fn identity(field: &FieldDescriptor, n: usize) -> Self {
        Self::scalar(field, n, field.one())
    }

    pub fn scalar(field: &FieldDescriptor, n: usize, c: Scalar) -> Self {
        Self::from_fn(field, n, n, |i, j| if i == j { c.clone() } else { field.zero() })
    }

    /// Matrix unit `E_ij` (zero-based indices).
    pub fn unit(field: &FieldDescriptor, n: usize, i: usize, j: usize) -> Self {
        Self::from_fn(field, n, n, |r, c| if (r, c) == (i, j) { field.one() } else { field.zero() })
    }

    pub fn diagonal(field: &FieldDescriptor, diag: &[Scalar]) -> Self {
        let n = diag.len();
        Self::from_fn(field, n, n, |i, j| if i == j { diag[i].clone() } else { field.zero() })
    }

    /// Inverse of [`ExactMatrix::flatten`] for square matrices.
    pub fn from_flat(field: &FieldDescriptor, n: usize, data: Vec<Scalar>) -> Self {
        assert_eq!(data.len(), n * n);
        ExactMatrix {
            field: field.clone(),
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_vectors(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Row-major entries; for square matrices this is the flattening used
    /// to treat matrix spaces as `F^{n²}`.
    pub fn flatten(&self) -> &[Scalar] {
        &self.data
    }

    pub fn entries(&self) -> impl Iterator<Item = &Scalar> {
        self.data.iter()
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::MixedField {
                left: self.field.to_string(),
                right: other.field.to_string(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::shape("addition of differently shaped matrices"));
        }
        Ok(self.zip_with(other, |f, a, b| f.add(a, b)))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::shape("subtraction of differently shaped matrices"));
        }
        Ok(self.zip_with(other, |f, a, b| f.sub(a, b)))
    }

    fn zip_with(&self, other: &Self, op: impl Fn(&FieldDescriptor, &Scalar, &Scalar) -> Scalar) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| op(&self.field, a, b)).collect();
        ExactMatrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        if self.cols != other.rows {
            return Err(Error::shape(format!(
                "cannot multiply {}×{} by {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let f = &self.field;
        let mut data = vec![f.zero(); self.rows * other.cols];
        for i in 0..self.rows {
            let out = &mut data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for (o, b) in out.iter_mut().zip(other.row(k)) {
                    *o = f.mul_add(o, a, b);
                }
            }
        }
        ExactMatrix {
            field: f.clone(),
            rows: self.rows,
            cols: other.cols,
            data,
        }
    }

    /// `A v` for a column vector `v`.
    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols, "vector length does not match matrix width");
        let f = &self.field;
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(f.zero(), |acc, (a, b)| if f.is_zero(a) { acc } else { f.mul_add(&acc, a, b) })
            })
            .collect()
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let data = self.data.iter().map(|x| self.field.mul(x, c)).collect();
        ExactMatrix { data, ..self.clone() }
    }

    pub fn neg(&self) -> Self {
        let data = self.data.iter().map(|x| self.field.neg(x)).collect();
        ExactMatrix { data, ..self.clone() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn trace(&self) -> Scalar {
        let f = &self.field;
        (0..self.rows.min(self.cols)).fold(f.zero(), |acc, i| f.add(&acc, self.get(i, i)))
    }

    pub fn pow(&self, mut e: u64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::shape("power of a non-square matrix"));
        }
        let mut acc = Self::identity(&self.field, self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Row space in canonical reduced row-echelon form.
    pub fn rref(&self) -> Subspace {
        Subspace::span(&self.field, self.cols, self.row_vectors())
    }

    pub fn rank(&self) -> usize {
        let mut basis = EchelonBasis::new(&self.field, self.cols);
        for i in 0..self.rows {
            basis.insert(self.row(i).to_vec());
        }
        basis.dim()
    }

    /// `{ x : A x = 0 }`
    pub fn kernel(&self) -> Subspace {
        kernel_from_rref(&self.field, &self.rref())
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::shape("inverse of a non-square matrix"));
        }
        let f = &self.field;
        let n = self.rows;
        // Gauss-Jordan on [A | I].
        let mut aug: Vec<Vec<Scalar>> = (0..n)
            .map(|i| {
                let mut row = self.row(i).to_vec();
                row.extend((0..n).map(|j| if i == j { f.one() } else { f.zero() }));
                row
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !f.is_zero(&aug[r][col])).ok_or(Error::SingularMatrix)?;
            aug.swap(col, pivot);
            let inv = f.inv(&aug[col][col])?;
            for x in aug[col].iter_mut() {
                *x = f.mul(x, &inv);
            }
            let pivot_row = aug[col].clone();
            for (r, row) in aug.iter_mut().enumerate() {
                if r == col || f.is_zero(&row[col]) {
                    continue;
                }
                let c = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x = f.sub(x, &f.mul(&c, p));
                }
            }
        }
        let data = aug.into_iter().flat_map(|row| row.into_iter().skip(n)).collect();
        Ok(ExactMatrix {
            field: f.clone(),
            rows: n,
            cols: n,
            data,
        })
    }

    /// `P⁻¹ A P`
    pub fn conjugate_by(&self, p: &Self) -> Result<Self> {
        p.inverse()?.checked_mul(self)?.checked_mul(p)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(&self.field, self.rows)
    }

    /// True for `cI`.
    pub fn is_scalar(&self) -> bool {
        self.is_square() && *self == Self::scalar(&self.field, self.rows, self.get(0, 0).clone())
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self.field.is_zero(self.get(i, j))))
    }

    /// Characteristic polynomial `det(xI - A)`.
    ///
    /// Fraction-free (Bareiss) elimination over `F[x]`: every division is
    /// exact, so entries stay polynomials throughout.
    pub fn char_poly(&self) -> Result<Polynomial> {
        if !self.is_square() {
            return Err(Error::shape("characteristic polynomial of a non-square matrix"));
        }
        let f = &self.field;
        let n = self.rows;
        let mut m: Vec<Vec<Polynomial>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let c = f.neg(self.get(i, j));
                        if i == j {
                            Polynomial::new(f, vec![c, f.one()])
                        } else {
                            Polynomial::constant(f, c)
                        }
                    })
                    .collect()
            })
            .collect();
        let mut negate = false;
        let mut prev = Polynomial::one(f);
        for k in 0..n.saturating_sub(1) {
            if m[k][k].is_zero() {
                let Some(r) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                    return Ok(Polynomial::zero(f));
                };
                m.swap(k, r);
                negate = !negate;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                    m[i][j] = num.exact_div(&prev).expect("Bareiss divisions are exact");
                }
                m[i][k] = Polynomial::zero(f);
            }
            prev = m[k][k].clone();
        }
        let det = m[n - 1][n - 1].clone();
        Ok(if negate { det.neg() } else { det })
    }

    /// Entry grid rendered with the field's literal syntax.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| self.field.format_scalar(x)).collect())
            .collect()
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.to_strings().into_iter().map(|r| r.join(", ")).collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactMatrix({self} over {})", self.field)
    }
}

// Operator forms panic on shape or field mismatch, like indexing does.

impl Mul for &ExactMatrix {
    type Output = ExactMatrix;
    fn mul(self, rhs: &ExactMatrix) -> ExactMatrix {
        self.checked_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Add for &ExactMatrix {
    type Output = ExactMatrix;
    fn add(self, rhs: &ExactMatrix) -> ExactMatrix {
        self.checked_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub for &ExactMatrix {
    type Output = ExactMatrix;
    fn sub(self, rhs: &ExactMatrix) -> ExactMatrix {
        self.checked_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

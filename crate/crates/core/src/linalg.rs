//! Dense matrices over a [`FieldCtx`] and Gaussian elimination.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Felt, FieldCtx};

#[derive(Clone)]
pub struct Matrix {
    field: Arc<FieldCtx>,
    rows: usize,
    cols: usize,
    entries: Vec<Felt>,
}

/// Row-major JSON form: `entries[i][j]` is the coefficient list of entry (i, j).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<Vec<u64>>>,
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.field.same_field(&other.field)
            && self.rows == other.rows
            && self.cols == other.cols
            && self.entries == other.entries
    }
}

impl Eq for Matrix {}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "Matrix {}x{} over GF({})",
            self.rows,
            self.cols,
            self.field.q()
        )?;
        for row in self.entries.chunks(self.cols.max(1)) {
            let idx: Vec<u64> = row.iter().map(|x| x.index()).collect();
            writeln!(f, "  {idx:?}")?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn new(field: Arc<FieldCtx>, rows: usize, cols: usize, entries: Vec<Felt>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                actual: entries.len(),
            });
        }
        if let Some(bad) = entries.iter().find(|x| x.index() >= field.q()) {
            return Err(Error::InvalidElement(vec![bad.index()]));
        }
        Ok(Matrix {
            field,
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(field: Arc<FieldCtx>, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            entries: vec![Felt::ZERO; rows * cols],
        }
    }

    pub fn identity(field: Arc<FieldCtx>, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, Felt::ONE);
        }
        m
    }

    pub fn from_rows(field: Arc<FieldCtx>, rows: &[Vec<Felt>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch {
                expected: cols,
                actual: r.len(),
            });
        }
        Self::new(field, rows.len(), cols, rows.concat())
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Felt] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Felt {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Felt) {
        self.entries[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[Felt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Felt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field.clone(), self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows || !self.field.same_field(&other.field) {
            return Err(Error::ShapeMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        let f = &self.field;
        let mut out = Matrix::zeros(f.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let s = f.sum((0..self.cols).map(|l| f.mul(self.get(i, l), other.get(l, j))));
                out.set(i, j, s);
            }
        }
        Ok(out)
    }

    /// `self · selfᵀ`, the Gram matrix of the rows.
    pub fn gram(&self) -> Matrix {
        self.mul(&self.transpose()).expect("shapes agree")
    }

    /// `x · self` for a row vector `x`.
    pub fn left_mul_vec(&self, x: &[Felt]) -> Result<Vec<Felt>> {
        if x.len() != self.rows {
            return Err(Error::LengthMismatch {
                expected: self.rows,
                actual: x.len(),
            });
        }
        let f = &self.field;
        Ok((0..self.cols)
            .map(|j| f.sum((0..self.rows).map(|i| f.mul(x[i], self.get(i, j)))))
            .collect())
    }

    /// `self · x` for a column vector `x`.
    pub fn mul_vec(&self, x: &[Felt]) -> Result<Vec<Felt>> {
        if x.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                actual: x.len(),
            });
        }
        let f = &self.field;
        Ok((0..self.rows)
            .map(|i| f.sum(self.row(i).iter().zip(x).map(|(&a, &b)| f.mul(a, b))))
            .collect())
    }

    /// Submatrix formed by the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let entries = (0..self.rows)
            .flat_map(|i| cols.iter().map(move |&j| self.get(i, j)))
            .collect();
        Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: cols.len(),
            entries,
        }
    }

    /// Reduced row echelon form; pivots are 1 and zero rows sit at the bottom.
    pub fn rref(&self) -> Matrix {
        let mut m = self.clone();
        m.reduce();
        m
    }

    /// Row-reduces in place and returns the pivot columns.
    fn reduce(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(pr) = (r..rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if pr != r {
                for j in 0..cols {
                    self.entries.swap(pr * cols + j, r * cols + j);
                }
            }
            let inv = f.inv(self.get(r, c)).expect("pivot is nonzero");
            for j in c..cols {
                let x = f.mul(self.get(r, j), inv);
                self.set(r, j, x);
            }
            for i in 0..rows {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c);
                if factor.is_zero() {
                    continue;
                }
                for j in c..cols {
                    let x = f.sub(self.get(i, j), f.mul(factor, self.get(r, j)));
                    self.set(i, j, x);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        rank_of(&self.field, &mut self.entries.clone(), self.rows, self.cols)
    }

    /// Basis of `{x : self · xᵀ = 0}`, one vector per free column in column
    /// order, each scaled so its first nonzero coordinate is 1.
    pub fn nullspace(&self) -> Vec<Vec<Felt>> {
        let f = &self.field;
        let mut m = self.clone();
        let pivots = m.reduce();
        let free = (0..self.cols).filter(|c| !pivots.contains(c));
        free.map(|fc| {
            let mut x = vec![Felt::ZERO; self.cols];
            x[fc] = Felt::ONE;
            for (r, &pc) in pivots.iter().enumerate() {
                x[pc] = f.neg(m.get(r, fc));
            }
            normalize(f, &mut x);
            x
        })
        .collect()
    }

    /// `A^{(r)}`: every entry raised to the power `r`.
    pub fn entrywise_power(&self, r: u64) -> Matrix {
        let entries = self
            .entries
            .iter()
            .map(|&x| self.field.pow_u(x, r))
            .collect();
        Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    /// Whether the two matrices have the same reduced row echelon form.
    pub fn row_equivalent(&self, other: &Matrix) -> Result<bool> {
        if self.rows != other.rows
            || self.cols != other.cols
            || !self.field.same_field(&other.field)
        {
            return Err(Error::ShapeMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        Ok(self.rref() == other.rref())
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            entries: (0..self.rows)
                .map(|i| self.row(i).iter().map(|&x| self.field.coeffs(x)).collect())
                .collect(),
        }
    }

    pub fn from_json(field: Arc<FieldCtx>, json: &MatrixJson) -> Result<Matrix> {
        if json.entries.len() != json.rows {
            return Err(Error::Parse(format!(
                "matrix declares {} rows, has {}",
                json.rows,
                json.entries.len()
            )));
        }
        let mut entries = Vec::with_capacity(json.rows * json.cols);
        for (i, row) in json.entries.iter().enumerate() {
            if row.len() != json.cols {
                return Err(Error::Parse(format!(
                    "matrix row {i} has {} entries, expected {}",
                    row.len(),
                    json.cols
                )));
            }
            for (j, c) in row.iter().enumerate() {
                let x = field.from_coeffs(c).map_err(|_| {
                    Error::Parse(format!(
                        "matrix entry ({i}, {j}) = {c:?} is not a field element"
                    ))
                })?;
                entries.push(x);
            }
        }
        Matrix::new(field, json.rows, json.cols, entries)
    }
}

/// Rank of a row-major buffer, destroying it.
pub(crate) fn rank_of(f: &FieldCtx, m: &mut [Felt], rows: usize, cols: usize) -> usize {
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !m[i * cols + c].is_zero()) else {
            continue;
        };
        if pr != r {
            for j in c..cols {
                m.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = f.inv(m[r * cols + c]).expect("pivot is nonzero");
        for i in r + 1..rows {
            let factor = f.mul(m[i * cols + c], inv);
            if factor.is_zero() {
                continue;
            }
            for j in c..cols {
                m[i * cols + j] = f.sub(m[i * cols + j], f.mul(factor, m[r * cols + j]));
            }
        }
        r += 1;
    }
    r
}

fn normalize(f: &FieldCtx, x: &mut [Felt]) {
    if let Some(&lead) = x.iter().find(|v| !v.is_zero()) {
        let inv = f.inv(lead).expect("nonzero");
        for v in x.iter_mut() {
            *v = f.mul(*v, inv);
        }
    }
}

/// The `(n-1) × n` matrix whose row `i` is `(a_1^i, …, a_n^i)`.
pub fn vandermonde_system(field: &Arc<FieldCtx>, a: &[Felt]) -> Result<Matrix> {
    let n = a.len();
    if n < 2 {
        return Err(Error::RangeError(format!(
            "need at least 2 points, got {n}"
        )));
    }
    check_distinct(a)?;
    let mut m = Matrix::zeros(field.clone(), n - 1, n);
    for (j, &x) in a.iter().enumerate() {
        let mut pw = Felt::ONE;
        for i in 0..n - 1 {
            m.set(i, j, pw);
            pw = field.mul(pw, x);
        }
    }
    Ok(m)
}

pub(crate) fn check_distinct(a: &[Felt]) -> Result<()> {
    let mut sorted = a.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DuplicatePoints);
    }
    Ok(())
}

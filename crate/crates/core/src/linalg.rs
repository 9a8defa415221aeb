//! Exact linear algebra: small dense matrices for minors, and an incremental
//! sparse echelon basis that records how every basis row was assembled from
//! the input rows.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::scalars::Field;

/// Row-major dense matrix over a field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(field: &F, rows: usize, cols: usize) -> Self {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn from_rows(field: &F, rows: Vec<Vec<F::Elem>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
            return Err(Error::DimensionMismatch {
                rows: nrows,
                cols: bad.len(),
                expected_rows: nrows,
                expected_cols: ncols,
            });
        }
        Ok(Matrix {
            field: field.clone(),
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        })
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

    pub fn get(&self, r: usize, c: usize) -> &F::Elem {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: F::Elem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[F::Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Square submatrix on the given rows and columns, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix<F> {
        let data = rows
            .iter()
            .flat_map(|&r| cols.iter().map(move |&c| self.get(r, c).clone()))
            .collect();
        Matrix {
            field: self.field.clone(),
            rows: rows.len(),
            cols: cols.len(),
            data,
        }
    }

    /// Determinant by Gaussian elimination. The empty matrix has determinant 1.
    pub fn determinant(&self) -> Result<F::Elem> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                rows: self.rows,
                cols: self.cols,
                expected_rows: self.rows,
                expected_cols: self.rows,
            });
        }
        let f = &self.field;
        let n = self.rows;
        let mut m = self.data.clone();
        let mut det = f.one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !f.is_zero(&m[r * n + col])) else {
                return Ok(f.zero());
            };
            if piv != col {
                for c in 0..n {
                    m.swap(piv * n + c, col * n + c);
                }
                det = f.neg(&det);
            }
            let pv = m[col * n + col].clone();
            det = f.mul(&det, &pv);
            let pinv = f.inv(&pv)?;
            for r in col + 1..n {
                let factor = f.mul(&m[r * n + col], &pinv);
                if f.is_zero(&factor) {
                    continue;
                }
                for c in col..n {
                    let sub = f.mul(&factor, &m[col * n + c]);
                    m[r * n + c] = f.sub(&m[r * n + c], &sub);
                }
            }
        }
        Ok(det)
    }

    pub fn rank(&self) -> usize {
        let mut basis = EchelonBasis::new(&self.field);
        for r in 0..self.rows {
            let row = SparseVec::from_dense(&self.field, self.row(r));
            basis.insert(row);
        }
        basis.rank()
    }
}

/// Sparse vector: entries sorted by strictly increasing column, no zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseVec<F: Field> {
    entries: Vec<(usize, F::Elem)>,
}

impl<F: Field> Default for SparseVec<F> {
    fn default() -> Self {
        SparseVec {
            entries: Vec::new(),
        }
    }
}

impl<F: Field> SparseVec<F> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds from unsorted entries; repeated columns are summed, zeros dropped.
    pub fn from_entries(field: &F, mut entries: Vec<(usize, F::Elem)>) -> Self {
        entries.sort_by_key(|(c, _)| *c);
        let mut out: Vec<(usize, F::Elem)> = Vec::with_capacity(entries.len());
        for (c, v) in entries {
            match out.last_mut() {
                Some((lc, lv)) if *lc == c => *lv = field.add(lv, &v),
                _ => out.push((c, v)),
            }
        }
        out.retain(|(_, v)| !field.is_zero(v));
        SparseVec { entries: out }
    }

    pub fn from_dense(field: &F, values: &[F::Elem]) -> Self {
        SparseVec {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !field.is_zero(v))
                .map(|(c, v)| (c, v.clone()))
                .collect(),
        }
    }

    pub fn unit(field: &F, col: usize) -> Self {
        SparseVec {
            entries: vec![(col, field.one())],
        }
    }

    pub fn entries(&self) -> &[(usize, F::Elem)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn leading(&self) -> Option<&(usize, F::Elem)> {
        self.entries.first()
    }

    pub fn get(&self, col: usize) -> Option<&F::Elem> {
        self.entries
            .binary_search_by_key(&col, |(c, _)| *c)
            .ok()
            .map(|i| &self.entries[i].1)
    }

    pub fn scale(&self, field: &F, s: &F::Elem) -> Self {
        if field.is_zero(s) {
            return Self::new();
        }
        SparseVec {
            entries: self
                .entries
                .iter()
                .map(|(c, v)| (*c, field.mul(v, s)))
                .collect(),
        }
    }

    /// `self + s * other`.
    pub fn axpy(&self, field: &F, s: &F::Elem, other: &Self) -> Self {
        if field.is_zero(s) {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some((ca, _)), Some((cb, _))) => ca.cmp(cb),
                (Some(_), None) => Ordering::Less,
                (None, _) => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((b[j].0, field.mul(s, &b[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let v = field.add(&a[i].1, &field.mul(s, &b[j].1));
                    if !field.is_zero(&v) {
                        out.push((a[i].0, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        SparseVec { entries: out }
    }
}

/// One row of an [`EchelonBasis`]: normalized so its leading entry is 1,
/// together with the combination of input rows that produced it.
#[derive(Debug, Clone)]
struct BasisRow<F: Field> {
    row: SparseVec<F>,
    combo: SparseVec<F>,
}

/// Result of reducing a vector against an [`EchelonBasis`].
#[derive(Debug, Clone)]
pub struct Reduction<F: Field> {
    /// What is left after cancelling every leading term that has a pivot.
    pub residual: SparseVec<F>,
    /// Coefficients over the inserted input rows with
    /// `vector = residual + sum(coeff_i * input_i)`.
    pub combination: SparseVec<F>,
}

/// Incremental semi-echelon basis. Pivots are the leading (smallest) columns,
/// so the column numbering fixes the pivot tie-break.
#[derive(Debug, Clone)]
pub struct EchelonBasis<F: Field> {
    field: F,
    pivots: std::collections::HashMap<usize, BasisRow<F>>,
    inserted: usize,
}

impl<F: Field> EchelonBasis<F> {
    pub fn new(field: &F) -> Self {
        EchelonBasis {
            field: field.clone(),
            pivots: Default::default(),
            inserted: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Number of rows inserted so far (including dependent ones).
    pub fn inserted(&self) -> usize {
        self.inserted
    }

    pub fn reduce(&self, v: &SparseVec<F>) -> Reduction<F> {
        let f = &self.field;
        let mut residual = v.clone();
        let mut combination = SparseVec::new();
        // Leading columns only ever increase, so scan with a cursor.
        let mut idx = 0;
        while idx < residual.entries.len() {
            let (col, coeff) = residual.entries[idx].clone();
            match self.pivots.get(&col) {
                Some(b) => {
                    let neg = f.neg(&coeff);
                    residual = residual.axpy(f, &neg, &b.row);
                    combination = combination.axpy(f, &coeff, &b.combo);
                }
                None => idx += 1,
            }
        }
        Reduction {
            residual,
            combination,
        }
    }

    /// Inserts the next input row. Returns its new pivot column if it was
    /// independent of the rows already present.
    pub fn insert(&mut self, v: SparseVec<F>) -> Option<usize> {
        let input = self.inserted;
        self.inserted += 1;
        let f = self.field.clone();
        let red = self.reduce(&v);
        let (lead_col, lead) = red.residual.leading()?.clone();
        let lead_inv = f.inv(&lead).expect("leading entry is nonzero");
        // residual = v - combination, so combo(residual) = e_input - combination.
        let combo = SparseVec::unit(&f, input).axpy(&f, &f.neg(&f.one()), &red.combination);
        self.pivots.insert(
            lead_col,
            BasisRow {
                row: red.residual.scale(&f, &lead_inv),
                combo: combo.scale(&f, &lead_inv),
            },
        );
        Some(lead_col)
    }

    pub fn contains(&self, v: &SparseVec<F>) -> bool {
        self.reduce(v).residual.is_zero()
    }
}

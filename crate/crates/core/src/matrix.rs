//! The d-regular 0/1 matrix type.

use std::cmp::Ordering;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// An `n × n` 0/1 matrix whose rows and columns all sum to `d`.
///
/// Stored as sorted row supports; column supports are derived on construction.
/// Entry `(i, j)` is 1 exactly when `j` appears in row `i`'s support.
///
/// Ordering is lexicographic on the concatenated row supports, which is the
/// canonical order used by enumeration and by class counting.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MatrixFile", into = "MatrixFile")]
pub struct RegularMatrix {
    n: usize,
    d: usize,
    rows: Vec<Vec<usize>>,
    cols: Vec<Vec<usize>>,
}

/// On-disk shape: `{"n": .., "d": .., "rows": [[..], ..]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub d: usize,
    pub rows: Vec<Vec<usize>>,
}

impl TryFrom<MatrixFile> for RegularMatrix {
    type Error = Error;

    fn try_from(f: MatrixFile) -> Result<Self> {
        RegularMatrix::from_row_supports(f.n, f.d, f.rows)
    }
}

impl From<RegularMatrix> for MatrixFile {
    fn from(m: RegularMatrix) -> Self {
        MatrixFile { n: m.n, d: m.d, rows: m.rows }
    }
}

impl Ord for RegularMatrix {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.n, self.d, &self.rows).cmp(&(other.n, other.d, &other.rows))
    }
}

impl PartialOrd for RegularMatrix {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl RegularMatrix {
    /// Validates row supports and builds the matrix.
    ///
    /// Rows must be strictly increasing lists of indices in `[0, n)`. The first
    /// row (then column) whose sum differs from `d` is reported.
    pub fn from_row_supports(n: usize, d: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        if d == 0 || d > n {
            return Err(Error::InvalidParameter(format!("d = {d} must lie in [1, {n}]")));
        }
        if rows.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: rows.len() });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.windows(2).any(|w| w[0] >= w[1]) || row.iter().any(|&j| j >= n) {
                return Err(Error::MalformedRow { row: i, n });
            }
            if row.len() != d {
                return Err(Error::RowSum { row: i, sum: row.len(), expected: d });
            }
        }
        let cols = column_supports(n, &rows);
        if let Some((j, c)) = cols.iter().enumerate().find(|(_, c)| c.len() != d) {
            return Err(Error::ColumnSum { col: j, sum: c.len(), expected: d });
        }
        Ok(RegularMatrix { n, d, rows, cols })
    }

    /// Identity matrix (the only circulant element of `M_{n,1}` with zero offset).
    pub fn identity(n: usize) -> Self {
        Self::from_row_supports(n, 1, (0..n).map(|i| vec![i]).collect())
            .expect("identity is 1-regular")
    }

    /// The all-ones matrix, sole element of `M_{n,n}`.
    pub fn all_ones(n: usize) -> Self {
        Self::from_row_supports(n, n, vec![(0..n).collect(); n]).expect("all-ones is n-regular")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    pub fn col(&self, j: usize) -> &[usize] {
        &self.cols[j]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn row_supports(&self) -> Vec<Vec<usize>> {
        self.rows.clone()
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].binary_search(&j).is_ok()
    }

    pub fn transpose(&self) -> Self {
        RegularMatrix { n: self.n, d: self.d, rows: self.cols.clone(), cols: self.rows.clone() }
    }

    /// `y = (M − zI) x`.
    pub fn apply_shifted(&self, z: C64, x: &[C64]) -> Result<Vec<C64>> {
        self.check_len(x.len())?;
        Ok(self
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| row.iter().map(|&j| x[j]).sum::<C64>() - z * x[i])
            .collect())
    }

    /// The row vector `x†(M − zI)`, i.e. `y_j = Σ_i conj(x_i) μ_ij − z conj(x_j)`.
    pub fn apply_adjoint_shifted(&self, z: C64, x: &[C64]) -> Result<Vec<C64>> {
        self.check_len(x.len())?;
        Ok(self
            .cols
            .iter()
            .enumerate()
            .map(|(j, col)| col.iter().map(|&i| x[i].conj()).sum::<C64>() - z * x[j].conj())
            .collect())
    }

    /// `(M − zI)† x = (M^T − z̄ I) x`; the Hermitian adjoint as an operator.
    pub fn apply_hermitian_adjoint(&self, z: C64, x: &[C64]) -> Result<Vec<C64>> {
        self.check_len(x.len())?;
        let zc = z.conj();
        Ok(self
            .cols
            .iter()
            .enumerate()
            .map(|(j, col)| col.iter().map(|&i| x[i]).sum::<C64>() - zc * x[j])
            .collect())
    }

    /// Dense `M − zI`.
    pub fn shifted_dense(&self, z: C64) -> DMatrix<C64> {
        let mut a = DMatrix::<C64>::zeros(self.n, self.n);
        for (i, row) in self.rows.iter().enumerate() {
            for &j in row {
                a[(i, j)] = C64::new(1.0, 0.0);
            }
            a[(i, i)] -= z;
        }
        a
    }

    /// Dense `M − xI` for a real shift.
    pub fn shifted_dense_real(&self, x: f64) -> DMatrix<f64> {
        let mut a = DMatrix::<f64>::zeros(self.n, self.n);
        for (i, row) in self.rows.iter().enumerate() {
            for &j in row {
                a[(i, j)] = 1.0;
            }
            a[(i, i)] -= x;
        }
        a
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Swaps the 2×2 pattern on rows `i1, i2` and columns `j1, j2` when
    /// `μ_{i1 j1} = μ_{i2 j2} = 1` and `μ_{i1 j2} = μ_{i2 j1} = 0`.
    /// Returns whether the switch was applied. Line sums are preserved.
    pub(crate) fn try_switch(&mut self, i1: usize, i2: usize, j1: usize, j2: usize) -> bool {
        if i1 == i2 || j1 == j2 {
            return false;
        }
        if !(self.get(i1, j1) && self.get(i2, j2) && !self.get(i1, j2) && !self.get(i2, j1)) {
            return false;
        }
        replace_sorted(&mut self.rows[i1], j1, j2);
        replace_sorted(&mut self.rows[i2], j2, j1);
        replace_sorted(&mut self.cols[j1], i1, i2);
        replace_sorted(&mut self.cols[j2], i2, i1);
        debug_assert!([i1, i2].iter().all(|&i| self.rows[i].len() == self.d) && [j1, j2].iter().all(|&j| self.cols[j].len() == self.d));
        true
    }

    /// Full re-validation of the regularity invariants.
    pub fn check_invariants(&self) -> bool {
        let rows_ok = self.rows.len() == self.n
            && self
                .rows
                .iter()
                .all(|r| r.len() == self.d && r.windows(2).all(|w| w[0] < w[1]) && r.iter().all(|&j| j < self.n));
        rows_ok && column_supports(self.n, &self.rows) == self.cols && self.cols.iter().all(|c| c.len() == self.d)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: len });
        }
        Ok(())
    }
}

fn column_supports(n: usize, rows: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut cols = vec![Vec::new(); n];
    for (i, row) in rows.iter().enumerate() {
        for &j in row {
            cols[j].push(i);
        }
    }
    cols
}

fn replace_sorted(v: &mut Vec<usize>, old: usize, new: usize) {
    let pos = v.binary_search(&old).expect("old entry present");
    v.remove(pos);
    let ins = v.binary_search(&new).expect_err("new entry absent");
    v.insert(ins, new);
}

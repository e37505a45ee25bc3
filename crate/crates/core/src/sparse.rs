//! Coordinate-list sparse matrices.
//!
//! Entries are kept sorted row-major with no repeated positions and no stored
//! zeros, so two matrices with the same values compare equal and every
//! reduction runs in the same order. Integer matrices (`SparseMatrix<i64>`)
//! carry boundary and incidence data exactly; real matrices feed the network.

use std::fmt::{self, Debug, Display};
use std::io::{self, BufRead, Write};
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use ndarray::{Array2, ArrayView2};
use thiserror::Error;

use crate::complex::Rank;

/// Largest dimension accepted by [`SparseMatrix::to_dense`].
pub const DENSE_LIMIT: usize = 5000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("entry ({row}, {col}) is outside a {rows}x{cols} matrix")]
    IndexOutOfRange { row: usize, col: usize, rows: usize, cols: usize },
    #[error("entry ({row}, {col}) given more than once")]
    DuplicateEntry { row: usize, col: usize },
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch { op: &'static str, left: (usize, usize), right: (usize, usize) },
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("{rows}x{cols} is too large for dense conversion (limit {DENSE_LIMIT})")]
    TooLargeForDense { rows: usize, cols: usize },
    #[error("malformed coordinate text: {0}")]
    Parse(String),
}

/// Scalar types a [`SparseMatrix`] can hold.
pub trait Scalar:
    Copy
    + PartialEq
    + Debug
    + Display
    + FromStr
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const ZERO: Self;
    const ONE: Self;
}

impl Scalar for i64 {
    const ZERO: Self = 0;
    const ONE: Self = 1;
}

impl Scalar for f64 {
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;
}

/// What indexes a matrix dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Space {
    /// Cells of one rank, in canonical order.
    Cells(Rank),
    /// Cells of several ranks concatenated in the listed order.
    Stacked(Vec<Rank>),
    Plain,
}

impl Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Cells(k) => write!(f, "X{k}"),
            Space::Stacked(ks) => {
                let parts: Vec<String> = ks.iter().map(|k| format!("X{k}")).collect();
                write!(f, "{}", parts.join("+"))
            }
            Space::Plain => write!(f, "-"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T = i64> {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, T)>,
    row_space: Space,
    col_space: Space,
}

impl<T: Scalar> SparseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: Vec::new(), row_space: Space::Plain, col_space: Space::Plain }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            entries: (0..n).map(|i| (i, i, T::ONE)).collect(),
            row_space: Space::Plain,
            col_space: Space::Plain,
        }
    }

    /// Builds from `(row, col, value)` triplets in any order. Zero values are
    /// dropped; a repeated position is an error.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, T)>,
    ) -> Result<Self, MatrixError> {
        let mut entries = Vec::new();
        for (row, col, value) in triplets {
            if row >= rows || col >= cols {
                return Err(MatrixError::IndexOutOfRange { row, col, rows, cols });
            }
            entries.push((row, col, value));
        }
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        if let Some(w) = entries.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(MatrixError::DuplicateEntry { row: w[0].0, col: w[0].1 });
        }
        entries.retain(|&(_, _, v)| v != T::ZERO);
        Ok(Self { rows, cols, entries, row_space: Space::Plain, col_space: Space::Plain })
    }

    pub fn with_spaces(mut self, row_space: Space, col_space: Space) -> Self {
        self.row_space = row_space;
        self.col_space = col_space;
        self
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

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Non-zero entries, row-major.
    pub fn entries(&self) -> &[(usize, usize, T)] {
        &self.entries
    }

    pub fn row_space(&self) -> &Space {
        &self.row_space
    }

    pub fn col_space(&self) -> &Space {
        &self.col_space
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.entries
            .binary_search_by_key(&(row, col), |&(r, c, _)| (r, c))
            .map(|i| self.entries[i].2)
            .unwrap_or(T::ZERO)
    }

    /// Same shape and same values, ignoring the index-space labels.
    pub fn same_values(&self, other: &Self) -> bool {
        self.shape() == other.shape() && self.entries == other.entries
    }

    pub fn transpose(&self) -> Self {
        let mut entries: Vec<_> = self.entries.iter().map(|&(r, c, v)| (c, r, v)).collect();
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        Self {
            rows: self.cols,
            cols: self.rows,
            entries,
            row_space: self.col_space.clone(),
            col_space: self.row_space.clone(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && self.entries == self.transpose().entries
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> SparseMatrix<U> {
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&(r, c, v)| (r, c, f(v))).filter(|&(_, _, v)| v != U::ZERO).collect(),
            row_space: self.row_space.clone(),
            col_space: self.col_space.clone(),
        }
    }

    fn merge(&self, other: &Self, op: &'static str, f: impl Fn(T, T) -> T) -> Result<Self, MatrixError> {
        if self.shape() != other.shape() {
            return Err(MatrixError::DimensionMismatch { op, left: self.shape(), right: other.shape() });
        }
        let mut entries = Vec::with_capacity(self.nnz() + other.nnz());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            let next = match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(&&(r, c, v)), None) => {
                    a.next();
                    (r, c, f(v, T::ZERO))
                }
                (None, Some(&&(r, c, w))) => {
                    b.next();
                    (r, c, f(T::ZERO, w))
                }
                (Some(&&(r, c, v)), Some(&&(s, d, w))) => match (r, c).cmp(&(s, d)) {
                    std::cmp::Ordering::Less => {
                        a.next();
                        (r, c, f(v, T::ZERO))
                    }
                    std::cmp::Ordering::Greater => {
                        b.next();
                        (s, d, f(T::ZERO, w))
                    }
                    std::cmp::Ordering::Equal => {
                        a.next();
                        b.next();
                        (r, c, f(v, w))
                    }
                },
            };
            if next.2 != T::ZERO {
                entries.push(next);
            }
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries,
            row_space: self.row_space.clone(),
            col_space: self.col_space.clone(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self, MatrixError> {
        self.merge(other, "add", |x, y| x + y)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, MatrixError> {
        self.merge(other, "sub", |x, y| x - y)
    }

    /// Sparse product `self * other`.
    pub fn matmul(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::DimensionMismatch { op: "matmul", left: self.shape(), right: other.shape() });
        }
        let other_rows = other.row_ranges();
        let mut acc: std::collections::BTreeMap<(usize, usize), T> = Default::default();
        for &(i, k, a) in &self.entries {
            for &(_, j, b) in &other.entries[other_rows[k]..other_rows[k + 1]] {
                let slot = acc.entry((i, j)).or_insert(T::ZERO);
                *slot = *slot + a * b;
            }
        }
        Ok(Self {
            rows: self.rows,
            cols: other.cols,
            entries: acc.into_iter().filter(|&(_, v)| v != T::ZERO).map(|((i, j), v)| (i, j, v)).collect(),
            row_space: self.row_space.clone(),
            col_space: other.col_space.clone(),
        })
    }

    /// Offsets of each row's entries: row `r` is `entries[o[r]..o[r + 1]]`.
    fn row_ranges(&self) -> Vec<usize> {
        let mut offsets = vec![0; self.rows + 1];
        for &(r, _, _) in &self.entries {
            offsets[r + 1] += 1;
        }
        for r in 0..self.rows {
            offsets[r + 1] += offsets[r];
        }
        offsets
    }

    /// Assembles a block matrix. `sizes` are the block row/column sizes
    /// (square block layout); `blocks` lists `(block_row, block_col, matrix)`.
    pub fn from_blocks(sizes: &[usize], blocks: &[(usize, usize, &Self)]) -> Result<Self, MatrixError> {
        let mut offsets = vec![0; sizes.len() + 1];
        for (i, s) in sizes.iter().enumerate() {
            offsets[i + 1] = offsets[i] + s;
        }
        let n = offsets[sizes.len()];
        let mut triplets = Vec::new();
        for &(bi, bj, m) in blocks {
            if m.shape() != (sizes[bi], sizes[bj]) {
                return Err(MatrixError::DimensionMismatch {
                    op: "block assembly",
                    left: (sizes[bi], sizes[bj]),
                    right: m.shape(),
                });
            }
            triplets.extend(m.entries.iter().map(|&(r, c, v)| (offsets[bi] + r, offsets[bj] + c, v)));
        }
        Self::from_triplets(n, n, triplets)
    }

    pub fn to_dense(&self) -> Result<Array2<T>, MatrixError> {
        if self.rows > DENSE_LIMIT || self.cols > DENSE_LIMIT {
            return Err(MatrixError::TooLargeForDense { rows: self.rows, cols: self.cols });
        }
        let mut dense = Array2::from_elem((self.rows, self.cols), T::ZERO);
        for &(r, c, v) in &self.entries {
            dense[[r, c]] = v;
        }
        Ok(dense)
    }

    /// Writes the coordinate text format: `rows cols nnz`, then one
    /// `row col value` line per entry, row-major.
    pub fn write_coordinate<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{} {} {}", self.rows, self.cols, self.nnz())?;
        for (r, c, v) in &self.entries {
            writeln!(w, "{r} {c} {v}")?;
        }
        Ok(())
    }

    pub fn to_coordinate_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_coordinate(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("coordinate text is ASCII")
    }

    pub fn read_coordinate<R: BufRead>(r: R) -> Result<Self, MatrixError> {
        fn field<V: FromStr>(tok: Option<&str>, what: &str, line: usize) -> Result<V, MatrixError> {
            tok.ok_or_else(|| MatrixError::Parse(format!("line {line}: missing {what}")))?
                .parse()
                .map_err(|_| MatrixError::Parse(format!("line {line}: bad {what}")))
        }
        let mut lines = r.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| MatrixError::Parse("empty input".into()))?;
        let header = header.map_err(|e| MatrixError::Parse(e.to_string()))?;
        let mut toks = header.split_whitespace();
        let rows: usize = field(toks.next(), "rows", 1)?;
        let cols: usize = field(toks.next(), "cols", 1)?;
        let nnz: usize = field(toks.next(), "nnz", 1)?;
        let mut triplets = Vec::with_capacity(nnz);
        for (i, line) in lines {
            let line = line.map_err(|e| MatrixError::Parse(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut toks = line.split_whitespace();
            triplets.push((
                field(toks.next(), "row", i + 1)?,
                field(toks.next(), "col", i + 1)?,
                field::<T>(toks.next(), "value", i + 1)?,
            ));
        }
        if triplets.len() != nnz {
            return Err(MatrixError::Parse(format!("header says {nnz} entries, found {}", triplets.len())));
        }
        Self::from_triplets(rows, cols, triplets)
    }
}

impl SparseMatrix<f64> {
    /// `self * x` for a dense right-hand side.
    pub fn mul_dense(&self, x: ArrayView2<f64>) -> Result<Array2<f64>, MatrixError> {
        if self.cols != x.nrows() {
            return Err(MatrixError::DimensionMismatch { op: "mul_dense", left: self.shape(), right: x.dim() });
        }
        let mut out = Array2::zeros((self.rows, x.ncols()));
        for &(r, c, v) in &self.entries {
            for (o, xi) in out.row_mut(r).iter_mut().zip(x.row(c)) {
                *o += v * xi;
            }
        }
        Ok(out)
    }

    /// `selfᵀ * x` without materialising the transpose.
    pub fn transpose_mul_dense(&self, x: ArrayView2<f64>) -> Result<Array2<f64>, MatrixError> {
        if self.rows != x.nrows() {
            return Err(MatrixError::DimensionMismatch {
                op: "transpose_mul_dense",
                left: (self.cols, self.rows),
                right: x.dim(),
            });
        }
        let mut out = Array2::zeros((self.cols, x.ncols()));
        for &(r, c, v) in &self.entries {
            for (o, xi) in out.row_mut(c).iter_mut().zip(x.row(r)) {
                *o += v * xi;
            }
        }
        Ok(out)
    }
}

impl SparseMatrix<i64> {
    pub fn to_f64(&self) -> SparseMatrix<f64> {
        self.map(|v| v as f64)
    }
}

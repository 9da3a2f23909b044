//! Exact rational linear algebra.
//!
//! Matrices are stored row-major with sparse rows (sorted `(col, value)` pairs,
//! no explicit zeros). Row reduction is Gauss-Jordan over [`Rational`]; the
//! reduced row-echelon form is unique, so kernel bases are reproducible no
//! matter which nonzero is chosen as pivot.

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::Rational;

/// A sparse vector: strictly increasing column indices, nonzero values.
pub type SparseRow = Vec<(usize, Rational)>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("index ({row}, {col}) out of bounds for a {rows}x{cols} matrix")]
    OutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("basis vectors are linearly dependent (rank {rank} < {len})")]
    Dependent { rank: usize, len: usize },
}

/// Sparse matrix over the rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    nrows: usize,
    ncols: usize,
    rows: Vec<SparseRow>,
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.nrows, self.ncols)?;
        for row in self.to_dense() {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

impl RatMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            rows: vec![Vec::new(); nrows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| vec![(i, Rational::one())]).collect();
        Self {
            nrows: n,
            ncols: n,
            rows,
        }
    }

    pub fn from_dense(entries: &[Vec<Rational>]) -> Result<Self, LinalgError> {
        let nrows = entries.len();
        let ncols = entries.first().map_or(0, Vec::len);
        let mut rows = Vec::with_capacity(nrows);
        for row in entries {
            if row.len() != ncols {
                return Err(LinalgError::DimensionMismatch {
                    expected: ncols,
                    found: row.len(),
                });
            }
            rows.push(
                row.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(j, v)| (j, v.clone()))
                    .collect(),
            );
        }
        Ok(Self { nrows, ncols, rows })
    }

    /// Convenience constructor from small integers.
    pub fn from_i64(entries: &[&[i64]]) -> Self {
        let dense: Vec<Vec<Rational>> = entries
            .iter()
            .map(|row| row.iter().map(|&v| Rational::from_integer(v.into())).collect())
            .collect();
        Self::from_dense(&dense).expect("rows of equal length")
    }

    /// Builds a matrix whose columns are the given sparse vectors.
    pub fn from_columns(nrows: usize, columns: &[SparseRow]) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(nrows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col {
                if *i >= nrows {
                    return Err(LinalgError::OutOfBounds {
                        row: *i,
                        col: j,
                        rows: nrows,
                        cols: columns.len(),
                    });
                }
                // columns are visited in increasing order, so rows stay sorted
                m.rows[*i].push((j, v.clone()));
            }
        }
        for row in &mut m.rows {
            row.retain(|(_, v)| !v.is_zero());
        }
        Ok(m)
    }

    /// Builds a matrix from sparse rows; entries must be sorted and in range.
    pub fn from_rows(ncols: usize, rows: Vec<SparseRow>) -> Result<Self, LinalgError> {
        for (i, row) in rows.iter().enumerate() {
            if let Some((j, _)) = row.iter().find(|(j, _)| *j >= ncols) {
                return Err(LinalgError::OutOfBounds {
                    row: i,
                    col: *j,
                    rows: rows.len(),
                    cols: ncols,
                });
            }
        }
        let rows = rows
            .into_iter()
            .map(|mut r| {
                r.sort_by_key(|(j, _)| *j);
                r.retain(|(_, v)| !v.is_zero());
                r
            })
            .collect::<Vec<_>>();
        Ok(Self {
            nrows: rows.len(),
            ncols,
            rows,
        })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &SparseRow {
        &self.rows[i]
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        match self.rows[i].binary_search_by_key(&j, |(c, _)| *c) {
            Ok(pos) => self.rows[i][pos].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) -> Result<(), LinalgError> {
        if i >= self.nrows || j >= self.ncols {
            return Err(LinalgError::OutOfBounds {
                row: i,
                col: j,
                rows: self.nrows,
                cols: self.ncols,
            });
        }
        let row = &mut self.rows[i];
        match row.binary_search_by_key(&j, |(c, _)| *c) {
            Ok(pos) if value.is_zero() => {
                row.remove(pos);
            }
            Ok(pos) => row[pos].1 = value,
            Err(_) if value.is_zero() => {}
            Err(pos) => row.insert(pos, (j, value)),
        }
        Ok(())
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut out = vec![vec![Rational::zero(); self.ncols]; self.nrows];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                out[i][*j] = v.clone();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut rows = vec![Vec::new(); self.ncols];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                rows[*j].push((i, v.clone()));
            }
        }
        Self {
            nrows: self.ncols,
            ncols: self.nrows,
            rows,
        }
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &RatMatrix) -> Result<Self, LinalgError> {
        if self.ncols != other.ncols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.ncols,
                found: other.ncols,
            });
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(Self {
            nrows: rows.len(),
            ncols: self.ncols,
            rows,
        })
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
        if v.len() != self.ncols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.ncols,
                found: v.len(),
            });
        }
        Ok(self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .filter(|(j, _)| !v[*j].is_zero())
                    .fold(Rational::zero(), |acc, (j, a)| acc + a * &v[*j])
            })
            .collect())
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<Self, LinalgError> {
        if self.ncols != other.nrows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.ncols,
                found: other.nrows,
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc: SparseRow = Vec::new();
                for (k, a) in row {
                    acc = axpy(&acc, a, &other.rows[*k]);
                }
                acc
            })
            .collect();
        Ok(Self {
            nrows: self.nrows,
            ncols: other.ncols,
            rows,
        })
    }

    /// Reduced row-echelon form and the strictly increasing pivot columns.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let (rows, pivots) = rref_rows(self.rows.clone(), self.ncols);
        let mut out = rows;
        out.resize(self.nrows, Vec::new());
        (
            RatMatrix {
                nrows: self.nrows,
                ncols: self.ncols,
                rows: out,
            },
            pivots,
        )
    }

    pub fn rank(&self) -> usize {
        echelon_rank(self.rows.clone(), self.ncols)
    }

    /// Basis of `{ v : M v = 0 }`, one vector per free column.
    ///
    /// The vector for free column `f` has a 1 in position `f`, zeros in the
    /// other free positions and is otherwise read off the RREF.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let (rows, pivots) = rref_rows(self.rows.clone(), self.ncols);
        let mut is_pivot = vec![false; self.ncols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        // column f -> list of (pivot col, entry) over the reduced rows
        let mut by_col: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); self.ncols];
        for (r, row) in rows.iter().enumerate().take(pivots.len()) {
            for (j, v) in row {
                if !is_pivot[*j] {
                    by_col[*j].push((pivots[r], v.clone()));
                }
            }
        }
        (0..self.ncols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = vec![Rational::zero(); self.ncols];
                v[f] = Rational::one();
                for (p, a) in &by_col[f] {
                    v[*p] = -a.clone();
                }
                v
            })
            .collect()
    }
}

/// `x + a*y` for sparse rows.
pub(crate) fn axpy(x: &SparseRow, a: &Rational, y: &SparseRow) -> SparseRow {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
        if take_x {
            out.push(x[i].clone());
            i += 1;
        } else if take_y {
            out.push((y[j].0, a * &y[j].1));
            j += 1;
        } else {
            let v = &x[i].1 + a * &y[j].1;
            if !v.is_zero() {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn entry(row: &SparseRow, col: usize) -> Option<&Rational> {
    row.binary_search_by_key(&col, |(c, _)| *c)
        .ok()
        .map(|pos| &row[pos].1)
}

/// Gauss-Jordan on sparse rows, pivoting only in columns `< pivot_limit`.
/// Returns the reduced rows (pivot rows first, in pivot order) and pivots.
fn rref_limited(mut rows: Vec<SparseRow>, pivot_limit: usize) -> (Vec<SparseRow>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..pivot_limit {
        if rank == rows.len() {
            break;
        }
        // sparsest candidate keeps fill-in low; the RREF itself is unique
        let candidate = (rank..rows.len())
            .filter(|&r| entry(&rows[r], col).is_some())
            .min_by_key(|&r| rows[r].len());
        let Some(pr) = candidate else { continue };
        rows.swap(rank, pr);
        let inv = entry(&rows[rank], col).unwrap().recip();
        for (_, v) in rows[rank].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = std::mem::take(&mut rows[rank]);
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank {
                continue;
            }
            if let Some(f) = entry(row, col) {
                let f = -f.clone();
                *row = axpy(row, &f, &pivot_row);
            }
        }
        rows[rank] = pivot_row;
        pivots.push(col);
        rank += 1;
    }
    (rows, pivots)
}

fn rref_rows(rows: Vec<SparseRow>, ncols: usize) -> (Vec<SparseRow>, Vec<usize>) {
    rref_limited(rows, ncols)
}

/// Forward elimination only; enough to read off the rank.
fn echelon_rank(mut rows: Vec<SparseRow>, ncols: usize) -> usize {
    let mut rank = 0;
    for col in 0..ncols {
        if rank == rows.len() {
            break;
        }
        let candidate = (rank..rows.len())
            .filter(|&r| rows[r].first().is_some_and(|(c, _)| *c == col))
            .min_by_key(|&r| rows[r].len());
        let Some(pr) = candidate else { continue };
        rows.swap(rank, pr);
        let pivot_row = std::mem::take(&mut rows[rank]);
        let inv = pivot_row[0].1.recip();
        for row in rows.iter_mut().skip(rank + 1) {
            if let Some((c, v)) = row.first() {
                if *c == col {
                    let f = -(v * &inv);
                    *row = axpy(row, &f, &pivot_row);
                }
            }
        }
        rows[rank] = pivot_row;
        rank += 1;
    }
    rank
}

/// Factored span of a fixed list of vectors, for repeated membership solves.
///
/// Internally the RREF of `[B^T | I]` is kept: the left block gives a
/// canonical spanning set and the right block maps its coordinates back to
/// coordinates in the original vectors.
#[derive(Debug, Clone)]
pub struct SpanSolver {
    dim: usize,
    len: usize,
    pivots: Vec<usize>,
    reduced: Vec<SparseRow>,
    transform: Vec<SparseRow>,
}

impl SpanSolver {
    /// Fails if the vectors are not linearly independent.
    pub fn new(dim: usize, basis: &[SparseRow]) -> Result<Self, LinalgError> {
        let len = basis.len();
        let mut rows = Vec::with_capacity(len);
        for (i, b) in basis.iter().enumerate() {
            if let Some((j, _)) = b.last() {
                if *j >= dim {
                    return Err(LinalgError::DimensionMismatch {
                        expected: dim,
                        found: j + 1,
                    });
                }
            }
            let mut row = b.clone();
            row.push((dim + i, Rational::one()));
            rows.push(row);
        }
        let (rows, pivots) = rref_limited(rows, dim);
        if pivots.len() < len {
            return Err(LinalgError::Dependent {
                rank: pivots.len(),
                len,
            });
        }
        let mut reduced = Vec::with_capacity(len);
        let mut transform = Vec::with_capacity(len);
        for row in rows {
            let split = row.partition_point(|(c, _)| *c < dim);
            let (left, right) = row.split_at(split);
            reduced.push(left.to_vec());
            transform.push(right.iter().map(|(c, v)| (c - dim, v.clone())).collect());
        }
        Ok(Self {
            dim,
            len,
            pivots,
            reduced,
            transform,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Coordinates `c` with `sum c_i b_i == target`, or `None` if `target`
    /// is outside the span.
    pub fn solve_sparse(&self, target: &SparseRow) -> Option<Vec<Rational>> {
        let mut residual = target.clone();
        let mut coords: SparseRow = Vec::new();
        for (r, &p) in self.pivots.iter().enumerate() {
            if let Some(a) = entry(&residual, p) {
                let a = a.clone();
                residual = axpy(&residual, &-a.clone(), &self.reduced[r]);
                coords = axpy(&coords, &a, &self.transform[r]);
            }
        }
        if !residual.is_empty() {
            return None;
        }
        let mut out = vec![Rational::zero(); self.len];
        for (i, v) in coords {
            out[i] = v;
        }
        Some(out)
    }

    pub fn solve(&self, target: &[Rational]) -> Result<Option<Vec<Rational>>, LinalgError> {
        if target.len() != self.dim {
            return Err(LinalgError::DimensionMismatch {
                expected: self.dim,
                found: target.len(),
            });
        }
        Ok(self.solve_sparse(&to_sparse(target)))
    }
}

pub fn to_sparse(v: &[Rational]) -> SparseRow {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn rank_of_vectors(dim: usize, vectors: &[SparseRow]) -> usize {
    echelon_rank(vectors.to_vec(), dim)
}

/// Coefficients expressing `target` in the span of `basis`.
///
/// Returns `Ok(None)` when `target` is not in the span. When the basis is
/// dependent the returned coefficients are one valid choice.
pub fn solve_in_span(
    basis: &[Vec<Rational>],
    target: &[Rational],
) -> Result<Option<Vec<Rational>>, LinalgError> {
    let dim = target.len();
    for b in basis {
        if b.len() != dim {
            return Err(LinalgError::DimensionMismatch {
                expected: dim,
                found: b.len(),
            });
        }
    }
    // columns of the basis matrix; solving via the kernel of [B | -t]
    let mut cols: Vec<SparseRow> = basis.iter().map(|b| to_sparse(b)).collect();
    cols.push(to_sparse(&target.iter().map(|t| -t.clone()).collect::<Vec<_>>()));
    let m = RatMatrix::from_columns(dim, &cols)?;
    let (r, pivots) = m.rref();
    let last = basis.len();
    if pivots.contains(&last) {
        return Ok(None);
    }
    // particular solution: free basis variables set to zero
    let mut coeffs = vec![Rational::zero(); last];
    for (row, &p) in pivots.iter().enumerate() {
        coeffs[p] = -r.get(row, last);
    }
    Ok(Some(coeffs))
}

use num_complex::Complex64 as C64;

use crate::parallel::{fill_indexed, Exec};

/// Compressed sparse row matrix with complex entries.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub values: Vec<C64>,
}

impl CsrMatrix {
    /// Build from per-row lists of (column, value); duplicate columns are summed
    /// and explicit zeros dropped.
    pub fn from_rows(ncols: usize, rows: Vec<Vec<(usize, C64)>>) -> Self {
        let nrows = rows.len();
        let mut indptr = Vec::with_capacity(nrows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            let mut k = 0;
            while k < row.len() {
                let col = row[k].0;
                let mut v = C64::new(0.0, 0.0);
                while k < row.len() && row[k].0 == col {
                    v += row[k].1;
                    k += 1;
                }
                if v != C64::new(0.0, 0.0) {
                    indices.push(col);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        CsrMatrix { nrows, ncols, indptr, indices, values }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix::from_rows(n, (0..n).map(|i| vec![(i, C64::new(1.0, 0.0))]).collect())
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        self.indices[a..b].iter().copied().zip(self.values[a..b].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.row(i).find(|e| e.0 == j).map(|e| e.1).unwrap_or_default()
    }

    pub fn matvec_with(&self, exec: Exec, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.ncols, "matvec dimension mismatch");
        let mut y = vec![C64::new(0.0, 0.0); self.nrows];
        fill_indexed(exec, &mut y, |i| self.row(i).map(|(j, v)| v * x[j]).sum());
        y
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        self.matvec_with(Exec::current(), x)
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut m = self.clone();
        m.values.iter_mut().for_each(|v| *v *= c);
        m
    }

    /// a·self + b·other.
    pub fn lin_comb(&self, a: C64, other: &Self, b: C64) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let rows = (0..self.nrows)
            .map(|i| {
                self.row(i)
                    .map(|(j, v)| (j, a * v))
                    .chain(other.row(i).map(|(j, v)| (j, b * v)))
                    .collect()
            })
            .collect();
        CsrMatrix::from_rows(self.ncols, rows)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.lin_comb(C64::new(1.0, 0.0), other, C64::new(1.0, 0.0))
    }

    /// Add `shift` to every diagonal entry.
    pub fn shift_diagonal(&self, shift: C64) -> Self {
        self.add(&CsrMatrix::identity(self.nrows).scale(shift))
    }

    /// Matrix product self · other.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows);
        let rows = (0..self.nrows)
            .map(|i| {
                let mut acc: Vec<(usize, C64)> = Vec::new();
                for (k, a) in self.row(i) {
                    acc.extend(other.row(k).map(|(j, b)| (j, a * b)));
                }
                acc
            })
            .collect();
        CsrMatrix::from_rows(other.ncols, rows)
    }

    pub fn dagger(&self) -> Self {
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); self.ncols];
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                rows[j].push((i, v.conj()));
            }
        }
        CsrMatrix::from_rows(self.nrows, rows)
    }

    /// max |M - M†| over all entries.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Largest absolute row sum, an upper bound on the spectral radius.
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows).map(|i| self.row(i).map(|(_, v)| v.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Half-bandwidth: max |i - j| over stored entries.
    pub fn bandwidth(&self) -> usize {
        (0..self.nrows).flat_map(|i| self.row(i).map(move |(j, _)| i.abs_diff(j))).max().unwrap_or(0)
    }

    pub fn to_dense(&self) -> Vec<Vec<C64>> {
        let mut d = vec![vec![C64::new(0.0, 0.0); self.ncols]; self.nrows];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        d
    }
}

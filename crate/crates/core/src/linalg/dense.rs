//! Small dense Hermitian eigenproblems through nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::lattice::CsrMatrix;

/// Eigenpairs of a dense Hermitian matrix, ascending; vectors as columns.
pub fn hermitian_eigen(m: DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = m.nrows();
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

pub fn csr_to_dense(a: &CsrMatrix) -> DMatrix<C64> {
    let mut m = DMatrix::from_element(a.nrows, a.ncols, C64::new(0.0, 0.0));
    for i in 0..a.nrows {
        for (j, v) in a.row(i) {
            m[(i, j)] = v;
        }
    }
    m
}

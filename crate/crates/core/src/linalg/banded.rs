//! Banded LDLᴴ factorisation of Hermitian matrices without pivoting.
//!
//! Used both for shift-invert solves and for Sylvester inertia counts: the
//! number of negative pivots of A - σI equals the number of eigenvalues of A
//! below σ.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::lattice::CsrMatrix;

#[derive(Debug, Clone)]
pub struct BandLdl {
    n: usize,
    b: usize,
    /// Row i holds L[i][i-b .. i-1] in slots 0..b (slot s ↔ column i-b+s).
    l: Vec<C64>,
    d: Vec<f64>,
}

impl BandLdl {
    /// Factor A - shift·I, reading the lower band of `a`.
    pub fn factor(a: &CsrMatrix, shift: f64) -> Result<Self> {
        let n = a.nrows;
        let b = a.bandwidth();
        let mut l = vec![C64::new(0.0, 0.0); n * b.max(1)];
        let mut d = vec![0.0; n];
        let scale = a.norm_inf().max(shift.abs()).max(f64::MIN_POSITIVE);
        let tiny = 1e-14 * scale;
        let mut w = vec![C64::new(0.0, 0.0); b.max(1)];
        for i in 0..n {
            // gather row i of A into the L slots
            let row = &mut l[i * b..(i + 1) * b];
            let mut diag = -shift;
            for (j, v) in a.row(i) {
                if j < i {
                    row[b - (i - j)] = v;
                } else if j == i {
                    diag += v.re;
                }
            }
            let lo = i.saturating_sub(b);
            for k in lo..i {
                // L[i][k] = (A[i][k] - Σ_j L[i][j] d_j conj(L[k][j])) / d_k, j ∈ [max(lo, k-b), k)
                let jlo = lo.max(k.saturating_sub(b));
                let mut acc = C64::new(0.0, 0.0);
                {
                    let wi = &w[jlo - lo..k - lo];
                    let lk = &l[k * b + (b - (k - jlo))..k * b + b];
                    for (x, y) in wi.iter().zip(lk) {
                        acc += x * y.conj();
                    }
                }
                let slot = i * b + (b - (i - k));
                let lik = (l[slot] - acc) / d[k];
                l[slot] = lik;
                w[k - lo] = lik * d[k];
            }
            let mut s = 0.0;
            for k in lo..i {
                s += l[i * b + (b - (i - k))].norm_sqr() * d[k];
            }
            let di = diag - s;
            if di.abs() <= tiny || !di.is_finite() {
                return Err(Error::ConvergenceFailure(format!("LDL pivot breakdown at row {i} (d = {di:e})")));
            }
            d[i] = di;
        }
        Ok(BandLdl { n, b, l, d })
    }

    /// Number of negative pivots, i.e. eigenvalues below the shift.
    pub fn negative_count(&self) -> usize {
        self.d.iter().filter(|&&x| x < 0.0).count()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solve (A - shift·I) x = r.
    pub fn solve(&self, r: &[C64]) -> Vec<C64> {
        let (n, b) = (self.n, self.b);
        let mut y = r.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(b);
            let mut acc = C64::new(0.0, 0.0);
            for k in lo..i {
                acc += self.l[i * b + (b - (i - k))] * y[k];
            }
            y[i] -= acc;
        }
        for i in 0..n {
            y[i] /= self.d[i];
        }
        for i in (0..n).rev() {
            let xi = y[i];
            let lo = i.saturating_sub(b);
            for k in lo..i {
                y[k] -= self.l[i * b + (b - (i - k))].conj() * xi;
            }
        }
        y
    }
}

/// Eigenvalue count below `sigma`, nudging the shift on pivot breakdown.
pub fn count_below(a: &CsrMatrix, sigma: f64) -> Result<usize> {
    let scale = a.norm_inf().max(1.0);
    let mut s = sigma;
    for attempt in 0..6 {
        match BandLdl::factor(a, s) {
            Ok(f) => return Ok(f.negative_count()),
            Err(_) => s = sigma + (attempt as f64 + 1.0) * 1e-11 * scale,
        }
    }
    Err(Error::ConvergenceFailure(format!("inertia count at {sigma} kept breaking down")))
}

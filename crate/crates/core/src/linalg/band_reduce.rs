//! Full spectrum of a Hermitian band matrix: Givens reduction to tridiagonal
//! form with bulge chasing, followed by implicit QL.
//!
//! This is the direct ("dense") reference solver. It costs O(n² b) and needs
//! O(n b) memory, which keeps a few-thousand-unknown cross-check cheap.

use num_complex::Complex64 as C64;

use super::tridiag;
use crate::error::Result;
use crate::lattice::CsrMatrix;

struct LowerBand {
    n: usize,
    w: usize, // stored distances 0..w
    data: Vec<C64>,
}

impl LowerBand {
    fn get(&self, r: usize, c: usize) -> C64 {
        let dist = r - c;
        if dist >= self.w {
            C64::new(0.0, 0.0)
        } else {
            self.data[r * self.w + dist]
        }
    }

    fn set(&mut self, r: usize, c: usize, v: C64) {
        let dist = r - c;
        if dist < self.w {
            self.data[r * self.w + dist] = v;
        } else {
            debug_assert!(v.norm() < 1e-10, "fill outside the band at ({r}, {c})");
        }
    }

    /// Apply A ← G A Gᴴ in the plane (p-1, p) with G = [[c, s], [-s̄, c]].
    fn rotate(&mut self, p: usize, c: f64, s: C64, b: usize) {
        let n = self.n;
        let q = p - 1;
        for j in p.saturating_sub(b + 2)..q {
            let x = self.get(q, j);
            let y = self.get(p, j);
            if x == C64::new(0.0, 0.0) && y == C64::new(0.0, 0.0) {
                continue;
            }
            self.set(q, j, c * x + s * y);
            self.set(p, j, -s.conj() * x + c * y);
        }
        for i in p + 1..n.min(p + b + 1) {
            let x = self.get(i, q);
            let y = self.get(i, p);
            self.set(i, q, c * x + s.conj() * y);
            self.set(i, p, -s * x + c * y);
        }
        let a = self.get(q, q);
        let d = self.get(p, p);
        let beta = self.get(p, q);
        // B = [[a, β̄], [β, d]];  G B Gᴴ
        let g = [[C64::from(c), s], [-s.conj(), C64::from(c)]];
        let bm = [[a, beta.conj()], [beta, d]];
        let mut gb = [[C64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                gb[i][j] = g[i][0] * bm[0][j] + g[i][1] * bm[1][j];
            }
        }
        let mut out = [[C64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = gb[i][0] * g[j][0].conj() + gb[i][1] * g[j][1].conj();
            }
        }
        self.set(q, q, C64::from(out[0][0].re));
        self.set(p, p, C64::from(out[1][1].re));
        self.set(p, q, out[1][0]);
    }

    /// Zero A[p][col] against A[p-1][col].
    fn annihilate(&mut self, p: usize, col: usize, b: usize) {
        let x = self.get(p - 1, col);
        let y = self.get(p, col);
        if y == C64::new(0.0, 0.0) {
            return;
        }
        let r = x.norm().hypot(y.norm());
        let (c, s) = if x.norm() == 0.0 {
            (0.0, C64::new(1.0, 0.0))
        } else {
            (x.norm() / r, (x / x.norm()) * y.conj() / r)
        };
        self.rotate(p, c, s, b);
        self.set(p, col, C64::new(0.0, 0.0));
    }
}

/// Reduce a Hermitian band matrix to real symmetric tridiagonal form,
/// returning (diagonal, sub-diagonal).
pub fn tridiagonalize(a: &CsrMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.nrows;
    let b = a.bandwidth();
    let w = b + 2;
    let mut m = LowerBand { n, w, data: vec![C64::new(0.0, 0.0); n * w] };
    for i in 0..n {
        for (j, v) in a.row(i) {
            if j <= i {
                m.set(i, j, v);
            }
        }
    }
    if b > 1 {
        for j in 0..n.saturating_sub(2) {
            for k in (2..=b.min(n - 1 - j)).rev() {
                let p = j + k;
                m.annihilate(p, j, b);
                let mut pp = p + b;
                while pp < n {
                    m.annihilate(pp, pp - b - 1, b);
                    pp += b;
                }
            }
        }
    }
    let d: Vec<f64> = (0..n).map(|i| m.get(i, i).re).collect();
    let e: Vec<C64> = (0..n.saturating_sub(1)).map(|i| m.get(i + 1, i)).collect();
    let (_, e_real) = tridiag::realify(&e);
    (d, e_real)
}

/// All eigenvalues of a Hermitian band matrix, ascending.
pub fn band_eigenvalues(a: &CsrMatrix) -> Result<Vec<f64>> {
    let (d, e) = tridiagonalize(a);
    tridiag::eigenvalues(&d, &e)
}

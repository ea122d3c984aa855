//! Real symmetric tridiagonal eigenvalues (implicit QL) and eigenvectors by
//! inverse iteration.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// sub-diagonal `e` (`e.len() == d.len() - 1`), ascending.
pub fn eigenvalues(d: &[f64], e: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    assert_eq!(e.len() + 1, n, "sub-diagonal length");
    let mut d = d.to_vec();
    let mut e: Vec<f64> = e.iter().copied().chain(std::iter::once(0.0)).collect();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::ConvergenceFailure(format!("tridiagonal QL stalled at index {l}")));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(d)
}

/// Solve (T - λI)x = r for tridiagonal T with partial pivoting.
fn solve_shifted(d: &[f64], e: &[f64], lambda: f64, r: &[f64]) -> Vec<f64> {
    let n = d.len();
    // rows stored as (sub, diag, sup, sup2) after pivoting
    let mut a: Vec<f64> = d.iter().map(|x| x - lambda).collect();
    let mut b: Vec<f64> = e.to_vec(); // super-diagonal
    let mut c: Vec<f64> = e.to_vec(); // sub-diagonal
    let mut f = vec![0.0; n.saturating_sub(2)]; // fill-in second super-diagonal
    let mut x = r.to_vec();
    let tiny = f64::EPSILON * d.iter().chain(e).map(|v| v.abs()).fold(1e-300, f64::max);
    for k in 0..n.saturating_sub(1) {
        if c[k].abs() > a[k].abs() {
            // swap rows k and k+1
            std::mem::swap(&mut a[k], &mut c[k]);
            let t = b[k];
            b[k] = a[k + 1];
            a[k + 1] = t;
            if k + 1 < n - 1 {
                f[k] = b[k + 1];
                b[k + 1] = 0.0;
            }
            x.swap(k, k + 1);
        }
        let piv = if a[k].abs() < tiny { tiny } else { a[k] };
        a[k] = piv;
        let m = c[k] / piv;
        a[k + 1] -= m * b[k];
        if k + 1 < n - 1 {
            b[k + 1] -= m * f[k];
        }
        x[k + 1] -= m * x[k];
    }
    if a[n - 1].abs() < tiny {
        a[n - 1] = tiny;
    }
    let mut out = vec![0.0; n];
    for k in (0..n).rev() {
        let mut s = x[k];
        if k + 1 < n {
            s -= b[k] * out[k + 1];
        }
        if k + 2 < n {
            s -= f[k] * out[k + 2];
        }
        out[k] = s / a[k];
    }
    out
}

/// Unit eigenvector for an (accurate) eigenvalue `lambda`.
pub fn eigenvector(d: &[f64], e: &[f64], lambda: f64) -> Vec<f64> {
    let n = d.len();
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919 % 13) as f64)).collect();
    for _ in 0..4 {
        let y = solve_shifted(d, e, lambda, &x);
        let nrm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        x = y.into_iter().map(|v| v / nrm).collect();
    }
    x
}

/// Diagonal unitary `t` such that `diag(t)ᴴ T diag(t)` has real, nonnegative
/// off-diagonals `|e|` for a Hermitian tridiagonal with complex sub-diagonal
/// `e` (T[k+1][k] = e[k]).
pub fn realify(e: &[C64]) -> (Vec<C64>, Vec<f64>) {
    let mut t = Vec::with_capacity(e.len() + 1);
    t.push(C64::new(1.0, 0.0));
    for (k, ek) in e.iter().enumerate() {
        let a = ek.norm();
        let phase = if a > 0.0 { ek / a } else { C64::new(1.0, 0.0) };
        t.push(t[k] * phase);
    }
    (t, e.iter().map(|v| v.norm()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_difference_spectrum() {
        // tridiag(-1, 2, -1) has eigenvalues 2 - 2cos(kπ/(n+1))
        let n = 50;
        let d = vec![2.0; n];
        let e = vec![-1.0; n - 1];
        let ev = eigenvalues(&d, &e).unwrap();
        for (k, v) in ev.iter().enumerate() {
            let want = 2.0 - 2.0 * (((k + 1) as f64) * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - want).abs() < 1e-12, "{k}: {v} vs {want}");
        }
        let lam = ev[3];
        let x = eigenvector(&d, &e, lam);
        for i in 0..n {
            let mut tx = d[i] * x[i];
            if i > 0 {
                tx += e[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                tx += e[i] * x[i + 1];
            }
            assert!((tx - lam * x[i]).abs() < 1e-10);
        }
    }
}

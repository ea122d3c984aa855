//! The 1+1 dimensional Dirac system over (x⁰, x³) with effective mass,
//! in closed form for plane waves and on a staggered x³ grid for static A₀.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fields::{Component, Longitudinal, Momenta, Separable};
use crate::lattice::{link_phase, ComplexField, Coupling, Grid, Link};
use crate::linalg::tridiag;
use crate::potential::PotentialSpec;
use crate::Branch;

/// m̃ = sqrt(m² + λ²).
pub fn effective_mass(m: f64, lambda2: f64) -> Result<f64> {
    let s = m * m + lambda2;
    if s <= 0.0 || !s.is_finite() {
        return Err(Error::TachyonicMode(s));
    }
    Ok(s.sqrt())
}

fn alpha_factor(m: f64, lambda2: f64) -> Result<f64> {
    if m <= 0.0 {
        return Err(Error::ZeroMass(m));
    }
    Ok(effective_mass(m, lambda2)? / m)
}

/// α = sqrt(1 + λ²/m²) α̃.
pub fn rescale_alpha<C: Component>(alpha_tilde: &C, m: f64, lambda2: f64) -> Result<C> {
    Ok(alpha_tilde.scale(C64::from(alpha_factor(m, lambda2)?)))
}

/// Inverse of [`rescale_alpha`].
pub fn unscale_alpha<C: Component>(alpha: &C, m: f64, lambda2: f64) -> Result<C> {
    Ok(alpha.scale(C64::from(1.0 / alpha_factor(m, lambda2)?)))
}

/// A longitudinal factor with a constant amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub shape: Longitudinal,
    pub amp: C64,
}

impl Factor {
    /// shape·amp ⊗ transverse.
    pub fn times(&self, transverse: &ComplexField) -> Separable {
        Separable::product(self.shape.clone(), transverse.scale(self.amp))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LongitudinalKind {
    PlaneWave,
    Stationary,
}

/// (φ, α̃) solving, for dotted1, π¹¹̇φ = m̃α̃ and π²²̇α̃ = m̃φ; dotted2 swaps
/// the roles of π¹¹̇ and π²²̇.
#[derive(Debug, Clone, PartialEq)]
pub struct LongitudinalSolution {
    pub phi: Factor,
    pub alpha_tilde: Factor,
    pub eff_mass: f64,
    pub branch: Branch,
    pub kind: LongitudinalKind,
}

impl LongitudinalSolution {
    /// (p⁰, p³) for plane waves.
    pub fn momentum(&self) -> Option<(f64, f64)> {
        match self.phi.shape {
            Longitudinal::PlaneWave { p0, p3 } => Some((p0, p3)),
            Longitudinal::Stationary { .. } => None,
        }
    }

    pub fn energy(&self) -> f64 {
        match &self.phi.shape {
            Longitudinal::PlaneWave { p0, .. } => *p0,
            Longitudinal::Stationary { eps, .. } => *eps,
        }
    }

    /// Relative residuals of the two first-order equations, evaluated with
    /// the longitudinal part of `momenta`.
    ///
    /// Stationary profiles are checked on interior nodes only: the box
    /// closes the staggered scheme with the lower component free at the
    /// walls, while the central difference at the first and last node pads
    /// with zeros.
    pub fn residuals(&self, momenta: &Momenta) -> Result<(f64, f64)> {
        let one = Grid::transverse(-1.0, 1.0, 1)?;
        let unit = ComplexField::from_values(&one, vec![C64::new(1.0, 0.0)])?;
        let phi = self.phi.times(&unit);
        let alpha = self.alpha_tilde.times(&unit);
        let (a, b) = match self.branch {
            Branch::Dotted1 => (1.0, -1.0),
            Branch::Dotted2 => (-1.0, 1.0),
        };
        let op = |f: &Separable, s: f64| -> Result<Separable> {
            f.apply_pi(0, momenta)?.lin_comb(C64::new(1.0, 0.0), &f.apply_pi(3, momenta)?, C64::from(s))
        };
        let mt = C64::from(self.eff_mass);
        let r1 = op(&phi, a)?.lin_comb(C64::new(1.0, 0.0), &alpha, -mt)?;
        let r2 = op(&alpha, b)?.lin_comb(C64::new(1.0, 0.0), &phi, -mt)?;
        let scale = self.eff_mass * (phi.norm_sqr() + alpha.norm_sqr()).sqrt();
        let norm = |r: &Separable| match self.kind {
            LongitudinalKind::PlaneWave => r.norm(),
            LongitudinalKind::Stationary => interior_norm(r),
        };
        Ok((norm(&r1) / scale, norm(&r2) / scale))
    }
}

/// Norm of a residual built on the single-point transverse grid, skipping
/// the first and last x³ node.
fn interior_norm(r: &Separable) -> f64 {
    let mut sum: Option<ComplexField> = None;
    for (l, t) in &r.terms {
        let Longitudinal::Stationary { profile, .. } = l else {
            return r.norm();
        };
        let f = profile.scale(t.values[0]);
        sum = Some(match sum {
            None => f,
            Some(acc) => acc.add(&f).expect("profiles share the x3 grid"),
        });
    }
    let Some(f) = sum else { return 0.0 };
    let n = f.values.len();
    let inner: f64 = f.values.iter().take(n.saturating_sub(1)).skip(1).map(|v| v.norm_sqr()).sum();
    (inner * f.grid.cell_volume()).sqrt()
}

/// Plane-wave solution φ = e^{-i(p⁰x⁰ - p³x³)} with p⁰ = sign·sqrt(m̃² + p³²).
pub fn solve_longitudinal_planewave(eff_mass: f64, p3: f64, branch: Branch, positive_energy: bool) -> Result<LongitudinalSolution> {
    if eff_mass <= 0.0 {
        return Err(Error::ZeroMass(eff_mass));
    }
    let sign = if positive_energy { 1.0 } else { -1.0 };
    let p0 = sign * (eff_mass * eff_mass + p3 * p3).sqrt();
    let ratio = match branch {
        Branch::Dotted1 => (p0 + p3) / eff_mass,
        Branch::Dotted2 => (p0 - p3) / eff_mass,
    };
    let shape = Longitudinal::PlaneWave { p0, p3 };
    Ok(LongitudinalSolution {
        phi: Factor { shape: shape.clone(), amp: C64::new(1.0, 0.0) },
        alpha_tilde: Factor { shape, amp: C64::from(ratio) },
        eff_mass,
        branch,
        kind: LongitudinalKind::PlaneWave,
    })
}

/// Stationary modes found on an x³ grid.
#[derive(Debug, Clone)]
pub struct StationarySpectrum {
    pub modes: Vec<LongitudinalSolution>,
    /// ‖Hz - εz‖ of each staggered eigenvector (unit z).
    pub residuals: Vec<f64>,
    /// Set when a coarse eigenvalue has no counterpart on the refined grid.
    pub spectral_pollution: bool,
}

struct Staggered {
    d: Vec<f64>,
    /// Sub-diagonal H[k+1][k].
    e: Vec<C64>,
    /// Links carrying v from x_i ± h/2 to x_i, for interpolation.
    up: Vec<C64>,
    down: Vec<C64>,
}

/// Unknowns interleaved as v½, u₁, v₃⁄₂, …, u_N, v_{N+½} with
/// u = (φ + α̃)/√2 on the grid points and v = (φ - α̃)/√2 on the midpoints.
fn staggered(p: &PotentialSpec, axis: &crate::lattice::AxisSpec, eff_mass: f64, branch: Branch) -> Staggered {
    let n = axis.n;
    let h = axis.h();
    let s = match branch {
        Branch::Dotted1 => 1.0,
        Branch::Dotted2 => -1.0,
    };
    let at = |x3: f64| [0.0, 0.0, 0.0, x3];
    let v_of = |x3: f64| p.q * p.a[0].eval(&at(x3));
    let link = if p.a[3].as_constant() == Some(0.0) { None } else { Some(Link { q: p.q, a: p.a[3].clone() }) };
    let phase = |x3: f64, ds: f64| link.as_ref().map_or(C64::new(1.0, 0.0), |l| link_phase(l, &at(x3), 3, ds));
    let mut d = Vec::with_capacity(2 * n + 1);
    let mut e = Vec::with_capacity(2 * n);
    let mut up = Vec::with_capacity(n);
    let mut down = Vec::with_capacity(n);
    for k in 0..=2 * n {
        if k % 2 == 0 {
            let x = axis.min + (k / 2) as f64 * h + 0.5 * h;
            d.push(v_of(x) - eff_mass);
        } else {
            let i = (k + 1) / 2;
            let x = axis.point(i - 1);
            d.push(v_of(x) + eff_mass);
            let (uplus, uminus) = (phase(x, 0.5 * h), phase(x, -0.5 * h));
            up.push(uplus);
            down.push(uminus);
            // H[u_i, v_{i-½}] = -i s U₋/h, so H[k][k-1] is that value
            e.push(C64::new(0.0, -s / h) * uminus);
            // H[v_{i+½}, u_i] = conj(H[u_i, v_{i+½}]) = conj(i s U₊/h)
            e.push((C64::new(0.0, s / h) * uplus).conj());
        }
    }
    Staggered { d, e, up, down }
}

fn check_static(p: &PotentialSpec, grid: &Grid) -> Result<crate::lattice::AxisSpec> {
    if grid.axes().len() != 1 {
        return Err(Error::InvalidAxis(format!("stationary solver needs an x3 grid, got {grid}")));
    }
    let axis = *grid.axis(3)?;
    for mu in [0, 3] {
        if p.a[mu].depends_on(0) {
            return Err(Error::Unsupported(format!("stationary solver needs A{mu} independent of x0")));
        }
    }
    Ok(axis)
}

struct RawMode {
    eps: f64,
    z: Vec<C64>,
    residual: f64,
}

fn particle_modes(st: &Staggered, k: usize) -> Result<Vec<RawMode>> {
    let (t, ereal) = tridiag::realify(&st.e);
    let vals = tridiag::eigenvalues(&st.d, &ereal)?;
    let mut out = Vec::new();
    for &eps in &vals {
        let y = tridiag::eigenvector(&st.d, &ereal, eps);
        let z: Vec<C64> = y.iter().zip(&t).map(|(a, b)| b * *a).collect();
        let (mut nu, mut nv) = (0.0, 0.0);
        for (j, c) in z.iter().enumerate() {
            if j % 2 == 1 {
                nu += c.norm_sqr();
            } else {
                nv += c.norm_sqr();
            }
        }
        if nu <= nv {
            continue;
        }
        let mut residual = 0.0;
        for j in 0..z.len() {
            let mut hz = st.d[j] * z[j];
            if j > 0 {
                hz += st.e[j - 1] * z[j - 1];
            }
            if j + 1 < z.len() {
                hz += st.e[j].conj() * z[j + 1];
            }
            residual += (hz - eps * z[j]).norm_sqr();
        }
        out.push(RawMode { eps, z, residual: residual.sqrt() });
        if out.len() == k {
            break;
        }
    }
    Ok(out)
}

/// The `k` lowest particle-like stationary modes φ = e^{-iεx⁰} f(x³) for a
/// static A₀(x³) (and optional static A₃), Dirichlet on u at the ends.
///
/// Particle-like means the u = (φ + α̃)/√2 half carries more weight than v.
pub fn solve_longitudinal_stationary(
    p: &PotentialSpec,
    eff_mass: f64,
    grid: &Grid,
    branch: Branch,
    k: usize,
) -> Result<StationarySpectrum> {
    if eff_mass <= 0.0 {
        return Err(Error::ZeroMass(eff_mass));
    }
    let axis = check_static(p, grid)?;
    if k == 0 || k > axis.n {
        return Err(Error::TooManyModes { requested: k, dim: axis.n });
    }
    let st = staggered(p, &axis, eff_mass, branch);
    let raw = particle_modes(&st, k)?;
    let scale = st.d.iter().map(|v| v.abs()).fold(0.0, f64::max) + 2.0 / axis.h();
    if let Some(bad) = raw.iter().find(|r| r.residual > 1e-8 * scale) {
        return Err(Error::ConvergenceFailure(format!("stationary mode at {} has residual {:e}", bad.eps, bad.residual)));
    }
    let fine_axis = axis.refined();
    let fine = particle_modes(&staggered(p, &fine_axis, eff_mass, branch), k + 2)?;
    let spectral_pollution = raw.iter().any(|r| {
        !fine.iter().any(|f| (f.eps - r.eps).abs() <= 0.05 * eff_mass.max(r.eps.abs()))
    });
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    let mut modes = Vec::with_capacity(raw.len());
    let mut residuals = Vec::with_capacity(raw.len());
    for r in raw {
        let n = axis.n;
        let mut f = Vec::with_capacity(n);
        let mut g = Vec::with_capacity(n);
        for i in 0..n {
            let u = r.z[2 * i + 1];
            let v = 0.5 * (st.up[i] * r.z[2 * i + 2] + st.down[i] * r.z[2 * i]);
            f.push((u + v) * inv);
            g.push((u - v) * inv);
        }
        let f = ComplexField::from_values(grid, f)?;
        let g = ComplexField::from_values(grid, g)?;
        let norm = (f.norm_sqr() + g.norm_sqr()).sqrt();
        let s = C64::from(1.0 / norm);
        modes.push(LongitudinalSolution {
            phi: Factor { shape: Longitudinal::Stationary { eps: r.eps, profile: f.scale(s) }, amp: C64::new(1.0, 0.0) },
            alpha_tilde: Factor {
                shape: Longitudinal::Stationary { eps: r.eps, profile: g.scale(s) },
                amp: C64::new(1.0, 0.0),
            },
            eff_mass,
            branch,
            kind: LongitudinalKind::Stationary,
        });
        residuals.push(r.residual);
    }
    Ok(StationarySpectrum { modes, residuals, spectral_pollution })
}

/// Momenta for evaluating longitudinal residuals of `p` on profile grids.
pub fn longitudinal_momenta(p: &PotentialSpec) -> Momenta {
    Momenta::new(p.clone(), Coupling::Peierls)
}

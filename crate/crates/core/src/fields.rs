//! Field representations that the kinetic momenta π^μ can act on.
//!
//! Three carriers share one interface ([`Component`]):
//!
//! * [`PlaneWave`]: amplitude × e^{-ip·x}, exact for constant potentials;
//! * [`Separable`]: Σ longitudinal factor ⊗ transverse grid field, the
//!   factored form of separated solutions;
//! * [`Sampled`]: plain samples on a 4D grid, the general fallback.
//!
//! Norms of analytic longitudinal factors are averages per unit
//! longitudinal volume, so plane waves of different momenta are orthogonal.

use std::sync::{Arc, Mutex};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::lattice::{pi_operator, ComplexField, Coupling, CsrMatrix, Grid};
use crate::potential::PotentialSpec;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Potential plus discretisation choices, with a cache of assembled π^μ
/// matrices keyed by grid.
#[derive(Debug)]
pub struct Momenta {
    pub potential: PotentialSpec,
    pub coupling: Coupling,
    cache: Mutex<Vec<(Grid, usize, Arc<CsrMatrix>)>>,
}

impl Clone for Momenta {
    fn clone(&self) -> Self {
        Momenta::new(self.potential.clone(), self.coupling)
    }
}

impl Momenta {
    pub fn new(potential: PotentialSpec, coupling: Coupling) -> Self {
        Momenta { potential, coupling, cache: Mutex::new(Vec::new()) }
    }

    pub fn q(&self) -> f64 {
        self.potential.q
    }

    /// Assembled matrix of π^mu on `grid`.
    pub fn matrix(&self, grid: &Grid, mu: usize) -> Result<Arc<CsrMatrix>> {
        {
            let cache = self.cache.lock().unwrap();
            if let Some((_, _, m)) = cache.iter().find(|(g, nu, _)| *nu == mu && g == grid) {
                return Ok(m.clone());
            }
        }
        let m = Arc::new(pi_operator(mu, &self.potential, grid, self.coupling)?.matrix());
        self.cache.lock().unwrap().push((grid.clone(), mu, m.clone()));
        Ok(m)
    }

    pub fn apply_grid(&self, f: &ComplexField, mu: usize) -> Result<ComplexField> {
        let m = self.matrix(&f.grid, mu)?;
        ComplexField::from_values(&f.grid, m.matvec(&f.values))
    }

    fn constant_component(&self, mu: usize) -> Result<f64> {
        self.potential.a[mu].as_constant().ok_or_else(|| {
            Error::Unsupported(format!("analytic factor needs a constant A{mu}, got {}", self.potential.a[mu]))
        })
    }

    /// Value of the multiplication part of π^mu for constant potentials:
    /// π^μ = p^μ - qA^μ with A^0 = A_0 and A^j = -A_j.
    fn constant_shift(&self, mu: usize) -> Result<f64> {
        let a = self.constant_component(mu)?;
        Ok(if mu == 0 { -self.q() * a } else { self.q() * a })
    }
}

/// Operations every field carrier supports.
pub trait Component: Clone + Send + Sync + Sized {
    fn zero_like(&self) -> Self;
    /// a·self + b·other.
    fn lin_comb(&self, a: C64, other: &Self, b: C64) -> Result<Self>;
    fn scale(&self, c: C64) -> Self;
    fn conj(&self) -> Self;
    fn inner(&self, other: &Self) -> Result<C64>;
    /// Mirror x³ → -x³.
    fn reflect_x3(&self) -> Result<Self>;
    /// Apply π^mu.
    fn apply_pi(&self, mu: usize, ctx: &Momenta) -> Result<Self>;

    fn norm_sqr(&self) -> f64 {
        self.inner(self).map(|v| v.re.max(0.0)).unwrap_or(f64::NAN)
    }

    fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    fn add(&self, other: &Self) -> Result<Self> {
        self.lin_comb(C64::new(1.0, 0.0), other, C64::new(1.0, 0.0))
    }

    fn sub(&self, other: &Self) -> Result<Self> {
        self.lin_comb(C64::new(1.0, 0.0), other, C64::new(-1.0, 0.0))
    }
}

// ---------------------------------------------------------------------------
// plane waves

/// amp · exp(-i p·x) with p·x = p⁰x⁰ - p¹x¹ - p²x² - p³x³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWave {
    /// Upper-index momentum p^μ.
    pub p: [f64; 4],
    pub amp: C64,
}

impl PlaneWave {
    pub fn new(p: [f64; 4], amp: C64) -> Self {
        PlaneWave { p, amp }
    }

    pub fn phase(&self, x: &[f64; 4]) -> f64 {
        self.p[0] * x[0] - self.p[1] * x[1] - self.p[2] * x[2] - self.p[3] * x[3]
    }

    pub fn value(&self, x: &[f64; 4]) -> C64 {
        self.amp * C64::from_polar(1.0, -self.phase(x))
    }

    pub fn sample(&self, grid: &Grid) -> Sampled {
        let w = *self;
        Sampled(ComplexField::sample(grid, move |x| w.value(&x)))
    }

    fn momentum_of(a: &Self, b: &Self) -> Result<[f64; 4]> {
        if a.amp == ZERO {
            return Ok(b.p);
        }
        if b.amp == ZERO || a.p == b.p {
            return Ok(a.p);
        }
        Err(Error::Unsupported("sum of plane waves with different momenta".into()))
    }
}

impl Component for PlaneWave {
    fn zero_like(&self) -> Self {
        PlaneWave { p: self.p, amp: ZERO }
    }

    fn lin_comb(&self, a: C64, other: &Self, b: C64) -> Result<Self> {
        let p = PlaneWave::momentum_of(self, other)?;
        Ok(PlaneWave { p, amp: a * self.amp + b * other.amp })
    }

    fn scale(&self, c: C64) -> Self {
        PlaneWave { p: self.p, amp: self.amp * c }
    }

    fn conj(&self) -> Self {
        PlaneWave { p: self.p.map(|v| -v), amp: self.amp.conj() }
    }

    fn inner(&self, other: &Self) -> Result<C64> {
        if self.p == other.p {
            Ok(self.amp.conj() * other.amp)
        } else {
            Ok(ZERO)
        }
    }

    fn reflect_x3(&self) -> Result<Self> {
        let mut p = self.p;
        p[3] = -p[3];
        Ok(PlaneWave { p, amp: self.amp })
    }

    fn apply_pi(&self, mu: usize, ctx: &Momenta) -> Result<Self> {
        let shift = ctx.constant_shift(mu)?;
        Ok(PlaneWave { p: self.p, amp: self.amp * (self.p[mu] + shift) })
    }
}

// ---------------------------------------------------------------------------
// separable fields

/// Longitudinal factor of a separable term.
#[derive(Debug, Clone, PartialEq)]
pub enum Longitudinal {
    /// exp(-i(p⁰x⁰ - p³x³)).
    PlaneWave { p0: f64, p3: f64 },
    /// exp(-iεx⁰) f(x³) with f sampled on an x³ grid.
    Stationary { eps: f64, profile: ComplexField },
}

impl Longitudinal {
    pub fn value(&self, x0: f64, x3: f64) -> Result<C64> {
        match self {
            Longitudinal::PlaneWave { p0, p3 } => Ok(C64::from_polar(1.0, -(p0 * x0 - p3 * x3))),
            Longitudinal::Stationary { eps, profile } => {
                let axis = profile.grid.axes()[0];
                let t = (x3 - axis.min) / axis.h() - 1.0;
                let i = t.round();
                if (t - i).abs() > 1e-9 || i < 0.0 || i as usize >= axis.n {
                    return Err(Error::Unsupported(format!("x3 = {x3} is not a profile grid point")));
                }
                Ok(C64::from_polar(1.0, -eps * x0) * profile.values[i as usize])
            }
        }
    }

    fn inner(&self, other: &Self) -> Result<C64> {
        match (self, other) {
            (Longitudinal::PlaneWave { p0, p3 }, Longitudinal::PlaneWave { p0: q0, p3: q3 }) => {
                Ok(if p0 == q0 && p3 == q3 { C64::new(1.0, 0.0) } else { ZERO })
            }
            (Longitudinal::Stationary { eps: e1, profile: f }, Longitudinal::Stationary { eps: e2, profile: g }) => {
                if e1 == e2 {
                    f.inner(g)
                } else {
                    Ok(ZERO)
                }
            }
            _ => Err(Error::Unsupported("inner product of plane-wave and stationary factors".into())),
        }
    }

    fn conj(&self) -> Self {
        match self {
            Longitudinal::PlaneWave { p0, p3 } => Longitudinal::PlaneWave { p0: -p0, p3: -p3 },
            Longitudinal::Stationary { eps, profile } => {
                Longitudinal::Stationary { eps: -eps, profile: profile.conj() }
            }
        }
    }

    fn reflect_x3(&self) -> Result<Self> {
        Ok(match self {
            Longitudinal::PlaneWave { p0, p3 } => Longitudinal::PlaneWave { p0: *p0, p3: -p3 },
            Longitudinal::Stationary { eps, profile } => {
                Longitudinal::Stationary { eps: *eps, profile: profile.reflect(3)? }
            }
        })
    }

    /// π^mu for mu ∈ {0, 3}: returns (new factor, scalar multiplier).
    fn apply_pi(&self, mu: usize, ctx: &Momenta) -> Result<(Longitudinal, C64)> {
        match self {
            Longitudinal::PlaneWave { p0, p3 } => {
                let p = if mu == 0 { *p0 } else { *p3 };
                Ok((self.clone(), C64::from(p + ctx.constant_shift(mu)?)))
            }
            Longitudinal::Stationary { eps, profile } => {
                let new = if mu == 0 {
                    let a0 = &ctx.potential.a[0];
                    if a0.depends_on(0) {
                        return Err(Error::Unsupported("stationary factor needs a static A0".into()));
                    }
                    let q = ctx.q();
                    let vals = profile
                        .values
                        .iter()
                        .enumerate()
                        .map(|(i, f)| f * (eps - q * a0.eval(&profile.grid.position(i))))
                        .collect();
                    ComplexField::from_values(&profile.grid, vals)?
                } else {
                    if ctx.potential.a[3].depends_on(0) {
                        return Err(Error::Unsupported("stationary factor needs a static A3".into()));
                    }
                    ctx.apply_grid(profile, 3)?
                };
                Ok((Longitudinal::Stationary { eps: *eps, profile: new }, C64::new(1.0, 0.0)))
            }
        }
    }
}

/// Σ_t L_t(x⁰, x³) · T_t(x¹, x²).
#[derive(Debug, Clone, PartialEq)]
pub struct Separable {
    pub transverse_grid: Grid,
    pub terms: Vec<(Longitudinal, ComplexField)>,
}

impl Separable {
    pub fn product(long: Longitudinal, trans: ComplexField) -> Self {
        Separable { transverse_grid: trans.grid.clone(), terms: vec![(long, trans)] }
    }

    pub fn zero(transverse_grid: &Grid) -> Self {
        Separable { transverse_grid: transverse_grid.clone(), terms: Vec::new() }
    }

    /// Merge terms sharing the same longitudinal factor and drop zeros.
    fn compact(mut self) -> Self {
        let mut out: Vec<(Longitudinal, ComplexField)> = Vec::with_capacity(self.terms.len());
        for (l, t) in self.terms.drain(..) {
            if let Some(slot) = out.iter_mut().find(|(l2, _)| *l2 == l) {
                slot.1 = slot.1.add(&t).expect("same transverse grid");
            } else {
                out.push((l, t));
            }
        }
        out.retain(|(_, t)| t.values.iter().any(|v| *v != ZERO));
        Separable { transverse_grid: self.transverse_grid, terms: out }
    }

    /// Evaluate on a 4D grid (for plotting and cross-checks).
    pub fn sample(&self, grid: &Grid) -> Result<Sampled> {
        let tg = &self.transverse_grid;
        let a1 = tg.axis(1)?;
        let a2 = tg.axis(2)?;
        let g1 = grid.axis(1)?;
        let g2 = grid.axis(2)?;
        if a1 != g1 || a2 != g2 {
            return Err(Error::GridMismatch);
        }
        let mut values = vec![ZERO; grid.len()];
        for (i, v) in values.iter_mut().enumerate() {
            let x = grid.position(i);
            let idx = grid.multi_index(i);
            let i1 = idx[grid.axis_of(1).unwrap()];
            let i2 = idx[grid.axis_of(2).unwrap()];
            let ti = tg.flat_index(&[i1, i2][..]);
            for (l, t) in &self.terms {
                *v += l.value(x[0], x[3])? * t.values[ti];
            }
        }
        Ok(Sampled(ComplexField::from_values(grid, values)?))
    }

    /// Value at (x⁰, x³) and the transverse grid point with flat index `ti`.
    pub fn value_at(&self, x0: f64, x3: f64, ti: usize) -> Result<C64> {
        if ti >= self.transverse_grid.len() {
            return Err(Error::Unsupported(format!("transverse index {ti} out of range")));
        }
        let mut v = ZERO;
        for (l, t) in &self.terms {
            v += l.value(x0, x3)? * t.values[ti];
        }
        Ok(v)
    }
}

impl Component for Separable {
    fn zero_like(&self) -> Self {
        Separable::zero(&self.transverse_grid)
    }

    fn lin_comb(&self, a: C64, other: &Self, b: C64) -> Result<Self> {
        if self.transverse_grid != other.transverse_grid {
            return Err(Error::GridMismatch);
        }
        let mut terms: Vec<_> = self.terms.iter().map(|(l, t)| (l.clone(), t.scale(a))).collect();
        terms.extend(other.terms.iter().map(|(l, t)| (l.clone(), t.scale(b))));
        Ok(Separable { transverse_grid: self.transverse_grid.clone(), terms }.compact())
    }

    fn scale(&self, c: C64) -> Self {
        let terms = self.terms.iter().map(|(l, t)| (l.clone(), t.scale(c))).collect();
        Separable { transverse_grid: self.transverse_grid.clone(), terms }.compact()
    }

    fn conj(&self) -> Self {
        let terms = self.terms.iter().map(|(l, t)| (l.conj(), t.conj())).collect();
        Separable { transverse_grid: self.transverse_grid.clone(), terms }
    }

    fn inner(&self, other: &Self) -> Result<C64> {
        let mut s = ZERO;
        for (l1, t1) in &self.terms {
            for (l2, t2) in &other.terms {
                let lw = l1.inner(l2)?;
                if lw != ZERO {
                    s += lw * t1.inner(t2)?;
                }
            }
        }
        Ok(s)
    }

    fn reflect_x3(&self) -> Result<Self> {
        let terms = self.terms.iter().map(|(l, t)| Ok((l.reflect_x3()?, t.clone()))).collect::<Result<_>>()?;
        Ok(Separable { transverse_grid: self.transverse_grid.clone(), terms })
    }

    fn apply_pi(&self, mu: usize, ctx: &Momenta) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|(l, t)| match mu {
                0 | 3 => {
                    let (l2, c) = l.apply_pi(mu, ctx)?;
                    Ok((l2, t.scale(c)))
                }
                _ => Ok((l.clone(), ctx.apply_grid(t, mu)?)),
            })
            .collect::<Result<_>>()?;
        Ok(Separable { transverse_grid: self.transverse_grid.clone(), terms }.compact())
    }
}

// ---------------------------------------------------------------------------
// sampled fields

/// A component sampled on a grid that spans every coordinate π acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampled(pub ComplexField);

impl Component for Sampled {
    fn zero_like(&self) -> Self {
        Sampled(ComplexField::zeros(&self.0.grid))
    }

    fn lin_comb(&self, a: C64, other: &Self, b: C64) -> Result<Self> {
        Ok(Sampled(self.0.lin_comb(a, &other.0, b)?))
    }

    fn scale(&self, c: C64) -> Self {
        Sampled(self.0.scale(c))
    }

    fn conj(&self) -> Self {
        Sampled(self.0.conj())
    }

    fn inner(&self, other: &Self) -> Result<C64> {
        self.0.inner(&other.0)
    }

    fn reflect_x3(&self) -> Result<Self> {
        Ok(Sampled(self.0.reflect(3)?))
    }

    fn apply_pi(&self, mu: usize, ctx: &Momenta) -> Result<Self> {
        Ok(Sampled(ctx.apply_grid(&self.0, mu)?))
    }
}
